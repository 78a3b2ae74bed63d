//! A small expression language for coefficient functions of `x`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := base ('^' unary)?
//! base   := number | 'x' | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and is right associative, so `-x^2` is
//! `-(x^2)` and `2^3^2` is `2^9`. Functions: `exp`, `sin`, `cos`, `log`,
//! `sqrt`, all of one argument.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier '{name}' at {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("function '{name}' at {pos} takes {expected} argument(s), got {found}")]
    Arity {
        name: String,
        pos: usize,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Exp,
    Sin,
    Cos,
    Log,
    Sqrt,
}

impl Function {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Self::Exp,
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "log" => Self::Log,
            "sqrt" => Self::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Self::Exp => "exp",
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Log => "log",
            Self::Sqrt => "sqrt",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Self::Exp => v.exp(),
            Self::Sin => v.sin(),
            Self::Cos => v.cos(),
            Self::Log => v.ln(),
            Self::Sqrt => v.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable,
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Function, Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(text)?;
        let mut parser = Parser {
            tokens: &tokens,
            pos: 0,
            end: text.len(),
        };
        if tokens.is_empty() {
            return Err(ParseError::Syntax {
                pos: 0,
                message: "empty expression".into(),
            });
        }
        let expr = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(ParseError::Syntax {
                pos: tok.pos,
                message: format!("unexpected {}", tok.kind),
            });
        }
        Ok(expr)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Constant(c) => *c,
            Expr::Variable => x,
            Expr::Neg(e) => -e.eval(x),
            Expr::Binary(op, l, r) => {
                let (l, r) = (l.eval(x), r.eval(x));
                match op {
                    BinaryOp::Add => l + r,
                    BinaryOp::Sub => l - r,
                    BinaryOp::Mul => l * r,
                    BinaryOp::Div => l / r,
                    BinaryOp::Pow => l.powf(r),
                }
            }
            Expr::Call(f, arg) => f.apply(arg.eval(x)),
        }
    }

    /// The value if the expression does not depend on `x`.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Expr::Constant(c) => Some(*c),
            Expr::Variable => None,
            Expr::Neg(e) => e.as_constant().map(|v| -v),
            Expr::Binary(_, l, r) => {
                l.as_constant()?;
                r.as_constant()?;
                Some(self.eval(0.0))
            }
            Expr::Call(_, arg) => arg.as_constant().map(|_| self.eval(0.0)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Constant(c) => write!(f, "{c}"),
            Expr::Variable => write!(f, "x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, l, r) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                    BinaryOp::Pow => "^",
                };
                write!(f, "({l} {sym} {r})")
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Number(v) => write!(f, "number {v}"),
            TokenKind::Ident(s) => write!(f, "identifier '{s}'"),
            TokenKind::Op(c) => write!(f, "'{c}'"),
            TokenKind::LParen => write!(f, "'('"),
            TokenKind::RParen => write!(f, "')'"),
            TokenKind::Comma => write!(f, "','"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = match c {
            '+' | '-' | '*' | '/' | '^' => {
                i += 1;
                TokenKind::Op(c)
            }
            '(' => {
                i += 1;
                TokenKind::LParen
            }
            ')' => {
                i += 1;
                TokenKind::RParen
            }
            ',' => {
                i += 1;
                TokenKind::Comma
            }
            '0'..='9' | '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent part, only when followed by digits
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let value = lit.parse::<f64>().map_err(|_| ParseError::Syntax {
                    pos: start,
                    message: format!("malformed number '{lit}'"),
                })?;
                TokenKind::Number(value)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                TokenKind::Ident(text[start..i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    pos: start,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        };
        tokens.push(Token { kind, pos: start });
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&Token> {
        let tok = self.tokens.get(self.pos);
        self.pos += 1;
        tok
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Op(c),
                ..
            }) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), ParseError> {
        let pos = self.here();
        match self.next() {
            Some(t) if t.kind == kind => Ok(()),
            Some(t) => Err(ParseError::Syntax {
                pos,
                message: format!("expected {kind}, found {}", t.kind),
            }),
            None => Err(ParseError::Syntax {
                pos,
                message: format!("expected {kind}, found end of input"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if op == '+' { BinaryOp::Add } else { BinaryOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if op == '*' { BinaryOp::Mul } else { BinaryOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.eat_op(&['^']).is_some() {
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        let Some(tok) = self.next() else {
            return Err(ParseError::Syntax {
                pos,
                message: "unexpected end of input".into(),
            });
        };
        match tok.kind.clone() {
            TokenKind::Number(v) => Ok(Expr::Constant(v)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(name) if name == "x" => Ok(Expr::Variable),
            TokenKind::Ident(name) => {
                let Some(func) = Function::from_name(&name) else {
                    return Err(ParseError::UnknownIdentifier { name, pos });
                };
                self.expect(TokenKind::LParen)?;
                let mut args = Vec::new();
                if !matches!(self.peek(), Some(Token { kind: TokenKind::RParen, .. })) {
                    args.push(self.expr()?);
                    while matches!(self.peek(), Some(Token { kind: TokenKind::Comma, .. })) {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                }
                self.expect(TokenKind::RParen)?;
                if args.len() != 1 {
                    return Err(ParseError::Arity {
                        name,
                        pos,
                        expected: 1,
                        found: args.len(),
                    });
                }
                Ok(Expr::Call(func, Box::new(args.pop().unwrap())))
            }
            other => Err(ParseError::Syntax {
                pos,
                message: format!("unexpected {other}"),
            }),
        }
    }
}
