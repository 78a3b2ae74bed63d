//! Boundary value problems `-ε u'' + p u' + q u = f` on `[0, 1]` with
//! `u(0) = λ`, `u(1) = β`, plus a small catalog of problems with known
//! solutions.

mod expr;

use std::fmt;
use std::sync::Arc;

pub use expr::{BinaryOp, Expr, Function, ParseError};

use crate::{Error, Result};

/// A real function of `x` used for `p`, `q`, `f` or the exact solution.
#[derive(Clone)]
pub struct Coefficient(Repr);

#[derive(Clone)]
enum Repr {
    Constant(f64),
    Expression(Arc<Expr>),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Coefficient {
    pub fn constant(value: f64) -> Self {
        Self(Repr::Constant(value))
    }

    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self(Repr::Function(Arc::new(f)))
    }

    pub fn from_expr(expr: Expr) -> Self {
        match expr.as_constant() {
            Some(c) => Self::constant(c),
            None => Self(Repr::Expression(Arc::new(expr))),
        }
    }

    /// Parse a coefficient written in the expression language of [`Expr`].
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::from_expr(Expr::parse(text)?))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match &self.0 {
            Repr::Constant(c) => *c,
            Repr::Expression(e) => e.eval(x),
            Repr::Function(f) => f(x),
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.0 {
            Repr::Constant(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Constant(c) => write!(f, "Constant({c})"),
            Repr::Expression(e) => write!(f, "Expression({e})"),
            Repr::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// `-ε u'' + p(x) u' + q(x) u = f(x)` on `[0, 1]`, `u(0) = λ`, `u(1) = β`.
#[derive(Debug, Clone)]
pub struct BvProblem {
    pub name: String,
    pub epsilon: f64,
    pub p: Coefficient,
    pub q: Coefficient,
    pub f: Coefficient,
    pub lambda: f64,
    pub beta: f64,
    pub exact: Option<Coefficient>,
}

impl BvProblem {
    pub fn new(
        name: impl Into<String>,
        epsilon: f64,
        p: Coefficient,
        q: Coefficient,
        f: Coefficient,
        lambda: f64,
        beta: f64,
    ) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        let problem = Self {
            name: name.into(),
            epsilon,
            p,
            q,
            f,
            lambda,
            beta,
            exact: None,
        };
        problem.warn_if_not_positive();
        Ok(problem)
    }

    pub fn with_exact(mut self, exact: Coefficient) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The classical theory assumes `p ≥ p* > 0` and `q ≥ q* > 0`. Problems
    /// outside that class are still solved.
    fn warn_if_not_positive(&self) {
        let samples = (0..=100).map(|k| k as f64 / 100.0);
        let (mut p_min, mut q_min) = (f64::INFINITY, f64::INFINITY);
        for x in samples {
            p_min = p_min.min(self.p.eval(x));
            q_min = q_min.min(self.q.eval(x));
        }
        if p_min <= 0.0 || q_min <= 0.0 {
            log::warn!(
                "problem '{}': min p = {p_min}, min q = {q_min} on [0, 1]; \
                 positivity assumptions p > 0, q > 0 do not hold",
                self.name
            );
        }
    }
}

/// `-ε u'' + u' = eˣ`, `u(0) = u(1) = 0`, with a boundary layer at `x = 1`.
///
/// Exact solution
/// `u = [eˣ - (1 - e^{1-1/ε} + (e - 1) e^{(x-1)/ε}) / (1 - e^{-1/ε})] / (1 - ε)`.
/// For small ε the exponentials underflow to zero, which is the correct
/// limit.
pub fn lorenz_example(epsilon: f64) -> Result<BvProblem> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if epsilon == 1.0 {
        return Err(Error::SingularExact);
    }
    let problem = BvProblem::new(
        "lorenz",
        epsilon,
        Coefficient::constant(1.0),
        Coefficient::constant(0.0),
        Coefficient::from_fn(f64::exp),
        0.0,
        0.0,
    )?;
    Ok(problem.with_exact(Coefficient::from_fn(move |x| lorenz_exact(epsilon, x))))
}

pub fn lorenz_exact(epsilon: f64, x: f64) -> f64 {
    let e = std::f64::consts::E;
    let tail = (-1.0 / epsilon).exp();
    let layer = ((x - 1.0) / epsilon).exp();
    let numer = 1.0 - e * tail + (e - 1.0) * layer;
    (x.exp() - numer / (1.0 - tail)) / (1.0 - epsilon)
}

/// Manufactured problem with `u(x) = x (1 - e^{(x-1)/ε})`, `p = q = 1` and
/// `f = -ε u'' + u' + u`.
pub fn manufactured_problem(epsilon: f64) -> Result<BvProblem> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let source = move |x: f64| {
        let (u, du, d2u) = manufactured_exact(epsilon, x);
        -epsilon * d2u + du + u
    };
    let problem = BvProblem::new(
        "manufactured",
        epsilon,
        Coefficient::constant(1.0),
        Coefficient::constant(1.0),
        Coefficient::from_fn(source),
        manufactured_exact(epsilon, 0.0).0,
        manufactured_exact(epsilon, 1.0).0,
    )?;
    Ok(problem.with_exact(Coefficient::from_fn(move |x| manufactured_exact(epsilon, x).0)))
}

/// `(u, u', u'')` of the manufactured solution.
pub fn manufactured_exact(epsilon: f64, x: f64) -> (f64, f64, f64) {
    let g = ((x - 1.0) / epsilon).exp();
    let u = x * (1.0 - g);
    let du = 1.0 - g - x * g / epsilon;
    let d2u = -2.0 * g / epsilon - x * g / (epsilon * epsilon);
    (u, du, d2u)
}

/// Catalog lookup by name: `lorenz` or `manufactured`.
pub fn catalog(name: &str, epsilon: f64) -> Option<Result<BvProblem>> {
    match name {
        "lorenz" => Some(lorenz_example(epsilon)),
        "manufactured" => Some(manufactured_problem(epsilon)),
        _ => None,
    }
}
