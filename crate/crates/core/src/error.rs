use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // mesh construction
    #[error("mesh ratio must be finite and positive, got {0}")]
    InvalidRatio(f64),
    #[error("mesh needs at least 2 elements, got {0}")]
    TooFewElements(usize),
    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("ratio {ratio} with {elements} elements gives widths below floating-point resolution")]
    UnresolvableMesh { ratio: f64, elements: usize },
    #[error("point {x} lies outside [{a}, {b}]")]
    OutsideDomain { x: f64, a: f64, b: f64 },

    // basis
    #[error("local coordinate {xi} outside element [0, {width}]")]
    OutsideElement { xi: f64, width: f64 },
    #[error("element width must be positive, got {0}")]
    NonPositiveWidth(f64),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    // problem definition
    #[error("epsilon must be finite and positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("exact solution is singular at epsilon = 1")]
    SingularExact,
    #[error(transparent)]
    Parse(#[from] crate::problem::ParseError),

    // numerics
    #[error("quadrature order must be in 1..=16, got {0}")]
    InvalidQuadratureOrder(usize),
    #[error("integrand is not finite ({value}) at xi = {node}")]
    NonFiniteIntegrand { node: f64, value: f64 },
    #[error("zero pivot at row {row}")]
    ZeroPivot { row: usize },
    #[error("matrix is singular to working precision at row {row}")]
    Singular { row: usize },
    #[error("dense reference solver limited to n <= 2000, got {0}")]
    TooLarge(usize),

    // discretizations
    #[error("{method} system singular (eps = {epsilon}, sigma = {ratio}, N = {elements}) at row {row}; {hint}")]
    SolveFailed {
        method: &'static str,
        epsilon: f64,
        ratio: f64,
        elements: usize,
        row: usize,
        hint: &'static str,
    },

    // analysis
    #[error("problem has no exact solution")]
    MissingExact,
    #[error("invalid sigma grid: {0}")]
    InvalidGrid(String),
    #[error("invalid search interval ({lo}, {hi}): need 0 < lo < hi <= 1")]
    InvalidSearchInterval { lo: f64, hi: f64 },
    #[error("tolerance must be >= 1e-4, got {0}")]
    ToleranceTooSmall(f64),
    #[error("element counts must form a doubling sequence: {0:?}")]
    NotDoubling(Vec<usize>),
    #[error("every solve in the sweep failed")]
    AllSolvesFailed,
}
