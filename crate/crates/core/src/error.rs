use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("radial lift coefficient a(lambda)/(2 lambda) is not a polynomial")]
    NonPolynomialLift,

    #[error("symbol is not a constant of motion of |q|^2")]
    NotConstantOfMotion,

    #[error("symbol has degree {degree} in p, at most {max} is supported")]
    DegreeTooHigh { degree: u32, max: u32 },

    #[error("operator would need {entries} matrix entries, cap is {cap}")]
    GridTooLarge { entries: usize, cap: usize },

    #[error("matrix is not symplectic (defect {0:.3e})")]
    NotSymplectic(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grids do not match")]
    GridMismatch,

    #[error("section does not vanish on the boundary collar (relative size {0:.3e})")]
    BoundarySupported(f64),

    #[error("lambda = {0} is not a grid point")]
    OffGrid(f64),

    #[error("interval [{0}, {1}] contains no grid point")]
    EmptyInterval(f64, f64),

    #[error("field has {0} fibers, too few for the derivative stencil")]
    StencilTooShort(usize),

    #[error("fiber extraction leakage {leakage:.3e} exceeds threshold {threshold:.3e}")]
    ExcessiveLeakage { leakage: f64, threshold: f64 },

    #[error("Cartesian grid does not cover the polar annulus: {0}")]
    Coverage(String),

    #[error("{requested} iterated derivatives requested, at most {max} supported")]
    TooManyDerivatives { requested: usize, max: usize },

    #[error("unsupported spatial dimension {0}")]
    UnsupportedDimension(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
