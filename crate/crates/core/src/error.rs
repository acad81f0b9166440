use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Every variant belongs to one of three classes (see [`ErrorClass`]) which the
/// command-line driver maps onto process exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("loop is singular on the circle: |det| = {det:.3e} at sample {index}")]
    SingularOnCircle { index: usize, det: f64 },
    #[error("potential parameter c must be nonzero")]
    ZeroC,
    #[error("gauge is singular at z = {z}: |det| = {det:.3e}")]
    SingularGauge { z: String, det: f64 },
    #[error("branch point hit: |Omega| = {modulus:.3e} at lambda = {lambda}")]
    BranchPointHit { lambda: String, modulus: f64 },
    #[error("step size underflow ({step:.3e}) near z = {z}")]
    StepUnderflow { z: String, step: f64 },
    #[error("log-power overflow: product needs power {needed}, maximum is {max}")]
    OverflowOfLogPower { needed: usize, max: usize },
    #[error("matrix is not positive definite ({context})")]
    NotPositive { context: String },
    #[error("frame is not unitary at lambda0: defect {defect:.3e}")]
    NotUnitary { defect: f64 },
    #[error("singular matrix ({context})")]
    Singular { context: String },
    #[error("factorization hit a cell boundary: pivot {pivot:.3e}")]
    CellBoundary { pivot: f64 },
    #[error("loop is not in either open Iwasawa cell")]
    NotInBigCell,
    #[error("degenerate induced metric at ({i}, {j}): det = {det:.3e}")]
    DegenerateMetric { i: usize, j: usize, det: f64 },
    #[error("circle grid too coarse: coefficient mass {mass:.3e} at the Nyquist band")]
    Aliasing { mass: f64 },
    #[error("spectral factorization did not converge (section size {size})")]
    NoConvergence { size: usize },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification of errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The numerics broke down (underflow, loss of positivity, cell boundary...).
    Numerical,
    /// The caller supplied inconsistent input.
    Input,
    /// Filesystem failure.
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            SingularOnCircle { .. }
            | SingularGauge { .. }
            | BranchPointHit { .. }
            | StepUnderflow { .. }
            | OverflowOfLogPower { .. }
            | NotPositive { .. }
            | NotUnitary { .. }
            | Singular { .. }
            | CellBoundary { .. }
            | NotInBigCell
            | DegenerateMetric { .. }
            | Aliasing { .. }
            | NoConvergence { .. } => ErrorClass::Numerical,
            ZeroC | InvalidPath(_) | InvalidInput(_) | Parse { .. } => ErrorClass::Input,
            Io(_) => ErrorClass::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
