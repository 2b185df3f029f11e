use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("metric determinant {det:e} below floor {floor:e}")]
    SingularMetric { det: f64, floor: f64 },
    #[error("stencil of half-width {h:e} around {x:?} crosses constraint {constraint}")]
    StencilOutOfDomain { x: Vec<f64>, h: f64, constraint: usize },
    #[error("more than {max} reflections before t = {t}")]
    EventLoop { max: usize, t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("caustic crossing near t = {t} (|integrand| = {magnitude:e})")]
    CausticCrossing { t: f64, magnitude: f64 },
    #[error("evaluation at t = {t} lies within the caustic exclusion window")]
    CausticTime { t: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no branch terms to assemble")]
    EmptyBranchSet,
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("initial density vanishes")]
    ZeroInitialDensity,
    #[error("stencil error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    GridTooCoarse { estimate: f64, tolerance: f64 },
    #[error("outcome {0:?} is outside the representable range")]
    OutcomeOutOfRange(Vec<f64>),
    #[error("measurement operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("no quantized roots in [{lo}, {hi}]")]
    NoRoots { lo: f64, hi: f64 },
    #[error("degenerate linear system: {0}")]
    DegenerateSystem(String),
    #[error("gauge violation: max |div_M A| = {0:e}")]
    GaugeViolation(f64),
    #[error("x = 0 is a branch point of the quaternion map")]
    OriginBranchPoint,
    #[error("eigenspinor undefined: {0}")]
    PolarSingularity(String),
    #[error("linear solver did not converge (residual {residual:e} after {iterations} iterations)")]
    SolverDivergence { residual: f64, iterations: usize },
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
