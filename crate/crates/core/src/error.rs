use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeconvError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("empty sample")]
    EmptySample,
    #[error("spectral functions live on different grids")]
    GridMismatch,
    #[error("spectral function is not hermitian (deviation {0:e})")]
    NonHermitian(f64),
    #[error("inverse transform left an imaginary residue of {0:e}; grid inadequate")]
    ImaginaryResidue(f64),
    #[error("derivative order {k} exceeds Sobolev index {s}; no risk guarantee applies")]
    DerivativeBeyondIndex { k: u32, s: f64 },
    #[error("threshold rule {rule} needs input `{input}`")]
    MissingInput { rule: &'static str, input: &'static str },
    #[error("index function is not concave")]
    NotConcave,
    #[error("{value} lies outside the domain {domain}")]
    OutOfDomain { value: f64, domain: &'static str },
    #[error("bisection could not bracket {0}")]
    Bracketing(String),
    #[error("rate fit needs at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("bad model spec `{spec}`: {reason}")]
    ModelSpec { spec: String, reason: String },
    #[error("source condition diverges on the nested grid probe")]
    DivergentSource,
    #[error("invalid experiment: {0}")]
    Experiment(String),
}

pub type Result<T> = std::result::Result<T, DeconvError>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> DeconvError {
    DeconvError::InvalidParameter { name, reason: reason.into() }
}
