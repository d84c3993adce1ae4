use deconv_core::DeconvError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(String),
    #[error("numeric: {0}")]
    Numeric(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config(_) => 1,
            Self::Data(_) | Self::Io(_) => 2,
            Self::Numeric(_) => 3,
        }
    }
}

impl From<DeconvError> for CliError {
    fn from(e: DeconvError) -> Self {
        use DeconvError::*;
        let msg = e.to_string();
        match e {
            EmptySample | GridMismatch => Self::Data(msg),
            NonHermitian(_) | ImaginaryResidue(_) | Bracketing(_) | DivergentSource | TooFewPoints(_) => Self::Numeric(msg),
            _ => Self::Config(msg),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Data(e.to_string())
    }
}
