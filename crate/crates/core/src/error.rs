use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("axis sets overlap or are out of range: {0}")]
    InvalidAxes(String),

    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("symbol {symbol} out of range for alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("relay output is not a function of (x, y): x={x}, y={y} admits y1={y1_a} and y1={y1_b}")]
    NotDeterministic {
        x: usize,
        y: usize,
        y1_a: usize,
        y1_b: usize,
    },

    #[error("transition row for x={x} sums to {sum}, expected 1")]
    RowNotNormalized { x: usize, sum: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported noise correlation rho={0}: {1}")]
    UnsupportedCorrelation(f64, &'static str),

    #[error("optimizer did not converge after {iterations} iterations (certified gap {gap:.3e} bits, best rate {rate:.9} bits)")]
    NotConverged { iterations: usize, gap: f64, rate: f64 },

    #[error("desk-scale guard exceeded: {0}")]
    Guard(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
