use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Möbius link denominator vanished; happens only when a coefficient
    /// modulus sits on (or numerically at) the unit circle.
    #[error("singular link input: |{denominator}| = {magnitude:.3e}")]
    SingularLink {
        denominator: &'static str,
        magnitude: f64,
    },

    /// A coefficient modulus lies inside the exclusion band around 1.
    #[error("invalid parameters: |{which}| = {modulus} is within {band} of 1")]
    InvalidModulus {
        which: &'static str,
        modulus: f64,
        band: f64,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dataset has {n} rows; at least {min} required")]
    TooFewRows { n: usize, min: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
