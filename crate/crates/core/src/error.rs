use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopError {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("singular Euler-angle chart (det ξ = {det:e})")]
    SingularChart { det: f64 },
    #[error("singular metric (det g = {det:e})")]
    SingularMetric { det: f64 },
    #[error("unsupported representation label (2u, 2v) = ({two_u}, {two_v})")]
    UnsupportedRep { two_u: u32, two_v: u32 },
    #[error("Weyl factor must be positive, got {0}")]
    NonpositiveWeylFactor(f64),
    #[error("gauge factor must be positive, got {0}")]
    NonpositiveGauge(f64),
    #[error("imaginary radicand {0} (spacelike or invalid direction)")]
    ImaginaryRadicand(f64),
    #[error("wave amplitude vanishes (|ψ| = {0:e})")]
    ZeroAmplitude(f64),
    #[error("mass must be positive, got {0}")]
    NonpositiveMass(f64),
    #[error("momentum is off shell: p·p + m² = {0:e}")]
    OffShellMomentum(f64),
    #[error("trajectory too short: {0} samples")]
    TooShort(usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, TopError>;
