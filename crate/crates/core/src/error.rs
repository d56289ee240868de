use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("profile is not a Nash equilibrium (defect {defect:e})")]
    NotNash { defect: f64 },

    #[error("profile is not {property}: {detail}")]
    NotMonotone { property: &'static str, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("fixed point did not converge after {iterations} iterations (residual {residual:e}){}", lambda.map(|l| format!(" at lambda {}", l)).unwrap_or_default())]
    NonConvergence {
        iterations: usize,
        residual: f64,
        lambda: Option<f64>,
    },

    #[error("invalid spline input: {0}")]
    Spline(String),

    #[error("calibration point {point} cannot meet the epsilon bound: {detail}")]
    CalibrationUnattainable { point: f64, detail: String },

    #[error("multiplier search failed on bracket [{lo}, {hi}] with sums {sum_lo}, {sum_hi}")]
    RootFinder {
        lo: f64,
        hi: f64,
        sum_lo: f64,
        sum_hi: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
