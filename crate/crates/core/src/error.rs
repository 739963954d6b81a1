use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree must be at least 2, got {0}")]
    InvalidDegree(u32),

    #[error("deck index {k} out of range 1..={n}")]
    InvalidDeckIndex { n: u32, k: u32 },

    #[error("point is not on {surface} (defect {defect:.3e})")]
    OffSurface { surface: String, defect: f64 },

    #[error("form lives on {found}, expected a form on {expected}")]
    WrongSurface { expected: String, found: String },

    #[error("point of norm {norm:.4} lies outside the admissible radius {radius:.4}")]
    OutsideDomain { norm: f64, radius: f64 },

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadrature(String),

    #[error("form is not dbar-closed: residual {residual:.3e} above threshold {threshold:.3e}")]
    NotClosed { residual: f64, threshold: f64 },

    #[error("form support radius {support:.4} is not strictly inside the ball of radius {radius:.4}")]
    SupportNotInterior { support: f64, radius: f64 },

    #[error("quadrature did not converge: refinements differ by {difference:.3e} (tolerance {tolerance:.3e})")]
    QuadratureNotConverged { difference: f64, tolerance: f64 },

    #[error("function is not constant on fibers: disagreement {disagreement:.3e} (tolerance {tolerance:.3e})")]
    NotDeckInvariant { disagreement: f64, tolerance: f64 },

    #[error("invalid cutoff: r_in = {r_in} must be below r_out = {r_out}, both in (0, 1)")]
    InvalidCutoff { r_in: f64, r_out: f64 },

    #[error("unknown manufactured case `{0}`")]
    UnknownCase(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
