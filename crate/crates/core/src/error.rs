use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid too coarse: axis {axis} has {nodes} nodes, stencil needs {needed}")]
    GridTooCoarse {
        axis: usize,
        nodes: usize,
        needed: usize,
    },

    #[error("quadrature did not converge (last estimate {estimate:e}, change {change:e})")]
    QuadratureDiverged { estimate: f64, change: f64 },

    #[error("quadrature failed at node {node:?}: {reason}")]
    QuadratureAtNode { node: Vec<f64>, reason: String },

    #[error("no limit at infinity point {point}")]
    NoLimit { point: String },

    #[error("limit inconclusive at infinity point {point}")]
    Inconclusive { point: String },

    #[error("continuous extension fails at: {}", points.join(", "))]
    ExtensionFailed { points: Vec<String> },

    #[error("unknown problem id '{id}' (available: {})", available.join(", "))]
    UnknownProblem { id: String, available: Vec<String> },

    #[error("Picard iteration did not converge in {iterations} iterations (last gap {last_gap:e})")]
    MaxIterations {
        iterations: usize,
        last_gap: f64,
        gap_history: Vec<f64>,
    },

    #[error("inconsistent index chain: {0}")]
    InconsistentChain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
