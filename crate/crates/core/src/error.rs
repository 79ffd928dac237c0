use thiserror::Error;

/// Errors raised by the numerical kernels, solvers and file layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation too close to a point singularity.
    #[error("singularity: {0}")]
    Singularity(String),

    /// Requested modal order cannot be resolved by the receiver grid.
    #[error("aliasing: order {order} needs more than {receivers} receivers")]
    Aliasing { order: usize, receivers: usize },

    /// The 2x2 modal system is numerically singular for mode `n`.
    #[error("modal system singular at n = {n} (|det| = {magnitude:e})")]
    ModalSingular { n: i32, magnitude: f64 },

    /// A linear solve failed (rank deficiency, non-finite entries).
    #[error("linear solve failed: {0}")]
    Solve(String),

    /// A configuration or record failed validation; `path` names the field.
    #[error("invalid `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
