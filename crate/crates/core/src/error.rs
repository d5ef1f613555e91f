use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid hamiltonian: {0}")]
    Hamiltonian(String),

    #[error("domain has an empty interior")]
    EmptyInterior,

    #[error("node {0} is not an inside node")]
    NotInside(usize),

    #[error("target node {0} is unreachable from the seeds")]
    Unreachable(usize),

    #[error("no feasible lambda below the cap {cap} (last residual {residual})")]
    Unbounded { cap: f64, residual: f64 },

    #[error("chain stalled at node {node} after {steps} steps: best objective {best} vs level {level}")]
    ChainStall {
        node: usize,
        steps: usize,
        best: f64,
        level: f64,
    },

    #[error("attainment set is empty")]
    EmptyAttainment,

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config error at `{path}`: {message}")]
    ConfigValue { path: String, message: String },

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
