use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("inadmissible test function: {0}")]
    Admissibility(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value of {field} at (x={x}, y={y}, y'={yp})")]
    NonFinitePartial {
        field: &'static str,
        x: f64,
        y: f64,
        yp: f64,
    },

    #[error("non-finite integrand at x={0}")]
    NonFiniteIntegrand(f64),

    #[error("unknown model '{name}' (valid: {valid})")]
    NotFound { name: String, valid: String },

    #[error("model '{model}' does not provide {what}")]
    Capability { model: String, what: &'static str },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}: {msg}")]
    Io { path: String, msg: String },
}
