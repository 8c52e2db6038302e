use thiserror::Error;

/// Errors raised by the complex, operator and partitioning routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: no simplices given")]
    EmptyInput,

    #[error("simplex {simplex:?} has {size} nodes; only nodes, links and triangles are supported")]
    SimplexTooLarge { simplex: Vec<u64>, size: usize },

    #[error("simplex {0:?} repeats a node id")]
    DegenerateSimplex(Vec<u64>),

    #[error("closure violation: face {face:?} of simplex {simplex:?} is missing")]
    ClosureViolation { simplex: Vec<u64>, face: Vec<u64> },

    #[error("unknown link ({0}, {1})")]
    UnknownLink(usize, usize),

    #[error("link {0} has zero total degree")]
    ZeroDegree(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state {0} has zero row sum")]
    ZeroRowSum(usize),

    #[error("graph is not connected")]
    NotConnected,

    #[error("{what} of size {size} exceeds the dense limit {limit}")]
    SizeLimitExceeded { what: &'static str, size: usize, limit: usize },

    #[error("not an eigenpair: residual {residual:e}")]
    NotAnEigenpair { residual: f64 },

    #[error("node order is not a permutation of 0..{0}")]
    InvalidOrder(usize),

    #[error("sampling exhausted after {attempts} attempts ({found} of {requested} networks)")]
    SamplingExhausted {
        attempts: usize,
        found: usize,
        requested: usize,
    },

    #[error("integer overflow during exact elimination")]
    Overflow,

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("network {network}: {source}")]
    Network { network: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn in_network(self, network: &str) -> Error {
        Error::Network {
            network: network.to_string(),
            source: Box::new(self),
        }
    }

    /// Numerical-verification failures are reported with their own exit code by the CLI.
    pub fn is_numerical(&self) -> bool {
        if let Error::Network { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::NotAnEigenpair { .. } | Error::Overflow | Error::ZeroRowSum(_) | Error::ZeroDegree(_)
        )
    }

    pub fn is_config(&self) -> bool {
        if let Error::Network { source, .. } = self {
            return source.is_config();
        }
        matches!(self, Error::Config(_) | Error::InvalidOrder(_) | Error::SizeLimitExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
