use thiserror::Error;

/// Errors produced anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("non-manifold edge ({0}, {1}) shared by {2} triangles")]
    Topology(usize, usize, usize),

    #[error("unsupported polynomial degree {0} (expected 2, 3 or 4)")]
    UnsupportedDegree(usize),

    #[error("no quadrature rule of degree {0} (supported up to {1})")]
    QuadratureDegree(usize, usize),

    #[error("non-finite value {value} at ({x}, {y})")]
    NonFinite { value: f64, x: f64, y: f64 },

    #[error("point ({0}, {1}) lies outside the mesh")]
    OutsideDomain(f64, f64),

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("iterative solver stalled after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("recovery patch for node {0} cannot satisfy the rank condition")]
    DegeneratePatch(usize),

    #[error("singular least-squares system at node {0}")]
    SingularFit(usize),

    #[error("effectivity index undefined: true error is zero")]
    UndefinedEffectivity,

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
