use std::path::PathBuf;

/// Errors raised anywhere in the solver pipeline.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("singular integrand: {0}")]
    SingularIntegrand(String),

    /// A Green's function value was requested for an offset that was never tabulated.
    #[error("incomplete Green's table: offset ({0}, {1}) is missing")]
    IncompleteTable(i32, i32),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("meshing error: {0}")]
    Meshing(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("interface error: {0}")]
    Interface(String),

    /// The matrix is numerically singular; usually a spurious resonance or a bad coupling parameter.
    #[error("near-singular matrix (condition estimate {condition:.3e})")]
    NearSingular { condition: f64 },

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("unsupported argument: {0}")]
    Unsupported(String),

    /// The reference vector of a relative error is identically zero.
    #[error("relative error undefined: reference vector is zero")]
    UndefinedError,

    #[error("cache file {path}: {message}")]
    Cache { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
