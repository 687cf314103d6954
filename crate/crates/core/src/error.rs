use std::path::PathBuf;

/// Errors produced by the toolkit. Every fallible operation returns one of
/// these; none of the numeric kernels panic on malformed caller input.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed PGM data. `offset` is the byte position of the first
    /// offending byte.
    #[error("pgm parse error at byte {offset}: {message}")]
    PgmParse { offset: usize, message: String },

    /// Well-formed input that this toolkit deliberately does not handle
    /// (16-bit PGM, multi-channel save, ...).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Corrupt or truncated coefficient file.
    #[error("coefficient file: {0}")]
    CoeffFormat(String),

    /// Operands whose dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input too small for the requested decomposition depth.
    #[error("degenerate size: {0}")]
    DegenerateSize(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
