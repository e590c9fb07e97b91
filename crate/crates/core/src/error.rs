use std::path::PathBuf;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported bit depth {0}")]
    UnsupportedBitDepth(u16),

    #[error("unsupported format tag 0x{0:04x}")]
    UnsupportedFormat(u16),

    #[error("truncated file at byte offset {offset}: {what}")]
    Truncated { offset: u64, what: String },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
