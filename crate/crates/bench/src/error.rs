//! Benchmark error type; variants map onto the CLI exit codes.

/// Errors surfaced by the benchmark runner.
#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    /// Bad configuration: parse errors, unknown keys, invalid values,
    /// experiment/subcommand mismatch. Exit code 2.
    #[error("config error: {0}")]
    Config(String),

    /// File system failure. Exit code 3.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file, with the byte offset of the problem. Exit code 3.
    #[error("format error in {path} at byte {offset}: {message}")]
    Format {
        path: String,
        offset: usize,
        message: String,
    },

    /// A success quota could not be met within the attempt cap. Exit code 4.
    #[error("quota failure: {0}")]
    Quota(String),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Io { .. } | BenchError::Format { .. } => 3,
            BenchError::Quota(_) => 4,
        }
    }
}

impl From<rwf_core::error::Error> for BenchError {
    fn from(err: rwf_core::error::Error) -> Self {
        BenchError::Config(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
