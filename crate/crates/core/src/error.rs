use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("input domain error: {0}")]
    InputDomain(String),

    /// A delay or time falls outside the sampled window, or off the grid lattice.
    #[error("window error: {0}")]
    Window(String),

    /// A spectral quadrature cannot meet its accuracy budget on the given grid.
    #[error("accuracy error: {message} (tail mass {tail_mass:.3e})")]
    Accuracy { message: String, tail_mass: f64 },

    #[error("unsupported representation: {0}")]
    Unsupported(String),

    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown suite id `{0}`")]
    UnknownSuite(String),

    #[error("archive error: {0}")]
    Archive(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::InputDomain(msg.into())
    }

    pub(crate) fn window(msg: impl Into<String>) -> Self {
        Error::Window(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: msg.into(),
        }
    }

    /// Usage and configuration problems map to exit code 2; everything else is a runtime failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::UnknownSuite(_) | Error::InputDomain(_)
        )
    }

    /// Process exit status for this error: 2 for usage, configuration and file problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.is_usage() || matches!(self, Error::Io(_)) {
            2
        } else {
            1
        }
    }
}
