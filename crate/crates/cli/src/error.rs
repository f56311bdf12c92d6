use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure in {context}: {source}")]
    Numeric {
        context: String,
        #[source]
        source: zenotraj::Error,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 3,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches scenario context to library errors. Invalid parameters are
/// configuration problems; everything else is a numeric failure.
pub trait Context<T> {
    fn context(self, what: &str) -> CliResult<T>;
}

impl<T> Context<T> for zenotraj::Result<T> {
    fn context(self, what: &str) -> CliResult<T> {
        self.map_err(|e| match e {
            zenotraj::Error::InvalidParameter { .. } => CliError::Config(format!("{what}: {e}")),
            other => CliError::Numeric {
                context: what.to_string(),
                source: other,
            },
        })
    }
}
