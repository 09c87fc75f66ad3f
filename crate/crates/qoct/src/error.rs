use std::path::PathBuf;

use thiserror::Error;

pub type AppResult<T> = std::result::Result<T, AppError>;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] qoct_core::Error),
}

impl AppError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        AppError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        AppError::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// 0 success, 2 config or input error, 3 non-convergence, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        use qoct_core::Error as E;
        match self {
            AppError::Io { .. } => 4,
            AppError::Core(E::NonConvergence { .. } | E::FitNonConvergence { .. }) => 3,
            _ => 2,
        }
    }
}

/// Re-labels a core parameter error raised while building from config.
pub(crate) fn in_section(section: &str, e: qoct_core::Error) -> AppError {
    match e {
        qoct_core::Error::InvalidParameter {
            field,
            value,
            constraint,
        } => AppError::config(
            format!("{section}.{field}"),
            format!("value {value} must satisfy {constraint}"),
        ),
        other => AppError::config(section, other.to_string()),
    }
}
