use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] polar_harq::Error),
}

pub type SimResult<T> = Result<T, SimError>;

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable, machine-readable error category.
    pub fn kind(&self) -> &'static str {
        match self {
            SimError::InvalidConfig(_) => "invalid_config",
            SimError::Io { .. } => "io",
            SimError::ConfigParse { .. } => "config_parse",
            SimError::Csv(_) => "csv",
            SimError::Json(_) => "json",
            SimError::Core(_) => "core",
        }
    }

    /// The error as a single-line JSON object, suitable for stderr.
    pub fn to_json(&self) -> String {
        let mut error = json!({ "kind": self.kind(), "message": self.to_string() });
        if let SimError::Io { path, .. } | SimError::ConfigParse { path, .. } = self {
            error["path"] = json!(path.display().to_string());
        }
        json!({ "error": error }).to_string()
    }
}
