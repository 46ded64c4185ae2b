use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown experiment {name:?}{}", suggestion.as_ref().map(|s| format!("; did you mean {s:?}?")).unwrap_or_default())]
    UnknownExperiment { name: String, suggestion: Option<String> },
    #[error("config: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] ncharm::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;
