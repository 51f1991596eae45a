use std::fmt;

use thiserror::Error;

/// One violated rule in a run description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
}

impl ConfigIssue {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigIssue { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

fn join(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("  - {i}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", join(.0))]
    ConfigInvalid(Vec<ConfigIssue>),
    #[error("stage `{stage}` failed: {source}")]
    StageFailure {
        stage: &'static str,
        #[source]
        source: dualpath_core::Error,
    },
    #[error("cannot write artifacts: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn issues(&self) -> &[ConfigIssue] {
        match self {
            CliError::ConfigInvalid(v) => v,
            _ => &[],
        }
    }
}

/// Tags a core error with the stage it came from.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError>;
}

impl<T> StageExt<T> for dualpath_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError> {
        self.map_err(|source| match source {
            dualpath_core::Error::Io(e) => CliError::Io(e),
            source => CliError::StageFailure { stage, source },
        })
    }
}
