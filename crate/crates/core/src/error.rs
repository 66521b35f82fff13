use thiserror::Error;

use crate::scatdata::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerically singular system: pivot {pivot:.3e} in column {column}")]
    Singular { pivot: f64, column: usize },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("evaluation failed at k = {k}: {reason}")]
    Evaluation { k: f64, reason: String },

    #[error("phase under-resolved between k = {k_left} and k = {k_right} (increment {increment:.3} rad)")]
    UnderResolved { k_left: f64, k_right: f64, increment: f64 },

    #[error("scattering function has not settled near ±k_max (spread {spread:.3e})")]
    TailNotSettled { spread: f64 },

    #[error("domain too short: {0}")]
    DomainTooShort(String),

    #[error("contraction failed to converge after {iterations} iterations (last step {last_step:.3e})")]
    ContractionFailure { iterations: usize, last_step: f64 },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("scattering data rejected: {}", .0.failures().join("; "))]
    Rejected(Box<ValidationReport>),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// Innermost error, with stage tags stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.in_stage(stage))
    }
}
