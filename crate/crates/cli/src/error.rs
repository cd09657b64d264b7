use thiserror::Error;
use torsion_core::LabError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("{command}: {source}")]
    Lab {
        command: String,
        #[source]
        source: LabError,
    },
    #[error("{command}: {failed} invariant(s) failed")]
    InvariantsFailed { command: String, failed: usize },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

impl CliError {
    /// 3 for failed invariants (including nonconvergence of a certified
    /// numeric step), 2 for everything caused by the input or environment.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvariantsFailed { .. } => EXIT_INVARIANT,
            CliError::Lab { source, .. }
                if source.is_invariant_violation() || matches!(source, LabError::NoConvergence { .. }) =>
            {
                EXIT_INVARIANT
            }
            _ => EXIT_PRECONDITION,
        }
    }

    pub fn lab(command: impl std::fmt::Display) -> impl FnOnce(LabError) -> CliError {
        let command = command.to_string();
        move |source| CliError::Lab { command, source }
    }
}
