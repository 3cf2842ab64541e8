//! Job parsing, dispatch, catalog runs and JSON reports for the `uctkit`
//! binary.

pub mod catalog;
pub mod job;
pub mod report;
pub mod run;

use thiserror::Error;

pub use job::{parse_job, parse_jobs, Catalog, Command, Functor, JobSpec, Options};
pub use report::Report;
pub use run::run_job;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Semantic(String),
    #[error("catalog {name} does not match its golden outcome:\n{diff}")]
    GoldenMismatch { name: String, diff: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Semantic(_) => 1,
            CliError::GoldenMismatch { .. } | CliError::Internal(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<uctkit::Error> for CliError {
    fn from(e: uctkit::Error) -> Self {
        match e {
            uctkit::Error::Internal(m) => CliError::Internal(m),
            other => CliError::Semantic(other.to_string()),
        }
    }
}

/// Exit code when `--strict` meets an inconclusive verdict.
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let io = CliError::Io {
            path: "x".into(),
            source: std::io::Error::other("denied"),
        };
        assert_eq!(io.exit_code(), 4);
        let internal: CliError = uctkit::Error::Internal("x".into()).into();
        assert_eq!(internal.exit_code(), 3);
        let golden = CliError::GoldenMismatch {
            name: "remark24".into(),
            diff: String::new(),
        };
        assert_eq!(golden.exit_code(), 3);
        let shape: CliError = uctkit::Error::InvalidTower("x".into()).into();
        assert_eq!(shape.exit_code(), 1);
    }
}
