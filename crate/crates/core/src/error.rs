use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no input files found in {0}")]
    NoInputs(PathBuf),

    #[error("input path contains whitespace: {0:?}")]
    WhitespaceInPath(PathBuf),

    #[error("path is not valid UTF-8: {0:?}")]
    NonUtf8Path(PathBuf),

    #[error("list file {list:?} names a missing file: {missing:?}")]
    MissingListedFile { list: PathBuf, missing: PathBuf },

    #[error("inputs {first:?} and {second:?} map to the same output {output:?}")]
    OutputCollision {
        first: PathBuf,
        second: PathBuf,
        output: PathBuf,
    },

    #[error(
        "{tasks} array tasks exceed the scheduler limit of {limit}; use --np or --ndata to bound the task count"
    )]
    TooManyTasks { tasks: usize, limit: usize },

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("workspace exists: {0:?}")]
    WorkspaceExists(PathBuf),

    #[error("run script missing or not executable: {0:?}")]
    NotExecutable(PathBuf),

    #[error("unknown job handle {0}")]
    UnknownHandle(String),

    #[error("job {0} was emitted for a scheduler and is not executable locally")]
    DryRun(String),

    #[error("job {0} never started: its dependency did not complete successfully")]
    DependencyNotMet(String),

    #[error("unknown scheduler dialect {0:?} (expected gridengine, slurm or lsf)")]
    UnknownDialect(String),

    #[error("benchmark: {0}")]
    Bench(String),

    #[error("{stage} failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn at(self, stage: Stage) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The pipeline stage that raised this error, if any.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

/// Launch pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Validate,
    Discover,
    Partition,
    Generate,
    SubmitMappers,
    SubmitReducer,
    Await,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Stage::Validate => "validate",
            Stage::Discover => "discover",
            Stage::Partition => "partition",
            Stage::Generate => "generate",
            Stage::SubmitMappers => "submit mappers",
            Stage::SubmitReducer => "submit reducer",
            Stage::Await => "await",
        };
        f.write_str(name)
    }
}
