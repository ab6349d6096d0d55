//! Scheduler-neutral map-reduce launcher.
//!
//! Turns a directory of input files plus mapper/reducer executables into an
//! array job with an optional dependent reduce step. Jobs run on a local
//! process pool or are emitted as Grid Engine, SLURM or LSF submission
//! scripts. See the crate's `examples/` directory for one runnable program
//! per capability.
//!
//! ```no_run
//! use mapred::{launch, LaunchConfig};
//!
//! let mut config = LaunchConfig::new("WordFreqCmd.sh", "input", "output");
//! config.reducer = Some("ReduceWordFreqCmd.sh".into());
//! config.np = Some(3);
//! let report = launch(config)?;
//! println!("{report}");
//! # Ok::<(), mapred::Error>(())
//! ```

pub mod backends;
pub mod bench;
pub mod cli;
pub mod config;
pub mod discovery;
mod error;
pub mod orchestrator;
pub mod partition;
pub mod scriptgen;
pub mod toys;

pub use backends::{Backend, DependentJob, DryRunBackend, JobHandle, LocalBackend, TaskResult};
pub use config::{AppType, BackendKind, Distribution, InputSource, LaunchConfig};
pub use discovery::WorkItem;
pub use error::{Error, Result, Stage};
pub use orchestrator::{cleanup, launch, Launcher, RunOutcome, RunReport};
pub use partition::TaskPlan;
pub use scriptgen::{Dialect, JobPlan};
