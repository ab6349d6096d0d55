//! Submission targets.
//!
//! [`LocalBackend`] runs array jobs as local subprocesses. [`DryRunBackend`]
//! writes Grid Engine, SLURM or LSF submission scripts without invoking the
//! scheduler binaries.

mod dryrun;
mod local;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use dryrun::DryRunBackend;
pub use local::LocalBackend;

use crate::error::Result;
use crate::scriptgen::JobPlan;

/// Backend-issued identifier for a submitted (array) job.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JobHandle {
    pub job_id: String,
    pub task_count: usize,
}

/// Outcome of one array task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub task_index: usize,
    /// Process exit code; `128 + n` when killed by signal `n`, 127 when the
    /// run script could not be started.
    pub exit_status: i32,
    /// Wall time in seconds.
    pub elapsed: f64,
    pub log_path: PathBuf,
}

impl TaskResult {
    pub fn succeeded(&self) -> bool {
        self.exit_status == 0
    }
}

/// A single-task job that runs once another job has succeeded.
#[derive(Debug, Clone)]
pub struct DependentJob {
    pub job_name: String,
    pub work_dir: PathBuf,
    pub workspace: String,
    pub run_script: PathBuf,
    pub exclusive: bool,
    pub extra_options: String,
}

impl DependentJob {
    /// The reducer step of `plan`, if it has one.
    pub fn reducer_of(plan: &JobPlan) -> Option<Self> {
        plan.reducer.as_ref().map(|r| DependentJob {
            job_name: r.job_name.clone(),
            work_dir: plan.work_dir.clone(),
            workspace: plan.workspace.clone(),
            run_script: r.run_script.clone(),
            exclusive: plan.exclusive,
            extra_options: plan.extra_options.clone(),
        })
    }
}

pub trait Backend {
    /// Submits every run script of `plan` as one array job. At most
    /// `concurrency_cap` tasks run at once on executing backends.
    fn submit_array(&mut self, plan: &JobPlan, concurrency_cap: usize) -> Result<JobHandle>;

    /// Submits `job` to start only after every task of `after` exits 0.
    fn submit_dependent(&mut self, job: &DependentJob, after: &JobHandle) -> Result<JobHandle>;

    /// Blocks until the job finishes and returns one result per task,
    /// ordered by task index.
    fn await_completion(&mut self, handle: &JobHandle) -> Result<Vec<TaskResult>>;

    /// Whether submitted jobs actually run.
    fn executes(&self) -> bool;

    /// Scripts written for an external scheduler, in submission order.
    fn emitted_scripts(&self) -> Vec<PathBuf> {
        Vec::new()
    }
}
