//! The end-to-end launch pipeline.
//!
//! discover → partition → generate → submit mappers → submit dependent
//! reducer → await → clean up. The local backend blocks until the reducer
//! finishes; scheduler dialects return as soon as the scripts are written.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::backends::{Backend, DependentJob, DryRunBackend, JobHandle, LocalBackend, TaskResult};
use crate::config::{AppType, LaunchConfig};
use crate::discovery;
use crate::error::{Error, Result, Stage};
use crate::partition;
use crate::scriptgen::{self, Dialect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    Succeeded,
    /// At least one mapper task exited nonzero; the reducer never ran.
    MapperFailed,
    ReducerFailed,
    /// Scripts were written for a scheduler but nothing was executed.
    Emitted,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub mode: AppType,
    pub file_count: usize,
    pub mapper_handle: JobHandle,
    pub reducer_handle: Option<JobHandle>,
    pub task_results: Vec<TaskResult>,
    pub reducer_result: Option<TaskResult>,
    pub reducer_output: Option<PathBuf>,
    pub workspace: PathBuf,
    pub workspace_kept: bool,
    pub emitted_scripts: Vec<PathBuf>,
    /// Seconds from validation to cleanup.
    pub wall_time: f64,
}

impl RunReport {
    pub fn succeeded(&self) -> bool {
        matches!(self.outcome, RunOutcome::Succeeded | RunOutcome::Emitted)
    }

    pub fn failed_tasks(&self) -> Vec<usize> {
        self.task_results
            .iter()
            .filter(|r| !r.succeeded())
            .map(|r| r.task_index)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n")
            .map_err(|e| Error::io(format!("writing report {}", path.display()), e))
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "job {}: {} array tasks over {} files ({})",
            self.mapper_handle.job_id,
            self.mapper_handle.task_count,
            self.file_count,
            self.mode
        )?;
        if self.outcome == RunOutcome::Emitted {
            for script in &self.emitted_scripts {
                writeln!(f, "  emitted {}", script.display())?;
            }
        } else {
            let failed = self.failed_tasks();
            writeln!(
                f,
                "  mapper tasks: {} succeeded, {} failed{}",
                self.task_results.len() - failed.len(),
                failed.len(),
                if failed.is_empty() {
                    String::new()
                } else {
                    format!(" {failed:?}")
                }
            )?;
            match (&self.reducer_handle, &self.reducer_result) {
                (Some(h), Some(r)) => writeln!(f, "  reducer: job {}, exit {}", h.job_id, r.exit_status)?,
                (Some(h), None) => writeln!(f, "  reducer: job {} skipped", h.job_id)?,
                _ => {}
            }
            if let Some(out) = &self.reducer_output {
                writeln!(f, "  reduce output: {}", out.display())?;
            }
        }
        writeln!(
            f,
            "  workspace {} {}",
            self.workspace.display(),
            if self.workspace_kept { "kept" } else { "removed" }
        )?;
        writeln!(f, "  wall time {:.3} s", self.wall_time)?;
        let outcome = match self.outcome {
            RunOutcome::Succeeded => "succeeded",
            RunOutcome::MapperFailed => "mapper failure",
            RunOutcome::ReducerFailed => "reducer failure",
            RunOutcome::Emitted => "emitted, not executed",
        };
        write!(f, "  outcome: {outcome}")
    }
}

/// Removes the workspace when `keep` is false and the run succeeded.
/// Returns whether it was removed; removal errors are logged, not raised.
pub fn cleanup(workspace: &Path, keep: bool, run_succeeded: bool) -> bool {
    if keep || !run_succeeded {
        return false;
    }
    match fs::remove_dir_all(workspace) {
        Ok(()) => true,
        Err(e) => {
            log::warn!("could not remove {}: {e}", workspace.display());
            false
        }
    }
}

/// Runs launches under a fixed process id (used to name the workspace).
#[derive(Debug, Clone)]
pub struct Launcher {
    pid: u32,
}

impl Default for Launcher {
    fn default() -> Self {
        Self::new()
    }
}

impl Launcher {
    pub fn new() -> Self {
        Launcher {
            pid: std::process::id(),
        }
    }

    pub fn with_pid(pid: u32) -> Self {
        Launcher { pid }
    }

    pub fn launch(&self, config: LaunchConfig) -> Result<RunReport> {
        let started = Instant::now();
        let config = config.validate().map_err(|e| e.at(Stage::Validate))?;

        let items = discovery::work_items(&config).map_err(|e| e.at(Stage::Discover))?;
        let task_count = partition::resolve_task_count(
            items.len(),
            config.np,
            config.ndata,
            config.max_array_tasks,
        )
        .map_err(|e| e.at(Stage::Partition))?;
        let tasks = partition::assign(&items, task_count, config.distribution)
            .map_err(|e| e.at(Stage::Partition))?;

        discovery::mirror_output_tree(&items, config.output_dir(), &config.work_dir)
            .map_err(|e| e.at(Stage::Generate))?;
        let plan = scriptgen::materialize(&config, tasks, self.pid).map_err(|e| e.at(Stage::Generate))?;
        let workspace = plan.workspace_dir();
        log::info!(
            "{} files -> {} tasks in {}",
            items.len(),
            task_count,
            workspace.display()
        );

        // From here on a failure leaves the workspace in place.
        let mut backend: Box<dyn Backend> = match Dialect::from_backend(config.backend) {
            None => Box::new(LocalBackend::new()),
            Some(d) => Box::new(DryRunBackend::new(d)),
        };
        let cap = config.concurrency.unwrap_or(task_count);
        let mapper_handle = backend
            .submit_array(&plan, cap)
            .map_err(|e| e.at(Stage::SubmitMappers))?;
        let reducer_handle = match DependentJob::reducer_of(&plan) {
            Some(job) => Some(
                backend
                    .submit_dependent(&job, &mapper_handle)
                    .map_err(|e| e.at(Stage::SubmitReducer))?,
            ),
            None => None,
        };

        if !backend.executes() {
            return Ok(RunReport {
                outcome: RunOutcome::Emitted,
                mode: config.apptype,
                file_count: items.len(),
                mapper_handle,
                reducer_handle,
                task_results: Vec::new(),
                reducer_result: None,
                reducer_output: None,
                workspace,
                workspace_kept: true,
                emitted_scripts: backend.emitted_scripts(),
                wall_time: started.elapsed().as_secs_f64(),
            });
        }

        let task_results = backend
            .await_completion(&mapper_handle)
            .map_err(|e| e.at(Stage::Await))?;
        let mappers_ok = task_results.iter().all(TaskResult::succeeded);

        let mut reducer_result = None;
        let outcome = if !mappers_ok {
            if let Some(h) = &reducer_handle {
                match backend.await_completion(h) {
                    Err(Error::DependencyNotMet(_)) => {}
                    Err(e) => return Err(e.at(Stage::Await)),
                    Ok(_) => unreachable!("reducer ran after a mapper failure"),
                }
            }
            RunOutcome::MapperFailed
        } else if let Some(h) = &reducer_handle {
            let result = backend
                .await_completion(h)
                .map_err(|e| e.at(Stage::Await))?
                .into_iter()
                .next()
                .expect("reducer job has one task");
            let ok = result.succeeded();
            reducer_result = Some(result);
            if ok {
                RunOutcome::Succeeded
            } else {
                RunOutcome::ReducerFailed
            }
        } else {
            RunOutcome::Succeeded
        };

        let reducer_output = match &plan.reducer {
            Some(r) if mappers_ok => Some(r.output.clone()),
            _ => None,
        };
        let removed = cleanup(&workspace, config.keep, outcome == RunOutcome::Succeeded);

        Ok(RunReport {
            outcome,
            mode: config.apptype,
            file_count: items.len(),
            mapper_handle,
            reducer_handle,
            task_results,
            reducer_result,
            reducer_output,
            workspace,
            workspace_kept: !removed,
            emitted_scripts: Vec::new(),
            wall_time: started.elapsed().as_secs_f64(),
        })
    }
}

/// Launches `config` under the current process id.
pub fn launch(config: LaunchConfig) -> Result<RunReport> {
    Launcher::new().launch(config)
}
