use std::collections::HashSet;
use std::path::PathBuf;

use super::{Backend, DependentJob, JobHandle, TaskResult};
use crate::error::{Error, Result};
use crate::scriptgen::{emit_dependent_submission_script, write_executable, Dialect, JobPlan};

/// Emits submission scripts for a batch scheduler without running anything.
///
/// Handles carry synthetic ids (`dryrun-1`, `dryrun-2`, ...). Dependent jobs
/// reference those ids in their dependency directive; on a real cluster the
/// id returned by the array submission would be substituted.
#[derive(Debug)]
pub struct DryRunBackend {
    dialect: Dialect,
    next_id: u64,
    issued: HashSet<String>,
    emitted: Vec<PathBuf>,
}

impl DryRunBackend {
    pub fn new(dialect: Dialect) -> Self {
        DryRunBackend {
            dialect,
            next_id: 1,
            issued: HashSet::new(),
            emitted: Vec::new(),
        }
    }

    pub fn dialect(&self) -> Dialect {
        self.dialect
    }

    fn issue_id(&mut self) -> String {
        let id = format!("dryrun-{}", self.next_id);
        self.next_id += 1;
        self.issued.insert(id.clone());
        id
    }
}

impl Backend for DryRunBackend {
    fn submit_array(&mut self, plan: &JobPlan, _concurrency_cap: usize) -> Result<JobHandle> {
        let path = plan.submission_script_path();
        write_executable(&path, &plan.submission_script(self.dialect))?;
        log::info!("wrote {:?} submission script {}", self.dialect, path.display());
        self.emitted.push(path);
        Ok(JobHandle {
            job_id: self.issue_id(),
            task_count: plan.task_count(),
        })
    }

    fn submit_dependent(&mut self, job: &DependentJob, after: &JobHandle) -> Result<JobHandle> {
        if !self.issued.contains(&after.job_id) {
            return Err(Error::UnknownHandle(after.job_id.clone()));
        }
        let script = emit_dependent_submission_script(
            self.dialect,
            &job.job_name,
            &job.workspace,
            &after.job_id,
            job.exclusive,
            &job.extra_options,
        );
        let path = job
            .work_dir
            .join(&job.workspace)
            .join(format!("{}_reduce", job.job_name));
        write_executable(&path, &script)?;
        self.emitted.push(path);
        Ok(JobHandle {
            job_id: self.issue_id(),
            task_count: 1,
        })
    }

    fn await_completion(&mut self, handle: &JobHandle) -> Result<Vec<TaskResult>> {
        Err(Error::DryRun(handle.job_id.clone()))
    }

    fn executes(&self) -> bool {
        false
    }

    fn emitted_scripts(&self) -> Vec<PathBuf> {
        self.emitted.clone()
    }
}
