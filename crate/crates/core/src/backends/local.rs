use std::collections::HashMap;
use std::fs::{self, File};
use std::os::unix::fs::PermissionsExt;
use std::os::unix::process::ExitStatusExt;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitStatus, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::thread;
use std::time::Instant;

use super::{Backend, DependentJob, JobHandle, TaskResult};
use crate::error::{Error, Result};
use crate::scriptgen::{reducer_log_name, task_log_name, JobPlan};

/// Exit status recorded when a run script could not be started at all.
const SPAWN_FAILED: i32 = 127;

#[derive(Debug, Clone)]
enum Outcome {
    Finished(Vec<TaskResult>),
    /// A dependency did not succeed, so the job never ran.
    Skipped,
}

#[derive(Default)]
struct JobSlot {
    outcome: Mutex<Option<Outcome>>,
    done: Condvar,
}

impl JobSlot {
    fn finish(&self, outcome: Outcome) {
        *self.outcome.lock().unwrap() = Some(outcome);
        self.done.notify_all();
    }

    fn wait(&self) -> Outcome {
        let mut guard = self.outcome.lock().unwrap();
        loop {
            if let Some(outcome) = guard.as_ref() {
                return outcome.clone();
            }
            guard = self.done.wait(guard).unwrap();
        }
    }
}

/// Runs array jobs as local subprocesses.
///
/// Each run script is executed by `bash -e` with the plan's working
/// directory as cwd, so any failing mapper invocation fails its task. A
/// task's stdout and stderr are merged into `llmap.log-<job>-<task>` in the
/// workspace. Job ids are consecutive integers starting at 1.
pub struct LocalBackend {
    next_id: u64,
    jobs: HashMap<String, Arc<JobSlot>>,
}

impl Default for LocalBackend {
    fn default() -> Self {
        Self::new()
    }
}

impl LocalBackend {
    pub fn new() -> Self {
        LocalBackend {
            next_id: 1,
            jobs: HashMap::new(),
        }
    }

    fn issue_id(&mut self) -> String {
        let id = self.next_id;
        self.next_id += 1;
        id.to_string()
    }
}

fn check_executable(path: &Path) -> Result<()> {
    match fs::metadata(path) {
        Ok(meta) if meta.is_file() && meta.permissions().mode() & 0o111 != 0 => Ok(()),
        _ => Err(Error::NotExecutable(path.to_path_buf())),
    }
}

fn exit_code(status: ExitStatus) -> i32 {
    status
        .code()
        .or_else(|| status.signal().map(|sig| 128 + sig))
        .unwrap_or(-1)
}

fn run_script(
    work_dir: &Path,
    script: &Path,
    log_path: PathBuf,
    task_index: usize,
    job_id: &str,
) -> TaskResult {
    let started = Instant::now();
    let exit_status = match spawn_and_wait(work_dir, script, &log_path, task_index, job_id) {
        Ok(status) => exit_code(status),
        Err(e) => {
            log::error!("task {task_index} of job {job_id}: {e}");
            let _ = fs::write(&log_path, format!("failed to start {}: {e}\n", script.display()));
            SPAWN_FAILED
        }
    };
    TaskResult {
        task_index,
        exit_status,
        elapsed: started.elapsed().as_secs_f64(),
        log_path,
    }
}

fn spawn_and_wait(
    work_dir: &Path,
    script: &Path,
    log_path: &Path,
    task_index: usize,
    job_id: &str,
) -> std::io::Result<ExitStatus> {
    let log = File::create(log_path)?;
    let log_err = log.try_clone()?;
    Command::new("bash")
        .arg("-e")
        .arg(script)
        .current_dir(work_dir)
        .env("MAPRED_JOB_ID", job_id)
        .env("MAPRED_TASK_ID", task_index.to_string())
        .stdin(Stdio::null())
        .stdout(log)
        .stderr(log_err)
        .status()
}

impl Backend for LocalBackend {
    fn submit_array(&mut self, plan: &JobPlan, concurrency_cap: usize) -> Result<JobHandle> {
        let workspace = plan.workspace_dir();
        if !workspace.is_dir() {
            return Err(Error::Config(format!(
                "workspace {} is missing",
                workspace.display()
            )));
        }
        for script in &plan.run_scripts {
            check_executable(script)?;
        }
        let task_count = plan.run_scripts.len();
        if task_count == 0 {
            return Err(Error::Partition("array job has no tasks".into()));
        }
        let job_id = self.issue_id();
        let slot = Arc::new(JobSlot::default());
        self.jobs.insert(job_id.clone(), Arc::clone(&slot));

        let workers = concurrency_cap.clamp(1, task_count);
        let scripts = plan.run_scripts.clone();
        let work_dir = plan.work_dir.clone();
        let id = job_id.clone();
        log::debug!("job {id}: {task_count} tasks, {workers} slots");
        thread::spawn(move || {
            let next = AtomicUsize::new(0);
            let results = Mutex::new(Vec::with_capacity(task_count));
            thread::scope(|s| {
                for _ in 0..workers {
                    s.spawn(|| loop {
                        let i = next.fetch_add(1, Ordering::SeqCst);
                        if i >= task_count {
                            break;
                        }
                        let index = i + 1;
                        let log_path = workspace.join(task_log_name(&id, index));
                        let result = run_script(&work_dir, &scripts[i], log_path, index, &id);
                        results.lock().unwrap().push(result);
                    });
                }
            });
            let mut results = results.into_inner().unwrap();
            results.sort_by_key(|r| r.task_index);
            slot.finish(Outcome::Finished(results));
        });

        Ok(JobHandle { job_id, task_count })
    }

    fn submit_dependent(&mut self, job: &DependentJob, after: &JobHandle) -> Result<JobHandle> {
        let parent = self
            .jobs
            .get(&after.job_id)
            .cloned()
            .ok_or_else(|| Error::UnknownHandle(after.job_id.clone()))?;
        check_executable(&job.run_script)?;
        let job_id = self.issue_id();
        let slot = Arc::new(JobSlot::default());
        self.jobs.insert(job_id.clone(), Arc::clone(&slot));

        let job = job.clone();
        let id = job_id.clone();
        thread::spawn(move || {
            let ready = match parent.wait() {
                Outcome::Finished(results) => results.iter().all(TaskResult::succeeded),
                Outcome::Skipped => false,
            };
            if !ready {
                log::warn!("job {id} ({}) skipped: dependency failed", job.job_name);
                slot.finish(Outcome::Skipped);
                return;
            }
            let log_path = job.work_dir.join(&job.workspace).join(reducer_log_name(&id));
            let result = run_script(&job.work_dir, &job.run_script, log_path, 1, &id);
            slot.finish(Outcome::Finished(vec![result]));
        });

        Ok(JobHandle {
            job_id,
            task_count: 1,
        })
    }

    fn await_completion(&mut self, handle: &JobHandle) -> Result<Vec<TaskResult>> {
        let slot = self
            .jobs
            .get(&handle.job_id)
            .cloned()
            .ok_or_else(|| Error::UnknownHandle(handle.job_id.clone()))?;
        match slot.wait() {
            Outcome::Finished(results) => Ok(results),
            Outcome::Skipped => Err(Error::DependencyNotMet(handle.job_id.clone())),
        }
    }

    fn executes(&self) -> bool {
        true
    }
}
