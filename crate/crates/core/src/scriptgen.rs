//! Workspace materialization: run scripts, MIMO manifests, and scheduler
//! submission scripts.
//!
//! Every launch owns a `.MAPRED.<pid>` directory under its working
//! directory. Generated scripts refer to the workspace by that relative name
//! and are meant to execute with the working directory as their cwd, the
//! same way a scheduler's `-cwd` submission would run them.
//!
//! Layout:
//!
//! ```text
//! .MAPRED.<pid>/
//!     run_llmap_<i>          per-task run script, i in 1..=T
//!     input_<i>              MIMO manifest for task i
//!     run_llmap_reduce       reducer run script
//!     <mapper>               array submission script (scheduler dialects)
//!     <reducer>_reduce       dependent reducer submission script
//!     llmap.log-<job>-<i>    combined stdout/stderr of task i
//!     llmap_reduce.log-<job> combined stdout/stderr of the reducer
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::os::unix::fs::OpenOptionsExt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{AppType, BackendKind, LaunchConfig};
use crate::error::{Error, Result};
use crate::partition::TaskPlan;

pub const WORKSPACE_PREFIX: &str = ".MAPRED.";
pub const SHEBANG: &str = "#!/bin/bash";
pub const PATH_PREAMBLE: &str = "export PATH=${PATH}:.";
pub const REDUCER_RUN_SCRIPT: &str = "run_llmap_reduce";

pub fn workspace_name(pid: u32) -> String {
    format!("{WORKSPACE_PREFIX}{pid}")
}

pub fn run_script_name(task_index: usize) -> String {
    format!("run_llmap_{task_index}")
}

pub fn manifest_name(task_index: usize) -> String {
    format!("input_{task_index}")
}

pub fn task_log_name(job_id: &str, task_index: usize) -> String {
    format!("llmap.log-{job_id}-{task_index}")
}

pub fn reducer_log_name(job_id: &str) -> String {
    format!("llmap_reduce.log-{job_id}")
}

/// Creates `<work_dir>/.MAPRED.<pid>`, refusing to reuse an existing one.
pub fn create_workspace(work_dir: &Path, pid: u32) -> Result<PathBuf> {
    let path = work_dir.join(workspace_name(pid));
    match fs::create_dir(&path) {
        Ok(()) => Ok(path),
        Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::WorkspaceExists(path)),
        Err(e) => Err(Error::io(format!("creating workspace {}", path.display()), e)),
    }
}

fn preamble() -> String {
    format!("{SHEBANG}\n{PATH_PREAMBLE}\n")
}

/// Run script that starts the mapper once per work item.
pub fn emit_run_script_siso(task: &TaskPlan, mapper: &str) -> String {
    let mut s = preamble();
    for item in &task.items {
        let _ = writeln!(s, "{mapper} {} {}", item.input.display(), item.output.display());
    }
    s
}

/// Manifest of `<input> <output>` pairs for one MIMO task.
pub fn emit_manifest(task: &TaskPlan) -> String {
    let mut s = String::new();
    for item in &task.items {
        let _ = writeln!(s, "{} {}", item.input.display(), item.output.display());
    }
    s
}

/// Run script that starts the mapper once, handing it the task's manifest.
pub fn emit_run_script_mimo(task_index: usize, mapper: &str, workspace: &str) -> String {
    format!("{}{mapper} {workspace}/{}\n", preamble(), manifest_name(task_index))
}

pub fn emit_reducer_script(reducer: &str, output_dir: &Path, redout: &str) -> String {
    format!("{}{reducer} {} {redout}\n", preamble(), output_dir.display())
}

/// Batch scheduler directive syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    GridEngine,
    Slurm,
    Lsf,
}

impl FromStr for Dialect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gridengine" | "sge" => Ok(Dialect::GridEngine),
            "slurm" => Ok(Dialect::Slurm),
            "lsf" => Ok(Dialect::Lsf),
            other => Err(Error::UnknownDialect(other.to_string())),
        }
    }
}

impl Dialect {
    pub fn from_backend(kind: BackendKind) -> Option<Self> {
        match kind {
            BackendKind::Local => None,
            BackendKind::GridEngine => Some(Dialect::GridEngine),
            BackendKind::Slurm => Some(Dialect::Slurm),
            BackendKind::Lsf => Some(Dialect::Lsf),
        }
    }

    pub fn directive_prefix(self) -> &'static str {
        match self {
            Dialect::GridEngine => "#$",
            Dialect::Slurm => "#SBATCH",
            Dialect::Lsf => "#BSUB",
        }
    }

    /// Environment variable holding the array task index inside a task.
    pub fn task_id_var(self) -> &'static str {
        match self {
            Dialect::GridEngine => "$SGE_TASK_ID",
            Dialect::Slurm => "$SLURM_ARRAY_TASK_ID",
            Dialect::Lsf => "$LSB_JOBINDEX",
        }
    }

    /// Output-file pattern tokens for the job id and task index.
    fn log_tokens(self) -> (&'static str, &'static str) {
        match self {
            Dialect::GridEngine => ("$JOB_ID", "$TASK_ID"),
            Dialect::Slurm => ("%A", "%a"),
            Dialect::Lsf => ("%J", "%I"),
        }
    }

    fn single_job_token(self) -> &'static str {
        match self {
            Dialect::GridEngine => "$JOB_ID",
            Dialect::Slurm => "%j",
            Dialect::Lsf => "%J",
        }
    }
}

/// Inputs for rendering a submission script.
#[derive(Debug, Clone)]
pub struct Submission<'a> {
    pub job_name: &'a str,
    pub task_count: usize,
    pub workspace: &'a str,
    pub exclusive: bool,
    pub extra_options: &'a str,
}

fn push_extra(s: &mut String, dialect: Dialect, extra: &str) {
    let extra = extra.trim();
    if !extra.is_empty() {
        let _ = writeln!(s, "{} {extra}", dialect.directive_prefix());
    }
}

/// Array-job submission script for `dialect`.
pub fn emit_submission_script(dialect: Dialect, sub: &Submission<'_>) -> String {
    let Submission { job_name, task_count, workspace, exclusive, extra_options } = *sub;
    let (job_tok, task_tok) = dialect.log_tokens();
    let log = format!("{workspace}/llmap.log-{job_tok}-{task_tok}");
    let mut s = format!("{SHEBANG}\n");
    match dialect {
        Dialect::GridEngine => {
            let _ = writeln!(s, "#$ -terse -cwd -V -j y -N {job_name}");
            let _ = writeln!(s, "#$ -l excl={exclusive} -t 1-{task_count}");
            let _ = writeln!(s, "#$ -o {log}");
        }
        Dialect::Slurm => {
            let _ = writeln!(s, "#SBATCH --job-name={job_name}");
            let _ = writeln!(s, "#SBATCH --array=1-{task_count}");
            let _ = writeln!(s, "#SBATCH --output={log}");
            if exclusive {
                s.push_str("#SBATCH --exclusive\n");
            }
        }
        Dialect::Lsf => {
            let _ = writeln!(s, "#BSUB -J \"{job_name}[1-{task_count}]\"");
            let _ = writeln!(s, "#BSUB -o {log}");
            if exclusive {
                s.push_str("#BSUB -x\n");
            }
        }
    }
    push_extra(&mut s, dialect, extra_options);
    let _ = writeln!(s, "{workspace}/run_llmap_{}", dialect.task_id_var());
    s
}

/// Single-task reducer submission script that starts only after every task
/// of job `after_job_id` has succeeded.
pub fn emit_dependent_submission_script(
    dialect: Dialect,
    job_name: &str,
    workspace: &str,
    after_job_id: &str,
    exclusive: bool,
    extra_options: &str,
) -> String {
    let log = format!("{workspace}/llmap_reduce.log-{}", dialect.single_job_token());
    let mut s = format!("{SHEBANG}\n");
    match dialect {
        Dialect::GridEngine => {
            let _ = writeln!(s, "#$ -terse -cwd -V -j y -N {job_name}");
            let _ = writeln!(s, "#$ -l excl={exclusive}");
            let _ = writeln!(s, "#$ -hold_jid {after_job_id}");
            let _ = writeln!(s, "#$ -o {log}");
        }
        Dialect::Slurm => {
            let _ = writeln!(s, "#SBATCH --job-name={job_name}");
            let _ = writeln!(s, "#SBATCH --dependency=afterok:{after_job_id}");
            let _ = writeln!(s, "#SBATCH --output={log}");
            if exclusive {
                s.push_str("#SBATCH --exclusive\n");
            }
        }
        Dialect::Lsf => {
            let _ = writeln!(s, "#BSUB -J {job_name}");
            let _ = writeln!(s, "#BSUB -w \"done({after_job_id})\"");
            let _ = writeln!(s, "#BSUB -o {log}");
            if exclusive {
                s.push_str("#BSUB -x\n");
            }
        }
    }
    push_extra(&mut s, dialect, extra_options);
    let _ = writeln!(s, "{workspace}/{REDUCER_RUN_SCRIPT}");
    s
}

/// Scheduler job name for an executable: its file name, whitespace replaced.
pub fn job_name(executable: &str) -> String {
    let base = Path::new(executable)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| executable.to_string());
    base.chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect()
}

/// The reducer step of a job plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducerPlan {
    pub job_name: String,
    pub run_script: PathBuf,
    pub output: PathBuf,
}

/// A materialized workspace ready for submission.
#[derive(Debug, Clone, Serialize)]
pub struct JobPlan {
    pub work_dir: PathBuf,
    /// Workspace directory name relative to `work_dir`.
    pub workspace: String,
    pub tasks: Vec<TaskPlan>,
    pub mode: AppType,
    pub job_name: String,
    pub exclusive: bool,
    pub extra_options: String,
    pub run_scripts: Vec<PathBuf>,
    pub manifests: Vec<PathBuf>,
    pub reducer: Option<ReducerPlan>,
}

impl JobPlan {
    pub fn workspace_dir(&self) -> PathBuf {
        self.work_dir.join(&self.workspace)
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn submission_script_path(&self) -> PathBuf {
        self.workspace_dir().join(&self.job_name)
    }

    pub fn submission_script(&self, dialect: Dialect) -> String {
        emit_submission_script(
            dialect,
            &Submission {
                job_name: &self.job_name,
                task_count: self.task_count(),
                workspace: &self.workspace,
                exclusive: self.exclusive,
                extra_options: &self.extra_options,
            },
        )
    }
}

pub(crate) fn write_executable(path: &Path, contents: &str) -> Result<()> {
    // Creating with the mode saves a chmod per script; the umask can only
    // strip group/other bits, so the owner always keeps execute permission.
    let write = || -> std::io::Result<()> {
        let mut file = fs::OpenOptions::new()
            .write(true)
            .create(true)
            .truncate(true)
            .mode(0o755)
            .open(path)?;
        file.write_all(contents.as_bytes())
    };
    write().map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Creates the workspace for `pid` and writes every run script, manifest
/// and the reducer run script.
pub fn materialize(config: &LaunchConfig, tasks: Vec<TaskPlan>, pid: u32) -> Result<JobPlan> {
    if tasks.iter().any(|t| t.items.is_empty()) {
        return Err(Error::Partition("empty array task".into()));
    }
    let workspace_dir = create_workspace(&config.work_dir, pid)?;
    let workspace = workspace_name(pid);
    let mapper = config.mapper();

    let mut run_scripts = Vec::with_capacity(tasks.len());
    let mut manifests = Vec::new();
    for task in &tasks {
        let script_path = workspace_dir.join(run_script_name(task.index));
        let script = match config.apptype {
            AppType::Siso => emit_run_script_siso(task, mapper),
            AppType::Mimo => {
                let manifest_path = workspace_dir.join(manifest_name(task.index));
                fs::write(&manifest_path, emit_manifest(task))
                    .map_err(|e| Error::io(format!("writing {}", manifest_path.display()), e))?;
                manifests.push(manifest_path);
                emit_run_script_mimo(task.index, mapper, &workspace)
            }
        };
        write_executable(&script_path, &script)?;
        run_scripts.push(script_path);
    }

    let reducer = match &config.reducer {
        Some(reducer) => {
            let run_script = workspace_dir.join(REDUCER_RUN_SCRIPT);
            write_executable(
                &run_script,
                &emit_reducer_script(reducer, config.output_dir(), &config.redout),
            )?;
            Some(ReducerPlan {
                job_name: job_name(reducer),
                run_script,
                output: config.resolve(Path::new(&config.redout)),
            })
        }
        None => None,
    };

    Ok(JobPlan {
        work_dir: config.work_dir.clone(),
        workspace,
        tasks,
        mode: config.apptype,
        job_name: job_name(mapper),
        exclusive: config.exclusive,
        extra_options: config.extra_options.clone(),
        run_scripts,
        manifests,
        reducer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::WorkItem;

    fn item(i: &str, o: &str) -> WorkItem {
        WorkItem { input: i.into(), output: o.into() }
    }

    #[test]
    fn workspace_names() {
        assert_eq!(workspace_name(1120), ".MAPRED.1120");
        assert_eq!(workspace_name(2188), ".MAPRED.2188");
    }

    #[test]
    fn workspace_collision() {
        let dir = tempfile::tempdir().unwrap();
        let ws = create_workspace(dir.path(), 7).unwrap();
        assert!(ws.ends_with(".MAPRED.7"));
        let err = create_workspace(dir.path(), 7).unwrap_err();
        assert!(err.to_string().contains("workspace exists"), "{err}");
    }

    #[test]
    fn siso_single_item() {
        let task = TaskPlan { index: 1, items: vec![item("input/image_1.jpg", "output/image_1.jpg.out")] };
        let s = emit_run_script_siso(&task, "MatlabCmd.sh");
        assert_eq!(
            s,
            "#!/bin/bash\nexport PATH=${PATH}:.\nMatlabCmd.sh input/image_1.jpg output/image_1.jpg.out\n"
        );
        assert_eq!(s.lines().count(), 3);
    }

    #[test]
    fn siso_keeps_item_order() {
        let task = TaskPlan { index: 2, items: vec![item("f1", "o1"), item("f2", "o2")] };
        let s = emit_run_script_siso(&task, "m");
        let lines: Vec<_> = s.lines().skip(2).collect();
        assert_eq!(lines, vec!["m f1 o1", "m f2 o2"]);
    }

    #[test]
    fn manifest_format() {
        let task = TaskPlan { index: 1, items: vec![item("input/a.jpg", "output/a.jpg.out")] };
        assert_eq!(emit_manifest(&task), "input/a.jpg output/a.jpg.out\n");
        let two = TaskPlan { index: 1, items: vec![item("a", "b"), item("c", "d")] };
        assert_eq!(emit_manifest(&two).lines().count(), 2);
    }

    #[test]
    fn mimo_run_script() {
        let s = emit_run_script_mimo(1, "MatlabCmdMulti.sh", ".MAPRED.2188");
        assert_eq!(s.lines().last().unwrap(), "MatlabCmdMulti.sh .MAPRED.2188/input_1");
        let n = emit_run_script_mimo(9, "MatlabCmdMulti.sh", ".MAPRED.2188");
        assert!(n.ends_with(".MAPRED.2188/input_9\n"));
    }

    #[test]
    fn reducer_script() {
        let s = emit_reducer_script("ReduceWordFreqCmd.sh", Path::new("output"), "llmapreduce.out");
        assert_eq!(s.lines().last().unwrap(), "ReduceWordFreqCmd.sh output llmapreduce.out");
        let custom = emit_reducer_script("r.sh", Path::new("output"), "final.txt");
        assert!(custom.ends_with("r.sh output final.txt\n"));
    }

    #[test]
    fn gridengine_template() {
        let sub = Submission {
            job_name: "MatlabCmd.sh",
            task_count: 6,
            workspace: ".MAPRED.1120",
            exclusive: false,
            extra_options: "",
        };
        let want = "#!/bin/bash\n\
#$ -terse -cwd -V -j y -N MatlabCmd.sh\n\
#$ -l excl=false -t 1-6\n\
#$ -o .MAPRED.1120/llmap.log-$JOB_ID-$TASK_ID\n\
.MAPRED.1120/run_llmap_$SGE_TASK_ID\n";
        assert_eq!(emit_submission_script(Dialect::GridEngine, &sub), want);
        let excl = emit_submission_script(Dialect::GridEngine, &Submission { exclusive: true, ..sub.clone() });
        assert!(excl.contains("#$ -l excl=true -t 1-6\n"));
        let one = emit_submission_script(Dialect::GridEngine, &Submission { task_count: 1, ..sub });
        assert!(one.contains("-t 1-1\n"));
    }

    #[test]
    fn extra_options_get_their_own_directive() {
        let sub = Submission {
            job_name: "m",
            task_count: 2,
            workspace: ".MAPRED.1",
            exclusive: false,
            extra_options: "-l mem=8G",
        };
        let ge = emit_submission_script(Dialect::GridEngine, &sub);
        let lines: Vec<_> = ge.lines().collect();
        assert_eq!(lines[4], "#$ -l mem=8G");
        assert_eq!(lines[5], ".MAPRED.1/run_llmap_$SGE_TASK_ID");
        let slurm = emit_submission_script(Dialect::Slurm, &sub);
        assert!(slurm.contains("\n#SBATCH -l mem=8G\n"));
    }

    #[test]
    fn every_dialect_dispatches_by_task_variable() {
        for d in [Dialect::GridEngine, Dialect::Slurm, Dialect::Lsf] {
            let s = emit_submission_script(
                d,
                &Submission { job_name: "m", task_count: 3, workspace: ".MAPRED.5", exclusive: true, extra_options: "" },
            );
            assert!(s.starts_with("#!/bin/bash\n"));
            assert!(s.ends_with(&format!(".MAPRED.5/run_llmap_{}\n", d.task_id_var())));
            assert!(s.contains(".MAPRED.5/llmap.log-"));
            assert!(s.contains("1-3"));
        }
    }

    #[test]
    fn dependent_scripts_reference_parent_job() {
        let slurm = emit_dependent_submission_script(Dialect::Slurm, "r.sh", ".MAPRED.5", "42", false, "");
        assert!(slurm.contains("#SBATCH --dependency=afterok:42\n"));
        let lsf = emit_dependent_submission_script(Dialect::Lsf, "r.sh", ".MAPRED.5", "42", false, "");
        assert!(lsf.contains("#BSUB -w \"done(42)\"\n"));
        let ge = emit_dependent_submission_script(Dialect::GridEngine, "r.sh", ".MAPRED.5", "42", false, "");
        assert!(ge.contains("#$ -hold_jid 42\n"));
        assert!(ge.ends_with(".MAPRED.5/run_llmap_reduce\n"));
    }

    #[test]
    fn unknown_dialect() {
        assert!(matches!("pbs".parse::<Dialect>(), Err(Error::UnknownDialect(_))));
    }

    #[test]
    fn job_names() {
        assert_eq!(job_name("MatlabCmd.sh"), "MatlabCmd.sh");
        assert_eq!(job_name("/opt/bin/WordFreqCmd.sh"), "WordFreqCmd.sh");
    }
}
