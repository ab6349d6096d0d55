//! Command-line front end.
//!
//! `mapred launch` takes the classic launcher flags (`--np`, `--input`,
//! `--output`, `--mapper`, `--reducer`, `--redout`, `--ndata`,
//! `--distribution`, `--subdir`, `--ext`, `--delimiter`, `--exclusive`,
//! `--keep`, `--apptype`, `--options`) in either `--flag=value` or
//! `--flag value` form. When the first argument is a flag, `launch` is
//! implied. `mapred bench` runs the overhead sweep.
//!
//! Exit codes: [`EXIT_OK`], [`EXIT_ERROR`], [`EXIT_USAGE`],
//! [`EXIT_MAPPER_FAILED`], [`EXIT_REDUCER_FAILED`].

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchMode, CostModel};
use crate::config::{AppType, BackendKind, Distribution, InputSource, LaunchConfig, DEFAULT_MAX_ARRAY_TASKS};
use crate::error::{Error, Stage};
use crate::orchestrator::{Launcher, RunOutcome};

pub const EXIT_OK: i32 = 0;
/// Runtime error in any pipeline stage other than validation.
pub const EXIT_ERROR: i32 = 1;
/// Bad flags or an invalid option set.
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MAPPER_FAILED: i32 = 3;
pub const EXIT_REDUCER_FAILED: i32 = 4;

const EXT_HEADING: &str = "Extensions";

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, got {other:?}")),
    }
}

fn parse_keyword<T: FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse::<T>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "mapred", version, about = "Launch map-reduce array jobs over a directory of files")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Run (or emit scripts for) a map-reduce array job.
    Launch(LaunchArgs),
    /// Measure startup overhead for DEFAULT, BLOCK and MIMO launches.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct LaunchArgs {
    /// Number of array tasks
    #[arg(long, value_name = "number_of_tasks")]
    pub np: Option<usize>,
    /// Input directory, or a file listing one input path per line
    #[arg(long, value_name = "input_dir")]
    pub input: PathBuf,
    /// Directory receiving mapper outputs
    #[arg(long, value_name = "output_dir")]
    pub output: PathBuf,
    /// Mapper executable, called as `<mapper> <input> <output>` (or `<mapper> <manifest>` with --apptype=mimo)
    #[arg(long, value_name = "myMapper")]
    pub mapper: String,
    /// Reducer executable, called as `<reducer> <output_dir> <redout>` after all mappers succeed
    #[arg(long, value_name = "myReducer")]
    pub reducer: Option<String>,
    /// Reducer output file name
    #[arg(long, value_name = "output_filename", default_value = crate::config::DEFAULT_REDOUT)]
    pub redout: String,
    /// Input files per array task; overrides --np
    #[arg(long, value_name = "NdataPerTask")]
    pub ndata: Option<usize>,
    /// block or cyclic
    #[arg(long, default_value = "block", value_parser = parse_keyword::<Distribution>)]
    pub distribution: Distribution,
    /// Scan the input directory recursively and mirror its tree under the output
    #[arg(long, default_value = "false", num_args = 0..=1, default_missing_value = "true", value_parser = parse_bool)]
    pub subdir: bool,
    /// Output file extension
    #[arg(long, value_name = "myExt", default_value = crate::config::DEFAULT_EXT)]
    pub ext: String,
    /// Delimiter placed before the extension
    #[arg(long, value_name = "myExtDelimiter", default_value = crate::config::DEFAULT_DELIMITER)]
    pub delimiter: String,
    /// Request whole compute nodes
    #[arg(long, default_value = "false", num_args = 0..=1, default_missing_value = "true", value_parser = parse_bool)]
    pub exclusive: bool,
    /// Keep the .MAPRED.<pid> workspace after a successful run
    #[arg(long, default_value = "false", num_args = 0..=1, default_missing_value = "true", value_parser = parse_bool)]
    pub keep: bool,
    /// siso or mimo
    #[arg(long, default_value = "siso", value_parser = parse_keyword::<AppType>)]
    pub apptype: AppType,
    /// Extra scheduler options added verbatim to the submission script
    #[arg(long, value_name = "scheduler_options_to_add", default_value = "", allow_hyphen_values = true)]
    pub options: String,

    /// local, gridengine, slurm or lsf (scheduler dialects only write scripts)
    #[arg(long, default_value = "local", value_parser = parse_keyword::<BackendKind>, help_heading = EXT_HEADING)]
    pub backend: BackendKind,
    /// Maximum concurrently running tasks on the local backend [default: all]
    #[arg(long, help_heading = EXT_HEADING)]
    pub concurrency: Option<usize>,
    /// Write a JSON run report to this path
    #[arg(long, value_name = "PATH", help_heading = EXT_HEADING)]
    pub report: Option<PathBuf>,
    /// Scheduler cap on tasks per array job
    #[arg(long, default_value_t = DEFAULT_MAX_ARRAY_TASKS, help_heading = EXT_HEADING)]
    pub max_array_tasks: usize,
    /// Directory that relative paths, the workspace and the job run from
    #[arg(long, value_name = "DIR", default_value = ".", help_heading = EXT_HEADING)]
    pub workdir: PathBuf,
}

impl LaunchArgs {
    pub fn to_config(&self) -> Result<LaunchConfig, Error> {
        Ok(LaunchConfig {
            np: self.np,
            ndata: self.ndata,
            input: Some(InputSource::detect(&self.input, &self.workdir)?),
            output: Some(self.output.clone()),
            mapper: Some(self.mapper.clone()),
            reducer: self.reducer.clone(),
            redout: self.redout.clone(),
            distribution: self.distribution,
            subdir: self.subdir,
            ext: self.ext.clone(),
            delimiter: self.delimiter.clone(),
            exclusive: self.exclusive,
            keep: self.keep,
            apptype: self.apptype,
            extra_options: self.options.clone(),
            backend: self.backend,
            max_array_tasks: self.max_array_tasks,
            concurrency: self.concurrency,
            work_dir: self.workdir.clone(),
        })
    }

    /// Formats the arguments back into `--flag=value` form.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = Vec::new();
        let mut push = |flag: &str, value: String| args.push(format!("--{flag}={value}"));
        if let Some(np) = self.np {
            push("np", np.to_string());
        }
        push("input", self.input.display().to_string());
        push("output", self.output.display().to_string());
        push("mapper", self.mapper.clone());
        if let Some(r) = &self.reducer {
            push("reducer", r.clone());
        }
        push("redout", self.redout.clone());
        if let Some(n) = self.ndata {
            push("ndata", n.to_string());
        }
        push("distribution", self.distribution.to_string());
        push("subdir", self.subdir.to_string());
        push("ext", self.ext.clone());
        push("delimiter", self.delimiter.clone());
        push("exclusive", self.exclusive.to_string());
        push("keep", self.keep.to_string());
        push("apptype", self.apptype.to_string());
        push("options", self.options.clone());
        push("backend", self.backend.to_string());
        if let Some(c) = self.concurrency {
            push("concurrency", c.to_string());
        }
        if let Some(r) = &self.report {
            push("report", r.display().to_string());
        }
        push("max-array-tasks", self.max_array_tasks.to_string());
        push("workdir", self.workdir.display().to_string());
        args
    }
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct BenchArgs {
    /// Seconds per mapper process start
    #[arg(long, default_value_t = 0.2)]
    pub startup: f64,
    /// Seconds per input file
    #[arg(long, default_value_t = 0.02)]
    pub work: f64,
    /// Corpus size
    #[arg(long, default_value_t = 128)]
    pub files: usize,
    /// Concurrent task counts to sweep
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128")]
    pub tasks: Vec<usize>,
    /// Modes to sweep
    #[arg(long, value_delimiter = ',', default_value = "default,block,mimo", value_parser = parse_keyword::<BenchMode>)]
    pub modes: Vec<BenchMode>,
    /// Runs per point; the median is reported
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
    /// Scratch directory for the corpus, stubs and workspaces
    #[arg(long, value_name = "DIR", default_value = "mapred-bench")]
    pub dir: PathBuf,
    /// Also write the table to this file
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

impl BenchArgs {
    pub fn to_model(&self) -> CostModel {
        CostModel {
            startup: self.startup,
            work: self.work,
            files: self.files,
            task_counts: self.tasks.clone(),
            modes: self.modes.clone(),
        }
    }
}

impl Cli {
    pub fn to_args(&self) -> Vec<String> {
        match &self.command {
            Command::Launch(a) => std::iter::once("launch".to_string()).chain(a.to_args()).collect(),
            Command::Bench(b) => {
                let modes: Vec<String> = b.modes.iter().map(|m| m.to_string().to_lowercase()).collect();
                let tasks: Vec<String> = b.tasks.iter().map(usize::to_string).collect();
                let mut args = vec![
                    "bench".to_string(),
                    format!("--startup={}", b.startup),
                    format!("--work={}", b.work),
                    format!("--files={}", b.files),
                    format!("--tasks={}", tasks.join(",")),
                    format!("--modes={}", modes.join(",")),
                    format!("--repetitions={}", b.repetitions),
                    format!("--dir={}", b.dir.display()),
                ];
                if let Some(out) = &b.out {
                    args.push(format!("--out={}", out.display()));
                }
                args
            }
        }
    }
}

/// Parses a full argv (program name first). A leading flag implies `launch`.
pub fn parse_args<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if let Some(first) = argv.get(1).and_then(|a| a.to_str()) {
        let implied = first.starts_with("--") && !matches!(first, "--help" | "--version");
        if implied {
            argv.insert(1, "launch".into());
        }
    }
    Cli::try_parse_from(argv)
}

/// Runs a parsed invocation and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Launch(args) => run_launch(&args),
        Command::Bench(args) => run_bench(&args),
    }
}

fn run_launch(args: &LaunchArgs) -> i32 {
    let config = match args.to_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("mapred: {e}");
            return EXIT_USAGE;
        }
    };
    let report = match Launcher::new().launch(config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("mapred: {e}");
            return if e.stage() == Some(Stage::Validate) {
                EXIT_USAGE
            } else {
                EXIT_ERROR
            };
        }
    };
    println!("{report}");
    if let Some(path) = &args.report {
        if let Err(e) = report.write_json(&args.workdir.join(path)) {
            eprintln!("mapred: {e}");
            return EXIT_ERROR;
        }
    }
    match report.outcome {
        RunOutcome::Succeeded | RunOutcome::Emitted => EXIT_OK,
        RunOutcome::MapperFailed => EXIT_MAPPER_FAILED,
        RunOutcome::ReducerFailed => EXIT_REDUCER_FAILED,
    }
}

fn run_bench(args: &BenchArgs) -> i32 {
    let model = args.to_model();
    if let Err(e) = model.validate() {
        eprintln!("mapred: {e}");
        return EXIT_USAGE;
    }
    if let Err(e) = std::fs::create_dir_all(&args.dir) {
        eprintln!("mapred: creating {}: {e}", args.dir.display());
        return EXIT_ERROR;
    }
    match bench::run_sweep(&model, &args.dir, args.repetitions) {
        Ok(measurements) => {
            let table = bench::render_table(&measurements);
            print!("{table}");
            if let Some(out) = &args.out {
                if let Err(e) = std::fs::write(out, &table) {
                    eprintln!("mapred: writing {}: {e}", out.display());
                    return EXIT_ERROR;
                }
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("mapred: {e}");
            EXIT_ERROR
        }
    }
}

/// Entry point shared by the binary: parse, run, map errors to exit codes.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match parse_args(argv) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            }
        }
    }
}
