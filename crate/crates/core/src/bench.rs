//! Startup-overhead benchmark.
//!
//! A stub mapper realizes a two-parameter cost model: every process start
//! costs `startup` seconds and every file costs `work` seconds. Sweeping
//! the number of concurrent array tasks `T` over a fixed corpus of `F`
//! files, with `k = ceil(F / T)` files per task slot, the model predicts
//!
//! | mode    | elapsed        | overhead per task |
//! |---------|----------------|-------------------|
//! | DEFAULT | `k * (s + w)`  | `k * s`           |
//! | BLOCK   | `k * (s + w)`  | `k * s`           |
//! | MIMO    | `s + k * w`    | `s`               |
//!
//! DEFAULT is a launch without `--np`: one array task per file, with at
//! most `T` running at once. BLOCK passes `--np T` (block distribution), so
//! each of the `T` tasks runs the mapper `k` times from one run script. MIMO
//! adds `--apptype mimo`, starting the mapper once per task. DEFAULT and
//! BLOCK share a prediction; DEFAULT additionally pays one run-script start
//! per file.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::config::{AppType, Distribution, LaunchConfig};
use crate::error::{Error, Result};
use crate::orchestrator::{Launcher, RunOutcome};
use crate::toys::write_script;

pub const SISO_STUB: &str = "SleepCmd.sh";
pub const MIMO_STUB: &str = "SleepCmdMulti.sh";
pub const CORPUS_DIR: &str = "input";
pub const OUTPUT_DIR: &str = "output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BenchMode {
    Default,
    Block,
    Mimo,
}

impl BenchMode {
    pub const ALL: [BenchMode; 3] = [BenchMode::Default, BenchMode::Block, BenchMode::Mimo];
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchMode::Default => "DEFAULT",
            BenchMode::Block => "BLOCK",
            BenchMode::Mimo => "MIMO",
        })
    }
}

impl FromStr for BenchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "default" => Ok(BenchMode::Default),
            "block" => Ok(BenchMode::Block),
            "mimo" => Ok(BenchMode::Mimo),
            _ => Err(Error::Bench(format!(
                "unknown mode {s:?}; allowed values: default, block, mimo"
            ))),
        }
    }
}

/// Parameters of the sleep-based workload.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostModel {
    /// Seconds per mapper process start.
    pub startup: f64,
    /// Seconds per input file.
    pub work: f64,
    pub files: usize,
    pub task_counts: Vec<usize>,
    pub modes: Vec<BenchMode>,
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        if self.startup.is_nan() || self.startup <= 0.0 {
            return Err(Error::Bench("startup must be positive".into()));
        }
        if self.work.is_nan() || self.work < 0.0 {
            return Err(Error::Bench("work must be non-negative".into()));
        }
        if self.files == 0 {
            return Err(Error::Bench("files must be positive".into()));
        }
        if let Some(t) = self.task_counts.iter().find(|&&t| t == 0 || t > self.files) {
            return Err(Error::Bench(format!(
                "task count {t} outside 1..={}",
                self.files
            )));
        }
        Ok(())
    }

    /// Files handled by one task slot at `tasks` concurrent tasks.
    pub fn files_per_task(&self, tasks: usize) -> usize {
        self.files.div_ceil(tasks)
    }

    pub fn predicted_elapsed(&self, mode: BenchMode, tasks: usize) -> f64 {
        let k = self.files_per_task(tasks) as f64;
        match mode {
            BenchMode::Default | BenchMode::Block => k * (self.startup + self.work),
            BenchMode::Mimo => self.startup + k * self.work,
        }
    }

    pub fn predicted_overhead(&self, mode: BenchMode, tasks: usize) -> f64 {
        let k = self.files_per_task(tasks) as f64;
        match mode {
            BenchMode::Default | BenchMode::Block => k * self.startup,
            BenchMode::Mimo => self.startup,
        }
    }
}

/// One measured sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMeasurement {
    pub mode: BenchMode,
    pub tasks: usize,
    pub files_per_task: usize,
    /// Median wall time in seconds.
    pub elapsed: f64,
    pub overhead_per_task: f64,
    /// Relative to DEFAULT at one task; filled by [`speedup_table`].
    pub speedup: Option<f64>,
}

/// Overhead attributable to process starts: elapsed minus the pure work
/// time `k * w` of one task slot.
pub fn overhead_per_task(measurement: &SweepMeasurement, model: &CostModel) -> f64 {
    let k = model.files_per_task(measurement.tasks) as f64;
    (measurement.elapsed - k * model.work).max(0.0)
}

/// Writes `files` fixed-size files `file_0001`, ... into `dir`, replacing
/// any earlier corpus there.
pub fn synthesize_corpus(dir: &Path, files: usize, payload_bytes: usize) -> Result<PathBuf> {
    if files == 0 {
        return Err(Error::Bench("corpus needs at least one file".into()));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let width = files.to_string().len().max(4);
    let names: Vec<String> = (1..=files).map(|i| format!("file_{i:0width$}")).collect();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(format!("listing {}", dir.display()), e))?;
    for entry in entries.flatten() {
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with("file_") && !names.contains(&name) {
            let _ = fs::remove_file(entry.path());
        }
    }
    for name in &names {
        let mut payload = name.clone().into_bytes();
        payload.push(b'\n');
        payload = payload.iter().copied().cycle().take(payload_bytes).collect();
        let path = dir.join(name);
        fs::write(&path, payload).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    }
    Ok(dir.to_path_buf())
}

fn micros(seconds: f64) -> u64 {
    (seconds * 1e6).round() as u64
}

fn sleep_literal(us: u64) -> String {
    format!("{}.{:06}", us / 1_000_000, us % 1_000_000)
}

/// Writes the SISO and MIMO sleep stubs realizing `model` into `dir`.
pub fn write_stub_mappers(dir: &Path, model: &CostModel) -> Result<(String, String)> {
    let startup_us = micros(model.startup);
    let work_us = micros(model.work);
    let siso = format!(
        "#!/bin/bash\nsleep {}\nprintf '%s\\n' \"$1\" > \"$2\"\n",
        sleep_literal(startup_us + work_us)
    );
    // A single sleep covers startup plus per-file work: only the total is
    // observable, and each extra exec is real overhead on a small machine.
    let mimo = format!(
        "#!/bin/bash\n\
n=0\n\
while read -r in out; do\n\
  printf '%s\\n' \"$in\" > \"$out\"\n\
  n=$((n + 1))\n\
done < \"$1\"\n\
us=$(({startup_us} + n * {work_us}))\n\
printf -v t '%d.%06d' $((us / 1000000)) $((us % 1000000))\n\
sleep \"$t\"\n"
    );
    Ok((
        write_script(dir, SISO_STUB, &siso)?,
        write_script(dir, MIMO_STUB, &mimo)?,
    ))
}

/// Launch configuration realizing `mode` at `tasks` concurrent tasks.
pub fn point_config(root: &Path, mode: BenchMode, tasks: usize) -> LaunchConfig {
    let (mapper, np, apptype) = match mode {
        BenchMode::Default => (SISO_STUB, None, AppType::Siso),
        BenchMode::Block => (SISO_STUB, Some(tasks), AppType::Siso),
        BenchMode::Mimo => (MIMO_STUB, Some(tasks), AppType::Mimo),
    };
    LaunchConfig {
        np,
        apptype,
        distribution: Distribution::Block,
        concurrency: Some(tasks),
        work_dir: root.to_path_buf(),
        ..LaunchConfig::new(mapper, CORPUS_DIR, OUTPUT_DIR)
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Times one sweep point; the corpus and stubs must already be in `root`.
pub fn measure_point(root: &Path, mode: BenchMode, tasks: usize, repetitions: usize) -> Result<f64> {
    let launcher = Launcher::new();
    let mut samples = Vec::with_capacity(repetitions.max(1));
    for _ in 0..repetitions.max(1) {
        let output = root.join(OUTPUT_DIR);
        if output.exists() {
            fs::remove_dir_all(&output)
                .map_err(|e| Error::io(format!("clearing {}", output.display()), e))?;
        }
        let config = point_config(root, mode, tasks);
        let started = Instant::now();
        let report = launcher.launch(config)?;
        let elapsed = started.elapsed().as_secs_f64();
        if report.outcome != RunOutcome::Succeeded {
            return Err(Error::Bench(format!(
                "{mode} at T={tasks} failed: {:?}",
                report.outcome
            )));
        }
        samples.push(elapsed);
    }
    Ok(median(samples))
}

/// Prepares `root` (corpus and stubs) and measures every (mode, T) point in
/// sequence. Speedups are filled when DEFAULT at T=1 is part of the sweep.
pub fn run_sweep(model: &CostModel, root: &Path, repetitions: usize) -> Result<Vec<SweepMeasurement>> {
    model.validate()?;
    synthesize_corpus(&root.join(CORPUS_DIR), model.files, 64)?;
    write_stub_mappers(root, model)?;
    let mut out = Vec::new();
    for &mode in &model.modes {
        for &tasks in &model.task_counts {
            let elapsed = measure_point(root, mode, tasks, repetitions)?;
            let mut m = SweepMeasurement {
                mode,
                tasks,
                files_per_task: model.files_per_task(tasks),
                elapsed,
                overhead_per_task: 0.0,
                speedup: None,
            };
            m.overhead_per_task = overhead_per_task(&m, model);
            log::info!("{mode} T={tasks}: {elapsed:.3} s");
            out.push(m);
        }
    }
    match speedup_table(&out) {
        Ok(table) => Ok(table),
        Err(_) => Ok(out),
    }
}

/// Orders measurements by mode then T and fills speedup relative to
/// DEFAULT at T=1.
pub fn speedup_table(measurements: &[SweepMeasurement]) -> Result<Vec<SweepMeasurement>> {
    let baseline = measurements
        .iter()
        .find(|m| m.mode == BenchMode::Default && m.tasks == 1)
        .ok_or_else(|| Error::Bench("missing DEFAULT baseline at T=1".into()))?
        .elapsed;
    let mut table: Vec<SweepMeasurement> = measurements
        .iter()
        .map(|m| SweepMeasurement {
            speedup: Some(baseline / m.elapsed),
            ..m.clone()
        })
        .collect();
    table.sort_by_key(|m| (m.mode, m.tasks));
    Ok(table)
}

/// Comma-delimited table: `mode,T,k,elapsed,overhead,speedup`.
pub fn render_table(measurements: &[SweepMeasurement]) -> String {
    let mut s = String::from("mode,T,k,elapsed,overhead,speedup\n");
    for m in measurements {
        let speedup = m.speedup.map(|x| format!("{x:.4}")).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{:.4},{:.4},{}",
            m.mode, m.tasks, m.files_per_task, m.elapsed, m.overhead_per_task, speedup
        );
    }
    s
}
