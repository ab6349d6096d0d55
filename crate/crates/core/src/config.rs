//! Launcher options and their validation.
//!
//! [`LaunchConfig`] carries every knob a launch understands. Raw values are
//! assembled by the CLI or an API caller and passed through
//! [`LaunchConfig::validate`], which fills defaults, rejects inconsistent
//! settings and resolves `np`/`ndata` precedence.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_REDOUT: &str = "llmapreduce.out";
pub const DEFAULT_EXT: &str = "out";
pub const DEFAULT_DELIMITER: &str = ".";
/// Grid Engine's stock cap on tasks per array job.
pub const DEFAULT_MAX_ARRAY_TASKS: usize = 75_000;

/// How the ordered input list is dealt out to array tasks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// Contiguous, near-equal slices.
    #[default]
    Block,
    /// Round robin: item `j` goes to task `(j mod T) + 1`.
    Cyclic,
}

/// Whether the mapper takes one input/output pair per process or a manifest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AppType {
    #[default]
    Siso,
    Mimo,
}

/// Execution or emission target.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    /// Run the array job as local subprocesses.
    #[default]
    Local,
    GridEngine,
    Slurm,
    Lsf,
}

macro_rules! keyword_enum {
    ($ty:ty, $what:literal, { $($name:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($variant),)+
                    other => Err(Error::Config(format!(
                        concat!("invalid ", $what, " {:?}; allowed values: {}"),
                        other,
                        [$($name),+].join(", ")
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $variant { return f.write_str($name); })+
                unreachable!()
            }
        }
    };
}

keyword_enum!(Distribution, "distribution", {
    "block" => Distribution::Block,
    "cyclic" => Distribution::Cyclic,
});

keyword_enum!(AppType, "apptype", {
    "siso" => AppType::Siso,
    "mimo" => AppType::Mimo,
});

keyword_enum!(BackendKind, "backend", {
    "local" => BackendKind::Local,
    "gridengine" => BackendKind::GridEngine,
    "slurm" => BackendKind::Slurm,
    "lsf" => BackendKind::Lsf,
});

/// Where input file names come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    /// Scan a directory.
    Dir(PathBuf),
    /// Read one path per line from a list file.
    ListFile(PathBuf),
}

impl InputSource {
    /// Classifies `path` (relative to `work_dir`) as a directory or list file.
    pub fn detect(path: impl Into<PathBuf>, work_dir: &Path) -> Result<Self> {
        let path = path.into();
        let resolved = work_dir.join(&path);
        if resolved.is_dir() {
            Ok(InputSource::Dir(path))
        } else if resolved.is_file() {
            Ok(InputSource::ListFile(path))
        } else {
            Err(Error::Config(format!(
                "input {} does not exist",
                path.display()
            )))
        }
    }

    pub fn path(&self) -> &Path {
        match self {
            InputSource::Dir(p) | InputSource::ListFile(p) => p,
        }
    }
}

/// The full launcher option set.
///
/// Relative paths (`input`, `output`, list-file entries) are interpreted
/// against `work_dir`, which is also where the `.MAPRED.<pid>` workspace is
/// created and where generated scripts execute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaunchConfig {
    pub np: Option<usize>,
    pub ndata: Option<usize>,
    pub input: Option<InputSource>,
    pub output: Option<PathBuf>,
    pub mapper: Option<String>,
    pub reducer: Option<String>,
    pub redout: String,
    pub distribution: Distribution,
    pub subdir: bool,
    pub ext: String,
    pub delimiter: String,
    pub exclusive: bool,
    pub keep: bool,
    pub apptype: AppType,
    /// Scheduler options passed through verbatim.
    pub extra_options: String,
    pub backend: BackendKind,
    pub max_array_tasks: usize,
    /// Local backend only: maximum simultaneously running tasks. `None`
    /// dispatches every array task at once.
    pub concurrency: Option<usize>,
    pub work_dir: PathBuf,
}

impl Default for LaunchConfig {
    fn default() -> Self {
        LaunchConfig {
            np: None,
            ndata: None,
            input: None,
            output: None,
            mapper: None,
            reducer: None,
            redout: DEFAULT_REDOUT.to_string(),
            distribution: Distribution::Block,
            subdir: false,
            ext: DEFAULT_EXT.to_string(),
            delimiter: DEFAULT_DELIMITER.to_string(),
            exclusive: false,
            keep: false,
            apptype: AppType::Siso,
            extra_options: String::new(),
            backend: BackendKind::Local,
            max_array_tasks: DEFAULT_MAX_ARRAY_TASKS,
            concurrency: None,
            work_dir: PathBuf::from("."),
        }
    }
}

impl LaunchConfig {
    /// A map-only launch over an input directory with every other option at
    /// its default.
    pub fn new(mapper: impl Into<String>, input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        LaunchConfig {
            mapper: Some(mapper.into()),
            input: Some(InputSource::Dir(input.into())),
            output: Some(output.into()),
            ..Default::default()
        }
    }

    /// Resolves a path from the configuration against `work_dir`.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        self.work_dir.join(path)
    }

    pub fn mapper(&self) -> &str {
        self.mapper.as_deref().unwrap_or_default()
    }

    pub fn output_dir(&self) -> &Path {
        self.output.as_deref().unwrap_or(Path::new(""))
    }

    /// Checks the option set and returns its normalized form.
    pub fn validate(mut self) -> Result<Self> {
        match self.mapper.as_deref() {
            None | Some("") => return Err(Error::Config("missing mapper".into())),
            Some(_) => {}
        }
        if matches!(self.reducer.as_deref(), Some("")) {
            return Err(Error::Config("reducer must not be empty".into()));
        }
        if self.np == Some(0) {
            return Err(Error::Config("np must be positive".into()));
        }
        if self.ndata == Some(0) {
            return Err(Error::Config("ndata must be positive".into()));
        }
        if self.max_array_tasks == 0 {
            return Err(Error::Config("max_array_tasks must be positive".into()));
        }
        if self.concurrency == Some(0) {
            return Err(Error::Config("concurrency must be positive".into()));
        }
        check_name_fragment("delimiter", &self.delimiter)?;
        check_name_fragment("ext", &self.ext)?;
        check_name_fragment("redout", &self.redout)?;

        let output = match &self.output {
            None => return Err(Error::Config("missing output directory".into())),
            Some(p) if p.as_os_str().is_empty() => {
                return Err(Error::Config("missing output directory".into()))
            }
            Some(p) => p,
        };
        if output.to_string_lossy().chars().any(char::is_whitespace) {
            return Err(Error::Config(format!(
                "output directory contains whitespace: {}",
                output.display()
            )));
        }

        match &self.input {
            None => return Err(Error::Config("missing input source".into())),
            Some(InputSource::Dir(p)) if !self.resolve(p).is_dir() => {
                return Err(Error::Config(format!(
                    "input directory {} does not exist",
                    p.display()
                )))
            }
            Some(InputSource::ListFile(p)) if !self.resolve(p).is_file() => {
                return Err(Error::Config(format!(
                    "input list file {} does not exist",
                    p.display()
                )))
            }
            Some(_) => {}
        }

        if self.ndata.is_some() && self.np.is_some() {
            log::warn!("--ndata overrides --np; ignoring np={}", self.np.unwrap_or_default());
            self.np = None;
        }
        Ok(self)
    }
}

fn check_name_fragment(what: &str, value: &str) -> Result<()> {
    if value.is_empty() {
        return Err(Error::Config(format!("{what} must not be empty")));
    }
    if value.contains('/') || value.contains(std::path::MAIN_SEPARATOR) {
        return Err(Error::Config(format!(
            "{what} {value:?} must not contain a path separator"
        )));
    }
    if value.chars().any(char::is_whitespace) {
        return Err(Error::Config(format!(
            "{what} {value:?} must not contain whitespace"
        )));
    }
    Ok(())
}
