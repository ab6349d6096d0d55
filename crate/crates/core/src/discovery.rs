//! Input enumeration and output path mapping.

use std::collections::{BTreeSet, HashMap};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::config::{InputSource, LaunchConfig};
use crate::error::{Error, Result};

/// One unit of mapper work: an input file and the output it must produce.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorkItem {
    pub input: PathBuf,
    pub output: PathBuf,
}

/// Lists the input files named by `source`.
///
/// Directory sources yield regular files sorted by relative path; hidden
/// entries (including `.MAPRED.*` workspaces) are skipped. List files yield
/// their non-empty lines in file order. Returned paths are in the form they
/// will appear in generated scripts, i.e. relative to `work_dir` unless the
/// user gave absolute paths.
pub fn discover_inputs(source: &InputSource, subdir: bool, work_dir: &Path) -> Result<Vec<PathBuf>> {
    let paths = match source {
        InputSource::Dir(root) => scan_dir(root, subdir, work_dir)?,
        InputSource::ListFile(list) => read_list(list, work_dir)?,
    };
    if paths.is_empty() {
        return Err(Error::NoInputs(source.path().to_path_buf()));
    }
    for p in &paths {
        check_script_safe(p)?;
    }
    Ok(paths)
}

fn scan_dir(root: &Path, subdir: bool, work_dir: &Path) -> Result<Vec<PathBuf>> {
    let resolved = work_dir.join(root);
    let max_depth = if subdir { usize::MAX } else { 1 };
    let mut rels = Vec::new();
    let walker = WalkDir::new(&resolved)
        .min_depth(1)
        .max_depth(max_depth)
        .follow_links(true)
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !is_hidden(e.file_name()));
    for entry in walker {
        let entry = entry.map_err(|e| {
            let context = format!("scanning {}", resolved.display());
            match e.into_io_error() {
                Some(io) => Error::io(context, io),
                None => Error::Config(format!("{context}: filesystem loop")),
            }
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(&resolved)
            .expect("walkdir yields paths under its root")
            .to_path_buf();
        rels.push(rel);
    }
    rels.sort();
    Ok(rels.into_iter().map(|rel| root.join(rel)).collect())
}

fn read_list(list: &Path, work_dir: &Path) -> Result<Vec<PathBuf>> {
    let resolved = work_dir.join(list);
    let text = fs::read_to_string(&resolved)
        .map_err(|e| Error::io(format!("reading list file {}", resolved.display()), e))?;
    let mut paths = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let path = PathBuf::from(line);
        if !work_dir.join(&path).is_file() {
            return Err(Error::MissingListedFile {
                list: list.to_path_buf(),
                missing: path,
            });
        }
        paths.push(path);
    }
    Ok(paths)
}

fn is_hidden(name: &std::ffi::OsStr) -> bool {
    name.to_str().is_some_and(|s| s.starts_with('.'))
}

fn check_script_safe(path: &Path) -> Result<()> {
    let s = path
        .to_str()
        .ok_or_else(|| Error::NonUtf8Path(path.to_path_buf()))?;
    if s.chars().any(char::is_whitespace) {
        return Err(Error::WhitespaceInPath(path.to_path_buf()));
    }
    Ok(())
}

/// Computes the mapper output path for `input`.
///
/// With `subdir` the path relative to `input_root` is kept below
/// `output_root`; otherwise only the file name is used. Inputs that do not
/// live under `input_root` (list-file entries) always use their file name.
pub fn map_output_path(
    input: &Path,
    input_root: Option<&Path>,
    output_root: &Path,
    subdir: bool,
    delimiter: &str,
    ext: &str,
) -> PathBuf {
    let rel = match input_root {
        Some(root) if subdir => input.strip_prefix(root).ok(),
        _ => None,
    };
    let rel = match rel {
        Some(r) => r.to_path_buf(),
        None => PathBuf::from(input.file_name().unwrap_or(input.as_os_str())),
    };
    let mut out: OsString = output_root.join(rel).into_os_string();
    out.push(delimiter);
    out.push(ext);
    PathBuf::from(out)
}

/// Discovers inputs for `config` and pairs each with its output path.
///
/// Fails if two inputs would write the same output, which can only happen
/// for list files whose entries share a file name.
pub fn work_items(config: &LaunchConfig) -> Result<Vec<WorkItem>> {
    let source = config
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("missing input source".into()))?;
    let inputs = discover_inputs(source, config.subdir, &config.work_dir)?;
    let input_root = match source {
        InputSource::Dir(root) => Some(root.as_path()),
        InputSource::ListFile(_) => None,
    };
    let mut seen: HashMap<PathBuf, PathBuf> = HashMap::with_capacity(inputs.len());
    let mut items = Vec::with_capacity(inputs.len());
    for input in inputs {
        let output = map_output_path(
            &input,
            input_root,
            config.output_dir(),
            config.subdir,
            &config.delimiter,
            &config.ext,
        );
        if let Some(first) = seen.insert(output.clone(), input.clone()) {
            return Err(Error::OutputCollision {
                first,
                second: input,
                output,
            });
        }
        items.push(WorkItem { input, output });
    }
    Ok(items)
}

/// Ensures `output_root` and every output's parent directory exist.
///
/// Returns the directories this call created; an already mirrored tree
/// yields an empty set.
pub fn mirror_output_tree(items: &[WorkItem], output_root: &Path, work_dir: &Path) -> Result<BTreeSet<PathBuf>> {
    let mut wanted: BTreeSet<PathBuf> = BTreeSet::new();
    wanted.insert(output_root.to_path_buf());
    for item in items {
        if let Some(parent) = item.output.parent() {
            if !parent.as_os_str().is_empty() {
                wanted.insert(parent.to_path_buf());
            }
        }
    }
    let mut created = BTreeSet::new();
    for dir in wanted {
        let resolved = work_dir.join(&dir);
        if resolved.is_dir() {
            continue;
        }
        // create_dir_all tolerates a concurrent creator winning the race
        fs::create_dir_all(&resolved)
            .map_err(|e| Error::io(format!("creating {}", resolved.display()), e))?;
        created.insert(dir);
    }
    Ok(created)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn touch(root: &Path, rel: &str) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, b"x").unwrap();
    }

    #[test]
    fn flat_dir_sorted() {
        let dir = tempfile::tempdir().unwrap();
        for i in [3, 1, 6, 2, 5, 4] {
            touch(dir.path(), &format!("input/image_{i}.jpg"));
        }
        let got = discover_inputs(&InputSource::Dir("input".into()), false, dir.path()).unwrap();
        let want: Vec<PathBuf> = (1..=6).map(|i| format!("input/image_{i}.jpg").into()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn flat_dir_ignores_subdirs_and_hidden() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "input/a.txt");
        touch(dir.path(), "input/.hidden");
        touch(dir.path(), "input/sub/b.txt");
        touch(dir.path(), "input/.MAPRED.9/run_llmap_1");
        let got = discover_inputs(&InputSource::Dir("input".into()), false, dir.path()).unwrap();
        assert_eq!(got, vec![PathBuf::from("input/a.txt")]);
        let got = discover_inputs(&InputSource::Dir("input".into()), true, dir.path()).unwrap();
        assert_eq!(got, vec![PathBuf::from("input/a.txt"), PathBuf::from("input/sub/b.txt")]);
    }

    #[test]
    fn recursive_two_leaf_tree() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "input/b/y.txt");
        touch(dir.path(), "input/a/x.txt");
        let got = discover_inputs(&InputSource::Dir("input".into()), true, dir.path()).unwrap();
        let rel: Vec<_> = got.iter().map(|p| p.strip_prefix("input").unwrap().to_path_buf()).collect();
        assert_eq!(rel, vec![PathBuf::from("a/x.txt"), PathBuf::from("b/y.txt")]);
    }

    #[test]
    fn empty_dir_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("input")).unwrap();
        let err = discover_inputs(&InputSource::Dir("input".into()), false, dir.path()).unwrap_err();
        assert!(err.to_string().contains("no input files found"), "{err}");
    }

    #[test]
    fn whitespace_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "input/has space.txt");
        let err = discover_inputs(&InputSource::Dir("input".into()), false, dir.path()).unwrap_err();
        assert!(matches!(err, Error::WhitespaceInPath(_)));
    }

    #[test]
    fn list_file_keeps_order_and_skips_blanks() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "data/z.txt");
        touch(dir.path(), "data/a.txt");
        fs::write(dir.path().join("list.txt"), "data/z.txt\n\n  \ndata/a.txt\n").unwrap();
        let got = discover_inputs(&InputSource::ListFile("list.txt".into()), false, dir.path()).unwrap();
        assert_eq!(got, vec![PathBuf::from("data/z.txt"), PathBuf::from("data/a.txt")]);
    }

    #[test]
    fn list_file_with_missing_entry() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("list.txt"), "ghost.txt\n").unwrap();
        let err = discover_inputs(&InputSource::ListFile("list.txt".into()), false, dir.path()).unwrap_err();
        assert!(matches!(err, Error::MissingListedFile { .. }));
    }

    #[test]
    fn output_path_default_and_custom_ext() {
        let root = Path::new("input");
        let out = Path::new("output");
        let input = Path::new("input/image_1.jpg");
        assert_eq!(
            map_output_path(input, Some(root), out, false, ".", "out"),
            PathBuf::from("output/image_1.jpg.out")
        );
        assert_eq!(
            map_output_path(input, Some(root), out, false, ".", "gray"),
            PathBuf::from("output/image_1.jpg.gray")
        );
        assert_eq!(
            map_output_path(input, Some(root), out, false, "_", "gray"),
            PathBuf::from("output/image_1.jpg_gray")
        );
    }

    #[test]
    fn output_path_mirrors_subtree() {
        let got = map_output_path(Path::new("input/a/x.txt"), Some(Path::new("input")), Path::new("output"), true, ".", "out");
        assert_eq!(got, PathBuf::from("output/a/x.txt.out"));
        let flat = map_output_path(Path::new("input/a/x.txt"), Some(Path::new("input")), Path::new("output"), false, ".", "out");
        assert_eq!(flat, PathBuf::from("output/x.txt.out"));
    }

    #[test]
    fn list_file_basename_collision_detected() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "a/same.txt");
        touch(dir.path(), "b/same.txt");
        fs::write(dir.path().join("list.txt"), "a/same.txt\nb/same.txt\n").unwrap();
        let mut cfg = LaunchConfig::new("m.sh", "unused", "output");
        cfg.input = Some(InputSource::ListFile("list.txt".into()));
        cfg.work_dir = dir.path().to_path_buf();
        assert!(matches!(work_items(&cfg).unwrap_err(), Error::OutputCollision { .. }));
    }

    #[test]
    fn mirror_creates_parents_and_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let items = vec![
            WorkItem { input: "input/a/1".into(), output: "output/a/1.out".into() },
            WorkItem { input: "input/b/2".into(), output: "output/b/2.out".into() },
        ];
        let created = mirror_output_tree(&items, Path::new("output"), dir.path()).unwrap();
        assert!(created.contains(Path::new("output/a")));
        assert!(dir.path().join("output/a").is_dir());
        assert!(dir.path().join("output/b").is_dir());
        let again = mirror_output_tree(&items, Path::new("output"), dir.path()).unwrap();
        assert!(again.is_empty());
    }

    #[test]
    fn mirror_flat_creates_only_root() {
        let dir = tempfile::tempdir().unwrap();
        let items = vec![WorkItem { input: "input/1".into(), output: "output/1.out".into() }];
        let created = mirror_output_tree(&items, Path::new("output"), dir.path()).unwrap();
        assert_eq!(created.into_iter().collect::<Vec<_>>(), vec![PathBuf::from("output")]);
    }
}
