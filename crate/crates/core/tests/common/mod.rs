#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use mapred::toys::write_script;
use walkdir::WalkDir;

/// Sequential word count over every regular file under `dir`, formatted the
/// way the toy reducer formats its output.
pub fn word_count_oracle(dir: &Path) -> String {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut files: Vec<PathBuf> = WalkDir::new(dir)
        .into_iter()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .collect();
    files.sort();
    for f in files {
        let text = fs::read_to_string(&f).unwrap();
        for word in text.split(|c: char| !c.is_ascii_alphabetic()) {
            if !word.is_empty() {
                *counts.entry(word.to_ascii_lowercase()).or_default() += 1;
            }
        }
    }
    counts.into_iter().map(|(w, c)| format!("{w} {c}\n")).collect()
}

pub fn canonical_lines(text: &str) -> Vec<String> {
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines.sort();
    lines
}

/// Mapper that logs `start <t>` / `end <t>` (epoch seconds) around a sleep
/// and exits 7 when its input's file name equals `fail_on`.
pub fn ledger_mapper(dir: &Path, ledger: &Path, sleep: f64, fail_on: Option<&str>) -> String {
    let fail = match fail_on {
        Some(name) => format!("if [ \"$(basename \"$1\")\" = \"{name}\" ]; then echo \"fail $EPOCHREALTIME\" >> \"$L\"; exit 7; fi\n"),
        None => String::new(),
    };
    let body = format!(
        "#!/bin/bash\nexport LC_ALL=C\nL=\"{}\"\necho \"start $EPOCHREALTIME\" >> \"$L\"\nsleep {sleep}\n{fail}cp \"$1\" \"$2\"\necho \"end $EPOCHREALTIME\" >> \"$L\"\n",
        ledger.display()
    );
    write_script(dir, "LedgerMap.sh", &body).unwrap()
}

pub fn ledger_reducer(dir: &Path, ledger: &Path) -> String {
    let body = format!(
        "#!/bin/bash\nexport LC_ALL=C\nL=\"{}\"\necho \"reduce_start $EPOCHREALTIME\" >> \"$L\"\nls \"$1\" > \"$2\"\necho \"reduce_end $EPOCHREALTIME\" >> \"$L\"\n",
        ledger.display()
    );
    write_script(dir, "LedgerReduce.sh", &body).unwrap()
}

/// Mapper that appends one line per process start to `ledger` and copies
/// input to output. Works in both modes: two arguments are an input/output
/// pair, one argument is a manifest.
pub fn counting_mapper(dir: &Path, ledger: &Path) -> String {
    let body = format!(
        "#!/bin/bash\necho \"$$\" >> \"{}\"\nif [ $# -eq 1 ]; then\n  while read -r in out; do cp \"$in\" \"$out\"; done < \"$1\"\nelse\n  cp \"$1\" \"$2\"\nfi\n",
        ledger.display()
    );
    write_script(dir, "CountCmd.sh", &body).unwrap()
}

pub fn read_ledger(path: &Path) -> Vec<(String, f64)> {
    fs::read_to_string(path)
        .unwrap_or_default()
        .lines()
        .filter_map(|l| {
            let (tag, t) = l.split_once(' ')?;
            Some((tag.to_string(), t.parse().ok()?))
        })
        .collect()
}

pub fn line_count(path: &Path) -> usize {
    fs::read_to_string(path).map(|s| s.lines().count()).unwrap_or(0)
}

/// Maximum number of `start`..`end` intervals open at once.
pub fn max_overlap(events: &[(String, f64)]) -> usize {
    let mut points: Vec<(f64, i32)> = events
        .iter()
        .filter_map(|(tag, t)| match tag.as_str() {
            "start" => Some((*t, 1)),
            "end" => Some((*t, -1)),
            _ => None,
        })
        .collect();
    // ends sort before starts at equal timestamps
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut open = 0i32;
    let mut max = 0i32;
    for (_, d) in points {
        open += d;
        max = max.max(open);
    }
    max as usize
}

/// Relative path → contents for every file under `root`.
pub fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    WalkDir::new(root)
        .into_iter()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let rel = e.path().strip_prefix(root).unwrap().to_path_buf();
            (rel, fs::read(e.path()).unwrap())
        })
        .collect()
}

pub fn touch(root: &Path, rel: &str, contents: &str) {
    let p = root.join(rel);
    fs::create_dir_all(p.parent().unwrap()).unwrap();
    fs::write(p, contents).unwrap();
}

pub fn workspaces(dir: &Path) -> Vec<PathBuf> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with(".MAPRED."))
        .collect()
}
