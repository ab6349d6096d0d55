//! `subdir = true`: inputs are collected recursively and the output tree
//! mirrors the input tree.
//!
//! Run with `cargo run --example subdir_tree`.

use std::fs;
use std::path::Path;

use mapred::{toys, LaunchConfig};
use walkdir::WalkDir;

fn tree(root: &Path) {
    for entry in WalkDir::new(root).sort_by_file_name().min_depth(1) {
        let entry = entry.expect("walk");
        let rel = entry.path().strip_prefix(root).unwrap();
        let suffix = if entry.file_type().is_dir() { "/" } else { "" };
        println!("  {}{suffix}", rel.display());
    }
}

fn main() -> mapred::Result<()> {
    let dir = tempfile::tempdir().expect("tempdir");
    let root = dir.path();
    for rel in [
        "2015/jan/a.log",
        "2015/jan/b.log",
        "2015/feb/c.log",
        "2016/d.log",
        "e.log",
    ] {
        let path = root.join("input").join(rel);
        fs::create_dir_all(path.parent().unwrap()).expect("mkdir");
        fs::write(&path, format!("contents of {rel}\n")).expect("write");
    }

    let mut config = LaunchConfig::new(toys::upcase_mapper(root)?, "input", "output");
    config.work_dir = root.to_path_buf();
    config.subdir = true;
    config.np = Some(2);
    let report = mapred::launch(config)?;
    println!("{report}\n");

    println!("input:");
    tree(&root.join("input"));
    println!("output:");
    tree(&root.join("output"));
    Ok(())
}
