//! The same word count in MIMO mode: each array task starts the mapper once
//! and hands it a manifest of `<input> <output>` pairs. The workspace is kept
//! so the generated manifests and run scripts can be inspected, and the
//! result is checked against a SISO run over the same files.
//!
//! Run with `cargo run --example word_count_mimo`.

use std::fs;
use std::path::Path;

use mapred::{toys, AppType, LaunchConfig, Launcher};

fn run(root: &Path, apptype: AppType) -> mapred::Result<String> {
    let mapper = match apptype {
        AppType::Siso => toys::word_freq_mapper(root)?,
        AppType::Mimo => toys::word_freq_mapper_multi(root)?,
    };
    let mut config = LaunchConfig::new(mapper, "input", "output");
    config.work_dir = root.to_path_buf();
    config.np = Some(3);
    config.apptype = apptype;
    config.reducer = Some(toys::word_freq_reducer(root)?);
    config.keep = apptype == AppType::Mimo;
    let report = Launcher::new().launch(config)?;
    println!("{report}\n");

    if apptype == AppType::Mimo {
        let ws = &report.workspace;
        println!("--- {}/run_llmap_1", ws.display());
        print!("{}", fs::read_to_string(ws.join("run_llmap_1")).expect("run script"));
        println!("--- {}/input_1 (first 3 lines)", ws.display());
        let manifest = fs::read_to_string(ws.join("input_1")).expect("manifest");
        for line in manifest.lines().take(3) {
            println!("{line}");
        }
        println!();
    }
    Ok(fs::read_to_string(report.reducer_output.expect("reducer ran")).expect("read"))
}

fn main() -> mapred::Result<()> {
    let mut results = Vec::new();
    for apptype in [AppType::Mimo, AppType::Siso] {
        let dir = tempfile::tempdir().expect("tempdir");
        toys::word_corpus(&dir.path().join("input"), 21, 1)?;
        results.push(run(dir.path(), apptype)?);
    }
    println!(
        "mimo and siso reduce outputs identical: {}",
        results[0] == results[1]
    );
    Ok(())
}
