//! What a failed mapper looks like: per-task exit statuses, merged logs,
//! the reducer held back, and the workspace kept for debugging.
//!
//! Run with `cargo run --example failure_handling`.

use std::fs;

use mapred::{toys, LaunchConfig, RunOutcome};

fn main() -> mapred::Result<()> {
    let dir = tempfile::tempdir().expect("tempdir");
    let root = dir.path();
    fs::create_dir(root.join("input")).expect("mkdir");
    for name in ["good_1.txt", "bad.txt", "good_2.txt"] {
        fs::write(root.join("input").join(name), "data\n").expect("write");
    }
    let mapper = toys::write_script(
        root,
        "PickyCmd.sh",
        "#!/bin/bash\ncase \"$1\" in\n  *bad*) echo \"cannot parse $1\" >&2; exit 9 ;;\nesac\ncp \"$1\" \"$2\"\n",
    )?;

    let mut config = LaunchConfig::new(mapper, "input", "output");
    config.work_dir = root.to_path_buf();
    config.reducer = Some(toys::word_freq_reducer(root)?);
    let report = mapred::launch(config)?;
    println!("{report}\n");
    assert_eq!(report.outcome, RunOutcome::MapperFailed);

    for result in &report.task_results {
        println!("task {} exit {} ({:.3} s)", result.task_index, result.exit_status, result.elapsed);
        if !result.succeeded() {
            print!("  log: {}", fs::read_to_string(&result.log_path).expect("log"));
        }
    }
    println!("workspace still present: {}", report.workspace.is_dir());
    Ok(())
}
