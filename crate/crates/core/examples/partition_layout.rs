//! How files are spread over array tasks: task-count resolution from
//! `np`/`ndata`, and block versus cyclic assignment.
//!
//! Run with `cargo run --example partition_layout`.

use mapred::partition::{resolve_task_count, split};
use mapred::Distribution;

fn main() -> mapred::Result<()> {
    let files: Vec<String> = (1..=10).map(|i| format!("f{i:02}")).collect();

    println!("task counts for 10 files:");
    for (np, ndata) in [(None, None), (Some(3), None), (Some(20), None), (None, Some(4)), (Some(3), Some(4))] {
        let t = resolve_task_count(files.len(), np, ndata, 75_000)?;
        let show = |v: Option<usize>| v.map_or("-".to_string(), |n| n.to_string());
        println!("  np={:<3} ndata={:<3} -> {t} tasks", show(np), show(ndata));
    }

    for dist in [Distribution::Block, Distribution::Cyclic] {
        println!("\n{dist}, 3 tasks:");
        for (i, task) in split(&files, 3, dist)?.iter().enumerate() {
            println!("  task {}: {}", i + 1, task.join(" "));
        }
    }
    Ok(())
}
