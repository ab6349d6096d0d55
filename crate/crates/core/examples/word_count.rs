//! Map + reduce: word frequencies over 21 text files spread cyclically over
//! three array tasks, merged by a dependent reduce job.
//!
//! Run with `cargo run --example word_count`.

use std::fs;

use mapred::{toys, Distribution, LaunchConfig};

fn main() -> mapred::Result<()> {
    let dir = tempfile::tempdir().expect("tempdir");
    let root = dir.path();
    toys::word_corpus(&root.join("input"), 21, 1)?;

    let mut config = LaunchConfig::new(toys::word_freq_mapper(root)?, "input", "output");
    config.work_dir = root.to_path_buf();
    config.np = Some(3);
    config.distribution = Distribution::Cyclic;
    config.reducer = Some(toys::word_freq_reducer(root)?);

    let report = mapred::launch(config)?;
    println!("{report}\n");

    let reduced = fs::read_to_string(report.reducer_output.as_ref().expect("reducer ran")).expect("read");
    let mut counts: Vec<(&str, u64)> = reduced
        .lines()
        .filter_map(|l| l.split_once(' '))
        .map(|(w, c)| (w, c.parse().unwrap_or(0)))
        .collect();
    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    println!("top words:");
    for (word, count) in counts.iter().take(8) {
        println!("  {word:<10} {count}");
    }
    Ok(())
}
