//! A small startup-overhead sweep with the sleep-model stub mappers:
//! DEFAULT, BLOCK and MIMO at several task counts, with the model's
//! predictions alongside. Pass a startup cost in seconds to change it.
//!
//! Run with `cargo run --release --example overhead_sweep [startup]`.

use mapred::bench::{self, BenchMode, CostModel};

fn main() -> mapred::Result<()> {
    let startup = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let model = CostModel {
        startup,
        work: 0.01,
        files: 32,
        task_counts: vec![1, 2, 4, 8],
        modes: BenchMode::ALL.to_vec(),
    };
    let dir = tempfile::tempdir().expect("tempdir");
    let measurements = bench::run_sweep(&model, dir.path(), 1)?;

    println!("{:<8} {:>3} {:>3} {:>9} {:>9} {:>9} {:>8}", "mode", "T", "k", "elapsed", "predicted", "overhead", "speedup");
    for m in &measurements {
        println!(
            "{:<8} {:>3} {:>3} {:>9.3} {:>9.3} {:>9.3} {:>8.2}",
            m.mode.to_string(),
            m.tasks,
            m.files_per_task,
            m.elapsed,
            model.predicted_elapsed(m.mode, m.tasks),
            m.overhead_per_task,
            m.speedup.unwrap_or(f64::NAN)
        );
    }
    println!("\nCSV:\n{}", bench::render_table(&measurements));
    Ok(())
}
