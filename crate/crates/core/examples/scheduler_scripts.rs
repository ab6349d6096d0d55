//! Emits the submission scripts for Grid Engine, SLURM and LSF without
//! running anything, including the dependent reduce job.
//!
//! Run with `cargo run --example scheduler_scripts`.

use std::fs;

use mapred::{BackendKind, LaunchConfig, Launcher};

fn main() -> mapred::Result<()> {
    for (backend, options) in [
        (BackendKind::GridEngine, "-l h_vmem=8G"),
        (BackendKind::Slurm, "--mem=8G"),
        (BackendKind::Lsf, "-M 8000"),
    ] {
        let dir = tempfile::tempdir().expect("tempdir");
        let root = dir.path();
        fs::create_dir(root.join("input")).expect("mkdir");
        for i in 1..=6 {
            fs::write(root.join(format!("input/image_{i}.jpg")), "").expect("write");
        }

        let mut config = LaunchConfig::new("MatlabCmd.sh", "input", "output");
        config.work_dir = root.to_path_buf();
        config.backend = backend;
        config.np = Some(3);
        config.reducer = Some("ReduceCmd.sh".into());
        config.extra_options = options.into();
        let report = Launcher::with_pid(1120).launch(config)?;

        println!("===== {backend} =====");
        for script in &report.emitted_scripts {
            println!("--- {}", script.strip_prefix(root).unwrap().display());
            print!("{}", fs::read_to_string(script).expect("script"));
        }
        println!();
    }
    Ok(())
}
