//! Map-only launch: one array task per input file, outputs named
//! `<input><delimiter><ext>`.
//!
//! Run with `cargo run --example image_convert`.

use std::fs;

use mapred::{toys, LaunchConfig};

fn main() -> mapred::Result<()> {
    let dir = tempfile::tempdir().expect("tempdir");
    let root = dir.path();
    fs::create_dir(root.join("input")).expect("mkdir");
    for i in 1..=6 {
        fs::write(root.join(format!("input/image_{i}.jpg")), format!("pixels of image {i}\n")).expect("write");
    }
    let mapper = toys::upcase_mapper(root)?;

    let mut config = LaunchConfig::new(mapper, "input", "output");
    config.work_dir = root.to_path_buf();
    config.ext = "gray".into();
    let report = mapred::launch(config)?;
    println!("{report}\n");

    let mut outputs: Vec<_> = fs::read_dir(root.join("output"))
        .expect("output dir")
        .map(|e| e.expect("entry").path())
        .collect();
    outputs.sort();
    for path in outputs {
        let body = fs::read_to_string(&path).expect("read");
        println!("{:<22} {}", path.file_name().unwrap().to_string_lossy(), body.trim_end());
    }
    Ok(())
}
