//! Small language-neutral mapper and reducer executables used by the
//! runnable examples and the test suites.
//!
//! Each writer drops an executable bash script into a directory and returns
//! the script's file name. Generated run scripts append `.` to `PATH`, so a
//! script written into the launch's working directory can be named bare.

use std::fs;
use std::path::Path;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::scriptgen::write_executable;

/// Writes `body` as an executable script `dir/name` and returns `name`.
pub fn write_script(dir: &Path, name: &str, body: &str) -> Result<String> {
    write_executable(&dir.join(name), body)?;
    Ok(name.to_string())
}

const COUNT_WORDS: &str = r#"tr -cs 'A-Za-z' '\n' < "$in" | tr 'A-Z' 'a-z' | { grep -v '^$' || true; } | sort | uniq -c | awk '{print $2, $1}' > "$out""#;

/// Word-frequency mapper: `WordFreqCmd.sh <input> <output>` writes one
/// `word count` line per distinct lower-cased word.
pub fn word_freq_mapper(dir: &Path) -> Result<String> {
    let body = format!(
        "#!/bin/bash\nexport LC_ALL=C\nin=\"$1\"; out=\"$2\"\n{COUNT_WORDS}\n"
    );
    write_script(dir, "WordFreqCmd.sh", &body)
}

/// Manifest-driven variant: `WordFreqCmdMulti.sh <manifest>` handles every
/// `<input> <output>` line in one process.
pub fn word_freq_mapper_multi(dir: &Path) -> Result<String> {
    let body = format!(
        "#!/bin/bash\nexport LC_ALL=C\nwhile read -r in out; do\n  [ -n \"$in\" ] || continue\n  {COUNT_WORDS}\ndone < \"$1\"\n"
    );
    write_script(dir, "WordFreqCmdMulti.sh", &body)
}

/// Reducer: `ReduceWordFreqCmd.sh <output_dir> <redout>` sums the counts of
/// every file under `output_dir` and writes them sorted by word.
pub fn word_freq_reducer(dir: &Path) -> Result<String> {
    let body = "#!/bin/bash\nexport LC_ALL=C\n\
find \"$1\" -type f -print0 | sort -z | xargs -0 -r cat | \
awk 'NF == 2 { c[$1] += $2 } END { for (w in c) print w, c[w] }' | sort > \"$2\"\n";
    write_script(dir, "ReduceWordFreqCmd.sh", body)
}

/// Upper-cases its input: `UpcaseCmd.sh <input> <output>`.
pub fn upcase_mapper(dir: &Path) -> Result<String> {
    write_script(
        dir,
        "UpcaseCmd.sh",
        "#!/bin/bash\ntr 'a-z' 'A-Z' < \"$1\" > \"$2\"\n",
    )
}

/// Manifest-driven upper-caser: `UpcaseCmdMulti.sh <manifest>`.
pub fn upcase_mapper_multi(dir: &Path) -> Result<String> {
    write_script(
        dir,
        "UpcaseCmdMulti.sh",
        "#!/bin/bash\nwhile read -r in out; do\n  tr 'a-z' 'A-Z' < \"$in\" > \"$out\"\ndone < \"$1\"\n",
    )
}

const VOCABULARY: &[&str] = &[
    "array", "block", "cluster", "cyclic", "data", "file", "grid", "job", "launch", "map",
    "node", "output", "parallel", "reduce", "scheduler", "script", "task", "the", "of", "and",
];

/// Writes `files` deterministic text files `text_01.txt`, ... into `dir`.
pub fn word_corpus(dir: &Path, files: usize, seed: u64) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let mut rng = StdRng::seed_from_u64(seed);
    let width = files.to_string().len().max(2);
    for i in 1..=files {
        let words = rng.gen_range(20..200);
        let mut text = String::new();
        for w in 0..words {
            let word = VOCABULARY[rng.gen_range(0..VOCABULARY.len())];
            if rng.gen_bool(0.1) {
                let mut cap = word.to_string();
                cap[..1].make_ascii_uppercase();
                text.push_str(&cap);
            } else {
                text.push_str(word);
            }
            text.push(if w % 12 == 11 { '\n' } else if rng.gen_bool(0.1) { ',' } else { ' ' });
        }
        text.push('\n');
        let path = dir.join(format!("text_{i:0width$}.txt"));
        fs::write(&path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    }
    Ok(())
}
