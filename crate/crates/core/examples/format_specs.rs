//! Rewrites `.p6` files in canonical form.
//!
//! ```text
//! cargo run --example format_specs -- data            # rewrite in place
//! cargo run --example format_specs -- --check data    # report only
//! ```

use std::path::PathBuf;
use std::process::ExitCode;

use p6groups::dsl::{parse, serialize};

fn main() -> ExitCode {
    let mut check = false;
    let mut dirs = Vec::new();
    for arg in std::env::args().skip(1) {
        match arg.as_str() {
            "--check" => check = true,
            _ => dirs.push(PathBuf::from(arg)),
        }
    }
    if dirs.is_empty() {
        dirs.push(PathBuf::from("data"));
    }
    let mut dirty = 0;
    for dir in dirs {
        let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
            .expect("readable directory")
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "p6"))
            .collect();
        files.sort();
        for path in files {
            let text = std::fs::read_to_string(&path).unwrap();
            let file = match parse(&text) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("{}:\n{e}", path.display());
                    return ExitCode::from(2);
                }
            };
            let canonical = serialize(&file);
            assert_eq!(parse(&canonical).as_ref(), Ok(&file), "{} does not round-trip", path.display());
            if canonical != text {
                dirty += 1;
                println!("{}{}", if check { "would reformat " } else { "reformatted " }, path.display());
                if !check {
                    std::fs::write(&path, canonical).unwrap();
                }
            }
        }
    }
    if check && dirty > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
