//! Parse one script and pretty-print its intermediate representation as
//! JSON — the quickest way to see how a playbook, recipe, or manifest maps
//! onto blocks, atomic units, attributes, variables, comments, and
//! condition chains.
//!
//! ```text
//! cargo run --example dump_ir [SCRIPT]
//! ```

use std::path::{Path, PathBuf};

use iacscan::discovery::{classify_path, parse_file};

fn main() {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/playbook.yml")
    });

    let tech = classify_path(&path).unwrap_or_else(|| {
        eprintln!(
            "cannot classify {}: expected a .yml/.yaml, .rb, or .pp file",
            path.display()
        );
        std::process::exit(64);
    });

    let source = std::fs::read_to_string(&path).unwrap_or_else(|e| {
        eprintln!("cannot read {}: {e}", path.display());
        std::process::exit(2);
    });

    match parse_file(&path, &source, tech) {
        Ok(block) => {
            println!("{}", serde_json::to_string_pretty(&block).expect("IR serializes"));
        }
        Err(err) => {
            eprintln!("parse error at {}:{}: {}", err.path.display(), err.line, err.message);
            std::process::exit(2);
        }
    }
}
