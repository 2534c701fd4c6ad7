//! End-to-end directory scan: discover scripts, parse each into the IR, run
//! all nine checks, and print the findings as CSV (the same format the CLI
//! emits by default).
//!
//! Run with an explicit directory, or let it scan the bundled demo scripts:
//!
//! ```text
//! cargo run --example scan_dir [DIR]
//! ```

use std::path::{Path, PathBuf};

use iacscan::config::default_config;
use iacscan::discovery::scan_path;
use iacscan::engine::{check_tree, SmellReport};
use iacscan::report::{exit_code, sort_reports, write_csv};

fn main() -> std::io::Result<()> {
    let root = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data")
    });

    // Discovery: walk the tree, classify by extension, parse everything.
    // Files that fail to parse land in `corpus.errors` instead of aborting.
    let corpus = scan_path(&root, None)?;
    eprintln!(
        "scanned {} script(s) under {} ({} parse error(s))",
        corpus.files.len(),
        root.display(),
        corpus.errors.len()
    );
    for err in &corpus.errors {
        eprintln!("  skipped {}: {}", err.path.display(), err.message);
    }

    // Analysis: the engine is pure — it maps an IR tree to a report list.
    let cfg = default_config();
    let mut reports: Vec<SmellReport> = corpus
        .files
        .iter()
        .flat_map(|file| check_tree(&file.block, &cfg, file.tech))
        .collect();

    // Reporting: deterministic order (path, line, smell code), CSV on stdout.
    sort_reports(&mut reports);
    write_csv(std::io::stdout().lock(), &reports)?;

    std::process::exit(exit_code(&reports, &corpus.errors, false));
}
