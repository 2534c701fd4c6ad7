//! Corpus-level metrics: per-technology smell occurrences, density per
//! thousand lines of code, and the share of scripts affected by each smell.
//!
//! ```text
//! cargo run --example corpus_metrics [DIR]
//! ```

use std::path::{Path, PathBuf};

use iacscan::config::default_config;
use iacscan::discovery::scan_path;
use iacscan::engine::{check_tree, SmellReport};
use iacscan::report::{compute_stats, render_stats_text};

fn main() -> std::io::Result<()> {
    let root = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data")
    });

    let corpus = scan_path(&root, None)?;
    let cfg = default_config();
    let reports: Vec<SmellReport> = corpus
        .files
        .iter()
        .flat_map(|file| check_tree(&file.block, &cfg, file.tech))
        .collect();

    // `compute_stats` aggregates per technology: occurrences, density per
    // KLOC (occurrences / LOC x 1000, two decimals), and the percentage of
    // scripts with at least one occurrence (one decimal). Smells with no
    // occurrences keep a row so "this corpus is clean of X" stays visible.
    let stats = compute_stats(&corpus, &reports);
    print!("{}", render_stats_text(&stats));
    Ok(())
}
