//! Restrict a scan to selected smell codes — the library analogue of the
//! CLI's `--smells sec_hard_secret,sec_http_no_tls`.
//!
//! ```text
//! cargo run --example filter_smells [CODE,...]
//! ```

use std::path::Path;

use iacscan::config::default_config;
use iacscan::discovery::scan_path;
use iacscan::engine::{check_tree, SmellKind, SmellReport};
use iacscan::report::{sort_reports, write_csv};

fn main() -> std::io::Result<()> {
    let selection = std::env::args().nth(1).unwrap_or_else(|| {
        "sec_hard_secret,sec_http_no_tls".to_string()
    });
    let wanted: Vec<SmellKind> = selection
        .split(',')
        .map(|code| {
            SmellKind::from_code(code.trim()).unwrap_or_else(|| {
                eprintln!(
                    "unknown smell code {code:?}; valid codes: {}",
                    SmellKind::ALL.map(|k| k.code()).join(", ")
                );
                std::process::exit(64);
            })
        })
        .collect();

    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let corpus = scan_path(&root, None)?;
    let cfg = default_config();

    // The engine always evaluates every rule; filtering is a cheap
    // post-processing step on the report list, so one scan can serve many
    // different views of the findings.
    let mut reports: Vec<SmellReport> = corpus
        .files
        .iter()
        .flat_map(|file| check_tree(&file.block, &cfg, file.tech))
        .filter(|r| wanted.contains(&r.kind))
        .collect();
    sort_reports(&mut reports);

    eprintln!("showing only: {selection}");
    write_csv(std::io::stdout().lock(), &reports)
}
