//! Override the keyword sets from a JSON config and compare the findings
//! against the defaults on the same script.
//!
//! The bundled `patterns.json` narrows the suspicious-comment words (so
//! `TODO` no longer counts), whitelists an internal HTTP endpoint, and adds
//! `apikey`/`license_key` to the secret-name set:
//!
//! ```text
//! cargo run --example custom_patterns
//! ```

use std::path::Path;

use iacscan::config::{default_config, load_config};
use iacscan::discovery::{classify_path, parse_file};
use iacscan::engine::{check_tree, SmellReport};
use iacscan::report::sort_reports;

fn describe(label: &str, reports: &[SmellReport]) {
    println!("{label}: {} finding(s)", reports.len());
    for r in reports {
        println!("  line {:>2}  {:<20} {}", r.location.line, r.kind.code(), r.message);
    }
}

fn main() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let script = data.join("playbook.yml");
    let tech = classify_path(&script).expect("demo script has a known extension");
    let source = std::fs::read_to_string(&script).expect("demo script is readable");
    let block = parse_file(&script, &source, tech).expect("demo script parses");

    // Any subset of the sets may be overridden; the rest keep their defaults.
    let custom = load_config(data.join("patterns.json")).expect("override file is valid");
    let default = default_config();

    println!(
        "suspicious-comment words: default {:?} -> custom {:?}",
        default.has_wrong_words(),
        custom.has_wrong_words()
    );
    println!(
        "http whitelist:           default {:?} -> custom {:?}\n",
        default.has_http_whitelist(),
        custom.has_http_whitelist()
    );

    let mut with_default = check_tree(&block, &default, tech);
    let mut with_custom = check_tree(&block, &custom, tech);
    sort_reports(&mut with_default);
    sort_reports(&mut with_custom);

    describe("default patterns", &with_default);
    println!();
    describe("custom patterns ", &with_custom);
}
