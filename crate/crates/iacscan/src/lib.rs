//! Security-smell analysis for infrastructure-as-code scripts.
//!
//! `iacscan` parses Ansible playbooks, Chef recipes, and Puppet manifests into
//! a single technology-agnostic intermediate representation (IR) and runs nine
//! pattern-based security checks over it — things like hard-coded secrets,
//! empty passwords, binding to `0.0.0.0`, or downloads without an integrity
//! check. Every finding is reported with the file path and 1-based line of the
//! offending node, and corpus-level metrics (smell density per KLOC, share of
//! affected scripts) can be computed over whole directory trees.
//!
//! The pipeline is strictly layered and each layer is usable on its own:
//!
//! 1. [`discovery`] walks input paths, classifies files by technology, and
//!    assembles a [`ir::Project`] via the per-technology frontends.
//! 2. [`frontend`] holds the three parsers; each turns one script into an
//!    [`ir::UnitBlock`] without any smell knowledge.
//! 3. [`engine`] applies the detection rules to every IR node reachable from a
//!    root, driven by the keyword/regex sets in [`config::PatternConfig`].
//! 4. [`report`] sorts, serializes (CSV/JSON), and computes corpus metrics.
//!
//! # Examples
//!
//! The `examples/` directory is the guided tour; each file is runnable on the
//! demo scripts shipped under `examples/data/`:
//!
//! * `scan_dir` — end-to-end scan of a directory, findings printed as CSV:
//!   `cargo run --example scan_dir`
//! * `dump_ir` — parse one script and pretty-print its IR as JSON:
//!   `cargo run --example dump_ir`
//! * `custom_patterns` — override keyword sets from a JSON config and compare
//!   against the defaults: `cargo run --example custom_patterns`
//! * `corpus_metrics` — smell density and Script% over a corpus:
//!   `cargo run --example corpus_metrics`
//! * `filter_smells` — restrict a scan to selected smell codes:
//!   `cargo run --example filter_smells`
//!
//! # Quick start
//!
//! ```
//! use iacscan::config::PatternConfig;
//! use iacscan::discovery::TechKind;
//! use iacscan::engine;
//!
//! let source = r#"
//! user 'deploy' do
//!   password ''
//! end
//! "#;
//! let block = iacscan::frontend::chef::parse_chef("deploy.rb", source).unwrap();
//! let cfg = PatternConfig::default();
//! let reports = engine::check_tree(&block, &cfg, TechKind::Chef);
//! assert_eq!(reports.len(), 2); // empty password + hard-coded secret
//! assert_eq!(reports[0].location.line, 3);
//! ```
//!
//! The `iacscan` binary wraps the same pipeline behind a CLI; see the README
//! or `iacscan --help` for the flag reference.

pub mod cli;
pub mod config;
pub mod discovery;
pub mod engine;
pub mod frontend;
pub mod ir;
pub mod report;
