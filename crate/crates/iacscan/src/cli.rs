//! Command-line front door.
//!
//! The `iacscan` binary is a thin wrapper over this module: flag parsing
//! with `clap`, then a pipeline of [`crate::discovery`] → [`crate::engine`]
//! → [`crate::report`]. Exit status: `0` no smells, `1` smells found, `2`
//! fatal error (or parse errors under `--strict`), `64` usage error.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rayon::prelude::*;

use crate::config::{default_config, load_config, PatternConfig};
use crate::discovery::{build_project, scan_path, TechKind};
use crate::engine::{check_tree_with, CheckOptions, SmellKind, SmellReport};
use crate::report::{
    compute_stats, exit_code, render_stats_text, sort_reports, write_csv, write_json,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `path,line,smell,description` rows.
    Csv,
    /// `{ "reports": [...], "stats": {...}, "errors": [...] }`.
    Json,
}

/// How aggressively names are matched against keyword sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    /// Token-based name matching, substring value matching.
    Default,
    /// Token-based matching on values and auxiliary name checks too;
    /// fewer findings, higher precision.
    StrictNames,
}

#[derive(Debug, Parser)]
#[command(
    name = "iacscan",
    version,
    about = "Finds security smells in Ansible, Chef, and Puppet scripts."
)]
pub struct Cli {
    /// File or directory to scan.
    pub path: PathBuf,

    /// Treat every script as this technology (default: infer from the
    /// file extension; directories scan all three).
    #[arg(long, value_parser = parse_tech)]
    pub tech: Option<TechKind>,

    /// JSON file with keyword-set overrides for the detection patterns.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Comma-separated smell codes to report (default: all nine).
    #[arg(long, value_name = "CODES", value_delimiter = ',')]
    pub smells: Vec<String>,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,

    /// Print per-technology statistics (occurrences, density per KLOC,
    /// affected scripts) to stderr.
    #[arg(long)]
    pub stats: bool,

    /// Restrict the missing-default-case rule to switch statements.
    #[arg(long)]
    pub strict_case: bool,

    /// Worker threads for the analysis phase (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,

    /// Dump the parsed intermediate representation as JSON instead of
    /// analyzing it.
    #[arg(long)]
    pub dump_ir: bool,

    /// Exit 2 if any discovered script fails to parse.
    #[arg(long)]
    pub strict: bool,

    /// Matching profile.
    #[arg(long, value_enum, default_value_t = Profile::Default)]
    pub profile: Profile,
}

fn parse_tech(s: &str) -> Result<TechKind, String> {
    s.parse()
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn run_main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(&cli),
        Err(e) => {
            use clap::error::ErrorKind;
            let usage_ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            if usage_ok {
                0
            } else {
                64
            }
        }
    }
}

fn with_output<F>(path: Option<&Path>, f: F) -> io::Result<()>
where
    F: FnOnce(&mut dyn io::Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let mut file = fs::File::create(p)?;
            f(&mut file)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}

/// Runs one scan with parsed options; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let cfg: PatternConfig = match &cli.config {
        Some(path) => match load_config(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        },
        None => default_config(),
    };

    // Validate the smell filter before any work happens.
    let mut filter: Vec<SmellKind> = Vec::new();
    for code in &cli.smells {
        let code = code.trim();
        match SmellKind::from_code(code) {
            Some(kind) => filter.push(kind),
            None => {
                let valid: Vec<&str> = SmellKind::ALL.iter().map(|k| k.code()).collect();
                eprintln!(
                    "error: unknown smell code `{code}` (valid codes: {})",
                    valid.join(", ")
                );
                return 64;
            }
        }
    }

    let corpus = match scan_path(&cli.path, cli.tech) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    for err in &corpus.errors {
        eprintln!("warning: {err}");
    }

    if cli.dump_ir {
        let project = build_project(&corpus);
        let rendered = match serde_json::to_string_pretty(&project) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        };
        if let Err(e) = with_output(cli.output.as_deref(), |w| {
            w.write_all(rendered.as_bytes())?;
            writeln!(w)
        }) {
            eprintln!("error: {e}");
            return 2;
        }
        return if cli.strict && !corpus.errors.is_empty() { 2 } else { 0 };
    }

    let opts = CheckOptions {
        strict_case: cli.strict_case,
        strict_names: cli.profile == Profile::StrictNames,
    };

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut reports: Vec<SmellReport> = pool.install(|| {
        corpus
            .files
            .par_iter()
            .map(|file| check_tree_with(&file.block, &cfg, file.tech, opts))
            .reduce(Vec::new, |mut acc, chunk| {
                acc.extend(chunk);
                acc
            })
    });

    if !filter.is_empty() {
        reports.retain(|r| filter.contains(&r.kind));
    }
    sort_reports(&mut reports);
    let stats = compute_stats(&corpus, &reports);

    let written = match cli.format {
        Format::Csv => with_output(cli.output.as_deref(), |w| write_csv(w, &reports)),
        Format::Json => with_output(cli.output.as_deref(), |w| {
            write_json(w, &reports, &stats, &corpus.errors)
        }),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if cli.stats {
        eprint!("{}", render_stats_text(&stats));
    }

    exit_code(&reports, &corpus.errors, cli.strict)
}
