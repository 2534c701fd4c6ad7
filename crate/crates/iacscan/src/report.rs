//! Report rendering and corpus statistics.
//!
//! Reports are sorted into a stable order — path, then line, then smell
//! code — so output is byte-identical regardless of discovery order or
//! worker count. Two formats are emitted:
//!
//! * CSV with the fixed header `path,line,smell,description`;
//! * JSON with three top-level keys: `reports`, `stats`, `errors`.
//!
//! Density and percentage figures are rendered through exact integer
//! arithmetic (round-half-up at the last kept digit), never through
//! floating-point formatting, so `527` occurrences over `5_180_879` lines
//! is `0.10` per KLOC on every platform.

use std::io;

use serde::Serialize;

use crate::discovery::{Corpus, TechKind};
use crate::engine::{SmellKind, SmellReport};
use crate::frontend::ParseError;

/// Occurrences per 1000 lines, two decimals, round half-up.
///
/// Returns `N/D` when there are no lines to normalize by.
pub fn density_per_kloc(occurrences: u64, loc: u64) -> String {
    if loc == 0 {
        return "N/D".to_string();
    }
    let num = occurrences as u128 * 100_000;
    let den = loc as u128;
    let hundredths = (num * 2 + den) / (2 * den);
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

/// `100 * part / total`, one decimal, round half-up; `N/D` when `total`
/// is zero.
pub fn percent(part: u64, total: u64) -> String {
    if total == 0 {
        return "N/D".to_string();
    }
    let num = part as u128 * 1000;
    let den = total as u128;
    let tenths = (num * 2 + den) / (2 * den);
    format!("{}.{}", tenths / 10, tenths % 10)
}

/// Aggregate figures for one smell within one technology.
#[derive(Debug, Clone, Serialize)]
pub struct SmellStats {
    /// Stable smell code (`sec_hard_secret`, ...).
    pub smell: &'static str,
    /// Human-readable category name.
    pub name: &'static str,
    /// Total reports of this kind.
    pub occurrences: u64,
    /// Occurrences per 1000 LOC.
    pub density: String,
    /// Scripts with at least one occurrence.
    pub scripts: u64,
    /// Percentage of scripts with at least one occurrence.
    pub script_percent: String,
}

/// Aggregate figures for one technology.
#[derive(Debug, Clone, Serialize)]
pub struct TechStats {
    pub tech: TechKind,
    /// Successfully parsed scripts.
    pub scripts: u64,
    /// Non-blank lines across those scripts.
    pub loc: u64,
    /// One entry per smell, in canonical rule order.
    pub smells: Vec<SmellStats>,
}

/// Corpus-wide statistics: one block per technology that contributed at
/// least one parsed script, plus totals.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusStats {
    pub total_scripts: u64,
    pub total_loc: u64,
    pub total_smells: u64,
    pub techs: Vec<TechStats>,
}

/// Computes per-technology occurrence counts, densities, and
/// scripts-affected percentages from a scanned corpus and its reports.
pub fn compute_stats(corpus: &Corpus, reports: &[SmellReport]) -> CorpusStats {
    let mut techs = Vec::new();
    for tech in TechKind::ALL {
        let scripts = corpus.file_count(tech) as u64;
        if scripts == 0 {
            continue;
        }
        let loc = corpus.loc(tech) as u64;
        let mut smells = Vec::new();
        for kind in SmellKind::ALL {
            let of_kind = || {
                reports
                    .iter()
                    .filter(move |r| r.tech == tech && r.kind == kind)
            };
            let occurrences = of_kind().count() as u64;
            let mut paths: Vec<_> = of_kind().map(|r| &r.location.path).collect();
            paths.sort();
            paths.dedup();
            let with = paths.len() as u64;
            smells.push(SmellStats {
                smell: kind.code(),
                name: kind.name(),
                occurrences,
                density: density_per_kloc(occurrences, loc),
                scripts: with,
                script_percent: percent(with, scripts),
            });
        }
        techs.push(TechStats { tech, scripts, loc, smells });
    }
    CorpusStats {
        total_scripts: corpus.files.len() as u64,
        total_loc: TechKind::ALL.iter().map(|t| corpus.loc(*t) as u64).sum(),
        total_smells: reports.len() as u64,
        techs,
    }
}

/// Orders reports by path, then line, then smell code.
pub fn sort_reports(reports: &mut [SmellReport]) {
    reports.sort_by(|a, b| {
        a.location
            .path
            .cmp(&b.location.path)
            .then_with(|| a.location.line.cmp(&b.location.line))
            .then_with(|| a.kind.code().cmp(b.kind.code()))
    });
}

/// Writes the CSV report: header `path,line,smell,description`, one row
/// per report.
pub fn write_csv<W: io::Write>(writer: W, reports: &[SmellReport]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["path", "line", "smell", "description"])?;
    for r in reports {
        w.write_record([
            r.location.path.display().to_string().as_str(),
            r.location.line.to_string().as_str(),
            r.kind.code(),
            &r.message,
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    reports: &'a [SmellReport],
    stats: &'a CorpusStats,
    errors: &'a [ParseError],
}

/// Writes the JSON report: `{ "reports": [...], "stats": {...},
/// "errors": [...] }`, pretty-printed with a trailing newline.
pub fn write_json<W: io::Write>(
    mut writer: W,
    reports: &[SmellReport],
    stats: &CorpusStats,
    errors: &[ParseError],
) -> io::Result<()> {
    let doc = JsonDocument { reports, stats, errors };
    serde_json::to_writer_pretty(&mut writer, &doc)?;
    writeln!(writer)?;
    Ok(())
}

/// Renders the statistics as an aligned text table.
pub fn render_stats_text(stats: &CorpusStats) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "scripts: {}  loc: {}  smells: {}\n",
        stats.total_scripts, stats.total_loc, stats.total_smells
    ));
    out.push_str(&format!(
        "{:<8} {:<20} {:>11} {:>9} {:>8} {:>8}\n",
        "tech", "smell", "occurrences", "density", "scripts", "scripts%"
    ));
    for tech in &stats.techs {
        for s in &tech.smells {
            out.push_str(&format!(
                "{:<8} {:<20} {:>11} {:>9} {:>8} {:>8}\n",
                tech.tech.name(),
                s.smell,
                s.occurrences,
                s.density,
                s.scripts,
                s.script_percent
            ));
        }
    }
    out
}

/// Process exit status: `0` clean, `1` smells found, `2` fatal (or parse
/// errors under `--strict`).
pub fn exit_code(reports: &[SmellReport], errors: &[ParseError], strict: bool) -> i32 {
    if strict && !errors.is_empty() {
        2
    } else if !reports.is_empty() {
        1
    } else {
        0
    }
}
