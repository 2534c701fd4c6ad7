//! Per-technology parsers lowering scripts to the shared IR.
//!
//! Each frontend accepts one file's text and produces a file-level
//! [`UnitBlock`](crate::ir::UnitBlock) — or a [`ParseError`] that the caller
//! records without aborting anything else. Frontends know nothing about
//! smells; they only decide structure, value typing, and the
//! `has_variable` flag.

pub mod ansible;
pub mod chef;
pub mod puppet;

use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

/// A file the analyzer had to give up on. Never fatal: the file simply
/// contributes zero nodes (and therefore zero findings).
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{}:{line}: {message}", path.display())]
pub struct ParseError {
    pub path: PathBuf,
    /// 1-based line closest to the failure; 1 when unknown.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        ParseError { path: path.into(), line: line.max(1), message: message.into() }
    }
}

/// Name a file-level block after the file itself.
fn file_block_name(path: &std::path::Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Nesting depth cap shared by the three frontends; inputs deeper than this
/// are rejected as parse errors rather than risking unbounded recursion.
const MAX_DEPTH: usize = 128;
