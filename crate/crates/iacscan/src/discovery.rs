//! File discovery and corpus assembly.
//!
//! Walks a directory tree (or takes a single file), decides which
//! technology each script belongs to, parses it with the matching
//! frontend, and groups the results into a [`Project`] using the layout
//! conventions of each ecosystem:
//!
//! * a directory containing a `tasks/` or `vars/` subdirectory is an
//!   Ansible role/module;
//! * a directory containing `recipes/` is a Chef cookbook;
//! * a directory containing `manifests/` is a Puppet module.
//!
//! The walk is deterministic (lexicographic by file name), never follows
//! symlinks, and skips hidden files and directories. Files that fail to
//! parse are excluded from the corpus and surface as [`ParseError`]s so a
//! single malformed script cannot hide the rest of a repository.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use walkdir::WalkDir;

use crate::frontend::{ansible, chef, puppet, ParseError};
use crate::ir::{Module, Project, UnitBlock};

/// The configuration technology a script is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TechKind {
    Ansible,
    Chef,
    Puppet,
}

impl TechKind {
    pub const ALL: [TechKind; 3] = [TechKind::Ansible, TechKind::Chef, TechKind::Puppet];

    pub fn name(self) -> &'static str {
        match self {
            TechKind::Ansible => "ansible",
            TechKind::Chef => "chef",
            TechKind::Puppet => "puppet",
        }
    }

    /// File extensions claimed by this technology.
    pub fn extensions(self) -> &'static [&'static str] {
        match self {
            TechKind::Ansible => &["yml", "yaml"],
            TechKind::Chef => &["rb"],
            TechKind::Puppet => &["pp"],
        }
    }

    /// Subdirectory names that mark a directory as a module of this
    /// technology.
    fn module_markers(self) -> &'static [&'static str] {
        match self {
            TechKind::Ansible => &["tasks", "vars"],
            TechKind::Chef => &["recipes"],
            TechKind::Puppet => &["manifests"],
        }
    }
}

impl fmt::Display for TechKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TechKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "ansible" => Ok(TechKind::Ansible),
            "chef" => Ok(TechKind::Chef),
            "puppet" => Ok(TechKind::Puppet),
            other => Err(format!(
                "unknown technology `{other}` (expected ansible, chef, or puppet)"
            )),
        }
    }
}

impl Serialize for TechKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Maps a path to a technology by extension.
pub fn classify_path(path: &Path) -> Option<TechKind> {
    let ext = path.extension()?.to_str()?.to_lowercase();
    TechKind::ALL
        .into_iter()
        .find(|tech| tech.extensions().contains(&ext.as_str()))
}

/// Parses one script with the frontend for `tech`.
pub fn parse_file(path: &Path, source: &str, tech: TechKind) -> Result<UnitBlock, ParseError> {
    match tech {
        TechKind::Ansible => ansible::parse_ansible(path, source),
        TechKind::Chef => chef::parse_chef(path, source),
        TechKind::Puppet => puppet::parse_puppet(path, source),
    }
}

/// One successfully parsed script.
#[derive(Debug)]
pub struct ScannedFile {
    pub path: PathBuf,
    pub tech: TechKind,
    /// Non-blank source lines, the denominator for density metrics.
    pub loc: usize,
    pub block: UnitBlock,
}

/// Everything a scan produced: parsed files plus the errors for files
/// that were recognized but rejected by their frontend.
#[derive(Debug, Default)]
pub struct Corpus {
    pub root: PathBuf,
    pub files: Vec<ScannedFile>,
    pub errors: Vec<ParseError>,
}

impl Corpus {
    /// Lines of successfully parsed code for one technology.
    pub fn loc(&self, tech: TechKind) -> usize {
        self.files
            .iter()
            .filter(|f| f.tech == tech)
            .map(|f| f.loc)
            .sum()
    }

    pub fn file_count(&self, tech: TechKind) -> usize {
        self.files.iter().filter(|f| f.tech == tech).count()
    }
}

fn count_loc(source: &str) -> usize {
    source.lines().filter(|l| !l.trim().is_empty()).count()
}

fn is_hidden(entry: &walkdir::DirEntry) -> bool {
    entry.depth() > 0
        && entry
            .file_name()
            .to_str()
            .map(|s| s.starts_with('.'))
            .unwrap_or(false)
}

/// Lists the candidate script files under `root` in deterministic
/// (lexicographic) order. With a `tech` override only that technology's
/// extensions are considered.
pub fn discover_files(root: &Path, tech: Option<TechKind>) -> io::Result<Vec<(PathBuf, TechKind)>> {
    if root.is_file() {
        let assigned = match tech {
            Some(t) => t,
            None => classify_path(root).ok_or_else(|| {
                io::Error::new(
                    io::ErrorKind::InvalidInput,
                    format!(
                        "cannot infer a technology for `{}`; pass --tech",
                        root.display()
                    ),
                )
            })?,
        };
        return Ok(vec![(root.to_path_buf(), assigned)]);
    }
    if !root.is_dir() {
        return Err(io::Error::new(
            io::ErrorKind::NotFound,
            format!("no such file or directory: `{}`", root.display()),
        ));
    }

    let mut out = Vec::new();
    let walker = WalkDir::new(root)
        .follow_links(false)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| !is_hidden(e));
    for entry in walker {
        let entry = entry.map_err(|e| {
            io::Error::new(io::ErrorKind::Other, format!("walk failed: {e}"))
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let Some(by_ext) = classify_path(entry.path()) else { continue };
        match tech {
            Some(t) if by_ext != t => continue,
            _ => {}
        }
        out.push((entry.into_path(), by_ext));
    }
    Ok(out)
}

/// Discovers, reads, and parses every script under `root`.
///
/// Unreadable files and parse failures both land in [`Corpus::errors`];
/// only successfully parsed scripts contribute blocks and LOC.
pub fn scan_path(root: &Path, tech: Option<TechKind>) -> io::Result<Corpus> {
    let files = discover_files(root, tech)?;
    let mut corpus = Corpus {
        root: root.to_path_buf(),
        files: Vec::new(),
        errors: Vec::new(),
    };
    for (path, file_tech) in files {
        match fs::read(&path) {
            Ok(bytes) => {
                let source = String::from_utf8_lossy(&bytes);
                match parse_file(&path, &source, file_tech) {
                    Ok(block) => corpus.files.push(ScannedFile {
                        loc: count_loc(&source),
                        path,
                        tech: file_tech,
                        block,
                    }),
                    Err(err) => corpus.errors.push(err),
                }
            }
            Err(e) => corpus
                .errors
                .push(ParseError::new(&path, 1, format!("read error: {e}"))),
        }
    }
    Ok(corpus)
}

fn dir_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// The shallowest ancestor of `file` (starting at `root` itself) that
/// looks like a module directory for `tech`.
fn module_root(file: &Path, root: &Path, tech: TechKind) -> Option<PathBuf> {
    let rel = file.strip_prefix(root).ok()?;
    let mut current = root.to_path_buf();
    let mut candidates = vec![current.clone()];
    let components: Vec<_> = rel.components().collect();
    for comp in components.iter().take(components.len().saturating_sub(1)) {
        current = current.join(comp);
        candidates.push(current.clone());
    }
    candidates.into_iter().find(|dir| {
        tech.module_markers()
            .iter()
            .any(|marker| dir.join(marker).is_dir())
    })
}

/// Organizes parsed blocks into a [`Project`]: blocks inside recognized
/// module directories group into [`Module`]s (named after the directory),
/// everything else hangs off the project root.
pub fn build_project(corpus: &Corpus) -> Project {
    let mut project = Project::new(dir_name(&corpus.root));
    let mut modules: Vec<(PathBuf, Module)> = Vec::new();
    for file in &corpus.files {
        match module_root(&file.path, &corpus.root, file.tech) {
            Some(dir) => {
                let module = match modules.iter_mut().find(|(d, _)| *d == dir) {
                    Some((_, m)) => m,
                    None => {
                        modules.push((dir.clone(), Module::new(dir_name(&dir))));
                        &mut modules.last_mut().expect("just pushed").1
                    }
                };
                module.blocks.push(file.block.clone());
            }
            None => project.blocks.push(file.block.clone()),
        }
    }
    modules.sort_by(|(a, _), (b, _)| a.cmp(b));
    project.modules = modules.into_iter().map(|(_, m)| m).collect();
    project
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(path: &Path, content: &str) {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).unwrap();
        }
        fs::write(path, content).unwrap();
    }

    #[test]
    fn extensions_route_to_the_right_frontend() {
        assert_eq!(classify_path(Path::new("a/site.pp")), Some(TechKind::Puppet));
        assert_eq!(classify_path(Path::new("a/default.rb")), Some(TechKind::Chef));
        assert_eq!(classify_path(Path::new("a/main.yml")), Some(TechKind::Ansible));
        assert_eq!(classify_path(Path::new("a/main.YAML")), Some(TechKind::Ansible));
        assert_eq!(classify_path(Path::new("a/readme.md")), None);
        assert_eq!(classify_path(Path::new("Makefile")), None);
    }

    #[test]
    fn tech_names_round_trip() {
        for tech in TechKind::ALL {
            assert_eq!(tech.name().parse::<TechKind>().unwrap(), tech);
        }
        assert_eq!("Chef".parse::<TechKind>().unwrap(), TechKind::Chef);
        assert!("terraform".parse::<TechKind>().is_err());
    }

    #[test]
    fn walks_in_lexicographic_order_and_skips_hidden() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path();
        write(&root.join("b.yml"), "x: 1\n");
        write(&root.join("a.yml"), "x: 1\n");
        write(&root.join(".hidden/also.yml"), "x: 1\n");
        write(&root.join(".secret.yml"), "x: 1\n");
        write(&root.join("sub/c.pp"), "$x = 1\n");

        let files = discover_files(root, None).unwrap();
        let rel: Vec<_> = files
            .iter()
            .map(|(p, _)| p.strip_prefix(root).unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(rel, ["a.yml", "b.yml", "sub/c.pp"]);
    }

    #[test]
    fn tech_override_narrows_discovery() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path();
        write(&root.join("a.yml"), "x: 1\n");
        write(&root.join("b.rb"), "package 'x'\n");
        let files = discover_files(root, Some(TechKind::Chef)).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].1, TechKind::Chef);
    }

    #[test]
    fn single_files_use_extension_or_override() {
        let tmp = tempfile::tempdir().unwrap();
        let file = tmp.path().join("main.yml");
        write(&file, "x: 1\n");
        let files = discover_files(&file, None).unwrap();
        assert_eq!(files[0].1, TechKind::Ansible);

        let odd = tmp.path().join("playbook.txt");
        write(&odd, "x: 1\n");
        assert!(discover_files(&odd, None).is_err());
        let files = discover_files(&odd, Some(TechKind::Ansible)).unwrap();
        assert_eq!(files[0].1, TechKind::Ansible);
    }

    #[test]
    fn parse_failures_become_errors_not_panics() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path();
        write(&root.join("good.pp"), "$x = 1\n");
        write(&root.join("bad.pp"), "$x = 'unterminated\n");
        let corpus = scan_path(root, None).unwrap();
        assert_eq!(corpus.files.len(), 1);
        assert_eq!(corpus.errors.len(), 1);
        assert!(corpus.errors[0].message.contains("unterminated"));
    }

    #[test]
    fn loc_counts_non_blank_lines_of_parsed_files_only() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path();
        write(&root.join("a.pp"), "$x = 1\n\n$y = 2\n");
        write(&root.join("bad.pp"), "$oops = 'x\n");
        let corpus = scan_path(root, None).unwrap();
        assert_eq!(corpus.loc(TechKind::Puppet), 2);
        assert_eq!(corpus.file_count(TechKind::Puppet), 1);
    }

    #[test]
    fn module_conventions_group_blocks() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path();
        write(&root.join("roles/web/tasks/main.yml"), "- name: t\n  ping:\n");
        write(&root.join("roles/web/vars/main.yml"), "a: 1\n");
        write(&root.join("cookbooks/db/recipes/default.rb"), "package 'mysql'\n");
        write(&root.join("modules/fw/manifests/init.pp"), "$x = 1\n");
        write(&root.join("site.pp"), "$top = 1\n");

        let corpus = scan_path(root, None).unwrap();
        let project = build_project(&corpus);

        let module_names: Vec<&str> =
            project.modules.iter().map(|m| m.name.as_str()).collect();
        assert_eq!(module_names, ["db", "fw", "web"]);
        let web = project.modules.iter().find(|m| m.name == "web").unwrap();
        assert_eq!(web.blocks.len(), 2);
        // site.pp is not inside any module.
        assert_eq!(project.blocks.len(), 1);
        assert_eq!(project.name, dir_name(root));
    }

    #[test]
    fn the_shallowest_module_directory_wins() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path();
        // `outer` has tasks/, and a nested role dir also has tasks/.
        write(&root.join("outer/tasks/main.yml"), "- ping:\n");
        write(
            &root.join("outer/roles/inner/tasks/main.yml"),
            "- ping:\n",
        );
        let corpus = scan_path(root, None).unwrap();
        let project = build_project(&corpus);
        assert_eq!(project.modules.len(), 1);
        assert_eq!(project.modules[0].name, "outer");
        assert_eq!(project.modules[0].blocks.len(), 2);
    }
}
