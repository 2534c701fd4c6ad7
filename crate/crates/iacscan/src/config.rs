//! Keyword and regex sets that parameterize every detection rule.
//!
//! Each rule asks questions like "does this name look like a password?" or
//! "does this value look like a download URL?". The answers come from
//! thirteen configurable *pattern sets* bundled in [`PatternConfig`]. Sets
//! are disjunctive: one matching entry is enough.
//!
//! Two matching granularities are used deliberately:
//!
//! * **names** match per *token* — `name_matches` splits the identifier on
//!   non-alphanumeric characters, so the keyword `pass` flags
//!   `server_pass_field` but not `bypass`;
//! * **values** match per *substring* — `value_matches` so the keyword
//!   `0.0.0.0` still flags `"0.0.0.0:8080"`.
//!
//! All matching is case-insensitive. `is_download` is the one set holding
//! regexes instead of keywords; its patterns are applied to the lowercased
//! value text.

use std::fs;
use std::path::{Path, PathBuf};

use regex::Regex;
use serde::Deserialize;
use thiserror::Error;

use crate::ir::Value;

/// Extensions considered "fetched artifacts" by the default download
/// patterns. Each becomes the regex `(http|https|www).*\.<ext>$`.
const DOWNLOAD_EXTENSIONS: [&str; 15] = [
    "iso", "tar\\.gz", "tgz", "tar", "gz", "zip", "deb", "rpm", "sh", "run", "bin", "exe",
    "msi", "dmg", "pkg",
];

/// The thirteen pattern sets, immutable once constructed.
///
/// Build one with [`PatternConfig::default`] (the built-in profile) or
/// [`load_config`] / [`PatternConfig::from_json`] to override individual
/// sets from a JSON object.
#[derive(Debug, Clone)]
pub struct PatternConfig {
    is_user: Vec<String>,
    is_role: Vec<String>,
    is_admin: Vec<String>,
    is_password: Vec<String>,
    is_secret: Vec<String>,
    is_invalid_bind: Vec<String>,
    has_wrong_words: Vec<String>,
    has_http: Vec<String>,
    has_http_whitelist: Vec<String>,
    is_download: Vec<String>,
    is_checksum: Vec<String>,
    is_weak_crypt: Vec<String>,
    has_weak_crypt_whitelist: Vec<String>,
    /// `is_download` compiled once; kept in sync by construction.
    download_regexes: Vec<Regex>,
}

/// Why a configuration file could not be turned into a [`PatternConfig`].
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file not found: {0}")]
    NotFound(PathBuf),
    #[error("failed to read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config {source_name}: {message}")]
    Malformed { source_name: String, message: String },
}

/// JSON shape of a config file: any subset of the thirteen set names.
/// Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Overrides {
    is_user: Option<Vec<String>>,
    is_role: Option<Vec<String>>,
    is_admin: Option<Vec<String>>,
    is_password: Option<Vec<String>>,
    is_secret: Option<Vec<String>>,
    is_invalid_bind: Option<Vec<String>>,
    has_wrong_words: Option<Vec<String>>,
    has_http: Option<Vec<String>>,
    has_http_whitelist: Option<Vec<String>>,
    is_download: Option<Vec<String>>,
    is_checksum: Option<Vec<String>>,
    is_weak_crypt: Option<Vec<String>>,
    has_weak_crypt_whitelist: Option<Vec<String>>,
}

fn keywords(entries: &[&str]) -> Vec<String> {
    entries.iter().map(|s| s.to_string()).collect()
}

/// The built-in "improved" profile.
pub fn default_config() -> PatternConfig {
    let is_download: Vec<String> = DOWNLOAD_EXTENSIONS
        .iter()
        .map(|ext| format!("(http|https|www).*\\.{ext}$"))
        .collect();
    let download_regexes = compile_downloads(&is_download)
        .expect("built-in download patterns compile");
    PatternConfig {
        is_user: keywords(&["user", "usr", "uname", "username", "login", "userid", "loginid"]),
        is_role: Vec::new(),
        is_admin: keywords(&["admin", "root"]),
        is_password: keywords(&[
            "pass", "pwd", "password", "passwd", "passno", "pass-no", "passphrase",
        ]),
        is_secret: keywords(&[
            "auth_token",
            "authetication_token",
            "auth token",
            "secret",
            "ssh_key",
            "md5",
            "rsa",
            "ssl",
            "key",
            "crypt",
            "certificate",
            "token",
        ]),
        is_invalid_bind: keywords(&["0.0.0.0"]),
        has_wrong_words: keywords(&[
            "bug", "debug", "todo", "to-do", "hack", "solve", "fixme", "xxx", "workaround",
            "issue", "problem",
        ]),
        has_http: keywords(&["http"]),
        has_http_whitelist: keywords(&["localhost", "127.0.0.1"]),
        is_download,
        is_checksum: keywords(&["gpg", "checksum"]),
        is_weak_crypt: keywords(&["md5", "sha1", "arcfour"]),
        has_weak_crypt_whitelist: keywords(&["checksum"]),
        download_regexes,
    }
}

impl Default for PatternConfig {
    fn default() -> Self {
        default_config()
    }
}

fn compile_downloads(patterns: &[String]) -> Result<Vec<Regex>, String> {
    patterns
        .iter()
        .map(|p| Regex::new(p).map_err(|e| format!("invalid regex {p:?} in `is_download`: {e}")))
        .collect()
}

/// Lowercases and validates one keyword set from an override file.
fn normalize_keywords(key: &str, entries: Vec<String>) -> Result<Vec<String>, String> {
    entries
        .into_iter()
        .map(|entry| {
            if entry.trim().is_empty() {
                Err(format!("empty entry in set `{key}`"))
            } else {
                Ok(entry.to_lowercase())
            }
        })
        .collect()
}

impl PatternConfig {
    /// Parses a JSON object overriding any subset of the pattern sets;
    /// everything left unnamed keeps its default. An empty document keeps
    /// all defaults.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Self::from_json_named(text, "<string>")
    }

    fn from_json_named(text: &str, source_name: &str) -> Result<Self, ConfigError> {
        let malformed = |message: String| ConfigError::Malformed {
            source_name: source_name.to_string(),
            message,
        };
        let overrides: Overrides = if text.trim().is_empty() {
            Overrides::default()
        } else {
            serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?
        };

        let mut cfg = default_config();
        macro_rules! apply {
            ($field:ident) => {
                if let Some(entries) = overrides.$field {
                    cfg.$field = normalize_keywords(stringify!($field), entries)
                        .map_err(&malformed)?;
                }
            };
        }
        apply!(is_user);
        apply!(is_role);
        apply!(is_admin);
        apply!(is_password);
        apply!(is_secret);
        apply!(is_invalid_bind);
        apply!(has_wrong_words);
        apply!(has_http);
        apply!(has_http_whitelist);
        apply!(is_checksum);
        apply!(is_weak_crypt);
        apply!(has_weak_crypt_whitelist);
        // Download entries are regexes, not keywords: no lowercasing (it
        // would corrupt classes like \S), but they must compile and be
        // non-empty.
        if let Some(entries) = overrides.is_download {
            if entries.iter().any(|e| e.trim().is_empty()) {
                return Err(malformed("empty entry in set `is_download`".into()));
            }
            cfg.download_regexes = compile_downloads(&entries).map_err(malformed)?;
            cfg.is_download = entries;
        }
        Ok(cfg)
    }

    pub fn is_user(&self) -> &[String] {
        &self.is_user
    }
    pub fn is_role(&self) -> &[String] {
        &self.is_role
    }
    pub fn is_admin(&self) -> &[String] {
        &self.is_admin
    }
    pub fn is_password(&self) -> &[String] {
        &self.is_password
    }
    pub fn is_secret(&self) -> &[String] {
        &self.is_secret
    }
    pub fn is_invalid_bind(&self) -> &[String] {
        &self.is_invalid_bind
    }
    pub fn has_wrong_words(&self) -> &[String] {
        &self.has_wrong_words
    }
    pub fn has_http(&self) -> &[String] {
        &self.has_http
    }
    pub fn has_http_whitelist(&self) -> &[String] {
        &self.has_http_whitelist
    }
    /// Raw regex sources behind [`PatternConfig::download_regexes`].
    pub fn is_download(&self) -> &[String] {
        &self.is_download
    }
    pub fn is_checksum(&self) -> &[String] {
        &self.is_checksum
    }
    pub fn is_weak_crypt(&self) -> &[String] {
        &self.is_weak_crypt
    }
    pub fn has_weak_crypt_whitelist(&self) -> &[String] {
        &self.has_weak_crypt_whitelist
    }
    pub fn download_regexes(&self) -> &[Regex] {
        &self.download_regexes
    }
}

/// Reads a [`PatternConfig`] from a JSON file (see [`PatternConfig::from_json`]).
pub fn load_config(path: impl AsRef<Path>) -> Result<PatternConfig, ConfigError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(ConfigError::NotFound(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    PatternConfig::from_json_named(&text, &path.display().to_string())
}

/// True iff any keyword equals one of the lowercase tokens of `name`
/// (split on non-alphanumerics) or equals the whole lowercased name.
///
/// Token granularity keeps `user` from matching `customer`; the whole-name
/// clause lets keywords containing separators (`pass-no`, `auth token`)
/// still match identifiers spelled exactly that way.
pub fn name_matches(keywords: &[String], name: &str) -> bool {
    if keywords.is_empty() {
        return false;
    }
    let lower = name.to_lowercase();
    if keywords.iter().any(|k| *k == lower) {
        return true;
    }
    lower
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .any(|token| keywords.iter().any(|k| k == token))
}

/// True iff any keyword occurs as a case-insensitive substring of the
/// value's text. Lists match if any element does; `false` matches the
/// literal keyword `"false"`; numbers, `true`, and null never match.
pub fn value_matches(keywords: &[String], value: &Value) -> bool {
    match value {
        Value::Str(s) | Value::Ident(s) => {
            let lower = s.to_lowercase();
            keywords.iter().any(|k| lower.contains(k.as_str()))
        }
        Value::List(items) => items.iter().any(|v| value_matches(keywords, v)),
        Value::Bool(false) => keywords.iter().any(|k| k == "false"),
        _ => false,
    }
}

/// Regex flavor of [`value_matches`], used by the `is_download` set:
/// patterns are searched in the lowercased text of the value.
pub fn value_matches_regex(regexes: &[Regex], value: &Value) -> bool {
    match value {
        Value::Str(s) | Value::Ident(s) => {
            let lower = s.to_lowercase();
            regexes.iter().any(|r| r.is_match(&lower))
        }
        Value::List(items) => items.iter().any(|v| value_matches_regex(regexes, v)),
        _ => false,
    }
}

/// Token flavor of [`value_matches`] for the strict-names profile: value
/// text is split exactly like identifier names.
pub fn value_matches_tokens(keywords: &[String], value: &Value) -> bool {
    match value {
        Value::Str(s) | Value::Ident(s) => name_matches(keywords, s),
        Value::List(items) => items.iter().any(|v| value_matches_tokens(keywords, v)),
        Value::Bool(false) => keywords.iter().any(|k| k == "false"),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(entries: &[&str]) -> Vec<String> {
        keywords(entries)
    }

    #[test]
    fn default_profile_prints_expected_exact_sets() {
        let cfg = default_config();
        assert_eq!(cfg.is_admin(), ["admin", "root"]);
        assert!(cfg.is_role().is_empty());
        assert_eq!(cfg.is_invalid_bind(), ["0.0.0.0"]);
        assert_eq!(cfg.has_http(), ["http"]);
        assert_eq!(cfg.has_http_whitelist(), ["localhost", "127.0.0.1"]);
        assert_eq!(cfg.is_checksum(), ["gpg", "checksum"]);
        assert_eq!(cfg.is_weak_crypt(), ["md5", "sha1", "arcfour"]);
        assert_eq!(cfg.has_weak_crypt_whitelist(), ["checksum"]);
        assert_eq!(cfg.is_download().len(), cfg.download_regexes().len());
    }

    #[test]
    fn names_match_per_token_not_per_substring() {
        let cfg = default_config();
        assert!(name_matches(cfg.is_password(), "server_root_password"));
        assert!(name_matches(cfg.is_password(), "PASSWD"));
        assert!(name_matches(cfg.is_password(), "pass-no"));
        assert!(!name_matches(cfg.is_user(), "customer"));
        assert!(!name_matches(cfg.is_password(), "bypass_cache"));
        assert!(!name_matches(cfg.is_role(), "anything"));
        assert!(!name_matches(cfg.is_role(), ""));
    }

    #[test]
    fn values_match_per_substring() {
        let cfg = default_config();
        assert!(value_matches(cfg.is_admin(), &Value::Str("root".into())));
        assert!(value_matches(
            cfg.is_invalid_bind(),
            &Value::Str("0.0.0.0:8080".into())
        ));
        assert!(!value_matches(cfg.is_weak_crypt(), &Value::Str("SHA512".into())));
        assert!(value_matches(cfg.is_weak_crypt(), &Value::Str("SHA1".into())));
        assert!(value_matches(
            cfg.is_admin(),
            &Value::List(vec![Value::Int(1), Value::Ident("root".into())])
        ));
        assert!(!value_matches(cfg.is_admin(), &Value::Int(0)));
        assert!(!value_matches(cfg.is_admin(), &Value::Null));
    }

    #[test]
    fn boolean_false_matches_only_the_false_keyword() {
        let with_false = set(&["false", "no"]);
        assert!(value_matches(&with_false, &Value::Bool(false)));
        assert!(!value_matches(&with_false, &Value::Bool(true)));
        assert!(!value_matches(&set(&["no"]), &Value::Bool(false)));
    }

    #[test]
    fn download_patterns_anchor_on_the_extension() {
        let cfg = default_config();
        let hit = |s: &str| value_matches_regex(cfg.download_regexes(), &Value::Str(s.into()));
        assert!(hit("https://x.io/app.tar.gz"));
        assert!(hit("http://mirror/img.iso"));
        assert!(hit("WWW.example.com/setup.EXE"));
        assert!(!hit("https://x.io/app.txt"));
        assert!(!hit("https://x.io/app.tar.gz.asc"));
        assert!(!hit("local/file.iso")); // no scheme or www
    }

    #[test]
    fn token_mode_tightens_value_matching() {
        let cfg = default_config();
        let v = Value::Str("0.0.0.0:8080".into());
        assert!(value_matches(cfg.is_invalid_bind(), &v));
        // "0.0.0.0" is not a token of "0.0.0.0:8080" (tokens are 0,0,0,0,8080),
        // but the plain address still matches by whole-string equality.
        assert!(!value_matches_tokens(cfg.is_invalid_bind(), &v));
        assert!(value_matches_tokens(
            cfg.is_invalid_bind(),
            &Value::Str("0.0.0.0".into())
        ));
    }

    #[test]
    fn single_key_override_keeps_other_defaults() {
        let cfg = PatternConfig::from_json(r#"{"is_admin": ["Admin"]}"#).unwrap();
        assert_eq!(cfg.is_admin(), ["admin"]); // lowercased
        assert_eq!(cfg.is_checksum(), ["gpg", "checksum"]);
        assert_eq!(cfg.is_weak_crypt(), ["md5", "sha1", "arcfour"]);
    }

    #[test]
    fn empty_document_is_the_default_profile() {
        let cfg = PatternConfig::from_json("").unwrap();
        assert_eq!(cfg.is_admin(), default_config().is_admin());
        let cfg = PatternConfig::from_json("{}").unwrap();
        assert_eq!(cfg.is_password(), default_config().is_password());
    }

    #[test]
    fn unknown_keys_and_bad_entries_are_named_in_errors() {
        let err = PatternConfig::from_json(r#"{"is_frobnicate": []}"#).unwrap_err();
        assert!(err.to_string().contains("is_frobnicate"), "{err}");

        let err = PatternConfig::from_json(r#"{"is_user": [""]}"#).unwrap_err();
        assert!(err.to_string().contains("is_user"), "{err}");

        let err = PatternConfig::from_json(r#"{"is_download": ["["]}"#).unwrap_err();
        assert!(err.to_string().contains("is_download"), "{err}");

        let err = PatternConfig::from_json(r#"{"is_admin": "root"}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Malformed { .. }), "{err}");
    }

    #[test]
    fn file_loading_reports_missing_paths() {
        let err = load_config("/nonexistent/patterns.json").unwrap_err();
        assert!(matches!(err, ConfigError::NotFound(_)));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("patterns.json");
        std::fs::write(&path, r#"{"is_role": ["superuser"]}"#).unwrap();
        let cfg = load_config(&path).unwrap();
        assert_eq!(cfg.is_role(), ["superuser"]);
        assert!(name_matches(cfg.is_role(), "superuser"));
    }

    proptest! {
        #[test]
        fn matching_is_case_insensitive(s in "[a-zA-Z0-9_./: -]{0,24}") {
            let cfg = default_config();
            for set in [cfg.is_admin(), cfg.is_password(), cfg.is_weak_crypt()] {
                let v = Value::Str(s.clone());
                let lower = Value::Str(s.to_lowercase());
                prop_assert_eq!(value_matches(set, &v), value_matches(set, &lower));
                prop_assert_eq!(name_matches(set, &s), name_matches(set, &s.to_lowercase()));
            }
        }

        #[test]
        fn adding_a_keyword_never_unmatches(s in "[a-z0-9_ ]{0,16}", extra in "[a-z]{1,6}") {
            let base = set(&["pass", "secret"]);
            let mut extended = base.clone();
            extended.push(extra);
            let v = Value::Str(s.clone());
            prop_assert!(!value_matches(&base, &v) || value_matches(&extended, &v));
            prop_assert!(!name_matches(&base, &s) || name_matches(&extended, &s));
        }
    }
}
