//! The nine security-smell detection rules.
//!
//! [`check_tree`] walks an IR tree in traversal order and applies every rule
//! to every node independently: a node can yield several findings, and no
//! node ever influences another's verdict. Rules fall into three shapes:
//!
//! * key/value rules ([`rule_admin_by_default`], [`rule_empty_password`],
//!   [`rule_hard_coded_secret`], [`rule_invalid_ip`],
//!   [`rule_http_without_tls`], [`rule_weak_crypto`] and the attribute half
//!   of [`rule_no_integrity_check`]) — inspect one name/value pair;
//! * [`rule_suspicious_comment`] — inspects comment text;
//! * structural rules — the atomic-unit half of [`rule_no_integrity_check`]
//!   scans a resource's attribute list, and [`rule_missing_default`]
//!   inspects a whole condition chain from its head.
//!
//! All keyword decisions defer to the sets in
//! [`PatternConfig`](crate::config::PatternConfig), so behavior is tunable
//! without touching rule code.

use serde::{Serialize, Serializer};

use crate::config::{self, PatternConfig};
use crate::discovery::TechKind;
use crate::ir::{
    AtomicUnit, Attribute, Comment, ConditionStatement, ConditionType, IrNode, SourceLocation,
    Value, Variable,
};

/// The nine smell categories, each with a stable short code used in reports
/// and on the command line (`--smells sec_hard_secret,...`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SmellKind {
    AdminByDefault,
    EmptyPassword,
    HardCodedSecret,
    InvalidIpBinding,
    SuspiciousComment,
    HttpWithoutTls,
    NoIntegrityCheck,
    WeakCrypto,
    MissingDefaultCase,
}

impl SmellKind {
    /// All kinds, in code order.
    pub const ALL: [SmellKind; 9] = [
        SmellKind::AdminByDefault,
        SmellKind::EmptyPassword,
        SmellKind::HardCodedSecret,
        SmellKind::InvalidIpBinding,
        SmellKind::SuspiciousComment,
        SmellKind::HttpWithoutTls,
        SmellKind::NoIntegrityCheck,
        SmellKind::WeakCrypto,
        SmellKind::MissingDefaultCase,
    ];

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SmellKind::AdminByDefault => "sec_def_admin",
            SmellKind::EmptyPassword => "sec_empty_pass",
            SmellKind::HardCodedSecret => "sec_hard_secret",
            SmellKind::InvalidIpBinding => "sec_invalid_bind",
            SmellKind::SuspiciousComment => "sec_susp_comment",
            SmellKind::HttpWithoutTls => "sec_http_no_tls",
            SmellKind::NoIntegrityCheck => "sec_no_int_check",
            SmellKind::WeakCrypto => "sec_weak_crypt",
            SmellKind::MissingDefaultCase => "sec_no_default_case",
        }
    }

    /// Human-readable category name.
    pub fn name(&self) -> &'static str {
        match self {
            SmellKind::AdminByDefault => "Admin by default",
            SmellKind::EmptyPassword => "Empty password",
            SmellKind::HardCodedSecret => "Hard-coded secret",
            SmellKind::InvalidIpBinding => "Invalid IP address binding",
            SmellKind::SuspiciousComment => "Suspicious comment",
            SmellKind::HttpWithoutTls => "Use of HTTP without TLS",
            SmellKind::NoIntegrityCheck => "No integrity check",
            SmellKind::WeakCrypto => "Use of weak cryptography algorithms",
            SmellKind::MissingDefaultCase => "Missing default case statement",
        }
    }

    /// Fixed description attached to every report of this kind.
    pub fn message(&self) -> &'static str {
        match self {
            SmellKind::AdminByDefault => "default user or role with administrative privileges",
            SmellKind::EmptyPassword => "zero-length password value",
            SmellKind::HardCodedSecret => "credential or secret hard-coded in the script",
            SmellKind::InvalidIpBinding => "service bound to 0.0.0.0 (all interfaces)",
            SmellKind::SuspiciousComment => "comment admits unresolved defects or shortcuts",
            SmellKind::HttpWithoutTls => "URL uses plain HTTP instead of HTTPS",
            SmellKind::NoIntegrityCheck => "downloaded artifact is not integrity-checked",
            SmellKind::WeakCrypto => "weak cryptographic algorithm in use",
            SmellKind::MissingDefaultCase => "conditional chain has no default branch",
        }
    }

    /// Inverse of [`SmellKind::code`].
    pub fn from_code(code: &str) -> Option<SmellKind> {
        SmellKind::ALL.iter().copied().find(|k| k.code() == code)
    }
}

impl Serialize for SmellKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

/// One detected smell occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmellReport {
    #[serde(rename = "smell")]
    pub kind: SmellKind,
    #[serde(flatten)]
    pub location: SourceLocation,
    #[serde(rename = "description")]
    pub message: String,
    pub tech: TechKind,
}

impl SmellReport {
    fn new(kind: SmellKind, location: &SourceLocation, tech: TechKind) -> Self {
        SmellReport {
            kind,
            location: location.clone(),
            message: kind.message().to_string(),
            tech,
        }
    }
}

/// Tunable rule behavior, all off by default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Restrict the missing-default rule to SWITCH chains; by default the
    /// rule fires on `if` chains without an `else` as well, exactly as its
    /// formula reads.
    pub strict_case: bool,
    /// Token-only matching everywhere (the `strict-names` profile): values
    /// and the integrity-check name scan use the same token granularity as
    /// identifier names, trading recall for precision.
    pub strict_names: bool,
}

/// Common view over attributes and variables; every key/value rule treats
/// the two identically.
#[derive(Debug, Clone, Copy)]
pub struct KeyValue<'a> {
    pub name: &'a str,
    pub value: &'a Value,
    pub has_variable: bool,
    pub location: &'a SourceLocation,
}

impl<'a> From<&'a Attribute> for KeyValue<'a> {
    fn from(a: &'a Attribute) -> Self {
        KeyValue { name: &a.name, value: &a.value, has_variable: a.has_variable, location: &a.location }
    }
}

impl<'a> From<&'a Variable> for KeyValue<'a> {
    fn from(v: &'a Variable) -> Self {
        KeyValue { name: &v.name, value: &v.value, has_variable: v.has_variable, location: &v.location }
    }
}

/// Matching helpers parameterized by the strict-names mode.
#[derive(Clone, Copy)]
struct Matcher {
    strict_names: bool,
}

impl Matcher {
    fn name(&self, set: &[String], name: &str) -> bool {
        config::name_matches(set, name)
    }

    fn value(&self, set: &[String], value: &Value) -> bool {
        if self.strict_names {
            config::value_matches_tokens(set, value)
        } else {
            config::value_matches(set, value)
        }
    }

    /// Substring matching on a *name*, used only where token granularity
    /// would lose matches the rules depend on (`gpgcheck` vs keyword `gpg`,
    /// `checksum_type` vs whitelist entry `checksum`).
    fn name_substring(&self, set: &[String], name: &str) -> bool {
        if self.strict_names {
            config::name_matches(set, name)
        } else {
            let lower = name.to_lowercase();
            set.iter().any(|k| lower.contains(k.as_str()))
        }
    }
}

/// Applies all nine rules to every node reachable from `root`, in traversal
/// order, with default options.
pub fn check_tree<'a, N: Into<IrNode<'a>>>(
    root: N,
    cfg: &PatternConfig,
    tech: TechKind,
) -> Vec<SmellReport> {
    check_tree_with(root, cfg, tech, CheckOptions::default())
}

/// [`check_tree`] with explicit [`CheckOptions`].
pub fn check_tree_with<'a, N: Into<IrNode<'a>>>(
    root: N,
    cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
) -> Vec<SmellReport> {
    let mut out = Vec::new();
    for node in crate::ir::traverse(root) {
        match node {
            IrNode::Attribute(a) => check_key_value(a.into(), cfg, tech, opts, &mut out),
            IrNode::Variable(v) => check_key_value(v.into(), cfg, tech, opts, &mut out),
            IrNode::Comment(c) => {
                out.extend(rule_suspicious_comment(c, cfg, tech, opts));
            }
            IrNode::AtomicUnit(u) => {
                out.extend(rule_no_integrity_check_unit(u, cfg, tech, opts));
            }
            IrNode::Condition(c) => {
                out.extend(rule_missing_default(c, cfg, tech, opts));
            }
            IrNode::Project(_) | IrNode::Module(_) | IrNode::UnitBlock(_) => {}
        }
    }
    out
}

fn check_key_value(
    x: KeyValue<'_>,
    cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
    out: &mut Vec<SmellReport>,
) {
    out.extend(rule_admin_by_default(x, cfg, tech, opts));
    out.extend(rule_empty_password(x, cfg, tech, opts));
    out.extend(rule_hard_coded_secret(x, cfg, tech, opts));
    out.extend(rule_invalid_ip(x, cfg, tech, opts));
    out.extend(rule_http_without_tls(x, cfg, tech, opts));
    out.extend(rule_no_integrity_check_value(x, cfg, tech, opts));
    out.extend(rule_weak_crypto(x, cfg, tech, opts));
}

/// A user/role-like name set to a literal admin value.
pub fn rule_admin_by_default(
    x: KeyValue<'_>,
    cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
) -> Option<SmellReport> {
    let m = Matcher { strict_names: opts.strict_names };
    let namey = m.name(cfg.is_user(), x.name) || m.name(cfg.is_role(), x.name);
    (namey && m.value(cfg.is_admin(), x.value) && !x.has_variable)
        .then(|| SmellReport::new(SmellKind::AdminByDefault, x.location, tech))
}

/// A password-like name with a zero-length (or absent) value.
pub fn rule_empty_password(
    x: KeyValue<'_>,
    cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
) -> Option<SmellReport> {
    let m = Matcher { strict_names: opts.strict_names };
    let empty = match x.value {
        Value::Str(s) => s.is_empty(),
        Value::Null => true,
        _ => false,
    };
    (m.name(cfg.is_password(), x.name) && empty)
        .then(|| SmellReport::new(SmellKind::EmptyPassword, x.location, tech))
}

/// A credential-like name bound to a literal text value (no variable).
///
/// Empty strings still count — an empty password is also a hard-coded one,
/// and both rules fire on the same node. Values that are not text at all
/// (numbers, booleans, lists, absent) are not treated as revealed secrets.
pub fn rule_hard_coded_secret(
    x: KeyValue<'_>,
    cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
) -> Option<SmellReport> {
    let m = Matcher { strict_names: opts.strict_names };
    let namey = m.name(cfg.is_password(), x.name)
        || m.name(cfg.is_secret(), x.name)
        || m.name(cfg.is_user(), x.name);
    let literal_text = matches!(x.value, Value::Str(_) | Value::Ident(_));
    (namey && !x.has_variable && literal_text)
        .then(|| SmellReport::new(SmellKind::HardCodedSecret, x.location, tech))
}

/// A value mentioning the catch-all bind address.
pub fn rule_invalid_ip(
    x: KeyValue<'_>,
    cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
) -> Option<SmellReport> {
    let m = Matcher { strict_names: opts.strict_names };
    m.value(cfg.is_invalid_bind(), x.value)
        .then(|| SmellReport::new(SmellKind::InvalidIpBinding, x.location, tech))
}

/// A comment containing any "unfinished work" keyword. At most one report
/// per comment node no matter how many keywords occur.
pub fn rule_suspicious_comment(
    x: &Comment,
    cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
) -> Option<SmellReport> {
    let m = Matcher { strict_names: opts.strict_names };
    let content = Value::Str(x.content.clone());
    m.value(cfg.has_wrong_words(), &content)
        .then(|| SmellReport::new(SmellKind::SuspiciousComment, &x.location, tech))
}

/// Trimmed of whitespace and quotes, does the text read as a URL?
fn is_url(text: &str) -> bool {
    let trimmed = text.trim().trim_matches(|c| c == '"' || c == '\'').trim();
    let lower = trimmed.to_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Does the value contain `<scheme>://` for any configured plain scheme?
fn has_plain_scheme(cfg: &PatternConfig, lower: &str) -> bool {
    cfg.has_http().iter().any(|k| lower.contains(&format!("{k}://")))
}

/// A URL-shaped value using a plain-text scheme and not whitelisted.
pub fn rule_http_without_tls(
    x: KeyValue<'_>,
    cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
) -> Option<SmellReport> {
    let m = Matcher { strict_names: opts.strict_names };
    let text = x.value.as_text()?;
    let lower = text.to_lowercase();
    (is_url(text)
        && has_plain_scheme(cfg, &lower)
        && !m.value(cfg.has_http_whitelist(), x.value))
    .then(|| SmellReport::new(SmellKind::HttpWithoutTls, x.location, tech))
}

/// `"no"`/`"false"` in any spelling the frontends produce.
fn value_is_no_or_false(value: &Value) -> bool {
    match value {
        Value::Str(s) | Value::Ident(s) => {
            let lower = s.to_lowercase();
            lower == "no" || lower == "false"
        }
        Value::Bool(false) => true,
        _ => false,
    }
}

/// Resource half of the integrity rule: it downloads something and no
/// attribute name looks checksum-like.
pub fn rule_no_integrity_check_unit(
    x: &AtomicUnit,
    cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
) -> Option<SmellReport> {
    let m = Matcher { strict_names: opts.strict_names };
    let downloads = x
        .attributes
        .iter()
        .any(|a| config::value_matches_regex(cfg.download_regexes(), &a.value));
    let checked = x
        .attributes
        .iter()
        .any(|a| m.name_substring(cfg.is_checksum(), &a.name));
    (downloads && !checked)
        .then(|| SmellReport::new(SmellKind::NoIntegrityCheck, &x.location, tech))
}

/// Key/value half of the integrity rule: a checksum-like switch turned off
/// (`gpgcheck: no`, `verify_checksum => false`).
pub fn rule_no_integrity_check_value(
    x: KeyValue<'_>,
    cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
) -> Option<SmellReport> {
    let m = Matcher { strict_names: opts.strict_names };
    (m.name_substring(cfg.is_checksum(), x.name) && value_is_no_or_false(x.value))
        .then(|| SmellReport::new(SmellKind::NoIntegrityCheck, x.location, tech))
}

/// A weak digest/cipher name in the value, with neither the name nor the
/// value whitelisted (checksums legitimately mention md5/sha1).
pub fn rule_weak_crypto(
    x: KeyValue<'_>,
    cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
) -> Option<SmellReport> {
    let m = Matcher { strict_names: opts.strict_names };
    (m.value(cfg.is_weak_crypt(), x.value)
        && !m.name_substring(cfg.has_weak_crypt_whitelist(), x.name)
        && !m.value(cfg.has_weak_crypt_whitelist(), x.value))
    .then(|| SmellReport::new(SmellKind::WeakCrypto, x.location, tech))
}

/// A condition chain with no default branch anywhere, reported at the head.
pub fn rule_missing_default(
    x: &ConditionStatement,
    _cfg: &PatternConfig,
    tech: TechKind,
    opts: CheckOptions,
) -> Option<SmellReport> {
    if opts.strict_case && x.condition_type != ConditionType::Switch {
        return None;
    }
    (!x.has_default_branch())
        .then(|| SmellReport::new(SmellKind::MissingDefaultCase, &x.location, tech))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_config;
    use crate::ir::{AtomicUnit, Comment, ConditionType, UnitBlock};

    const TECH: TechKind = TechKind::Chef;

    fn loc(line: usize) -> SourceLocation {
        SourceLocation::new("memory.test", line)
    }

    fn attr(name: &str, value: Value, has_variable: bool) -> Attribute {
        Attribute::new(name, value, has_variable, loc(1))
    }

    fn kinds(reports: &[SmellReport]) -> Vec<SmellKind> {
        reports.iter().map(|r| r.kind).collect()
    }

    /// Runs one attribute through the full per-node rule battery.
    fn check_attr(a: &Attribute) -> Vec<SmellReport> {
        let cfg = default_config();
        let mut out = Vec::new();
        check_key_value(a.into(), &cfg, TECH, CheckOptions::default(), &mut out);
        out
    }

    #[test]
    fn codes_are_unique_and_stable() {
        let codes: std::collections::BTreeSet<_> =
            SmellKind::ALL.iter().map(|k| k.code()).collect();
        assert_eq!(codes.len(), 9);
        assert_eq!(SmellKind::AdminByDefault.code(), "sec_def_admin");
        assert_eq!(SmellKind::from_code("sec_weak_crypt"), Some(SmellKind::WeakCrypto));
        assert_eq!(SmellKind::from_code("nonsense"), None);
    }

    #[test]
    fn interpolated_root_password_script_is_clean() {
        // The canonical false-positive bait: a password variable whose value
        // is a node-attribute lookup, piped into a command string.
        let mut block = UnitBlock::new("server.rb", loc(1));
        block.variables.push(Variable::new(
            "server_root_password",
            Value::Ident("node['mysql']['server_root_password']".into()),
            true,
            loc(1),
        ));
        let mut au = AtomicUnit::new("set-mysql-root", "execute", loc(2));
        au.attributes.push(attr(
            "command",
            Value::Str("mysqladmin -u root password #{server_root_password}".into()),
            true,
        ));
        au.attributes.push(attr(
            "only_if",
            Value::Str("/usr/bin/mysql -u root -e 'show databases;'".into()),
            false,
        ));
        block.atomic_units.push(au);

        assert_eq!(check_tree(&block, &default_config(), TECH), []);
    }

    #[test]
    fn empty_block_yields_nothing() {
        let block = UnitBlock::new("empty", loc(1));
        assert_eq!(check_tree(&block, &default_config(), TECH), []);
    }

    #[test]
    fn root_user_plus_todo_comment_fire_every_matching_rule() {
        // `user: root` trips both the default-admin rule (name+value) and the
        // hard-coded-credential rule (user-ish name with a literal value);
        // rules never suppress each other.
        let mut block = UnitBlock::new("b", loc(1));
        block.attributes.push(attr("user", Value::Str("root".into()), false));
        block.comments.push(Comment::new("# TODO", loc(2)));
        let reports = check_tree(&block, &default_config(), TECH);
        assert_eq!(
            kinds(&reports),
            [
                SmellKind::AdminByDefault,
                SmellKind::HardCodedSecret,
                SmellKind::SuspiciousComment
            ]
        );
    }

    #[test]
    fn admin_by_default_requires_a_literal_admin_value() {
        let cfg = default_config();
        let opts = CheckOptions::default();
        let a = attr("user", Value::Str("root".into()), false);
        assert!(rule_admin_by_default((&a).into(), &cfg, TECH, opts).is_some());

        let a = attr("user", Value::Str("{{ deploy_user }}".into()), true);
        assert!(rule_admin_by_default((&a).into(), &cfg, TECH, opts).is_none());

        let v = Variable::new("username", Value::Str("admin".into()), false, loc(3));
        assert!(rule_admin_by_default((&v).into(), &cfg, TECH, opts).is_some());

        // Admin-looking value under a non-user name: no match.
        let a = attr("command", Value::Str("usermod root".into()), false);
        assert!(rule_admin_by_default((&a).into(), &cfg, TECH, opts).is_none());
    }

    #[test]
    fn empty_password_fires_on_empty_text_and_null_only() {
        let cfg = default_config();
        let opts = CheckOptions::default();
        let a = attr("password", Value::Str(String::new()), false);
        assert!(rule_empty_password((&a).into(), &cfg, TECH, opts).is_some());

        let a = attr("password", Value::Str("s3cret".into()), false);
        assert!(rule_empty_password((&a).into(), &cfg, TECH, opts).is_none());

        let v = Variable::new("passwd", Value::Null, false, loc(2));
        assert!(rule_empty_password((&v).into(), &cfg, TECH, opts).is_some());

        let a = attr("timeout", Value::Str(String::new()), false);
        assert!(rule_empty_password((&a).into(), &cfg, TECH, opts).is_none());
    }

    #[test]
    fn hard_coded_secret_needs_literal_text() {
        let cfg = default_config();
        let opts = CheckOptions::default();
        let v = Variable::new(
            "server_root_password",
            Value::Ident("node['mysql']['server_root_password']".into()),
            true,
            loc(1),
        );
        assert!(rule_hard_coded_secret((&v).into(), &cfg, TECH, opts).is_none());

        let a = attr("ssh_key", Value::Str("AAAAB3Nza".into()), false);
        assert!(rule_hard_coded_secret((&a).into(), &cfg, TECH, opts).is_some());

        let a = attr("password", Value::Null, false);
        assert!(rule_hard_coded_secret((&a).into(), &cfg, TECH, opts).is_none());

        let a = attr("passno", Value::Int(0), false);
        assert!(rule_hard_coded_secret((&a).into(), &cfg, TECH, opts).is_none());
    }

    #[test]
    fn empty_string_password_raises_both_smells() {
        let a = attr("password", Value::Str(String::new()), false);
        assert_eq!(
            kinds(&check_attr(&a)),
            [SmellKind::EmptyPassword, SmellKind::HardCodedSecret]
        );
    }

    #[test]
    fn invalid_binding_matches_by_substring() {
        let cfg = default_config();
        let opts = CheckOptions::default();
        let a = attr("bind_address", Value::Str("0.0.0.0".into()), false);
        assert!(rule_invalid_ip((&a).into(), &cfg, TECH, opts).is_some());

        let a = attr("bind_address", Value::Str("127.0.0.1".into()), false);
        assert!(rule_invalid_ip((&a).into(), &cfg, TECH, opts).is_none());

        let v = Variable::new("listen", Value::Str("0.0.0.0:8080".into()), false, loc(2));
        assert!(rule_invalid_ip((&v).into(), &cfg, TECH, opts).is_some());
    }

    #[test]
    fn suspicious_comments_report_once_per_node() {
        let cfg = default_config();
        let opts = CheckOptions::default();
        let hit = |text: &str| {
            rule_suspicious_comment(&Comment::new(text, loc(1)), &cfg, TECH, opts).is_some()
        };
        assert!(hit("# TODO: fix auth"));
        assert!(!hit("# configures the vhost"));

        let mut block = UnitBlock::new("b", loc(1));
        block.comments.push(Comment::new("# HACK for bug 42, FIXME", loc(1)));
        assert_eq!(check_tree(&block, &cfg, TECH).len(), 1);
    }

    #[test]
    fn http_rule_wants_a_url_with_a_plain_scheme() {
        let cfg = default_config();
        let opts = CheckOptions::default();
        let fire = |v: &str| {
            let a = attr("url", Value::Str(v.into()), false);
            rule_http_without_tls((&a).into(), &cfg, TECH, opts).is_some()
        };
        assert!(fire("http://example.com/pkg"));
        assert!(!fire("http://localhost:8080"));
        assert!(!fire("http://127.0.0.1/health"));
        assert!(!fire("https://example.com"));
        assert!(!fire("run the http daemon")); // not a URL
        assert!(!fire("see http://example.com")); // embedded, not URL-shaped
        assert!(fire("'http://example.com'")); // quoted form still a URL
        assert!(fire("www.example.com/a?go=http://example.com"));
    }

    #[test]
    fn integrity_rule_unit_branch_needs_a_download_and_no_checksum() {
        let cfg = default_config();
        let opts = CheckOptions::default();
        let mut au = AtomicUnit::new("fetch app", "remote_file", loc(4));
        au.attributes.push(attr(
            "source",
            Value::Str("https://x.io/app.tar.gz".into()),
            false,
        ));
        let report = rule_no_integrity_check_unit(&au, &cfg, TECH, opts).unwrap();
        assert_eq!(report.kind, SmellKind::NoIntegrityCheck);
        assert_eq!(report.location.line, 4);

        au.attributes.push(attr("checksum", Value::Str("9f86d0".into()), false));
        assert!(rule_no_integrity_check_unit(&au, &cfg, TECH, opts).is_none());

        let mut plain = AtomicUnit::new("config", "template", loc(1));
        plain.attributes.push(attr("source", Value::Str("app.conf.erb".into()), false));
        assert!(rule_no_integrity_check_unit(&plain, &cfg, TECH, opts).is_none());
    }

    #[test]
    fn integrity_rule_value_branch_flags_disabled_checks() {
        let cfg = default_config();
        let opts = CheckOptions::default();
        let fire = |name: &str, value: Value| {
            let a = attr(name, value, false);
            rule_no_integrity_check_value((&a).into(), &cfg, TECH, opts).is_some()
        };
        assert!(fire("gpgcheck", Value::Str("no".into())));
        assert!(fire("gpgcheck", Value::Bool(false)));
        assert!(fire("verify_checksum", Value::Str("False".into())));
        assert!(!fire("gpgcheck", Value::Str("yes".into())));
        assert!(!fire("enabled", Value::Str("no".into()))); // name not checksum-like
    }

    #[test]
    fn weak_crypto_respects_both_whitelists() {
        let cfg = default_config();
        let opts = CheckOptions::default();
        let fire = |name: &str, value: &str| {
            let a = attr(name, Value::Str(value.into()), false);
            rule_weak_crypto((&a).into(), &cfg, TECH, opts).is_some()
        };
        assert!(fire("hash_algorithm", "md5"));
        assert!(!fire("checksum_type", "md5")); // name whitelisted
        assert!(!fire("algorithm", "md5 checksum of payload")); // value whitelisted
        assert!(!fire("cipher", "aes256"));
        assert!(fire("ssl_ciphers", "arcfour"));
    }

    #[test]
    fn missing_default_inspects_the_whole_chain() {
        let cfg = default_config();
        let opts = CheckOptions::default();
        let mut no_default = ConditionStatement::new(ConditionType::Switch, "'debian'", loc(2));
        no_default
            .set_else(ConditionStatement::new(ConditionType::Switch, "'redhat'", loc(3)))
            .unwrap();
        assert!(rule_missing_default(&no_default, &cfg, TECH, opts).is_some());

        let mut with_default = ConditionStatement::new(ConditionType::Switch, "'debian'", loc(2));
        with_default
            .set_else(ConditionStatement::new_default(ConditionType::Switch, loc(4)))
            .unwrap();
        assert!(rule_missing_default(&with_default, &cfg, TECH, opts).is_none());

        let mut if_with_else = ConditionStatement::new(ConditionType::If, "x > 1", loc(1));
        if_with_else
            .set_else(ConditionStatement::new_default(ConditionType::If, loc(3)))
            .unwrap();
        assert!(rule_missing_default(&if_with_else, &cfg, TECH, opts).is_none());

        let bare_if = ConditionStatement::new(ConditionType::If, "x > 1", loc(1));
        assert!(rule_missing_default(&bare_if, &cfg, TECH, opts).is_some());

        // strict-case mode: only SWITCH chains count.
        let strict = CheckOptions { strict_case: true, ..CheckOptions::default() };
        assert!(rule_missing_default(&bare_if, &cfg, TECH, strict).is_none());
        assert!(rule_missing_default(&no_default, &cfg, TECH, strict).is_some());
    }

    #[test]
    fn reports_carry_node_location_and_fixed_message() {
        let mut block = UnitBlock::new("b", loc(1));
        block
            .attributes
            .push(Attribute::new("password", Value::Str(String::new()), false, loc(7)));
        let reports = check_tree(&block, &default_config(), TechKind::Puppet);
        assert_eq!(reports.len(), 2);
        for r in &reports {
            assert_eq!(r.location.line, 7);
            assert_eq!(r.tech, TechKind::Puppet);
            assert_eq!(r.message, r.kind.message());
        }
    }

    #[test]
    fn strict_names_tightens_value_matching() {
        let cfg = default_config();
        let strict = CheckOptions { strict_names: true, ..CheckOptions::default() };
        let a = attr("listen", Value::Str("0.0.0.0:8080".into()), false);
        assert!(rule_invalid_ip((&a).into(), &cfg, TECH, CheckOptions::default()).is_some());
        assert!(rule_invalid_ip((&a).into(), &cfg, TECH, strict).is_none());
    }
}
