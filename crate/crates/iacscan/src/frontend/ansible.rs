//! Ansible frontend: playbooks, task files, and variable files.
//!
//! YAML structure comes from the `yaml_rust2` event stream (which reports a
//! line-accurate marker for every key), assembled here into a small node
//! tree. Comments never appear in YAML events, so they are recovered by a
//! separate lexical scan of the raw source. Plain scalars are resolved with
//! YAML-1.1 semantics (`yes`/`no`/`on`/`off` are booleans) because that is
//! what Ansible itself sees.
//!
//! Mapping to IR:
//!
//! * a playbook becomes one nested [`UnitBlock`] per play;
//! * entries of `tasks`/`pre_tasks`/`post_tasks`/`handlers` become
//!   [`AtomicUnit`]s typed by their module key, with module arguments and
//!   task keywords as [`Attribute`]s (free-form `k=v` strings are split);
//! * `vars` entries and variable files become [`Variable`]s;
//! * `block:` constructs nest as blocks;
//! * nested mappings flatten to dotted attribute names
//!   (`mysql.server_root_password`);
//! * `has_variable` is a lexical Jinja2 test: the raw scalar contains
//!   `{{ ... }}` or `{% ... %}`.
//!
//! No `ConditionStatement` is ever produced: Ansible has no case construct,
//! and `when:` guards are ordinary attributes.

use std::path::Path;

use yaml_rust2::parser::{Event, Parser};
use yaml_rust2::scanner::TScalarStyle;

use super::{file_block_name, ParseError, MAX_DEPTH};
use crate::ir::{AtomicUnit, Attribute, Comment, SourceLocation, UnitBlock, Value, Variable};

/// Coarse role of a YAML file, decided from its path and top-level shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsibleFileKind {
    /// A sequence containing at least one play (`hosts:`/`import_playbook:`).
    Playbook,
    /// A sequence of task mappings, or any file under `tasks`/`handlers`.
    TasksFile,
    /// A top-level mapping, or any file under `vars`/`defaults`/
    /// `group_vars`/`host_vars`.
    VarsFile,
    /// Anything else (empty files, scalar documents, ...).
    Other,
}

/// Task keys that configure the task itself rather than name its module.
const TASK_KEYWORDS: [&str; 40] = [
    "name",
    "when",
    "register",
    "become",
    "become_user",
    "become_method",
    "become_flags",
    "loop",
    "loop_control",
    "until",
    "retries",
    "delay",
    "tags",
    "notify",
    "listen",
    "ignore_errors",
    "changed_when",
    "failed_when",
    "delegate_to",
    "delegate_facts",
    "run_once",
    "args",
    "environment",
    "vars",
    "no_log",
    "any_errors_fatal",
    "check_mode",
    "diff",
    "throttle",
    "timeout",
    "remote_user",
    "connection",
    "module_defaults",
    "with_items",
    "with_dict",
    "with_list",
    "with_fileglob",
    "with_first_found",
    "with_together",
    "with_sequence",
];

/// Minimal YAML node tree with per-node line numbers.
#[derive(Debug)]
enum Node {
    Scalar { text: String, plain: bool, forced_str: bool, line: usize },
    Seq { items: Vec<Node>, line: usize },
    Map { entries: Vec<(Node, Node)>, line: usize },
    Alias { line: usize },
}

impl Node {
    fn line(&self) -> usize {
        match self {
            Node::Scalar { line, .. }
            | Node::Seq { line, .. }
            | Node::Map { line, .. }
            | Node::Alias { line } => *line,
        }
    }
}

enum Frame {
    Seq { items: Vec<Node>, line: usize },
    Map { entries: Vec<(Node, Node)>, pending: Option<Node>, line: usize },
}

/// Runs the YAML parser to completion, returning one node per document.
fn build_documents(path: &Path, source: &str) -> Result<Vec<Node>, ParseError> {
    let mut parser = Parser::new_from_str(source);
    let mut docs: Vec<Node> = Vec::new();
    let mut stack: Vec<Frame> = Vec::new();

    fn place(docs: &mut Vec<Node>, stack: &mut [Frame], node: Node) {
        match stack.last_mut() {
            None => docs.push(node),
            Some(Frame::Seq { items, .. }) => items.push(node),
            Some(Frame::Map { entries, pending, .. }) => match pending.take() {
                None => *pending = Some(node),
                Some(key) => entries.push((key, node)),
            },
        }
    }

    loop {
        let (event, marker) = parser
            .next_token()
            .map_err(|e| ParseError::new(path, e.marker().line(), e.info()))?;
        let line = marker.line().max(1);
        match event {
            Event::StreamEnd => break,
            Event::Scalar(text, style, _, tag) => {
                let forced_str = tag
                    .as_ref()
                    .is_some_and(|t| t.suffix == "str");
                let plain = style == TScalarStyle::Plain;
                place(&mut docs, &mut stack, Node::Scalar { text, plain, forced_str, line });
            }
            Event::SequenceStart(..) => {
                if stack.len() >= MAX_DEPTH {
                    return Err(ParseError::new(path, line, "nesting too deep"));
                }
                stack.push(Frame::Seq { items: Vec::new(), line });
            }
            Event::MappingStart(..) => {
                if stack.len() >= MAX_DEPTH {
                    return Err(ParseError::new(path, line, "nesting too deep"));
                }
                stack.push(Frame::Map { entries: Vec::new(), pending: None, line });
            }
            Event::SequenceEnd => {
                if let Some(Frame::Seq { items, line }) = stack.pop() {
                    place(&mut docs, &mut stack, Node::Seq { items, line });
                }
            }
            Event::MappingEnd => {
                if let Some(Frame::Map { entries, line, .. }) = stack.pop() {
                    place(&mut docs, &mut stack, Node::Map { entries, line });
                }
            }
            Event::Alias(_) => place(&mut docs, &mut stack, Node::Alias { line }),
            _ => {} // stream/document starts and ends
        }
    }
    Ok(docs)
}

/// YAML-1.1-style resolution for plain scalars; quoted or `!!str`-tagged
/// scalars stay text.
fn resolve_scalar(text: &str, plain: bool, forced_str: bool) -> Value {
    if !plain || forced_str {
        return Value::Str(text.to_string());
    }
    match text.to_lowercase().as_str() {
        "" | "~" | "null" => return Value::Null,
        "true" | "yes" | "on" => return Value::Bool(true),
        "false" | "no" | "off" => return Value::Bool(false),
        _ => {}
    }
    if let Ok(i) = text.parse::<i64>() {
        return Value::Int(i);
    }
    if text.starts_with(['+', '-', '.']) || text.starts_with(|c: char| c.is_ascii_digit()) {
        if let Ok(f) = text.parse::<f64>() {
            return Value::Float(f);
        }
    }
    Value::Str(text.to_string())
}

/// Lexical Jinja2 test used for `has_variable`.
fn has_jinja(text: &str) -> bool {
    (text.contains("{{") && text.contains("}}"))
        || (text.contains("{%") && text.contains("%}"))
}

fn node_has_jinja(node: &Node) -> bool {
    match node {
        Node::Scalar { text, .. } => has_jinja(text),
        Node::Seq { items, .. } => items.iter().any(node_has_jinja),
        Node::Map { entries, .. } => entries
            .iter()
            .any(|(k, v)| node_has_jinja(k) || node_has_jinja(v)),
        Node::Alias { .. } => true,
    }
}

/// Single-line rendering for nodes forced into value position (maps inside
/// sequences and non-scalar keys).
fn render_compact(node: &Node) -> String {
    match node {
        Node::Scalar { text, .. } => text.clone(),
        Node::Seq { items, .. } => {
            let inner: Vec<String> = items.iter().map(render_compact).collect();
            format!("[{}]", inner.join(", "))
        }
        Node::Map { entries, .. } => {
            let inner: Vec<String> = entries
                .iter()
                .map(|(k, v)| format!("{}: {}", render_compact(k), render_compact(v)))
                .collect();
            format!("{{{}}}", inner.join(", "))
        }
        Node::Alias { .. } => "*alias".to_string(),
    }
}

/// Converts a node in value position to a [`Value`] plus its variable flag.
fn to_value(node: &Node) -> (Value, bool) {
    match node {
        Node::Scalar { text, plain, forced_str, .. } => {
            (resolve_scalar(text, *plain, *forced_str), has_jinja(text))
        }
        Node::Seq { items, .. } => {
            let mut has_var = false;
            let values = items
                .iter()
                .map(|item| {
                    let (v, h) = to_value(item);
                    has_var |= h;
                    v
                })
                .collect();
            (Value::List(values), has_var)
        }
        Node::Map { .. } => (Value::Ident(render_compact(node)), node_has_jinja(node)),
        Node::Alias { .. } => (Value::Ident("*alias".to_string()), true),
    }
}

fn key_text(node: &Node) -> String {
    match node {
        Node::Scalar { text, .. } => text.clone(),
        other => render_compact(other),
    }
}

fn map_get<'a>(entries: &'a [(Node, Node)], key: &str) -> Option<&'a (Node, Node)> {
    entries.iter().find(|(k, _)| key_text(k) == key)
}

fn is_play(entries: &[(Node, Node)]) -> bool {
    map_get(entries, "hosts").is_some() || map_get(entries, "import_playbook").is_some()
}

/// Finds every YAML comment token: the first `#` on each line that sits
/// outside quotes and is preceded by whitespace or the line start.
fn scan_comments(path: &Path, source: &str) -> Vec<Comment> {
    let mut out = Vec::new();
    for (i, raw) in source.lines().enumerate() {
        let mut in_single = false;
        let mut in_double = false;
        let mut prev_is_space = true;
        for (j, ch) in raw.char_indices() {
            match ch {
                '\'' if !in_double => in_single = !in_single,
                '"' if !in_single => in_double = !in_double,
                '#' if !in_single && !in_double && prev_is_space => {
                    out.push(Comment::new(&raw[j..], SourceLocation::new(path, i + 1)));
                    break;
                }
                _ => {}
            }
            prev_is_space = ch.is_whitespace();
        }
    }
    out
}

/// Classifies a YAML file by path convention first, top-level shape second.
pub fn classify(path: &Path, source: &str) -> AnsibleFileKind {
    for component in path.iter() {
        match component.to_string_lossy().to_lowercase().as_str() {
            "tasks" | "handlers" => return AnsibleFileKind::TasksFile,
            "vars" | "defaults" | "group_vars" | "host_vars" => {
                return AnsibleFileKind::VarsFile
            }
            _ => {}
        }
    }
    match build_documents(path, source) {
        Ok(docs) => classify_documents(&docs),
        Err(_) => AnsibleFileKind::Other,
    }
}

fn classify_documents(docs: &[Node]) -> AnsibleFileKind {
    match docs.first() {
        Some(Node::Map { .. }) => AnsibleFileKind::VarsFile,
        Some(Node::Seq { items, .. }) => {
            let maps: Vec<&Node> = items
                .iter()
                .filter(|n| matches!(n, Node::Map { .. }))
                .collect();
            if maps.is_empty() {
                return AnsibleFileKind::Other;
            }
            let any_play = maps.iter().any(|n| match n {
                Node::Map { entries, .. } => is_play(entries),
                _ => false,
            });
            if any_play {
                AnsibleFileKind::Playbook
            } else {
                AnsibleFileKind::TasksFile
            }
        }
        _ => AnsibleFileKind::Other,
    }
}

/// Parses one Ansible YAML file into a file-level [`UnitBlock`].
pub fn parse_ansible(path: impl AsRef<Path>, source: &str) -> Result<UnitBlock, ParseError> {
    let path = path.as_ref();
    let docs = build_documents(path, source)?;
    let kind = {
        // Path conventions outrank shape, mirroring `classify`.
        let by_path = classify(path, "");
        if by_path == AnsibleFileKind::Other {
            classify_documents(&docs)
        } else {
            by_path
        }
    };

    let mut block = UnitBlock::new(file_block_name(path), SourceLocation::new(path, 1));
    block.comments = scan_comments(path, source);

    if docs.len() > 1 {
        // Multi-document stream: one nested block per document.
        for doc in &docs {
            let mut sub = UnitBlock::new("", SourceLocation::new(path, doc.line()));
            fill_from_document(&mut sub, doc, kind, path);
            block.unit_blocks.push(sub);
        }
    } else if let Some(doc) = docs.first() {
        fill_from_document(&mut block, doc, kind, path);
    }
    Ok(block)
}

fn fill_from_document(block: &mut UnitBlock, doc: &Node, kind: AnsibleFileKind, path: &Path) {
    match doc {
        Node::Map { entries, .. } => variables_into(block, entries, "", path),
        Node::Seq { items, .. } => {
            for item in items {
                let Node::Map { entries, .. } = item else { continue };
                if kind == AnsibleFileKind::Playbook && is_play(entries) {
                    block.unit_blocks.push(build_play(entries, item.line(), path));
                } else {
                    push_task(block, entries, item.line(), path);
                }
            }
        }
        _ => {}
    }
}

/// Lowers `vars`-style mappings to variables, flattening nested maps into
/// dotted names so the leaf key stays a matchable token.
fn variables_into(block: &mut UnitBlock, entries: &[(Node, Node)], prefix: &str, path: &Path) {
    for (k, v) in entries {
        let name = if prefix.is_empty() {
            key_text(k)
        } else {
            format!("{prefix}.{}", key_text(k))
        };
        match v {
            Node::Map { entries, .. } => variables_into(block, entries, &name, path),
            _ => {
                let (value, has_var) = to_value(v);
                block
                    .variables
                    .push(Variable::new(name, value, has_var, SourceLocation::new(path, k.line())));
            }
        }
    }
}

/// Same flattening for attribute position.
fn attributes_into(
    attrs: &mut Vec<Attribute>,
    name: &str,
    node: &Node,
    path: &Path,
    key_line: usize,
) {
    match node {
        Node::Map { entries, .. } => {
            for (k, v) in entries {
                let sub = format!("{name}.{}", key_text(k));
                attributes_into(attrs, &sub, v, path, k.line());
            }
        }
        _ => {
            let (value, has_var) = to_value(node);
            attrs.push(Attribute::new(name, value, has_var, SourceLocation::new(path, key_line)));
        }
    }
}

fn build_play(entries: &[(Node, Node)], line: usize, path: &Path) -> UnitBlock {
    let name = map_get(entries, "name")
        .map(|(_, v)| key_text(v))
        .unwrap_or_default();
    let mut play = UnitBlock::new(name, SourceLocation::new(path, line));
    for (k, v) in entries {
        let key = key_text(k);
        match key.as_str() {
            "name" => {}
            "tasks" | "pre_tasks" | "post_tasks" | "handlers" => {
                if let Node::Seq { items, .. } = v {
                    for item in items {
                        if let Node::Map { entries, .. } = item {
                            push_task(&mut play, entries, item.line(), path);
                        }
                    }
                }
            }
            "vars" => {
                if let Node::Map { entries, .. } = v {
                    variables_into(&mut play, entries, "", path);
                }
            }
            _ => attributes_into(&mut play.attributes, &key, v, path, k.line()),
        }
    }
    play
}

/// Lowers one task mapping to an [`AtomicUnit`] (or a nested block for
/// `block:` constructs).
fn push_task(block: &mut UnitBlock, entries: &[(Node, Node)], line: usize, path: &Path) {
    let name = map_get(entries, "name")
        .map(|(_, v)| key_text(v))
        .unwrap_or_default();

    if let Some((bk, bv)) = map_get(entries, "block") {
        let mut sub = UnitBlock::new(name, SourceLocation::new(path, bk.line()));
        for section in ["block", "rescue", "always"] {
            if let Some((_, v)) = map_get(entries, section) {
                if let Node::Seq { items, .. } = v {
                    for item in items {
                        if let Node::Map { entries, .. } = item {
                            push_task(&mut sub, entries, item.line(), path);
                        }
                    }
                }
            }
        }
        for (k, v) in entries {
            let key = key_text(k);
            if !matches!(key.as_str(), "name" | "block" | "rescue" | "always") {
                attributes_into(&mut sub.attributes, &key, v, path, k.line());
            }
        }
        let _ = bv;
        block.unit_blocks.push(sub);
        return;
    }

    let module = entries
        .iter()
        .map(|(k, _)| key_text(k))
        .find(|key| !TASK_KEYWORDS.contains(&key.as_str()));
    let type_name = module.clone().unwrap_or_else(|| "task".to_string());
    let mut au = AtomicUnit::new(name, type_name, SourceLocation::new(path, line));

    for (k, v) in entries {
        let key = key_text(k);
        if key == "name" {
            continue;
        }
        if Some(&key) == module.as_ref() {
            match v {
                Node::Map { entries, .. } => {
                    for (ak, av) in entries {
                        attributes_into(&mut au.attributes, &key_text(ak), av, path, ak.line());
                    }
                }
                Node::Scalar { text, plain, forced_str, .. } => {
                    if matches!(resolve_scalar(text, *plain, *forced_str), Value::Null) {
                        continue;
                    }
                    freeform_args(&mut au, text, k.line(), path);
                }
                Node::Seq { .. } | Node::Alias { .. } => {
                    let (value, has_var) = to_value(v);
                    au.attributes.push(Attribute::new(
                        "args",
                        value,
                        has_var,
                        SourceLocation::new(path, k.line()),
                    ));
                }
            }
        } else if key == "args" {
            if let Node::Map { entries, .. } = v {
                for (ak, av) in entries {
                    attributes_into(&mut au.attributes, &key_text(ak), av, path, ak.line());
                }
            }
        } else {
            attributes_into(&mut au.attributes, &key, v, path, k.line());
        }
    }
    block.atomic_units.push(au);
}

/// Splits a free-form module string on whitespace outside quotes.
fn split_quote_aware(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut in_single = false;
    let mut in_double = false;
    for ch in s.chars() {
        match ch {
            '\'' if !in_double => {
                in_single = !in_single;
                cur.push(ch);
            }
            '"' if !in_single => {
                in_double = !in_double;
                cur.push(ch);
            }
            c if c.is_whitespace() && !in_single && !in_double => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn strip_quotes(s: &str) -> (&str, bool) {
    let bytes = s.as_bytes();
    if bytes.len() >= 2 {
        let first = bytes[0];
        if (first == b'"' || first == b'\'') && bytes[bytes.len() - 1] == first {
            return (&s[1..s.len() - 1], true);
        }
    }
    (s, false)
}

/// Parses `key=value` pairs out of a free-form module argument string
/// (`user: name=deploy password=""`); any non-pair remainder becomes a
/// single `cmd` attribute (`shell: echo hi`).
fn freeform_args(au: &mut AtomicUnit, text: &str, line: usize, path: &Path) {
    let mut rest: Vec<&str> = Vec::new();
    let tokens = split_quote_aware(text);
    for token in &tokens {
        if let Some(eq) = token.find('=') {
            let key = &token[..eq];
            let valid_key = !key.is_empty()
                && key.chars().all(|c| c.is_alphanumeric() || c == '_');
            if valid_key {
                let raw = &token[eq + 1..];
                let (inner, quoted) = strip_quotes(raw);
                let value = if quoted {
                    Value::Str(inner.to_string())
                } else {
                    resolve_scalar(inner, true, false)
                };
                au.attributes.push(Attribute::new(
                    key,
                    value,
                    has_jinja(raw),
                    SourceLocation::new(path, line),
                ));
                continue;
            }
        }
        rest.push(token);
    }
    if !rest.is_empty() {
        let joined = rest.join(" ");
        let has_var = has_jinja(&joined);
        au.attributes
            .push(Attribute::new("cmd", Value::Str(joined), has_var, SourceLocation::new(path, line)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(source: &str) -> UnitBlock {
        parse_ansible("playbook.yml", source).unwrap()
    }

    #[test]
    fn empty_file_is_an_empty_block() {
        let block = parse("");
        assert_eq!(block.name, "playbook.yml");
        assert!(block.atomic_units.is_empty());
        assert!(block.variables.is_empty());
        assert!(block.unit_blocks.is_empty());
    }

    #[test]
    fn freeform_module_string_yields_attributes() {
        let block = parse(
            "- hosts: all\n  tasks:\n    - name: add deploy\n      user: name=deploy password=\"\"\n",
        );
        let play = &block.unit_blocks[0];
        let task = &play.atomic_units[0];
        assert_eq!(task.type_name, "user");
        assert_eq!(task.name, "add deploy");
        let pw = task.attributes.iter().find(|a| a.name == "password").unwrap();
        assert_eq!(pw.value, Value::Str(String::new()));
        assert!(!pw.has_variable);
        assert_eq!(pw.location.line, 4);
    }

    #[test]
    fn vaulted_vars_keep_their_variable_flag() {
        let block = parse("- hosts: db\n  vars:\n    admin_pass: \"{{ vault_pass }}\"\n");
        let play = &block.unit_blocks[0];
        let var = &play.variables[0];
        assert_eq!(var.name, "admin_pass");
        assert!(var.has_variable);
        assert_eq!(var.location.line, 3);
    }

    #[test]
    fn module_dict_args_and_task_keywords_become_attributes() {
        let source = "\
- hosts: web
  tasks:
    - name: fetch artifact
      get_url:
        url: https://example.com/app.tar.gz
        dest: /opt/app.tar.gz
      when: release_channel == 'stable'
";
        let block = parse(source);
        let task = &block.unit_blocks[0].atomic_units[0];
        assert_eq!(task.type_name, "get_url");
        let names: Vec<&str> = task.attributes.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["url", "dest", "when"]);
        assert_eq!(task.attributes[0].location.line, 5);
        assert_eq!(task.attributes[2].location.line, 7);
    }

    #[test]
    fn nested_mappings_flatten_to_dotted_variables() {
        let block = parse_ansible(
            "roles/db/vars/main.yml",
            "mysql:\n  server_root_password: changeme\n  port: 3306\n",
        )
        .unwrap();
        let names: Vec<&str> = block.variables.iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["mysql.server_root_password", "mysql.port"]);
        assert_eq!(block.variables[0].location.line, 2);
        assert_eq!(block.variables[1].value, Value::Int(3306));
    }

    #[test]
    fn plain_scalars_resolve_like_yaml_1_1() {
        let block = parse_ansible("vars/settings.yml", concat!(
            "gpgcheck: no\n",
            "enabled: True\n",
            "ratio: 0.5\n",
            "count: 42\n",
            "label: 'yes'\n",
            "empty:\n",
        ))
        .unwrap();
        let get = |name: &str| {
            block
                .variables
                .iter()
                .find(|v| v.name == name)
                .map(|v| v.value.clone())
                .unwrap()
        };
        assert_eq!(get("gpgcheck"), Value::Bool(false));
        assert_eq!(get("enabled"), Value::Bool(true));
        assert_eq!(get("ratio"), Value::Float(0.5));
        assert_eq!(get("count"), Value::Int(42));
        assert_eq!(get("label"), Value::Str("yes".into()));
        assert_eq!(get("empty"), Value::Null);
    }

    #[test]
    fn comments_are_counted_with_lines_including_trailing_ones() {
        let source = "\
# top of file
- hosts: all  # trailing note
  tasks:
    - name: noop
      command: echo '# not a comment'
";
        let block = parse(source);
        assert_eq!(block.comments.len(), 2);
        assert_eq!(block.comments[0].content, "# top of file");
        assert_eq!(block.comments[0].location.line, 1);
        assert_eq!(block.comments[1].content, "# trailing note");
        assert_eq!(block.comments[1].location.line, 2);
    }

    #[test]
    fn multi_document_streams_nest_one_block_per_document() {
        let block = parse_ansible(
            "stream.yml",
            "---\nkey: value\n---\nother: thing\n",
        )
        .unwrap();
        assert_eq!(block.unit_blocks.len(), 2);
        assert_eq!(block.unit_blocks[0].variables[0].name, "key");
        assert_eq!(block.unit_blocks[1].variables[0].name, "other");
    }

    #[test]
    fn block_constructs_nest_their_tasks() {
        let source = "\
- hosts: all
  tasks:
    - name: grouped
      block:
        - name: inner
          service: name=nginx state=started
      when: manage_nginx
";
        let block = parse(source);
        let play = &block.unit_blocks[0];
        assert_eq!(play.unit_blocks.len(), 1);
        let group = &play.unit_blocks[0];
        assert_eq!(group.name, "grouped");
        assert_eq!(group.atomic_units.len(), 1);
        assert_eq!(group.atomic_units[0].type_name, "service");
        assert_eq!(group.attributes[0].name, "when");
    }

    #[test]
    fn tasks_files_hang_units_directly_off_the_file_block() {
        let block = parse_ansible(
            "roles/app/tasks/main.yml",
            "- name: install\n  package:\n    name: nginx\n",
        )
        .unwrap();
        assert_eq!(block.atomic_units.len(), 1);
        assert!(block.unit_blocks.is_empty());
    }

    #[test]
    fn invalid_yaml_is_a_parse_error_with_a_line() {
        let err = parse_ansible("broken.yml", "key: [unclosed\nnext: {\n").unwrap_err();
        assert!(err.line >= 1);
        assert_eq!(err.path, std::path::PathBuf::from("broken.yml"));
    }

    #[test]
    fn classification_prefers_paths_then_shape() {
        use AnsibleFileKind::*;
        assert_eq!(classify(Path::new("roles/x/tasks/main.yml"), "qqq: 1"), TasksFile);
        assert_eq!(classify(Path::new("group_vars/all.yml"), "- a"), VarsFile);
        assert_eq!(classify(Path::new("site.yml"), "- hosts: all"), Playbook);
        assert_eq!(classify(Path::new("list.yml"), "- name: t\n  ping:\n"), TasksFile);
        assert_eq!(classify(Path::new("conf.yml"), "a: 1\n"), VarsFile);
        assert_eq!(classify(Path::new("odd.yml"), "just text\n"), Other);
    }

    #[test]
    fn aliases_count_as_variables_not_literals() {
        let block = parse_ansible(
            "vars/a.yml",
            "base: &b secret\nref: *b\n",
        )
        .unwrap();
        let re = block.variables.iter().find(|v| v.name == "ref").unwrap();
        assert!(re.has_variable);
        assert_eq!(re.value, Value::Ident("*alias".into()));
    }
}
