//! Puppet frontend: a hand-written lexer and strict recursive-descent
//! parser for the Puppet DSL.
//!
//! Unlike the Chef frontend, this parser is *strict*: Puppet manifests are
//! declarative, so an unexpected token means the file is malformed and the
//! whole file is rejected with a [`ParseError`] naming what was expected
//! and what was found.
//!
//! Mapping to IR:
//!
//! * `type { 'title': attr => value }` becomes an [`AtomicUnit`] (array
//!   titles produce one unit per title, resource-style `class { .. }` a
//!   unit of type `class`);
//! * `class`/`define`/`node` definitions become nested [`UnitBlock`]s, and
//!   class parameters with defaults become [`Variable`]s of that block;
//! * `$x = value` becomes a [`Variable`];
//! * `case` and selector (`? { .. }`) expressions become `SWITCH` chains,
//!   `if`/`elsif`/`else` an `IF` chain — selector chain nodes all carry the
//!   line of the statement that owns the selector;
//! * values keep literal types where simple; interpolation (`${...}` or
//!   `$name` in double-quoted strings or heredocs), variable references,
//!   and computed expressions set `has_variable`.
//!
//! Heredocs (`@("TAG"/L)` ... `| TAG`) are lexed in place: the body is
//! captured ahead of the scan and anything after the terminator tag (such
//! as the comma separating attributes) is lexed as ordinary input.

use std::collections::VecDeque;
use std::path::Path;

use super::{file_block_name, ParseError, MAX_DEPTH};
use crate::ir::{
    AtomicUnit, Attribute, Comment, ConditionStatement, ConditionType, SourceLocation, UnitBlock,
    Value, Variable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kw {
    Class,
    Define,
    Node,
    Case,
    Default,
    If,
    Elsif,
    Else,
    Unless,
    True,
    False,
    Undef,
    Inherits,
    And,
    Or,
    In,
}

fn kw_text(kw: Kw) -> &'static str {
    match kw {
        Kw::Class => "class",
        Kw::Define => "define",
        Kw::Node => "node",
        Kw::Case => "case",
        Kw::Default => "default",
        Kw::If => "if",
        Kw::Elsif => "elsif",
        Kw::Else => "else",
        Kw::Unless => "unless",
        Kw::True => "true",
        Kw::False => "false",
        Kw::Undef => "undef",
        Kw::Inherits => "inherits",
        Kw::And => "and",
        Kw::Or => "or",
        Kw::In => "in",
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    /// `$name`, `$::fact`, `$facts` — spelled with the sigil.
    VarRef(String),
    Str { text: String, interp: bool },
    Number(String),
    Kw(Kw),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::VarRef(s) => format!("variable `{s}`"),
        Tok::Str { .. } => "string".to_string(),
        Tok::Number(n) => format!("number `{n}`"),
        Tok::Kw(k) => format!("keyword `{}`", kw_text(*k)),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Eof => "end of file".to_string(),
    }
}

fn keyword(word: &str) -> Option<Kw> {
    Some(match word {
        "class" => Kw::Class,
        "define" => Kw::Define,
        "node" => Kw::Node,
        "case" => Kw::Case,
        "default" => Kw::Default,
        "if" => Kw::If,
        "elsif" => Kw::Elsif,
        "else" => Kw::Else,
        "unless" => Kw::Unless,
        "true" => Kw::True,
        "false" => Kw::False,
        "undef" => Kw::Undef,
        "inherits" => Kw::Inherits,
        "and" => Kw::And,
        "or" => Kw::Or,
        "in" => Kw::In,
        _ => return None,
    })
}

/// `$foo` or `${foo}` style interpolation start.
fn looks_like_interp(body: &str) -> bool {
    let chars: Vec<char> = body.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if c == '$' {
            if let Some(&n) = chars.get(i + 1) {
                if n == '{' || n == ':' || n == '_' || n.is_alphabetic() {
                    return true;
                }
            }
        }
    }
    false
}

struct Lexer<'a> {
    path: &'a Path,
    chars: Vec<char>,
    pos: usize,
    line: usize,
    tokens: Vec<Token>,
    comments: Vec<Comment>,
    /// Heredoc bodies consumed ahead of the scan: `(start, end, lines)`.
    skips: VecDeque<(usize, usize, usize)>,
    /// First position the next heredoc body may start at.
    heredoc_from: usize,
}

impl<'a> Lexer<'a> {
    fn new(path: &'a Path, source: &str) -> Self {
        Lexer {
            path,
            chars: source.chars().collect(),
            pos: 0,
            line: 1,
            tokens: Vec::new(),
            comments: Vec::new(),
            skips: VecDeque::new(),
            heredoc_from: 0,
        }
    }

    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn push(&mut self, tok: Tok) {
        self.tokens.push(Token { tok, line: self.line });
    }

    fn run(mut self) -> Result<(Vec<Token>, Vec<Comment>), ParseError> {
        while self.pos < self.chars.len() {
            if let Some(&(start, end, lines)) = self.skips.front() {
                if self.pos == start {
                    self.pos = end;
                    self.line += lines;
                    self.skips.pop_front();
                    continue;
                }
            }
            let ch = self.chars[self.pos];
            match ch {
                '\n' => {
                    self.pos += 1;
                    self.line += 1;
                }
                c if c.is_whitespace() => self.pos += 1,
                '#' => {
                    let start = self.pos;
                    while self.pos < self.chars.len() && self.chars[self.pos] != '\n' {
                        self.pos += 1;
                    }
                    let content: String = self.chars[start..self.pos].iter().collect();
                    self.comments
                        .push(Comment::new(content, SourceLocation::new(self.path, self.line)));
                }
                '/' if self.peek(1) == Some('*') => self.lex_block_comment()?,
                '\'' | '"' => {
                    self.pos += 1;
                    self.lex_string(ch)?;
                }
                '$' => self.lex_varref(),
                '@' if self.peek(1) == Some('(') => self.lex_heredoc()?,
                c if c.is_ascii_digit() => self.lex_number(),
                c if c.is_alphabetic() || c == '_' => {
                    let word = self.lex_word();
                    match keyword(&word) {
                        Some(kw) => self.push(Tok::Kw(kw)),
                        None => self.push(Tok::Ident(word)),
                    }
                }
                _ => self.lex_punct()?,
            }
        }
        self.push(Tok::Eof);
        Ok((self.tokens, self.comments))
    }

    fn lex_block_comment(&mut self) -> Result<(), ParseError> {
        let start_line = self.line;
        let text_start = self.pos;
        self.pos += 2;
        loop {
            if self.pos >= self.chars.len() {
                return Err(ParseError::new(self.path, start_line, "unterminated block comment"));
            }
            if self.chars[self.pos] == '*' && self.peek(1) == Some('/') {
                self.pos += 2;
                break;
            }
            if self.chars[self.pos] == '\n' {
                self.line += 1;
            }
            self.pos += 1;
        }
        let content: String = self.chars[text_start..self.pos].iter().collect();
        self.comments
            .push(Comment::new(content, SourceLocation::new(self.path, start_line)));
        Ok(())
    }

    fn lex_word(&mut self) -> String {
        let start = self.pos;
        while self
            .peek(0)
            .is_some_and(|c| c.is_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn lex_varref(&mut self) {
        let start = self.pos;
        self.pos += 1; // $
        loop {
            if self.peek(0) == Some(':') && self.peek(1) == Some(':') {
                self.pos += 2;
                continue;
            }
            match self.peek(0) {
                Some(c) if c.is_alphanumeric() || c == '_' => self.pos += 1,
                _ => break,
            }
        }
        let raw: String = self.chars[start..self.pos].iter().collect();
        self.push(Tok::VarRef(raw));
    }

    fn lex_number(&mut self) {
        let start = self.pos;
        while self
            .peek(0)
            .is_some_and(|c| c.is_ascii_digit() || c == '_' || c == '.' || c == 'x')
        {
            // Stop a trailing dot from swallowing method-call syntax.
            if self.chars[self.pos] == '.'
                && !self.peek(1).is_some_and(|c| c.is_ascii_digit())
            {
                break;
            }
            self.pos += 1;
        }
        let raw: String = self.chars[start..self.pos].iter().collect();
        self.push(Tok::Number(raw));
    }

    fn lex_string(&mut self, quote: char) -> Result<(), ParseError> {
        let start_line = self.line;
        let mut text = String::new();
        loop {
            let Some(ch) = self.peek(0) else {
                return Err(ParseError::new(self.path, start_line, "unterminated string literal"));
            };
            self.pos += 1;
            if ch == quote {
                break;
            }
            match ch {
                '\\' => {
                    let Some(next) = self.peek(0) else {
                        return Err(ParseError::new(
                            self.path,
                            start_line,
                            "unterminated string literal",
                        ));
                    };
                    self.pos += 1;
                    if next == '\n' {
                        self.line += 1;
                    }
                    if quote == '"' {
                        text.push(match next {
                            'n' => '\n',
                            't' => '\t',
                            '$' => '$',
                            other => other,
                        });
                    } else if next == '\'' || next == '\\' {
                        text.push(next);
                    } else {
                        text.push('\\');
                        text.push(next);
                    }
                }
                '\n' => {
                    self.line += 1;
                    text.push('\n');
                }
                other => text.push(other),
            }
        }
        let interp = quote == '"' && looks_like_interp(&text);
        self.tokens.push(Token {
            tok: Tok::Str { text, interp },
            line: start_line,
        });
        Ok(())
    }

    /// `@("TAG"/L)` heredocs. The body runs from the next line to a
    /// terminator line `| TAG`; whatever follows the tag on that line
    /// (commas, closing braces) is fed back to the scanner.
    fn lex_heredoc(&mut self) -> Result<(), ParseError> {
        let start_line = self.line;
        self.pos += 2; // @(
        while self.peek(0).is_some_and(|c| c == ' ' || c == '\t') {
            self.pos += 1;
        }
        let quoted = if self.peek(0) == Some('"') {
            self.pos += 1;
            true
        } else {
            false
        };
        let tag_start = self.pos;
        while self
            .peek(0)
            .is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '-')
        {
            self.pos += 1;
        }
        let tag: String = self.chars[tag_start..self.pos].iter().collect();
        if tag.is_empty() {
            return Err(ParseError::new(self.path, start_line, "missing heredoc tag"));
        }
        if quoted {
            if self.peek(0) == Some('"') {
                self.pos += 1;
            } else {
                return Err(ParseError::new(self.path, start_line, "unterminated heredoc tag"));
            }
        }
        // Optional /L-style escape flags.
        if self.peek(0) == Some('/') {
            self.pos += 1;
            while self.peek(0).is_some_and(|c| c.is_alphabetic()) {
                self.pos += 1;
            }
        }
        while self.peek(0).is_some_and(|c| c == ' ' || c == '\t') {
            self.pos += 1;
        }
        if self.peek(0) == Some(')') {
            self.pos += 1;
        } else {
            return Err(ParseError::new(self.path, start_line, "malformed heredoc tag"));
        }

        let mut eol = self.pos;
        while eol < self.chars.len() && self.chars[eol] != '\n' {
            eol += 1;
        }
        let search = (eol + 1).max(self.heredoc_from);

        let mut cursor = search;
        let mut body = String::new();
        let mut lines = 0usize;
        loop {
            if cursor >= self.chars.len() {
                return Err(ParseError::new(self.path, start_line, "unterminated heredoc"));
            }
            let mut line_end = cursor;
            while line_end < self.chars.len() && self.chars[line_end] != '\n' {
                line_end += 1;
            }
            let line_text: String = self.chars[cursor..line_end].iter().collect();
            if let Some(tag_at) = terminator_offset(&line_text, &tag) {
                // Jump to just past the tag so the rest of the terminator
                // line (e.g. the `,` after `| TAG,`) is scanned normally.
                let resume = cursor + tag_at + tag.chars().count();
                self.skips.push_back((search, resume, lines));
                self.heredoc_from = (line_end + 1).min(self.chars.len());
                break;
            }
            body.push_str(&line_text);
            body.push('\n');
            lines += 1;
            cursor = line_end + 1;
        }

        let interp = quoted && looks_like_interp(&body);
        self.tokens.push(Token {
            tok: Tok::Str { text: body, interp },
            line: start_line,
        });
        Ok(())
    }

    fn lex_punct(&mut self) -> Result<(), ParseError> {
        const TWO: [&str; 12] = [
            "=>", "==", "!=", "<=", ">=", "->", "~>", "::", "+>", "=~", "!~", "<<",
        ];
        let a = self.chars[self.pos];
        if let Some(b) = self.peek(1) {
            let pair: String = [a, b].iter().collect();
            if let Some(found) = TWO.iter().find(|p| **p == pair) {
                self.pos += 2;
                self.push(Tok::Punct(found));
                return Ok(());
            }
        }
        const ONE: [(&str, char); 22] = [
            ("{", '{'),
            ("}", '}'),
            ("[", '['),
            ("]", ']'),
            ("(", '('),
            (")", ')'),
            (":", ':'),
            (",", ','),
            ("=", '='),
            ("?", '?'),
            (";", ';'),
            (".", '.'),
            ("<", '<'),
            (">", '>'),
            ("+", '+'),
            ("-", '-'),
            ("*", '*'),
            ("/", '/'),
            ("%", '%'),
            ("!", '!'),
            ("|", '|'),
            ("@", '@'),
        ];
        self.pos += 1;
        if let Some((s, _)) = ONE.iter().find(|(_, c)| *c == a) {
            self.push(Tok::Punct(s));
            Ok(())
        } else {
            Err(ParseError::new(
                self.path,
                self.line,
                format!("unexpected character `{a}`"),
            ))
        }
    }
}

/// Locates a heredoc terminator (`| TAG`, `|- TAG`, or bare `TAG`) and
/// returns the character offset of the tag within the line.
fn terminator_offset(line: &str, tag: &str) -> Option<usize> {
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() && chars[i].is_whitespace() {
        i += 1;
    }
    if chars.get(i) == Some(&'|') {
        i += 1;
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
    }
    if chars.get(i) == Some(&'-') {
        i += 1;
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
    }
    let tag_chars: Vec<char> = tag.chars().collect();
    if chars[i..].starts_with(&tag_chars) {
        let after = chars.get(i + tag_chars.len());
        let boundary = match after {
            None => true,
            Some(c) => !(c.is_alphanumeric() || *c == '_' || *c == '-'),
        };
        if boundary {
            return Some(i);
        }
    }
    None
}

#[derive(Default)]
struct Collected {
    atomic_units: Vec<AtomicUnit>,
    variables: Vec<Variable>,
    conditions: Vec<ConditionStatement>,
    unit_blocks: Vec<UnitBlock>,
}

impl Collected {
    fn merge(&mut self, other: Collected) {
        self.atomic_units.extend(other.atomic_units);
        self.variables.extend(other.variables);
        self.conditions.extend(other.conditions);
        self.unit_blocks.extend(other.unit_blocks);
    }
}

struct Parser<'a> {
    toks: &'a [Token],
    i: usize,
    path: &'a Path,
}

/// Parses one Puppet manifest into a file-level [`UnitBlock`].
pub fn parse_puppet(path: impl AsRef<Path>, source: &str) -> Result<UnitBlock, ParseError> {
    let path = path.as_ref();
    let (tokens, comments) = Lexer::new(path, source).run()?;
    let mut parser = Parser { toks: &tokens, i: 0, path };
    let body = parser.parse_items(false, 0)?;

    let mut block = UnitBlock::new(file_block_name(path), SourceLocation::new(path, 1));
    block.comments = comments;
    block.atomic_units = body.atomic_units;
    block.variables = body.variables;
    block.conditions = body.conditions;
    block.unit_blocks = body.unit_blocks;
    Ok(block)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i.min(self.toks.len() - 1)].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.i + 1).min(self.toks.len() - 1)].tok
    }

    fn line(&self) -> usize {
        self.toks[self.i.min(self.toks.len() - 1)].line
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i.min(self.toks.len() - 1)].clone();
        if self.i < self.toks.len() - 1 {
            self.i += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> ParseError {
        ParseError::new(
            self.path,
            self.line(),
            format!("expected {expected}, found {}", describe(self.peek())),
        )
    }

    fn expect_punct(&mut self, p: &str, what: &str) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Punct(q) if *q == p) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(what))
        }
    }

    /// `foo`, `foo::bar::baz` paths.
    fn parse_path(&mut self) -> Result<String, ParseError> {
        let mut name = String::new();
        if matches!(self.peek(), Tok::Punct("::")) {
            self.bump();
            name.push_str("::");
        }
        match self.bump().tok {
            Tok::Ident(s) => name.push_str(&s),
            ref other => {
                return Err(ParseError::new(
                    self.path,
                    self.line(),
                    format!("expected name, found {}", describe(other)),
                ))
            }
        }
        while matches!(self.peek(), Tok::Punct("::")) {
            self.bump();
            match self.bump().tok {
                Tok::Ident(s) => {
                    name.push_str("::");
                    name.push_str(&s);
                }
                ref other => {
                    return Err(ParseError::new(
                        self.path,
                        self.line(),
                        format!("expected name after `::`, found {}", describe(other)),
                    ))
                }
            }
        }
        Ok(name)
    }

    fn parse_items(&mut self, inside_braces: bool, depth: usize) -> Result<Collected, ParseError> {
        if depth > MAX_DEPTH {
            return Err(ParseError::new(self.path, self.line(), "nesting too deep"));
        }
        let mut out = Collected::default();
        loop {
            match self.peek() {
                Tok::Eof => {
                    if inside_braces {
                        return Err(self.err("`}`"));
                    }
                    break;
                }
                Tok::Punct("}") => {
                    if inside_braces {
                        break;
                    }
                    return Err(self.err("a statement"));
                }
                // Ordering arrows between adjacent statements.
                Tok::Punct("->") | Tok::Punct("~>") | Tok::Punct(";") => {
                    self.bump();
                }
                Tok::Kw(Kw::Class) => self.parse_class(&mut out, depth)?,
                Tok::Kw(Kw::Define) => self.parse_define(&mut out, depth)?,
                Tok::Kw(Kw::Node) => self.parse_node(&mut out, depth)?,
                Tok::Kw(Kw::Case) => self.parse_case(&mut out, depth)?,
                Tok::Kw(Kw::If) | Tok::Kw(Kw::Unless) => self.parse_if(&mut out, depth)?,
                Tok::VarRef(_) => self.parse_assignment(&mut out, depth)?,
                Tok::Ident(_) => self.parse_ident_statement(&mut out, depth)?,
                _ => return Err(self.err("a statement")),
            }
        }
        Ok(out)
    }

    fn parse_assignment(&mut self, out: &mut Collected, depth: usize) -> Result<(), ParseError> {
        let line = self.line();
        let raw = match self.bump().tok {
            Tok::VarRef(s) => s,
            _ => unreachable!("caller checked"),
        };
        self.expect_punct("=", "`=` after variable")?;
        let (value, has_var) = self.parse_value(line, out, depth)?;
        let name = raw.trim_start_matches('$').to_string();
        out.variables
            .push(Variable::new(name, value, has_var, SourceLocation::new(self.path, line)));
        Ok(())
    }

    fn parse_ident_statement(
        &mut self,
        out: &mut Collected,
        depth: usize,
    ) -> Result<(), ParseError> {
        let line = self.line();
        let name = self.parse_path()?;
        match self.peek() {
            // Resource declaration.
            Tok::Punct("{") => {
                self.bump();
                self.parse_resource_bodies(&name, line, out, depth)?;
                Ok(())
            }
            // `Package['x'] -> ...` style references: recognized, no IR.
            Tok::Punct("[") => {
                self.consume_balanced("[", "]")?;
                Ok(())
            }
            // Function-call statement: `warning("...")`.
            Tok::Punct("(") => {
                self.consume_balanced("(", ")")?;
                Ok(())
            }
            _ => {
                // `include apache, nginx` and friends.
                if matches!(name.as_str(), "include" | "require" | "contain" | "realize") {
                    loop {
                        match self.peek() {
                            Tok::Ident(_) | Tok::Punct("::") => {
                                self.parse_path()?;
                            }
                            Tok::Str { .. } => {
                                self.bump();
                            }
                            _ => return Err(self.err("a class name")),
                        }
                        if matches!(self.peek(), Tok::Punct(",")) {
                            self.bump();
                            continue;
                        }
                        break;
                    }
                    return Ok(());
                }
                Err(self.err("`{` to open a resource body"))
            }
        }
    }

    fn consume_balanced(&mut self, open: &str, close: &str) -> Result<(), ParseError> {
        let line = self.line();
        self.expect_punct(open, open)?;
        let mut depth = 1usize;
        loop {
            match self.peek() {
                Tok::Eof => {
                    return Err(ParseError::new(
                        self.path,
                        line,
                        format!("unterminated `{open}`"),
                    ))
                }
                Tok::Punct(p) if *p == open => {
                    depth += 1;
                    self.bump();
                }
                Tok::Punct(p) if *p == close => {
                    depth -= 1;
                    self.bump();
                    if depth == 0 {
                        return Ok(());
                    }
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    /// One or more `title: attrs` bodies separated by `;`, already past the
    /// opening brace. A body without a title (`Exec { path => ... }`
    /// defaults) becomes a unit with an empty name.
    fn parse_resource_bodies(
        &mut self,
        type_name: &str,
        decl_line: usize,
        out: &mut Collected,
        depth: usize,
    ) -> Result<(), ParseError> {
        loop {
            if matches!(self.peek(), Tok::Punct("}")) {
                self.bump();
                return Ok(());
            }
            let titles = self.parse_titles()?;
            let attrs = self.parse_attribute_list(out, depth)?;
            for title in &titles {
                let mut au = AtomicUnit::new(
                    title.clone(),
                    type_name,
                    SourceLocation::new(self.path, decl_line),
                );
                au.attributes = attrs.clone();
                out.atomic_units.push(au);
            }
            match self.peek() {
                Tok::Punct(";") => {
                    self.bump();
                }
                Tok::Punct("}") => {
                    self.bump();
                    return Ok(());
                }
                _ => return Err(self.err("`;` or `}` after resource body")),
            }
        }
    }

    /// Parses resource titles up to and including the `:`; an attribute
    /// list with no title yields one empty title.
    fn parse_titles(&mut self) -> Result<Vec<String>, ParseError> {
        // `attr => ...` directly: resource defaults, no title.
        if matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek2(), Tok::Punct("=>")) {
            return Ok(vec![String::new()]);
        }
        let titles = match self.peek().clone() {
            Tok::Str { text, .. } => {
                self.bump();
                vec![text]
            }
            Tok::VarRef(raw) => {
                self.bump();
                vec![raw]
            }
            Tok::Ident(_) => vec![self.parse_path()?],
            Tok::Kw(Kw::Default) => {
                self.bump();
                vec!["default".to_string()]
            }
            Tok::Punct("[") => {
                self.bump();
                let mut titles = Vec::new();
                loop {
                    match self.peek().clone() {
                        Tok::Str { text, .. } => {
                            self.bump();
                            titles.push(text);
                        }
                        Tok::VarRef(raw) => {
                            self.bump();
                            titles.push(raw);
                        }
                        Tok::Ident(_) => titles.push(self.parse_path()?),
                        Tok::Punct("]") => {
                            self.bump();
                            break;
                        }
                        _ => return Err(self.err("a resource title")),
                    }
                    match self.peek() {
                        Tok::Punct(",") => {
                            self.bump();
                        }
                        Tok::Punct("]") => {
                            self.bump();
                            break;
                        }
                        _ => return Err(self.err("`,` or `]` in title list")),
                    }
                }
                titles
            }
            _ => return Err(self.err("a resource title")),
        };
        self.expect_punct(":", "`:` after resource title")?;
        Ok(titles)
    }

    fn parse_attribute_list(
        &mut self,
        out: &mut Collected,
        depth: usize,
    ) -> Result<Vec<Attribute>, ParseError> {
        let mut attrs = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Punct("}") | Tok::Punct(";") => break,
                Tok::Ident(_) | Tok::Kw(_) => {
                    let line = self.line();
                    let name = match self.bump().tok {
                        Tok::Ident(s) => s,
                        Tok::Kw(k) => kw_text(k).to_string(),
                        _ => unreachable!("peek checked"),
                    };
                    self.expect_punct("=>", "`=>` after attribute name")?;
                    let (value, has_var) = self.parse_value(line, out, depth)?;
                    attrs.push(Attribute::new(
                        name,
                        value,
                        has_var,
                        SourceLocation::new(self.path, line),
                    ));
                    match self.peek() {
                        Tok::Punct(",") => {
                            self.bump();
                        }
                        Tok::Punct("}") | Tok::Punct(";") => break,
                        _ => return Err(self.err("`,` or `}` after attribute value")),
                    }
                }
                // `* => $hash` splat: consume and drop.
                Tok::Punct("*") => {
                    let line = self.line();
                    self.bump();
                    self.expect_punct("=>", "`=>` after `*`")?;
                    let _ = self.parse_value(line, out, depth)?;
                    if matches!(self.peek(), Tok::Punct(",")) {
                        self.bump();
                    }
                }
                _ => return Err(self.err("an attribute name")),
            }
        }
        Ok(attrs)
    }

    /// Parses a value expression. `stmt_line` anchors any selector chains
    /// produced inside; they bubble out through `out`.
    fn parse_value(
        &mut self,
        stmt_line: usize,
        out: &mut Collected,
        depth: usize,
    ) -> Result<(Value, bool), ParseError> {
        if depth > MAX_DEPTH {
            return Err(ParseError::new(self.path, self.line(), "nesting too deep"));
        }
        let start = self.i;
        let primary: (Value, bool) = match self.peek().clone() {
            Tok::Str { text, interp } => {
                self.bump();
                (Value::Str(text), interp)
            }
            Tok::Number(raw) => {
                self.bump();
                let clean = raw.replace('_', "");
                if let Ok(i) = clean.parse::<i64>() {
                    (Value::Int(i), false)
                } else if let Ok(f) = clean.parse::<f64>() {
                    (Value::Float(f), false)
                } else {
                    (Value::Str(raw), false)
                }
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                (Value::Bool(true), false)
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                (Value::Bool(false), false)
            }
            Tok::Kw(Kw::Undef) => {
                self.bump();
                (Value::Null, false)
            }
            Tok::Kw(Kw::Default) => {
                self.bump();
                (Value::Ident("default".to_string()), false)
            }
            Tok::VarRef(raw) => {
                self.bump();
                (Value::Ident(raw), true)
            }
            Tok::Ident(_) => {
                let name = self.parse_path()?;
                if matches!(self.peek(), Tok::Punct("(")) {
                    self.consume_balanced("(", ")")?;
                    let raw = self.render(start);
                    (Value::Ident(raw), true)
                } else {
                    // Bareword constant (`present`, `installed`, ...).
                    (Value::Ident(name), false)
                }
            }
            Tok::Punct("[") => {
                self.bump();
                let mut values = Vec::new();
                let mut has_var = false;
                loop {
                    if matches!(self.peek(), Tok::Punct("]")) {
                        self.bump();
                        break;
                    }
                    let (v, h) = self.parse_value(stmt_line, out, depth + 1)?;
                    values.push(v);
                    has_var |= h;
                    match self.peek() {
                        Tok::Punct(",") => {
                            self.bump();
                        }
                        Tok::Punct("]") => {
                            self.bump();
                            break;
                        }
                        _ => return Err(self.err("`,` or `]` in array")),
                    }
                }
                (Value::List(values), has_var)
            }
            Tok::Punct("{") => {
                self.consume_balanced("{", "}")?;
                let raw = self.render(start);
                let has_var = self.slice_has_var(start);
                (Value::Ident(raw), has_var)
            }
            Tok::Punct("-") => {
                // Negative number.
                self.bump();
                match self.peek().clone() {
                    Tok::Number(raw) => {
                        self.bump();
                        let clean = raw.replace('_', "");
                        if let Ok(i) = clean.parse::<i64>() {
                            (Value::Int(-i), false)
                        } else if let Ok(f) = clean.parse::<f64>() {
                            (Value::Float(-f), false)
                        } else {
                            (Value::Str(format!("-{raw}")), false)
                        }
                    }
                    _ => return Err(self.err("a number after `-`")),
                }
            }
            Tok::Punct("!") => {
                self.bump();
                let (_, _) = self.parse_value(stmt_line, out, depth + 1)?;
                let raw = self.render(start);
                (Value::Ident(raw), self.slice_has_var(start))
            }
            _ => return Err(self.err("a value")),
        };

        let mut result = primary;
        loop {
            match self.peek() {
                // Indexing / deep access: `$facts['mysql']['pass']`.
                Tok::Punct("[") => {
                    self.consume_balanced("[", "]")?;
                    result = (Value::Ident(self.render(start)), self.slice_has_var(start));
                }
                // Method call: `lookup('x').dig(...)`.
                Tok::Punct(".") => {
                    self.bump();
                    if matches!(self.peek(), Tok::Ident(_)) {
                        self.bump();
                    }
                    if matches!(self.peek(), Tok::Punct("(")) {
                        self.consume_balanced("(", ")")?;
                    }
                    result = (Value::Ident(self.render(start)), true);
                }
                // Selector: `$os ? { 'debian' => ..., default => ... }`.
                Tok::Punct("?") => {
                    self.bump();
                    self.parse_selector(stmt_line, out, depth + 1)?;
                    result = (Value::Ident(self.render(start)), true);
                }
                // Binary operators fold the whole expression to raw text.
                Tok::Punct(p)
                    if matches!(
                        *p,
                        "+" | "-" | "*" | "/" | "%" | "<<" | "==" | "!=" | "<" | ">" | "<="
                            | ">=" | "=~" | "!~"
                    ) =>
                {
                    self.bump();
                    let (_, _) = self.parse_value(stmt_line, out, depth + 1)?;
                    result = (Value::Ident(self.render(start)), self.slice_has_var(start));
                }
                Tok::Kw(Kw::And) | Tok::Kw(Kw::Or) | Tok::Kw(Kw::In) => {
                    self.bump();
                    let (_, _) = self.parse_value(stmt_line, out, depth + 1)?;
                    result = (Value::Ident(self.render(start)), self.slice_has_var(start));
                }
                _ => break,
            }
        }
        Ok(result)
    }

    fn render(&self, start: usize) -> String {
        let mut parts = Vec::new();
        for t in &self.toks[start..self.i] {
            let s = match &t.tok {
                Tok::Ident(w) => w.clone(),
                Tok::VarRef(v) => v.clone(),
                Tok::Str { text, .. } => format!("'{text}'"),
                Tok::Number(n) => n.clone(),
                Tok::Kw(k) => kw_text(*k).to_string(),
                Tok::Punct(p) => p.to_string(),
                Tok::Eof => String::new(),
            };
            parts.push(s);
        }
        parts.join(" ")
    }

    fn slice_has_var(&self, start: usize) -> bool {
        self.toks[start..self.i].iter().any(|t| match &t.tok {
            Tok::VarRef(_) => true,
            Tok::Str { interp, .. } => *interp,
            _ => false,
        })
    }

    /// `? { key => value, ... }`, with the `?` already consumed. Chain
    /// nodes all sit on the owning statement's line.
    fn parse_selector(
        &mut self,
        stmt_line: usize,
        out: &mut Collected,
        depth: usize,
    ) -> Result<(), ParseError> {
        self.expect_punct("{", "`{` after `?`")?;
        let mut branches = Vec::new();
        loop {
            if matches!(self.peek(), Tok::Punct("}")) {
                self.bump();
                break;
            }
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.err("`}` to close selector"));
            }
            let key_start = self.i;
            let mut is_default = false;
            // Collect the key up to `=>`.
            loop {
                match self.peek() {
                    Tok::Punct("=>") => break,
                    Tok::Eof => return Err(self.err("`=>` in selector")),
                    Tok::Kw(Kw::Default) => {
                        is_default = true;
                        self.bump();
                    }
                    _ => {
                        self.bump();
                    }
                }
            }
            let key = self.render(key_start);
            self.bump(); // =>
            let (_, _) = self.parse_value(stmt_line, out, depth)?;
            let location = SourceLocation::new(self.path, stmt_line);
            if is_default {
                branches.push(ConditionStatement::new_default(ConditionType::Switch, location));
            } else {
                branches.push(ConditionStatement::new(ConditionType::Switch, key, location));
            }
            if matches!(self.peek(), Tok::Punct(",")) {
                self.bump();
            }
        }
        if let Some(head) = link_chain(branches) {
            out.conditions.push(head);
        }
        Ok(())
    }

    fn parse_case(&mut self, out: &mut Collected, depth: usize) -> Result<(), ParseError> {
        let case_line = self.line();
        self.bump(); // case
        // Subject expression: raw tokens up to the opening brace.
        let mut guard_depth = 0i32;
        loop {
            match self.peek() {
                Tok::Eof => return Err(self.err("`{` after case expression")),
                Tok::Punct("{") if guard_depth == 0 => break,
                Tok::Punct(p) if matches!(*p, "(" | "[") => {
                    guard_depth += 1;
                    self.bump();
                }
                Tok::Punct(p) if matches!(*p, ")" | "]") => {
                    guard_depth -= 1;
                    self.bump();
                }
                _ => {
                    self.bump();
                }
            }
        }
        self.bump(); // {

        let mut branches = Vec::new();
        let mut first = true;
        loop {
            match self.peek() {
                Tok::Punct("}") => {
                    self.bump();
                    break;
                }
                Tok::Eof => return Err(self.err("`}` to close case statement")),
                _ => {}
            }
            let branch_line = if first { case_line } else { self.line() };
            first = false;
            // Guard list up to `:`.
            let guard_start = self.i;
            let mut is_default = false;
            let mut gd = 0i32;
            loop {
                match self.peek() {
                    Tok::Eof => return Err(self.err("`:` after case guard")),
                    Tok::Punct(":") if gd == 0 => break,
                    Tok::Punct(p) if matches!(*p, "(" | "[") => {
                        gd += 1;
                        self.bump();
                    }
                    Tok::Punct(p) if matches!(*p, ")" | "]") => {
                        gd -= 1;
                        self.bump();
                    }
                    Tok::Kw(Kw::Default) => {
                        is_default = true;
                        self.bump();
                    }
                    _ => {
                        self.bump();
                    }
                }
            }
            let guard = self.render(guard_start);
            self.bump(); // :
            self.expect_punct("{", "`{` to open case branch")?;
            let body = self.parse_items(true, depth + 1)?;
            self.expect_punct("}", "`}` to close case branch")?;
            out.merge(body);

            let location = SourceLocation::new(self.path, branch_line);
            if is_default {
                branches.push(ConditionStatement::new_default(ConditionType::Switch, location));
            } else {
                branches.push(ConditionStatement::new(ConditionType::Switch, guard, location));
            }
        }
        if let Some(head) = link_chain(branches) {
            out.conditions.push(head);
        }
        Ok(())
    }

    fn parse_if(&mut self, out: &mut Collected, depth: usize) -> Result<(), ParseError> {
        let if_line = self.line();
        self.bump(); // if / unless
        let mut branches = Vec::new();
        let mut guard_line = if_line;
        loop {
            // Guard expression up to `{`.
            let guard_start = self.i;
            let mut gd = 0i32;
            loop {
                match self.peek() {
                    Tok::Eof => return Err(self.err("`{` after condition")),
                    Tok::Punct("{") if gd == 0 => break,
                    Tok::Punct(p) if matches!(*p, "(" | "[") => {
                        gd += 1;
                        self.bump();
                    }
                    Tok::Punct(p) if matches!(*p, ")" | "]") => {
                        gd -= 1;
                        self.bump();
                    }
                    _ => {
                        self.bump();
                    }
                }
            }
            let guard = self.render(guard_start);
            self.bump(); // {
            let body = self.parse_items(true, depth + 1)?;
            self.expect_punct("}", "`}` to close branch")?;
            out.merge(body);
            branches.push(ConditionStatement::new(
                ConditionType::If,
                guard,
                SourceLocation::new(self.path, guard_line),
            ));

            match self.peek() {
                Tok::Kw(Kw::Elsif) => {
                    guard_line = self.line();
                    self.bump();
                }
                Tok::Kw(Kw::Else) => {
                    let else_line = self.line();
                    self.bump();
                    self.expect_punct("{", "`{` after else")?;
                    let body = self.parse_items(true, depth + 1)?;
                    self.expect_punct("}", "`}` to close else branch")?;
                    out.merge(body);
                    branches.push(ConditionStatement::new_default(
                        ConditionType::If,
                        SourceLocation::new(self.path, else_line),
                    ));
                    break;
                }
                _ => break,
            }
        }
        if let Some(head) = link_chain(branches) {
            out.conditions.push(head);
        }
        Ok(())
    }

    fn parse_class(&mut self, out: &mut Collected, depth: usize) -> Result<(), ParseError> {
        let line = self.line();
        self.bump(); // class
        match self.peek() {
            // Resource-style declaration: `class { 'apache': ... }`.
            Tok::Punct("{") => {
                self.bump();
                self.parse_resource_bodies("class", line, out, depth)
            }
            // `Class['apache']` style reference.
            Tok::Punct("[") => self.consume_balanced("[", "]"),
            _ => {
                let name = self.parse_path()?;
                let mut block = UnitBlock::new(name, SourceLocation::new(self.path, line));
                if matches!(self.peek(), Tok::Punct("(")) {
                    self.parse_parameters(&mut block, out, depth)?;
                }
                if matches!(self.peek(), Tok::Kw(Kw::Inherits)) {
                    self.bump();
                    self.parse_path()?;
                }
                self.expect_punct("{", "`{` to open class body")?;
                let body = self.parse_items(true, depth + 1)?;
                self.expect_punct("}", "`}` to close class body")?;
                fill_block(&mut block, body);
                out.unit_blocks.push(block);
                Ok(())
            }
        }
    }

    fn parse_define(&mut self, out: &mut Collected, depth: usize) -> Result<(), ParseError> {
        let line = self.line();
        self.bump(); // define
        let name = self.parse_path()?;
        let mut block = UnitBlock::new(name, SourceLocation::new(self.path, line));
        if matches!(self.peek(), Tok::Punct("(")) {
            self.parse_parameters(&mut block, out, depth)?;
        }
        self.expect_punct("{", "`{` to open defined type body")?;
        let body = self.parse_items(true, depth + 1)?;
        self.expect_punct("}", "`}` to close defined type body")?;
        fill_block(&mut block, body);
        out.unit_blocks.push(block);
        Ok(())
    }

    fn parse_node(&mut self, out: &mut Collected, depth: usize) -> Result<(), ParseError> {
        let line = self.line();
        self.bump(); // node
        let name = match self.peek().clone() {
            Tok::Str { text, .. } => {
                self.bump();
                text
            }
            Tok::Kw(Kw::Default) => {
                self.bump();
                "default".to_string()
            }
            Tok::Ident(_) => self.parse_path()?,
            _ => return Err(self.err("a node name")),
        };
        let mut block = UnitBlock::new(name, SourceLocation::new(self.path, line));
        self.expect_punct("{", "`{` to open node body")?;
        let body = self.parse_items(true, depth + 1)?;
        self.expect_punct("}", "`}` to close node body")?;
        fill_block(&mut block, body);
        out.unit_blocks.push(block);
        Ok(())
    }

    /// Class/define parameter lists. Parameters with defaults become
    /// variables of the block; bare parameters carry no value and are
    /// skipped.
    fn parse_parameters(
        &mut self,
        block: &mut UnitBlock,
        out: &mut Collected,
        depth: usize,
    ) -> Result<(), ParseError> {
        let open_line = self.line();
        self.expect_punct("(", "`(`")?;
        loop {
            match self.peek().clone() {
                Tok::Punct(")") => {
                    self.bump();
                    return Ok(());
                }
                Tok::Eof => {
                    return Err(ParseError::new(self.path, open_line, "unterminated parameter list"))
                }
                Tok::VarRef(raw) => {
                    let line = self.line();
                    self.bump();
                    if matches!(self.peek(), Tok::Punct("=")) {
                        self.bump();
                        let (value, has_var) = self.parse_value(line, out, depth + 1)?;
                        let name = raw.trim_start_matches('$').to_string();
                        block.variables.push(Variable::new(
                            name,
                            value,
                            has_var,
                            SourceLocation::new(self.path, line),
                        ));
                    }
                    if matches!(self.peek(), Tok::Punct(",")) {
                        self.bump();
                    }
                }
                // Type annotations (`String $x`) and anything else before
                // the variable name.
                _ => {
                    self.bump();
                }
            }
        }
    }
}

fn fill_block(block: &mut UnitBlock, body: Collected) {
    block.atomic_units.extend(body.atomic_units);
    block.variables.extend(body.variables);
    block.conditions.extend(body.conditions);
    block.unit_blocks.extend(body.unit_blocks);
}

/// Threads branches into an else-chain (default branch last) and returns
/// the head.
fn link_chain(branches: Vec<ConditionStatement>) -> Option<ConditionStatement> {
    let mut regular: Vec<ConditionStatement> = Vec::new();
    let mut default: Option<ConditionStatement> = None;
    for b in branches {
        if b.is_default() {
            if default.is_none() {
                default = Some(b);
            }
        } else {
            regular.push(b);
        }
    }
    let mut chain = regular;
    if let Some(d) = default {
        chain.push(d);
    }
    while chain.len() > 1 {
        let tail = chain.pop().expect("len checked");
        let _ = chain.last_mut().expect("len checked").set_else(tail);
    }
    chain.pop()
}
