//! Chef frontend: a hand-written lexer and recovering parser for the
//! resource-declaration subset of Chef recipes.
//!
//! Recipes are Ruby programs, but the security-relevant surface is the
//! declarative subset: resource blocks, attribute lines inside them,
//! top-level assignments, and `case`/`if` statements. This parser handles
//! exactly that subset and *recovers* from everything else by skipping to
//! the next line, so one exotic Ruby construct never hides the rest of a
//! recipe. A [`ParseError`] is only returned for input that cannot be
//! resynchronized at all: unterminated strings, unterminated heredocs,
//! resource blocks left open at end of file, and pathological nesting.
//!
//! Mapping to IR:
//!
//! * `type 'name' do ... end` becomes an [`AtomicUnit`];
//! * `attr value` lines inside a resource become [`Attribute`]s;
//! * top-level `name = value` becomes a [`Variable`];
//! * `case`/`when` becomes a `SWITCH` chain and block-form `if`/`elsif`
//!   an `IF` chain, with branch bodies flattened into the enclosing scope;
//! * values keep their literal type where the literal is simple; anything
//!   computed is kept as raw text with `has_variable = true`, as are
//!   `#{...}` interpolations and bare identifier references.

use std::collections::VecDeque;
use std::path::Path;

use super::{file_block_name, ParseError, MAX_DEPTH};
use crate::ir::{
    AtomicUnit, Attribute, Comment, ConditionStatement, ConditionType, SourceLocation, UnitBlock,
    Value, Variable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kw {
    Do,
    End,
    Case,
    When,
    Else,
    Elsif,
    If,
    Unless,
    Then,
    Nil,
    True,
    False,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str { text: String, interp: bool },
    Symbol(String),
    Number(String),
    Kw(Kw),
    Punct(&'static str),
    Newline,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
}

struct Lexed {
    tokens: Vec<Token>,
    comments: Vec<Comment>,
}

struct Lexer<'a> {
    path: &'a Path,
    chars: Vec<char>,
    pos: usize,
    line: usize,
    tokens: Vec<Token>,
    comments: Vec<Comment>,
    /// Heredoc bodies already consumed ahead of the scan position:
    /// `(start, end, lines)` regions the main loop must jump over.
    skips: VecDeque<(usize, usize, usize)>,
    /// Where the next heredoc body search may begin (so two heredocs on
    /// one line take consecutive bodies).
    heredoc_from: usize,
}

fn keyword(word: &str) -> Option<Kw> {
    Some(match word {
        "do" => Kw::Do,
        "end" => Kw::End,
        "case" => Kw::Case,
        "when" => Kw::When,
        "else" => Kw::Else,
        "elsif" => Kw::Elsif,
        "if" => Kw::If,
        "unless" => Kw::Unless,
        "then" => Kw::Then,
        "nil" => Kw::Nil,
        "true" => Kw::True,
        "false" => Kw::False,
        _ => return None,
    })
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

    fn run(mut self) -> Result<Lexed, ParseError> {
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
                    self.push(Tok::Newline);
                    self.pos += 1;
                    self.line += 1;
                }
                ';' => {
                    self.push(Tok::Newline);
                    self.pos += 1;
                }
                c if c.is_whitespace() => self.pos += 1,
                '#' => self.lex_comment(),
                '\'' | '"' => {
                    self.pos += 1;
                    self.lex_string(ch)?;
                }
                ':' if self.peek(1).is_some_and(is_ident_start) => {
                    self.pos += 1;
                    let word = self.lex_word();
                    self.push(Tok::Symbol(word));
                }
                c if c.is_ascii_digit() => self.lex_number(),
                c if is_ident_start(c) => {
                    let word = self.lex_word();
                    match keyword(&word) {
                        Some(kw) => self.push(Tok::Kw(kw)),
                        None => self.push(Tok::Ident(word)),
                    }
                }
                '<' if self.peek(1) == Some('<') && self.heredoc_follows() => {
                    self.lex_heredoc()?;
                }
                _ => self.lex_punct(),
            }
        }
        self.push(Tok::Eof);
        Ok(Lexed { tokens: self.tokens, comments: self.comments })
    }

    fn lex_comment(&mut self) {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos] != '\n' {
            self.pos += 1;
        }
        let content: String = self.chars[start..self.pos].iter().collect();
        self.comments
            .push(Comment::new(content, SourceLocation::new(self.path, self.line)));
    }

    fn lex_word(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && is_ident_continue(self.chars[self.pos]) {
            self.pos += 1;
        }
        // Ruby predicate/bang method names.
        if matches!(self.peek(0), Some('?') | Some('!'))
            && !matches!(self.peek(1), Some('=')) // keep `x != y` intact
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn lex_number(&mut self) {
        let start = self.pos;
        while self
            .peek(0)
            .is_some_and(|c| c.is_ascii_digit() || c == '_')
        {
            self.pos += 1;
        }
        if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            while self.peek(0).is_some_and(|c| c.is_ascii_digit() || c == '_') {
                self.pos += 1;
            }
        }
        let raw: String = self.chars[start..self.pos].iter().collect();
        self.push(Tok::Number(raw));
    }

    fn lex_string(&mut self, quote: char) -> Result<(), ParseError> {
        let start_line = self.line;
        let mut text = String::new();
        let mut interp = false;
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
                '#' if quote == '"' && self.peek(0) == Some('{') => {
                    interp = true;
                    text.push('#');
                }
                other => text.push(other),
            }
        }
        self.tokens.push(Token {
            tok: Tok::Str { text, interp },
            line: start_line,
        });
        Ok(())
    }

    /// Decides whether `<<` starts a heredoc rather than a shift/append.
    fn heredoc_follows(&self) -> bool {
        match self.peek(2) {
            Some('-') | Some('~') | Some('\'') | Some('"') => true,
            Some(c) => c.is_ascii_uppercase() || c == '_',
            None => false,
        }
    }

    fn lex_heredoc(&mut self) -> Result<(), ParseError> {
        let start_line = self.line;
        self.pos += 2; // <<
        if matches!(self.peek(0), Some('-') | Some('~')) {
            self.pos += 1;
        }
        let quote = match self.peek(0) {
            Some(q @ ('\'' | '"')) => {
                self.pos += 1;
                Some(q)
            }
            _ => None,
        };
        let tag_start = self.pos;
        while self.peek(0).is_some_and(is_ident_continue) {
            self.pos += 1;
        }
        let tag: String = self.chars[tag_start..self.pos].iter().collect();
        if let Some(q) = quote {
            if self.peek(0) == Some(q) {
                self.pos += 1;
            } else {
                return Err(ParseError::new(self.path, start_line, "unterminated heredoc tag"));
            }
        }
        if tag.is_empty() {
            return Err(ParseError::new(self.path, start_line, "missing heredoc tag"));
        }

        // Body starts on the line after the introducer (or after a previous
        // heredoc's terminator when several share a line).
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
            lines += 1;
            if line_text.trim() == tag {
                let skip_end = (line_end + 1).min(self.chars.len());
                self.skips.push_back((search, skip_end, lines));
                self.heredoc_from = skip_end;
                break;
            }
            body.push_str(&line_text);
            body.push('\n');
            cursor = line_end + 1;
        }

        let interp = quote != Some('\'') && body.contains("#{");
        self.tokens.push(Token {
            tok: Tok::Str { text: body, interp },
            line: start_line,
        });
        Ok(())
    }

    fn lex_punct(&mut self) {
        const TWO: [&str; 14] = [
            "=>", "==", "!=", "<=", ">=", "<<", "::", "&&", "||", "+=", "-=", "**", "=~", "->",
        ];
        let a = self.chars[self.pos];
        if let Some(b) = self.peek(1) {
            let pair = [a, b].iter().collect::<String>();
            if let Some(found) = TWO.iter().find(|p| **p == pair) {
                self.pos += 2;
                self.push(Tok::Punct(found));
                return;
            }
        }
        const ONE: [(&str, char); 24] = [
            ("=", '='),
            ("<", '<'),
            (">", '>'),
            ("+", '+'),
            ("-", '-'),
            ("*", '*'),
            ("/", '/'),
            ("%", '%'),
            ("(", '('),
            (")", ')'),
            ("[", '['),
            ("]", ']'),
            ("{", '{'),
            ("}", '}'),
            (",", ','),
            (".", '.'),
            ("&", '&'),
            ("|", '|'),
            ("!", '!'),
            ("?", '?'),
            ("@", '@'),
            ("$", '$'),
            (":", ':'),
            ("~", '~'),
        ];
        self.pos += 1;
        if let Some((s, _)) = ONE.iter().find(|(_, c)| *c == a) {
            self.push(Tok::Punct(s));
        }
        // Anything else (backticks, stray unicode) is dropped: the parser
        // recovers line by line anyway.
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Parsed pieces that float up to the closest enclosing block.
#[derive(Default)]
struct Collected {
    atomic_units: Vec<AtomicUnit>,
    variables: Vec<Variable>,
    conditions: Vec<ConditionStatement>,
    unit_blocks: Vec<UnitBlock>,
    /// Only populated while parsing a resource body.
    attributes: Vec<Attribute>,
}

impl Collected {
    /// Folds another collection into this one, attributes included.
    fn merge(&mut self, other: Collected) {
        self.atomic_units.extend(other.atomic_units);
        self.variables.extend(other.variables);
        self.conditions.extend(other.conditions);
        self.unit_blocks.extend(other.unit_blocks);
        self.attributes.extend(other.attributes);
    }
}

/// What ends the statement list currently being parsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stop {
    /// End of file.
    TopLevel,
    /// A balancing `end`; reaching EOF first is an error at `open_line`.
    BlockEnd { open_line: usize },
    /// The next `when`/`elsif`/`else`/`end` of the surrounding statement.
    Branch,
}

/// Whether bare `ident value` lines are resource attributes here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ctx {
    TopLevel,
    ResourceBody,
}

struct Cursor<'a> {
    toks: &'a [Token],
    i: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i.min(self.toks.len() - 1)].tok
    }

    fn line(&self) -> usize {
        self.toks[self.i.min(self.toks.len() - 1)].line
    }

    fn bump(&mut self) -> &Token {
        let t = &self.toks[self.i.min(self.toks.len() - 1)];
        if self.i < self.toks.len() - 1 {
            self.i += 1;
        }
        t
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek(), Tok::Newline) {
            self.bump();
        }
    }

    /// Recovery primitive: drop everything up to and including the next
    /// line break.
    fn skip_line(&mut self) {
        while !matches!(self.peek(), Tok::Newline | Tok::Eof) {
            self.bump();
        }
        if matches!(self.peek(), Tok::Newline) {
            self.bump();
        }
    }

    /// Looks ahead on the current logical line for a block-opening `do`
    /// outside any brackets.
    fn line_has_do(&self) -> bool {
        let mut depth = 0i32;
        for t in &self.toks[self.i..] {
            match &t.tok {
                Tok::Newline | Tok::Eof => return false,
                Tok::Punct(p) if matches!(*p, "(" | "[" | "{") => depth += 1,
                Tok::Punct(p) if matches!(*p, ")" | "]" | "}") => depth -= 1,
                Tok::Kw(Kw::Do) if depth <= 0 => return true,
                _ => {}
            }
        }
        false
    }
}

/// Parses one Chef recipe into a file-level [`UnitBlock`].
pub fn parse_chef(path: impl AsRef<Path>, source: &str) -> Result<UnitBlock, ParseError> {
    let path = path.as_ref();
    let lexed = Lexer::new(path, source).run()?;
    let mut cur = Cursor { toks: &lexed.tokens, i: 0, path };
    let body = parse_stmts(&mut cur, Stop::TopLevel, Ctx::TopLevel, 0)?;

    let mut block = UnitBlock::new(file_block_name(path), SourceLocation::new(path, 1));
    block.comments = lexed.comments;
    block.atomic_units = body.atomic_units;
    block.variables = body.variables;
    block.conditions = body.conditions;
    block.unit_blocks = body.unit_blocks;
    Ok(block)
}

fn parse_stmts(
    cur: &mut Cursor,
    stop: Stop,
    ctx: Ctx,
    depth: usize,
) -> Result<Collected, ParseError> {
    if depth > MAX_DEPTH {
        return Err(ParseError::new(cur.path, cur.line(), "nesting too deep"));
    }
    let mut out = Collected::default();
    loop {
        cur.skip_newlines();
        match cur.peek() {
            Tok::Eof => match stop {
                Stop::TopLevel | Stop::Branch => break,
                Stop::BlockEnd { open_line } => {
                    return Err(ParseError::new(
                        cur.path,
                        open_line,
                        "unterminated block: missing `end`",
                    ))
                }
            },
            Tok::Kw(Kw::End) => match stop {
                Stop::TopLevel => {
                    // Stray `end` (for a construct we skipped): drop it.
                    cur.bump();
                }
                Stop::BlockEnd { .. } | Stop::Branch => break,
            },
            Tok::Kw(Kw::When) | Tok::Kw(Kw::Else) | Tok::Kw(Kw::Elsif) => match stop {
                Stop::Branch => break,
                _ => cur.skip_line(),
            },
            Tok::Kw(Kw::Case) => {
                let parsed = parse_case(cur, ctx, depth)?;
                out.merge(parsed);
            }
            Tok::Kw(Kw::If) | Tok::Kw(Kw::Unless) => {
                let parsed = parse_if(cur, ctx, depth)?;
                out.merge(parsed);
            }
            Tok::Ident(_) => parse_ident_stmt(cur, ctx, depth, &mut out)?,
            _ => {
                // Unrecognized statement. If it opens a block (`%w(..).each
                // do`), dive into the body so its statements still count.
                if cur.line_has_do() {
                    consume_to_do(cur);
                    let body = parse_block_body(cur, ctx, depth)?;
                    out.merge(body);
                } else {
                    cur.skip_line();
                }
            }
        }
    }
    Ok(out)
}

/// Consumes up to and including a `do` known to be on this line, plus any
/// `|params|`.
fn consume_to_do(cur: &mut Cursor) {
    while !matches!(cur.peek(), Tok::Kw(Kw::Do) | Tok::Newline | Tok::Eof) {
        cur.bump();
    }
    if matches!(cur.peek(), Tok::Kw(Kw::Do)) {
        cur.bump();
    }
    if matches!(cur.peek(), Tok::Punct("|")) {
        cur.bump();
        while !matches!(cur.peek(), Tok::Punct("|") | Tok::Newline | Tok::Eof) {
            cur.bump();
        }
        if matches!(cur.peek(), Tok::Punct("|")) {
            cur.bump();
        }
    }
}

/// Parses statements up to the balancing `end` and consumes it.
fn parse_block_body(cur: &mut Cursor, ctx: Ctx, depth: usize) -> Result<Collected, ParseError> {
    let open_line = cur.line();
    let body = parse_stmts(cur, Stop::BlockEnd { open_line }, ctx, depth + 1)?;
    if matches!(cur.peek(), Tok::Kw(Kw::End)) {
        cur.bump();
    }
    Ok(body)
}

fn parse_ident_stmt(
    cur: &mut Cursor,
    ctx: Ctx,
    depth: usize,
    out: &mut Collected,
) -> Result<(), ParseError> {
    let line = cur.line();
    let name = match &cur.bump().tok {
        Tok::Ident(s) => s.clone(),
        _ => unreachable!("caller checked for an identifier"),
    };

    // `name = value` (a single `=`, not `==`).
    if matches!(cur.peek(), Tok::Punct("=")) {
        cur.bump();
        let (value, has_var) = parse_value_expr(cur);
        out.variables
            .push(Variable::new(name, value, has_var, SourceLocation::new(cur.path, line)));
        return Ok(());
    }

    // Method chains (`list.each do`, `node.default[..] = ..`) are not
    // resources; run any block body inline, otherwise drop the line.
    if matches!(cur.peek(), Tok::Punct(".")) {
        if cur.line_has_do() {
            consume_to_do(cur);
            let body = parse_block_body(cur, ctx, depth)?;
            out.merge(body);
        } else {
            cur.skip_line();
        }
        return Ok(());
    }

    if cur.line_has_do() {
        // Resource declaration: `type 'name' [args] do ... end`.
        let mut au_name = String::new();
        while !matches!(cur.peek(), Tok::Kw(Kw::Do) | Tok::Newline | Tok::Eof) {
            if au_name.is_empty() {
                match cur.peek() {
                    Tok::Str { text, .. } => au_name = text.clone(),
                    Tok::Symbol(s) => au_name = s.clone(),
                    _ => {}
                }
            }
            cur.bump();
        }
        if matches!(cur.peek(), Tok::Kw(Kw::Do)) {
            cur.bump();
        }
        if matches!(cur.peek(), Tok::Punct("|")) {
            cur.bump();
            while !matches!(cur.peek(), Tok::Punct("|") | Tok::Newline | Tok::Eof) {
                cur.bump();
            }
            if matches!(cur.peek(), Tok::Punct("|")) {
                cur.bump();
            }
        }
        let mut body = parse_stmts(
            cur,
            Stop::BlockEnd { open_line: line },
            Ctx::ResourceBody,
            depth + 1,
        )?;
        if matches!(cur.peek(), Tok::Kw(Kw::End)) {
            cur.bump();
        }
        let mut au = AtomicUnit::new(au_name, name, SourceLocation::new(cur.path, line));
        au.attributes = std::mem::take(&mut body.attributes);
        out.merge(body);
        out.atomic_units.push(au);
        return Ok(());
    }

    match ctx {
        Ctx::ResourceBody => {
            // Attribute line: `password 'changeme'`, `action :create`, ...
            let (value, has_var) = parse_value_expr(cur);
            out.attributes
                .push(Attribute::new(name, value, has_var, SourceLocation::new(cur.path, line)));
        }
        Ctx::TopLevel => {
            // Block-less resource: `include_recipe 'apache2'`.
            match cur.peek().clone() {
                Tok::Str { text, .. } => {
                    cur.bump();
                    out.atomic_units
                        .push(AtomicUnit::new(text, name, SourceLocation::new(cur.path, line)));
                    cur.skip_line();
                }
                Tok::Symbol(s) => {
                    cur.bump();
                    out.atomic_units
                        .push(AtomicUnit::new(s, name, SourceLocation::new(cur.path, line)));
                    cur.skip_line();
                }
                _ => cur.skip_line(),
            }
        }
    }
    Ok(())
}

/// Renders a token run back to text for values we keep symbolically.
fn render_tokens(toks: &[Token]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for t in toks {
        let s = match &t.tok {
            Tok::Ident(w) => w.clone(),
            Tok::Str { text, .. } => format!("'{text}'"),
            Tok::Symbol(s) => format!(":{s}"),
            Tok::Number(n) => n.clone(),
            Tok::Kw(k) => match k {
                Kw::Do => "do",
                Kw::End => "end",
                Kw::Case => "case",
                Kw::When => "when",
                Kw::Else => "else",
                Kw::Elsif => "elsif",
                Kw::If => "if",
                Kw::Unless => "unless",
                Kw::Then => "then",
                Kw::Nil => "nil",
                Kw::True => "true",
                Kw::False => "false",
            }
            .to_string(),
            Tok::Punct(p) => p.to_string(),
            Tok::Newline => " ".to_string(),
            Tok::Eof => String::new(),
        };
        parts.push(s);
    }
    parts.join(" ")
}

fn number_value(raw: &str) -> Value {
    let clean = raw.replace('_', "");
    if let Ok(i) = clean.parse::<i64>() {
        Value::Int(i)
    } else if let Ok(f) = clean.parse::<f64>() {
        Value::Float(f)
    } else {
        Value::Str(raw.to_string())
    }
}

/// Consumes the rest of the logical line as a value expression.
///
/// Simple literals keep their type; everything else is preserved as raw
/// text in an [`Value::Ident`] with the variable flag set whenever an
/// identifier or interpolation participates.
fn parse_value_expr(cur: &mut Cursor) -> (Value, bool) {
    let start = cur.i;
    let mut depth = 0i32;
    loop {
        match cur.peek() {
            Tok::Eof => break,
            Tok::Newline if depth <= 0 => break,
            Tok::Punct(p) if matches!(*p, "(" | "[" | "{") => {
                depth += 1;
                cur.bump();
            }
            Tok::Punct(p) if matches!(*p, ")" | "]" | "}") => {
                depth -= 1;
                cur.bump();
            }
            _ => {
                cur.bump();
            }
        }
    }
    let toks = &cur.toks[start..cur.i];
    classify_value(toks)
}

fn classify_value(toks: &[Token]) -> (Value, bool) {
    let meat: Vec<&Token> = toks
        .iter()
        .filter(|t| !matches!(t.tok, Tok::Newline | Tok::Eof))
        .collect();
    match meat.as_slice() {
        [] => (Value::Null, false),
        [one] => match &one.tok {
            Tok::Str { text, interp } => (Value::Str(text.clone()), *interp),
            Tok::Symbol(s) => (Value::Ident(s.clone()), false),
            Tok::Number(n) => (number_value(n), false),
            Tok::Kw(Kw::True) => (Value::Bool(true), false),
            Tok::Kw(Kw::False) => (Value::Bool(false), false),
            Tok::Kw(Kw::Nil) => (Value::Null, false),
            Tok::Ident(w) => (Value::Ident(w.clone()), true),
            _ => complex_value(toks),
        },
        _ => {
            if let Some(list) = literal_list(&meat) {
                return list;
            }
            complex_value(toks)
        }
    }
}

/// `['a', 'b', 1]` and friends — brackets around comma-separated literals.
fn literal_list(meat: &[&Token]) -> Option<(Value, bool)> {
    if !matches!(meat.first()?.tok, Tok::Punct("[")) || !matches!(meat.last()?.tok, Tok::Punct("]"))
    {
        return None;
    }
    let inner = &meat[1..meat.len() - 1];
    let mut values = Vec::new();
    let mut has_var = false;
    let mut expect_item = true;
    for t in inner {
        match (&t.tok, expect_item) {
            (Tok::Punct(","), false) => expect_item = true,
            (Tok::Str { text, interp }, true) => {
                values.push(Value::Str(text.clone()));
                has_var |= *interp;
                expect_item = false;
            }
            (Tok::Symbol(s), true) => {
                values.push(Value::Ident(s.clone()));
                expect_item = false;
            }
            (Tok::Number(n), true) => {
                values.push(number_value(n));
                expect_item = false;
            }
            (Tok::Kw(Kw::True), true) => {
                values.push(Value::Bool(true));
                expect_item = false;
            }
            (Tok::Kw(Kw::False), true) => {
                values.push(Value::Bool(false));
                expect_item = false;
            }
            _ => return None,
        }
    }
    Some((Value::List(values), has_var))
}

fn complex_value(toks: &[Token]) -> (Value, bool) {
    let has_var = toks.iter().any(|t| match &t.tok {
        Tok::Ident(_) => true,
        Tok::Str { interp, .. } => *interp,
        _ => false,
    });
    (Value::Ident(render_tokens(toks)), has_var)
}

/// `case`/`when`/`else`/`end` as a SWITCH chain; branch bodies flatten
/// into the surrounding scope.
fn parse_case(cur: &mut Cursor, ctx: Ctx, depth: usize) -> Result<Collected, ParseError> {
    let case_line = cur.line();
    cur.bump(); // case
    let subj_start = cur.i;
    while !matches!(cur.peek(), Tok::Newline | Tok::Eof) {
        cur.bump();
    }
    let _subject = render_tokens(&cur.toks[subj_start..cur.i]);

    let mut out = Collected::default();
    let mut branches: Vec<ConditionStatement> = Vec::new();
    let mut saw_default = false;
    loop {
        cur.skip_newlines();
        match cur.peek() {
            Tok::Kw(Kw::When) => {
                let when_line = cur.line();
                cur.bump();
                let guard_start = cur.i;
                while !matches!(cur.peek(), Tok::Newline | Tok::Eof | Tok::Kw(Kw::Then)) {
                    cur.bump();
                }
                let guard = render_tokens(&cur.toks[guard_start..cur.i]);
                if matches!(cur.peek(), Tok::Kw(Kw::Then)) {
                    cur.bump();
                }
                let body = parse_stmts(cur, Stop::Branch, ctx, depth + 1)?;
                out.merge(body);
                if !saw_default {
                    let line = if branches.is_empty() { case_line } else { when_line };
                    branches.push(ConditionStatement::new(
                        ConditionType::Switch,
                        guard,
                        SourceLocation::new(cur.path, line),
                    ));
                }
            }
            Tok::Kw(Kw::Else) => {
                let else_line = cur.line();
                cur.bump();
                let body = parse_stmts(cur, Stop::Branch, ctx, depth + 1)?;
                out.merge(body);
                if !saw_default {
                    saw_default = true;
                    let line = if branches.is_empty() { case_line } else { else_line };
                    branches.push(ConditionStatement::new_default(
                        ConditionType::Switch,
                        SourceLocation::new(cur.path, line),
                    ));
                }
            }
            Tok::Kw(Kw::End) => {
                cur.bump();
                break;
            }
            Tok::Eof => {
                return Err(ParseError::new(cur.path, case_line, "unterminated case statement"));
            }
            _ => cur.skip_line(),
        }
    }
    if let Some(head) = link_chain(branches) {
        out.conditions.push(head);
    }
    Ok(out)
}

/// Block-form `if`/`unless` with `elsif`/`else` as an IF chain.
fn parse_if(cur: &mut Cursor, ctx: Ctx, depth: usize) -> Result<Collected, ParseError> {
    let if_line = cur.line();
    cur.bump(); // if / unless
    let mut out = Collected::default();
    let mut branches: Vec<ConditionStatement> = Vec::new();

    let mut guard_line = if_line;
    loop {
        let guard_start = cur.i;
        while !matches!(cur.peek(), Tok::Newline | Tok::Eof | Tok::Kw(Kw::Then)) {
            cur.bump();
        }
        let guard = render_tokens(&cur.toks[guard_start..cur.i]);
        if matches!(cur.peek(), Tok::Kw(Kw::Then)) {
            cur.bump();
        }
        let body = parse_stmts(cur, Stop::Branch, ctx, depth + 1)?;
        out.merge(body);
        branches.push(ConditionStatement::new(
            ConditionType::If,
            guard,
            SourceLocation::new(cur.path, guard_line),
        ));

        match cur.peek() {
            Tok::Kw(Kw::Elsif) => {
                guard_line = cur.line();
                cur.bump();
            }
            Tok::Kw(Kw::Else) => {
                let else_line = cur.line();
                cur.bump();
                let body = parse_stmts(cur, Stop::Branch, ctx, depth + 1)?;
                out.merge(body);
                branches.push(ConditionStatement::new_default(
                    ConditionType::If,
                    SourceLocation::new(cur.path, else_line),
                ));
                if !matches!(cur.peek(), Tok::Kw(Kw::End)) {
                    return Err(ParseError::new(cur.path, if_line, "unterminated if statement"));
                }
                cur.bump();
                break;
            }
            Tok::Kw(Kw::End) => {
                cur.bump();
                break;
            }
            _ => {
                return Err(ParseError::new(cur.path, if_line, "unterminated if statement"));
            }
        }
    }
    if let Some(head) = link_chain(branches) {
        out.conditions.push(head);
    }
    Ok(out)
}

/// Threads `branches` into an else-chain and returns the head.
fn link_chain(branches: Vec<ConditionStatement>) -> Option<ConditionStatement> {
    let mut chain = branches;
    while chain.len() > 1 {
        let tail = chain.pop().expect("len checked");
        let _ = chain
            .last_mut()
            .expect("len checked")
            .set_else(tail);
    }
    chain.pop()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{traverse, IrNode};

    fn parse(source: &str) -> UnitBlock {
        parse_chef("recipe.rb", source).unwrap()
    }

    #[test]
    fn database_bootstrap_recipe_has_the_expected_shape() {
        let source = "\
server_root_password = node['mysql']['server_root_password']
execute 'set-mysql-root' do
  command <<-EOH
    mysqladmin -u root password #{server_root_password}
    mysql -uroot -p#{server_root_password} -e (...)
  EOH
  only_if \"/usr/bin/mysql -u root -e 'show databases;'\"
end
";
        let block = parse(source);
        let kinds: Vec<&str> = traverse(&block).iter().map(IrNode::kind).collect();
        assert_eq!(
            kinds,
            ["unit_block", "atomic_unit", "attribute", "attribute", "variable"]
        );

        let var = &block.variables[0];
        assert_eq!(var.name, "server_root_password");
        assert!(var.has_variable);
        assert_eq!(var.location.line, 1);

        let au = &block.atomic_units[0];
        assert_eq!(au.type_name, "execute");
        assert_eq!(au.name, "set-mysql-root");
        assert_eq!(au.location.line, 2);

        let command = &au.attributes[0];
        assert_eq!(command.name, "command");
        assert!(command.has_variable, "heredoc interpolation sets the flag");
        assert_eq!(command.location.line, 3);
        match &command.value {
            Value::Str(body) => {
                assert!(body.contains("mysqladmin -u root password #{server_root_password}"));
                assert!(body.contains("mysql -uroot -p#{server_root_password} -e (...)"));
            }
            other => panic!("expected string value, got {other:?}"),
        }

        let only_if = &au.attributes[1];
        assert_eq!(only_if.name, "only_if");
        assert!(!only_if.has_variable);
        assert_eq!(only_if.location.line, 7);
        assert_eq!(
            only_if.value,
            Value::Str("/usr/bin/mysql -u root -e 'show databases;'".into())
        );
    }

    #[test]
    fn attribute_literals_keep_their_types() {
        let block = parse(
            "user 'app' do\n  uid 1001\n  manage_home true\n  password nil\n  shell '/bin/bash'\n  action :create\nend\n",
        );
        let au = &block.atomic_units[0];
        let get = |n: &str| {
            au.attributes
                .iter()
                .find(|a| a.name == n)
                .map(|a| a.value.clone())
                .unwrap()
        };
        assert_eq!(get("uid"), Value::Int(1001));
        assert_eq!(get("manage_home"), Value::Bool(true));
        assert_eq!(get("password"), Value::Null);
        assert_eq!(get("shell"), Value::Str("/bin/bash".into()));
        assert_eq!(get("action"), Value::Ident("create".into()));
    }

    #[test]
    fn unparsed_lines_are_skipped_without_losing_later_resources() {
        let block = parse(
            "->> ??? require 'json'\n£¥€\npackage 'nginx' do\n  action :install\nend\n",
        );
        assert_eq!(block.atomic_units.len(), 1);
        assert_eq!(block.atomic_units[0].type_name, "package");
        assert_eq!(block.atomic_units[0].location.line, 3);
    }

    #[test]
    fn case_statements_build_switch_chains() {
        let source = "\
case node['platform']
when 'debian'
  package 'apache2' do
    action :install
  end
when 'centos'
  package 'httpd' do
    action :install
  end
else
  log 'unsupported'
end
";
        let block = parse(source);
        assert_eq!(block.conditions.len(), 1);
        let head = &block.conditions[0];
        assert_eq!(head.condition_type, ConditionType::Switch);
        assert_eq!(head.location.line, 1, "chain head sits on the case line");
        assert!(head.has_default_branch());
        let second = head.else_statement().unwrap();
        assert_eq!(second.location.line, 6);
        let third = second.else_statement().unwrap();
        assert!(third.is_default());
        // Branch bodies flatten into the file block.
        assert_eq!(block.atomic_units.len(), 3);
    }

    #[test]
    fn case_without_else_has_no_default_branch() {
        let block = parse("case x\nwhen 'a'\n  log 'a'\nend\n");
        assert_eq!(block.conditions.len(), 1);
        assert!(!block.conditions[0].has_default_branch());
    }

    #[test]
    fn if_chains_record_each_branch() {
        let block = parse(
            "if node['ssl']\n  log 'tls'\nelsif node['plain']\n  log 'plain'\nelse\n  log 'none'\nend\n",
        );
        let head = &block.conditions[0];
        assert_eq!(head.condition_type, ConditionType::If);
        assert!(!head.is_default());
        assert!(head.has_default_branch());
        assert_eq!(head.location.line, 1);
        assert_eq!(head.else_statement().unwrap().location.line, 3);
    }

    #[test]
    fn iteration_blocks_run_inline() {
        let source = "\
%w(curl wget).each do |pkg|
  package pkg do
    action :install
  end
end
";
        let block = parse(source);
        assert_eq!(block.atomic_units.len(), 1);
        assert_eq!(block.atomic_units[0].type_name, "package");
        // The loop variable is a bare identifier: name stays empty.
        assert_eq!(block.atomic_units[0].name, "");
    }

    #[test]
    fn comments_are_collected_with_lines() {
        let block = parse("# header\npackage 'x' do # trailing\n  action :install\nend\n");
        assert_eq!(block.comments.len(), 2);
        assert_eq!(block.comments[0].content, "# header");
        assert_eq!(block.comments[0].location.line, 1);
        assert_eq!(block.comments[1].content, "# trailing");
        assert_eq!(block.comments[1].location.line, 2);
    }

    #[test]
    fn interpolation_inside_strings_is_not_a_comment() {
        let block = parse("execute 'x' do\n  command \"echo #{pass}\"\nend\n");
        assert!(block.comments.is_empty());
        assert!(block.atomic_units[0].attributes[0].has_variable);
    }

    #[test]
    fn bare_resources_without_blocks_are_units() {
        let block = parse("include_recipe 'apache2::default'\n");
        assert_eq!(block.atomic_units.len(), 1);
        assert_eq!(block.atomic_units[0].type_name, "include_recipe");
        assert_eq!(block.atomic_units[0].name, "apache2::default");
    }

    #[test]
    fn unterminated_string_is_an_error() {
        let err = parse_chef("bad.rb", "name = 'oops\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("unterminated string"));
    }

    #[test]
    fn unterminated_heredoc_is_an_error() {
        let err = parse_chef("bad.rb", "execute 'x' do\n  command <<-EOH\n    body\nend\n");
        // `end` is inside the heredoc body, so the heredoc never closes.
        let err = err.unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("unterminated heredoc"));
    }

    #[test]
    fn unterminated_block_is_an_error() {
        let err = parse_chef("bad.rb", "package 'x' do\n  action :install\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("missing `end`"));
    }

    #[test]
    fn two_heredocs_on_one_line_take_consecutive_bodies() {
        let source = "\
execute 'x' do
  command <<-ONE + <<-TWO
    first
  ONE
    second
  TWO
end
";
        let block = parse(source);
        let attr = &block.atomic_units[0].attributes[0];
        // Complex expression: both bodies render into the raw text.
        match &attr.value {
            Value::Ident(raw) => {
                assert!(raw.contains("first"));
                assert!(raw.contains("second"));
            }
            other => panic!("expected raw value, got {other:?}"),
        }
    }

    #[test]
    fn variables_capture_node_lookups_as_references() {
        let block = parse("root_pass = node['mysql']['pass']\n");
        let var = &block.variables[0];
        assert!(var.has_variable);
        match &var.value {
            Value::Ident(raw) => assert!(raw.contains("node")),
            other => panic!("expected reference, got {other:?}"),
        }
    }
}
