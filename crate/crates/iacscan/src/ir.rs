//! Technology-agnostic intermediate representation of IaC scripts.
//!
//! Every frontend lowers its input to the same small family of node types:
//! a [`Project`] holds [`Module`]s and loose [`UnitBlock`]s, a block holds
//! [`AtomicUnit`]s (tasks/resources), [`Variable`]s, [`Attribute`]s,
//! [`Comment`]s, [`ConditionStatement`]s, and nested blocks. The rule engine
//! never sees technology-specific syntax — only this model.
//!
//! Trees are immutable once built and are walked with [`traverse`], a
//! deterministic preorder depth-first search. `ConditionStatement` chains
//! (`if`/`elsif`/`else`, `case`/`when`) hang off their head node via
//! `else_statement` and are deliberately *not* traversal children: the
//! missing-default check inspects a whole chain once, at its head.

use std::path::PathBuf;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Where a node came from: file path plus 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SourceLocation {
    pub path: PathBuf,
    pub line: usize,
}

impl SourceLocation {
    pub fn new(path: impl Into<PathBuf>, line: usize) -> Self {
        debug_assert!(line >= 1, "line numbers are 1-based");
        SourceLocation { path: path.into(), line }
    }
}

/// A parsed attribute or variable value.
///
/// `Ident` covers bare words and unevaluated expressions (`node['x']`,
/// `$facts['os']`, function calls); `Null` marks constructs that carry no
/// value at all (an empty YAML key, a parameter without a default). For rule
/// purposes `Null` behaves like an empty string.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    List(Vec<Value>),
    Ident(String),
    Null,
}

impl Value {
    /// Textual content for `Str` and `Ident` values, `None` otherwise.
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Str(s) | Value::Ident(s) => Some(s),
            _ => None,
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Str(s) => serializer.serialize_str(s),
            Value::Int(n) => serializer.serialize_i64(*n),
            Value::Float(f) => serializer.serialize_f64(*f),
            Value::Bool(b) => serializer.serialize_bool(*b),
            Value::List(items) => items.serialize(serializer),
            Value::Ident(s) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("ident", s)?;
                map.end()
            }
            Value::Null => serializer.serialize_none(),
        }
    }
}

/// A named value attached to an atomic unit or block (`password => 'x'`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Attribute {
    pub name: String,
    pub value: Value,
    /// True iff the source expression references a technology-level variable
    /// or interpolation (`#{...}`, `${...}`, `{{ ... }}`, bare `$ref`, ...).
    pub has_variable: bool,
    #[serde(flatten)]
    pub location: SourceLocation,
}

impl Attribute {
    pub fn new(
        name: impl Into<String>,
        value: Value,
        has_variable: bool,
        location: SourceLocation,
    ) -> Self {
        Attribute { name: name.into(), value, has_variable, location }
    }
}

/// A variable definition (`$x = ...`, `vars:` entry, recipe-local binding).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variable {
    pub name: String,
    pub value: Value,
    /// Same contract as [`Attribute::has_variable`].
    pub has_variable: bool,
    #[serde(flatten)]
    pub location: SourceLocation,
}

impl Variable {
    pub fn new(
        name: impl Into<String>,
        value: Value,
        has_variable: bool,
        location: SourceLocation,
    ) -> Self {
        Variable { name: name.into(), value, has_variable, location }
    }
}

/// A source comment, content kept verbatim including marker characters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comment {
    pub content: String,
    #[serde(flatten)]
    pub location: SourceLocation,
}

impl Comment {
    pub fn new(content: impl Into<String>, location: SourceLocation) -> Self {
        Comment { content: content.into(), location }
    }
}

/// The smallest actionable element: an Ansible task or a Chef/Puppet resource.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicUnit {
    pub name: String,
    /// Technology resource/task type (`execute`, `exec`, `ansible.builtin.copy`).
    #[serde(rename = "type")]
    pub type_name: String,
    pub attributes: Vec<Attribute>,
    #[serde(flatten)]
    pub location: SourceLocation,
}

impl AtomicUnit {
    pub fn new(
        name: impl Into<String>,
        type_name: impl Into<String>,
        location: SourceLocation,
    ) -> Self {
        AtomicUnit { name: name.into(), type_name: type_name.into(), attributes: Vec::new(), location }
    }
}

/// Discriminates `if`-style chains from `case`/selector chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ConditionType {
    If,
    Switch,
}

/// One branch of a conditional; branches link into a chain via `else_statement`.
///
/// The chain fields are private so the two structural invariants can only be
/// established through [`ConditionStatement::set_else`]: a chain is acyclic
/// (guaranteed by ownership) and a default branch, if present, is unique and
/// terminal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionStatement {
    #[serde(rename = "type")]
    pub condition_type: ConditionType,
    /// Raw guard text (`$osfamily == 'Debian'`, a `when` value, ...); empty
    /// for default branches.
    pub condition: String,
    is_default: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    else_statement: Option<Box<ConditionStatement>>,
    #[serde(flatten)]
    pub location: SourceLocation,
}

/// Violations of condition-chain construction rules.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum IrError {
    #[error("cannot chain a branch after a default branch")]
    BranchAfterDefault,
    #[error("branch already has an else chain")]
    ElseAlreadySet,
}

impl ConditionStatement {
    /// A guarded (non-default) branch.
    pub fn new(
        condition_type: ConditionType,
        condition: impl Into<String>,
        location: SourceLocation,
    ) -> Self {
        ConditionStatement {
            condition_type,
            condition: condition.into(),
            is_default: false,
            else_statement: None,
            location,
        }
    }

    /// A default branch (`else`, `default:`); always ends its chain.
    pub fn new_default(condition_type: ConditionType, location: SourceLocation) -> Self {
        ConditionStatement {
            condition_type,
            condition: String::new(),
            is_default: true,
            else_statement: None,
            location,
        }
    }

    /// Appends `next` as this branch's else chain.
    ///
    /// Fails if this branch is a default (nothing may follow a default) or
    /// already has a chain attached.
    pub fn set_else(&mut self, next: ConditionStatement) -> Result<(), IrError> {
        if self.is_default {
            return Err(IrError::BranchAfterDefault);
        }
        if self.else_statement.is_some() {
            return Err(IrError::ElseAlreadySet);
        }
        self.else_statement = Some(Box::new(next));
        Ok(())
    }

    pub fn is_default(&self) -> bool {
        self.is_default
    }

    pub fn else_statement(&self) -> Option<&ConditionStatement> {
        self.else_statement.as_deref()
    }

    /// True iff any branch reachable from here (itself included) is a default.
    pub fn has_default_branch(&self) -> bool {
        self.is_default
            || self
                .else_statement
                .as_deref()
                .is_some_and(ConditionStatement::has_default_branch)
    }
}

/// A script file or named block: playbook, play, recipe, manifest, class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitBlock {
    pub name: String,
    pub atomic_units: Vec<AtomicUnit>,
    pub variables: Vec<Variable>,
    pub attributes: Vec<Attribute>,
    pub comments: Vec<Comment>,
    pub conditions: Vec<ConditionStatement>,
    pub unit_blocks: Vec<UnitBlock>,
    #[serde(flatten)]
    pub location: SourceLocation,
}

impl UnitBlock {
    pub fn new(name: impl Into<String>, location: SourceLocation) -> Self {
        UnitBlock {
            name: name.into(),
            atomic_units: Vec::new(),
            variables: Vec::new(),
            attributes: Vec::new(),
            comments: Vec::new(),
            conditions: Vec::new(),
            unit_blocks: Vec::new(),
            location,
        }
    }
}

/// A filesystem folder bundling related scripts: an Ansible role, a Chef
/// cookbook, a Puppet module.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Module {
    pub name: String,
    pub blocks: Vec<UnitBlock>,
}

impl Module {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(!name.is_empty(), "module names are non-empty");
        Module { name, blocks: Vec::new() }
    }
}

/// Top-level container: a generic folder holding modules and loose blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Project {
    pub name: String,
    pub modules: Vec<Module>,
    pub blocks: Vec<UnitBlock>,
}

impl Project {
    pub fn new(name: impl Into<String>) -> Self {
        Project { name: name.into(), modules: Vec::new(), blocks: Vec::new() }
    }
}

/// Borrowed view over any IR node, produced by [`traverse`].
#[derive(Debug, Clone, Copy)]
pub enum IrNode<'a> {
    Project(&'a Project),
    Module(&'a Module),
    UnitBlock(&'a UnitBlock),
    AtomicUnit(&'a AtomicUnit),
    Attribute(&'a Attribute),
    Variable(&'a Variable),
    Comment(&'a Comment),
    Condition(&'a ConditionStatement),
}

impl<'a> IrNode<'a> {
    /// Stable lowercase tag naming the node kind.
    pub fn kind(&self) -> &'static str {
        match self {
            IrNode::Project(_) => "project",
            IrNode::Module(_) => "module",
            IrNode::UnitBlock(_) => "unit_block",
            IrNode::AtomicUnit(_) => "atomic_unit",
            IrNode::Attribute(_) => "attribute",
            IrNode::Variable(_) => "variable",
            IrNode::Comment(_) => "comment",
            IrNode::Condition(_) => "condition",
        }
    }

    /// Source location for nodes that carry one (all but Project/Module).
    pub fn location(&self) -> Option<&'a SourceLocation> {
        match self {
            IrNode::Project(_) | IrNode::Module(_) => None,
            IrNode::UnitBlock(u) => Some(&u.location),
            IrNode::AtomicUnit(a) => Some(&a.location),
            IrNode::Attribute(a) => Some(&a.location),
            IrNode::Variable(v) => Some(&v.location),
            IrNode::Comment(c) => Some(&c.location),
            IrNode::Condition(c) => Some(&c.location),
        }
    }
}

impl<'a> From<&'a Project> for IrNode<'a> {
    fn from(p: &'a Project) -> Self {
        IrNode::Project(p)
    }
}

impl<'a> From<&'a Module> for IrNode<'a> {
    fn from(m: &'a Module) -> Self {
        IrNode::Module(m)
    }
}

impl<'a> From<&'a UnitBlock> for IrNode<'a> {
    fn from(u: &'a UnitBlock) -> Self {
        IrNode::UnitBlock(u)
    }
}

/// Preorder depth-first enumeration of all nodes under `root`.
///
/// Children are visited in declaration order: a Project yields its modules
/// then its blocks; a Module its blocks; a UnitBlock its atomic units,
/// variables, attributes, comments, condition-chain heads, then nested
/// blocks; an AtomicUnit its attributes. Comments, attributes, and variables
/// are leaves, and `else_statement` links are not children — only chain
/// heads appear in the sequence.
pub fn traverse<'a, N: Into<IrNode<'a>>>(root: N) -> Vec<IrNode<'a>> {
    let mut out = Vec::new();
    let mut stack: Vec<IrNode<'a>> = vec![root.into()];
    while let Some(node) = stack.pop() {
        out.push(node);
        // Children are pushed in reverse so the stack pops them in
        // declaration order.
        match node {
            IrNode::Project(p) => {
                for b in p.blocks.iter().rev() {
                    stack.push(IrNode::UnitBlock(b));
                }
                for m in p.modules.iter().rev() {
                    stack.push(IrNode::Module(m));
                }
            }
            IrNode::Module(m) => {
                for b in m.blocks.iter().rev() {
                    stack.push(IrNode::UnitBlock(b));
                }
            }
            IrNode::UnitBlock(u) => {
                for b in u.unit_blocks.iter().rev() {
                    stack.push(IrNode::UnitBlock(b));
                }
                for c in u.conditions.iter().rev() {
                    stack.push(IrNode::Condition(c));
                }
                for c in u.comments.iter().rev() {
                    stack.push(IrNode::Comment(c));
                }
                for a in u.attributes.iter().rev() {
                    stack.push(IrNode::Attribute(a));
                }
                for v in u.variables.iter().rev() {
                    stack.push(IrNode::Variable(v));
                }
                for a in u.atomic_units.iter().rev() {
                    stack.push(IrNode::AtomicUnit(a));
                }
            }
            IrNode::AtomicUnit(a) => {
                for at in a.attributes.iter().rev() {
                    stack.push(IrNode::Attribute(at));
                }
            }
            IrNode::Attribute(_) | IrNode::Variable(_) | IrNode::Comment(_) | IrNode::Condition(_) => {}
        }
    }
    out
}
