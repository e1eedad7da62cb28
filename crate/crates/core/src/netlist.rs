//! Gate-level Boolean netlists.
//!
//! A [`Netlist`] is a topologically ordered list of gate nodes over a set of
//! named primary inputs. The text format is line based:
//!
//! ```text
//! # comment
//! inputs x1 x2 x3
//! a1 = AND(x1, x2)
//! a2 = AND(a1, x3)
//! outputs a2
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: undefined signal `{name}`")]
    Undefined { line: usize, name: String },
    #[error("line {line}: {tag} takes {expected} inputs, got {got}")]
    Arity {
        line: usize,
        tag: GateTag,
        expected: String,
        got: usize,
    },
    #[error("line {line}: `{name}` is already defined")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: cyclic reference through `{name}`")]
    Cycle { line: usize, name: String },
    #[error("line {line}: `{name}` is used before its definition")]
    ForwardReference { line: usize, name: String },
    #[error("netlist declares no outputs")]
    NoOutputs,
    #[error("no value given for input `{0}`")]
    MissingInput(String),
    #[error("expected {expected} input bits, got {got}")]
    InputWidth { expected: usize, got: usize },
    #[error("no gate node named `{0}`")]
    UnknownNode(String),
}

/// The logic operation of a gate node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateTag {
    Not,
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    /// `ITE(s, a, b)`: `b` when `s` is high, otherwise `a`.
    Ite,
    /// Three-input majority.
    Maj,
}

impl GateTag {
    pub const ALL: [GateTag; 9] = [
        GateTag::Not,
        GateTag::And,
        GateTag::Nand,
        GateTag::Or,
        GateTag::Nor,
        GateTag::Xor,
        GateTag::Xnor,
        GateTag::Ite,
        GateTag::Maj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateTag::Not => "NOT",
            GateTag::And => "AND",
            GateTag::Nand => "NAND",
            GateTag::Or => "OR",
            GateTag::Nor => "NOR",
            GateTag::Xor => "XOR",
            GateTag::Xnor => "XNOR",
            GateTag::Ite => "ITE",
            GateTag::Maj => "MAJ",
        }
    }

    pub fn accepts_arity(self, arity: usize) -> bool {
        match self {
            GateTag::Not => arity == 1,
            GateTag::Ite | GateTag::Maj => arity == 3,
            _ => arity >= 2,
        }
    }

    fn arity_text(self) -> String {
        match self {
            GateTag::Not => "exactly 1".into(),
            GateTag::Ite | GateTag::Maj => "exactly 3".into(),
            _ => "at least 2".into(),
        }
    }

    /// Evaluates the operation on `args`. The caller guarantees a valid arity.
    pub fn eval(self, args: &[bool]) -> bool {
        let and = || args.iter().all(|&b| b);
        let or = || args.iter().any(|&b| b);
        let xor = || args.iter().fold(false, |acc, &b| acc ^ b);
        match self {
            GateTag::Not => !args[0],
            GateTag::And => and(),
            GateTag::Nand => !and(),
            GateTag::Or => or(),
            GateTag::Nor => !or(),
            GateTag::Xor => xor(),
            GateTag::Xnor => !xor(),
            GateTag::Ite => {
                if args[0] {
                    args[2]
                } else {
                    args[1]
                }
            }
            GateTag::Maj => args.iter().filter(|&&b| b).count() >= 2,
        }
    }
}

impl fmt::Display for GateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown gate kind `{s}`"))
    }
}

/// A gate operation together with its fan-in count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateKind {
    tag: GateTag,
    arity: usize,
}

impl GateKind {
    /// Returns `None` when `arity` is not valid for `tag`.
    pub fn new(tag: GateTag, arity: usize) -> Option<Self> {
        tag.accepts_arity(arity).then_some(GateKind { tag, arity })
    }

    pub fn tag(self) -> GateTag {
        self.tag
    }

    pub fn arity(self) -> usize {
        self.arity
    }
}

/// Reference to a signal: a primary input or an earlier gate node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    Input(usize),
    Node(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    name: String,
    kind: GateKind,
    fanins: Vec<String>,
    refs: Vec<Signal>,
}

impl Node {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn fanins(&self) -> &[String] {
        &self.fanins
    }

    pub fn fanin_signals(&self) -> &[Signal] {
        &self.refs
    }
}

/// A validated combinational netlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    inputs: Vec<String>,
    nodes: Vec<Node>,
    outputs: Vec<String>,
    output_refs: Vec<Signal>,
}

/// Incremental builder; every call validates against what came before.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    inputs: Vec<String>,
    nodes: Vec<Node>,
    outputs: Vec<(usize, String)>,
    names: HashMap<String, Signal>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input(&mut self, name: &str) -> Result<&mut Self, NetlistError> {
        self.input_at(0, name)?;
        Ok(self)
    }

    pub fn gate(&mut self, name: &str, tag: GateTag, fanins: &[&str]) -> Result<&mut Self, NetlistError> {
        let fanins: Vec<String> = fanins.iter().map(|s| s.to_string()).collect();
        self.gate_at(0, name, tag, fanins, &HashSet::new())?;
        Ok(self)
    }

    pub fn output(&mut self, name: &str) -> &mut Self {
        self.outputs.push((0, name.to_string()));
        self
    }

    fn input_at(&mut self, line: usize, name: &str) -> Result<(), NetlistError> {
        check_ident(line, name)?;
        if self.names.contains_key(name) {
            return Err(NetlistError::Duplicate {
                line,
                name: name.into(),
            });
        }
        self.names.insert(name.into(), Signal::Input(self.inputs.len()));
        self.inputs.push(name.into());
        Ok(())
    }

    fn gate_at(
        &mut self,
        line: usize,
        name: &str,
        tag: GateTag,
        fanins: Vec<String>,
        later: &HashSet<String>,
    ) -> Result<(), NetlistError> {
        check_ident(line, name)?;
        if self.names.contains_key(name) {
            return Err(NetlistError::Duplicate {
                line,
                name: name.into(),
            });
        }
        let kind = GateKind::new(tag, fanins.len()).ok_or_else(|| NetlistError::Arity {
            line,
            tag,
            expected: tag.arity_text(),
            got: fanins.len(),
        })?;
        let mut refs = Vec::with_capacity(fanins.len());
        for f in &fanins {
            match self.names.get(f) {
                Some(&sig) => refs.push(sig),
                None if f == name => {
                    return Err(NetlistError::Cycle { line, name: f.clone() });
                }
                None if later.contains(f) => {
                    return Err(NetlistError::ForwardReference { line, name: f.clone() });
                }
                None => return Err(NetlistError::Undefined { line, name: f.clone() }),
            }
        }
        self.names.insert(name.into(), Signal::Node(self.nodes.len()));
        self.nodes.push(Node {
            name: name.into(),
            kind,
            fanins,
            refs,
        });
        Ok(())
    }

    pub fn build(self) -> Result<Netlist, NetlistError> {
        if self.outputs.is_empty() {
            return Err(NetlistError::NoOutputs);
        }
        let mut output_refs = Vec::with_capacity(self.outputs.len());
        let mut outputs = Vec::with_capacity(self.outputs.len());
        for (line, name) in self.outputs {
            let sig = *self.names.get(&name).ok_or_else(|| NetlistError::Undefined {
                line,
                name: name.clone(),
            })?;
            output_refs.push(sig);
            outputs.push(name);
        }
        Ok(Netlist {
            inputs: self.inputs,
            nodes: self.nodes,
            outputs,
            output_refs,
        })
    }
}

fn check_ident(line: usize, name: &str) -> Result<(), NetlistError> {
    let mut chars = name.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(NetlistError::Syntax {
            line,
            msg: format!("invalid identifier `{name}`"),
        })
    }
}

impl Netlist {
    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn output_signals(&self) -> &[Signal] {
        &self.output_refs
    }

    pub fn node(&self, name: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.name == name)
    }

    /// Evaluates every node for a positional input vector and returns the
    /// output bits in declaration order.
    pub fn eval_bits(&self, inputs: &[bool]) -> Result<Vec<bool>, NetlistError> {
        if inputs.len() != self.inputs.len() {
            return Err(NetlistError::InputWidth {
                expected: self.inputs.len(),
                got: inputs.len(),
            });
        }
        let mut values = Vec::with_capacity(self.nodes.len());
        let mut args = Vec::with_capacity(3);
        for node in &self.nodes {
            args.clear();
            args.extend(node.refs.iter().map(|&s| match s {
                Signal::Input(i) => inputs[i],
                Signal::Node(j) => values[j],
            }));
            values.push(node.kind.tag.eval(&args));
        }
        Ok(self
            .output_refs
            .iter()
            .map(|&s| match s {
                Signal::Input(i) => inputs[i],
                Signal::Node(j) => values[j],
            })
            .collect())
    }

    /// Evaluates the netlist on a named assignment. Extra entries are ignored.
    pub fn evaluate(&self, assignment: &HashMap<String, bool>) -> Result<IndexMap<String, bool>, NetlistError> {
        let bits = self
            .inputs
            .iter()
            .map(|name| {
                assignment
                    .get(name)
                    .copied()
                    .ok_or_else(|| NetlistError::MissingInput(name.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let out = self.eval_bits(&bits)?;
        Ok(self.outputs.iter().cloned().zip(out).collect())
    }

    /// Evaluates on the input vector encoded by `index`, first input most significant.
    pub fn eval_index(&self, index: u64) -> Vec<bool> {
        let n = self.inputs.len();
        let bits: Vec<bool> = (0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect();
        self.eval_bits(&bits).expect("width matches by construction")
    }

    /// Returns a copy with the kind of `node` replaced.
    pub fn fault_inject(&self, node: &str, new: GateKind) -> Result<Netlist, NetlistError> {
        let idx = self
            .nodes
            .iter()
            .position(|n| n.name == node)
            .ok_or_else(|| NetlistError::UnknownNode(node.into()))?;
        let old = self.nodes[idx].kind;
        if old.arity != new.arity {
            return Err(NetlistError::Arity {
                line: 0,
                tag: new.tag,
                expected: format!("exactly {}", old.arity),
                got: new.arity,
            });
        }
        let mut out = self.clone();
        out.nodes[idx].kind = new;
        Ok(out)
    }

    /// Like [`Netlist::fault_inject`] keeping the node's arity.
    pub fn replace_gate(&self, node: &str, tag: GateTag) -> Result<Netlist, NetlistError> {
        let arity = self
            .node(node)
            .ok_or_else(|| NetlistError::UnknownNode(node.into()))?
            .kind
            .arity;
        let kind = GateKind::new(tag, arity).ok_or(NetlistError::Arity {
            line: 0,
            tag,
            expected: tag.arity_text(),
            got: arity,
        })?;
        self.fault_inject(node, kind)
    }
}

/// Parses the line-based netlist format.
pub fn parse_netlist(text: &str) -> Result<Netlist, NetlistError> {
    enum Line<'a> {
        Inputs(Vec<&'a str>),
        Outputs(Vec<&'a str>),
        Gate {
            name: &'a str,
            tag: GateTag,
            fanins: Vec<String>,
        },
    }

    let mut parsed = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |msg: String| NetlistError::Syntax { line, msg };
        if let Some((lhs, rhs)) = content.split_once('=') {
            let name = lhs.trim();
            let rhs = rhs.trim();
            let open = rhs
                .find('(')
                .ok_or_else(|| syntax(format!("expected `KIND(...)`, found `{rhs}`")))?;
            if !rhs.ends_with(')') {
                return Err(syntax("missing closing `)`".into()));
            }
            let tag: GateTag = rhs[..open].trim().parse().map_err(syntax)?;
            let args = &rhs[open + 1..rhs.len() - 1];
            let fanins: Vec<String> = if args.trim().is_empty() {
                Vec::new()
            } else {
                args.split(',').map(|a| a.trim().to_string()).collect()
            };
            if fanins.iter().any(|a| a.is_empty()) {
                return Err(syntax("empty fan-in name".into()));
            }
            parsed.push((line, Line::Gate { name, tag, fanins }));
        } else {
            let mut words = content.split_whitespace();
            let directive = words.next().unwrap_or_default();
            let names: Vec<&str> = words.collect();
            match directive {
                "inputs" => parsed.push((line, Line::Inputs(names))),
                "outputs" => {
                    if names.is_empty() {
                        return Err(syntax("`outputs` needs at least one name".into()));
                    }
                    parsed.push((line, Line::Outputs(names)))
                }
                other => return Err(syntax(format!("unknown directive `{other}`"))),
            }
        }
    }

    // Gate names defined further down, used to tell a forward reference from a typo.
    let mut later: HashSet<String> = parsed
        .iter()
        .filter_map(|(_, l)| match l {
            Line::Gate { name, .. } => Some(name.to_string()),
            _ => None,
        })
        .collect();
    let deps: HashMap<&str, Vec<&str>> = parsed
        .iter()
        .filter_map(|(_, l)| match l {
            Line::Gate { name, fanins, .. } => Some((*name, fanins.iter().map(String::as_str).collect())),
            _ => None,
        })
        .collect();

    let mut b = NetlistBuilder::new();
    for &(line, ref l) in &parsed {
        match l {
            Line::Inputs(names) => {
                for n in names {
                    b.input_at(line, n)?;
                }
            }
            Line::Outputs(names) => b.outputs.extend(names.iter().map(|n| (line, n.to_string()))),
            Line::Gate { name, tag, fanins } => {
                let name = *name;
                later.remove(name);
                match b.gate_at(line, name, *tag, fanins.clone(), &later) {
                    Err(NetlistError::ForwardReference { line, name: target }) if reaches(&deps, &target, name) => {
                        return Err(NetlistError::Cycle { line, name: target });
                    }
                    r => r?,
                }
            }
        }
    }
    b.build()
}

/// True when `to` is reachable from `from` along fan-in edges.
fn reaches(deps: &HashMap<&str, Vec<&str>>, from: &str, to: &str) -> bool {
    let mut stack = vec![from];
    let mut seen = HashSet::new();
    while let Some(cur) = stack.pop() {
        if cur == to {
            return true;
        }
        if seen.insert(cur) {
            if let Some(next) = deps.get(cur) {
                stack.extend(next.iter().copied());
            }
        }
    }
    false
}

impl FromStr for Netlist {
    type Err = NetlistError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_netlist(s)
    }
}

/// Renders the canonical text form; `parse_netlist` reads it back unchanged.
impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.inputs.is_empty() {
            writeln!(f, "inputs {}", self.inputs.join(" "))?;
        }
        for n in &self.nodes {
            writeln!(f, "{} = {}({})", n.name, n.kind.tag, n.fanins.join(", "))?;
        }
        writeln!(f, "outputs {}", self.outputs.join(" "))
    }
}
