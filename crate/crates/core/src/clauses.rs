//! Clause networks: one ESOP constraint per auxiliary variable, plus the
//! miter output and any excluded counter-examples.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::esop::{esop_of_gate, EsopExpr, Literal};
use crate::netlist::{GateKind, GateTag, Netlist, Signal};

/// Variables are packed into a `u64`, so X and A together may not exceed this.
pub const MAX_VARS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClauseError {
    #[error("input names differ: {0:?} vs {1:?}")]
    InputMismatch(Vec<String>, Vec<String>),
    #[error("output counts differ: {0} vs {1}")]
    OutputCountMismatch(usize, usize),
    #[error("assignment does not cover exactly the network variables: {0}")]
    VariableMismatch(String),
    #[error("assignment {0} is already excluded")]
    DuplicateExclusion(String),
    #[error("bitstring `{0}` must be {1} characters of 0/1")]
    BadBitstring(String, usize),
    #[error("invalid clause network: {0}")]
    Invalid(String),
    #[error("{0} variables exceed the supported maximum of {MAX_VARS}")]
    TooManyVariables(usize),
}

/// `name <=> G`, stored as the constraint ESOP that is 1 when the two agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxDef {
    pub name: String,
    pub expr: EsopExpr,
}

impl AuxDef {
    /// The defining function `G` on its own, i.e. the constraint with the
    /// auxiliary variable and the leading `1 ^` taken out.
    pub fn definition(&self) -> EsopExpr {
        let mut g = self.expr.without_linear(&self.name).expect("validated on construction");
        g.toggle();
        g
    }
}

/// One full assignment to the X and A variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CexRecord {
    pub assignment: IndexMap<String, bool>,
}

impl CexRecord {
    /// Bits in the record's own variable order.
    pub fn bitstring(&self) -> String {
        self.assignment.values().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// The aux definitions produced for one netlist, and the literals that carry
/// its outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseFragment {
    pub aux_defs: Vec<AuxDef>,
    pub outputs: Vec<Literal>,
}

/// Emits one aux definition per gate node, in netlist order. Aux names are
/// the node names with `prefix` prepended; inputs keep their own names.
pub fn build_clauses_prefixed(net: &Netlist, prefix: &str) -> ClauseFragment {
    let lit = |sig: Signal| match sig {
        Signal::Input(i) => Literal::pos(net.inputs()[i].as_str()),
        Signal::Node(j) => Literal::pos(format!("{prefix}{}", net.nodes()[j].name())),
    };
    let aux_defs = net
        .nodes()
        .iter()
        .map(|node| {
            let name = format!("{prefix}{}", node.name());
            let fanins: Vec<Literal> = node.fanin_signals().iter().map(|&s| lit(s)).collect();
            AuxDef {
                expr: esop_of_gate(node.kind(), &name, &fanins),
                name,
            }
        })
        .collect();
    ClauseFragment {
        aux_defs,
        outputs: net.output_signals().iter().map(|&s| lit(s)).collect(),
    }
}

pub fn build_clauses(net: &Netlist) -> ClauseFragment {
    build_clauses_prefixed(net, "")
}

pub const IMPL_PREFIX: &str = "i.";
pub const REF_PREFIX: &str = "r.";

/// Assembles the miter `impl != ref`.
///
/// One output: a single `m.diff <=> b ^ c`. Several outputs: `m.diffK <=> bK ^ cK`
/// for each, then `m.any <=> OR(m.diff1..)`. The outputs `b`, `c` are the
/// output gates' own aux variables.
pub fn build_miter(imp: &Netlist, reference: &Netlist) -> Result<ClauseNetwork, ClauseError> {
    let mut a = imp.inputs().to_vec();
    let mut b = reference.inputs().to_vec();
    a.sort();
    b.sort();
    if a != b {
        return Err(ClauseError::InputMismatch(
            imp.inputs().to_vec(),
            reference.inputs().to_vec(),
        ));
    }
    if imp.outputs().len() != reference.outputs().len() {
        return Err(ClauseError::OutputCountMismatch(
            imp.outputs().len(),
            reference.outputs().len(),
        ));
    }
    let fi = build_clauses_prefixed(imp, IMPL_PREFIX);
    let fr = build_clauses_prefixed(reference, REF_PREFIX);
    let mut defs = fi.aux_defs;
    defs.extend(fr.aux_defs);

    let xor2 = GateKind::new(GateTag::Xor, 2).unwrap();
    let m = fi.outputs.len();
    let top = if m == 1 {
        let name = "m.diff".to_string();
        let expr = esop_of_gate(xor2, &name, &[fi.outputs[0].clone(), fr.outputs[0].clone()]);
        defs.push(AuxDef {
            name: name.clone(),
            expr,
        });
        name
    } else {
        let mut diffs = Vec::with_capacity(m);
        for (k, (bi, ci)) in fi.outputs.iter().zip(&fr.outputs).enumerate() {
            let name = format!("m.diff{}", k + 1);
            let expr = esop_of_gate(xor2, &name, &[bi.clone(), ci.clone()]);
            defs.push(AuxDef {
                name: name.clone(),
                expr,
            });
            diffs.push(Literal::pos(name));
        }
        let name = "m.any".to_string();
        let or = GateKind::new(GateTag::Or, m).unwrap();
        defs.push(AuxDef {
            expr: esop_of_gate(or, &name, &diffs),
            name: name.clone(),
        });
        name
    };
    ClauseNetwork::new(imp.inputs().to_vec(), defs, Some(top), Vec::new())
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct PackedTerm {
    pos: u64,
    neg: u64,
}

impl PackedTerm {
    #[inline]
    fn eval(&self, v: u64) -> bool {
        v & self.pos == self.pos && v & self.neg == 0
    }
}

/// A constraint with the aux variable's own singleton term split off.
#[derive(Debug, Clone, PartialEq, Eq)]
struct PackedDef {
    var: usize,
    constant: bool,
    rest: Vec<PackedTerm>,
}

impl PackedDef {
    /// The value of `G`, which is the only consistent value of the aux variable.
    #[inline]
    fn forced(&self, v: u64) -> bool {
        !self.rest.iter().fold(self.constant, |acc, t| acc ^ t.eval(v))
    }
}

/// An ordered clause network over inputs X and auxiliaries A.
///
/// Variable `i` in X-then-A order is bit `i` of a packed assignment, which is
/// also qubit `i` of the compiled circuits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseNetwork {
    inputs: Vec<String>,
    aux_defs: Vec<AuxDef>,
    top: Option<String>,
    cex_exclusions: Vec<CexRecord>,
    index: HashMap<String, usize>,
    packed: Vec<PackedDef>,
    top_var: Option<usize>,
    excluded: Vec<u64>,
}

impl ClauseNetwork {
    pub fn new(
        inputs: Vec<String>,
        aux_defs: Vec<AuxDef>,
        top: Option<String>,
        cex_exclusions: Vec<CexRecord>,
    ) -> Result<Self, ClauseError> {
        let n = inputs.len() + aux_defs.len();
        if n > MAX_VARS {
            return Err(ClauseError::TooManyVariables(n));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, name) in inputs.iter().chain(aux_defs.iter().map(|d| &d.name)).enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(ClauseError::Invalid(format!("variable `{name}` defined twice")));
            }
        }
        let mut packed = Vec::with_capacity(aux_defs.len());
        for (j, def) in aux_defs.iter().enumerate() {
            let var = inputs.len() + j;
            let rest = def.expr.without_linear(&def.name).ok_or_else(|| {
                ClauseError::Invalid(format!("`{}` must occur exactly once, as its own term", def.name))
            })?;
            let mut terms = Vec::with_capacity(rest.terms().len());
            for t in rest.terms() {
                let mut pt = PackedTerm { pos: 0, neg: 0 };
                for l in t.literals() {
                    let k = *index
                        .get(&l.var)
                        .ok_or_else(|| ClauseError::Invalid(format!("`{}` uses unknown `{}`", def.name, l.var)))?;
                    if k >= var {
                        return Err(ClauseError::Invalid(format!(
                            "`{}` uses `{}` before its definition",
                            def.name, l.var
                        )));
                    }
                    if l.positive {
                        pt.pos |= 1 << k;
                    } else {
                        pt.neg |= 1 << k;
                    }
                }
                terms.push(pt);
            }
            packed.push(PackedDef {
                var,
                constant: rest.constant(),
                rest: terms,
            });
        }
        let top_var = match &top {
            Some(t) => {
                let k = *index
                    .get(t)
                    .ok_or_else(|| ClauseError::Invalid(format!("top `{t}` is not a variable")))?;
                Some(k)
            }
            None => None,
        };
        let mut cn = ClauseNetwork {
            inputs,
            aux_defs,
            top,
            cex_exclusions: Vec::new(),
            index,
            packed,
            top_var,
            excluded: Vec::new(),
        };
        for c in cex_exclusions {
            cn = cn.exclude_cex(&c)?;
        }
        Ok(cn)
    }

    /// A network with no auxiliaries and a constant-false miter.
    pub fn empty(inputs: Vec<String>) -> Result<Self, ClauseError> {
        Self::new(inputs, Vec::new(), None, Vec::new())
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn aux_defs(&self) -> &[AuxDef] {
        &self.aux_defs
    }

    pub fn top(&self) -> Option<&str> {
        self.top.as_deref()
    }

    /// Index of the top variable in X-then-A order.
    pub fn top_index(&self) -> Option<usize> {
        self.top_var
    }

    pub fn cex_exclusions(&self) -> &[CexRecord] {
        &self.cex_exclusions
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_aux(&self) -> usize {
        self.aux_defs.len()
    }

    /// `n = |X| + |A|`, the width of the search space.
    pub fn num_vars(&self) -> usize {
        self.inputs.len() + self.aux_defs.len()
    }

    pub fn var_names(&self) -> impl Iterator<Item = &str> {
        self.inputs
            .iter()
            .chain(self.aux_defs.iter().map(|d| &d.name))
            .map(String::as_str)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// The same network with every exclusion dropped.
    pub fn without_exclusions(&self) -> ClauseNetwork {
        ClauseNetwork {
            cex_exclusions: Vec::new(),
            excluded: Vec::new(),
            ..self.clone()
        }
    }

    /// Packed assignments of the excluded records.
    pub fn excluded_assignments(&self) -> &[u64] {
        &self.excluded
    }

    /// Places input vector `x` (first input most significant) and fills in
    /// the unique consistent value of every aux variable.
    pub fn propagate(&self, x: u64) -> u64 {
        let nx = self.inputs.len();
        let mut v = 0u64;
        for i in 0..nx {
            if (x >> (nx - 1 - i)) & 1 == 1 {
                v |= 1 << i;
            }
        }
        for d in &self.packed {
            if d.forced(v) {
                v |= 1 << d.var;
            }
        }
        v
    }

    /// The input vector of a packed assignment, first input most significant.
    pub fn input_index(&self, v: u64) -> u64 {
        let nx = self.inputs.len();
        (0..nx).fold(0, |acc, i| (acc << 1) | ((v >> i) & 1))
    }

    /// Whether every aux variable agrees with its definition.
    pub fn is_consistent(&self, v: u64) -> bool {
        self.packed.iter().all(|d| d.forced(v) == ((v >> d.var) & 1 == 1))
    }

    pub fn top_value(&self, v: u64) -> bool {
        self.top_var.is_some_and(|t| (v >> t) & 1 == 1)
    }

    /// The miter without exclusions: consistent and the top variable set.
    pub fn miter_value(&self, v: u64) -> bool {
        self.is_consistent(v) && self.top_value(v)
    }

    /// The augmented miter `F ^ CEX_1 ^ ...`, restricted to consistent assignments.
    pub fn marked(&self, v: u64) -> bool {
        self.is_consistent(v) && (self.top_value(v) ^ self.excluded.contains(&v))
    }

    pub fn record(&self, v: u64) -> CexRecord {
        CexRecord {
            assignment: self
                .var_names()
                .enumerate()
                .map(|(i, name)| (name.to_string(), (v >> i) & 1 == 1))
                .collect(),
        }
    }

    /// Packs a record; its variable set must be exactly X and A.
    pub fn encode(&self, rec: &CexRecord) -> Result<u64, ClauseError> {
        if rec.assignment.len() != self.num_vars() {
            return Err(ClauseError::VariableMismatch(format!(
                "{} values for {} variables",
                rec.assignment.len(),
                self.num_vars()
            )));
        }
        let mut v = 0u64;
        for (name, &bit) in &rec.assignment {
            let i = self
                .var_index(name)
                .ok_or_else(|| ClauseError::VariableMismatch(format!("unknown variable `{name}`")))?;
            if bit {
                v |= 1 << i;
            }
        }
        Ok(v)
    }

    /// `0`/`1` per variable, X then A in declaration order.
    pub fn bitstring(&self, v: u64) -> String {
        (0..self.num_vars())
            .map(|i| if (v >> i) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn parse_bitstring(&self, bits: &str) -> Result<CexRecord, ClauseError> {
        let n = self.num_vars();
        if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(ClauseError::BadBitstring(bits.to_string(), n));
        }
        let v = bits
            .chars()
            .enumerate()
            .fold(0u64, |acc, (i, c)| if c == '1' { acc | 1 << i } else { acc });
        Ok(self.record(v))
    }

    /// Adds one excluded assignment; the result marks `F ^ CEX`.
    pub fn exclude_cex(&self, cex: &CexRecord) -> Result<ClauseNetwork, ClauseError> {
        let v = self.encode(cex)?;
        if self.excluded.contains(&v) {
            return Err(ClauseError::DuplicateExclusion(self.bitstring(v)));
        }
        let mut out = self.clone();
        out.cex_exclusions.push(self.record(v));
        out.excluded.push(v);
        Ok(out)
    }
}

/// Text dump: `name = G` per aux variable, then `top` and `exclude` lines.
impl fmt::Display for ClauseNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs {}", self.inputs.join(" "))?;
        for d in &self.aux_defs {
            writeln!(f, "{} = {}", d.name, d.definition())?;
        }
        if let Some(t) = &self.top {
            writeln!(f, "top = {t}")?;
        }
        for &v in &self.excluded {
            writeln!(f, "exclude {}", self.bitstring(v))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist;

    fn net(src: &str) -> Netlist {
        parse_netlist(src).unwrap()
    }

    fn and_pair() -> (Netlist, Netlist) {
        let r = net("inputs x1 x2 x3\na1 = AND(x1,x2)\na2 = AND(a1,x3)\noutputs a2");
        let f = r.replace_gate("a1", GateTag::Nor).unwrap();
        (f, r)
    }

    #[test]
    fn wire_only_has_no_aux() {
        let frag = build_clauses(&net("inputs x1\noutputs x1"));
        assert!(frag.aux_defs.is_empty());
        assert_eq!(frag.outputs, vec![Literal::pos("x1")]);
    }

    #[test]
    fn single_output_miter_layout() {
        let (f, r) = and_pair();
        let cn = build_miter(&f, &r).unwrap();
        assert_eq!(cn.num_aux(), 5);
        assert_eq!(cn.num_vars(), 8);
        assert_eq!(cn.top(), Some("m.diff"));
        let text = cn.to_string();
        assert!(text.contains("i.a1 = !x1&!x2"), "{text}");
        assert!(text.contains("r.a2 = r.a1&x3"), "{text}");
        assert!(text.contains("m.diff = i.a2 ^ r.a2"), "{text}");
    }

    #[test]
    fn exactly_one_consistent_assignment_per_input() {
        let (f, r) = and_pair();
        let cn = build_miter(&f, &r).unwrap();
        let n = cn.num_vars();
        let consistent: Vec<u64> = (0..1u64 << n).filter(|&v| cn.is_consistent(v)).collect();
        assert_eq!(consistent.len(), 8);
        for x in 0..8 {
            let v = cn.propagate(x);
            assert!(consistent.contains(&v));
            assert_eq!(cn.input_index(v), x);
        }
    }

    #[test]
    fn miter_is_sound() {
        let (f, r) = and_pair();
        let cn = build_miter(&f, &r).unwrap();
        for x in 0..8 {
            let v = cn.propagate(x);
            assert_eq!(cn.miter_value(v), f.eval_index(x) != r.eval_index(x));
        }
    }

    #[test]
    fn self_miter_is_never_true() {
        let (_, r) = and_pair();
        let cn = build_miter(&r, &r).unwrap();
        assert!((0..1u64 << cn.num_vars()).all(|v| !cn.marked(v)));
    }

    #[test]
    fn mismatched_interfaces() {
        let a = net("inputs x y\no = AND(x, y)\noutputs o");
        let b = net("inputs x z\no = AND(x, z)\noutputs o");
        assert!(matches!(build_miter(&a, &b), Err(ClauseError::InputMismatch(..))));
        let c = net("inputs x y\no = AND(x, y)\noutputs o x");
        assert_eq!(build_miter(&a, &c).unwrap_err(), ClauseError::OutputCountMismatch(1, 2));
    }

    #[test]
    fn multi_output_uses_or_aggregator() {
        let a = net("inputs x y\ns = XOR(x, y)\nc = AND(x, y)\noutputs s c");
        let b = net("inputs x y\ns = XNOR(x, y)\nc = AND(x, y)\noutputs s c");
        let cn = build_miter(&a, &b).unwrap();
        assert_eq!(cn.num_aux(), 2 + 2 + 2 + 1);
        assert_eq!(cn.top(), Some("m.any"));
        for x in 0..4 {
            assert!(cn.miter_value(cn.propagate(x)));
        }
    }

    #[test]
    fn exclusion_semantics() {
        let (f, r) = and_pair();
        let cn = build_miter(&f, &r).unwrap();
        let cexs: Vec<u64> = (0..8).map(|x| cn.propagate(x)).filter(|&v| cn.marked(v)).collect();
        assert_eq!(cexs.len(), 2);

        let one = cn.exclude_cex(&cn.record(cexs[0])).unwrap();
        let count = |c: &ClauseNetwork| (0..8).filter(|&x| c.marked(c.propagate(x))).count();
        assert_eq!(count(&one), 1);
        assert_eq!(
            one.exclude_cex(&cn.record(cexs[0])).unwrap_err(),
            ClauseError::DuplicateExclusion(cn.bitstring(cexs[0]))
        );
        let both = one.exclude_cex(&cn.record(cexs[1])).unwrap();
        assert_eq!(count(&both), 0);

        // a consistent non-counter-example becomes marked
        let non = cn.propagate(0b000);
        assert!(!cn.marked(non));
        assert_eq!(count(&cn.exclude_cex(&cn.record(non)).unwrap()), 3);

        assert_eq!(both.without_exclusions(), cn);
    }

    #[test]
    fn exclusion_requires_matching_variables() {
        let (f, r) = and_pair();
        let cn = build_miter(&f, &r).unwrap();
        let mut rec = cn.record(0);
        rec.assignment.shift_remove("x1");
        assert!(matches!(cn.exclude_cex(&rec), Err(ClauseError::VariableMismatch(_))));
        rec.assignment.insert("bogus".into(), true);
        assert!(matches!(cn.exclude_cex(&rec), Err(ClauseError::VariableMismatch(_))));
    }

    #[test]
    fn bitstrings_round_trip() {
        let (f, r) = and_pair();
        let cn = build_miter(&f, &r).unwrap();
        let v = cn.propagate(0b110);
        let s = cn.bitstring(v);
        assert!(s.starts_with("110"));
        assert_eq!(cn.encode(&cn.parse_bitstring(&s).unwrap()).unwrap(), v);
        assert!(cn.parse_bitstring("01").is_err());
        assert_eq!(cn.record(v).bitstring(), s);
    }

    #[test]
    fn rejects_bad_networks() {
        let e = esop_of_gate(
            GateKind::new(GateTag::And, 2).unwrap(),
            "a",
            &[Literal::pos("x"), Literal::pos("b")],
        );
        let defs = vec![AuxDef {
            name: "a".into(),
            expr: e,
        }];
        assert!(matches!(
            ClauseNetwork::new(vec!["x".into()], defs, Some("a".into()), vec![]),
            Err(ClauseError::Invalid(_))
        ));
        assert!(ClauseNetwork::new(vec!["x".into(), "x".into()], vec![], None, vec![]).is_err());
        let empty = ClauseNetwork::empty(vec!["x".into()]).unwrap();
        assert!(!empty.marked(1) && !empty.marked(0));
    }
}
