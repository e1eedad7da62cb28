//! Quantum circuit IR and the miter, oracle and diffuser builders.
//!
//! Qubit layout of every miter circuit, low index first:
//! `X` inputs, `A` auxiliaries, `E` ancillae (one per auxiliary), `y` answer.
//! Qubits `0..|X|+|A|` therefore line up with the packed assignments of
//! [`ClauseNetwork`].

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clauses::ClauseNetwork;
use crate::esop::EsopExpr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("qubit {0} out of range for a {1}-qubit circuit")]
    OutOfRange(usize, usize),
    #[error("qubit {0} used more than once in one gate")]
    RepeatedQubit(usize),
    #[error("register layouts differ")]
    LayoutMismatch,
    #[error("diffuser over {0} qubits does not fit a {1}-qubit circuit")]
    BadDiffuser(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn pos(qubit: usize) -> Self {
        Control {
            qubit,
            polarity: Polarity::Positive,
        }
    }

    pub fn neg(qubit: usize) -> Self {
        Control {
            qubit,
            polarity: Polarity::Negative,
        }
    }

    pub fn with_value(qubit: usize, value: bool) -> Self {
        if value {
            Self::pos(qubit)
        } else {
            Self::neg(qubit)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateOp {
    X,
    H,
    /// `diag(1, e^{i theta})`
    P(f64),
    CX,
    MCX,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGate {
    op: GateOp,
    controls: Vec<Control>,
    target: usize,
}

impl QGate {
    pub fn x(target: usize) -> Self {
        QGate {
            op: GateOp::X,
            controls: Vec::new(),
            target,
        }
    }

    pub fn h(target: usize) -> Self {
        QGate {
            op: GateOp::H,
            controls: Vec::new(),
            target,
        }
    }

    pub fn p(theta: f64, target: usize) -> Self {
        QGate {
            op: GateOp::P(theta),
            controls: Vec::new(),
            target,
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::controlled_x(vec![Control::pos(control)], target)
    }

    pub fn ccx(a: usize, b: usize, target: usize) -> Self {
        Self::controlled_x(vec![Control::pos(a), Control::pos(b)], target)
    }

    /// X with any number of controls; the op is X, CX or MCX by control count.
    pub fn controlled_x(controls: Vec<Control>, target: usize) -> Self {
        let op = match controls.len() {
            0 => GateOp::X,
            1 => GateOp::CX,
            _ => GateOp::MCX,
        };
        QGate { op, controls, target }
    }

    pub fn op(&self) -> GateOp {
        self.op
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls
            .iter()
            .map(|c| c.qubit)
            .chain(std::iter::once(self.target))
    }

    pub fn is_two_qubit(&self) -> bool {
        self.op == GateOp::CX
    }

    /// Whether the gate is already in the `{CX, X, P, H}` basis.
    pub fn is_basis(&self) -> bool {
        match self.op {
            GateOp::X | GateOp::H | GateOp::P(_) => true,
            GateOp::CX => self.controls[0].polarity == Polarity::Positive,
            GateOp::MCX => false,
        }
    }

    pub fn inverse(&self) -> QGate {
        match self.op {
            GateOp::P(t) => QGate::p(-t, self.target),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for QGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.op {
            GateOp::X => write!(f, "x q{}", self.target),
            GateOp::H => write!(f, "h q{}", self.target),
            GateOp::P(t) => write!(f, "p({t}) q{}", self.target),
            GateOp::CX | GateOp::MCX => {
                let ctrls: Vec<String> = self
                    .controls
                    .iter()
                    .map(|c| match c.polarity {
                        Polarity::Positive => format!("q{}", c.qubit),
                        Polarity::Negative => format!("!q{}", c.qubit),
                    })
                    .collect();
                write!(f, "mcx [{}] q{}", ctrls.join(","), self.target)
            }
        }
    }
}

/// Register sizes. `e` ancillae start out in `|0>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Registers {
    pub x: usize,
    pub a: usize,
    pub e: usize,
    pub answer: bool,
}

impl Registers {
    /// `|X| + 2|A| + 1` qubits.
    pub fn miter(x: usize, a: usize) -> Self {
        Registers {
            x,
            a,
            e: a,
            answer: true,
        }
    }

    /// A plain `n`-qubit register with no ancillae.
    pub fn bare(n: usize) -> Self {
        Registers {
            x: n,
            a: 0,
            e: 0,
            answer: false,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.x + self.a + self.e + self.answer as usize
    }

    /// Qubits of the search space, `X` followed by `A`.
    pub fn search(&self) -> Range<usize> {
        0..self.x + self.a
    }

    pub fn inputs(&self) -> Range<usize> {
        0..self.x
    }

    pub fn aux(&self) -> Range<usize> {
        self.x..self.x + self.a
    }

    pub fn ancillae(&self) -> Range<usize> {
        self.x + self.a..self.x + self.a + self.e
    }

    pub fn answer_qubit(&self) -> Option<usize> {
        self.answer.then(|| self.x + self.a + self.e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QCircuit {
    regs: Registers,
    gates: Vec<QGate>,
}

impl QCircuit {
    pub fn new(regs: Registers) -> Self {
        QCircuit {
            regs,
            gates: Vec::new(),
        }
    }

    pub fn registers(&self) -> Registers {
        self.regs
    }

    pub fn num_qubits(&self) -> usize {
        self.regs.num_qubits()
    }

    pub fn gates(&self) -> &[QGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: QGate) -> Result<&mut Self, CircuitError> {
        let n = self.num_qubits();
        let mut seen = Vec::with_capacity(g.controls.len() + 1);
        for q in g.qubits() {
            if q >= n {
                return Err(CircuitError::OutOfRange(q, n));
            }
            if seen.contains(&q) {
                return Err(CircuitError::RepeatedQubit(q));
            }
            seen.push(q);
        }
        self.gates.push(g);
        Ok(self)
    }

    /// Appends without validation, for gates built from an already valid layout.
    pub(crate) fn push_unchecked(&mut self, g: QGate) {
        debug_assert!(g.qubits().all(|q| q < self.num_qubits()));
        self.gates.push(g);
    }

    pub fn append(&mut self, other: &QCircuit) -> Result<&mut Self, CircuitError> {
        if other.regs != self.regs {
            return Err(CircuitError::LayoutMismatch);
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(self)
    }

    pub fn inverse(&self) -> QCircuit {
        QCircuit {
            regs: self.regs,
            gates: self.gates.iter().rev().map(QGate::inverse).collect(),
        }
    }

    /// Basis-state action of a circuit made of X-type gates only; `None`
    /// if it contains H or P.
    pub fn permute(&self, mut v: u64) -> Option<u64> {
        for g in &self.gates {
            match g.op {
                GateOp::H | GateOp::P(_) => return None,
                _ => {
                    let on = g
                        .controls
                        .iter()
                        .all(|c| ((v >> c.qubit) & 1 == 1) == (c.polarity == Polarity::Positive));
                    if on {
                        v ^= 1 << g.target;
                    }
                }
            }
        }
        Some(v)
    }

    /// Number of gates touching `qubit`.
    pub fn gates_on(&self, qubit: usize) -> usize {
        self.gates.iter().filter(|g| g.qubits().any(|q| q == qubit)).count()
    }
}

impl fmt::Display for QCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

fn emit_esop(qc: &mut QCircuit, cn: &ClauseNetwork, expr: &EsopExpr, target: usize) {
    if expr.constant() {
        qc.push_unchecked(QGate::x(target));
    }
    for term in expr.terms() {
        let controls = term
            .literals()
            .iter()
            .map(|l| {
                let q = cn.var_index(&l.var).expect("validated network");
                Control::with_value(q, l.positive)
            })
            .collect();
        qc.push_unchecked(QGate::controlled_x(controls, target));
    }
}

/// Computes `e_j = (a_j <=> G_j)` for every aux definition.
fn inference(cn: &ClauseNetwork) -> QCircuit {
    let regs = Registers::miter(cn.num_inputs(), cn.num_aux());
    let mut qc = QCircuit::new(regs);
    let e0 = regs.ancillae().start;
    for (j, def) in cn.aux_defs().iter().enumerate() {
        emit_esop(&mut qc, cn, &def.expr, e0 + j);
    }
    qc
}

/// The y-targeting gates: top-and-consistent, then one full-width gate per exclusion.
fn answer_flips(cn: &ClauseNetwork) -> QCircuit {
    let regs = Registers::miter(cn.num_inputs(), cn.num_aux());
    let mut qc = QCircuit::new(regs);
    let y = regs.answer_qubit().expect("miter layout has y");
    let consistent: Vec<Control> = regs.ancillae().map(Control::pos).collect();
    if let Some(top) = cn.top_index() {
        let mut controls = vec![Control::pos(top)];
        controls.extend_from_slice(&consistent);
        qc.push_unchecked(QGate::controlled_x(controls, y));
    }
    for &v in cn.excluded_assignments() {
        let mut controls: Vec<Control> = regs
            .search()
            .map(|q| Control::with_value(q, (v >> q) & 1 == 1))
            .collect();
        controls.extend_from_slice(&consistent);
        qc.push_unchecked(QGate::controlled_x(controls, y));
    }
    qc
}

/// Answer-bit miter: `|X,A>|0..0>|y> -> |X,A>|E'>|y ^ F(X,A)>`, with `E'`
/// left holding the per-aux consistency bits.
pub fn build_vf(cn: &ClauseNetwork) -> QCircuit {
    let mut qc = inference(cn);
    qc.append(&answer_flips(cn)).expect("same layout");
    qc
}

/// Phase miter: inference, answer flips, then the inference mirrored so that
/// every ancilla returns to `|0>`. With `y` in `|->` the action on `|X,A>` is
/// the phase `(-1)^F(X,A)`.
pub fn build_uf(cn: &ClauseNetwork) -> QCircuit {
    let forward = inference(cn);
    let mut qc = forward.clone();
    qc.append(&answer_flips(cn)).expect("same layout");
    qc.append(&forward.inverse()).expect("same layout");
    qc
}

/// Inversion about the mean on qubits `0..n` of `regs`:
/// `H^n X^n (C^{n-1}Z) X^n H^n`, equal to `2|s><s| - I` up to a global phase.
pub fn build_diffuser(regs: Registers, n: usize) -> Result<QCircuit, CircuitError> {
    if n == 0 || n > regs.num_qubits() {
        return Err(CircuitError::BadDiffuser(n, regs.num_qubits()));
    }
    let mut qc = QCircuit::new(regs);
    let t = n - 1;
    for q in 0..n {
        qc.push_unchecked(QGate::h(q));
    }
    for q in 0..n {
        qc.push_unchecked(QGate::x(q));
    }
    qc.push_unchecked(QGate::h(t));
    qc.push_unchecked(QGate::controlled_x((0..t).map(Control::pos).collect(), t));
    qc.push_unchecked(QGate::h(t));
    for q in 0..n {
        qc.push_unchecked(QGate::x(q));
    }
    for q in 0..n {
        qc.push_unchecked(QGate::h(q));
    }
    Ok(qc)
}

/// `y <- |->` and a uniform superposition over `X` and `A`.
pub fn build_initialization(regs: Registers) -> QCircuit {
    let mut qc = QCircuit::new(regs);
    if let Some(y) = regs.answer_qubit() {
        qc.push_unchecked(QGate::x(y));
        qc.push_unchecked(QGate::h(y));
    }
    for q in regs.search() {
        qc.push_unchecked(QGate::h(q));
    }
    qc
}

/// Initialization followed by `iterations` rounds of oracle and diffuser.
pub fn build_grover_prefix(oracle: &ClauseNetwork, iterations: u64) -> QCircuit {
    let regs = Registers::miter(oracle.num_inputs(), oracle.num_aux());
    let uf = build_uf(oracle);
    let ud = build_diffuser(regs, regs.search().len().max(1)).expect("search space fits");
    let mut qc = build_initialization(regs);
    for _ in 0..iterations {
        qc.append(&uf).expect("same layout");
        qc.append(&ud).expect("same layout");
    }
    qc
}

/// The full search network: Grover prefix, `y` returned to `|0>`, then the
/// answer-bit miter of `verify`.
pub fn build_qsat_network(oracle: &ClauseNetwork, verify: &ClauseNetwork, iterations: u64) -> QCircuit {
    let mut qc = build_grover_prefix(oracle, iterations);
    let y = qc.registers().answer_qubit().expect("miter layout has y");
    qc.push_unchecked(QGate::h(y));
    qc.push_unchecked(QGate::x(y));
    qc.append(&build_vf(verify)).expect("same layout");
    qc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clauses::build_miter;
    use crate::netlist::parse_netlist;

    fn and_miter() -> ClauseNetwork {
        let r = parse_netlist("inputs x1 x2 x3\na1 = AND(x1,x2)\na2 = AND(a1,x3)\noutputs a2").unwrap();
        let f = r.replace_gate("a1", crate::netlist::GateTag::Nor).unwrap();
        build_miter(&f, &r).unwrap()
    }

    #[test]
    fn miter_qubit_count() {
        let cn = and_miter();
        assert_eq!(build_vf(&cn).num_qubits(), 14);
        assert_eq!(build_uf(&cn).num_qubits(), 14);
    }

    #[test]
    fn empty_network_has_no_answer_gates() {
        let cn = ClauseNetwork::empty(vec!["x1".into(), "x2".into(), "x3".into()]).unwrap();
        let vf = build_vf(&cn);
        assert_eq!(vf.num_qubits(), 4);
        assert_eq!(vf.gates_on(3), 0);
    }

    #[test]
    fn uf_is_compute_flip_uncompute() {
        let cn = and_miter();
        let vf = build_vf(&cn);
        let uf = build_uf(&cn);
        let inference = vf.len() - 1;
        assert_eq!(uf.len(), 2 * inference + 1);
        assert_eq!(&uf.gates()[..inference], &vf.gates()[..inference]);
        let tail: Vec<QGate> = uf.gates()[inference + 1..].to_vec();
        let mut rev = vf.gates()[..inference].to_vec();
        rev.reverse();
        assert_eq!(tail, rev);
    }

    #[test]
    fn exclusion_adds_full_width_gate() {
        let cn = and_miter();
        let ex = cn.exclude_cex(&cn.record(cn.propagate(0b111))).unwrap();
        let vf = build_vf(&ex);
        let last = vf.gates().last().unwrap();
        assert_eq!(last.controls().len(), 8 + 5);
        assert_eq!(last.target(), 13);
        assert_eq!(vf.len(), build_vf(&cn).len() + 1);
    }

    #[test]
    fn push_validates() {
        let mut qc = QCircuit::new(Registers::bare(2));
        assert_eq!(qc.push(QGate::x(2)).unwrap_err(), CircuitError::OutOfRange(2, 2));
        assert_eq!(qc.push(QGate::cx(1, 1)).unwrap_err(), CircuitError::RepeatedQubit(1));
        assert!(qc.push(QGate::cx(0, 1)).is_ok());
    }

    #[test]
    fn gate_kinds_follow_control_count() {
        assert_eq!(QGate::controlled_x(vec![], 0).op(), GateOp::X);
        assert_eq!(QGate::controlled_x(vec![Control::neg(1)], 0).op(), GateOp::CX);
        assert_eq!(QGate::ccx(1, 2, 0).op(), GateOp::MCX);
        assert!(!QGate::controlled_x(vec![Control::neg(1)], 0).is_basis());
    }

    #[test]
    fn diffuser_shape() {
        let d = build_diffuser(Registers::bare(3), 3).unwrap();
        assert_eq!(d.len(), 4 * 3 + 3);
        assert!(build_diffuser(Registers::bare(3), 4).is_err());
        assert!(build_diffuser(Registers::bare(3), 0).is_err());
    }
}
