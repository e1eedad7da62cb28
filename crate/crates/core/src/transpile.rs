//! Lowering to the `{CX, X, P, H}` basis and resource accounting.
//!
//! Multi-controlled X gates are broken into Toffoli ladders over helper
//! qubits. A clean ladder needs `c - 2` qubits known to be `|0>`; a dirty
//! ladder borrows any `c - 2` idle qubits and restores them. With fewer idle
//! qubits the gate is split in two halves around one borrowed qubit, and with
//! none at all it is rebuilt from controlled phases.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{build_qsat_network, GateOp, Polarity, QCircuit, QGate};
use crate::clauses::build_miter;
use crate::grover::grover_iterations;
use crate::netlist::Netlist;

#[derive(Debug, Error)]
pub enum TranspileError {
    #[error("{controls}-control gate needs {needed} clean ancillae, only {available} available")]
    InsufficientAncillae {
        controls: usize,
        needed: usize,
        available: usize,
    },
    #[error("unknown transpile mode `{0}`")]
    UnknownMode(String),
    #[error("resources need a counter-example count of at least 1")]
    NoCounterExamples,
    #[error(transparent)]
    Clause(#[from] crate::clauses::ClauseError),
    #[error(transparent)]
    Grover(#[from] crate::grover::GroverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TranspileMode {
    /// Clean ancillae only; fails when a gate has too few.
    VChain,
    /// Borrowed ancillae only.
    VChainDirty,
    /// Clean ladder where possible, borrowed otherwise.
    #[default]
    Auto,
}

impl fmt::Display for TranspileMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TranspileMode::VChain => "v-chain",
            TranspileMode::VChainDirty => "v-chain-dirty",
            TranspileMode::Auto => "auto",
        })
    }
}

impl FromStr for TranspileMode {
    type Err = TranspileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "v-chain" => Ok(TranspileMode::VChain),
            "v-chain-dirty" => Ok(TranspileMode::VChainDirty),
            "auto" => Ok(TranspileMode::Auto),
            _ => Err(TranspileError::UnknownMode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub q: usize,
    pub cx: usize,
    pub u: usize,
    pub depth: usize,
    pub gi: Option<u64>,
}

impl ResourceReport {
    /// Counts of a circuit that is already in the basis.
    pub fn of(qc: &QCircuit) -> Self {
        let cx = qc.gates().iter().filter(|g| g.is_two_qubit()).count();
        ResourceReport {
            q: qc.num_qubits(),
            cx,
            u: qc.len() - cx,
            depth: depth(qc),
            gi: None,
        }
    }
}

/// Longest chain of gates that share a qubit.
pub fn depth(qc: &QCircuit) -> usize {
    let mut level = vec![0usize; qc.num_qubits()];
    let mut best = 0;
    for g in qc.gates() {
        let d = g.qubits().map(|q| level[q]).max().unwrap_or(0) + 1;
        for q in g.qubits() {
            level[q] = d;
        }
        best = best.max(d);
    }
    best
}

/// Rewrites `qc` over `{CX, X, P, H}`.
///
/// Ancilla-register qubits count as clean until the source circuit first
/// targets them, so clean ladders assume the ancillae start in `|0>`.
pub fn transpile(qc: &QCircuit, mode: TranspileMode) -> Result<(QCircuit, ResourceReport), TranspileError> {
    let n = qc.num_qubits();
    let mut clean = vec![false; n];
    for q in qc.registers().ancillae() {
        clean[q] = true;
    }
    let mut lw = Lowering {
        out: QCircuit::new(qc.registers()),
        n,
        mode,
    };
    for g in qc.gates() {
        match g.op() {
            GateOp::X | GateOp::H | GateOp::P(_) => lw.emit(g.clone()),
            GateOp::CX | GateOp::MCX => lw.mcx(g, &clean)?,
        }
        clean[g.target()] = false;
    }
    let report = ResourceReport::of(&lw.out);
    Ok((lw.out, report))
}

struct Lowering {
    out: QCircuit,
    n: usize,
    mode: TranspileMode,
}

impl Lowering {
    fn emit(&mut self, g: QGate) {
        self.out.push_unchecked(g);
    }

    fn mcx(&mut self, g: &QGate, clean: &[bool]) -> Result<(), TranspileError> {
        let negs: Vec<usize> = g
            .controls()
            .iter()
            .filter(|c| c.polarity == Polarity::Negative)
            .map(|c| c.qubit)
            .collect();
        let ctrls: Vec<usize> = g.controls().iter().map(|c| c.qubit).collect();
        // Nested ladders may borrow this gate's own qubits, which are not |0>
        // while it is being lowered.
        let mut clean = clean.to_vec();
        for q in g.qubits() {
            clean[q] = false;
        }
        for &q in &negs {
            self.emit(QGate::x(q));
        }
        self.mcx_pos(&ctrls, g.target(), &clean, self.mode)?;
        for &q in &negs {
            self.emit(QGate::x(q));
        }
        Ok(())
    }

    fn idle(&self, ctrls: &[usize], t: usize) -> impl Iterator<Item = usize> + '_ {
        let mut busy = vec![false; self.n];
        for &q in ctrls {
            busy[q] = true;
        }
        busy[t] = true;
        (0..self.n).filter(move |&q| !busy[q])
    }

    fn mcx_pos(
        &mut self,
        ctrls: &[usize],
        t: usize,
        clean: &[bool],
        mode: TranspileMode,
    ) -> Result<(), TranspileError> {
        let c = ctrls.len();
        match c {
            0 => self.emit(QGate::x(t)),
            1 => self.emit(QGate::cx(ctrls[0], t)),
            2 => self.toffoli(ctrls[0], ctrls[1], t),
            _ => {}
        }
        if c <= 2 {
            return Ok(());
        }
        if mode != TranspileMode::VChainDirty {
            let cleans: Vec<usize> = self.idle(ctrls, t).filter(|&q| clean[q]).collect();
            if cleans.len() >= c - 2 {
                self.clean_chain(ctrls, &cleans[..c - 2], t);
                return Ok(());
            }
            if mode == TranspileMode::VChain {
                return Err(TranspileError::InsufficientAncillae {
                    controls: c,
                    needed: c - 2,
                    available: cleans.len(),
                });
            }
        }
        let free: Vec<usize> = self.idle(ctrls, t).collect();
        if free.len() >= c - 2 {
            self.dirty_chain(ctrls, &free[..c - 2], t);
        } else if let Some(&b) = free.first() {
            let (c1, c2) = ctrls.split_at(c.div_ceil(2));
            let mut c2b = c2.to_vec();
            c2b.push(b);
            for _ in 0..2 {
                self.mcx_pos(c1, b, clean, mode)?;
                self.mcx_pos(&c2b, t, clean, mode)?;
            }
        } else {
            self.emit(QGate::h(t));
            self.mcp(PI, ctrls, t, clean, mode)?;
            self.emit(QGate::h(t));
        }
        Ok(())
    }

    fn clean_chain(&mut self, ctrls: &[usize], anc: &[usize], t: usize) {
        let k = ctrls.len();
        let mut ladder = vec![(ctrls[0], ctrls[1], anc[0])];
        for i in 0..k - 3 {
            ladder.push((ctrls[i + 2], anc[i], anc[i + 1]));
        }
        for &(a, b, c) in &ladder {
            self.toffoli(a, b, c);
        }
        self.toffoli(ctrls[k - 1], anc[k - 3], t);
        for &(a, b, c) in ladder.iter().rev() {
            self.toffoli(a, b, c);
        }
    }

    fn dirty_chain(&mut self, ctrls: &[usize], anc: &[usize], t: usize) {
        let k = ctrls.len();
        let top = (ctrls[k - 1], anc[k - 3], t);
        let mut ladder = Vec::with_capacity(2 * k);
        for i in (0..k - 3).rev() {
            ladder.push((ctrls[i + 2], anc[i], anc[i + 1]));
        }
        ladder.push((ctrls[0], ctrls[1], anc[0]));
        for i in 0..k - 3 {
            ladder.push((ctrls[i + 2], anc[i], anc[i + 1]));
        }
        self.toffoli(top.0, top.1, top.2);
        for &(a, b, c) in &ladder {
            self.toffoli(a, b, c);
        }
        self.toffoli(top.0, top.1, top.2);
        for &(a, b, c) in &ladder {
            self.toffoli(a, b, c);
        }
    }

    /// Phase `e^{i phi}` when every control and `t` are 1.
    fn mcp(
        &mut self,
        phi: f64,
        ctrls: &[usize],
        t: usize,
        clean: &[bool],
        mode: TranspileMode,
    ) -> Result<(), TranspileError> {
        match ctrls.split_last() {
            None => self.emit(QGate::p(phi, t)),
            Some((&ck, [])) => self.cp(phi, ck, t),
            Some((&ck, rest)) => {
                self.cp(phi / 2.0, ck, t);
                self.mcx_pos(rest, ck, clean, mode)?;
                self.cp(-phi / 2.0, ck, t);
                self.mcx_pos(rest, ck, clean, mode)?;
                self.mcp(phi / 2.0, rest, t, clean, mode)?;
            }
        }
        Ok(())
    }

    fn cp(&mut self, phi: f64, c: usize, t: usize) {
        self.emit(QGate::p(phi / 2.0, c));
        self.emit(QGate::cx(c, t));
        self.emit(QGate::p(-phi / 2.0, t));
        self.emit(QGate::cx(c, t));
        self.emit(QGate::p(phi / 2.0, t));
    }

    /// Six CX, nine single-qubit gates.
    fn toffoli(&mut self, a: usize, b: usize, t: usize) {
        let tq = PI / 4.0;
        self.emit(QGate::h(t));
        self.emit(QGate::cx(b, t));
        self.emit(QGate::p(-tq, t));
        self.emit(QGate::cx(a, t));
        self.emit(QGate::p(tq, t));
        self.emit(QGate::cx(b, t));
        self.emit(QGate::p(-tq, t));
        self.emit(QGate::cx(a, t));
        self.emit(QGate::p(tq, b));
        self.emit(QGate::p(tq, t));
        self.emit(QGate::h(t));
        self.emit(QGate::cx(a, b));
        self.emit(QGate::p(tq, a));
        self.emit(QGate::p(-tq, b));
        self.emit(QGate::cx(a, b));
    }
}

/// Resources of the complete search network for `imp` against `reference`,
/// with `m` counter-examples setting the iteration count.
pub fn resources(imp: &Netlist, reference: &Netlist, m: u64) -> Result<ResourceReport, TranspileError> {
    resources_with(imp, reference, m, TranspileMode::Auto)
}

pub fn resources_with(
    imp: &Netlist,
    reference: &Netlist,
    m: u64,
    mode: TranspileMode,
) -> Result<ResourceReport, TranspileError> {
    if m == 0 {
        return Err(TranspileError::NoCounterExamples);
    }
    let cn = build_miter(imp, reference)?;
    let gi = grover_iterations(cn.num_vars(), m)?;
    let qc = build_qsat_network(&cn, &cn, gi);
    let (_, mut report) = transpile(&qc, mode)?;
    report.gi = Some(gi);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Control, Registers};

    fn basis_only(qc: &QCircuit) -> bool {
        qc.gates().iter().all(QGate::is_basis)
    }

    fn classical(qc: &QCircuit, mut v: u64) -> u64 {
        for g in qc.gates() {
            let on = g
                .controls()
                .iter()
                .all(|c| ((v >> c.qubit) & 1 == 1) == (c.polarity == Polarity::Positive));
            match g.op() {
                GateOp::X | GateOp::CX | GateOp::MCX if on => v ^= 1 << g.target(),
                GateOp::X | GateOp::CX | GateOp::MCX => {}
                _ => panic!("not classical"),
            }
        }
        v
    }

    #[test]
    fn toffoli_counts() {
        let mut qc = QCircuit::new(Registers::bare(3));
        qc.push(QGate::ccx(0, 1, 2)).unwrap();
        let (out, r) = transpile(&qc, TranspileMode::Auto).unwrap();
        assert!(basis_only(&out));
        assert_eq!((r.cx, r.u, r.depth), (6, 9, 11));
    }

    #[test]
    fn cx_passes_through() {
        let mut qc = QCircuit::new(Registers::bare(2));
        qc.push(QGate::cx(0, 1)).unwrap();
        let (out, r) = transpile(&qc, TranspileMode::VChain).unwrap();
        assert_eq!(out.gates(), qc.gates());
        assert_eq!((r.cx, r.u, r.depth), (1, 0, 1));
    }

    #[test]
    fn chain_lengths() {
        let regs = Registers {
            x: 5,
            a: 0,
            e: 3,
            answer: true,
        };
        let mut qc = QCircuit::new(regs);
        qc.push(QGate::controlled_x((0..5).map(Control::pos).collect(), 8))
            .unwrap();
        let (_, clean) = transpile(&qc, TranspileMode::VChain).unwrap();
        assert_eq!(clean.cx, 6 * (2 * 3 + 1));
        let (_, dirty) = transpile(&qc, TranspileMode::VChainDirty).unwrap();
        assert_eq!(dirty.cx, 6 * 4 * 3);
    }

    #[test]
    fn strict_mode_needs_clean_qubits() {
        let mut qc = QCircuit::new(Registers::bare(6));
        qc.push(QGate::controlled_x((0..5).map(Control::pos).collect(), 5))
            .unwrap();
        let err = transpile(&qc, TranspileMode::VChain).unwrap_err();
        assert!(matches!(
            err,
            TranspileError::InsufficientAncillae {
                controls: 5,
                needed: 3,
                available: 0
            }
        ));
        assert!(transpile(&qc, TranspileMode::Auto).is_ok());
    }

    #[test]
    fn depth_of_parallel_gates() {
        let mut qc = QCircuit::new(Registers::bare(4));
        qc.push(QGate::h(0)).unwrap();
        qc.push(QGate::h(1)).unwrap();
        qc.push(QGate::cx(0, 1)).unwrap();
        qc.push(QGate::x(3)).unwrap();
        assert_eq!(depth(&qc), 2);
    }

    #[test]
    fn mode_round_trip() {
        for m in [TranspileMode::VChain, TranspileMode::VChainDirty, TranspileMode::Auto] {
            assert_eq!(m.to_string().parse::<TranspileMode>().unwrap(), m);
        }
        assert!("fast".parse::<TranspileMode>().is_err());
    }

    #[test]
    fn reference_mcx_is_classical() {
        let mut qc = QCircuit::new(Registers::bare(4));
        qc.push(QGate::controlled_x(
            vec![Control::pos(0), Control::neg(1), Control::pos(2)],
            3,
        ))
        .unwrap();
        for v in 0..16u64 {
            let fire = v & 1 == 1 && v & 2 == 0 && v & 4 == 4;
            assert_eq!(classical(&qc, v), v ^ if fire { 8 } else { 0 });
        }
    }
}
