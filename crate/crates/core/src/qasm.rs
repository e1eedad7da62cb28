//! OpenQASM 2.0 text for basis-only circuits.

use std::fmt::Write;

use thiserror::Error;

use crate::circuit::{GateOp, QCircuit, QGate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QasmError {
    #[error("gate `{0}` is not in the x/h/p/cx basis; transpile first")]
    NotBasis(String),
}

/// Writes `qc` with one `qreg` per non-empty register (`x`, `a`, `e`, `y`).
pub fn to_qasm(qc: &QCircuit) -> Result<String, QasmError> {
    let regs = qc.registers();
    let layout: Vec<(&str, std::ops::Range<usize>)> = vec![
        ("x", regs.inputs()),
        ("a", regs.aux()),
        ("e", regs.ancillae()),
        ("y", regs.answer_qubit().map_or(0..0, |y| y..y + 1)),
    ];
    let name = |q: usize| {
        let (r, range) = layout
            .iter()
            .find(|(_, r)| r.contains(&q))
            .expect("qubit in a register");
        format!("{r}[{}]", q - range.start)
    };

    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    for (r, range) in &layout {
        if !range.is_empty() {
            writeln!(s, "qreg {r}[{}];", range.len()).unwrap();
        }
    }
    for g in qc.gates() {
        if !g.is_basis() {
            return Err(QasmError::NotBasis(g.to_string()));
        }
        let t = name(g.target());
        match g.op() {
            GateOp::X => writeln!(s, "x {t};"),
            GateOp::H => writeln!(s, "h {t};"),
            GateOp::P(theta) => writeln!(s, "p({theta:.17}) {t};"),
            GateOp::CX => writeln!(s, "cx {},{t};", name(control(g))),
            GateOp::MCX => unreachable!("rejected above"),
        }
        .unwrap();
    }
    Ok(s)
}

fn control(g: &QGate) -> usize {
    g.controls()[0].qubit
}
