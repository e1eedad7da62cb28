#![allow(dead_code)]

use num_complex::Complex64;
use qsat::corpus::{builtin, RefStyle};
use qsat::sim::Statevector;
use qsat::{build_miter, ClauseNetwork, QCircuit};

pub const NAMES: [&str; 9] = ["AND", "NAND", "OR", "NOR", "XOR", "XNOR", "MUX", "CARRY", "FA"];

pub struct Case {
    pub name: String,
    pub style: RefStyle,
    pub cn: ClauseNetwork,
}

/// All eighteen corpus miters, flat first within each benchmark.
pub fn cases() -> Vec<Case> {
    let mut out = Vec::new();
    for b in builtin() {
        for style in RefStyle::ALL {
            let (i, r) = b.pair(style).unwrap();
            out.push(Case {
                name: b.name.clone(),
                style,
                cn: build_miter(&i, &r).unwrap(),
            });
        }
    }
    out
}

pub fn case(name: &str, style: RefStyle) -> ClauseNetwork {
    cases()
        .into_iter()
        .find(|c| c.name == name && c.style == style)
        .unwrap()
        .cn
}

/// Output state of `qc` for each listed basis input.
pub fn columns(qc: &QCircuit, inputs: &[u64]) -> Vec<Vec<Complex64>> {
    inputs
        .iter()
        .map(|&v| {
            let mut sv = Statevector::<f64>::basis(qc.num_qubits(), v).unwrap();
            sv.apply_circuit(qc).unwrap();
            sv.amplitudes().to_vec()
        })
        .collect()
}

/// Largest entry-wise deviation between `a` and `b` after removing one
/// common global phase, taken from the largest entry of `b`.
pub fn phase_distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let (mut best, mut idx) = (0.0, (0, 0));
    for (c, col) in b.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            if z.norm() > best {
                best = z.norm();
                idx = (c, r);
            }
        }
    }
    let phase = a[idx.0][idx.1] / b[idx.0][idx.1];
    let phase = phase / phase.norm();
    a.iter()
        .zip(b)
        .flat_map(|(ca, cb)| ca.iter().zip(cb).map(move |(x, y)| (x - y * phase).norm()))
        .fold(0.0, f64::max)
}

/// Basis inputs with every ancilla qubit of `qc` at zero.
pub fn ancilla_free_inputs(qc: &QCircuit) -> Vec<u64> {
    let regs = qc.registers();
    let anc: u64 = regs.ancillae().map(|q| 1u64 << q).sum();
    (0..1u64 << qc.num_qubits()).filter(|v| v & anc == 0).collect()
}
