mod common;

use common::{ancilla_free_inputs, case, cases, columns, phase_distance};
use proptest::prelude::*;
use qsat::circuit::{Control, Registers};
use qsat::corpus::{builtin, RefStyle};
use qsat::transpile::{resources_with, TranspileError};
use qsat::{build_uf, build_vf, transpile, QCircuit, QGate, TranspileMode};

const TOL: f64 = 1e-9;

fn all_inputs(qc: &QCircuit) -> Vec<u64> {
    (0..1u64 << qc.num_qubits()).collect()
}

fn assert_basis(qc: &QCircuit) {
    assert!(qc.gates().iter().all(|g| g.is_basis()), "non-basis gate left");
}

#[test]
fn toffoli_unitary() {
    let mut qc = QCircuit::new(Registers::bare(3));
    qc.push(QGate::ccx(0, 1, 2)).unwrap();
    for mode in [TranspileMode::VChainDirty, TranspileMode::Auto, TranspileMode::VChain] {
        let (t, r) = transpile(&qc, mode).unwrap();
        assert_basis(&t);
        assert_eq!((r.cx, r.u, r.depth), (6, 9, 11));
        let inputs = all_inputs(&qc);
        assert!(phase_distance(&columns(&t, &inputs), &columns(&qc, &inputs)) < TOL);
    }
}

#[test]
fn basis_gates_pass_through() {
    let mut qc = QCircuit::new(Registers::bare(2));
    qc.push(QGate::h(0)).unwrap();
    qc.push(QGate::cx(0, 1)).unwrap();
    qc.push(QGate::p(0.3, 1)).unwrap();
    let (t, r) = transpile(&qc, TranspileMode::Auto).unwrap();
    assert_eq!(t.gates(), qc.gates());
    assert_eq!((r.cx, r.u, r.depth), (1, 2, 3));
}

/// A mixed-polarity MCX equals the all-positive gate conjugated by `X` on
/// the negative controls, and both lower to the same unitary.
#[test]
fn negative_controls_exhaustive() {
    for c in 1..=4usize {
        let n = c + 1;
        for mask in 0..1u32 << c {
            let ctrls: Vec<Control> = (0..c).map(|i| Control::with_value(i, mask >> i & 1 == 0)).collect();
            let mut mixed = QCircuit::new(Registers::bare(n));
            mixed.push(QGate::controlled_x(ctrls, c)).unwrap();
            let mut conj = QCircuit::new(Registers::bare(n));
            let neg: Vec<usize> = (0..c).filter(|i| mask >> i & 1 == 1).collect();
            for &q in &neg {
                conj.push(QGate::x(q)).unwrap();
            }
            conj.push(QGate::controlled_x((0..c).map(Control::pos).collect(), c))
                .unwrap();
            for &q in &neg {
                conj.push(QGate::x(q)).unwrap();
            }
            let inputs = all_inputs(&mixed);
            for v in &inputs {
                assert_eq!(mixed.permute(*v), conj.permute(*v));
            }
            let (t, _) = transpile(&mixed, TranspileMode::VChainDirty).unwrap();
            assert_basis(&t);
            let err = phase_distance(&columns(&t, &inputs), &columns(&conj, &inputs));
            assert!(err < TOL, "c={c} mask={mask:b}: {err}");
        }
    }
}

#[test]
fn ancilla_free_fallback() {
    // No idle qubit at all: five controls on a six-qubit register.
    let mut qc = QCircuit::new(Registers::bare(6));
    qc.push(QGate::controlled_x((0..5).map(Control::pos).collect(), 5))
        .unwrap();
    let (t, _) = transpile(&qc, TranspileMode::Auto).unwrap();
    assert_basis(&t);
    let inputs = all_inputs(&qc);
    assert!(phase_distance(&columns(&t, &inputs), &columns(&qc, &inputs)) < TOL);
}

/// One idle qubit forces the split fallback; its halves must not treat the
/// X-conjugated controls or the target as clean.
#[test]
fn split_fallback_with_negative_controls() {
    let mut qc = QCircuit::new(Registers::miter(2, 2));
    let ctrls = [0, 4, 1, 2, 3].map(Control::neg).to_vec();
    qc.push(QGate::controlled_x(ctrls, 5)).unwrap();
    let inputs = ancilla_free_inputs(&qc);
    for mode in [TranspileMode::Auto, TranspileMode::VChainDirty] {
        let (t, _) = transpile(&qc, mode).unwrap();
        assert!(
            phase_distance(&columns(&t, &inputs), &columns(&qc, &inputs)) < TOL,
            "{mode}"
        );
    }
}

#[test]
fn strict_mode_reports_missing_ancillae() {
    let mut qc = QCircuit::new(Registers::bare(6));
    qc.push(QGate::controlled_x((0..5).map(Control::pos).collect(), 5))
        .unwrap();
    let err = transpile(&qc, TranspileMode::VChain).unwrap_err();
    assert!(
        matches!(err, TranspileError::InsufficientAncillae { controls: 5, .. }),
        "{err}"
    );
}

/// Transpiled V_F of a twelve-qubit miter against the original on every
/// basis state.
#[test]
fn vf_twelve_qubits() {
    let cn = case("AND", RefStyle::Structured);
    let vf = build_vf(&cn);
    assert_eq!(vf.num_qubits(), 12);
    let inputs = all_inputs(&vf);
    let want = columns(&vf, &inputs);
    let (dirty, _) = transpile(&vf, TranspileMode::VChainDirty).unwrap();
    assert_basis(&dirty);
    assert!(phase_distance(&columns(&dirty, &inputs), &want) < TOL);

    let clean_inputs = ancilla_free_inputs(&vf);
    let want = columns(&vf, &clean_inputs);
    let (auto, _) = transpile(&vf, TranspileMode::Auto).unwrap();
    assert_basis(&auto);
    assert!(phase_distance(&columns(&auto, &clean_inputs), &want) < TOL);
}

#[test]
fn uf_lowering_preserves_action_on_clean_ancillae() {
    for name in ["XOR", "NOR"] {
        let uf = build_uf(&case(name, RefStyle::Structured));
        let inputs = ancilla_free_inputs(&uf);
        let (t, _) = transpile(&uf, TranspileMode::Auto).unwrap();
        assert!(
            phase_distance(&columns(&t, &inputs), &columns(&uf, &inputs)) < TOL,
            "{name}"
        );
    }
}

#[test]
fn structured_cheaper_than_flat() {
    for b in builtin() {
        let (i, f) = b.pair(RefStyle::Flat).unwrap();
        let s = b.reference(RefStyle::Structured).unwrap();
        let m = qsat::enumerate_cex(&qsat::build_miter(&i, &f).unwrap())
            .unwrap()
            .cex_count;
        let rf = resources_with(&i, &f, m, TranspileMode::Auto).unwrap();
        let rs = resources_with(&i, &s, m, TranspileMode::Auto).unwrap();
        assert!(
            rs.q < rf.q && rs.cx < rf.cx && rs.u < rf.u && rs.depth < rf.depth,
            "{}: {rf:?} vs {rs:?}",
            b.name
        );
    }
}

#[test]
fn zero_count_has_no_resources() {
    let b = builtin().remove(0);
    let (i, r) = b.pair(RefStyle::Flat).unwrap();
    assert!(matches!(
        resources_with(&i, &r, 0, TranspileMode::Auto),
        Err(TranspileError::NoCounterExamples)
    ));
}

#[test]
fn every_miter_lowers_in_both_modes() {
    for c in cases() {
        let uf = build_uf(&c.cn);
        for mode in [TranspileMode::Auto, TranspileMode::VChainDirty] {
            let (t, _) = transpile(&uf, mode).unwrap();
            assert_basis(&t);
        }
    }
}

#[derive(Debug, Clone)]
enum G {
    X(usize),
    H(usize),
    P(f64, usize),
    Mcx(Vec<(usize, bool)>, usize),
}

fn gate(n: usize) -> impl Strategy<Value = G> {
    prop_oneof![
        (0..n).prop_map(G::X),
        (0..n).prop_map(G::H),
        (-3.2f64..3.2, 0..n).prop_map(|(t, q)| G::P(t, q)),
        (0..n, proptest::collection::vec((0..n, any::<bool>()), 1..6)).prop_map(|(t, c)| G::Mcx(c, t)),
    ]
}

fn build(regs: Registers, gs: &[G]) -> QCircuit {
    let mut qc = QCircuit::new(regs);
    for g in gs {
        let g = match g {
            G::X(q) => QGate::x(*q),
            G::H(q) => QGate::h(*q),
            G::P(t, q) => QGate::p(*t, *q),
            G::Mcx(cs, t) => {
                let mut seen = vec![*t];
                let ctrls: Vec<Control> = cs
                    .iter()
                    .filter(|(q, _)| {
                        let fresh = !seen.contains(q);
                        seen.push(*q);
                        fresh
                    })
                    .map(|&(q, v)| Control::with_value(q, v))
                    .collect();
                QGate::controlled_x(ctrls, *t)
            }
        };
        qc.push(g).unwrap();
    }
    qc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dirty_lowering_is_exact(gs in proptest::collection::vec(gate(7), 1..8)) {
        let qc = build(Registers::miter(2, 2), &gs);
        let (t, _) = transpile(&qc, TranspileMode::VChainDirty).unwrap();
        let inputs = all_inputs(&qc);
        prop_assert!(phase_distance(&columns(&t, &inputs), &columns(&qc, &inputs)) < TOL);
    }

    #[test]
    fn auto_lowering_on_clean_ancillae(gs in proptest::collection::vec(gate(7), 1..8)) {
        let qc = build(Registers::miter(2, 2), &gs);
        let (t, _) = transpile(&qc, TranspileMode::Auto).unwrap();
        let inputs = ancilla_free_inputs(&qc);
        prop_assert!(phase_distance(&columns(&t, &inputs), &columns(&qc, &inputs)) < TOL);
    }
}
