//! The search driver: initialization, oracle and diffuser rounds, final
//! answer-bit evaluation, measurement and the SAT/UNSAT verdict.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{build_grover_prefix, build_vf, QCircuit, QGate, Registers};
use crate::clauses::{CexRecord, ClauseError, ClauseNetwork};
use crate::oracle::{check_cex, OracleError};
use crate::sim::{SimError, Simulator, Statevector};

/// Default shot count in sampling mode.
pub const DEFAULT_SHOTS: u64 = 4096;
pub const DEFAULT_SEED: u64 = 7;
/// Widest circuit measured exactly unless asked otherwise.
pub const EXHAUSTIVE_MAX_QUBITS: usize = 22;
/// Outcomes below this probability count as absent in exact mode.
pub const ZERO_MASS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GroverError {
    #[error("counter-example count {m} out of range for a {n}-qubit search space")]
    CountOutOfRange { m: u64, n: usize },
    #[error("no counter-example count given")]
    MissingHint,
    #[error("shot count must be at least 1")]
    NoShots,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Clause(#[from] ClauseError),
}

/// `round(sqrt(2^n / m) / 2)`, at least 1.
pub fn grover_iterations(n: usize, m: u64) -> Result<u64, GroverError> {
    let space = (n as f64).exp2();
    if m == 0 || m as f64 > space {
        return Err(GroverError::CountOutOfRange { m, n });
    }
    Ok(((0.5 * (space / m as f64).sqrt()).round() as u64).max(1))
}

/// Marked mass after `gi` rounds: `sin^2((2 gi + 1) asin(sqrt(m / 2^n)))`.
pub fn analytic_success(n: usize, m: u64, gi: u64) -> f64 {
    let theta = (m as f64 / (n as f64).exp2()).sqrt().min(1.0).asin();
    ((2 * gi + 1) as f64 * theta).sin().powi(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QsatConfig {
    /// Number of marked assignments of the oracle network.
    pub cex_count_hint: Option<u64>,
    pub shots: u64,
    pub seed: u64,
    pub exclusions: Vec<CexRecord>,
    /// Exact probabilities instead of sampling; `None` picks exact mode up
    /// to [`EXHAUSTIVE_MAX_QUBITS`].
    pub exhaustive: Option<bool>,
    pub simulator: Simulator,
    /// Write the final statevector here, see [`Statevector::dump`].
    pub dump: Option<PathBuf>,
}

impl Default for QsatConfig {
    fn default() -> Self {
        QsatConfig {
            cex_count_hint: None,
            shots: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
            exclusions: Vec::new(),
            exhaustive: None,
            simulator: Simulator::default(),
            dump: None,
        }
    }
}

impl QsatConfig {
    pub fn with_hint(m: u64) -> Self {
        QsatConfig {
            cex_count_hint: Some(m),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
        })
    }
}

/// One measured outcome with the answer bit set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservedCex {
    /// X then A, declaration order.
    pub bitstring: String,
    pub record: CexRecord,
    /// Exact outcome probability.
    pub probability: f64,
    /// Shots that produced it, in sampling mode.
    pub count: Option<u64>,
    /// Observed frequency: the probability in exact mode, `count / shots` otherwise.
    pub frequency: f64,
    /// False for assignments the oracle network excludes.
    pub confirmed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QsatResult {
    pub verdict: Verdict,
    /// False for an UNSAT verdict drawn from a finite number of shots.
    pub conclusive: bool,
    pub exhaustive: bool,
    pub cexs: Vec<ObservedCex>,
    pub p_sat: f64,
    pub m: u64,
    pub gi: u64,
    pub n: usize,
    pub qubits: usize,
    pub shots: Option<u64>,
    /// Mass on marked assignments after the Grover rounds, before the final check.
    pub marked_mass: f64,
}

impl QsatResult {
    pub fn confirmed(&self) -> impl Iterator<Item = &ObservedCex> {
        self.cexs.iter().filter(|c| c.confirmed)
    }
}

/// Probability mass on the assignments `cn` marks, reading the search
/// register of a miter-layout state.
pub fn marked_mass(sv: &Statevector<f64>, cn: &ClauseNetwork) -> f64 {
    let mask = (1u64 << cn.num_vars()) - 1;
    sv.amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| cn.marked(*i as u64 & mask))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Grover search on `cn` with `cfg.exclusions` folded into the oracle.
/// The hint is the marked count of that augmented oracle; the final
/// answer-bit check always uses `cn` without exclusions.
pub fn solve(cn: &ClauseNetwork, cfg: &QsatConfig) -> Result<QsatResult, GroverError> {
    let m = cfg.cex_count_hint.ok_or(GroverError::MissingHint)?;
    let mut oracle = cn.clone();
    for ex in &cfg.exclusions {
        oracle = oracle.exclude_cex(ex)?;
    }
    search(&oracle, &cn.without_exclusions(), m, cfg)
}

/// Like [`solve`], but the hint counts the counter-examples of `cn` itself.
/// Each exclusion is checked against the classical predicate: a genuine one
/// lowers the count by one, while a consistent non-counter-example raises it.
pub fn solve_excluding(cn: &ClauseNetwork, cfg: &QsatConfig) -> Result<QsatResult, GroverError> {
    let m = cfg.cex_count_hint.ok_or(GroverError::MissingHint)?;
    let base = cn.without_exclusions();
    let mut remaining = m as i64;
    for ex in &cfg.exclusions {
        if check_cex(&base, ex)? {
            remaining -= 1;
        } else {
            log::warn!("excluded assignment {} is not a counter-example", ex.bitstring());
            if base.is_consistent(base.encode(ex)?) {
                remaining += 1;
            }
        }
    }
    let cfg = QsatConfig {
        cex_count_hint: Some(remaining.max(0) as u64),
        ..cfg.clone()
    };
    solve(&base, &cfg)
}

fn search(oracle: &ClauseNetwork, verify: &ClauseNetwork, m: u64, cfg: &QsatConfig) -> Result<QsatResult, GroverError> {
    let n = oracle.num_vars();
    let gi = if m == 0 { 0 } else { grover_iterations(n, m)? };
    let regs = Registers::miter(oracle.num_inputs(), oracle.num_aux());
    let qubits = regs.num_qubits();
    cfg.simulator.check(qubits)?;
    let exhaustive = cfg.exhaustive.unwrap_or(qubits <= EXHAUSTIVE_MAX_QUBITS);
    if !exhaustive && cfg.shots == 0 {
        return Err(GroverError::NoShots);
    }

    let mut sv = cfg.simulator.run::<f64>(&build_grover_prefix(oracle, gi), 0)?;
    let marked = marked_mass(&sv, oracle);

    let y = regs.answer_qubit().expect("miter layout has y");
    let mut check = QCircuit::new(regs);
    check.push_unchecked(QGate::h(y));
    check.push_unchecked(QGate::x(y));
    check.append(&build_vf(verify)).expect("same layout");
    sv.apply_circuit(&check)?;
    if let Some(path) = &cfg.dump {
        let f = File::create(path).map_err(SimError::from)?;
        sv.dump(BufWriter::new(f))?;
    }

    let measured: Vec<usize> = regs.search().chain(std::iter::once(y)).collect();
    let ybit = 1usize << n;
    let excluded = oracle.excluded_assignments();
    let observe = |k: usize, probability: f64, count: Option<u64>, frequency: f64| {
        let v = (k & (ybit - 1)) as u64;
        ObservedCex {
            bitstring: verify.bitstring(v),
            record: verify.record(v),
            probability,
            count,
            frequency,
            confirmed: !excluded.contains(&v),
        }
    };

    let marginal = sv.marginal(&measured)?;
    let mut cexs = Vec::new();
    let p_sat = if exhaustive {
        for (k, &p) in marginal.iter().enumerate() {
            if k & ybit != 0 && p > ZERO_MASS {
                cexs.push(observe(k, p, None, p));
            }
        }
        cexs.iter()
            .filter(|c| c.confirmed)
            .fold(0.0, |acc, c| acc + c.probability)
    } else {
        let mut hits = 0;
        for o in sv.sample(&measured, cfg.shots, cfg.seed)? {
            let k = o
                .bitstring
                .bytes()
                .rev()
                .fold(0usize, |acc, b| acc << 1 | (b == b'1') as usize);
            if k & ybit != 0 {
                let c = observe(k, marginal[k], Some(o.count), o.count as f64 / cfg.shots as f64);
                if c.confirmed {
                    hits += o.count;
                }
                cexs.push(c);
            }
        }
        hits as f64 / cfg.shots as f64
    };
    cexs.sort_by_key(|c| verify.input_index(verify.encode(&c.record).expect("own record")));

    let sat = cexs.iter().any(|c| c.confirmed);
    Ok(QsatResult {
        verdict: if sat { Verdict::Sat } else { Verdict::Unsat },
        conclusive: sat || exhaustive,
        exhaustive,
        cexs,
        p_sat,
        m,
        gi,
        n,
        qubits,
        shots: (!exhaustive).then_some(cfg.shots),
        marked_mass: marked,
    })
}
