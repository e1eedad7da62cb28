//! Dense statevector simulation.
//!
//! Amplitude index bit `q` is the value of qubit `q`. Bitstrings handed out
//! by [`Statevector::probabilities`] and [`Statevector::sample`] list the
//! requested qubits in the order they were requested.

use std::collections::BTreeMap;
use std::io::{self, Write};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{GateOp, Polarity, QCircuit, QGate};
use crate::Scalar;

pub const DEFAULT_QUBIT_CAP: usize = 26;
pub const QUBIT_CAP_ENV: &str = "QSAT_QUBIT_CAP";

/// States at least this wide are updated in parallel.
const PAR_MIN_QUBITS: usize = 14;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0} qubits exceed the simulator cap of {1} (set {QUBIT_CAP_ENV} to raise it)")]
    QubitCap(usize, usize),
    #[error("qubit {0} out of range for a {1}-qubit state")]
    OutOfRange(usize, usize),
    #[error("basis state {0} out of range for {1} qubits")]
    BadBasis(u64, usize),
    #[error("cannot allocate {0} amplitudes")]
    Alloc(usize),
    #[error("no qubits selected")]
    EmptySubset,
    #[error("shot count must be at least 1")]
    NoShots,
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementOutcome<T> {
    pub bitstring: String,
    pub probability: T,
    pub count: u64,
}

/// Runs circuits under a qubit cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Simulator {
    pub qubit_cap: usize,
}

impl Default for Simulator {
    /// Cap from `QSAT_QUBIT_CAP` when set and valid, else 26.
    fn default() -> Self {
        let qubit_cap = std::env::var(QUBIT_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_QUBIT_CAP);
        Simulator { qubit_cap }
    }
}

impl Simulator {
    pub fn with_cap(qubit_cap: usize) -> Self {
        Simulator { qubit_cap }
    }

    pub fn check(&self, n: usize) -> Result<(), SimError> {
        if n > self.qubit_cap || n >= usize::BITS as usize - 1 {
            return Err(SimError::QubitCap(n, self.qubit_cap));
        }
        Ok(())
    }

    /// Applies `qc` to the basis state `initial`.
    pub fn run<T: Scalar>(&self, qc: &QCircuit, initial: u64) -> Result<Statevector<T>, SimError> {
        self.check(qc.num_qubits())?;
        let mut sv = Statevector::basis(qc.num_qubits(), initial)?;
        sv.apply_circuit(qc)?;
        Ok(sv)
    }
}

/// [`Simulator::run`] with the default cap, in double precision.
pub fn run(qc: &QCircuit, initial: u64) -> Result<Statevector<f64>, SimError> {
    Simulator::default().run(qc, initial)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> Statevector<T> {
    pub fn basis(n: usize, index: u64) -> Result<Self, SimError> {
        if n >= usize::BITS as usize - 1 {
            return Err(SimError::Alloc(usize::MAX));
        }
        let len = 1usize << n;
        if index >= len as u64 {
            return Err(SimError::BadBasis(index, n));
        }
        let mut amps = Vec::new();
        amps.try_reserve_exact(len).map_err(|_| SimError::Alloc(len))?;
        amps.resize(len, Complex::new(T::zero(), T::zero()));
        amps[index as usize] = Complex::new(T::one(), T::zero());
        Ok(Statevector { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self, SimError> {
        if !amps.len().is_power_of_two() {
            return Err(SimError::BadLength(amps.len()));
        }
        Ok(Statevector {
            n: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_circuit(&mut self, qc: &QCircuit) -> Result<(), SimError> {
        if qc.num_qubits() != self.n {
            return Err(SimError::OutOfRange(qc.num_qubits().max(1) - 1, self.n));
        }
        for g in qc.gates() {
            self.apply(g)?;
        }
        Ok(())
    }

    pub fn apply(&mut self, g: &QGate) -> Result<(), SimError> {
        if let Some(q) = g.qubits().find(|&q| q >= self.n) {
            return Err(SimError::OutOfRange(q, self.n));
        }
        let (mut mask, mut val) = (0usize, 0usize);
        for c in g.controls() {
            mask |= 1 << c.qubit;
            if c.polarity == Polarity::Positive {
                val |= 1 << c.qubit;
            }
        }
        let t = g.target();
        match g.op() {
            GateOp::X | GateOp::CX | GateOp::MCX => self.pairs(t, mask, val, std::mem::swap),
            GateOp::H => {
                let s = T::FRAC_1_SQRT_2();
                self.pairs(t, mask, val, move |a, b| {
                    let (x, y) = (*a, *b);
                    *a = (x + y).scale(s);
                    *b = (x - y).scale(s);
                })
            }
            GateOp::P(theta) => {
                let ph = Complex::from_polar(T::one(), T::from_f64(theta).expect("finite angle"));
                self.pairs(t, mask, val, move |_, b| *b *= ph)
            }
        }
        Ok(())
    }

    /// Calls `f(a_i, a_j)` for every `i` with bit `t` clear and the controls
    /// matched, where `j = i | 1 << t`.
    fn pairs<F>(&mut self, t: usize, mask: usize, val: usize, f: F)
    where
        F: Fn(&mut Complex<T>, &mut Complex<T>) + Send + Sync,
    {
        let half = 1usize << t;
        let block = half << 1;
        let blocks = self.amps.len() / block;
        let run = |base: usize, lo: &mut [Complex<T>], hi: &mut [Complex<T>]| {
            for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                if (base + k) & mask == val {
                    f(a, b);
                }
            }
        };
        if self.n < PAR_MIN_QUBITS {
            for (bi, chunk) in self.amps.chunks_mut(block).enumerate() {
                let (lo, hi) = chunk.split_at_mut(half);
                run(bi * block, lo, hi);
            }
        } else if blocks >= 64 {
            self.amps.par_chunks_mut(block).enumerate().for_each(|(bi, chunk)| {
                let (lo, hi) = chunk.split_at_mut(half);
                run(bi * block, lo, hi);
            });
        } else {
            const SPAN: usize = 1 << 12;
            for (bi, chunk) in self.amps.chunks_mut(block).enumerate() {
                let (lo, hi) = chunk.split_at_mut(half);
                lo.par_chunks_mut(SPAN)
                    .zip(hi.par_chunks_mut(SPAN))
                    .enumerate()
                    .for_each(|(si, (l, h))| run(bi * block + si * SPAN, l, h));
            }
        }
    }

    /// Marginal distribution as a dense vector: entry `k` has bit `i` equal
    /// to qubit `qubits[i]`.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<T>, SimError> {
        if qubits.is_empty() {
            return Err(SimError::EmptySubset);
        }
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.n) {
            return Err(SimError::OutOfRange(q, self.n));
        }
        let mut out = vec![T::zero(); 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == T::zero() {
                continue;
            }
            let k = qubits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (bit, &q)| acc | ((i >> q) & 1) << bit);
            out[k] += p;
        }
        Ok(out)
    }

    /// Non-zero outcome probabilities keyed by bitstring.
    pub fn probabilities(&self, qubits: &[usize]) -> Result<BTreeMap<String, T>, SimError> {
        let m = self.marginal(qubits)?;
        Ok(m.into_iter()
            .enumerate()
            .filter(|(_, p)| *p > T::zero())
            .map(|(k, p)| (bits(k, qubits.len()), p))
            .collect())
    }

    /// Draws `shots` measurements of `qubits`; identical seeds give identical
    /// outcomes. Outcomes are sorted by bitstring.
    pub fn sample(&self, qubits: &[usize], shots: u64, seed: u64) -> Result<Vec<MeasurementOutcome<T>>, SimError> {
        if shots == 0 {
            return Err(SimError::NoShots);
        }
        let m = self.marginal(qubits)?;
        let mut cumulative = Vec::with_capacity(m.len());
        let mut acc = 0.0f64;
        for p in &m {
            acc += p.to_f64().unwrap_or(0.0);
            cumulative.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for _ in 0..shots {
            let r = rng.gen::<f64>() * acc;
            let k = cumulative.partition_point(|&c| c <= r).min(m.len() - 1);
            *counts.entry(k).or_default() += 1;
        }
        let mut out: Vec<MeasurementOutcome<T>> = counts
            .into_iter()
            .map(|(k, count)| MeasurementOutcome {
                bitstring: bits(k, qubits.len()),
                probability: m[k],
                count,
            })
            .collect();
        out.sort_by(|a, b| a.bitstring.cmp(&b.bitstring));
        Ok(out)
    }

    /// Little-endian `f64` pairs, real then imaginary, in index order.
    pub fn dump<W: Write>(&self, mut w: W) -> Result<(), SimError> {
        for a in &self.amps {
            w.write_all(&a.re.to_f64().unwrap_or(f64::NAN).to_le_bytes())?;
            w.write_all(&a.im.to_f64().unwrap_or(f64::NAN).to_le_bytes())?;
        }
        Ok(w.flush()?)
    }
}

fn bits(k: usize, width: usize) -> String {
    (0..width).map(|i| if (k >> i) & 1 == 1 { '1' } else { '0' }).collect()
}
