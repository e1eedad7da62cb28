//! Quantum SAT equivalence checking.
//!
//! Two gate-level netlists are compiled into an ESOP clause network with one
//! auxiliary variable per gate, assembled into a miter, turned into quantum
//! oracle circuits over the input and auxiliary qubits, and searched with
//! Grover iterations on a dense statevector simulator. A brute-force oracle
//! enumerates the same counter-examples classically so that every quantum
//! result can be cross-checked.
//!
//! The pipeline, front to back:
//!
//! - [`netlist`]: parse and evaluate the text netlist format.
//! - [`esop`], [`clauses`]: per-gate ESOP constraints, miters, exclusions.
//! - [`circuit`], [`transpile`], [`qasm`]: quantum circuit IR, lowering to
//!   `{CX, X, P, H}`, resource accounting and OpenQASM output.
//! - [`sim`]: statevector simulation, generic over the float type.
//! - [`oracle`], [`grover`]: classical ground truth and the Grover driver.
//! - [`bench`], [`corpus`]: the built-in benchmark pairs and table rows.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use thiserror::Error;

pub mod bench;
pub mod circuit;
pub mod clauses;
pub mod corpus;
pub mod esop;
pub mod grover;
pub mod netlist;
pub mod oracle;
pub mod qasm;
pub mod sim;
pub mod transpile;

pub use circuit::{build_diffuser, build_qsat_network, build_uf, build_vf, QCircuit, QGate, Registers};
pub use clauses::{build_clauses, build_miter, CexRecord, ClauseNetwork};
pub use esop::{esop_of_gate, EsopExpr, Literal};
pub use grover::{analytic_success, grover_iterations, solve, solve_excluding, QsatConfig, QsatResult, Verdict};
pub use netlist::{parse_netlist, GateKind, GateTag, Netlist};
pub use oracle::{check_cex, enumerate_cex, OracleReport};
pub use sim::{MeasurementOutcome, Simulator, Statevector};
pub use transpile::{resources, transpile, ResourceReport, TranspileMode};

/// Floating-point type used for statevector amplitudes.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Double-precision statevector; all tolerances in the test suites assume it.
pub type Statevector64 = Statevector<f64>;
/// Single-precision statevector, half the memory.
pub type Statevector32 = Statevector<f32>;
pub type MeasurementOutcome64 = MeasurementOutcome<f64>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Netlist(#[from] netlist::NetlistError),
    #[error(transparent)]
    Clause(#[from] clauses::ClauseError),
    #[error(transparent)]
    Circuit(#[from] circuit::CircuitError),
    #[error(transparent)]
    Transpile(#[from] transpile::TranspileError),
    #[error(transparent)]
    Sim(#[from] sim::SimError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Grover(#[from] grover::GroverError),
    #[error(transparent)]
    Qasm(#[from] qasm::QasmError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
