//! Benchmark rows: resources, iteration counts and SAT probabilities for
//! every (benchmark, reference style) pair.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::clauses::build_miter;
use crate::corpus::{Benchmark, RefStyle};
use crate::grover::{solve, QsatConfig, DEFAULT_SEED, DEFAULT_SHOTS};
use crate::oracle::enumerate_cex;
use crate::sim::Simulator;
use crate::transpile::{resources_with, TranspileMode};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    /// Compute `p_sat` by simulation; resources are reported either way.
    pub simulate: bool,
    /// Simulate FA as well.
    pub include_fa: bool,
    pub shots: u64,
    pub seed: u64,
    pub exhaustive: Option<bool>,
    pub mode: TranspileMode,
    pub simulator: Simulator,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            simulate: true,
            include_fa: false,
            shots: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
            exhaustive: None,
            mode: TranspileMode::Auto,
            simulator: Simulator::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub ref_style: RefStyle,
    pub q: usize,
    pub a: usize,
    pub gi: u64,
    pub cx: usize,
    pub u: usize,
    pub depth: usize,
    pub cex: u64,
    /// `None` when the row was not simulated.
    pub p_sat: Option<f64>,
    pub improv_q: Option<f64>,
    pub improv_cx: Option<f64>,
    pub improv_u: Option<f64>,
    pub improv_d: Option<f64>,
}

/// `100 (base - new) / base`.
pub fn improvement(base: usize, new: usize) -> f64 {
    100.0 * (base as f64 - new as f64) / base as f64
}

fn row(b: &Benchmark, style: RefStyle, opts: &BenchOptions) -> Result<BenchRow> {
    let (imp, reference) = b.pair(style)?;
    let cn = build_miter(&imp, &reference)?;
    let cex = enumerate_cex(&cn)?.cex_count;
    let res = resources_with(&imp, &reference, cex, opts.mode)?;
    let simulate = opts.simulate && (opts.include_fa || b.name != "FA");
    let p_sat = if simulate {
        let cfg = QsatConfig {
            cex_count_hint: Some(cex),
            shots: opts.shots,
            seed: opts.seed,
            exclusions: Vec::new(),
            exhaustive: opts.exhaustive,
            simulator: opts.simulator,
            dump: None,
        };
        Some(solve(&cn, &cfg)?.p_sat)
    } else {
        None
    };
    Ok(BenchRow {
        name: b.name.clone(),
        ref_style: style,
        q: res.q,
        a: cn.num_aux(),
        gi: res.gi.unwrap_or(0),
        cx: res.cx,
        u: res.u,
        depth: res.depth,
        cex,
        p_sat,
        improv_q: None,
        improv_cx: None,
        improv_u: None,
        improv_d: None,
    })
}

/// One row per benchmark and style, flat first, in benchmark order.
/// Structured rows carry the improvement over their flat counterpart.
pub fn run_bench(benchmarks: &[Benchmark], opts: &BenchOptions) -> Result<Vec<BenchRow>> {
    let jobs: Vec<(&Benchmark, RefStyle)> = benchmarks
        .iter()
        .flat_map(|b| RefStyle::ALL.into_iter().map(move |s| (b, s)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(b, s)| row(b, s, opts))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..rows.len() {
        if rows[i].ref_style != RefStyle::Structured {
            continue;
        }
        if let Some(base) = rows
            .iter()
            .find(|r| r.name == rows[i].name && r.ref_style == RefStyle::Flat)
            .cloned()
        {
            let r = &mut rows[i];
            r.improv_q = Some(improvement(base.q, r.q));
            r.improv_cx = Some(improvement(base.cx, r.cx));
            r.improv_u = Some(improvement(base.u, r.u));
            r.improv_d = Some(improvement(base.depth, r.depth));
        }
    }
    Ok(rows)
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(String::new, |x| format!("{x:.digits$}"))
}

/// CSV with the header
/// `name,ref_style,q,A,GI,CX,U,D,cex,p_sat,improv_q,improv_cx,improv_u,improv_d`.
pub fn write_csv<W: Write>(rows: &[BenchRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "name",
        "ref_style",
        "q",
        "A",
        "GI",
        "CX",
        "U",
        "D",
        "cex",
        "p_sat",
        "improv_q",
        "improv_cx",
        "improv_u",
        "improv_d",
    ])?;
    for r in rows {
        out.write_record([
            r.name.clone(),
            r.ref_style.to_string(),
            r.q.to_string(),
            r.a.to_string(),
            r.gi.to_string(),
            r.cx.to_string(),
            r.u.to_string(),
            r.depth.to_string(),
            r.cex.to_string(),
            opt(r.p_sat, 4),
            opt(r.improv_q, 2),
            opt(r.improv_cx, 2),
            opt(r.improv_u, 2),
            opt(r.improv_d, 2),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// The `name,style,q,a,gi` columns alone, the part fixed by the miter
/// construction and the iteration formula.
pub fn write_q_gi_csv<W: Write>(rows: &[BenchRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["name", "style", "q", "a", "gi"])?;
    for r in rows {
        out.write_record([
            r.name.clone(),
            r.ref_style.to_string(),
            r.q.to_string(),
            r.a.to_string(),
            r.gi.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
