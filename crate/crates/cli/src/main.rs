//! `qsat`: quantum-SAT equivalence checking from the command line.
//!
//! Exit codes: `solve` returns 0 for UNSAT and 1 for SAT; every command
//! returns 2 on error and 0 otherwise.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qsat::bench::{run_bench, write_csv, BenchOptions, BenchRow};
use qsat::circuit::{build_qsat_network, build_uf, build_vf, QCircuit};
use qsat::clauses::{build_clauses, ClauseNetwork};
use qsat::corpus::{self, RefStyle};
use qsat::grover::{grover_iterations, solve_excluding, QsatConfig, QsatResult, Verdict, DEFAULT_SEED, DEFAULT_SHOTS};
use qsat::oracle::enumerate_cex;
use qsat::qasm::to_qasm;
use qsat::sim::{Simulator, DEFAULT_QUBIT_CAP, QUBIT_CAP_ENV};
use qsat::transpile::{transpile, ResourceReport, TranspileMode};
use qsat::{build_miter, parse_netlist, Netlist};

const SCHEMA: &str = "qsat/1";

#[derive(Parser)]
#[command(
    name = "qsat",
    version,
    about = "Equivalence checking with Grover search over ESOP miters"
)]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Largest circuit the simulator will allocate.
    #[arg(long, global = true, env = QUBIT_CAP_ENV, default_value_t = DEFAULT_QUBIT_CAP)]
    qubit_cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a netlist and print it in canonical form.
    Parse { file: PathBuf },
    /// Print the clause network of a netlist, or of the miter of a pair.
    Clauses {
        #[command(flatten)]
        pair: PairArgs,
        /// Exclude an assignment (X then A bits).
        #[arg(long = "exclude", value_name = "BITS")]
        exclude: Vec<String>,
    },
    /// Qubit, gate and depth counts of the full search network.
    Resources {
        #[command(flatten)]
        pair: PairArgs,
        /// Counter-example count; computed by the oracle when omitted.
        #[arg(long)]
        m: Option<u64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
    },
    /// Write a transpiled circuit as OpenQASM 2.0.
    EmitQasm {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = CircuitArg::Qsat)]
        circuit: CircuitArg,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the Grover search and report counter-examples.
    Solve {
        #[command(flatten)]
        pair: PairArgs,
        /// Sample this many shots instead of reading exact probabilities.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Exclude a known counter-example (X then A bits).
        #[arg(long = "exclude", value_name = "BITS")]
        exclude: Vec<String>,
        /// Exact probabilities regardless of circuit size.
        #[arg(long, conflicts_with = "shots")]
        exhaustive: bool,
        /// Counter-example count of the miter; computed by the oracle when omitted.
        #[arg(long)]
        m: Option<u64>,
        /// Write the final statevector as little-endian f64 (re, im) pairs.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
    },
    /// Enumerate counter-examples classically.
    Oracle {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Resource and SAT-probability rows for the benchmark corpus.
    Bench {
        /// Directory of `<name>_{faulty,ref,struct}.net` files; built-in corpus when omitted.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also simulate the full adder (24 and 30 qubits).
        #[arg(long, conflicts_with = "no_sim")]
        include_fa: bool,
        /// Resources only; leave the p_sat column empty.
        #[arg(long)]
        no_sim: bool,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, conflicts_with = "shots")]
        exhaustive: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
    },
}

#[derive(Args)]
struct PairArgs {
    /// Implementation netlist.
    #[arg(value_name = "IMPL", required_unless_present = "bench")]
    impl_path: Option<PathBuf>,
    /// Reference netlist.
    #[arg(value_name = "REF")]
    ref_path: Option<PathBuf>,
    /// Use a built-in benchmark pair instead of files.
    #[arg(long, conflicts_with_all = ["impl_path", "ref_path"])]
    bench: Option<String>,
    #[arg(long, value_enum, default_value_t = StyleArg::Flat)]
    ref_style: StyleArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    Flat,
    Structured,
}

impl From<StyleArg> for RefStyle {
    fn from(s: StyleArg) -> Self {
        match s {
            StyleArg::Flat => RefStyle::Flat,
            StyleArg::Structured => RefStyle::Structured,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "v-chain")]
    VChain,
    #[value(name = "v-chain-dirty")]
    VChainDirty,
    Auto,
}

impl From<ModeArg> for TranspileMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::VChain => TranspileMode::VChain,
            ModeArg::VChainDirty => TranspileMode::VChainDirty,
            ModeArg::Auto => TranspileMode::Auto,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CircuitArg {
    Vf,
    Uf,
    Qsat,
}

fn read_netlist(path: &Path) -> Result<Netlist> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_netlist(&text).with_context(|| format!("parsing {}", path.display()))
}

enum Loaded {
    Single(Netlist),
    Pair(Netlist, Netlist),
}

impl PairArgs {
    fn load(&self) -> Result<Loaded> {
        if let Some(name) = &self.bench {
            let b = corpus::find(name).with_context(|| format!("no built-in benchmark `{name}`"))?;
            let (i, r) = b.pair(self.ref_style.into())?;
            return Ok(Loaded::Pair(i, r));
        }
        let imp = read_netlist(self.impl_path.as_deref().expect("required by clap"))?;
        match &self.ref_path {
            Some(p) => Ok(Loaded::Pair(imp, read_netlist(p)?)),
            None => Ok(Loaded::Single(imp)),
        }
    }

    fn load_pair(&self) -> Result<(Netlist, Netlist)> {
        match self.load()? {
            Loaded::Pair(i, r) => Ok((i, r)),
            Loaded::Single(_) => bail!("this command needs an implementation and a reference netlist"),
        }
    }

    fn miter(&self) -> Result<ClauseNetwork> {
        let (i, r) = self.load_pair()?;
        Ok(build_miter(&i, &r)?)
    }
}

fn cex_count(cn: &ClauseNetwork, hint: Option<u64>) -> Result<u64> {
    match hint {
        Some(m) => Ok(m),
        None => Ok(enumerate_cex(cn)?.cex_count),
    }
}

fn print_json(v: &Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn resources_json(r: &ResourceReport) -> Value {
    json!({ "q": r.q, "cx": r.cx, "u": r.u, "depth": r.depth, "gi": r.gi })
}

fn full_resources(cn: &ClauseNetwork, m: u64, mode: TranspileMode) -> Result<ResourceReport> {
    if m == 0 {
        bail!("the miter has no counter-examples, so there is no iteration count");
    }
    let gi = grover_iterations(cn.num_vars(), m)?;
    let (_, mut r) = transpile(&build_qsat_network(cn, cn, gi), mode)?;
    r.gi = Some(gi);
    Ok(r)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let simulator = Simulator::with_cap(cli.qubit_cap);
    match cli.command {
        Command::Parse { file } => {
            let net = read_netlist(&file)?;
            if cli.json {
                let nodes: Vec<Value> = net
                    .nodes()
                    .iter()
                    .map(|n| json!({ "name": n.name(), "kind": n.kind().tag(), "fanins": n.fanins() }))
                    .collect();
                print_json(&json!({
                    "schema": SCHEMA,
                    "inputs": net.inputs(),
                    "nodes": nodes,
                    "outputs": net.outputs(),
                }))?;
            } else {
                print!("{net}");
            }
        }
        Command::Clauses { pair, exclude } => {
            let mut cn = match pair.load()? {
                Loaded::Single(net) => {
                    let frag = build_clauses(&net);
                    ClauseNetwork::new(net.inputs().to_vec(), frag.aux_defs, None, Vec::new())?
                }
                Loaded::Pair(i, r) => build_miter(&i, &r)?,
            };
            for bits in &exclude {
                cn = cn.exclude_cex(&cn.parse_bitstring(bits)?)?;
            }
            if cli.json {
                let defs: Vec<Value> = cn
                    .aux_defs()
                    .iter()
                    .map(|d| json!({ "name": d.name, "esop": d.definition().to_string() }))
                    .collect();
                let excl: Vec<String> = cn.excluded_assignments().iter().map(|&v| cn.bitstring(v)).collect();
                print_json(&json!({
                    "schema": SCHEMA,
                    "inputs": cn.inputs(),
                    "aux_defs": defs,
                    "top": cn.top(),
                    "exclude": excl,
                }))?;
            } else {
                print!("{cn}");
            }
        }
        Command::Resources { pair, m, mode } => {
            let cn = pair.miter()?;
            let m = cex_count(&cn, m)?;
            let r = full_resources(&cn, m, mode.into())?;
            if cli.json {
                let mut v = resources_json(&r);
                v["schema"] = json!(SCHEMA);
                v["a"] = json!(cn.num_aux());
                v["m"] = json!(m);
                print_json(&v)?;
            } else {
                println!("q {}\nA {}\nm {}\nGI {}", r.q, cn.num_aux(), m, r.gi.unwrap_or(0));
                println!("CX {}\nU {}\nD {}", r.cx, r.u, r.depth);
            }
        }
        Command::EmitQasm {
            pair,
            circuit,
            m,
            mode,
            output,
        } => {
            let cn = pair.miter()?;
            let qc: QCircuit = match circuit {
                CircuitArg::Vf => build_vf(&cn),
                CircuitArg::Uf => build_uf(&cn),
                CircuitArg::Qsat => {
                    let m = cex_count(&cn, m)?;
                    let gi = if m == 0 {
                        0
                    } else {
                        grover_iterations(cn.num_vars(), m)?
                    };
                    build_qsat_network(&cn, &cn, gi)
                }
            };
            let (lowered, _) = transpile(&qc, mode.into())?;
            let text = to_qasm(&lowered)?;
            match output {
                Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => io::stdout().lock().write_all(text.as_bytes())?,
            }
        }
        Command::Solve {
            pair,
            shots,
            seed,
            exclude,
            exhaustive,
            m,
            dump,
        } => {
            let cn = pair.miter()?;
            let m = cex_count(&cn, m)?;
            let exclusions = exclude
                .iter()
                .map(|b| cn.parse_bitstring(b))
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = QsatConfig {
                cex_count_hint: Some(m),
                shots: shots.unwrap_or(DEFAULT_SHOTS),
                seed,
                exclusions,
                exhaustive: if exhaustive {
                    Some(true)
                } else if shots.is_some() {
                    Some(false)
                } else {
                    None
                },
                simulator,
                dump,
            };
            let res = solve_excluding(&cn, &cfg)?;
            let resources = if res.m > 0 {
                Some(full_resources(&cn, res.m, TranspileMode::Auto)?)
            } else {
                None
            };
            report_solve(&cn, &res, resources.as_ref(), cli.json)?;
            return Ok(ExitCode::from(match res.verdict {
                Verdict::Sat => 1,
                Verdict::Unsat => 0,
            }));
        }
        Command::Oracle { pair } => {
            let cn = pair.miter()?;
            let rep = enumerate_cex(&cn)?;
            let bits: Vec<String> = rep.cex_list.iter().map(|c| c.bitstring()).collect();
            if cli.json {
                let list: Vec<Value> = rep
                    .cex_list
                    .iter()
                    .zip(&bits)
                    .map(|(c, b)| json!({ "bitstring": b, "assignment": c.assignment }))
                    .collect();
                print_json(&json!({
                    "schema": SCHEMA,
                    "cex_count": rep.cex_count,
                    "equivalent": rep.equivalent,
                    "cex_list": list,
                }))?;
            } else {
                let names: Vec<&str> = cn.var_names().collect();
                println!("{}", names.join(" "));
                for b in &bits {
                    println!("{}", b.chars().map(String::from).collect::<Vec<_>>().join(" "));
                }
                println!("cex {}  equivalent {}", rep.cex_count, rep.equivalent);
            }
        }
        Command::Bench {
            corpus: dir,
            csv,
            include_fa,
            no_sim,
            shots,
            seed,
            exhaustive,
            mode,
        } => {
            let benchmarks = match &dir {
                Some(d) => corpus::load_dir(d).with_context(|| format!("reading corpus {}", d.display()))?,
                None => corpus::builtin(),
            };
            let opts = BenchOptions {
                simulate: !no_sim,
                include_fa,
                shots: shots.unwrap_or(DEFAULT_SHOTS),
                seed,
                exhaustive: if exhaustive {
                    Some(true)
                } else if shots.is_some() {
                    Some(false)
                } else {
                    None
                },
                mode: mode.into(),
                simulator,
            };
            let rows = run_bench(&benchmarks, &opts)?;
            if let Some(p) = &csv {
                let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
                write_csv(&rows, f)?;
            }
            if cli.json {
                print_json(&json!({ "schema": SCHEMA, "rows": rows }))?;
            } else {
                print_rows(&rows);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn report_solve(cn: &ClauseNetwork, res: &QsatResult, resources: Option<&ResourceReport>, as_json: bool) -> Result<()> {
    if as_json {
        let cexs: Vec<Value> = res
            .cexs
            .iter()
            .map(|c| {
                json!({
                    "bitstring": c.bitstring,
                    "inputs": &c.bitstring[..cn.num_inputs()],
                    "probability": c.probability,
                    "frequency": c.frequency,
                    "count": c.count,
                    "confirmed": c.confirmed,
                })
            })
            .collect();
        return print_json(&json!({
            "schema": SCHEMA,
            "verdict": res.verdict,
            "conclusive": res.conclusive,
            "exhaustive": res.exhaustive,
            "m": res.m,
            "gi": res.gi,
            "n": res.n,
            "qubits": res.qubits,
            "shots": res.shots,
            "p_sat": res.p_sat,
            "marked_mass": res.marked_mass,
            "cexs": cexs,
            "resources": resources.map(resources_json),
        }));
    }
    let tag = if res.conclusive { "" } else { " (inconclusive)" };
    println!("{}{tag}", res.verdict);
    println!(
        "m {}  GI {}  qubits {}  p_sat {:.4}",
        res.m, res.gi, res.qubits, res.p_sat
    );
    for c in &res.cexs {
        let mark = if c.confirmed { "" } else { "  excluded" };
        println!("  {}  {:.4}{mark}", c.bitstring, c.frequency);
    }
    Ok(())
}

fn print_rows(rows: &[BenchRow]) {
    let opt = |v: Option<f64>, d: usize| v.map_or("-".to_string(), |x| format!("{x:.d$}"));
    println!(
        "{:<6} {:<10} {:>3} {:>3} {:>3} {:>6} {:>6} {:>6} {:>4} {:>6} {:>7} {:>7} {:>7} {:>7}",
        "name", "style", "q", "A", "GI", "CX", "U", "D", "cex", "p_sat", "%q", "%CX", "%U", "%D"
    );
    for r in rows {
        println!(
            "{:<6} {:<10} {:>3} {:>3} {:>3} {:>6} {:>6} {:>6} {:>4} {:>6} {:>7} {:>7} {:>7} {:>7}",
            r.name,
            r.ref_style.name(),
            r.q,
            r.a,
            r.gi,
            r.cx,
            r.u,
            r.depth,
            r.cex,
            opt(r.p_sat, 4),
            opt(r.improv_q, 2),
            opt(r.improv_cx, 2),
            opt(r.improv_u, 2),
            opt(r.improv_d, 2),
        );
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
