//! `mbqaoa`: compile, verify, sample and report on measurement-based QAOA.
//!
//! Every subcommand prints a JSON document to stdout (or `--out`) and a
//! short human summary to stderr. Exit codes: 0 pass, 1 verification
//! failure, 2 input error, 3 resource guard.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use mbqaoa::compiler::{compile_qaoa, export_resource_graph, recount, resource_estimate};
use mbqaoa::gatesim::{self, GridSpec, MisInit, QaoaParams, Statevector};
use mbqaoa::mis::{self, feasibility_check_suite, mis_expectation};
use mbqaoa::pattern::{self, check_determinism, explore, MeasurementPattern};
use mbqaoa::problem::{bits_of, bitstring, problem_from_json, Graph, MisInstance, QuboProblem};

#[derive(Parser)]
#[command(
    name = "mbqaoa",
    version,
    about = "QAOA to measurement-based quantum computing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a problem into a measurement pattern.
    Compile(CompileArgs),
    /// Check a compiled pattern against the gate-model simulator.
    Verify(VerifyArgs),
    /// Sample a pattern with a fixed seed.
    Sample(SampleArgs),
    /// Report resource counts without compiling.
    Resources(ResourcesArgs),
    /// Run the independent-set ansatz and its feasibility checks.
    Mis(MisArgs),
    /// Grid search over one (γ, β) pair shared by all layers.
    Sweep(SweepArgs),
    /// Export the graph-state skeleton of a pattern.
    ExportGraph(ExportArgs),
}

#[derive(Args)]
struct Schedule {
    /// Number of layers; inferred from the angle lists when omitted.
    #[arg(long)]
    depth: Option<usize>,
    /// Comma-separated γ values, one per layer.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    gammas: Vec<f64>,
    /// Comma-separated β values, one per layer.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    betas: Vec<f64>,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    schedule: Schedule,
    /// Where to write the pattern (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the resource report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Problem file.
    #[arg(long)]
    input: PathBuf,
    /// Pattern to check; compiled from the problem when omitted.
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[command(flatten)]
    schedule: Schedule,
    /// TVD tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Per-branch state deviation tolerance.
    #[arg(long, default_value_t = 1e-9)]
    state_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Pattern file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    shots: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResourcesArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MisArgs {
    /// Graph file.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    schedule: Schedule,
    /// Mixer order as a comma-separated vertex permutation.
    #[arg(long, value_delimiter = ',')]
    order: Vec<usize>,
    /// `zeros` or a bitstring with vertex 0 first, e.g. `0101`.
    #[arg(long, default_value = "zeros")]
    init: String,
    /// Mixer angle applied after a classical initial set.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    init_beta: f64,
    /// Random feasible states per feasibility check.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Infeasible-mass tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Partial-mixer leakage tolerance.
    #[arg(long, default_value_t = 1e-12)]
    leak_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// Points per axis.
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// `lo:hi`, upper end exclusive.
    #[arg(long, default_value = "0:3.141592653589793", allow_hyphen_values = true)]
    gamma_range: String,
    #[arg(long, default_value = "0:1.5707963267948966", allow_hyphen_values = true)]
    beta_range: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Args)]
struct ExportArgs {
    /// Pattern file, or a problem file together with `--depth`.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    schedule: Schedule,
    #[arg(long, value_enum, default_value = "json")]
    format: GraphFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<mbqaoa::Error> for Failure {
    fn from(e: mbqaoa::Error) -> Self {
        let code = if matches!(e, mbqaoa::Error::ResourceLimit { .. }) {
            3
        } else {
            2
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<u8, Failure>;

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => {
            fs::write(p, format!("{text}\n")).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
        }
        None => {
            // a closed pipe downstream is not an error for us
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serialization cannot fail")
}

fn load_problem(path: &PathBuf) -> Result<QuboProblem, Failure> {
    let text = read(path)?;
    problem_from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_pattern(path: &PathBuf) -> Result<MeasurementPattern, Failure> {
    let text = read(path)?;
    MeasurementPattern::from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

impl Schedule {
    fn params(&self) -> Result<QaoaParams, Failure> {
        if self.gammas.is_empty() || self.betas.is_empty() {
            return Err(Failure::input("both --gammas and --betas are required"));
        }
        if let Some(p) = self.depth {
            if p != self.gammas.len() || p != self.betas.len() {
                return Err(Failure::input(format!(
                    "--depth {p} does not match {} gammas and {} betas",
                    self.gammas.len(),
                    self.betas.len()
                )));
            }
        }
        Ok(QaoaParams::new(self.gammas.clone(), self.betas.clone())?)
    }
}

fn distribution_map(probs: &[f64], n: usize) -> BTreeMap<String, f64> {
    probs
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 1e-12)
        .map(|(k, p)| (bitstring(&bits_of(k, n)), *p))
        .collect()
}

fn cmd_compile(a: CompileArgs) -> CliResult {
    let q = load_problem(&a.input)?;
    let params = a.schedule.params()?;
    let p = compile_qaoa(&q, &params)?;
    let r = resource_estimate(&q, params.p());
    let c = recount(&p);
    if c.ancillas != r.ancillas_total || c.entangling_edges != r.entangling_edges_total {
        return Err(Failure {
            code: 1,
            message: "emitted pattern disagrees with the resource estimate".into(),
        });
    }
    emit(&a.out, &p.to_json())?;
    if let Some(path) = &a.report {
        emit(&Some(path.clone()), &r.to_json())?;
    }
    eprintln!(
        "compiled p={} on {} vertices: ancillas {} (bound p(|E|+2|V|) = {}), cz {} (bound p(2|E|+2|V|) = {}), linear extra {}",
        r.depth,
        r.logical_qubits,
        r.ancillas_total,
        r.bound_qubits,
        r.entangling_edges_total,
        r.bound_edges,
        r.depth * r.linear_terms
    );
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let q = load_problem(&a.input)?;
    let params = a.schedule.params()?;
    let p = match &a.pattern {
        Some(path) => load_pattern(path)?,
        None => compile_qaoa(&q, &params)?,
    };
    if p.outputs.len() != q.n() {
        return Err(Failure::input(format!(
            "pattern has {} outputs but the problem has {} vertices",
            p.outputs.len(),
            q.n()
        )));
    }
    let guarded = |e: mbqaoa::Error| {
        let mut f = Failure::from(e);
        if f.code == 3 {
            f.message.push_str("; try `mbqaoa sample` instead");
        }
        f
    };
    let input = Statevector::zero(p.inputs.len());
    let e = explore(&p, &input).map_err(guarded)?;
    let deterministic = check_determinism(&p).map_err(guarded)?;
    let got = e.output_distribution();
    let want = gatesim::qaoa_distribution(&q, &params)?;
    let tvd = gatesim::tvd(&got, &want);
    let deviation = e.max_branch_deviation();
    let pass = tvd < a.tol && deterministic && deviation <= a.state_tol;
    let report = json!({
        "format": 1,
        "verdict": if pass { "PASS" } else { "FAIL" },
        "tvd": tvd,
        "tolerance": a.tol,
        "deterministic": deterministic,
        "max_state_deviation": deviation,
        "dropped_mass": e.dropped_mass,
        "merged_branches": e.branches.len(),
        "peak_window": e.peak_window,
        "distribution": distribution_map(&got, q.n()),
        "reference": distribution_map(&want, q.n()),
    });
    emit(&a.out, &to_json(&report))?;
    eprintln!(
        "{}: tvd {tvd:.3e}, deterministic {deterministic}, max state deviation {deviation:.3e}",
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { 0 } else { 1 })
}

fn cmd_sample(a: SampleArgs) -> CliResult {
    let p = load_pattern(&a.input)?;
    let input = Statevector::zero(p.inputs.len());
    let counts = pattern::sample(&p, &input, a.shots, a.seed)?;
    let keyed: BTreeMap<String, usize> = counts
        .iter()
        .map(|(k, c)| (bitstring(&bits_of(*k, p.outputs.len())), *c))
        .collect();
    let report = json!({
        "format": 1,
        "seed": a.seed,
        "shots": a.shots,
        "counts": keyed,
    });
    emit(&a.out, &to_json(&report))?;
    eprintln!("sampled {} shots with seed {}", a.shots, a.seed);
    Ok(0)
}

fn cmd_resources(a: ResourcesArgs) -> CliResult {
    let q = load_problem(&a.input)?;
    let r = resource_estimate(&q, a.depth);
    emit(&a.out, &r.to_json())?;
    eprintln!(
        "ancillas {} (bound {}), cz {} (bound {}); gate model: {} qubits, {} entangling gates",
        r.ancillas_total,
        r.bound_qubits,
        r.entangling_edges_total,
        r.bound_edges,
        r.gate_model_qubits,
        r.gate_model_entangling
    );
    Ok(0)
}

fn parse_init(s: &str, n: usize, beta: f64) -> Result<MisInit, Failure> {
    if s == "zeros" {
        return Ok(MisInit::AllZeros);
    }
    if s.len() != n || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(Failure::input(format!(
            "--init must be `zeros` or a {n}-character bitstring"
        )));
    }
    Ok(MisInit::ClassicalSet {
        set: s.bytes().map(|b| b - b'0').collect(),
        beta,
    })
}

fn cmd_mis(a: MisArgs) -> CliResult {
    let text = read(&a.input)?;
    let g = Graph::from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", a.input.display())))?;
    let m = MisInstance::new(g);
    let params = a.schedule.params()?;
    let order = if a.order.is_empty() {
        mis::default_order(&m)
    } else {
        a.order.clone()
    };
    let init = parse_init(&a.init, m.n(), a.init_beta)?;
    let report = mis_expectation(&m, &params, &order, &init)?;
    let feas = feasibility_check_suite(&m, a.trials, a.seed)?;
    let best = m.brute_force()?;
    let pass = report.infeasible_mass <= a.tol && feas.passed(a.leak_tol);
    let doc = json!({
        "format": 1,
        "verdict": if pass { "PASS" } else { "FAIL" },
        "expectation": report.expectation,
        "feasible_expectation": report.feasible_expectation,
        "infeasible_mass": report.infeasible_mass,
        "mis_size": best.value,
        "max_leakage": feas.max_leakage,
        "partial_mixers_checked": feas.partial_mixers_checked,
        "order": order,
        "init": init,
    });
    emit(&a.out, &to_json(&doc))?;
    eprintln!(
        "{}: expected set size {:.6} (maximum {}), infeasible mass {:.3e}, leakage {:.3e}",
        if pass { "PASS" } else { "FAIL" },
        report.expectation,
        best.value,
        report.infeasible_mass,
        feas.max_leakage
    );
    Ok(if pass { 0 } else { 1 })
}

fn parse_range(s: &str, flag: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::input(format!("{flag} must look like `lo:hi`, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn cmd_sweep(a: SweepArgs) -> CliResult {
    let q = load_problem(&a.input)?;
    let (g0, g1) = parse_range(&a.gamma_range, "--gamma-range")?;
    let (b0, b1) = parse_range(&a.beta_range, "--beta-range")?;
    let grid = GridSpec {
        points: a.grid,
        gamma_range: (g0, g1),
        beta_range: (b0, b1),
    };
    let best = gatesim::grid_sweep(&q, a.depth, &grid)?;
    let doc = json!({
        "format": 1,
        "depth": a.depth,
        "grid": { "points": a.grid, "gamma_range": [g0, g1], "beta_range": [b0, b1] },
        "best": best,
        "optimum": q.brute_force_optimum().ok().map(|c| c.value),
    });
    emit(&a.out, &to_json(&doc))?;
    eprintln!(
        "best expectation {:.9} at gamma {:.6}, beta {:.6}",
        best.expectation, best.gamma, best.beta
    );
    Ok(0)
}

fn cmd_export(a: ExportArgs) -> CliResult {
    let text = read(&a.input)?;
    let p = match MeasurementPattern::from_json(&text) {
        Ok(p) => {
            p.ensure_valid()?;
            p
        }
        Err(_) => {
            let q = problem_from_json(&text).map_err(|e| {
                Failure::input(format!(
                    "{}: neither a pattern nor a problem: {e}",
                    a.input.display()
                ))
            })?;
            let params = match a.schedule.depth {
                Some(d) if a.schedule.gammas.is_empty() && a.schedule.betas.is_empty() => {
                    QaoaParams::new(vec![0.0; d], vec![0.0; d])?
                }
                _ => a.schedule.params()?,
            };
            compile_qaoa(&q, &params)?
        }
    };
    let g = export_resource_graph(&p);
    let (text, kind) = match a.format {
        GraphFormat::Json => (g.to_json(), "json"),
        GraphFormat::Dot => (g.to_dot(), "dot"),
    };
    emit(&a.out, text.trim_end())?;
    eprintln!(
        "exported {} nodes and {} edges as {kind}; planar: {}",
        g.nodes.len(),
        g.edges.len(),
        g.planar
    );
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Compile(a) => cmd_compile(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Resources(a) => cmd_resources(a),
        Command::Mis(a) => cmd_mis(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::ExportGraph(a) => cmd_export(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
