use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use msca::exact::{exact_optimum, Estimate};
use msca::instances::{
    allocation_from_json, allocation_to_json, content_hash, gen_ckr_tight_edge, gen_gap_example, instance_from_json,
    instance_hash, instance_to_json, random_graph_mc, random_hypergraph, random_monotone_msca, random_sublabel,
    random_sym_sublabel, Provenance, WeightRange,
};
use msca::lovasz::{objective, FEAS_TOL};
use msca::relax::{build_extension_lp, simplex_solve, solve_lp, solve_subgradient, LinearProgram, SubgradientOptions};
use msca::rounding::{Rng, Rounder};
use msca::verify::{run_suite, Budget};
use msca::{Error, FractionalAllocation, ProblemInstance};

#[derive(Parser)]
#[command(name = "msca", version, about = "Relax and round submodular-cost allocation instances")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance.
    Gen(GenArgs),
    /// Solve the relaxation and write the fractional allocation.
    Solve(SolveArgs),
    /// Round an allocation repeatedly and summarize the costs.
    Round(RoundArgs),
    /// Run a verification suite (lemmas, bounds, gap).
    Verify(VerifyArgs),
    /// Exact integral optimum by enumeration.
    Exact(ExactArgs),
    /// Dump or solve the extension LP in tableau form.
    Lp {
        #[command(subcommand)]
        cmd: LpCmd,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    GraphMc,
    Hmp,
    Hmc,
    Sublabel,
    SymSublabel,
    Monotone,
    Gap,
    TightEdge,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Number of hyperedges.
    #[arg(long, default_value_t = 12)]
    m: usize,
    /// Largest hyperedge size.
    #[arg(long, default_value_t = 3)]
    delta: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 1)]
    wmin: u32,
    #[arg(long, default_value_t = 5)]
    wmax: u32,
    /// Tight-edge gap epsilon.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// For gap and tight-edge: also write the accompanying allocation.
    #[arg(long)]
    alloc_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Lp,
    Subgradient,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Lp)]
    method: Method,
    /// Relative stopping tolerance of the subgradient method.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    /// Known lower bound; switches the subgradient method to Polyak steps.
    #[arg(long)]
    bound: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RoundArgs {
    instance: PathBuf,
    allocation: PathBuf,
    /// greedy, kt, ckr, half, sym-submp, sym-submp-relabel, sym-sublabel
    #[arg(long)]
    algorithm: String,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Feasibility tolerance for the allocation.
    #[arg(long)]
    tol: Option<f64>,
    /// Fractional optimum to compare against when exact search is too large.
    #[arg(long)]
    opt_frac: Option<f64>,
    /// Write every trial's trace as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    suite: String,
    #[arg(long, default_value_t = 20_000)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ExactArgs {
    instance: PathBuf,
    /// Allocation whose objective is checked against the optimum.
    #[arg(long)]
    allocation: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum LpCmd {
    /// Write the extension LP of an instance as a tableau.
    Dump {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve a tableau file with the built-in simplex.
    Solve {
        tableau: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn provenance(seed: u64, hash: &str) -> Provenance {
    Provenance {
        seed: Some(seed),
        instance_hash: Some(hash.to_string()),
        tool_version: msca::VERSION.to_string(),
        ..Provenance::default()
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<(ProblemInstance, String)> {
    let inst = instance_from_json(&read(path)?)?;
    let hash = instance_hash(&inst);
    Ok((inst, hash))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One report record as a JSON object or a CSV header plus row.
fn render(format: Format, fields: &[(&str, serde_json::Value)]) -> String {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> =
                fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            format!("{}\n", serde_json::Value::Object(map))
        }
        Format::Csv => {
            let head: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let row: Vec<String> = fields
                .iter()
                .map(|(_, v)| match v {
                    serde_json::Value::Null => String::new(),
                    serde_json::Value::String(s) => csv_field(s),
                    other => csv_field(&other.to_string()),
                })
                .collect();
            format!("{}\n{}\n", head.join(","), row.join(","))
        }
    }
}

fn provenance_fields(seed: u64, hash: &str) -> [(&'static str, serde_json::Value); 3] {
    [
        ("seed", json!(seed)),
        ("instance_hash", json!(hash)),
        ("tool_version", json!(msca::VERSION)),
    ]
}

/// Report goes to stdout when the main artifact went to a file, else stderr.
fn report(common: &Common, text: &str) {
    if common.out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn cmd_gen(a: &GenArgs) -> anyhow::Result<()> {
    let seed = a.common.seed;
    let w = WeightRange::new(a.wmin, a.wmax)?;
    let (inst, x) = match a.kind {
        Kind::GraphMc => (random_graph_mc(a.n, a.k, a.density, w, seed)?, None),
        Kind::Hmp => (random_hypergraph(a.n, a.k, a.m, a.delta, w, false, seed)?, None),
        Kind::Hmc => (random_hypergraph(a.n, a.k, a.m, a.delta, w, true, seed)?, None),
        Kind::Sublabel => (random_sublabel(a.n, a.k, a.m, a.delta, w, seed)?, None),
        Kind::SymSublabel => (random_sym_sublabel(a.n, a.k, a.density, w, seed)?, None),
        Kind::Monotone => (random_monotone_msca(a.n, a.k, seed)?, None),
        Kind::Gap => {
            let g = gen_gap_example(a.k, a.delta)?;
            (g.instance, Some(g.x))
        }
        Kind::TightEdge => {
            let t = gen_ckr_tight_edge(a.m, a.k, a.eps)?;
            (t.instance, Some(t.x))
        }
    };
    if a.alloc_out.is_some() && x.is_none() {
        return Err(Error::Unsupported("--alloc-out applies to gap and tight-edge only".into()).into());
    }
    let hash = instance_hash(&inst);
    emit(a.common.out.as_deref(), &format!("{}\n", instance_to_json(&inst)?))?;
    if let (Some(p), Some(x)) = (&a.alloc_out, x) {
        let mut prov = provenance(seed, &hash);
        prov.method = Some("construction".into());
        prov.objective = Some(objective(&inst, &x)?);
        fs::write(p, format!("{}\n", allocation_to_json(&x, Some(prov))?))?;
    }
    let mut fields = vec![("type", json!(inst.kind())), ("n", json!(inst.n())), ("k", json!(inst.k()))];
    fields.extend(provenance_fields(seed, &hash));
    report(&a.common, &render(a.common.format, &fields));
    Ok(())
}

fn cmd_solve(a: &SolveArgs) -> anyhow::Result<()> {
    let (inst, hash) = load_instance(&a.instance)?;
    let seed = a.common.seed;
    let start = Instant::now();
    let rep = match a.method {
        Method::Lp => solve_lp(&inst)?,
        Method::Subgradient => {
            let mut opts = SubgradientOptions::new(seed);
            if let Some(b) = a.bound {
                opts = opts.with_bound(b);
            }
            if let Some(t) = a.tol {
                opts.tol_rel = t;
            }
            opts.max_iter = a.max_iter;
            solve_subgradient(&inst, &opts)?
        }
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let method = match a.method {
        Method::Lp => "lp",
        Method::Subgradient => "subgradient",
    };
    let mut prov = provenance(seed, &hash);
    prov.method = Some(method.into());
    prov.objective = Some(rep.objective);
    emit(a.common.out.as_deref(), &format!("{}\n", allocation_to_json(&rep.x, Some(prov))?))?;
    let mut fields = vec![
        ("method", json!(method)),
        ("objective", json!(rep.objective)),
        ("iterations", json!(rep.iterations)),
        ("status", json!(rep.status)),
        ("wall_ms", json!(wall_ms)),
    ];
    fields.extend(provenance_fields(seed, &hash));
    report(&a.common, &render(a.common.format, &fields));
    Ok(())
}

fn parse_rounder(name: &str) -> anyhow::Result<Rounder> {
    Rounder::ALL.into_iter().find(|r| r.name() == name).ok_or_else(|| {
        let names: Vec<&str> = Rounder::ALL.iter().map(|r| r.name()).collect();
        Error::Unsupported(format!("unknown algorithm {name:?}; expected one of {}", names.join(", "))).into()
    })
}

/// Reference value for ratios: exact optimum when enumerable, else the
/// supplied fractional optimum, else the allocation's own objective.
fn reference(inst: &ProblemInstance, x: &FractionalAllocation, opt_frac: Option<f64>) -> anyhow::Result<(&'static str, f64)> {
    match exact_optimum(inst) {
        Ok((_, opt)) => Ok(("exact", opt)),
        Err(Error::TooLarge(_)) => match opt_frac {
            Some(v) => Ok(("opt_frac", v)),
            None => Ok(("allocation", objective(inst, x)?)),
        },
        Err(e) => Err(e.into()),
    }
}

fn cmd_round(a: &RoundArgs) -> anyhow::Result<()> {
    let (inst, hash) = load_instance(&a.instance)?;
    let rounder = parse_rounder(&a.algorithm)?;
    rounder.check_applicable(&inst)?;
    let (x, _) = allocation_from_json(&read(&a.allocation)?)?;
    inst.check_allocation(&x, a.tol.unwrap_or(FEAS_TOL))?;
    if a.trials == 0 {
        return Err(Error::Unsupported("--trials must be positive".into()).into());
    }
    let seed = a.common.seed;
    let outcomes: Vec<_> = (0..a.trials as u64)
        .into_par_iter()
        .map(|t| rounder.round(&inst, &x, &mut Rng::for_trial(seed, t)))
        .collect::<Result<_, _>>()?;
    let costs: Vec<f64> = outcomes.iter().map(|o| o.cost).collect();

    let mut csv = format!("# msca {} seed={seed} instance_hash={hash} algorithm={}\ntrial,cost\n", msca::VERSION, rounder);
    for (t, c) in costs.iter().enumerate() {
        csv.push_str(&format!("{t},{c:?}\n"));
    }
    emit(a.common.out.as_deref(), &csv)?;

    if let Some(p) = &a.trace {
        let mut lines = String::new();
        for (t, o) in outcomes.iter().enumerate() {
            for (s, step) in o.trace.iter().enumerate() {
                lines.push_str(&json!({"trial": t, "step": s, "record": step}).to_string());
                lines.push('\n');
            }
        }
        fs::write(p, lines).with_context(|| format!("writing {}", p.display()))?;
    }

    let est = Estimate::from_samples(costs.iter().copied());
    let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (ref_kind, ref_value) = reference(&inst, &x, a.opt_frac)?;
    let ratio = if ref_value > 0.0 { Some(est.mean / ref_value) } else { None };
    let mut fields = vec![
        ("algorithm", json!(rounder.name())),
        ("trials", json!(a.trials)),
        ("mean", json!(est.mean)),
        ("stderr", json!(est.stderr)),
        ("min", json!(min)),
        ("max", json!(max)),
        ("reference", json!(ref_kind)),
        ("reference_value", json!(ref_value)),
        ("ratio", json!(ratio)),
        ("fallback_elements", json!(outcomes.iter().map(|o| o.fallback).sum::<usize>())),
    ];
    fields.extend(provenance_fields(seed, &hash));
    report(&a.common, &render(a.common.format, &fields));
    Ok(())
}

#[derive(Serialize)]
struct CheckLine<'a> {
    suite: &'a str,
    name: &'a str,
    passed: bool,
    detail: &'a str,
    seed: u64,
    trials: usize,
    tool_version: &'a str,
}

/// Returns whether every check passed.
fn cmd_verify(a: &VerifyArgs) -> anyhow::Result<bool> {
    let budget = Budget {
        trials: a.trials,
        seed: a.common.seed,
    };
    let checks = run_suite(&a.suite, &budget)?;
    let mut text = String::new();
    if a.common.format == Format::Csv {
        text.push_str("suite,name,passed,detail,seed,trials,tool_version\n");
    }
    for c in &checks {
        let line = CheckLine {
            suite: &a.suite,
            name: &c.name,
            passed: c.passed,
            detail: &c.detail,
            seed: budget.seed,
            trials: budget.trials,
            tool_version: msca::VERSION,
        };
        match a.common.format {
            Format::Json => text.push_str(&serde_json::to_string(&line)?),
            Format::Csv => text.push_str(&format!(
                "{},{},{},{},{},{},{}",
                csv_field(line.suite),
                csv_field(line.name),
                line.passed,
                csv_field(line.detail),
                line.seed,
                line.trials,
                line.tool_version
            )),
        }
        text.push('\n');
    }
    emit(a.common.out.as_deref(), &text)?;
    Ok(checks.iter().all(|c| c.passed))
}

fn cmd_exact(a: &ExactArgs) -> anyhow::Result<()> {
    let (inst, hash) = load_instance(&a.instance)?;
    let (p, opt) = exact_optimum(&inst)?;
    let mut fields = vec![("opt", json!(opt)), ("partition", json!(p.labels()))];
    if let Some(path) = &a.allocation {
        let (x, _) = allocation_from_json(&read(path)?)?;
        let tol = a.tol.unwrap_or(FEAS_TOL);
        inst.check_allocation(&x, tol)?;
        let frac = objective(&inst, &x)?;
        fields.push(("opt_frac", json!(frac)));
        fields.push(("sandwich", json!(frac <= opt + tol)));
    }
    fields.extend(provenance_fields(a.common.seed, &hash));
    emit(a.common.out.as_deref(), &render(a.common.format, &fields))
}

fn cmd_lp(cmd: &LpCmd) -> anyhow::Result<()> {
    match cmd {
        LpCmd::Dump { instance, common } => {
            let (inst, hash) = load_instance(instance)?;
            let ext = build_extension_lp(&inst)?;
            let text = format!(
                "# msca {} seed={} instance_hash={hash}\n{}",
                msca::VERSION,
                common.seed,
                ext.lp.to_tableau_string()
            );
            emit(common.out.as_deref(), &text)
        }
        LpCmd::Solve { tableau, common } => {
            let text = read(tableau)?;
            let lp = LinearProgram::parse_tableau(&text)?;
            let sol = simplex_solve(&lp)?;
            let mut fields = vec![
                ("status", json!(sol.status)),
                ("objective", json!(sol.objective)),
                ("iterations", json!(sol.iterations)),
                ("rows", json!(lp.rows.len())),
                ("cols", json!(lp.num_vars())),
            ];
            fields.extend(provenance_fields(common.seed, &content_hash(text.as_bytes())));
            emit(common.out.as_deref(), &render(common.format, &fields))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Unsupported(_)) => 2,
        Some(Error::Infeasible(_) | Error::InfeasibleAllocation(_)) => 3,
        Some(Error::TooLarge(_)) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Round(a) => cmd_round(a),
        Cmd::Verify(a) => match cmd_verify(a) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
        Cmd::Exact(a) => cmd_exact(a),
        Cmd::Lp { cmd } => cmd_lp(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
