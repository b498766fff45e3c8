use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use mwdp_core::bench::{bench_sweep, BenchGrid, GridAxes, SweepOptions};
use mwdp_core::encoders::{
    brute_force_msc, brute_force_tsp, decode_msc, decode_tsp, encode_msc, encode_tsp,
    gen_msc_instance, gen_tsp_graph, MscInstance, MscSolution, TspGraph,
};
use mwdp_core::model::{
    bellman_solve, gen_random_instance, rollout, DpInstance, PolicyTrace, RandomParams,
};
use mwdp_core::solver::{solve_dp, solve_policy, SolveConfig, StrategyKind};
use mwdp_core::verify::run_verify_suite;
use mwdp_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "mwdp",
    version,
    about = "Dual-LP multiplicative-weights DP solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random instance file.
    Gen(GenArgs),
    /// Solve exactly by backward induction.
    Bellman(InstanceArgs),
    /// Find σ̄ and an optimal first action.
    Solve(SolveArgs),
    /// Build a full policy by repeated solves.
    Policy(SolveArgs),
    /// Solve a TSP file through its DP encoding.
    Tsp(ReductionArgs),
    /// Solve a set cover file through its DP encoding.
    Msc(ReductionArgs),
    /// Run the self-check suite and print a pass/fail matrix.
    Verify(VerifyArgs),
    /// Sweep a grid of random instances and emit CSV.
    Bench(BenchArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Exact,
    Qmf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Dp,
    Tsp,
    Msc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Bellman,
    Mwum,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "dp")]
    kind: GenKind,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    #[arg(long, default_value_t = 3)]
    horizon: usize,
    #[arg(long, default_value_t = 2)]
    reward_max: i64,
    #[arg(long)]
    time_dependent: bool,
    /// Vertex count (tsp) or universe size (msc).
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    cost_bound: i64,
    #[arg(long)]
    asymmetric: bool,
    /// Number of sets (msc).
    #[arg(long, default_value_t = 4)]
    sets: usize,
    #[arg(long, default_value_t = 0.4)]
    density: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InstanceArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolverFlags {
    #[arg(long, value_enum, default_value = "exact")]
    strategy: Strategy,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    rho: Option<i64>,
    /// Required with `--strategy qmf`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rounds_override: Option<usize>,
    /// Per-run QMF failure probability (default: budgeted from the plan).
    #[arg(long)]
    fail_prob: Option<f64>,
    /// Report zero wall-clock time, for byte-stable output.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReductionArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "bellman")]
    method: Method,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Grid axes as JSON; defaults to a small built-in grid.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timing: bool,
}

/// Failure categories, mapped to exit codes 1 and 2.
enum Failure {
    Negative(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::AllInfeasible { .. }
            | Error::ExtractionBelowThreshold { .. }
            | Error::ExtractionFailed { .. }
            | Error::NotHamiltonian(_)
            | Error::TraceMismatch(_) => Failure::Negative(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn load_instance(path: &Path) -> Result<DpInstance, Failure> {
    Ok(DpInstance::from_json(&read(path)?)?)
}

fn solve_config(flags: &SolverFlags) -> Result<SolveConfig, Failure> {
    let strategy = match flags.strategy {
        Strategy::Exact => StrategyKind::Exact,
        Strategy::Qmf => StrategyKind::Qmf,
    };
    if strategy == StrategyKind::Qmf && flags.seed.is_none() {
        return Err(Failure::Input(
            "--seed is required with --strategy qmf".into(),
        ));
    }
    Ok(SolveConfig {
        strategy,
        fail_prob: flags.fail_prob,
        delta: flags.delta,
        rho: flags.rho,
        seed: flags.seed.unwrap_or(0),
        rounds_override: flags.rounds_override,
        ..SolveConfig::default()
    })
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn trace_table(trace: &PolicyTrace) -> String {
    let mut s = String::from("time state action reward\n");
    for st in &trace.steps {
        s.push_str(&format!(
            "{} {} {} {}\n",
            st.time, st.state, st.action, st.reward
        ));
    }
    s.push_str(&format!("cumulative {}\n", trace.cumulative_reward()));
    s
}

fn cmd_gen(args: &GenArgs) -> CmdResult {
    let text = match args.kind {
        GenKind::Dp => gen_random_instance(&RandomParams {
            num_states: args.states,
            num_actions: args.actions,
            horizon: args.horizon,
            reward_max: args.reward_max,
            time_dependent: args.time_dependent,
            seed: args.seed,
        })?
        .to_json(),
        GenKind::Tsp => {
            gen_tsp_graph(args.n, args.cost_bound, !args.asymmetric, args.seed)?.to_json()
        }
        GenKind::Msc => gen_msc_instance(args.n, args.sets, args.density, args.seed)?.to_json(),
    };
    emit(args.out.as_deref(), &(text + "\n"))
}

fn cmd_bellman(args: &InstanceArgs) -> CmdResult {
    let inst = load_instance(&args.instance)?;
    let (table, policy) = bellman_solve(&inst);
    let trace = rollout(&inst, &policy);
    let value = table.get(inst.initial_state(), 0);
    let text = match args.format {
        Format::Json => to_json(&serde_json::json!({
            "value": value,
            "unshifted_value": trace.unshifted_reward(&inst),
            "trace": trace,
        })),
        Format::Csv => format!("value\n{value}\n"),
        Format::Table => format!("v*(s0) = {value}\n{}", trace_table(&trace)),
    };
    emit(args.out.as_deref(), &text)
}

fn cmd_solve(args: &SolveArgs) -> CmdResult {
    let inst = load_instance(&args.instance)?;
    let cfg = solve_config(&args.solver)?;
    let mut report = solve_dp(&inst, &cfg)?;
    if args.solver.no_timing {
        report.wallclock_ms = 0.0;
    }
    info!(
        "solved: sigma_bar={} action={}",
        report.sigma_bar, report.action
    );
    match (args.format, &args.out) {
        (_, Some(path)) => emit(Some(path), &to_json(&report)),
        (Format::Json, None) => emit(None, &to_json(&report)),
        (Format::Csv, None) => emit(
            None,
            &format!(
                "sigma_bar,action,delta_used,escalations,bisection_steps,total_iterations,qmf_runs,modeled_queries,scan_evaluations,certified\n{},{},{},{},{},{},{},{},{},{}\n",
                report.sigma_bar,
                report.action,
                report.delta_used,
                report.escalations,
                report.bisection_steps,
                report.total_iterations,
                report.ledger.qmf_runs,
                report.ledger.modeled_queries,
                report.ledger.scan_evaluations,
                report.certified
            ),
        ),
        (Format::Table, None) => emit(
            None,
            &format!(
                "sigma_bar  {}\naction     {}\nlambda_s0  {:?}\ndelta      {}\nescalations {}\nprobes     {:?}\nledger     runs={} queries={} scans={}\ncertified  {}\n",
                report.sigma_bar,
                report.action,
                report.lambda_s0,
                report.delta_used,
                report.escalations,
                report.rounds_per_probe,
                report.ledger.qmf_runs,
                report.ledger.modeled_queries,
                report.ledger.scan_evaluations,
                report.certified
            ),
        ),
    }
}

fn solve_trace(
    inst: &DpInstance,
    method: Method,
    flags: &SolverFlags,
) -> Result<PolicyTrace, Failure> {
    match method {
        Method::Bellman => {
            let (_, policy) = bellman_solve(inst);
            Ok(rollout(inst, &policy))
        }
        Method::Mwum => Ok(solve_policy(inst, &solve_config(flags)?)?.trace),
    }
}

fn cmd_policy(args: &SolveArgs) -> CmdResult {
    let inst = load_instance(&args.instance)?;
    let cfg = solve_config(&args.solver)?;
    let mut outcome = solve_policy(&inst, &cfg)?;
    if args.solver.no_timing {
        for r in &mut outcome.reports {
            r.wallclock_ms = 0.0;
        }
    }
    let text = match args.format {
        Format::Json => to_json(&outcome),
        Format::Csv => {
            let mut s = String::from("time,state,action,reward\n");
            for st in &outcome.trace.steps {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    st.time, st.state, st.action, st.reward
                ));
            }
            s
        }
        Format::Table => trace_table(&outcome.trace),
    };
    emit(args.out.as_deref(), &text)
}

fn cmd_tsp(args: &ReductionArgs) -> CmdResult {
    let g = TspGraph::from_json(&read(&args.instance)?)?;
    let enc = encode_tsp(&g)?;
    let trace = solve_trace(&enc.instance, args.method, &args.solver)?;
    let (tour, cost) = decode_tsp(&trace, &enc, &g)?;
    let reference = brute_force_tsp(&g).ok();
    let text = match args.format {
        Format::Json => to_json(&serde_json::json!({
            "tour": tour,
            "cost": cost,
            "brute_force": reference,
        })),
        Format::Csv => format!(
            "cost,brute_force,tour\n{cost},{},{}\n",
            reference.map_or(String::new(), |r| r.to_string()),
            tour.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        ),
        Format::Table => format!(
            "tour {}\ncost {cost}\n{}",
            tour.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" -> "),
            reference.map_or(String::new(), |r| format!("brute force {r}\n"))
        ),
    };
    emit(args.out.as_deref(), &text)
}

fn cmd_msc(args: &ReductionArgs) -> CmdResult {
    let inst = MscInstance::from_json(&read(&args.instance)?)?;
    let enc = encode_msc(&inst)?;
    let trace = solve_trace(&enc.instance, args.method, &args.solver)?;
    let solution = decode_msc(&trace, &enc, &inst)?;
    let reference = brute_force_msc(&inst).ok().flatten();
    let text = match (&solution, args.format) {
        (_, Format::Json) => to_json(&serde_json::json!({
            "solution": solution,
            "brute_force": reference,
        })),
        (MscSolution::Cover { sets, size }, Format::Csv) => format!(
            "size,sets\n{size},{}\n",
            sets.iter()
                .map(|k| (k + 1).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        ),
        (MscSolution::Cover { sets, size }, Format::Table) => format!(
            "cover size {size}\nsets {}\n",
            sets.iter()
                .map(|k| format!("{:?}", inst.sets[*k]))
                .collect::<Vec<_>>()
                .join(" ")
        ),
        (MscSolution::NoCover, _) => "no cover\n".to_string(),
    };
    emit(args.out.as_deref(), &text)?;
    match solution {
        MscSolution::NoCover => Err(Failure::Negative("no cover exists".into())),
        MscSolution::Cover { .. } => Ok(()),
    }
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let checks = run_verify_suite(args.seed)?;
    let text = match args.format {
        Format::Json => to_json(&checks),
        Format::Csv => {
            let mut s = String::from("check,pass,detail\n");
            for c in &checks {
                s.push_str(&format!("{},{},\"{}\"\n", c.name, c.pass, c.detail));
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for c in &checks {
                let mark = if c.pass { "PASS" } else { "FAIL" };
                s.push_str(&format!("{mark}  {:<26} {}\n", c.name, c.detail));
            }
            s
        }
    };
    emit(None, &text)?;
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(Failure::Negative("verification failed".into()))
    }
}

fn default_axes() -> GridAxes {
    GridAxes {
        num_states: vec![3],
        num_actions: vec![2, 3],
        horizon: vec![2],
        reward_max: vec![1],
        rho: (2..=8).collect(),
        seeds: vec![1],
        strategies: vec![StrategyKind::Exact],
        time_dependent: false,
        rounds_override: None,
    }
}

fn cmd_bench(args: &BenchArgs) -> CmdResult {
    let axes = match &args.grid {
        Some(path) => serde_json::from_str(&read(path)?)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => default_axes(),
    };
    let csv = bench_sweep(
        &BenchGrid::from_axes(&axes),
        SweepOptions {
            no_timing: args.no_timing,
        },
    )?;
    emit(args.out.as_deref(), &csv)
}

fn init_logging() {
    let level = std::env::var("DP_LOG_LEVEL").unwrap_or_else(|_| "error".into());
    env_logger::Builder::new()
        .parse_filters(&level)
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Bellman(a) => cmd_bellman(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Policy(a) => cmd_policy(a),
        Command::Tsp(a) => cmd_tsp(a),
        Command::Msc(a) => cmd_msc(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
