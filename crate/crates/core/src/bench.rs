//! Parameter sweeps over random instances, emitted as CSV.
//!
//! Column order is fixed (see [`BenchRow`]). Rows may be solved in parallel
//! but are written in grid order.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{bellman_solve, gen_random_instance, optimal_action_set, RandomParams};
use crate::parallel;
use crate::solver::{iteration_bound_report, solve_dp, SolveConfig, StrategyKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchCase {
    pub num_states: usize,
    pub num_actions: usize,
    pub horizon: usize,
    pub reward_max: i64,
    pub time_dependent: bool,
    pub seed: u64,
    pub strategy: StrategyKind,
    #[serde(default)]
    pub rho: Option<i64>,
    #[serde(default)]
    pub rounds_override: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchGrid {
    pub cases: Vec<BenchCase>,
}

/// Axes of a Cartesian grid; every combination becomes one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxes {
    pub num_states: Vec<usize>,
    pub num_actions: Vec<usize>,
    pub horizon: Vec<usize>,
    pub reward_max: Vec<i64>,
    #[serde(default)]
    pub rho: Vec<i64>,
    pub seeds: Vec<u64>,
    pub strategies: Vec<StrategyKind>,
    #[serde(default)]
    pub time_dependent: bool,
    #[serde(default)]
    pub rounds_override: Option<usize>,
}

impl BenchGrid {
    pub fn from_axes(axes: &GridAxes) -> Self {
        let rhos: Vec<Option<i64>> = if axes.rho.is_empty() {
            vec![None]
        } else {
            axes.rho.iter().copied().map(Some).collect()
        };
        let mut cases = Vec::new();
        for &num_states in &axes.num_states {
            for &num_actions in &axes.num_actions {
                for &horizon in &axes.horizon {
                    for &reward_max in &axes.reward_max {
                        for &rho in &rhos {
                            for &seed in &axes.seeds {
                                for &strategy in &axes.strategies {
                                    cases.push(BenchCase {
                                        num_states,
                                        num_actions,
                                        horizon,
                                        reward_max,
                                        time_dependent: axes.time_dependent,
                                        seed,
                                        strategy,
                                        rho,
                                        rounds_override: axes.rounds_override,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        BenchGrid { cases }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub index: usize,
    pub num_states: usize,
    pub num_actions: usize,
    pub horizon: usize,
    pub reward_max: i64,
    pub time_dependent: bool,
    pub seed: u64,
    pub strategy: &'static str,
    pub rho: u64,
    pub delta: f64,
    pub num_constraints: usize,
    pub num_vertices: usize,
    /// Prescribed `K` at `σ = ρ`, where `ℓ = 2ρ`.
    pub planned_k: usize,
    pub planned_rounds: u64,
    pub executed_rounds: u64,
    pub probes: usize,
    pub sigma_star: i64,
    pub sigma_bar: Option<u64>,
    pub action: Option<usize>,
    pub action_optimal: Option<bool>,
    pub escalations: Option<u32>,
    pub qmf_runs: u64,
    pub modeled_queries: u64,
    pub scan_evaluations: u64,
    pub certified: bool,
    pub status: String,
    pub wallclock_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    /// Report zero wall-clock time so output is byte-stable.
    pub no_timing: bool,
}

fn strategy_name(kind: StrategyKind) -> &'static str {
    match kind {
        StrategyKind::Exact => "exact",
        StrategyKind::Qmf => "qmf",
    }
}

fn run_case(index: usize, case: &BenchCase, options: SweepOptions) -> Result<BenchRow> {
    let inst = gen_random_instance(&RandomParams {
        num_states: case.num_states,
        num_actions: case.num_actions,
        horizon: case.horizon,
        reward_max: case.reward_max,
        time_dependent: case.time_dependent,
        seed: case.seed,
    })?;
    let cfg = SolveConfig {
        strategy: case.strategy,
        rho: case.rho,
        seed: case.seed,
        rounds_override: case.rounds_override,
        ..SolveConfig::default()
    };
    let bound = iteration_bound_report(&inst, &cfg)?;
    let (table, _) = bellman_solve(&inst);
    let s0 = inst.initial_state();
    let mut row = BenchRow {
        index,
        num_states: case.num_states,
        num_actions: case.num_actions,
        horizon: case.horizon,
        reward_max: case.reward_max,
        time_dependent: case.time_dependent,
        seed: case.seed,
        strategy: strategy_name(case.strategy),
        rho: bound.rho,
        delta: bound.delta,
        num_constraints: bound.num_constraints,
        num_vertices: bound.num_vertices,
        planned_k: bound.rounds_at_rho,
        planned_rounds: bound.planned_rounds,
        executed_rounds: 0,
        probes: 0,
        sigma_star: table.get(s0, 0),
        sigma_bar: None,
        action: None,
        action_optimal: None,
        escalations: None,
        qmf_runs: 0,
        modeled_queries: 0,
        scan_evaluations: 0,
        certified: case.rounds_override.is_none(),
        status: String::new(),
        wallclock_ms: 0.0,
    };
    let start = Instant::now();
    match solve_dp(&inst, &cfg) {
        Ok(report) => {
            row.executed_rounds = report.total_iterations;
            row.probes = report.probes.len();
            row.sigma_bar = Some(report.sigma_bar);
            row.action = Some(report.action);
            row.action_optimal = Some(optimal_action_set(&inst, s0, 0).contains(&report.action));
            row.escalations = Some(report.escalations);
            row.qmf_runs = report.ledger.qmf_runs;
            row.modeled_queries = report.ledger.modeled_queries;
            row.scan_evaluations = report.ledger.scan_evaluations;
            row.certified = report.certified;
            row.status = "ok".into();
        }
        Err(e) => row.status = format!("error: {e}"),
    }
    if !options.no_timing {
        row.wallclock_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    Ok(row)
}

/// Solves every case and returns the rows in grid order. A case that fails
/// to build is reported in its `status` column; the sweep carries on.
pub fn bench_rows(grid: &BenchGrid, options: SweepOptions) -> Vec<BenchRow> {
    let indexed: Vec<(usize, BenchCase)> = grid.cases.iter().copied().enumerate().collect();
    parallel::map(&indexed, |(i, case)| {
        run_case(*i, case, options).unwrap_or_else(|e| failed_row(*i, case, &e.to_string()))
    })
}

fn failed_row(index: usize, case: &BenchCase, msg: &str) -> BenchRow {
    BenchRow {
        index,
        num_states: case.num_states,
        num_actions: case.num_actions,
        horizon: case.horizon,
        reward_max: case.reward_max,
        time_dependent: case.time_dependent,
        seed: case.seed,
        strategy: strategy_name(case.strategy),
        rho: 0,
        delta: 0.0,
        num_constraints: 0,
        num_vertices: 0,
        planned_k: 0,
        planned_rounds: 0,
        executed_rounds: 0,
        probes: 0,
        sigma_star: 0,
        sigma_bar: None,
        action: None,
        action_optimal: None,
        escalations: None,
        qmf_runs: 0,
        modeled_queries: 0,
        scan_evaluations: 0,
        certified: false,
        status: format!("error: {msg}"),
        wallclock_ms: 0.0,
    }
}

pub const CSV_HEADER: &str = "index,num_states,num_actions,horizon,reward_max,time_dependent,seed,\
strategy,rho,delta,num_constraints,num_vertices,planned_k,planned_rounds,executed_rounds,probes,\
sigma_star,sigma_bar,action,action_optimal,escalations,qmf_runs,modeled_queries,scan_evaluations,\
certified,status,wallclock_ms";

pub fn rows_to_csv(rows: &[BenchRow]) -> Result<String> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| crate::Error::Io(e.to_string()))?;
    }
    let body = writer
        .into_inner()
        .map_err(|e| crate::Error::Io(e.to_string()))?;
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(out)
}

pub fn bench_sweep(grid: &BenchGrid, options: SweepOptions) -> Result<String> {
    rows_to_csv(&bench_rows(grid, options))
}
