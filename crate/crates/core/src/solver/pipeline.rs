//! The full pipeline: σ search, action extraction with δ escalation, and
//! iterative policy construction.

use std::time::Instant;

use log::{info, warn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{compute_rho, DpInstance, PolicyTrace, TraceStep};
use crate::mwum::{compute_config_variant, FeasibilityConfig};
use crate::oracle::{qmf_run_cost, QmfSampler, QueryLedger, SigmaContext};
use crate::solver::config::{SolveConfig, StrategyKind};
use crate::solver::extract::{extract_from_values, lambda_at_s0};
use crate::solver::search::{binary_search_sigma, ProbeOptions, ProbeSummary};

pub const REPORT_SCHEMA: &str = "dp-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub schema: &'static str,
    pub sigma_bar: u64,
    pub action: usize,
    pub lambda_s0: Vec<f64>,
    pub delta_used: f64,
    pub escalations: u32,
    /// Rounds executed by each probe of the final search, in probe order.
    pub rounds_per_probe: Vec<usize>,
    pub probes: Vec<ProbeSummary>,
    pub bisection_steps: usize,
    /// Prescribed rounds at `sigma_bar`.
    pub rounds_planned: usize,
    /// MWUM rounds over every search, including escalated ones.
    pub total_iterations: u64,
    pub ledger: QueryLedger,
    pub certified: bool,
    pub non_monotone: bool,
    pub rho: u64,
    pub fail_prob: Option<f64>,
    pub wallclock_ms: f64,
}

/// `⌈log2 ρ⌉ + 1`, the number of σ probes a bisection over `[1, ρ]` plans for.
pub fn planned_probes(rho: u64) -> u64 {
    let ceil_log2 = if rho <= 1 {
        0
    } else {
        64 - u64::from((rho - 1).leading_zeros())
    };
    ceil_log2 + 1
}

fn config_at(
    inst: &DpInstance,
    sigma: u64,
    rho: u64,
    delta: f64,
    cfg: &SolveConfig,
) -> Result<FeasibilityConfig> {
    let ctx = SigmaContext::new(inst, sigma as f64, rho)?;
    compute_config_variant(
        delta,
        ctx.ell(),
        ctx.num_constraints(),
        cfg.rounds_override,
        cfg.variant,
    )
}

/// Planned MWUM rounds over a whole search: probes times `K` at `σ = ρ`.
pub fn planned_rounds(inst: &DpInstance, rho: u64, delta: f64, cfg: &SolveConfig) -> Result<u64> {
    let k = config_at(inst, rho, rho, delta, cfg)?.round_limit() as u64;
    Ok(planned_probes(rho) * k)
}

/// Finds σ̄ and an action at the initial state whose averaged dual mass
/// reaches `1 / (2|A|)`, halving δ when no action does.
pub fn solve_dp(inst: &DpInstance, cfg: &SolveConfig) -> Result<SolveReport> {
    let start = Instant::now();
    cfg.check()?;
    let rho = compute_rho(inst, cfg.rho)?;
    let delta0 = cfg.resolve_delta(inst.num_actions())?;
    let options = ProbeOptions {
        rounds_override: cfg.rounds_override,
        variant: cfg.variant,
        record_transcript: false,
    };
    let mut sampler: Option<QmfSampler> = None;
    let mut ledger = QueryLedger::default();
    let mut total_iterations = 0u64;
    let mut delta = delta0;
    let mut fail_prob = None;
    for escalation in 0..=cfg.escalation_limit {
        if cfg.strategy == StrategyKind::Qmf {
            let p = match cfg.fail_prob {
                Some(p) => p,
                None => 1.0 / (2.0 * planned_rounds(inst, rho, delta, cfg)? as f64),
            };
            fail_prob = Some(p);
            // one generator per solve; later escalations continue its stream
            sampler = Some(match sampler.take() {
                None => QmfSampler::new(p, cfg.seed)?,
                Some(s) => s.with_fail_prob(p)?,
            });
        }
        let search = binary_search_sigma(inst, rho, delta, &mut sampler, options)?;
        ledger.absorb(&search.ledger);
        total_iterations += search.history.iter().map(|h| h.2 as u64).sum::<u64>();
        let average = search
            .probe
            .average()
            .expect("a feasible probe carries its average");
        let lambda_s0 = lambda_at_s0(inst, average);
        match extract_from_values(&lambda_s0) {
            Ok(action) => {
                info!(
                    "sigma_bar={} action={action} delta={delta} escalations={escalation}",
                    search.sigma_bar
                );
                return Ok(SolveReport {
                    schema: REPORT_SCHEMA,
                    sigma_bar: search.sigma_bar,
                    action,
                    lambda_s0,
                    delta_used: delta,
                    escalations: escalation,
                    rounds_per_probe: search.history.iter().map(|h| h.2).collect(),
                    probes: search.summaries(),
                    bisection_steps: search.bisection_steps,
                    rounds_planned: search.probe.config.round_limit(),
                    total_iterations,
                    ledger,
                    certified: cfg.rounds_override.is_none(),
                    non_monotone: search.non_monotone,
                    rho,
                    fail_prob,
                    wallclock_ms: start.elapsed().as_secs_f64() * 1e3,
                });
            }
            Err(Error::ExtractionBelowThreshold { best, threshold }) => {
                warn!(
                    "extraction below threshold at delta={delta}: best {best} < {threshold}, \
                     lambda_s0={lambda_s0:?}"
                );
                delta /= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::ExtractionFailed {
        escalations: cfg.escalation_limit as usize,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyOutcome {
    pub trace: PolicyTrace,
    /// One report per decision, in time order.
    pub reports: Vec<SolveReport>,
}

/// Solves at the initial state, takes the chosen action, and repeats on the
/// remaining sub-problem until the horizon is reached.
pub fn solve_policy(inst: &DpInstance, cfg: &SolveConfig) -> Result<PolicyOutcome> {
    let mut state = inst.initial_state();
    let mut steps = Vec::with_capacity(inst.horizon());
    let mut reports = Vec::with_capacity(inst.horizon());
    for t in 0..inst.horizon() {
        let (sub, _) = inst.suffix(state, t)?;
        let step_cfg = SolveConfig {
            seed: cfg.seed.wrapping_add(t as u64),
            ..cfg.clone()
        };
        let report = solve_dp(&sub, &step_cfg)?;
        let action = report.action;
        let tr = inst.step(t, state, action);
        steps.push(TraceStep {
            state,
            time: t,
            action,
            reward: tr.reward,
        });
        reports.push(report);
        state = tr.next;
    }
    Ok(PolicyOutcome {
        trace: PolicyTrace { steps },
        reports,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaBound {
    pub sigma: u64,
    pub ell: f64,
    pub epsilon: f64,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationBound {
    pub delta: f64,
    pub rho: u64,
    pub num_constraints: usize,
    pub num_vertices: usize,
    pub planned_probes: u64,
    /// `K` at every integer σ in `[1, ρ]` (capped at 1024 entries).
    pub per_sigma: Vec<SigmaBound>,
    pub rounds_at_rho: usize,
    pub planned_rounds: u64,
    pub fail_prob: f64,
    /// Modeled QMF queries if every planned round were a QMF run at `fail_prob`.
    pub planned_queries: u64,
}

/// Closed-form round and query budget for a solve; does no solving.
pub fn iteration_bound_report(inst: &DpInstance, cfg: &SolveConfig) -> Result<IterationBound> {
    cfg.check()?;
    let rho = compute_rho(inst, cfg.rho)?;
    let delta = cfg.resolve_delta(inst.num_actions())?;
    let ctx = SigmaContext::new(inst, rho as f64, rho)?;
    let per_sigma = (1..=rho.min(1024))
        .map(|sigma| {
            config_at(inst, sigma, rho, delta, cfg).map(|c| SigmaBound {
                sigma,
                ell: c.ell,
                epsilon: c.epsilon,
                rounds: c.round_limit(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rounds_at_rho = config_at(inst, rho, rho, delta, cfg)?.round_limit();
    let planned = planned_probes(rho) * rounds_at_rho as u64;
    let fail_prob = cfg.fail_prob.unwrap_or(1.0 / (2.0 * planned as f64));
    Ok(IterationBound {
        delta,
        rho,
        num_constraints: ctx.num_constraints(),
        num_vertices: ctx.num_vertices(),
        planned_probes: planned_probes(rho),
        per_sigma,
        rounds_at_rho,
        planned_rounds: planned,
        fail_prob,
        planned_queries: planned * qmf_run_cost(ctx.num_vertices() as u64, fail_prob),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_counts() {
        assert_eq!(planned_probes(1), 1);
        assert_eq!(planned_probes(2), 2);
        assert_eq!(planned_probes(4), 3);
        assert_eq!(planned_probes(5), 4);
        assert_eq!(planned_probes(8), 4);
    }
}
