//! Feasibility probes at a fixed σ and the binary search over σ.

use log::debug;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::DpInstance;
use crate::mwum::{
    compute_config_variant, run_feasibility, FeasibilityConfig, FeasibilityOutcome, RunOptions,
    Variant,
};
use crate::oracle::{
    check_dual_feasibility, AveragedSolution, DpOracle, DualVerdict, QmfSampler, QueryLedger,
    SigmaContext,
};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProbeOptions {
    pub rounds_override: Option<usize>,
    pub variant: Variant,
    pub record_transcript: bool,
}

/// Result of one MWUM run at a fixed σ.
#[derive(Debug, Clone)]
pub struct Probe {
    pub sigma: u64,
    pub config: FeasibilityConfig,
    pub outcome: FeasibilityOutcome<AveragedSolution>,
    /// Exact check of `(DP_σ^δ)` at the averaged solution; present when the
    /// run finished without a rejection.
    pub dual_check: Option<DualVerdict>,
    pub rounds_run: usize,
    pub ledger: QueryLedger,
}

impl Probe {
    /// A probe counts as feasible when the run completed and its average
    /// passes the exact constraint check.
    pub fn is_feasible(&self) -> bool {
        self.outcome.is_feasible() && self.dual_check.as_ref().is_some_and(|v| v.pass)
    }

    pub fn average(&self) -> Option<&AveragedSolution> {
        match &self.outcome {
            FeasibilityOutcome::Feasible { average, .. } => Some(average),
            FeasibilityOutcome::Infeasible { .. } => None,
        }
    }
}

/// Runs MWUM on `(DP_σ^δ)` with `ℓ = 2σ`. `sampler = None` uses the exact
/// scan; otherwise the sampler's state advances across calls.
pub fn feasibility_at_sigma(
    inst: &DpInstance,
    sigma: u64,
    rho: u64,
    delta: f64,
    sampler: &mut Option<QmfSampler>,
    options: ProbeOptions,
) -> Result<Probe> {
    let ctx = SigmaContext::new(inst, sigma as f64, rho)?;
    let config = compute_config_variant(
        delta,
        ctx.ell(),
        ctx.num_constraints(),
        options.rounds_override,
        options.variant,
    )?;
    let mut oracle = DpOracle::new(&ctx, delta, sampler.take());
    let outcome = run_feasibility(
        &config,
        &mut oracle,
        AveragedSolution::new(&ctx),
        RunOptions {
            record_transcript: options.record_transcript,
            record_p: false,
        },
    );
    let (ledger, returned) = oracle.into_parts();
    *sampler = returned;
    let outcome = outcome?;
    let (dual_check, rounds_run) = match &outcome {
        FeasibilityOutcome::Feasible {
            average, rounds, ..
        } => (
            Some(check_dual_feasibility(&ctx, &average.lambda(), delta)?),
            *rounds,
        ),
        FeasibilityOutcome::Infeasible { round, .. } => (None, *round),
    };
    debug!(
        "probe sigma={sigma} delta={delta} rounds={rounds_run}/{} feasible={} worst={:?}",
        config.round_limit(),
        outcome.is_feasible(),
        dual_check.as_ref().map(|v| v.worst_residual)
    );
    Ok(Probe {
        sigma,
        config,
        outcome,
        dual_check,
        rounds_run,
        ledger,
    })
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub sigma_bar: u64,
    /// The feasible probe at `sigma_bar`.
    pub probe: Probe,
    /// Midpoint probes made while halving the range.
    pub bisection_steps: usize,
    /// `(σ, feasible, rounds run)` for every probe, in order.
    pub history: Vec<(u64, bool, usize)>,
    pub ledger: QueryLedger,
    pub non_monotone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProbeSummary {
    pub sigma: u64,
    pub feasible: bool,
    pub rounds: usize,
}

/// Largest integer σ in `[1, ρ]` found feasible by bisection.
///
/// If some σ was rejected below a σ that passed (only possible under QMF
/// failures), the result is the highest passing σ, probed downward, and the
/// result is flagged.
pub fn binary_search_sigma(
    inst: &DpInstance,
    rho: u64,
    delta: f64,
    sampler: &mut Option<QmfSampler>,
    options: ProbeOptions,
) -> Result<SearchResult> {
    let mut ledger = QueryLedger::default();
    let mut history = Vec::new();
    let mut best: Option<Probe> = None;
    let probe_at = |sigma: u64,
                    sampler: &mut Option<QmfSampler>,
                    ledger: &mut QueryLedger,
                    history: &mut Vec<(u64, bool, usize)>|
     -> Result<Probe> {
        let probe = feasibility_at_sigma(inst, sigma, rho, delta, sampler, options)?;
        ledger.absorb(&probe.ledger);
        history.push((sigma, probe.is_feasible(), probe.rounds_run));
        Ok(probe)
    };

    let (mut lo, mut hi) = (1u64, rho);
    let mut bisection_steps = 0;
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        let probe = probe_at(mid, sampler, &mut ledger, &mut history)?;
        bisection_steps += 1;
        if probe.is_feasible() {
            lo = mid;
            best = Some(probe);
        } else {
            hi = mid - 1;
        }
    }
    if best.as_ref().is_none_or(|p| p.sigma != lo) {
        let probe = probe_at(lo, sampler, &mut ledger, &mut history)?;
        if probe.is_feasible() {
            best = Some(probe);
        }
    }

    let highest_pass = history.iter().filter(|h| h.1).map(|h| h.0).max();
    let non_monotone = highest_pass.is_some_and(|top| history.iter().any(|h| !h.1 && h.0 < top));
    if non_monotone {
        // walk down from the highest passing σ until a probe passes again
        let mut sigma = highest_pass.unwrap_or(1);
        best = None;
        while sigma >= 1 {
            let probe = probe_at(sigma, sampler, &mut ledger, &mut history)?;
            if probe.is_feasible() {
                best = Some(probe);
                break;
            }
            sigma -= 1;
        }
    }
    match best {
        Some(probe) => Ok(SearchResult {
            sigma_bar: probe.sigma,
            probe,
            bisection_steps,
            history,
            ledger,
            non_monotone,
        }),
        None => Err(Error::AllInfeasible { rho }),
    }
}

impl SearchResult {
    pub fn summaries(&self) -> Vec<ProbeSummary> {
        self.history
            .iter()
            .map(|&(sigma, feasible, rounds)| ProbeSummary {
                sigma,
                feasible,
                rounds,
            })
            .collect()
    }
}
