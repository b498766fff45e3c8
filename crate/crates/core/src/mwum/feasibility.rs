//! MWUM driver for `Ax >= b, x in P` with a δ-approximate oracle.
//!
//! One expert per constraint. Each round the oracle sees `p = w / |w|` and
//! either returns a point whose `p`-weighted residual is at least `-δ`, or
//! declares the relaxation infeasible (in which case `p` is the certificate).
//! Costs are the residuals scaled by the width `ℓ`.

use serde::{Deserialize, Serialize};

use super::transcript::{RoundRecord, Transcript, TranscriptPoint};
use super::weights::{check_epsilon, WeightState};
use crate::error::{Error, Result};

/// Which round-count constants to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Approximate oracle: `ε = δ/6ℓ`, `K = ⌈18 ℓ² ln s / δ²⌉`, needs `ℓ >= δ/3`.
    #[default]
    Approximate,
    /// Exact oracle: `ε = δ/4ℓ`, `K = ⌈8 ℓ² ln s / δ²⌉`, needs `ℓ >= δ/2`.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityConfig {
    pub delta: f64,
    pub ell: f64,
    pub num_constraints: usize,
    pub epsilon: f64,
    /// Prescribed round count (at least 1).
    pub rounds: usize,
    pub max_rounds_override: Option<usize>,
    pub variant: Variant,
}

impl FeasibilityConfig {
    /// Rounds actually executed.
    pub fn round_limit(&self) -> usize {
        self.max_rounds_override.unwrap_or(self.rounds)
    }

    /// False when the round count was overridden.
    pub fn certified(&self) -> bool {
        self.max_rounds_override.is_none()
    }
}

pub fn prescribed_rounds(delta: f64, ell: f64, num_constraints: usize, variant: Variant) -> usize {
    let c = match variant {
        Variant::Approximate => 18.0,
        Variant::Exact => 8.0,
    };
    let k = (c * ell * ell * (num_constraints as f64).ln() / (delta * delta)).ceil();
    (k as usize).max(1)
}

pub fn compute_config(
    delta: f64,
    ell: f64,
    num_constraints: usize,
    rounds_override: Option<usize>,
) -> Result<FeasibilityConfig> {
    compute_config_variant(
        delta,
        ell,
        num_constraints,
        rounds_override,
        Variant::Approximate,
    )
}

pub fn compute_config_variant(
    delta: f64,
    ell: f64,
    num_constraints: usize,
    rounds_override: Option<usize>,
    variant: Variant,
) -> Result<FeasibilityConfig> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if num_constraints < 1 {
        return Err(Error::InvalidParameter(
            "need at least one constraint".into(),
        ));
    }
    let (min_ell, eps_div) = match variant {
        Variant::Approximate => (delta / 3.0, 6.0),
        Variant::Exact => (delta / 2.0, 4.0),
    };
    if ell < min_ell {
        return Err(Error::EllTooSmall { ell, min: min_ell });
    }
    if rounds_override == Some(0) {
        return Err(Error::InvalidParameter(
            "rounds override must be positive".into(),
        ));
    }
    let epsilon = delta / (eps_div * ell);
    check_epsilon(epsilon)?;
    Ok(FeasibilityConfig {
        delta,
        ell,
        num_constraints,
        epsilon,
        rounds: prescribed_rounds(delta, ell, num_constraints, variant),
        max_rounds_override: rounds_override,
        variant,
    })
}

/// Oracle reply. `residual` lists the non-zero entries of `A x - b`.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleAnswer<P> {
    Accept {
        point: P,
        residual: Vec<(usize, f64)>,
    },
    Reject,
}

/// A δ-approximate subprocedure for the Lagrangian relaxation.
pub trait ApproxOracle {
    type Point;
    fn num_constraints(&self) -> usize;
    fn query(&mut self, p: &[f64]) -> Result<OracleAnswer<Self::Point>>;
}

/// Running average of the points returned by the oracle.
pub trait Average<P> {
    fn add(&mut self, point: &P);
}

/// Plain dense mean, for generic oracles.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseAverage {
    sum: Vec<f64>,
    count: usize,
}

impl DenseAverage {
    pub fn mean(&self) -> Vec<f64> {
        let c = self.count.max(1) as f64;
        self.sum.iter().map(|s| s / c).collect()
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

impl Average<Vec<f64>> for DenseAverage {
    fn add(&mut self, point: &Vec<f64>) {
        if self.sum.is_empty() {
            self.sum = vec![0.0; point.len()];
        }
        for (s, x) in self.sum.iter_mut().zip(point) {
            *s += x;
        }
        self.count += 1;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub record_transcript: bool,
    /// Store `p` in every transcript record (dense, so costly for long runs).
    pub record_p: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityOutcome<A> {
    Feasible {
        average: A,
        rounds: usize,
        /// Smallest `p . m` over the run; the oracle contract keeps it `>= -δ/ℓ`.
        min_expected_cost: f64,
        transcript: Option<Transcript>,
    },
    Infeasible {
        certificate: Vec<f64>,
        /// 1-based round at which the oracle declared infeasibility.
        round: usize,
        transcript: Option<Transcript>,
    },
}

impl<A> FeasibilityOutcome<A> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityOutcome::Feasible { .. })
    }

    pub fn transcript(&self) -> Option<&Transcript> {
        match self {
            FeasibilityOutcome::Feasible { transcript, .. }
            | FeasibilityOutcome::Infeasible { transcript, .. } => transcript.as_ref(),
        }
    }
}

/// Runs at most `config.round_limit()` rounds.
pub fn run_feasibility<O, A>(
    config: &FeasibilityConfig,
    oracle: &mut O,
    mut average: A,
    options: RunOptions,
) -> Result<FeasibilityOutcome<A>>
where
    O: ApproxOracle,
    O::Point: TranscriptPoint,
    A: Average<O::Point>,
{
    let s = oracle.num_constraints();
    if s != config.num_constraints {
        return Err(Error::DimensionMismatch {
            expected: config.num_constraints,
            got: s,
        });
    }
    let limit = config.round_limit();
    let (eps, ell) = (config.epsilon, config.ell);
    let inv_ell = 1.0 / ell;
    let mut state = WeightState::uniform(s);
    let mut p = vec![0.0; s];
    let mut costs: Vec<(usize, f64)> = Vec::with_capacity(8);
    let mut min_pm = f64::INFINITY;
    let mut transcript = options.record_transcript.then(|| Transcript::new(s, eps));

    for round in 1..=limit {
        state.distribution_into(&mut p);
        match oracle.query(&p)? {
            OracleAnswer::Reject => {
                if let Some(t) = transcript.as_mut() {
                    t.rounds.push(RoundRecord {
                        round,
                        p: options.record_p.then(|| p.clone()),
                        chosen: None,
                        m: Vec::new(),
                        accepted: false,
                    });
                }
                return Ok(FeasibilityOutcome::Infeasible {
                    certificate: p,
                    round,
                    transcript,
                });
            }
            OracleAnswer::Accept { point, residual } => {
                costs.clear();
                let mut pm = 0.0;
                for &(i, r) in &residual {
                    if r.abs() > ell * (1.0 + 1e-12) {
                        return Err(Error::ResidualExceedsEll {
                            index: i,
                            value: r,
                            ell,
                        });
                    }
                    let m = (r * inv_ell).clamp(-1.0, 1.0);
                    pm += p[i] * m;
                    costs.push((i, m));
                }
                min_pm = min_pm.min(pm);
                state.apply_sparse(&costs, eps);
                average.add(&point);
                if let Some(t) = transcript.as_mut() {
                    t.rounds.push(RoundRecord {
                        round,
                        p: options.record_p.then(|| p.clone()),
                        chosen: Some(point.chosen()),
                        m: costs.clone(),
                        accepted: true,
                    });
                }
            }
        }
    }
    Ok(FeasibilityOutcome::Feasible {
        average,
        rounds: limit,
        min_expected_cost: min_pm,
        transcript,
    })
}
