//! The averaged dual solution `λ̄` and the exact `(DP_σ^δ)` check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mwum::Average;
use crate::oracle::context::{SigmaContext, SimplexVertex};

/// Hit counts per vertex; `λ̄(v) = count(v) · mass(v) / rounds`.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedSolution {
    vertices: Vec<SimplexVertex>,
    counts: Vec<u64>,
    rounds: u64,
    sigma: f64,
}

/// One non-zero coordinate of a dual solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaEntry {
    pub s: usize,
    pub a: usize,
    pub t: usize,
    pub value: f64,
}

impl AveragedSolution {
    pub fn new(ctx: &SigmaContext<'_>) -> Self {
        AveragedSolution {
            vertices: ctx.vertices().to_vec(),
            counts: vec![0; ctx.num_vertices()],
            rounds: 0,
            sigma: ctx.sigma(),
        }
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn count(&self, v: &SimplexVertex) -> u64 {
        self.counts[v.id]
    }

    /// Non-zero entries of `λ̄`, in vertex order.
    pub fn lambda(&self) -> Vec<LambdaEntry> {
        if self.rounds == 0 {
            return Vec::new();
        }
        let k = self.rounds as f64;
        self.vertices
            .iter()
            .zip(&self.counts)
            .filter(|(_, &c)| c > 0)
            .map(|(v, &c)| LambdaEntry {
                s: v.s,
                a: v.a,
                t: v.t,
                value: c as f64 * v.mass / k,
            })
            .collect()
    }

    /// `λ̄(s, a, t)`, zero off the support.
    pub fn value_at(&self, s: usize, a: usize, t: usize) -> f64 {
        if self.rounds == 0 {
            return 0.0;
        }
        self.vertices
            .iter()
            .find(|v| v.key() == (s, a, t))
            .map_or(0.0, |v| {
                self.counts[v.id] as f64 * v.mass / self.rounds as f64
            })
    }

    /// `Σ_v r(v) λ̄(v)`; equals σ for any non-empty average.
    pub fn weighted_mass(&self) -> f64 {
        if self.rounds == 0 {
            return 0.0;
        }
        let total: f64 = self
            .vertices
            .iter()
            .zip(&self.counts)
            .map(|(v, &c)| c as f64 * v.mass * v.reward as f64)
            .sum();
        total / self.rounds as f64
    }
}

impl Average<SimplexVertex> for AveragedSolution {
    fn add(&mut self, v: &SimplexVertex) {
        self.counts[v.id] += 1;
        self.rounds += 1;
    }
}

pub fn accumulate(mut avg: AveragedSolution, v: &SimplexVertex) -> AveragedSolution {
    avg.add(v);
    avg
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualVerdict {
    pub pass: bool,
    /// Smallest constraint residual and the `(s, t)` row it belongs to.
    pub worst_residual: f64,
    pub worst_constraint: (usize, usize),
    pub residuals: Vec<f64>,
}

/// Evaluates every row of `(DP_σ^δ)` at `λ`, straight from the instance.
/// Passes iff every residual is at least `-δ - 1e-9`.
pub fn check_dual_feasibility(
    ctx: &SigmaContext<'_>,
    lambda: &[LambdaEntry],
    delta: f64,
) -> Result<DualVerdict> {
    let inst = ctx.instance();
    let sigma = ctx.sigma();
    if let Some(e) = lambda.iter().find(|e| e.value.is_nan() || e.value < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "negative dual entry {} at ({}, {}, {})",
            e.value, e.s, e.a, e.t
        )));
    }
    let on_simplex: f64 = lambda
        .iter()
        .map(|e| e.value * inst.reward(e.t, e.s, e.a) as f64)
        .sum();
    if (on_simplex - sigma).abs() > 1e-9 * sigma.max(1.0) {
        return Err(Error::NotOnSimplex {
            got: on_simplex,
            sigma,
        });
    }
    let s0 = inst.initial_state();
    let residuals: Vec<f64> = ctx
        .constraint_labels()
        .iter()
        .enumerate()
        .map(|(row, &(sr, tr))| {
            if row == 0 {
                let out: f64 = lambda
                    .iter()
                    .filter(|e| e.s == s0 && e.t == 0)
                    .map(|e| e.value)
                    .sum();
                1.0 - out
            } else {
                let out: f64 = lambda
                    .iter()
                    .filter(|e| e.s == sr && e.t == tr)
                    .map(|e| e.value)
                    .sum();
                let inflow: f64 = lambda
                    .iter()
                    .filter(|e| e.t + 1 == tr && inst.next_state(e.t, e.s, e.a) == sr)
                    .map(|e| e.value)
                    .sum();
                inflow - out
            }
        })
        .collect();
    let (worst_row, worst) =
        residuals
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, r)| if r < acc.1 { (i, r) } else { acc },
            );
    Ok(DualVerdict {
        pass: worst >= -delta - 1e-9,
        worst_residual: worst,
        worst_constraint: ctx.constraint_labels()[worst_row],
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_instance, DpInstance, RawInstance};

    fn i1() -> DpInstance {
        validate_instance(&RawInstance::from_table(
            2,
            2,
            2,
            0,
            false,
            &[(0, 1), (1, 2), (1, 1), (0, 2)],
        ))
        .unwrap()
    }

    #[test]
    fn repeated_vertex_gives_that_vertex() {
        let inst = i1();
        let ctx = SigmaContext::new(&inst, 4.0, 4).unwrap();
        let v = ctx.vertex(0, 1, 0).unwrap();
        let mut avg = AveragedSolution::new(&ctx);
        for _ in 0..5 {
            avg = accumulate(avg, &v);
        }
        assert_eq!(
            avg.lambda(),
            vec![LambdaEntry {
                s: 0,
                a: 1,
                t: 0,
                value: 2.0
            }]
        );
        assert!((avg.weighted_mass() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn two_equal_reward_vertices_split_mass() {
        let inst = i1();
        let ctx = SigmaContext::new(&inst, 4.0, 4).unwrap();
        let mut avg = AveragedSolution::new(&ctx);
        avg.add(&ctx.vertex(0, 0, 0).unwrap());
        avg.add(&ctx.vertex(1, 0, 0).unwrap());
        assert_eq!(avg.value_at(0, 0, 0), 2.0);
        assert_eq!(avg.value_at(1, 0, 0), 2.0);
        assert_eq!(avg.count(&ctx.vertex(1, 0, 0).unwrap()), 1);
        assert!((avg.weighted_mass() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_vertex_fails_budget() {
        let inst = i1();
        let ctx = SigmaContext::new(&inst, 4.0, 4).unwrap();
        let lambda = [LambdaEntry {
            s: 0,
            a: 1,
            t: 0,
            value: 2.0,
        }];
        let v = check_dual_feasibility(&ctx, &lambda, 0.25).unwrap();
        assert!(!v.pass);
        assert_eq!(v.residuals[0], -1.0);
        assert_eq!(v.worst_constraint, (0, 0));
    }

    #[test]
    fn optimal_dual_passes_and_off_simplex_errors() {
        let inst = i1();
        let ctx = SigmaContext::new(&inst, 4.0, 4).unwrap();
        // optimal path: (0,a1,0) -> (1,a1,1), one unit of flow
        let opt = [
            LambdaEntry {
                s: 0,
                a: 1,
                t: 0,
                value: 1.0,
            },
            LambdaEntry {
                s: 1,
                a: 1,
                t: 1,
                value: 1.0,
            },
        ];
        let v = check_dual_feasibility(&ctx, &opt, 0.0).unwrap();
        assert!(v.pass);
        assert!(v.residuals.iter().all(|&r| r.abs() < 1e-15));
        let half = [LambdaEntry {
            s: 0,
            a: 1,
            t: 0,
            value: 1.0,
        }];
        assert!(matches!(
            check_dual_feasibility(&ctx, &half, 0.25),
            Err(Error::NotOnSimplex { .. })
        ));
    }
}
