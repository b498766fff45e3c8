//! The dual LP at a fixed σ: vertices of the simplex `P_σ`, constraint
//! indexing, the Lagrangian objective `f_{σ,w}` and per-vertex residuals.
//!
//! Constraint 0 is the budget `1 - Σ_a λ(s0, a, 0) >= 0`. The remaining
//! constraints are flow balances `-Σ_a λ(s, a, t) + inflow(s, t) >= 0` for
//! every `(s, t) != (s0, 0)`, ordered by `t` then `s`. Layered instances drop
//! the time index: one flow constraint per state outside the final layer.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::DpInstance;
use crate::mwum::{Chosen, TranscriptPoint};

pub const BUDGET: usize = 0;
const NO_CONSTRAINT: u32 = u32::MAX;

/// Extreme point of `P_σ`: all mass `σ / r(s, a, t)` on one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexVertex {
    /// Position in the context's vertex list.
    #[serde(skip)]
    pub id: usize,
    pub s: usize,
    pub a: usize,
    pub t: usize,
    pub mass: f64,
    #[serde(skip)]
    pub reward: i64,
}

impl SimplexVertex {
    pub fn key(&self) -> (usize, usize, usize) {
        (self.s, self.a, self.t)
    }
}

impl TranscriptPoint for SimplexVertex {
    fn chosen(&self) -> Chosen {
        Chosen::Vertex([self.s, self.a, self.t])
    }
}

/// Hot-loop view of a vertex: `f = w[BUDGET] + mass * (w[succ] - w[own])`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Coefficients {
    pub mass: f64,
    pub own: u32,
    pub succ: u32,
}

#[derive(Debug, Clone)]
pub struct SigmaContext<'a> {
    inst: &'a DpInstance,
    sigma: f64,
    rho: u64,
    layered: bool,
    /// `(s, t)` -> constraint index, laid out `[t][s]` (`[s]` when layered).
    constraint_of: Vec<u32>,
    labels: Vec<(usize, usize)>,
    vertices: Vec<SimplexVertex>,
    coeffs: Vec<Coefficients>,
}

impl<'a> SigmaContext<'a> {
    pub fn new(inst: &'a DpInstance, sigma: f64, rho: u64) -> Result<Self> {
        if !(sigma >= 1.0 && sigma <= rho as f64) {
            return Err(Error::SigmaOutOfRange {
                sigma: sigma.max(0.0) as u64,
                rho,
            });
        }
        let (ns, na, horizon) = (inst.num_states(), inst.num_actions(), inst.horizon());
        let s0 = inst.initial_state();
        let layers = inst.layers();
        let mut labels = vec![(s0, 0)];
        let constraint_of = match layers {
            None => {
                let mut idx = vec![NO_CONSTRAINT; ns * horizon];
                idx[s0] = BUDGET as u32;
                for t in 0..horizon {
                    for s in 0..ns {
                        if (s, t) != (s0, 0) {
                            idx[t * ns + s] = labels.len() as u32;
                            labels.push((s, t));
                        }
                    }
                }
                idx
            }
            Some(layers) => {
                let mut idx = vec![NO_CONSTRAINT; ns];
                idx[s0] = BUDGET as u32;
                for s in 0..ns {
                    if s != s0 && layers[s] < horizon {
                        idx[s] = labels.len() as u32;
                        labels.push((s, layers[s]));
                    }
                }
                idx
            }
        };
        let mut ctx = SigmaContext {
            inst,
            sigma,
            rho,
            layered: layers.is_some(),
            constraint_of,
            labels,
            vertices: Vec::new(),
            coeffs: Vec::new(),
        };
        for s in 0..ns {
            for a in 0..na {
                let times: Vec<usize> = match layers {
                    None => (0..horizon).collect(),
                    Some(l) if l[s] < horizon => vec![l[s]],
                    Some(_) => vec![],
                };
                for t in times {
                    let tr = inst.step(t, s, a);
                    let mass = sigma / tr.reward as f64;
                    let id = ctx.vertices.len();
                    ctx.vertices.push(SimplexVertex {
                        id,
                        s,
                        a,
                        t,
                        mass,
                        reward: tr.reward,
                    });
                    let own = ctx.constraint_index(s, t).expect("vertex has a row");
                    let succ = ctx.constraint_index(tr.next, t + 1);
                    ctx.coeffs.push(Coefficients {
                        mass,
                        own: own as u32,
                        succ: succ.map_or(NO_CONSTRAINT, |c| c as u32),
                    });
                }
            }
        }
        Ok(ctx)
    }

    pub fn instance(&self) -> &'a DpInstance {
        self.inst
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rho(&self) -> u64 {
        self.rho
    }

    /// Width bound on residuals, `ℓ = 2σ`.
    pub fn ell(&self) -> f64 {
        2.0 * self.sigma
    }

    pub fn is_layered(&self) -> bool {
        self.layered
    }

    pub fn num_constraints(&self) -> usize {
        self.labels.len()
    }

    /// `(s, t)` of each constraint; index 0 is the budget row at `(s0, 0)`.
    pub fn constraint_labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    /// Row for state `s` at time `t`, if one exists (`t < T`, and in layered
    /// mode `t` must be the state's layer).
    pub fn constraint_index(&self, s: usize, t: usize) -> Option<usize> {
        let horizon = self.inst.horizon();
        if t >= horizon {
            return None;
        }
        let raw = if self.layered {
            if self.inst.layer_of(s) != Some(t) {
                return None;
            }
            self.constraint_of[s]
        } else {
            self.constraint_of[t * self.inst.num_states() + s]
        };
        (raw != NO_CONSTRAINT).then_some(raw as usize)
    }

    pub fn vertices(&self) -> &[SimplexVertex] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, s: usize, a: usize, t: usize) -> Option<SimplexVertex> {
        self.vertices.iter().copied().find(|v| v.key() == (s, a, t))
    }

    pub(crate) fn coefficients(&self) -> &[Coefficients] {
        &self.coeffs
    }

    fn is_budget_vertex(&self, v: &SimplexVertex) -> bool {
        v.s == self.inst.initial_state() && v.t == 0
    }
}

/// `f_{σ,w}` at a vertex, read straight off the instance:
///
/// * away from `(s0, 0)`: `w[b] - (σ/r) w[s,t] + (σ/r) w[a(s), t+1]`
/// * at `(s0, 0)`: `w[b] (1 - σ/r) + (σ/r) w[a(s0), 1]`
///
/// The successor term is present only when `(a(s), t+1)` has a row.
pub fn eval_f(ctx: &SigmaContext<'_>, w: &[f64], v: &SimplexVertex) -> Result<f64> {
    check_weights(ctx, w)?;
    let inst = ctx.instance();
    let tr = inst.step(v.t, v.s, v.a);
    let ratio = ctx.sigma() / tr.reward as f64;
    let successor = ctx
        .constraint_index(tr.next, v.t + 1)
        .map_or(0.0, |c| ratio * w[c]);
    let base = if ctx.is_budget_vertex(v) {
        w[BUDGET] * (1.0 - ratio)
    } else {
        let own = ctx
            .constraint_index(v.s, v.t)
            .ok_or_else(|| Error::InvalidParameter(format!("vertex {:?} has no row", v.key())))?;
        w[BUDGET] - ratio * w[own]
    };
    Ok(base + successor)
}

pub(crate) fn check_weights(ctx: &SigmaContext<'_>, w: &[f64]) -> Result<()> {
    if w.len() != ctx.num_constraints() {
        return Err(Error::DimensionMismatch {
            expected: ctx.num_constraints(),
            got: w.len(),
        });
    }
    if let Some((index, &value)) = w.iter().enumerate().find(|(_, &x)| x.is_nan() || x < 0.0) {
        return Err(Error::NegativeWeight { index, value });
    }
    Ok(())
}

/// Non-zero entries of `A λ_v - b` for the vertex solution `λ_v`.
///
/// The budget row is `1 - mass` at `(s0, 0)` and `1` elsewhere; the vertex's
/// own flow row gets `-mass`; its successor's row gets `+mass`.
pub fn residuals(ctx: &SigmaContext<'_>, v: &SimplexVertex) -> Result<Vec<(usize, f64)>> {
    let inst = ctx.instance();
    let mass = ctx.sigma() / inst.reward(v.t, v.s, v.a) as f64;
    let mut out = Vec::with_capacity(3);
    if ctx.is_budget_vertex(v) {
        out.push((BUDGET, 1.0 - mass));
    } else {
        out.push((BUDGET, 1.0));
        let own = ctx
            .constraint_index(v.s, v.t)
            .ok_or_else(|| Error::InvalidParameter(format!("vertex {:?} has no row", v.key())))?;
        out.push((own, -mass));
    }
    if let Some(c) = ctx.constraint_index(inst.next_state(v.t, v.s, v.a), v.t + 1) {
        out.push((c, mass));
    }
    let ell = ctx.ell();
    for &(index, value) in &out {
        if value.abs() > ell {
            return Err(Error::ResidualExceedsEll { index, value, ell });
        }
    }
    Ok(out)
}
