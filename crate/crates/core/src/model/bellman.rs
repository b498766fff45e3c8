//! Exact backward induction. This is the reference every other solver is
//! checked against.

use serde::Serialize;

use super::instance::DpInstance;
use crate::error::{Error, Result};

/// Optimal values `v[s, t]` for `t in 0..=T`, with `v[s, T] = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueTable {
    num_states: usize,
    horizon: usize,
    values: Vec<i64>,
}

impl ValueTable {
    pub fn zeros(num_states: usize, horizon: usize) -> Self {
        ValueTable {
            num_states,
            horizon,
            values: vec![0; num_states * (horizon + 1)],
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    #[inline]
    pub fn get(&self, s: usize, t: usize) -> i64 {
        self.values[t * self.num_states + s]
    }

    #[inline]
    pub fn set(&mut self, s: usize, t: usize, v: i64) {
        self.values[t * self.num_states + s] = v;
    }

    /// Sum over `s` and `t in 0..T` (the LP objective).
    pub fn objective(&self) -> i64 {
        self.values[..self.num_states * self.horizon].iter().sum()
    }

    /// Actions attaining the Bellman maximum at `(s, t)` under this table.
    pub fn maximizers(&self, inst: &DpInstance, s: usize, t: usize) -> Vec<usize> {
        let q: Vec<i64> = (0..inst.num_actions())
            .map(|a| {
                let tr = inst.step(t, s, a);
                tr.reward + self.get(tr.next, t + 1)
            })
            .collect();
        let best = q.iter().copied().max().unwrap_or(i64::MIN);
        (0..q.len()).filter(|&a| q[a] == best).collect()
    }
}

/// A deterministic time-dependent policy, `action(s, t)` for `t in 0..T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    num_states: usize,
    actions: Vec<usize>,
}

impl Policy {
    #[inline]
    pub fn action(&self, s: usize, t: usize) -> usize {
        self.actions[t * self.num_states + s]
    }
}

/// One decision along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub state: usize,
    pub time: usize,
    pub action: usize,
    pub reward: i64,
}

/// The trajectory followed from the initial state, one step per time epoch.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PolicyTrace {
    pub steps: Vec<TraceStep>,
}

impl PolicyTrace {
    /// Cumulative reward as stored in the instance (i.e. shifted).
    pub fn cumulative_reward(&self) -> i64 {
        self.steps.iter().map(|s| s.reward).sum()
    }

    /// Cumulative reward with the instance's uniform shift removed.
    pub fn unshifted_reward(&self, inst: &DpInstance) -> i64 {
        self.cumulative_reward() - inst.reward_shift() * self.steps.len() as i64
    }

    pub fn final_state(&self, inst: &DpInstance) -> Option<usize> {
        self.steps
            .last()
            .map(|st| inst.next_state(st.time, st.state, st.action))
    }
}

/// Follows `policy` from the instance's initial state for the full horizon.
pub fn rollout(inst: &DpInstance, policy: &Policy) -> PolicyTrace {
    let mut s = inst.initial_state();
    let mut steps = Vec::with_capacity(inst.horizon());
    for t in 0..inst.horizon() {
        let a = policy.action(s, t);
        let tr = inst.step(t, s, a);
        steps.push(TraceStep {
            state: s,
            time: t,
            action: a,
            reward: tr.reward,
        });
        s = tr.next;
    }
    PolicyTrace { steps }
}

/// Backward induction from `t = T` down to 0. Ties go to the smallest action.
pub fn bellman_solve(inst: &DpInstance) -> (ValueTable, Policy) {
    let (ns, na, horizon) = (inst.num_states(), inst.num_actions(), inst.horizon());
    let mut table = ValueTable::zeros(ns, horizon);
    let mut actions = vec![0; ns * horizon];
    for t in (0..horizon).rev() {
        for s in 0..ns {
            let mut best = i64::MIN;
            let mut arg = 0;
            for a in 0..na {
                let tr = inst.step(t, s, a);
                let q = tr.reward + table.get(tr.next, t + 1);
                if q > best {
                    best = q;
                    arg = a;
                }
            }
            table.set(s, t, best);
            actions[t * ns + s] = arg;
        }
    }
    (
        table,
        Policy {
            num_states: ns,
            actions,
        },
    )
}

/// All actions attaining the Bellman maximum at `(s, t)`.
pub fn optimal_action_set(inst: &DpInstance, s: usize, t: usize) -> Vec<usize> {
    let (table, _) = bellman_solve(inst);
    table.maximizers(inst, s, t)
}

/// Outcome of [`check_primal_feasibility`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimalVerdict {
    Pass,
    /// `v[s,t] < r + v[a(s), t+1]` for this `(s, t, a)`.
    Violated {
        s: usize,
        t: usize,
        a: usize,
    },
    /// Every constraint at `(s, t)` is slack.
    NotTight {
        s: usize,
        t: usize,
    },
    /// A terminal value `v[s, T]` is not zero.
    TerminalNonZero {
        s: usize,
    },
}

/// Checks the primal LP constraints and that each `(s, t)` has a binding one.
pub fn check_primal_feasibility(inst: &DpInstance, table: &ValueTable) -> Result<PrimalVerdict> {
    if table.num_states() != inst.num_states() {
        return Err(Error::DimensionMismatch {
            expected: inst.num_states(),
            got: table.num_states(),
        });
    }
    if table.horizon() != inst.horizon() {
        return Err(Error::DimensionMismatch {
            expected: inst.horizon(),
            got: table.horizon(),
        });
    }
    let horizon = inst.horizon();
    if let Some(s) = (0..inst.num_states()).find(|&s| table.get(s, horizon) != 0) {
        return Ok(PrimalVerdict::TerminalNonZero { s });
    }
    for t in 0..horizon {
        for s in 0..inst.num_states() {
            let v = table.get(s, t);
            let mut tight = false;
            for a in 0..inst.num_actions() {
                let tr = inst.step(t, s, a);
                let rhs = tr.reward + table.get(tr.next, t + 1);
                if v < rhs {
                    return Ok(PrimalVerdict::Violated { s, t, a });
                }
                tight |= v == rhs;
            }
            if !tight {
                return Ok(PrimalVerdict::NotTight { s, t });
            }
        }
    }
    Ok(PrimalVerdict::Pass)
}

/// Upper bound ρ on the optimal cumulative reward from the initial state.
/// Defaults to `T * ⌈r⌉`.
pub fn compute_rho(inst: &DpInstance, rho_override: Option<i64>) -> Result<u64> {
    match rho_override {
        Some(r) if r < 1 => Err(Error::OverrideTooSmall(r)),
        Some(r) => Ok(r as u64),
        None => Ok(inst.horizon() as u64 * inst.reward_bound() as u64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::instance::{validate_instance, RawInstance};

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

    /// Every time-dependent policy on a small instance, scored by rollout.
    fn enumerate_policies(inst: &DpInstance) -> i64 {
        let cells = inst.num_states() * inst.horizon();
        let na = inst.num_actions();
        let total = na.pow(cells as u32);
        let mut best = i64::MIN;
        for code in 0..total {
            let mut c = code;
            let mut actions = vec![0; cells];
            for slot in actions.iter_mut() {
                *slot = c % na;
                c /= na;
            }
            let policy = Policy {
                num_states: inst.num_states(),
                actions,
            };
            best = best.max(rollout(inst, &policy).cumulative_reward());
        }
        best
    }

    #[test]
    fn i1_values_match_enumeration() {
        let inst = i1();
        assert_eq!(enumerate_policies(&inst), 4);
        let (table, policy) = bellman_solve(&inst);
        assert_eq!(table.get(0, 0), 4);
        assert_eq!(policy.action(0, 0), 1);
        assert_eq!(table.get(0, 1), 2);
        assert_eq!(table.get(1, 1), 2);
    }

    #[test]
    fn i1_optimal_sets() {
        let inst = i1();
        assert_eq!(optimal_action_set(&inst, 0, 0), vec![1]);
        assert_eq!(optimal_action_set(&inst, 1, 1), vec![1]);
    }

    #[test]
    fn unit_rewards_give_remaining_horizon() {
        let inst = validate_instance(&RawInstance::from_table(
            2,
            3,
            3,
            0,
            false,
            &[(1, 1), (0, 1), (1, 1), (0, 1), (0, 1), (1, 1)],
        ))
        .unwrap();
        let (table, _) = bellman_solve(&inst);
        for t in 0..=3 {
            for s in 0..2 {
                assert_eq!(table.get(s, t), 3 - t as i64);
                if t < 3 {
                    assert_eq!(table.maximizers(&inst, s, t), vec![0, 1, 2]);
                }
            }
        }
    }

    #[test]
    fn primal_check_examples() {
        let inst = i1();
        let (table, _) = bellman_solve(&inst);
        assert_eq!(
            check_primal_feasibility(&inst, &table).unwrap(),
            PrimalVerdict::Pass
        );
        let mut low = table.clone();
        low.set(0, 0, 3);
        assert_eq!(
            check_primal_feasibility(&inst, &low).unwrap(),
            PrimalVerdict::Violated { s: 0, t: 0, a: 1 }
        );
        let mut high = table.clone();
        high.set(0, 0, 5);
        assert_eq!(
            check_primal_feasibility(&inst, &high).unwrap(),
            PrimalVerdict::NotTight { s: 0, t: 0 }
        );
        let wrong = ValueTable::zeros(3, 2);
        assert!(matches!(
            check_primal_feasibility(&inst, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rho_defaults_and_overrides() {
        let inst = i1();
        assert_eq!(compute_rho(&inst, None).unwrap(), 4);
        assert_eq!(compute_rho(&inst, Some(4)).unwrap(), 4);
        assert_eq!(compute_rho(&inst, Some(0)), Err(Error::OverrideTooSmall(0)));
    }
}
