//! Minimum set cover as a layered DP.
//!
//! State `(t, U)` means sets `0..t` have been decided and `U` is the part of
//! the universe still uncovered. At `t < m`, action 0 skips set `t` (reward 1)
//! and action 1 takes it (reward 0). At `t = m` both actions move to a
//! terminus with reward `m + 1` if `U` is empty and 0 otherwise. Validation
//! shifts every reward by `Δ = 1`. Which sets were taken is read back from the
//! action sequence.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_instance, DpInstance, PolicyTrace, RawInstance};
use crate::parallel;

pub const MSC_SCHEMA: &str = "msc/1";
pub const MSC_BRUTE_FORCE_MAX: usize = 20;
pub const MSC_UNIVERSE_MAX: usize = 24;
pub const ACTION_SKIP: usize = 0;
pub const ACTION_TAKE: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MscInstance {
    #[serde(default)]
    pub schema: Option<String>,
    pub universe_size: usize,
    /// Subsets of `{1, ..., universe_size}`.
    pub sets: Vec<Vec<usize>>,
}

impl MscInstance {
    pub fn new(universe_size: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let inst = MscInstance {
            schema: Some(MSC_SCHEMA.to_string()),
            universe_size,
            sets,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: MscInstance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(schema) = &self.schema {
            if schema != MSC_SCHEMA {
                return Err(Error::Parse(format!("unknown schema {schema:?}")));
            }
        }
        if self.sets.is_empty() {
            return Err(Error::InvalidParameter("need at least one set".into()));
        }
        if self.universe_size > MSC_UNIVERSE_MAX {
            return Err(Error::TooLarge(format!(
                "universe of {} exceeds {MSC_UNIVERSE_MAX}",
                self.universe_size
            )));
        }
        for (k, set) in self.sets.iter().enumerate() {
            if let Some(&e) = set.iter().find(|&&e| e < 1 || e > self.universe_size) {
                return Err(Error::InvalidParameter(format!(
                    "set {k} has element {e} outside 1..={}",
                    self.universe_size
                )));
            }
        }
        Ok(())
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn universe_mask(&self) -> u32 {
        ((1u64 << self.universe_size) - 1) as u32
    }

    pub fn set_mask(&self, k: usize) -> u32 {
        self.sets[k].iter().fold(0, |m, &e| m | 1 << (e - 1))
    }

    /// Whether the chosen sets cover the universe.
    pub fn covers(&self, chosen: &[usize]) -> bool {
        chosen.iter().fold(0, |m, &k| m | self.set_mask(k)) == self.universe_mask()
    }
}

/// Random family: each element joins each set with probability `density`.
pub fn gen_msc_instance(
    universe_size: usize,
    num_sets: usize,
    density: f64,
    seed: u64,
) -> Result<MscInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = (0..num_sets)
        .map(|_| {
            (1..=universe_size)
                .filter(|_| rng.gen_bool(density))
                .collect()
        })
        .collect();
    MscInstance::new(universe_size, sets)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MscState {
    Deciding { t: usize, uncovered: u32 },
    Terminus,
}

#[derive(Debug, Clone)]
pub struct MscEncoding {
    pub instance: DpInstance,
    pub states: Vec<MscState>,
    pub num_sets: usize,
}

pub fn encode_msc(inst: &MscInstance) -> Result<MscEncoding> {
    inst.validate()?;
    let m = inst.num_sets();
    let mut states = vec![MscState::Deciding {
        t: 0,
        uncovered: inst.universe_mask(),
    }];
    let mut layer_of = vec![0usize];
    let mut index: HashMap<(usize, u32), usize> = HashMap::new();
    index.insert((0, inst.universe_mask()), 0);
    let mut frontier = vec![0usize];
    for t in 0..m {
        let mask = inst.set_mask(t);
        let mut next = Vec::new();
        for &id in &frontier {
            let MscState::Deciding { uncovered, .. } = states[id] else {
                unreachable!("frontier holds deciding states")
            };
            for u in [uncovered, uncovered & !mask] {
                if let Entry::Vacant(slot) = index.entry((t + 1, u)) {
                    slot.insert(states.len());
                    next.push(states.len());
                    states.push(MscState::Deciding {
                        t: t + 1,
                        uncovered: u,
                    });
                    layer_of.push(t + 1);
                }
            }
        }
        frontier = next;
    }
    let terminus = states.len();
    states.push(MscState::Terminus);
    layer_of.push(m + 1);

    let cover_reward = m as i64 + 1;
    let mut table = vec![(0i64, 0i64); states.len() * 2];
    for (id, state) in states.iter().enumerate() {
        for a in [ACTION_SKIP, ACTION_TAKE] {
            let (next, reward) = match *state {
                MscState::Deciding { t, uncovered } if t < m => {
                    if a == ACTION_SKIP {
                        (index[&(t + 1, uncovered)], 1)
                    } else {
                        (index[&(t + 1, uncovered & !inst.set_mask(t))], 0)
                    }
                }
                MscState::Deciding { uncovered, .. } => {
                    (terminus, if uncovered == 0 { cover_reward } else { 0 })
                }
                MscState::Terminus => (terminus, 0),
            };
            table[id * 2 + a] = (next as i64, reward);
        }
    }
    let raw = RawInstance::from_table(states.len(), 2, m + 1, 0, false, &table)
        .with_layers(layer_of)
        .with_reward_bound(cover_reward);
    Ok(MscEncoding {
        instance: validate_instance(&raw)?,
        states,
        num_sets: m,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MscSolution {
    /// 0-based indices of the chosen sets.
    Cover {
        sets: Vec<usize>,
        size: usize,
    },
    NoCover,
}

pub fn decode_msc(
    trace: &PolicyTrace,
    enc: &MscEncoding,
    inst: &MscInstance,
) -> Result<MscSolution> {
    let m = enc.num_sets;
    if trace.steps.len() != m + 1 {
        return Err(Error::TraceMismatch(format!(
            "expected {} steps, got {}",
            m + 1,
            trace.steps.len()
        )));
    }
    let shift = enc.instance.reward_shift();
    let mut chosen = Vec::new();
    let mut skipped = 0;
    for step in &trace.steps[..m] {
        match enc.states.get(step.state) {
            Some(MscState::Deciding { t, .. }) if *t == step.time => {}
            _ => {
                return Err(Error::TraceMismatch(format!(
                    "state {} at time {} is not a decision state",
                    step.state, step.time
                )))
            }
        }
        match (step.action, step.reward - shift) {
            (ACTION_SKIP, 1) => skipped += 1,
            (ACTION_TAKE, 0) => chosen.push(step.time),
            (a, r) => {
                return Err(Error::TraceMismatch(format!(
                    "action {a} with reward {r} at time {}",
                    step.time
                )))
            }
        }
    }
    let last = trace.steps[m].reward - shift;
    let covered = inst.covers(&chosen);
    match last {
        r if r == m as i64 + 1 && covered => Ok(MscSolution::Cover {
            size: m - skipped,
            sets: chosen,
        }),
        0 if !covered => Ok(MscSolution::NoCover),
        r => Err(Error::TraceMismatch(format!(
            "terminal reward {r} but cover check says {covered}"
        ))),
    }
}

/// Smallest cover size over all `2^m` subfamilies, or `None` if none covers.
pub fn brute_force_msc(inst: &MscInstance) -> Result<Option<usize>> {
    inst.validate()?;
    let m = inst.num_sets();
    if m > MSC_BRUTE_FORCE_MAX {
        return Err(Error::TooLarge(format!(
            "{m} sets exceeds brute-force limit {MSC_BRUTE_FORCE_MAX}"
        )));
    }
    let masks: Vec<u32> = (0..m).map(|k| inst.set_mask(k)).collect();
    let full = inst.universe_mask();
    Ok(parallel::min(1u64 << m, |pick| {
        let union = (0..m)
            .filter(|k| pick >> k & 1 == 1)
            .fold(0, |u, k| u | masks[k]);
        (union == full).then_some(pick.count_ones() as usize)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{bellman_solve, rollout};

    fn u3() -> MscInstance {
        MscInstance::new(3, vec![vec![1, 2], vec![2, 3], vec![3]]).unwrap()
    }

    fn solve(inst: &MscInstance) -> MscSolution {
        let enc = encode_msc(inst).unwrap();
        let (_, policy) = bellman_solve(&enc.instance);
        decode_msc(&rollout(&enc.instance, &policy), &enc, inst).unwrap()
    }

    #[test]
    fn u3_minimum_cover() {
        // {1,2} with either {2,3} or {3} covers; ties prefer skipping a set
        let inst = u3();
        assert_eq!(
            solve(&inst),
            MscSolution::Cover {
                sets: vec![0, 2],
                size: 2
            }
        );
        assert!(inst.covers(&[0, 1]));
        assert_eq!(brute_force_msc(&inst).unwrap(), Some(2));
        let enc = encode_msc(&inst).unwrap();
        assert!(enc.instance.is_layered());
        assert_eq!(enc.instance.horizon(), 4);
        assert_eq!(enc.instance.reward_shift(), 1);
    }

    #[test]
    fn degenerate_families() {
        let empty = MscInstance::new(2, vec![vec![]]).unwrap();
        assert_eq!(solve(&empty), MscSolution::NoCover);
        assert_eq!(brute_force_msc(&empty).unwrap(), None);
        let whole = MscInstance::new(3, vec![vec![1, 2, 3]]).unwrap();
        assert_eq!(
            solve(&whole),
            MscSolution::Cover {
                sets: vec![0],
                size: 1
            }
        );
        assert_eq!(brute_force_msc(&whole).unwrap(), Some(1));
    }

    #[test]
    fn all_skip_trace_is_not_a_cover() {
        let inst = u3();
        let enc = encode_msc(&inst).unwrap();
        let mut s = 0;
        let mut steps = vec![];
        for t in 0..4 {
            let tr = enc.instance.step(t, s, ACTION_SKIP);
            steps.push(crate::model::TraceStep {
                state: s,
                time: t,
                action: ACTION_SKIP,
                reward: tr.reward,
            });
            s = tr.next;
        }
        let trace = PolicyTrace { steps };
        assert_eq!(
            decode_msc(&trace, &enc, &inst).unwrap(),
            MscSolution::NoCover
        );
        let (table, _) = bellman_solve(&enc.instance);
        assert!(trace.cumulative_reward() < table.get(0, 0));
    }

    #[test]
    fn bad_element_is_rejected() {
        assert!(MscInstance::new(2, vec![vec![3]]).is_err());
        assert!(MscInstance::new(2, vec![]).is_err());
        assert!(MscInstance::from_json(r#"{"universe_size":2,"sets":[[1],[2]]}"#).is_ok());
    }
}
