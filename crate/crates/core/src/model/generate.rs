//! Seeded instance generators: uniform random kernels and the adversarial
//! twin family (binary-tree fan-out to a row of candidate states, one of which
//! may hide a large reward).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::instance::{validate_instance, DpInstance, RawInstance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomParams {
    pub num_states: usize,
    pub num_actions: usize,
    pub horizon: usize,
    pub reward_max: i64,
    pub time_dependent: bool,
    pub seed: u64,
}

/// Rewards uniform in `1..=reward_max`, next states uniform. Deterministic in
/// the seed. The reward bound is `reward_max`.
pub fn gen_random_instance(params: &RandomParams) -> Result<DpInstance> {
    if params.num_states < 1
        || params.num_actions < 1
        || params.horizon < 1
        || params.reward_max < 1
    {
        return Err(Error::InvalidParameter(format!(
            "random instance needs positive sizes, got {params:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let slices = if params.time_dependent {
        params.horizon
    } else {
        1
    };
    let table: Vec<(i64, i64)> = (0..slices * params.num_states * params.num_actions)
        .map(|_| {
            let next = rng.gen_range(0..params.num_states) as i64;
            let reward = rng.gen_range(1..=params.reward_max);
            (next, reward)
        })
        .collect();
    let raw = RawInstance::from_table(
        params.num_states,
        params.num_actions,
        params.horizon,
        0,
        params.time_dependent,
        &table,
    )
    .with_reward_bound(params.reward_max);
    validate_instance(&raw)
}

/// Sizes of the four state blocks of an adversarial instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdversarialStructure {
    pub tree: usize,
    pub candidates: usize,
    pub sinks: usize,
    pub goal: usize,
    /// Steps from the root to the candidate row.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialPair {
    /// Every candidate state falls into a zero-reward sink.
    pub instance_1: DpInstance,
    /// Same as `instance_1` except at `special_pair`, which reaches the goal
    /// state with reward `T`.
    pub instance_2: DpInstance,
    /// `(state, action)` in global state indices.
    pub special_pair: (usize, usize),
    pub structure: AdversarialStructure,
    /// Action at the root that leads towards the special state.
    pub route_action: usize,
}

pub const ACTION_LEFT: usize = 0;
pub const ACTION_RIGHT: usize = 1;

/// Builds the twin instances.
///
/// State layout: tree nodes first (root = 0 = initial state, level by level
/// from the root), then `n` candidates, `n` sinks and one goal state. Actions
/// 0 and 1 descend the tree; every other action keeps a tree state in place
/// with reward 1. The goal pays 2 per step, so heading for it at once beats
/// idling in the tree first. Raw rewards are 0/1/2/T and get shifted by one
/// during validation.
///
/// The horizon must be at least `depth + 2` so that the detour through the
/// special pair strictly beats staying in the tree.
pub fn gen_adversarial_pair(
    n: usize,
    num_actions: usize,
    horizon: usize,
    seed: u64,
    special: (usize, usize),
) -> Result<AdversarialPair> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    if num_actions < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 actions, got {num_actions}"
        )));
    }
    if special.0 >= n || special.1 >= num_actions {
        return Err(Error::InvalidParameter(format!(
            "special pair {special:?} out of range"
        )));
    }
    // level sizes from the leaves up: b1 = ceil(n/2), b2 = ceil(b1/2), ... 1
    let mut levels = vec![n.div_ceil(2)];
    while *levels.last().unwrap() > 1 {
        let b = levels.last().unwrap().div_ceil(2);
        levels.push(b);
    }
    levels.reverse(); // root level first
    let depth = levels.len();
    if horizon < depth + 2 {
        return Err(Error::HorizonTooShort {
            horizon,
            depth,
            needed: depth + 2,
        });
    }
    let mut level_start = Vec::with_capacity(depth);
    let mut acc = 0;
    for &b in &levels {
        level_start.push(acc);
        acc += b;
    }
    let tree = acc;
    let cand0 = tree;
    let sink0 = tree + n;
    let goal = tree + 2 * n;
    let num_states = goal + 1;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = vec![(0i64, 0i64); num_states * num_actions];
    let mut set = |s: usize, a: usize, next: usize, r: i64| {
        table[s * num_actions + a] = (next as i64, r);
    };
    for (lvl, &b) in levels.iter().enumerate() {
        let (child_start, child_count) = if lvl + 1 < depth {
            (level_start[lvl + 1], levels[lvl + 1])
        } else {
            (cand0, n)
        };
        for k in 0..b {
            let s = level_start[lvl] + k;
            let left = child_start + (2 * k).min(child_count - 1);
            let right = child_start + (2 * k + 1).min(child_count - 1);
            set(s, ACTION_LEFT, left, 0);
            set(s, ACTION_RIGHT, right, 0);
            for a in 2..num_actions {
                set(s, a, s, 1);
            }
        }
    }
    for c in 0..n {
        for a in 0..num_actions {
            let sink = sink0 + rng.gen_range(0..n);
            set(cand0 + c, a, sink, 0);
        }
    }
    for k in 0..n {
        for a in 0..num_actions {
            set(sink0 + k, a, sink0 + k, 0);
        }
    }
    for a in 0..num_actions {
        set(goal, a, goal, 2);
    }

    let horizon_reward = horizon as i64;
    let bound = horizon_reward.max(2);
    let special_state = cand0 + special.0;
    let raw1 = RawInstance::from_table(num_states, num_actions, horizon, 0, false, &table)
        .with_reward_bound(bound);
    let mut table2 = table.clone();
    table2[special_state * num_actions + special.1] = (goal as i64, horizon_reward);
    let raw2 = RawInstance::from_table(num_states, num_actions, horizon, 0, false, &table2)
        .with_reward_bound(bound);

    // walk from the special candidate back up to the root to find the first move
    let mut child = special.0;
    let mut route_action = ACTION_LEFT;
    for _ in 0..depth {
        route_action = if child.is_multiple_of(2) {
            ACTION_LEFT
        } else {
            ACTION_RIGHT
        };
        child /= 2;
    }

    Ok(AdversarialPair {
        instance_1: validate_instance(&raw1)?,
        instance_2: validate_instance(&raw2)?,
        special_pair: (special_state, special.1),
        structure: AdversarialStructure {
            tree,
            candidates: n,
            sinks: n,
            goal: 1,
            depth,
        },
        route_action,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::bellman::{bellman_solve, optimal_action_set};

    fn params(seed: u64, reward_max: i64) -> RandomParams {
        RandomParams {
            num_states: 4,
            num_actions: 2,
            horizon: 3,
            reward_max,
            time_dependent: false,
            seed,
        }
    }

    #[test]
    fn random_generation_is_deterministic() {
        let a = gen_random_instance(&params(7, 2)).unwrap();
        let b = gen_random_instance(&params(7, 2)).unwrap();
        assert_eq!(a, b);
        let c = gen_random_instance(&params(8, 2)).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn unit_reward_max_gives_remaining_horizon() {
        let inst = gen_random_instance(&params(7, 1)).unwrap();
        let (table, _) = bellman_solve(&inst);
        for t in 0..=3 {
            for s in 0..4 {
                assert_eq!(table.get(s, t), 3 - t as i64);
            }
        }
    }

    #[test]
    fn adversarial_pair_separates_optimal_actions() {
        for (n, special) in [(2, (1, 2)), (2, (0, 0)), (5, (3, 1)), (8, (6, 2))] {
            let pair = gen_adversarial_pair(n, 3, 6, 11, special).unwrap();
            let s0 = pair.instance_1.initial_state();
            let opt1 = optimal_action_set(&pair.instance_1, s0, 0);
            assert!(opt1.iter().all(|&a| a != ACTION_LEFT && a != ACTION_RIGHT));
            let opt2 = optimal_action_set(&pair.instance_2, s0, 0);
            assert!(!opt2.is_empty());
            assert!(opt2.iter().all(|&a| a == ACTION_LEFT || a == ACTION_RIGHT));
            assert!(opt2.contains(&pair.route_action));
        }
    }

    #[test]
    fn adversarial_twins_differ_in_one_entry() {
        let pair = gen_adversarial_pair(5, 4, 6, 3, (2, 3)).unwrap();
        let (a, b) = (&pair.instance_1, &pair.instance_2);
        let mut diffs = vec![];
        for s in 0..a.num_states() {
            for act in 0..a.num_actions() {
                if a.step(0, s, act) != b.step(0, s, act) {
                    diffs.push((s, act));
                }
            }
        }
        assert_eq!(diffs, vec![pair.special_pair]);
    }

    #[test]
    fn short_horizon_is_rejected() {
        assert!(matches!(
            gen_adversarial_pair(8, 3, 2, 0, (0, 0)),
            Err(Error::HorizonTooShort { depth: 3, .. })
        ));
    }
}
