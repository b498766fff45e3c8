//! Held–Karp style encoding of the travelling salesperson problem as a
//! layered DP, plus the inverse decoding and a permutation brute force.
//!
//! Vertices are numbered `1..=n` in the public API and stored 0-based. The
//! tour starts at vertex 1. A state `(H, i)` holds the set `H` of vertices
//! still to be placed and the current vertex `i ∈ H`; it sits in layer
//! `n - |H|`. Action `j` moves `(H, i)` to `(H \ {i}, j)` with reward
//! `⌈c⌉ + 1 - c[j][i]` when `j ∈ H \ {i}`; from `({i}, i)` action 1 closes the
//! tour with reward `⌈c⌉ + 1 - c[1][i]`. Every other move goes to a padding
//! state in the next layer with reward 0. Validation then shifts all rewards
//! by `Δ = 1`.
//!
//! Following the trace backwards gives the tour `1, i_{n-1}, ..., i_1, 1`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_instance, DpInstance, PolicyTrace, RawInstance};
use crate::parallel;

pub const TSP_SCHEMA: &str = "tsp/1";
pub const TSP_BRUTE_FORCE_MAX: usize = 10;
pub const TSP_ENCODE_MAX: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TspGraph {
    #[serde(default)]
    pub schema: Option<String>,
    pub n: usize,
    pub cost_bound: i64,
    /// `costs[i][j]`: cost of travelling from vertex `i + 1` to `j + 1`.
    pub costs: Vec<Vec<i64>>,
}

impl TspGraph {
    pub fn new(costs: Vec<Vec<i64>>, cost_bound: i64) -> Result<Self> {
        let g = TspGraph {
            schema: Some(TSP_SCHEMA.to_string()),
            n: costs.len(),
            cost_bound,
            costs,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: TspGraph = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(schema) = &self.schema {
            if schema != TSP_SCHEMA {
                return Err(Error::Parse(format!("unknown schema {schema:?}")));
            }
        }
        if self.cost_bound < 1 {
            return Err(Error::InvalidParameter(format!(
                "cost bound must be positive, got {}",
                self.cost_bound
            )));
        }
        if self.costs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: self.costs.len(),
            });
        }
        for (i, row) in self.costs.iter().enumerate() {
            if row.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: row.len(),
                });
            }
            for (j, &c) in row.iter().enumerate() {
                if i != j && !(0..=self.cost_bound).contains(&c) {
                    return Err(Error::InvalidParameter(format!(
                        "cost {c} from {} to {} outside [0, {}]",
                        i + 1,
                        j + 1,
                        self.cost_bound
                    )));
                }
            }
        }
        Ok(())
    }

    /// Cost from vertex `i` to vertex `j`, both 1-based.
    pub fn cost(&self, i: usize, j: usize) -> i64 {
        self.costs[i - 1][j - 1]
    }

    /// Sum of edge costs along a closed tour given as 1-based vertices.
    pub fn tour_cost(&self, tour: &[usize]) -> i64 {
        tour.windows(2).map(|e| self.cost(e[0], e[1])).sum()
    }
}

/// Random graph with costs uniform in `0..=cost_bound`.
#[allow(clippy::needless_range_loop)]
pub fn gen_tsp_graph(n: usize, cost_bound: i64, symmetric: bool, seed: u64) -> Result<TspGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut costs = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || (symmetric && j < i) {
                continue;
            }
            let c = rng.gen_range(0..=cost_bound);
            costs[i][j] = c;
            if symmetric {
                costs[j][i] = c;
            }
        }
    }
    TspGraph::new(costs, cost_bound)
}

/// What an encoded state stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TspState {
    /// Remaining set `H` as a bitmask over 0-based vertices, and the current
    /// vertex (0-based).
    Partial { remaining: u32, current: usize },
    /// Padding state reached by an invalid move.
    Padding { layer: usize },
    /// Reached after closing the tour.
    Closed,
}

#[derive(Debug, Clone)]
pub struct TspEncoding {
    pub instance: DpInstance,
    /// Meaning of each state index.
    pub states: Vec<TspState>,
    pub n: usize,
    pub cost_bound: i64,
}

impl TspEncoding {
    /// `v*(initial) = n (⌈c⌉ + 1 + Δ) - optimal tour cost`.
    pub fn value_offset(&self) -> i64 {
        self.n as i64 * (self.cost_bound + 1 + self.instance.reward_shift())
    }
}

pub fn encode_tsp(g: &TspGraph) -> Result<TspEncoding> {
    g.validate()?;
    let n = g.n;
    if n < 3 {
        return Err(Error::GraphTooSmall(n));
    }
    if n > TSP_ENCODE_MAX {
        return Err(Error::TooLarge(format!("{n} vertices")));
    }
    let full: u32 = (1u32 << n) - 1;
    let mut states = vec![TspState::Partial {
        remaining: full,
        current: 0,
    }];
    let mut index: HashMap<(u32, usize), usize> = HashMap::new();
    index.insert((full, 0), 0);
    let mut layer_of = vec![0usize];
    // breadth-first over layers keeps state ids grouped by layer
    let mut frontier = vec![0usize];
    for layer in 1..n {
        let mut next = Vec::new();
        for &id in &frontier {
            if let TspState::Partial { remaining, current } = states[id] {
                let rest = remaining & !(1 << current);
                for j in 0..n {
                    if rest & (1 << j) != 0 && !index.contains_key(&(rest, j)) {
                        index.insert((rest, j), states.len());
                        next.push(states.len());
                        states.push(TspState::Partial {
                            remaining: rest,
                            current: j,
                        });
                        layer_of.push(layer);
                    }
                }
            }
        }
        frontier = next;
    }
    let padding0 = states.len();
    for layer in 1..=n {
        states.push(TspState::Padding { layer });
        layer_of.push(layer);
    }
    let closed = states.len();
    states.push(TspState::Closed);
    layer_of.push(n);
    let padding = |layer: usize| padding0 + layer - 1;

    let top = g.cost_bound + 1;
    let mut table = vec![(0i64, 0i64); states.len() * n];
    for (id, state) in states.iter().enumerate() {
        for a in 0..n {
            let (next, reward) = match *state {
                TspState::Partial { remaining, current } => {
                    let layer = layer_of[id];
                    let rest = remaining & !(1 << current);
                    if rest == 0 {
                        if a == 0 {
                            (closed, top - g.costs[0][current])
                        } else {
                            (padding(layer + 1), 0)
                        }
                    } else if rest & (1 << a) != 0 {
                        (index[&(rest, a)], top - g.costs[a][current])
                    } else {
                        (padding(layer + 1), 0)
                    }
                }
                TspState::Padding { layer } if layer < n => (padding(layer + 1), 0),
                TspState::Padding { .. } | TspState::Closed => (id, 0),
            };
            table[id * n + a] = (next as i64, reward);
        }
    }
    let raw = RawInstance::from_table(states.len(), n, n, 0, false, &table)
        .with_layers(layer_of)
        .with_reward_bound(top);
    Ok(TspEncoding {
        instance: validate_instance(&raw)?,
        states,
        n,
        cost_bound: g.cost_bound,
    })
}

/// Recovers the tour (1-based, starting and ending at 1) and its cost.
pub fn decode_tsp(
    trace: &PolicyTrace,
    enc: &TspEncoding,
    g: &TspGraph,
) -> Result<(Vec<usize>, i64)> {
    let n = enc.n;
    if trace.steps.len() != n {
        return Err(Error::TraceMismatch(format!(
            "expected {n} steps, got {}",
            trace.steps.len()
        )));
    }
    let mut visited = Vec::with_capacity(n);
    for step in &trace.steps {
        match enc.states.get(step.state) {
            Some(TspState::Partial { current, .. }) => visited.push(*current),
            Some(other) => {
                return Err(Error::NotHamiltonian(format!(
                    "trace passes through {other:?} at time {}",
                    step.time
                )))
            }
            None => {
                return Err(Error::TraceMismatch(format!(
                    "unknown state {}",
                    step.state
                )))
            }
        }
    }
    let last = trace.steps.last().expect("n >= 3 steps");
    let end = enc.instance.next_state(last.time, last.state, last.action);
    if enc.states[end] != TspState::Closed {
        return Err(Error::NotHamiltonian(format!(
            "trace ends in {:?}",
            enc.states[end]
        )));
    }
    let mut seen = vec![false; n];
    for &v in &visited {
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::NotHamiltonian(format!(
                "vertex {} visited twice",
                v + 1
            )));
        }
    }
    let mut tour = Vec::with_capacity(n + 1);
    tour.push(1);
    tour.extend(visited.iter().skip(1).rev().map(|v| v + 1));
    tour.push(1);
    let cost = g.tour_cost(&tour);
    let by_value = enc.value_offset() - trace.cumulative_reward();
    if cost != by_value {
        return Err(Error::TraceMismatch(format!(
            "edge sum {cost} disagrees with reward identity {by_value}"
        )));
    }
    Ok((tour, cost))
}

fn nth_permutation(mut k: u64, items: &mut Vec<usize>) -> Vec<usize> {
    let mut out = Vec::with_capacity(items.len());
    let mut fact: u64 = (1..items.len() as u64).product();
    while !items.is_empty() {
        let idx = (k / fact) as usize;
        k %= fact;
        out.push(items.remove(idx));
        if !items.is_empty() {
            fact /= items.len() as u64;
        }
    }
    out
}

/// Minimum tour cost over all `(n-1)!` orders of the vertices after 1.
pub fn brute_force_tsp(g: &TspGraph) -> Result<i64> {
    g.validate()?;
    let n = g.n;
    if n > TSP_BRUTE_FORCE_MAX {
        return Err(Error::TooLarge(format!(
            "{n} vertices exceeds brute-force limit {TSP_BRUTE_FORCE_MAX}"
        )));
    }
    if n < 2 {
        return Err(Error::GraphTooSmall(n));
    }
    let count: u64 = (1..n as u64).product();
    parallel::min(count, |k| {
        let order = nth_permutation(k, &mut (1..n).collect());
        let mut cost = g.costs[0][order[0]] + g.costs[order[n - 2]][0];
        for w in order.windows(2) {
            cost += g.costs[w[0]][w[1]];
        }
        Some(cost)
    })
    .ok_or(Error::GraphTooSmall(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{bellman_solve, rollout};

    fn g3() -> TspGraph {
        TspGraph::new(vec![vec![0, 1, 2], vec![1, 0, 3], vec![2, 3, 0]], 3).unwrap()
    }

    #[test]
    fn g3_layout_and_rewards() {
        let enc = encode_tsp(&g3()).unwrap();
        let inst = &enc.instance;
        assert!(inst.is_layered());
        assert_eq!(inst.layer_of(0), Some(0));
        assert_eq!(inst.horizon(), 3);
        assert_eq!(inst.reward_shift(), 1);
        // (V,1) --2--> ({2,3},2) uses edge 2->1 of cost 1: raw reward 3
        let tr = inst.step(0, 0, 1);
        assert_eq!(
            enc.states[tr.next],
            TspState::Partial {
                remaining: 0b110,
                current: 1
            }
        );
        assert_eq!(tr.reward - inst.reward_shift(), 3);
    }

    #[test]
    fn g3_optimum() {
        let g = g3();
        let enc = encode_tsp(&g).unwrap();
        let (table, policy) = bellman_solve(&enc.instance);
        let trace = rollout(&enc.instance, &policy);
        let (tour, cost) = decode_tsp(&trace, &enc, &g).unwrap();
        assert_eq!(cost, 6);
        assert!(tour == vec![1, 2, 3, 1] || tour == vec![1, 3, 2, 1]);
        assert_eq!(table.get(0, 0), enc.value_offset() - 6);
        assert_eq!(brute_force_tsp(&g).unwrap(), 6);
    }

    #[test]
    fn brute_force_examples() {
        let ones = TspGraph::new(vec![vec![1; 4]; 4], 1).unwrap();
        assert_eq!(brute_force_tsp(&ones).unwrap(), 4);
        // directed: 1->2->3->1 costs 3, the reverse costs 15
        let g = TspGraph::new(vec![vec![0, 1, 5], vec![5, 0, 1], vec![1, 5, 0]], 5).unwrap();
        assert_eq!(brute_force_tsp(&g).unwrap(), 3);
        let big = gen_tsp_graph(11, 2, true, 1).unwrap();
        assert!(matches!(brute_force_tsp(&big), Err(Error::TooLarge(_))));
    }

    #[test]
    fn small_graph_is_rejected() {
        let g = TspGraph::new(vec![vec![0, 1], vec![1, 0]], 1).unwrap();
        assert!(matches!(encode_tsp(&g), Err(Error::GraphTooSmall(2))));
    }

    #[test]
    fn invalid_move_is_not_hamiltonian() {
        let g = g3();
        let enc = encode_tsp(&g).unwrap();
        // action 0 at the start revisits vertex 1
        let inst = &enc.instance;
        let mut s = 0;
        let mut steps = vec![];
        for t in 0..3 {
            let tr = inst.step(t, s, 0);
            steps.push(crate::model::TraceStep {
                state: s,
                time: t,
                action: 0,
                reward: tr.reward,
            });
            s = tr.next;
        }
        let trace = PolicyTrace { steps };
        assert!(matches!(
            decode_tsp(&trace, &enc, &g),
            Err(Error::NotHamiltonian(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = gen_tsp_graph(5, 4, false, 9).unwrap();
        assert_eq!(TspGraph::from_json(&g.to_json()).unwrap(), g);
        assert!(TspGraph::from_json(r#"{"n":3,"cost_bound":1,"costs":[[0,1],[1,0]]}"#).is_err());
    }
}
