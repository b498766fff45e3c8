//! Finite-horizon deterministic DP instances and the `dp-instance/1` file format.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const INSTANCE_SCHEMA: &str = "dp-instance/1";

/// One entry of the transition kernel: taking an action moves to `next` and
/// collects `reward`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub next: usize,
    pub reward: i64,
}

/// Instance as read from (or written to) disk, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub num_states: i64,
    pub num_actions: i64,
    pub horizon: i64,
    pub initial_state: i64,
    pub time_dependent: bool,
    #[serde(default)]
    pub layered: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer_of: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward_shift: Option<i64>,
    /// `[T][S][A]` of `[next, reward]` when time dependent, `[S][A]` otherwise.
    pub transitions: serde_json::Value,
}

impl RawInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builds a raw instance from a flat table in `[t][s][a]` (or `[s][a]`) order.
    pub fn from_table(
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        initial_state: usize,
        time_dependent: bool,
        table: &[(i64, i64)],
    ) -> Self {
        let per_t: Vec<Vec<[i64; 2]>> = table
            .chunks(num_actions.max(1))
            .map(|row| row.iter().map(|&(n, r)| [n, r]).collect())
            .collect();
        let transitions = if time_dependent {
            let layers: Vec<Vec<Vec<[i64; 2]>>> = per_t
                .chunks(num_states.max(1))
                .map(|c| c.to_vec())
                .collect();
            serde_json::to_value(layers)
        } else {
            serde_json::to_value(per_t)
        }
        .expect("integer tables always serialize");
        RawInstance {
            schema: Some(INSTANCE_SCHEMA.to_string()),
            num_states: num_states as i64,
            num_actions: num_actions as i64,
            horizon: horizon as i64,
            initial_state: initial_state as i64,
            time_dependent,
            layered: false,
            layer_of: None,
            reward_bound: None,
            reward_shift: None,
            transitions,
        }
    }

    pub fn with_layers(mut self, layer_of: Vec<usize>) -> Self {
        self.layered = true;
        self.layer_of = Some(layer_of.into_iter().map(|l| l as i64).collect());
        self
    }

    pub fn with_reward_bound(mut self, bound: i64) -> Self {
        self.reward_bound = Some(bound);
        self
    }
}

/// A validated DP instance. Immutable; every reward lies in `1..=reward_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct DpInstance {
    num_states: usize,
    num_actions: usize,
    horizon: usize,
    initial_state: usize,
    time_dependent: bool,
    transitions: Vec<Transition>,
    reward_bound: i64,
    layer_of: Option<Vec<usize>>,
    reward_shift: i64,
}

fn shape_err(msg: impl Into<String>) -> Error {
    Error::TransitionShape(msg.into())
}

fn parse_table(raw: &RawInstance, s: usize, a: usize, t: usize) -> Result<Vec<(i64, i64)>> {
    let layers: Vec<Vec<Vec<[i64; 2]>>> = if raw.time_dependent {
        serde_json::from_value(raw.transitions.clone())
            .map_err(|e| shape_err(format!("expected [T][S][A] of [next, reward]: {e}")))?
    } else {
        let one: Vec<Vec<[i64; 2]>> = serde_json::from_value(raw.transitions.clone())
            .map_err(|e| shape_err(format!("expected [S][A] of [next, reward]: {e}")))?;
        vec![one]
    };
    let expected_t = if raw.time_dependent { t } else { 1 };
    if layers.len() != expected_t {
        return Err(shape_err(format!(
            "expected {expected_t} time slices, got {}",
            layers.len()
        )));
    }
    let mut flat = Vec::with_capacity(expected_t * s * a);
    for (ti, layer) in layers.iter().enumerate() {
        if layer.len() != s {
            return Err(shape_err(format!(
                "time slice {ti} has {} states, expected {s}",
                layer.len()
            )));
        }
        for (si, row) in layer.iter().enumerate() {
            if row.len() != a {
                return Err(shape_err(format!(
                    "state {si} at slice {ti} has {} actions, expected {a}",
                    row.len()
                )));
            }
            flat.extend(row.iter().map(|&[n, r]| (n, r)));
        }
    }
    Ok(flat)
}

/// Checks a raw instance and returns the validated form.
///
/// Rewards below 1 trigger a uniform shift `Δ = 1 - min_reward`, which is
/// recorded in [`DpInstance::reward_shift`] and added to the reward bound.
pub fn validate_instance(raw: &RawInstance) -> Result<DpInstance> {
    if let Some(schema) = &raw.schema {
        if schema != INSTANCE_SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {schema:?}")));
        }
    }
    if raw.horizon < 1 {
        return Err(Error::NonPositiveHorizon);
    }
    if raw.num_states < 1 {
        return Err(Error::EmptyStateSet);
    }
    if raw.num_actions < 1 {
        return Err(Error::EmptyActionSet);
    }
    let (s, a, t) = (
        raw.num_states as usize,
        raw.num_actions as usize,
        raw.horizon as usize,
    );
    if raw.initial_state < 0 || raw.initial_state as usize >= s {
        return Err(Error::InitialStateOutOfRange(
            raw.initial_state.max(0) as usize
        ));
    }
    let table = parse_table(raw, s, a, t)?;
    let slices = if raw.time_dependent { t } else { 1 };
    for (idx, &(next, _)) in table.iter().enumerate() {
        if next < 0 || next as usize >= s {
            let (ti, rest) = (idx / (s * a), idx % (s * a));
            return Err(Error::DanglingStateIndex {
                t: ti,
                s: rest / a,
                a: rest % a,
                next: next.max(0) as usize,
                num_states: s,
            });
        }
    }
    debug_assert_eq!(table.len(), slices * s * a);

    let min_reward = table.iter().map(|&(_, r)| r).min().unwrap_or(1);
    let shift = if min_reward < 1 { 1 - min_reward } else { 0 };
    let transitions: Vec<Transition> = table
        .iter()
        .map(|&(n, r)| Transition {
            next: n as usize,
            reward: r + shift,
        })
        .collect();
    let max_reward = transitions.iter().map(|tr| tr.reward).max().unwrap_or(1);
    let reward_bound = match raw.reward_bound {
        Some(b) => {
            let b = b + shift;
            if b < max_reward {
                return Err(Error::RewardAboveBound {
                    reward: max_reward,
                    bound: b,
                });
            }
            b
        }
        None => max_reward,
    };
    let prior_shift = raw.reward_shift.unwrap_or(0);
    if prior_shift < 0 {
        return Err(Error::Parse("reward_shift must be non-negative".into()));
    }

    let layer_of = match (raw.layered, &raw.layer_of) {
        (false, None) => None,
        (false, Some(_)) => {
            return Err(Error::LayerViolation(
                "layer_of given but layered flag not set".into(),
            ))
        }
        (true, None) => {
            return Err(Error::LayerViolation(
                "layered flag set but layer_of missing".into(),
            ))
        }
        (true, Some(layers)) => {
            if layers.len() != s {
                return Err(Error::LayerViolation(format!(
                    "layer_of has {} entries, expected {s}",
                    layers.len()
                )));
            }
            if let Some(bad) = layers.iter().position(|&l| l < 0 || l as usize > t) {
                return Err(Error::LayerViolation(format!(
                    "state {bad} has layer {} outside 0..={t}",
                    layers[bad]
                )));
            }
            Some(layers.iter().map(|&l| l as usize).collect::<Vec<_>>())
        }
    };

    let inst = DpInstance {
        num_states: s,
        num_actions: a,
        horizon: t,
        initial_state: raw.initial_state as usize,
        time_dependent: raw.time_dependent,
        transitions,
        reward_bound,
        layer_of,
        reward_shift: prior_shift + shift,
    };
    if let Some(layers) = &inst.layer_of {
        if layers[inst.initial_state] != 0 {
            return Err(Error::LayerViolation(format!(
                "initial state sits in layer {}, expected 0",
                layers[inst.initial_state]
            )));
        }
        for st in 0..s {
            let l = layers[st];
            if l >= t {
                continue;
            }
            for act in 0..a {
                let next = inst.step(l, st, act).next;
                if layers[next] != l + 1 {
                    return Err(Error::LayerViolation(format!(
                        "state {st} (layer {l}) action {act} reaches state {next} in layer {}",
                        layers[next]
                    )));
                }
            }
        }
    }
    Ok(inst)
}

impl DpInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        validate_instance(&RawInstance::from_json(text)?)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn time_dependent(&self) -> bool {
        self.time_dependent
    }

    pub fn reward_bound(&self) -> i64 {
        self.reward_bound
    }

    /// Uniform shift that was added to every raw reward.
    pub fn reward_shift(&self) -> i64 {
        self.reward_shift
    }

    pub fn is_layered(&self) -> bool {
        self.layer_of.is_some()
    }

    pub fn layer_of(&self, s: usize) -> Option<usize> {
        self.layer_of.as_ref().map(|l| l[s])
    }

    pub fn layers(&self) -> Option<&[usize]> {
        self.layer_of.as_deref()
    }

    #[inline]
    pub fn step(&self, t: usize, s: usize, a: usize) -> Transition {
        let slice = if self.time_dependent { t } else { 0 };
        self.transitions[(slice * self.num_states + s) * self.num_actions + a]
    }

    #[inline]
    pub fn reward(&self, t: usize, s: usize, a: usize) -> i64 {
        self.step(t, s, a).reward
    }

    #[inline]
    pub fn next_state(&self, t: usize, s: usize, a: usize) -> usize {
        self.step(t, s, a).next
    }

    /// Same kernel, new marked initial state. Layered instances keep their
    /// layering only if `s` lies in layer 0.
    pub fn with_initial_state(&self, s: usize) -> Result<Self> {
        if s >= self.num_states {
            return Err(Error::InitialStateOutOfRange(s));
        }
        if let Some(l) = self.layer_of(s) {
            if l != 0 {
                return Err(Error::LayerViolation(format!(
                    "state {s} lies in layer {l}, not 0"
                )));
            }
        }
        let mut out = self.clone();
        out.initial_state = s;
        Ok(out)
    }

    /// The sub-problem that starts in `state` at time `t` and runs to the
    /// original horizon. Returns the instance and, for each new state index,
    /// the original state index.
    ///
    /// Time-indexed instances keep every state. Layered instances keep only
    /// the states reachable from `state`, renumbered in discovery order.
    pub fn suffix(&self, state: usize, t: usize) -> Result<(DpInstance, Vec<usize>)> {
        if t >= self.horizon {
            return Err(Error::InvalidParameter(format!(
                "suffix time {t} must be below the horizon {}",
                self.horizon
            )));
        }
        if state >= self.num_states {
            return Err(Error::InitialStateOutOfRange(state));
        }
        let horizon = self.horizon - t;
        match &self.layer_of {
            None => {
                let transitions = if self.time_dependent {
                    let width = self.num_states * self.num_actions;
                    self.transitions[t * width..].to_vec()
                } else {
                    self.transitions.clone()
                };
                Ok((
                    DpInstance {
                        horizon,
                        initial_state: state,
                        transitions,
                        ..self.clone()
                    },
                    (0..self.num_states).collect(),
                ))
            }
            Some(layers) => {
                if layers[state] != t {
                    return Err(Error::LayerViolation(format!(
                        "state {state} lies in layer {}, not {t}",
                        layers[state]
                    )));
                }
                let mut old_of = vec![state];
                let mut new_of = vec![usize::MAX; self.num_states];
                new_of[state] = 0;
                let mut head = 0;
                while head < old_of.len() {
                    let s = old_of[head];
                    head += 1;
                    if layers[s] >= self.horizon {
                        continue;
                    }
                    for a in 0..self.num_actions {
                        let n = self.next_state(layers[s], s, a);
                        if new_of[n] == usize::MAX {
                            new_of[n] = old_of.len();
                            old_of.push(n);
                        }
                    }
                }
                let slices = if self.time_dependent { horizon } else { 1 };
                let mut transitions = Vec::with_capacity(slices * old_of.len() * self.num_actions);
                for slice in 0..slices {
                    for &s in &old_of {
                        for a in 0..self.num_actions {
                            let tr = self.step(slice + t, s, a);
                            let next = if layers[s] < self.horizon {
                                new_of[tr.next]
                            } else {
                                // final-layer rows are never used; keep them in range
                                new_of[s]
                            };
                            transitions.push(Transition {
                                next,
                                reward: tr.reward,
                            });
                        }
                    }
                }
                let layer_of = old_of.iter().map(|&s| layers[s] - t).collect();
                Ok((
                    DpInstance {
                        num_states: old_of.len(),
                        num_actions: self.num_actions,
                        horizon,
                        initial_state: 0,
                        time_dependent: self.time_dependent,
                        transitions,
                        reward_bound: self.reward_bound,
                        layer_of: Some(layer_of),
                        reward_shift: self.reward_shift,
                    },
                    old_of,
                ))
            }
        }
    }

    /// Canonical on-disk form (rewards as stored, i.e. after any shift).
    pub fn to_raw(&self) -> RawInstance {
        let table: Vec<(i64, i64)> = self
            .transitions
            .iter()
            .map(|tr| (tr.next as i64, tr.reward))
            .collect();
        let mut raw = RawInstance::from_table(
            self.num_states,
            self.num_actions,
            self.horizon,
            self.initial_state,
            self.time_dependent,
            &table,
        );
        if let Some(layers) = &self.layer_of {
            raw = raw.with_layers(layers.clone());
        }
        raw.reward_bound = Some(self.reward_bound);
        if self.reward_shift != 0 {
            raw.reward_shift = Some(self.reward_shift);
        }
        raw
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("instance serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i1_raw() -> RawInstance {
        RawInstance::from_table(2, 2, 2, 0, false, &[(0, 1), (1, 2), (1, 1), (0, 2)])
    }

    #[test]
    fn well_formed_instance_is_accepted_unchanged() {
        let inst = validate_instance(&i1_raw()).unwrap();
        assert_eq!(inst.reward_shift(), 0);
        assert_eq!(inst.reward_bound(), 2);
        assert_eq!(inst.step(1, 0, 1), Transition { next: 1, reward: 2 });
        assert_eq!(inst.step(0, 1, 0), Transition { next: 1, reward: 1 });
    }

    #[test]
    fn zero_reward_triggers_uniform_shift() {
        let raw = RawInstance::from_table(2, 2, 2, 0, false, &[(0, 0), (1, 2), (1, 1), (0, 2)])
            .with_reward_bound(2);
        let inst = validate_instance(&raw).unwrap();
        assert_eq!(inst.reward_shift(), 1);
        assert_eq!(inst.reward_bound(), 3);
        assert_eq!(inst.reward(0, 0, 0), 1);
        assert_eq!(inst.reward(0, 0, 1), 3);
    }

    #[test]
    fn dangling_state_is_rejected() {
        let raw = RawInstance::from_table(2, 2, 2, 0, false, &[(0, 1), (2, 2), (1, 1), (0, 2)]);
        assert!(matches!(
            validate_instance(&raw),
            Err(Error::DanglingStateIndex {
                next: 2,
                s: 0,
                a: 1,
                ..
            })
        ));
    }

    #[test]
    fn zero_horizon_and_empty_actions_are_rejected() {
        let mut raw = i1_raw();
        raw.horizon = 0;
        assert_eq!(validate_instance(&raw), Err(Error::NonPositiveHorizon));
        let mut raw = i1_raw();
        raw.num_actions = 0;
        assert_eq!(validate_instance(&raw), Err(Error::EmptyActionSet));
    }

    #[test]
    fn layer_violation_is_detected() {
        // 0 -> 1 -> 2 chain, but state 1 loops back to itself
        let raw = RawInstance::from_table(3, 1, 2, 0, false, &[(1, 1), (1, 1), (2, 1)])
            .with_layers(vec![0, 1, 2]);
        assert!(matches!(
            validate_instance(&raw),
            Err(Error::LayerViolation(_))
        ));
        let ok = RawInstance::from_table(3, 1, 2, 0, false, &[(1, 1), (2, 1), (2, 1)])
            .with_layers(vec![0, 1, 2]);
        assert!(validate_instance(&ok).unwrap().is_layered());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"num_states":1,"num_actions":1,"horizon":1,"initial_state":0,
            "time_dependent":false,"transitions":[[[0,1]]],"colour":"red"}"#;
        assert!(matches!(DpInstance::from_json(text), Err(Error::Parse(_))));
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let text = r#"{"num_states":2,"num_actions":1,"horizon":1,"initial_state":0,
            "time_dependent":false,"transitions":[[[0,1]]]}"#;
        assert!(matches!(
            DpInstance::from_json(text),
            Err(Error::TransitionShape(_))
        ));
    }

    #[test]
    fn json_round_trip_preserves_instance() {
        let inst = validate_instance(&i1_raw()).unwrap();
        let back = DpInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn time_dependent_suffix_drops_leading_slices() {
        // one state, two actions, three slices with rewards (1,2) (3,4) (5,6)
        let table: Vec<(i64, i64)> = (1..=6).map(|r| (0, r)).collect();
        let raw = RawInstance::from_table(1, 2, 3, 0, true, &table);
        let inst = validate_instance(&raw).unwrap();
        let (suf, map) = inst.suffix(0, 1).unwrap();
        assert_eq!(map, vec![0]);
        assert_eq!(suf.horizon(), 2);
        assert_eq!(suf.reward(0, 0, 1), 4);
        assert_eq!(suf.reward(1, 0, 0), 5);
    }
}
