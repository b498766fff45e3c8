//! The generic experts algorithm: play `p = w / |w|`, observe costs, update.

use super::transcript::{RoundRecord, Transcript};
use super::weights::{check_costs, check_epsilon, WeightState};
use crate::error::{Error, Result};

/// Runs `rounds` rounds over `n` experts. `costs(round, p)` supplies the cost
/// vector for the round after seeing `p` (1-based round numbers).
pub fn mw_run_generic(
    n: usize,
    epsilon: f64,
    mut costs: impl FnMut(usize, &[f64]) -> Vec<f64>,
    rounds: usize,
) -> Result<Transcript> {
    check_epsilon(epsilon)?;
    let mut state = WeightState::uniform(n);
    let mut transcript = Transcript::new(n, epsilon);
    for round in 1..=rounds {
        let p = state.distribution();
        let m = costs(round, &p);
        if m.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.len(),
            });
        }
        check_costs(m.iter().copied().enumerate())?;
        let sparse: Vec<(usize, f64)> = m
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, v)| v != 0.0)
            .collect();
        state.apply_sparse(&sparse, epsilon);
        transcript.rounds.push(RoundRecord {
            round,
            p: Some(p),
            chosen: None,
            m: sparse,
            accepted: true,
        });
    }
    Ok(transcript)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_expert_always_has_full_mass() {
        let t =
            mw_run_generic(1, 0.3, |k, _| vec![if k % 2 == 0 { 1.0 } else { -0.5 }], 5).unwrap();
        assert!(t.rounds.iter().all(|r| r.p.as_deref() == Some(&[1.0][..])));
    }

    #[test]
    fn two_rounds_of_constant_costs() {
        let t = mw_run_generic(2, 0.5, |_, _| vec![1.0, -1.0], 2).unwrap();
        let p1 = t.rounds[0].p.as_ref().unwrap();
        let p2 = t.rounds[1].p.as_ref().unwrap();
        assert_eq!(p1, &vec![0.5, 0.5]);
        assert!((p2[0] - 0.25).abs() < 1e-15 && (p2[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_cost_is_rejected() {
        let r = mw_run_generic(2, 0.5, |_, _| vec![0.0, -2.0], 1);
        assert!(matches!(r, Err(Error::CostOutOfRange { index: 1, .. })));
    }
}
