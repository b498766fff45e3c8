//! Expert weights and the multiplicative update `w_i <- w_i (1 - eps m_i)`.

use crate::error::{Error, Result};

/// Per-round costs, one per expert, each in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector(Vec<f64>);

impl CostVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_costs(entries.iter().copied().enumerate())?;
        Ok(CostVector(entries))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub(crate) fn check_costs(entries: impl Iterator<Item = (usize, f64)>) -> Result<()> {
    for (index, value) in entries {
        if !(-1.0..=1.0).contains(&value) {
            return Err(Error::CostOutOfRange { index, value });
        }
    }
    Ok(())
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 0.5 {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(epsilon))
    }
}

// Ratios are what matter; rescaling by a power of two keeps them exact.
const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_FACTOR: f64 =
    1.0 / (1u128 << 100) as f64 / (1u128 << 100) as f64 / (1u128 << 100) as f64;

/// Multiplicative weights over `n` experts.
///
/// Weights may be rescaled by a common power of two to stay in floating-point
/// range; [`WeightState::distribution`] is unaffected.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightState {
    weights: Vec<f64>,
    round: usize,
}

impl WeightState {
    pub fn uniform(n: usize) -> Self {
        WeightState {
            weights: vec![1.0; n],
            round: 0,
        }
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, &w)| w.is_nan() || w <= 0.0)
        {
            return Err(Error::NegativeWeight { index, value });
        }
        Ok(WeightState { weights, round: 0 })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `p = w / sum(w)`.
    pub fn distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.weights.len()];
        self.distribution_into(&mut p);
        p
    }

    pub fn distribution_into(&self, out: &mut [f64]) {
        let total: f64 = self.weights.iter().sum();
        let inv = 1.0 / total;
        for (o, w) in out.iter_mut().zip(&self.weights) {
            *o = w * inv;
        }
    }

    /// Applies the update for a cost vector given by its non-zero entries.
    /// Callers validate `epsilon` and the entries.
    pub(crate) fn apply_sparse(&mut self, entries: &[(usize, f64)], epsilon: f64) {
        let mut overflow = false;
        for &(i, m) in entries {
            let w = (self.weights[i] * (1.0 - epsilon * m)).max(f64::MIN_POSITIVE);
            overflow |= w > RESCALE_ABOVE;
            self.weights[i] = w;
        }
        self.round += 1;
        if overflow {
            self.rescale();
        }
    }

    fn apply_dense(&mut self, m: &[f64], epsilon: f64) {
        let mut overflow = false;
        for (w, &mi) in self.weights.iter_mut().zip(m) {
            *w = (*w * (1.0 - epsilon * mi)).max(f64::MIN_POSITIVE);
            overflow |= *w > RESCALE_ABOVE;
        }
        self.round += 1;
        if overflow {
            self.rescale();
        }
    }

    fn rescale(&mut self) {
        for w in &mut self.weights {
            *w = (*w * RESCALE_FACTOR).max(f64::MIN_POSITIVE);
        }
    }
}

/// One application of the update rule.
pub fn mw_update(mut state: WeightState, m: &CostVector, epsilon: f64) -> Result<WeightState> {
    check_epsilon(epsilon)?;
    if m.len() != state.len() {
        return Err(Error::DimensionMismatch {
            expected: state.len(),
            got: m.len(),
        });
    }
    state.apply_dense(m.entries(), epsilon);
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn update_examples() {
        let w = WeightState::uniform(2);
        let w = mw_update(w, &CostVector::new(vec![1.0, -1.0]).unwrap(), 0.5).unwrap();
        assert!(close(w.weights(), &[0.5, 1.5]));
        assert_eq!(w.round(), 1);

        let w = WeightState::from_weights(vec![2.0, 1.0]).unwrap();
        let w = mw_update(w, &CostVector::new(vec![-1.0, 1.0]).unwrap(), 0.25).unwrap();
        assert!(close(w.weights(), &[2.5, 0.75]));
    }

    #[test]
    fn zero_costs_leave_weights_unchanged() {
        let w = WeightState::from_weights(vec![0.3, 4.0, 1.0]).unwrap();
        let out = mw_update(w.clone(), &CostVector::new(vec![0.0; 3]).unwrap(), 0.1).unwrap();
        assert_eq!(out.weights(), w.weights());
    }

    #[test]
    fn range_errors() {
        assert!(matches!(
            CostVector::new(vec![0.0, 1.5]),
            Err(Error::CostOutOfRange { index: 1, .. })
        ));
        let m = CostVector::new(vec![0.0]).unwrap();
        assert!(matches!(
            mw_update(WeightState::uniform(1), &m, 0.6),
            Err(Error::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            WeightState::from_weights(vec![1.0, 0.0]),
            Err(Error::NegativeWeight { index: 1, .. })
        ));
    }

    #[test]
    fn rescaling_preserves_distribution() {
        let mut w = WeightState::uniform(3);
        for _ in 0..2000 {
            w.apply_sparse(&[(0, -1.0), (1, -0.5)], 0.5);
        }
        let p = w.distribution();
        assert!(w.weights().iter().all(|&x| x > 0.0 && x.is_finite()));
        // p1/p0 = (1.25/1.5)^2000
        let expected = (2000.0 * (1.25f64 / 1.5).ln()).exp();
        assert!((p[1] / p[0] - expected).abs() <= 1e-9 * expected.max(1e-300));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
