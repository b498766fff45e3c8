use crate::error::{Error, Result};
use crate::model::DpInstance;
use crate::oracle::AveragedSolution;

/// `λ̄(s0, a, 0)` for every action.
pub fn lambda_at_s0(inst: &DpInstance, avg: &AveragedSolution) -> Vec<f64> {
    let s0 = inst.initial_state();
    (0..inst.num_actions())
        .map(|a| avg.value_at(s0, a, 0))
        .collect()
}

/// The action with the largest `λ̄(s0, a, 0)` (lowest index on ties),
/// provided it reaches `1 / (2|A|)`.
pub fn extract_action(inst: &DpInstance, avg: &AveragedSolution) -> Result<usize> {
    extract_from_values(&lambda_at_s0(inst, avg))
}

pub fn extract_from_values(values: &[f64]) -> Result<usize> {
    let threshold = 1.0 / (2.0 * values.len() as f64);
    let (best, &value) = values
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, &f64)>, (a, v)| match acc {
            Some((_, bv)) if bv >= v => acc,
            _ => Some((a, v)),
        })
        .ok_or_else(|| Error::InvalidParameter("no actions".into()))?;
    if value + 1e-12 < threshold {
        return Err(Error::ExtractionBelowThreshold {
            best: value,
            threshold,
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_largest_with_low_index_ties() {
        assert_eq!(extract_from_values(&[1.0, 0.0]).unwrap(), 0);
        assert_eq!(extract_from_values(&[0.3, 0.6]).unwrap(), 1);
        assert_eq!(extract_from_values(&[0.5, 0.5, 0.2]).unwrap(), 0);
    }

    #[test]
    fn below_threshold_is_an_error() {
        assert!(matches!(
            extract_from_values(&[0.0, 0.0]),
            Err(Error::ExtractionBelowThreshold { .. })
        ));
        assert!(matches!(
            extract_from_values(&[0.1, 0.2]),
            Err(Error::ExtractionBelowThreshold { .. })
        ));
    }
}
