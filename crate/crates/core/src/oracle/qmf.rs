//! Classical stand-in for quantum maximum finding: a seeded failure model
//! over the exact scan, with values read to a precision of `δ/2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::context::{SigmaContext, SimplexVertex};
use crate::oracle::ledger::QueryLedger;
use crate::oracle::scan::exact_argmax;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleStrategy {
    #[default]
    ExactScan,
    SimulatedQmf {
        fail_prob: f64,
        seed: u64,
    },
}

/// Seeded source of QMF outcomes.
#[derive(Debug, Clone)]
pub struct QmfSampler {
    rng: ChaCha8Rng,
    fail_prob: f64,
}

impl QmfSampler {
    pub fn new(fail_prob: f64, seed: u64) -> Result<Self> {
        if !(fail_prob > 0.0 && fail_prob < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "failure probability {fail_prob} outside (0, 1)"
            )));
        }
        Ok(QmfSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            fail_prob,
        })
    }

    /// Same random stream, new failure probability.
    pub fn with_fail_prob(mut self, fail_prob: f64) -> Result<Self> {
        if !(fail_prob > 0.0 && fail_prob < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "failure probability {fail_prob} outside (0, 1)"
            )));
        }
        self.fail_prob = fail_prob;
        Ok(self)
    }

    pub fn fail_prob(&self) -> f64 {
        self.fail_prob
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleVerdict {
    Feasible {
        vertex: SimplexVertex,
        value: f64,
        quantized: f64,
    },
    Infeasible {
        quantized: f64,
    },
}

/// Floors `value` onto the grid `g Z`, returning the grid index.
pub fn quantize_index(value: f64, grid: f64) -> i64 {
    (value / grid).floor() as i64
}

/// One QMF run: the true maximizer with probability `1 - p`, otherwise a
/// uniformly random vertex. The candidate is accepted iff its value floored
/// to the grid `δ/2` is at least `-δ/2`, so accepted vertices have true
/// value `>= -δ`.
pub fn simulated_qmf(
    ctx: &SigmaContext<'_>,
    w: &[f64],
    sampler: &mut QmfSampler,
    delta: f64,
    ledger: &mut QueryLedger,
) -> OracleVerdict {
    let n = ctx.num_vertices();
    let failed = sampler.rng.gen::<f64>() < sampler.fail_prob;
    let (vertex, value) = if failed {
        let v = ctx.vertices()[sampler.rng.gen_range(0..n)];
        (v, crate::oracle::scan::table_value(ctx, w, &v))
    } else {
        let mut scratch = QueryLedger::default();
        exact_argmax(ctx, w, &mut scratch)
    };
    ledger.record_qmf_run(n as u64, sampler.fail_prob);
    let grid = delta / 2.0;
    let k = quantize_index(value, grid);
    let quantized = k as f64 * grid;
    if k >= -1 {
        OracleVerdict::Feasible {
            vertex,
            value,
            quantized,
        }
    } else {
        OracleVerdict::Infeasible { quantized }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_instance, RawInstance};

    #[test]
    fn flooring_rule() {
        assert_eq!(quantize_index(0.26, 0.125), 2);
        assert_eq!(quantize_index(-0.25, 0.125), -2);
        assert_eq!(quantize_index(-0.1, 0.125), -1);
    }

    #[test]
    fn sampler_rejects_bad_probability() {
        assert!(QmfSampler::new(0.0, 1).is_err());
        assert!(QmfSampler::new(1.0, 1).is_err());
        assert!(QmfSampler::new(0.5, 1).is_ok());
    }

    #[test]
    fn tiny_failure_rate_matches_exact_scan() {
        let inst = validate_instance(&RawInstance::from_table(
            2,
            2,
            2,
            0,
            false,
            &[(0, 1), (1, 2), (1, 1), (0, 2)],
        ))
        .unwrap();
        let ctx = SigmaContext::new(&inst, 4.0, 4).unwrap();
        let mut sampler = QmfSampler::new(1e-12, 7).unwrap();
        let mut ledger = QueryLedger::default();
        let w = [0.25; 4];
        match simulated_qmf(&ctx, &w, &mut sampler, 0.25, &mut ledger) {
            OracleVerdict::Feasible {
                vertex, quantized, ..
            } => {
                assert_eq!(vertex.key(), (0, 0, 0));
                assert_eq!(quantized, 0.25);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(ledger.qmf_runs, 1);
        assert_eq!(ledger.modeled_queries, 3 * 40);
        assert_eq!(ledger.scan_evaluations, 0);
    }
}
