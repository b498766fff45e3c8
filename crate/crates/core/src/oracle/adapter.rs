//! Wraps the scan or the simulated QMF as a δ-approximate oracle for the
//! MWUM driver.

use crate::error::Result;
use crate::mwum::{ApproxOracle, OracleAnswer};
use crate::oracle::context::{SigmaContext, SimplexVertex};
use crate::oracle::ledger::QueryLedger;
use crate::oracle::qmf::{simulated_qmf, OracleStrategy, OracleVerdict, QmfSampler};
use crate::oracle::scan::{exact_argmax, table_residual};

/// Slack on the `-δ` acceptance threshold of the exact scan.
pub const THRESHOLD_TOLERANCE: f64 = 1e-12;

#[derive(Debug)]
pub struct DpOracle<'c, 'a> {
    ctx: &'c SigmaContext<'a>,
    delta: f64,
    sampler: Option<QmfSampler>,
    ledger: QueryLedger,
    min_accepted: f64,
}

impl<'c, 'a> DpOracle<'c, 'a> {
    /// `sampler = None` selects the exact scan.
    pub fn new(ctx: &'c SigmaContext<'a>, delta: f64, sampler: Option<QmfSampler>) -> Self {
        DpOracle {
            ctx,
            delta,
            sampler,
            ledger: QueryLedger::default(),
            min_accepted: f64::INFINITY,
        }
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    /// Smallest true `f` value among accepted vertices.
    pub fn min_accepted_value(&self) -> f64 {
        self.min_accepted
    }

    pub fn into_parts(self) -> (QueryLedger, Option<QmfSampler>) {
        (self.ledger, self.sampler)
    }
}

pub fn oracle_for_mwum<'c, 'a>(
    ctx: &'c SigmaContext<'a>,
    strategy: &OracleStrategy,
    delta: f64,
) -> Result<DpOracle<'c, 'a>> {
    let sampler = match *strategy {
        OracleStrategy::ExactScan => None,
        OracleStrategy::SimulatedQmf { fail_prob, seed } => Some(QmfSampler::new(fail_prob, seed)?),
    };
    Ok(DpOracle::new(ctx, delta, sampler))
}

impl ApproxOracle for DpOracle<'_, '_> {
    type Point = SimplexVertex;

    fn num_constraints(&self) -> usize {
        self.ctx.num_constraints()
    }

    fn query(&mut self, p: &[f64]) -> Result<OracleAnswer<SimplexVertex>> {
        let accepted = match self.sampler.as_mut() {
            None => {
                let (v, value) = exact_argmax(self.ctx, p, &mut self.ledger);
                (value >= -self.delta - THRESHOLD_TOLERANCE).then_some((v, value))
            }
            Some(sampler) => {
                match simulated_qmf(self.ctx, p, sampler, self.delta, &mut self.ledger) {
                    OracleVerdict::Feasible { vertex, value, .. } => Some((vertex, value)),
                    OracleVerdict::Infeasible { .. } => None,
                }
            }
        };
        Ok(match accepted {
            Some((v, value)) => {
                self.min_accepted = self.min_accepted.min(value);
                OracleAnswer::Accept {
                    residual: table_residual(self.ctx, &v),
                    point: v,
                }
            }
            None => OracleAnswer::Reject,
        })
    }
}
