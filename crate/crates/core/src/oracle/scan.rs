//! Full scans of the vertex set for the maximizer of `f_{σ,w}`.

use crate::oracle::context::{SigmaContext, SimplexVertex, BUDGET};
use crate::oracle::ledger::QueryLedger;
use crate::parallel;

#[inline]
fn score(w: &[f64], c: &crate::oracle::context::Coefficients) -> f64 {
    let succ = if c.succ == u32::MAX {
        0.0
    } else {
        w[c.succ as usize]
    };
    w[BUDGET] + c.mass * (succ - w[c.own as usize])
}

/// Maximizer of `f_{σ,w}` over all vertices; ties go to the smallest
/// `(s, a, t)`. Adds `N` to the ledger's scan count.
pub fn exact_argmax(
    ctx: &SigmaContext<'_>,
    w: &[f64],
    ledger: &mut QueryLedger,
) -> (SimplexVertex, f64) {
    let coeffs = ctx.coefficients();
    let (i, value) =
        parallel::argmax(coeffs.len(), |i| score(w, &coeffs[i])).expect("vertex set is non-empty");
    ledger.scan_evaluations += coeffs.len() as u64;
    (ctx.vertices()[i], value)
}

/// Single-threaded scan, regardless of features.
pub fn exact_argmax_seq(ctx: &SigmaContext<'_>, w: &[f64]) -> (SimplexVertex, f64) {
    let coeffs = ctx.coefficients();
    let (i, value) = parallel::argmax_seq(coeffs.len(), |i| score(w, &coeffs[i]))
        .expect("vertex set is non-empty");
    (ctx.vertices()[i], value)
}

/// Rayon scan, regardless of input size.
#[cfg(feature = "parallel")]
pub fn exact_argmax_par(ctx: &SigmaContext<'_>, w: &[f64]) -> (SimplexVertex, f64) {
    let coeffs = ctx.coefficients();
    let (i, value) = parallel::argmax_par(coeffs.len(), |i| score(w, &coeffs[i]))
        .expect("vertex set is non-empty");
    (ctx.vertices()[i], value)
}

/// `f_{σ,w}` of a vertex through the precomputed coefficient table.
pub(crate) fn table_value(ctx: &SigmaContext<'_>, w: &[f64], v: &SimplexVertex) -> f64 {
    score(w, &ctx.coefficients()[v.id])
}

/// Sparse residual of a vertex through the coefficient table.
pub(crate) fn table_residual(ctx: &SigmaContext<'_>, v: &SimplexVertex) -> Vec<(usize, f64)> {
    let c = &ctx.coefficients()[v.id];
    let mut out = Vec::with_capacity(3);
    if c.own as usize == BUDGET {
        out.push((BUDGET, 1.0 - c.mass));
    } else {
        out.push((BUDGET, 1.0));
        out.push((c.own as usize, -c.mass));
    }
    if c.succ != u32::MAX {
        out.push((c.succ as usize, c.mass));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_instance, RawInstance};
    use crate::oracle::context::{eval_f, residuals};

    fn i1() -> crate::model::DpInstance {
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

    #[test]
    fn uniform_weights_pick_first_of_tie() {
        let inst = i1();
        let ctx = SigmaContext::new(&inst, 4.0, 4).unwrap();
        let mut ledger = QueryLedger::default();
        let (v, f) = exact_argmax(&ctx, &[0.25; 4], &mut ledger);
        assert_eq!(v.key(), (0, 0, 0));
        assert!((f - 0.25).abs() < 1e-15);
        assert_eq!(ledger.scan_evaluations, 8);
    }

    #[test]
    fn concentrated_weight_matches_enumeration() {
        let inst = i1();
        let ctx = SigmaContext::new(&inst, 4.0, 4).unwrap();
        let w = [0.0, 0.0, 1.0, 0.0];
        let mut best = (ctx.vertices()[0], f64::NEG_INFINITY);
        for v in ctx.vertices() {
            let f = eval_f(&ctx, &w, v).unwrap();
            if f > best.1 {
                best = (*v, f);
            }
        }
        let (v, f) = exact_argmax(&ctx, &w, &mut QueryLedger::default());
        assert_eq!(v.key(), best.0.key());
        assert_eq!(f, best.1);
        assert_eq!(v.key(), (0, 0, 0));
        assert_eq!(f, 4.0);
    }

    #[test]
    fn table_paths_agree_with_instance_paths() {
        let inst = i1();
        let ctx = SigmaContext::new(&inst, 3.0, 4).unwrap();
        let w = [0.1, 0.2, 0.3, 0.4];
        for v in ctx.vertices() {
            assert!((table_value(&ctx, &w, v) - eval_f(&ctx, &w, v).unwrap()).abs() < 1e-15);
            assert_eq!(table_residual(&ctx, v), residuals(&ctx, v).unwrap());
        }
        let (a, fa) = exact_argmax_seq(&ctx, &w);
        let (b, fb) = exact_argmax(&ctx, &w, &mut QueryLedger::default());
        assert_eq!((a.key(), fa), (b.key(), fb));
    }
}
