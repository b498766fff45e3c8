//! Deterministic query accounting for the simulated QMF subprocedure.

use serde::Serialize;

/// `⌈√n⌉` in exact integer arithmetic.
pub fn ceil_sqrt(n: u64) -> u64 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// `⌈log2(1/p)⌉`, at least 1. A small slack absorbs rounding when `1/p` is
/// an exact power of two.
pub fn ceil_log2_inv(p: f64) -> u64 {
    let x = -p.log2();
    ((x - 1e-9).ceil() as u64).max(1)
}

/// Modeled query cost of one QMF run over `n` vertices at failure rate `p`.
pub fn qmf_run_cost(n: u64, p: f64) -> u64 {
    ceil_sqrt(n) * ceil_log2_inv(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerSegment {
    pub vertices: u64,
    pub fail_prob: f64,
    pub runs: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct QueryLedger {
    pub qmf_runs: u64,
    pub modeled_queries: u64,
    pub scan_evaluations: u64,
    /// Run counts grouped by `(N, p)`, enough to recompute the totals.
    #[serde(skip)]
    pub segments: Vec<LedgerSegment>,
}

impl QueryLedger {
    pub fn record_qmf_run(&mut self, vertices: u64, fail_prob: f64) {
        self.qmf_runs += 1;
        self.modeled_queries += qmf_run_cost(vertices, fail_prob);
        match self.segments.last_mut() {
            Some(seg) if seg.vertices == vertices && seg.fail_prob == fail_prob => seg.runs += 1,
            _ => self.segments.push(LedgerSegment {
                vertices,
                fail_prob,
                runs: 1,
            }),
        }
    }

    /// Folds another ledger into this one.
    pub fn absorb(&mut self, other: &QueryLedger) {
        self.qmf_runs += other.qmf_runs;
        self.modeled_queries += other.modeled_queries;
        self.scan_evaluations += other.scan_evaluations;
        for seg in &other.segments {
            match self.segments.last_mut() {
                Some(last) if last.vertices == seg.vertices && last.fail_prob == seg.fail_prob => {
                    last.runs += seg.runs
                }
                _ => self.segments.push(*seg),
            }
        }
    }

    /// Totals recomputed from the segments.
    pub fn closed_form(&self) -> (u64, u64) {
        self.segments.iter().fold((0, 0), |(runs, q), seg| {
            (
                runs + seg.runs,
                q + seg.runs * ceil_sqrt(seg.vertices) * ceil_log2_inv(seg.fail_prob),
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_helpers() {
        assert_eq!(ceil_sqrt(0), 0);
        assert_eq!(ceil_sqrt(8), 3);
        assert_eq!(ceil_sqrt(9), 3);
        assert_eq!(ceil_sqrt(10), 4);
        assert_eq!(ceil_log2_inv(0.5), 1);
        assert_eq!(ceil_log2_inv(0.25), 2);
        assert_eq!(ceil_log2_inv(0.2), 3);
        assert_eq!(ceil_log2_inv(1.0 / 1024.0), 10);
        assert_eq!(ceil_log2_inv(1.0 / 1000.0), 10);
        assert_eq!(ceil_log2_inv(0.9), 1);
        assert_eq!(ceil_log2_inv(1e-12), 40);
    }

    #[test]
    fn totals_match_segments() {
        let mut l = QueryLedger::default();
        for _ in 0..5 {
            l.record_qmf_run(8, 0.01);
        }
        l.record_qmf_run(100, 0.5);
        assert_eq!(l.qmf_runs, 6);
        assert_eq!(l.modeled_queries, 5 * 3 * 7 + 10);
        assert_eq!(l.closed_form(), (6, l.modeled_queries));
        let mut m = QueryLedger::default();
        m.record_qmf_run(100, 0.5);
        m.absorb(&l);
        assert_eq!(m.closed_form(), (m.qmf_runs, m.modeled_queries));
    }
}
