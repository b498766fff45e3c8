//! Checks the experts regret bound on a recorded transcript:
//!
//! `sum_t m(t).p(t) <= sum_t m_i(t) + eps * sum_t |m_i(t)| + ln(n) / eps`
//! for every expert `i`.

use super::transcript::Transcript;

pub const REGRET_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RegretVerdict {
    pub pass: bool,
    /// Smallest `rhs - lhs` over experts (negative means the bound failed).
    pub worst_margin: f64,
    pub worst_expert: usize,
    /// Largest gap between a recorded `p` and the one re-derived from the
    /// update rule; zero when no `p` was recorded.
    pub max_p_deviation: f64,
    pub p_mismatch: bool,
}

/// Audits every expert. Only accepted rounds carry a cost vector and count.
///
/// `p` is re-derived in the log domain from the recorded costs; when the
/// transcript stores its own `p`, that one is used for the left-hand side and
/// any disagreement beyond the tolerance is reported as a mismatch.
pub fn regret_audit(transcript: &Transcript, epsilon: f64, n: usize) -> RegretVerdict {
    let mut log_w = vec![0.0f64; n];
    let mut lhs = 0.0;
    let mut sum_m = vec![0.0; n];
    let mut sum_abs = vec![0.0; n];
    let mut max_dev: f64 = 0.0;
    let mut derived = vec![0.0; n];
    for rec in transcript.rounds.iter().filter(|r| r.accepted) {
        let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = log_w.iter().map(|l| (l - top).exp()).sum();
        for (d, l) in derived.iter_mut().zip(&log_w) {
            *d = (l - top).exp() / z;
        }
        let p = match &rec.p {
            Some(p) => {
                for (a, b) in p.iter().zip(&derived) {
                    max_dev = max_dev.max((a - b).abs());
                }
                p.as_slice()
            }
            None => derived.as_slice(),
        };
        for &(i, m) in &rec.m {
            lhs += m * p[i];
            sum_m[i] += m;
            sum_abs[i] += m.abs();
            log_w[i] += (-epsilon * m).ln_1p();
        }
    }
    let ln_n_over_eps = (n as f64).ln() / epsilon;
    let (mut worst_margin, mut worst_expert) = (f64::INFINITY, 0);
    for i in 0..n {
        let rhs = sum_m[i] + epsilon * sum_abs[i] + ln_n_over_eps;
        let margin = rhs - lhs;
        if margin < worst_margin {
            worst_margin = margin;
            worst_expert = i;
        }
    }
    let p_mismatch = max_dev > REGRET_TOLERANCE;
    RegretVerdict {
        pass: worst_margin >= -REGRET_TOLERANCE && !p_mismatch,
        worst_margin,
        worst_expert,
        max_p_deviation: max_dev,
        p_mismatch,
    }
}
