//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the `par` variants run on rayon's
//! global pool. The `seq` variants are always compiled so benches and tests can
//! compare both paths. The unqualified functions dispatch to whichever is
//! enabled.

/// Ordered map over a slice, sequentially.
pub fn map_seq<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Index of the maximum of `score(i)` over `0..n`, lowest index on ties.
pub fn argmax_seq(n: usize, score: impl Fn(usize) -> f64 + Sync + Send) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for i in 0..n {
        let v = score(i);
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

/// Deterministic reduction step: larger value wins, then lower index.
#[cfg(feature = "parallel")]
fn pick(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    use std::cmp::Ordering;
    match a.1.partial_cmp(&b.1) {
        Some(Ordering::Greater) => a,
        Some(Ordering::Less) => b,
        _ => {
            if a.0 <= b.0 {
                a
            } else {
                b
            }
        }
    }
}

#[cfg(feature = "parallel")]
pub fn map_par<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn argmax_par(n: usize, score: impl Fn(usize) -> f64 + Sync + Send) -> Option<(usize, f64)> {
    use rayon::prelude::*;
    (0..n)
        .into_par_iter()
        .with_min_len(1024)
        .map(|i| (i, score(i)))
        .reduce_with(pick)
}

/// Minimum of `value(i)` over `0..n` (used by the brute-force oracles).
pub fn min_seq<V: Ord + Send>(n: u64, value: impl Fn(u64) -> Option<V> + Sync + Send) -> Option<V> {
    (0..n).filter_map(value).min()
}

#[cfg(feature = "parallel")]
pub fn min_par<V: Ord + Send>(n: u64, value: impl Fn(u64) -> Option<V> + Sync + Send) -> Option<V> {
    use rayon::prelude::*;
    (0..n).into_par_iter().filter_map(value).min()
}

pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        map_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seq(items, f)
    }
}

pub fn min<V: Ord + Send>(n: u64, value: impl Fn(u64) -> Option<V> + Sync + Send) -> Option<V> {
    #[cfg(feature = "parallel")]
    {
        min_par(n, value)
    }
    #[cfg(not(feature = "parallel"))]
    {
        min_seq(n, value)
    }
}

/// Below this many candidates the sequential scan beats thread dispatch.
pub const PAR_SCAN_THRESHOLD: usize = 16_384;

pub fn argmax(n: usize, score: impl Fn(usize) -> f64 + Sync + Send) -> Option<(usize, f64)> {
    #[cfg(feature = "parallel")]
    {
        if n >= PAR_SCAN_THRESHOLD {
            return argmax_par(n, score);
        }
    }
    argmax_seq(n, score)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_prefers_lowest_index_on_ties() {
        let vals = [1.0, 3.0, 3.0, 2.0];
        assert_eq!(argmax_seq(4, |i| vals[i]), Some((1, 3.0)));
        #[cfg(feature = "parallel")]
        assert_eq!(argmax_par(4, |i| vals[i]), Some((1, 3.0)));
    }

    #[test]
    fn empty_argmax_is_none() {
        assert_eq!(argmax_seq(0, |_| 0.0), None);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn seq_and_par_agree_on_large_input() {
        let n = 100_000;
        let f = |i: usize| ((i * 7919) % 1000) as f64;
        assert_eq!(argmax_seq(n, f), argmax_par(n, f));
        assert_eq!(
            min_seq(5000, |i| Some((i * 31) % 977)),
            min_par(5000, |i| Some((i * 31) % 977))
        );
    }
}
