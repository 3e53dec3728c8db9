//! Deterministic summation of long oscillatory series.
//!
//! Terms are produced by index in canonical mode order. The parallel path
//! cuts the index range into fixed-size blocks, sums each block with a fixed
//! pairwise tree and then sums the block totals with the same tree, so the
//! association order depends only on the term count, never on the number of
//! worker threads.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::types::SummationPolicy;

/// Terms per parallel work unit.
pub const BLOCK: usize = 2048;

/// Below this length the pairwise tree degenerates into a straight loop.
const LEAF: usize = 8;

pub trait Summand: Copy + Send + Sync + Default + std::ops::Add<Output = Self> {
    /// Neumaier-compensated sum of `terms` in iteration order.
    fn compensated<I: IntoIterator<Item = Self>>(terms: I) -> Self;
}

fn neumaier(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl Summand for f64 {
    fn compensated<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        neumaier(terms)
    }
}

impl Summand for Complex64 {
    fn compensated<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        let (re, im): (Vec<f64>, Vec<f64>) = terms.into_iter().map(|z| (z.re, z.im)).unzip();
        Complex64::new(neumaier(re), neumaier(im))
    }
}

/// Pairwise (cascade) sum with a tree fixed by `xs.len()`.
pub fn pairwise_sum<T: Summand>(xs: &[T]) -> T {
    if xs.len() <= LEAF {
        return xs.iter().fold(T::default(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sums `term(0) + … + term(n-1)` under `policy`.
///
/// `PairwiseDeterministic` fans blocks out over the rayon pool; the result is
/// bit-identical for any pool size.
pub fn sum_indexed<T, F>(n: usize, policy: SummationPolicy, term: F) -> T
where
    T: Summand,
    F: Fn(usize) -> T + Sync,
{
    match policy {
        SummationPolicy::PairwiseDeterministic => {
            let blocks = n.div_ceil(BLOCK);
            let partial: Vec<T> = (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let lo = b * BLOCK;
                    let hi = (lo + BLOCK).min(n);
                    let terms: Vec<T> = (lo..hi).map(&term).collect();
                    pairwise_sum(&terms)
                })
                .collect();
            pairwise_sum(&partial)
        }
        SummationPolicy::SerialCompensated => T::compensated((0..n).map(term)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pairwise_matches_exact_integers() {
        let xs: Vec<f64> = (1..=10_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 50_005_000.0);
        assert_eq!(sum_indexed(10_000, SummationPolicy::PairwiseDeterministic, |i| xs[i]), 50_005_000.0);
    }

    #[test]
    fn compensated_recovers_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(f64::compensated(xs), 2.0);
    }

    #[test]
    fn result_independent_of_thread_count() {
        let f = |i: usize| ((i as f64) * 0.7311).sin() / (1.0 + i as f64);
        let n = 100_003;
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let a: f64 = one.install(|| sum_indexed(n, SummationPolicy::PairwiseDeterministic, f));
        let b: f64 = many.install(|| sum_indexed(n, SummationPolicy::PairwiseDeterministic, f));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    proptest! {
        #[test]
        fn negating_terms_negates_sum_exactly(xs in proptest::collection::vec(-1e3f64..1e3, 0..5000)) {
            let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
            let a = sum_indexed(xs.len(), SummationPolicy::PairwiseDeterministic, |i| xs[i]);
            let b = sum_indexed(xs.len(), SummationPolicy::PairwiseDeterministic, |i| neg[i]);
            // == rather than bit equality: 0.0 and -0.0 both appear
            prop_assert_eq!(a, -b);
        }

        #[test]
        fn policies_agree(xs in proptest::collection::vec(-1.0f64..1.0, 1..3000)) {
            let a = sum_indexed(xs.len(), SummationPolicy::PairwiseDeterministic, |i| xs[i]);
            let b = sum_indexed(xs.len(), SummationPolicy::SerialCompensated, |i| xs[i]);
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
