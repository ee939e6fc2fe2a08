//! Exact parallel reduction helpers.
//!
//! Every big sum in this crate (partition sums, moment sums, perturbation
//! double sums) is a reduction of independent exact-rational terms.  Rational
//! addition is associative, so a parallel tree reduction produces bit-identical
//! results regardless of scheduling.  The `parallel` feature (on by default)
//! routes [`par_sum`] through rayon; without it both helpers are sequential.

use num_rational::BigRational;
use num_traits::Zero;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Sum `term(i)` for `i in 0..len` sequentially.
pub fn serial_sum<F>(len: usize, term: F) -> BigRational
where
    F: Fn(usize) -> BigRational,
{
    let mut acc = BigRational::zero();
    for i in 0..len {
        acc += term(i);
    }
    acc
}

/// Sum `term(i)` for `i in 0..len`, in parallel when the `parallel` feature is
/// enabled.  The result is identical to [`serial_sum`].
#[cfg(feature = "parallel")]
pub fn par_sum<F>(len: usize, term: F) -> BigRational
where
    F: Fn(usize) -> BigRational + Sync + Send,
{
    (0..len)
        .into_par_iter()
        .map(term)
        .reduce(BigRational::zero, |a, b| a + b)
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn par_sum<F>(len: usize, term: F) -> BigRational
where
    F: Fn(usize) -> BigRational + Sync + Send,
{
    serial_sum(len, term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn parallel_matches_serial() {
        let term = |i: usize| BigRational::new(BigInt::from(1), BigInt::from(i as i64 + 1));
        assert_eq!(par_sum(1000, term), serial_sum(1000, term));
    }

    #[test]
    fn empty_sum_is_zero() {
        assert!(par_sum(0, |_| unreachable!()).is_zero());
    }
}
