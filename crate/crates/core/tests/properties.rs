//! Randomized invariants for the arithmetic kernel and the partition
//! combinatorics that the expansion recursion rests on.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use plasma_core::extrapolation::{fit4, FitBasis};
use plasma_core::numeric::{erfc, factorial, parse_decimal, rational_to_f64, render_decimal};
use plasma_core::partitions::{dominance_leq, squeeze_predecessors, ExpansionKind, Partition};
use plasma_core::perturbation::CalITable;

proptest! {
    /// Sorting arbitrary parts always yields a valid (nonincreasing)
    /// partition with the same weight and multiset of values.
    #[test]
    fn from_unsorted_is_sorted_and_weight_preserving(
        parts in proptest::collection::vec(0u32..40, 1..10)
    ) {
        let p = Partition::from_unsorted(parts.clone());
        prop_assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(p.weight(), parts.iter().map(|&v| v as u64).sum::<u64>());
        let mut sorted = parts;
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        prop_assert_eq!(p.parts(), &sorted[..]);
    }

    /// Dominance is reflexive and antisymmetric on equal-weight partitions,
    /// and every partition of weight w is dominated by the one-row partition.
    #[test]
    fn dominance_partial_order(
        parts in proptest::collection::vec(0u32..20, 2..8)
    ) {
        let p = Partition::from_unsorted(parts);
        prop_assert!(dominance_leq(&p, &p).unwrap());
        let w = p.weight();
        let mut row = vec![0u32; p.len()];
        row[0] = w as u32;
        let top = Partition::new(row).unwrap();
        prop_assert!(dominance_leq(&p, &top).unwrap());
        if p != top {
            prop_assert!(!dominance_leq(&top, &p).unwrap());
        }
    }

    /// Every squeeze predecessor strictly dominates its target and keeps the
    /// weight; antisymmetric moves always report a consistent sign.
    #[test]
    fn squeeze_moves_raise_in_dominance(
        parts in proptest::collection::vec(0u32..12, 2..6),
        antisym in any::<bool>(),
    ) {
        let mu = Partition::from_unsorted(parts);
        let kind = if antisym {
            ExpansionKind::Antisymmetric
        } else {
            ExpansionKind::Symmetric
        };
        // Use the one-row partition as `top` so no move is cut by dominance
        // pruning except genuinely inadmissible ones.
        let mut row = vec![0u32; mu.len()];
        row[0] = mu.weight() as u32;
        let top = Partition::new(row).unwrap();
        for mv in squeeze_predecessors(&mu, &top, kind) {
            prop_assert_eq!(mv.source.weight(), mu.weight());
            prop_assert!(dominance_leq(&mu, &mv.source).unwrap());
            prop_assert_ne!(&mv.source, &mu);
            prop_assert!(mv.sign == 1 || mv.sign == -1);
            if kind == ExpansionKind::Antisymmetric {
                prop_assert!(mv.source.has_distinct_parts());
            }
        }
    }

    /// Rendering an exact rational and parsing the text back reproduces the
    /// value to within one unit in the last rendered place.
    #[test]
    fn render_parse_roundtrip(num in -1_000_000_000i64..1_000_000_000, den in 1i64..1_000_000) {
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        let text = render_decimal(&r, 15);
        let back = parse_decimal(&text).unwrap();
        let err = rational_to_f64(&(&back - &r)).abs();
        let scale = rational_to_f64(&r).abs().max(1e-300);
        prop_assert!(err <= scale * 1e-14 + 1e-300, "{r} -> {text} -> err {err}");
    }

    /// Decimals with at most 15 significant digits round-trip exactly.
    #[test]
    fn short_decimals_roundtrip_exactly(digits in 0u64..1_000_000_000_000_000, shift in 0u32..12) {
        let r = BigRational::new(BigInt::from(digits), BigInt::from(10u64).pow(shift));
        let text = render_decimal(&r, 15);
        prop_assert_eq!(parse_decimal(&text).unwrap(), r);
    }

    /// A degree-3 polynomial in 1/N is reproduced exactly by the
    /// inverse-powers fit through any four distinct sizes.
    #[test]
    fn fit4_interpolates_inverse_powers(
        c in proptest::array::uniform4(-5.0f64..5.0),
        mut sizes in proptest::collection::hash_set(1usize..60, 4),
    ) {
        let sizes: Vec<usize> = {
            let mut v: Vec<usize> = sizes.drain().collect();
            v.sort_unstable();
            v
        };
        let eval = |n: usize| {
            let x = 1.0 / n as f64;
            c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x
        };
        let points: Vec<(usize, f64)> = sizes.iter().map(|&n| (n, eval(n))).collect();
        let fit = fit4(&points, FitBasis::InversePowers).unwrap();
        for (a, b) in fit.coefficients.iter().zip(c) {
            prop_assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()), "{a} vs {b}");
        }
        // Prediction agrees off the grid too.
        let probe = sizes[3] + 7;
        prop_assert!((fit.predict(probe as f64) - eval(probe)).abs() < 1e-6);
    }

    /// erfc reflection identity and positivity over a wide range.
    #[test]
    fn erfc_reflection(x in -8.0f64..8.0) {
        prop_assert!((erfc(x) + erfc(-x) - 2.0).abs() < 1e-13);
        // At x <= -7.5 or so, 2 - erfc(-x) rounds to exactly 2.0 in f64.
        prop_assert!(erfc(x) > 0.0 && erfc(x) <= 2.0);
    }

    /// erfc is monotone decreasing.
    #[test]
    fn erfc_monotone(x in -8.0f64..8.0, d in 1e-3f64..2.0) {
        prop_assert!(erfc(x + d) <= erfc(x) + 1e-14);
    }
}

/// CalI symmetry I(k1,k2) + I(k2,k1) = k1! k2! on a random sample of small
/// index pairs (the acceptance suite covers a coarse grid up to 200).
#[test]
fn cal_i_symmetry_small() {
    let t = CalITable::new(40);
    for k1 in 0..=40usize {
        for k2 in 0..=40usize {
            assert_eq!(
                t.get(k1, k2) + t.get(k2, k1),
                BigRational::from(factorial(k1) * factorial(k2)),
                "({k1},{k2})"
            );
        }
    }
}
