//! Perturbation of the soft-disk moments around `Gamma = 2`: the triangular
//! integrals `I(k1, k2)`, their recurrences and erfc asymptotics, and the
//! first-order coefficients `m_tilde_1 + m_tilde_2 + m_tilde_3` in
//! `M_N = M_N|_{Gamma=2} - (Gamma - 2)(m1~ + m2~ + m3~) + O((Gamma-2)^2)`.
//!
//! The companion log-integral `J(k1, k2)` is never computed standalone: only
//! differences reducible to `I` through its recurrence enter the moment
//! formulas, and those reduced forms are what this module evaluates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{erfc, factorial, factorial_ratio, rational_to_f64};
use crate::reduce::par_sum;

fn pow2_inv(e: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << e)
}

/// Exact `I(k1, k2) = sum_{l=0}^{k1} 2^(-k2-l-1) (k2+l)! k1! / l!`, evaluated
/// with an incrementally updated term.  Independent of [`CalITable`], which
/// builds the same values through the recurrence; the two cross-check each
/// other.
pub fn cal_i(k1: usize, k2: usize) -> BigRational {
    // term_0 = 2^(-k2-1) k2! k1!; term_{l+1} = term_l * (k2+l+1) / (2(l+1)).
    let mut term = pow2_inv(k2 + 1) * BigRational::from(factorial(k2) * factorial(k1));
    let mut sum = term.clone();
    for l in 0..k1 {
        term *= BigRational::new(BigInt::from(k2 + l + 1), BigInt::from(2 * (l + 1)));
        sum += &term;
    }
    sum
}

/// Exact ratio `I(k1, k2) / (k1! k2!)`, kept in small rationals so diagonal
/// scans at large `k` stay cheap.
pub fn cal_i_ratio(k1: usize, k2: usize) -> BigRational {
    // ratio = sum_{l=0}^{k1} 2^(-k2-l-1) (k2+l)! / (l! k2!).
    let mut term = pow2_inv(k2 + 1);
    let mut sum = term.clone();
    for l in 0..k1 {
        term *= BigRational::new(BigInt::from(k2 + l + 1), BigInt::from(2 * (l + 1)));
        sum += &term;
    }
    sum
}

/// Steepest-descent approximation
/// `I(k1,k2)/(k1! k2!) ~ (1/2) erfc((k2-k1)/sqrt(2(k1+k2)))`.
pub fn cal_i_asymptotic(k1: usize, k2: usize) -> f64 {
    assert!(k1 + k2 >= 1, "asymptotic form needs k1 + k2 >= 1");
    let arg = (k2 as f64 - k1 as f64) / (2.0 * (k1 + k2) as f64).sqrt();
    0.5 * erfc(arg)
}

/// Square table of exact `I(k1, k2)` for `0 <= k1, k2 <= max_k`, built by the
/// base column `I(0, k2) = k2!/2^(k2+1)` and the recurrence
/// `I(k1+1, k2) = (k1+1) I(k1, k2) + 2^(-k1-k2-2) (k1+k2+1)!`.
#[derive(Debug, Clone)]
pub struct CalITable {
    max_k: usize,
    values: Vec<Vec<BigRational>>,
}

impl CalITable {
    pub fn new(max_k: usize) -> CalITable {
        let mut values = Vec::with_capacity(max_k + 1);
        let mut base: Vec<BigRational> = Vec::with_capacity(max_k + 1);
        for k2 in 0..=max_k {
            base.push(pow2_inv(k2 + 1) * BigRational::from(factorial(k2)));
        }
        values.push(base);
        for k1 in 0..max_k {
            let row: Vec<BigRational> = values[k1]
                .iter()
                .enumerate()
                .map(|(k2, prev)| {
                    BigRational::from(BigInt::from(k1 as u64 + 1)) * prev
                        + pow2_inv(k1 + k2 + 2) * BigRational::from(factorial(k1 + k2 + 1))
                })
                .collect();
            values.push(row);
        }
        CalITable { max_k, values }
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }

    pub fn get(&self, k1: usize, k2: usize) -> &BigRational {
        &self.values[k1][k2]
    }
}

/// Largest `N` accepted by the exact [`m_tilde`] evaluation (O(N^2) rational
/// operations on big factorials).
pub const M_TILDE_EXACT_LIMIT: usize = 512;

/// Exact first-order coefficients `(m1~, m2~, m3~)` of the `(Gamma - 2)`
/// expansion of the `2n`-th disk moment, evaluated with the exact `I` table.
pub fn m_tilde(n_particles: usize, n: u32) -> Result<(BigRational, BigRational, BigRational)> {
    if n_particles == 0 {
        return Err(Error::InvalidParams("need N >= 1".into()));
    }
    if n_particles > M_TILDE_EXACT_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "exact m_tilde limited to N <= {M_TILDE_EXACT_LIMIT} (got {n_particles}); \
             use m_tilde_f64"
        )));
    }
    let n_usize = n as usize;
    if n == 0 {
        let z = BigRational::zero();
        return Ok((z.clone(), z.clone(), z));
    }
    let big_n = n_particles;
    let table = CalITable::new(big_n - 1 + n_usize);
    let scale = BigRational::new(BigInt::one(), BigInt::from(big_n as u64).pow(n));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));

    // m1~ = N^{-n}/2 [ sum_k1 n (k1+n)!/k1!
    //                  - sum_{k1 != k2} A(k1)/(k1! k2!) I(k1,k2) ]
    // with A(k1) = sum_{l=0}^{n-1} (k1+n)!/(k1! (k1+1+l)).
    let m1_rows = par_sum(big_n, |k1| {
        let ff = BigRational::from(factorial_ratio(k1, n_usize));
        let mut a = BigRational::zero();
        for l in 0..n_usize {
            a += &ff / BigRational::from(BigInt::from((k1 + 1 + l) as u64));
        }
        let mut row = BigRational::from(BigInt::from(n as u64)) * &ff;
        let inv_k1f = BigRational::new(BigInt::one(), factorial(k1));
        for k2 in 0..big_n {
            if k2 == k1 {
                continue;
            }
            row -=
                &a * &inv_k1f * BigRational::new(BigInt::one(), factorial(k2)) * table.get(k1, k2);
        }
        row
    });
    let m1 = &scale * &half * m1_rows;

    // m2~ = -N^{-n}/2 sum_{k1 != k2} 1/(k1! k2!) sum_l (k1+n)!/(k1+1+l)!
    //        [ I(k1+l, k2) - (k1+l)!/k1! I(k1, k2) ].
    let m2_rows = par_sum(big_n, |k1| {
        let k1n_fact = factorial(k1 + n_usize);
        let mut row = BigRational::zero();
        for k2 in 0..big_n {
            if k2 == k1 {
                continue;
            }
            let mut inner = BigRational::zero();
            for l in 0..n_usize {
                let coeff = BigRational::new(k1n_fact.clone(), factorial(k1 + 1 + l));
                let shift = table.get(k1 + l, k2)
                    - BigRational::from(factorial_ratio(k1, l)) * table.get(k1, k2);
                inner += coeff * shift;
            }
            row += inner * BigRational::new(BigInt::one(), factorial(k1) * factorial(k2));
        }
        row
    });
    let m2 = -(&scale * &half * m2_rows);

    // m3~ = N^{-n} sum_{k1 < k2}
    //        [ (k1+n)!/k1! I(k1,k2) - I(k1+n,k2)
    //        + (k2+n)!/k2! I(k1,k2) - I(k1,k2+n) ] / (k1! k2! (k2-k1)).
    let m3_rows = par_sum(big_n, |k1| {
        let ff1 = BigRational::from(factorial_ratio(k1, n_usize));
        let mut row = BigRational::zero();
        for k2 in (k1 + 1)..big_n {
            let ff2 = BigRational::from(factorial_ratio(k2, n_usize));
            let num = &ff1 * table.get(k1, k2) - table.get(k1 + n_usize, k2)
                + &ff2 * table.get(k1, k2)
                - table.get(k1, k2 + n_usize);
            row += num
                / BigRational::from(factorial(k1) * factorial(k2) * BigInt::from((k2 - k1) as u64));
        }
        row
    });
    let m3 = &scale * m3_rows;

    Ok((m1, m2, m3))
}

/// Floating-point fast path for [`m_tilde`], O(N^2) double-precision work via
/// the ratio recurrences `R(k1,k2) = I(k1,k2)/(k1! k2!)`.  Error is governed
/// by cancellation in the `R` differences; agreement with the exact values is
/// better than 1e-9 relative for the supported `n <= 4`.
pub fn m_tilde_f64(n_particles: usize, n: u32) -> (f64, f64, f64) {
    let n_usize = n as usize;
    if n == 0 || n_particles == 0 {
        return (0.0, 0.0, 0.0);
    }
    let big_n = n_particles;
    let max_k = big_n - 1 + n_usize;
    // r[k1][k2] = I(k1,k2)/(k1! k2!); r(0,k2) = 2^(-k2-1);
    // r(k1+1,k2) = r(k1,k2) + inc, inc(0,k2) = (k2+1)/2^(k2+2),
    // inc(k1+1,k2) = inc(k1,k2) (k1+k2+2)/(2(k1+2)).
    let mut r = vec![vec![0.0f64; max_k + 1]; max_k + 1];
    #[allow(clippy::needless_range_loop)] // fills one column across all rows
    for k2 in 0..=max_k {
        r[0][k2] = 0.5f64.powi(k2 as i32 + 1);
        let mut inc = (k2 as f64 + 1.0) * 0.5f64.powi(k2 as i32 + 2);
        for k1 in 0..max_k {
            r[k1 + 1][k2] = r[k1][k2] + inc;
            inc *= (k1 + k2 + 2) as f64 / (2.0 * (k1 + 2) as f64);
        }
    }
    let ff = |k: usize, m: usize| -> f64 {
        let mut acc = 1.0;
        for i in 1..=m {
            acc *= (k + i) as f64;
        }
        acc
    };
    let scale = (big_n as f64).powi(-(n as i32));

    let mut m1 = 0.0;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    for k1 in 0..big_n {
        let ff1 = ff(k1, n_usize);
        let mut a = 0.0;
        for l in 0..n_usize {
            a += ff1 / (k1 + 1 + l) as f64;
        }
        m1 += n as f64 * ff1;
        for k2 in 0..big_n {
            if k2 == k1 {
                continue;
            }
            m1 -= a * r[k1][k2];
            let mut inner = 0.0;
            for l in 0..n_usize {
                // (k1+n)!/(k1+1+l)! * (k1+l)!/k1! * [R(k1+l,k2) - R(k1,k2)]
                let mut coeff = 1.0;
                for i in (k1 + 1 + l + 1)..=(k1 + n_usize) {
                    coeff *= i as f64;
                }
                coeff *= ff(k1, l);
                inner += coeff * (r[k1 + l][k2] - r[k1][k2]);
            }
            m2 += inner;
            if k2 > k1 {
                let ff2 = ff(k2, n_usize);
                let num = ff1 * (r[k1][k2] - r[k1 + n_usize][k2])
                    + ff2 * (r[k1][k2] - r[k1][k2 + n_usize]);
                m3 += num / (k2 - k1) as f64;
            }
        }
    }
    (scale * m1 / 2.0, -scale * m2 / 2.0, scale * m3)
}

/// First-order-in-`(Gamma - 2)` prediction for the `2n`-th disk moment:
/// `M_N|_{Gamma=2} - (Gamma - 2)(m1~ + m2~ + m3~)`.  Exact coefficients are
/// used up to `N = 64`; beyond that the f64 fast path takes over.
pub fn m_moment_linearized(n_particles: usize, n: u32, gamma: f64) -> Result<f64> {
    let base = rational_to_f64(&crate::disk::m_gamma2_closed(n_particles, n));
    let slope = if n_particles <= 64 {
        let (m1, m2, m3) = m_tilde(n_particles, n)?;
        rational_to_f64(&(m1 + m2 + m3))
    } else {
        let (m1, m2, m3) = m_tilde_f64(n_particles, n);
        m1 + m2 + m3
    };
    Ok(base - (gamma - 2.0) * slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cal_i_base_values() {
        assert_eq!(cal_i(0, 0), rat(1, 2));
        assert_eq!(cal_i(1, 0), rat(3, 4));
        assert_eq!(cal_i(0, 1), rat(1, 4));
    }

    #[test]
    fn table_matches_sum_formula() {
        let t = CalITable::new(12);
        for k1 in 0..=12 {
            for k2 in 0..=12 {
                assert_eq!(t.get(k1, k2), &cal_i(k1, k2), "({k1},{k2})");
                assert_eq!(
                    cal_i_ratio(k1, k2),
                    &cal_i(k1, k2) / BigRational::from(factorial(k1) * factorial(k2)),
                    "ratio ({k1},{k2})"
                );
            }
        }
    }

    #[test]
    fn symmetry_and_recurrence() {
        let t = CalITable::new(30);
        for k1 in 0..=30usize {
            for k2 in 0..=30usize {
                assert_eq!(
                    t.get(k1, k2) + t.get(k2, k1),
                    BigRational::from(factorial(k1) * factorial(k2)),
                    "symmetry ({k1},{k2})"
                );
                if k1 < 30 {
                    let lhs = t.get(k1 + 1, k2)
                        - BigRational::from(BigInt::from(k1 as u64 + 1)) * t.get(k1, k2);
                    let rhs = pow2_inv(k1 + k2 + 2) * BigRational::from(factorial(k1 + k2 + 1));
                    assert_eq!(lhs, rhs, "recurrence ({k1},{k2})");
                }
            }
        }
    }

    #[test]
    fn asymptotic_limits() {
        // Equal arguments: the symmetry I(k,k) + I(k,k) = (k!)^2 forces the
        // ratio to be exactly 1/2, matching erfc(0)/2.
        let ratio = rational_to_f64(&cal_i_ratio(100, 100));
        assert!((ratio - 0.5).abs() < 1e-12, "ratio={ratio}");
        assert!((cal_i_asymptotic(100, 100) - 0.5).abs() < 1e-12);
        // k1 >> k2: ratio near 1; k2 >> k1: near 0.
        assert!(rational_to_f64(&cal_i_ratio(200, 50)) > 0.999);
        assert!(rational_to_f64(&cal_i_ratio(50, 200)) < 1e-3);
        assert!(cal_i_asymptotic(200, 50) > 0.999);
        assert!(cal_i_asymptotic(50, 200) < 1e-3);
    }

    #[test]
    fn m_tilde_n0_and_n1() {
        for big_n in [1usize, 2, 5, 16] {
            let (m1, m2, m3) = m_tilde(big_n, 0).unwrap();
            assert!(m1.is_zero() && m2.is_zero() && m3.is_zero());
            let (m1, m2, m3) = m_tilde(big_n, 1).unwrap();
            assert_eq!(m1, rat(1, 2), "N={big_n}");
            assert!(m2.is_zero() && m3.is_zero(), "N={big_n}");
        }
    }

    #[test]
    fn m2_plus_m3_vanishes_small_n() {
        for big_n in [2usize, 3, 6, 12] {
            for n in 0..=3u32 {
                let (_, m2, m3) = m_tilde(big_n, n).unwrap();
                assert!((m2 + m3).is_zero(), "N={big_n} n={n}");
            }
        }
    }

    #[test]
    fn float_path_matches_exact() {
        for big_n in [4usize, 16, 32] {
            for n in 1..=4u32 {
                let (e1, e2, e3) = m_tilde(big_n, n).unwrap();
                let (f1, f2, f3) = m_tilde_f64(big_n, n);
                for (e, f) in [(e1.clone(), f1), (e2.clone(), f2), (e3.clone(), f3)] {
                    let e = rational_to_f64(&e);
                    let scale = e.abs().max(1.0);
                    assert!(
                        (e - f).abs() / scale < 1e-9,
                        "N={big_n} n={n}: exact={e} float={f}"
                    );
                }
            }
        }
    }

    #[test]
    fn m_tilde1_approaches_half_n() {
        // m1~ -> n/2 as N grows; check the trend for n = 4.
        let (a, _, _) = m_tilde(16, 4).unwrap();
        let (b, _, _) = m_tilde(64, 4).unwrap();
        let da = (rational_to_f64(&a) - 2.0).abs();
        let db = (rational_to_f64(&b) - 2.0).abs();
        assert!(db < da, "|m1~(16,4)-2|={da}, |m1~(64,4)-2|={db}");
    }

    #[test]
    fn linearized_moment() {
        for big_n in [2usize, 5, 9] {
            let at2 = m_moment_linearized(big_n, 3, 2.0).unwrap();
            let closed = rational_to_f64(&crate::disk::m_gamma2_closed(big_n, 3));
            assert!((at2 - closed).abs() < 1e-15);
            // n = 1: slope is exactly -1/2 for every N.
            let dg = 0.125;
            let up = m_moment_linearized(big_n, 1, 2.0 + dg).unwrap();
            let base = m_moment_linearized(big_n, 1, 2.0).unwrap();
            assert!(((up - base) / dg + 0.5).abs() < 1e-12, "N={big_n}");
        }
        assert!(matches!(
            m_tilde(M_TILDE_EXACT_LIMIT + 1, 2),
            Err(Error::ResourceLimit(_))
        ));
    }
}
