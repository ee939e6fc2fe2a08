//! Soft-disk observables: the partition sum, density moments `M_N`, the exact
//! characteristic function of `sum |r_j|^2`, and the O(1) mean-correction
//! prediction.  Units fixed by `R = 1`, `pi rho_b = N`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

use crate::error::Result;
use crate::expansion::CoefficientTable;
use crate::numeric::{factorial, factorial_ratio};
use crate::partitions::Partition;
use crate::reduce::{par_sum, serial_sum};
use crate::sphere::MomentRecord;

/// One row of a disk-moment table; same shape as the sphere records.
pub type DiskMoment = MomentRecord;

fn orbit_weight(c: &BigInt, mu: &Partition) -> BigRational {
    let mut d = BigInt::one();
    for (_, m) in mu.frequencies() {
        d *= factorial(m as usize);
    }
    BigRational::new(c * c, d)
}

fn z_term(table: &CoefficientTable, i: usize) -> BigRational {
    let mu = &table.set().members()[i];
    let mut prod = BigInt::one();
    for &l in mu.parts() {
        prod *= factorial(l as usize);
    }
    orbit_weight(table.coefficient(i), mu) * BigRational::from(prod)
}

/// Exact soft-disk partition sum `Z = sum_mu (c_mu^2/prod m_i!) prod_l mu_l!`.
pub fn z_soft(table: &CoefficientTable) -> BigRational {
    par_sum(table.len(), |i| z_term(table, i))
}

/// Sequential evaluation of [`z_soft`]; identical result.
pub fn z_soft_serial(table: &CoefficientTable) -> BigRational {
    serial_sum(table.len(), |i| z_term(table, i))
}

fn moment_term(table: &CoefficientTable, n: u32, i: usize) -> BigRational {
    let mu = &table.set().members()[i];
    let mut prod = BigInt::one();
    for &l in mu.parts() {
        prod *= factorial(l as usize);
    }
    let mut inner = BigInt::from(0);
    for &l in mu.parts() {
        inner += factorial_ratio(l as usize, n as usize);
    }
    orbit_weight(table.coefficient(i), mu) * BigRational::from(prod * inner)
}

fn m_from_sums(table: &CoefficientTable, n: u32, z: BigRational, s: BigRational) -> DiskMoment {
    let n_particles = table.n();
    let gamma = table.gamma();
    let prefactor = BigRational::new(
        BigInt::from(n_particles as u64 * gamma as u64),
        BigInt::from(2),
    )
    .pow(-(n as i32));
    let value = prefactor * s / z;
    let decimal = crate::numeric::Decimal::from_rational(&value);
    DiskMoment {
        n_particles,
        gamma,
        n,
        value,
        decimal,
    }
}

/// Exact `2n`-moment of the soft-disk density:
/// `M_N = (N Gamma/2)^{-n} / Z * sum_mu (c^2/prod m!) prod mu_l! sum_{k=1}^{N} (mu_k+n)!/mu_k!`.
pub fn m_moment(table: &CoefficientTable, n: u32) -> Result<DiskMoment> {
    let s = par_sum(table.len(), |i| moment_term(table, n, i));
    Ok(m_from_sums(table, n, z_soft(table), s))
}

/// Sequential evaluation of [`m_moment`]; identical result.
pub fn m_moment_serial(table: &CoefficientTable, n: u32) -> Result<DiskMoment> {
    let s = serial_sum(table.len(), |i| moment_term(table, n, i));
    Ok(m_from_sums(table, n, z_soft_serial(table), s))
}

/// Closed form at `Gamma = 2`: `M_N = N (N+n)! / (N^n (1+n) N!)`.
pub fn m_gamma2_closed(n_particles: usize, n: u32) -> BigRational {
    let num = BigInt::from(n_particles as u64) * factorial(n_particles + n as usize);
    let den = BigInt::from(n_particles as u64).pow(n)
        * BigInt::from(n as u64 + 1)
        * factorial(n_particles);
    BigRational::new(num, den)
}

/// Exact characteristic function of `sum_j |r_j|^2` in the soft disk:
/// `f(k) = (1 - 2ik/(Gamma N))^{-N - Gamma N (N-1)/4}` (with `pi rho_b = N`).
pub fn char_fn_r2(n_particles: usize, gamma: u32, k: f64) -> Complex64 {
    let n = n_particles as f64;
    let g = gamma as f64;
    let base = Complex64::new(1.0, -2.0 * k / (g * n));
    let exponent = -n - g * n * (n - 1.0) / 4.0;
    base.powf(exponent)
}

const CHAR_FN_STEP: f64 = 1e-4;

/// `ln f(k)` computed directly from the log of the base, via `ln_1p`/`atan`;
/// evaluating `f` itself and taking its log loses all precision at large `N`,
/// where `ln|f(k)|` is many orders below f64 epsilon.
fn log_char_fn_r2(n_particles: usize, gamma: u32, k: f64) -> Complex64 {
    let n = n_particles as f64;
    let g = gamma as f64;
    let t = 2.0 * k / (g * n);
    let exponent = -n - g * n * (n - 1.0) / 4.0;
    exponent * Complex64::new(0.5 * (t * t).ln_1p(), -t.atan())
}

/// Mean of `sum |r_j|^2` from the characteristic function by finite
/// differences with one Richardson refinement; equals `N/2 + 2/Gamma - 1/2`.
pub fn char_fn_mean(n_particles: usize, gamma: u32) -> f64 {
    let est = |h: f64| log_char_fn_r2(n_particles, gamma, h).im / h;
    let h = CHAR_FN_STEP;
    (4.0 * est(h / 2.0) - est(h)) / 3.0
}

/// Variance of `sum |r_j|^2` from the characteristic function (Richardson
/// refined); approaches `1/Gamma` as `N` grows.
pub fn char_fn_variance(n_particles: usize, gamma: u32) -> f64 {
    let est = |h: f64| -2.0 * log_char_fn_r2(n_particles, gamma, h).re / (h * h);
    let h = CHAR_FN_STEP;
    (4.0 * est(h / 2.0) - est(h)) / 3.0
}

/// Large-`N` two-term prediction for the `m`-th radial moment:
/// `M_N ~ 2N/(m+2) + (m/Gamma)(1 - Gamma/4)` with `m = 2n`.
pub fn mean_o1_prediction(n_particles: usize, gamma: u32, m: u32) -> f64 {
    let n = n_particles as f64;
    let g = gamma as f64;
    2.0 * n / (m as f64 + 2.0) + (m as f64 / g) * (1.0 - g / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{expand, PlasmaParams};

    fn table(n: usize, gamma: u32) -> CoefficientTable {
        expand(&PlasmaParams::new(n, gamma).unwrap()).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn z_soft_small_values() {
        assert_eq!(z_soft(&table(2, 4)), rat(4, 1));
        assert_eq!(z_soft(&table(2, 2)), rat(1, 1));
        assert!(z_soft(&table(4, 6)) > rat(0, 1));
    }

    #[test]
    fn parallel_matches_serial() {
        let t = table(5, 4);
        assert_eq!(z_soft(&t), z_soft_serial(&t));
        assert_eq!(
            m_moment(&t, 2).unwrap().value,
            m_moment_serial(&t, 2).unwrap().value
        );
    }

    #[test]
    fn fourth_moment_n2_gamma4() {
        let rec = m_moment(&table(2, 4), 2).unwrap();
        assert_eq!(rec.value, rat(13, 16));
        assert_eq!(rec.decimal.text, "0.8125");
    }

    #[test]
    fn n1_identity_and_normalization() {
        for (n, gamma) in [
            (2usize, 4u32),
            (3, 4),
            (4, 4),
            (3, 6),
            (3, 8),
            (5, 2),
            (2, 2),
        ] {
            let t = table(n, gamma);
            // M_N(n=1) = N/2 + (2/Gamma)(1 - Gamma/4).
            let expected =
                rat(n as i64, 2) + rat(2, gamma as i64) * (rat(1, 1) - rat(gamma as i64, 4));
            assert_eq!(
                m_moment(&t, 1).unwrap().value,
                expected,
                "N={n} gamma={gamma}"
            );
            // M_N(n=0) = N.
            assert_eq!(m_moment(&t, 0).unwrap().value, rat(n as i64, 1));
        }
    }

    #[test]
    fn gamma2_closed_forms() {
        assert_eq!(m_gamma2_closed(2, 1), rat(3, 2));
        assert_eq!(m_gamma2_closed(4, 2), rat(5, 2));
        assert_eq!(m_gamma2_closed(6, 0), rat(6, 1));
        for n in 2..=6usize {
            let t = table(n, 2);
            for order in 0..=4u32 {
                assert_eq!(
                    m_moment(&t, order).unwrap().value,
                    m_gamma2_closed(n, order),
                    "N={n} n={order}"
                );
            }
        }
    }

    #[test]
    fn char_fn_basics() {
        let f0 = char_fn_r2(5, 4, 0.0);
        assert!((f0.re - 1.0).abs() < 1e-15 && f0.im.abs() < 1e-15);
        for (n, gamma) in [(2usize, 4u32), (5, 6), (10, 2), (8, 8)] {
            let mean = char_fn_mean(n, gamma);
            let expected = n as f64 / 2.0 + 2.0 / gamma as f64 - 0.5;
            assert!(
                (mean - expected).abs() < 1e-6,
                "N={n} gamma={gamma} mean={mean}"
            );
        }
        // Second cumulant: exactly 1/Gamma + (4/Gamma^2 - 1/Gamma)/N; at
        // Gamma=4 the correction vanishes for every N.
        assert!((char_fn_variance(7, 4) - 0.25).abs() < 1e-6);
        let v = char_fn_variance(200, 6);
        assert!((v - 1.0 / 6.0).abs() < 1e-3, "variance={v}");
    }

    #[test]
    fn o1_prediction_rows() {
        assert!((mean_o1_prediction(9, 4, 4) - 3.0).abs() < 1e-12); // N/3 + 0
        assert!((mean_o1_prediction(9, 6, 4) - (3.0 - 1.0 / 3.0)).abs() < 1e-12);
        assert!((mean_o1_prediction(10, 8, 8) - (2.0 - 1.0)).abs() < 1e-12);
    }
}
