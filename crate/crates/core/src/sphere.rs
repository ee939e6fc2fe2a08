//! Sphere observables: the exact partition sum, pair-correlation moments
//! `I_hat_{2n}`, the second-moment sum rule, the density-constancy identity,
//! `Gamma = 2` closed forms, and thermodynamic-limit reference constants.
//!
//! Conventions: `K = (N-1) Gamma / 2` is the maximal single-particle degree;
//! every sum runs over the coefficient table's admissible partitions with the
//! orbit weight `c_mu^2 / prod m_i!`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expansion::CoefficientTable;
use crate::numeric::{binomial, factorial, factorial_ratio, Decimal};
use crate::partitions::Partition;
use crate::reduce::{par_sum, serial_sum};

/// One row of a moment table: `(N, Gamma, n)` with the exact value and its
/// 15-digit rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRecord {
    pub n_particles: usize,
    pub gamma: u32,
    pub n: u32,
    pub value: BigRational,
    pub decimal: Decimal,
}

impl MomentRecord {
    fn new(n_particles: usize, gamma: u32, n: u32, value: BigRational) -> MomentRecord {
        let decimal = Decimal::from_rational(&value);
        MomentRecord {
            n_particles,
            gamma,
            n,
            value,
            decimal,
        }
    }
}

/// Maximal single-particle degree `K = (N-1) Gamma / 2`.
fn degree_cap(table: &CoefficientTable) -> usize {
    (table.n() - 1) * table.gamma() as usize / 2
}

/// Orbit denominator `prod_i m_i!` over the multiplicities of the parts.
fn orbit_denominator(mu: &Partition) -> BigInt {
    let mut d = BigInt::one();
    for (_, m) in mu.frequencies() {
        d *= factorial(m as usize);
    }
    d
}

/// Orbit weight `c^2 / prod m_i!`.
fn orbit_weight(c: &BigInt, mu: &Partition) -> BigRational {
    BigRational::new(c * c, orbit_denominator(mu))
}

fn z_term(table: &CoefficientTable, k_cap: usize, i: usize) -> BigRational {
    let mu = &table.set().members()[i];
    let mut prod = BigInt::one();
    for &l in mu.parts() {
        prod *= factorial(l as usize) * factorial(k_cap - l as usize);
    }
    orbit_weight(table.coefficient(i), mu) * BigRational::from(prod)
}

/// Exact sphere partition sum
/// `Z = sum_mu (c_mu^2 / prod m_i!) prod_{l=1}^{N} mu_l! (K - mu_l)!`.
pub fn z_sphere(table: &CoefficientTable) -> BigRational {
    let k_cap = degree_cap(table);
    par_sum(table.len(), |i| z_term(table, k_cap, i))
}

/// Sequential evaluation of [`z_sphere`]; identical result.
pub fn z_sphere_serial(table: &CoefficientTable) -> BigRational {
    let k_cap = degree_cap(table);
    serial_sum(table.len(), |i| z_term(table, k_cap, i))
}

/// Indices of members with `mu_N = 0` (one particle pinned at the pole).
fn restricted_indices(table: &CoefficientTable) -> Vec<usize> {
    table
        .set()
        .members()
        .iter()
        .enumerate()
        .filter(|(_, m)| *m.parts().last().expect("nonempty partition") == 0)
        .map(|(i, _)| i)
        .collect()
}

fn restricted_term(table: &CoefficientTable, k_cap: usize, n: u32, i: usize) -> BigRational {
    let mu = &table.set().members()[i];
    let parts = mu.parts();
    let last = parts.len() - 1;
    let mut prod = BigInt::one();
    for &l in &parts[..last] {
        prod *= factorial(l as usize) * factorial(k_cap - l as usize);
    }
    let mut inner = BigInt::zero();
    for &l in &parts[..last] {
        inner += factorial_ratio(l as usize, n as usize);
    }
    orbit_weight(table.coefficient(i), mu) * BigRational::from(prod * inner)
}

/// Restricted sum over `mu_N = 0`:
/// `S_n = sum (c^2/prod m!) prod_{l<N} mu_l!(K-mu_l)! sum_{k<N} (mu_k+n)!/mu_k!`.
/// At `n = 0` the inner sum degenerates to `N-1`, which feeds the `x = 0`
/// partition-sum identity.
pub fn restricted_sum(table: &CoefficientTable, n: u32) -> BigRational {
    let k_cap = degree_cap(table);
    let idx = restricted_indices(table);
    par_sum(idx.len(), |t| restricted_term(table, k_cap, n, idx[t]))
}

/// Sequential evaluation of [`restricted_sum`]; identical result.
pub fn restricted_sum_serial(table: &CoefficientTable, n: u32) -> BigRational {
    let k_cap = degree_cap(table);
    let idx = restricted_indices(table);
    serial_sum(idx.len(), |t| restricted_term(table, k_cap, n, idx[t]))
}

fn i_hat_from_sums(
    table: &CoefficientTable,
    n: u32,
    z: BigRational,
    s_n: BigRational,
) -> MomentRecord {
    let n_particles = table.n();
    let gamma = table.gamma();
    let k_cap = degree_cap(table);
    let kf = factorial(k_cap + 1);
    let prefactor = BigRational::new(
        BigInt::from(n_particles as u64 * gamma as u64),
        BigInt::from(2),
    )
    .pow(n as i32);
    let normal = BigRational::new(
        &kf * &kf,
        BigInt::from(n_particles as u64) * factorial(k_cap + 1 + n as usize),
    ) / z;
    let background = BigRational::new(BigInt::from(n_particles as u64), BigInt::from(n as u64 + 1));
    let value = prefactor * (normal * s_n - background);
    MomentRecord::new(n_particles, gamma, n, value)
}

/// Exact `2n`-moment of the truncated pair correlation on the sphere:
/// `I_hat_{2n} = (N Gamma / 2)^n [ ((K+1)!)^2 / (N (K+1+n)! Z) * S_n - N/(n+1) ]`.
pub fn i_hat(table: &CoefficientTable, n: u32) -> Result<MomentRecord> {
    if n < 1 {
        return Err(Error::InvalidParams("i_hat requires n >= 1".into()));
    }
    Ok(i_hat_from_sums(
        table,
        n,
        z_sphere(table),
        restricted_sum(table, n),
    ))
}

/// Sequential evaluation of [`i_hat`]; identical result.
pub fn i_hat_serial(table: &CoefficientTable, n: u32) -> Result<MomentRecord> {
    if n < 1 {
        return Err(Error::InvalidParams("i_hat requires n >= 1".into()));
    }
    Ok(i_hat_from_sums(
        table,
        n,
        z_sphere_serial(table),
        restricted_sum_serial(table, n),
    ))
}

/// Second-moment sum rule: `I_hat_2 = N Gamma / (Gamma - N Gamma - 4)`.
pub fn i_hat2_exact(n_particles: usize, gamma: u32) -> BigRational {
    let n = BigInt::from(n_particles as u64);
    let g = BigInt::from(gamma as u64);
    BigRational::new(&n * &g, &g - &n * &g - BigInt::from(4))
}

/// Closed form at `Gamma = 2`: `I_hat_{2n} = -N^n n! N! / (N+n)!`.
pub fn i_hat_gamma2_closed(n_particles: usize, n: u32) -> BigRational {
    let num =
        BigInt::from(n_particles as u64).pow(n) * factorial(n as usize) * factorial(n_particles);
    -BigRational::new(num, factorial(n_particles + n as usize))
}

/// Verify the density-constancy polynomial identity: the coefficient of every
/// power of `x^2` in
/// `N (1+x^2)^K Z / (K+1)!` must match
/// `sum_mu w_mu prod_l mu_l!(K-mu_l)! sum_k x^{2 mu_k} / (mu_k!(K-mu_k)!)`.
/// Returns the largest absolute coefficient discrepancy (zero when exact).
pub fn density_constancy_check(table: &CoefficientTable) -> BigRational {
    let n_particles = table.n();
    let k_cap = degree_cap(table);
    let z = z_sphere(table);
    // rhs[j] accumulates sum over mu of w_mu * prod * #{k : mu_k = j}.
    let mut counts: Vec<BigRational> = vec![BigRational::zero(); k_cap + 1];
    for (i, mu) in table.set().members().iter().enumerate() {
        let mut prod = BigInt::one();
        for &l in mu.parts() {
            prod *= factorial(l as usize) * factorial(k_cap - l as usize);
        }
        let w = orbit_weight(table.coefficient(i), mu) * BigRational::from(prod);
        for &l in mu.parts() {
            counts[l as usize] += &w;
        }
    }
    let kf = BigRational::from(factorial(k_cap + 1));
    let mut max_dev = BigRational::zero();
    for (j, count) in counts.iter().enumerate() {
        let lhs = BigRational::from(BigInt::from(n_particles as u64) * binomial(k_cap, j));
        let rhs = &kf / &z * count / BigRational::from(factorial(j) * factorial(k_cap - j));
        let dev = (lhs - rhs).abs();
        if dev > max_dev {
            max_dev = dev;
        }
    }
    max_dev
}

/// Thermodynamic-limit constants `(I_hat_4, I_hat_6) = (Gamma - 4,
/// (3/4)(Gamma-6)(8-3Gamma))`.
pub fn thermo_reference(gamma: u32) -> (BigRational, BigRational) {
    let g = BigInt::from(gamma as i64);
    let i4 = BigRational::from(&g - BigInt::from(4));
    let i6 = BigRational::new(
        BigInt::from(3) * (&g - BigInt::from(6)) * (BigInt::from(8) - BigInt::from(3) * &g),
        BigInt::from(4),
    );
    (i4, i6)
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
    fn z_sphere_small_values() {
        assert_eq!(z_sphere(&table(2, 4)), rat(6, 1));
        // Gamma = 2 single-partition case; forced by the x = 0 identity
        // N Z = (K+1)! S_0.
        assert_eq!(z_sphere(&table(2, 2)), rat(1, 1));
        assert!(z_sphere(&table(4, 6)).is_positive());
    }

    #[test]
    fn z_parallel_matches_serial() {
        let t = table(5, 4);
        assert_eq!(z_sphere(&t), z_sphere_serial(&t));
        assert_eq!(restricted_sum(&t, 2), restricted_sum_serial(&t, 2));
    }

    #[test]
    fn x0_partition_identity() {
        for (n, gamma) in [
            (2usize, 4u32),
            (3, 4),
            (4, 4),
            (3, 6),
            (3, 8),
            (4, 2),
            (6, 2),
        ] {
            let t = table(n, gamma);
            let k_cap = (n - 1) * gamma as usize / 2;
            let lhs = BigRational::from(BigInt::from(n as u64)) * z_sphere(&t);
            // S_0 has inner factor N-1 per member; divide it out.
            let s0 = restricted_sum(&t, 0) / rat(n as i64 - 1, 1);
            let rhs = BigRational::from(factorial(k_cap + 1)) * s0;
            assert_eq!(lhs, rhs, "N={n} gamma={gamma}");
        }
    }

    #[test]
    fn i_hat4_n2_gamma4() {
        let rec = i_hat(&table(2, 4), 2).unwrap();
        assert_eq!(rec.value, rat(-16, 15));
        assert_eq!(rec.decimal.text, "-1.06666666666667");
    }

    #[test]
    fn sum_rule_i2() {
        for (n, gamma) in [
            (2usize, 4u32),
            (3, 4),
            (4, 4),
            (5, 4),
            (3, 6),
            (4, 6),
            (3, 8),
            (5, 2),
        ] {
            let t = table(n, gamma);
            assert_eq!(
                i_hat(&t, 1).unwrap().value,
                i_hat2_exact(n, gamma),
                "N={n} gamma={gamma}"
            );
        }
    }

    #[test]
    fn i_hat2_exact_examples() {
        assert_eq!(i_hat2_exact(2, 4), rat(-1, 1));
        // Large-N limit approaches -1.
        let big = i_hat2_exact(1_000_000, 4);
        assert!((crate::numeric::rational_to_f64(&big) + 1.0).abs() < 1e-5);
        assert_eq!(i_hat2_exact(1, 6), rat(6, -4).reduced());
    }

    #[test]
    fn gamma2_closed_forms_match_engine() {
        for n in 2..=6usize {
            let t = table(n, 2);
            for order in 1..=4u32 {
                assert_eq!(
                    i_hat(&t, order).unwrap().value,
                    i_hat_gamma2_closed(n, order),
                    "N={n} n={order}"
                );
            }
        }
        assert_eq!(i_hat_gamma2_closed(2, 2), rat(-2, 3));
        assert_eq!(i_hat_gamma2_closed(2, 3), rat(-4, 5));
        assert_eq!(i_hat_gamma2_closed(7, 0), rat(-1, 1));
    }

    #[test]
    fn density_constancy_zero() {
        for (n, gamma) in [(2usize, 4u32), (3, 4), (4, 4), (3, 6), (3, 8), (5, 2)] {
            assert!(
                density_constancy_check(&table(n, gamma)).is_zero(),
                "N={n} gamma={gamma}"
            );
        }
    }

    #[test]
    fn thermo_reference_rows() {
        assert_eq!(thermo_reference(4), (rat(0, 1), rat(6, 1)));
        assert_eq!(thermo_reference(6), (rat(2, 1), rat(0, 1)));
        assert_eq!(thermo_reference(8), (rat(4, 1), rat(-24, 1)));
    }

    #[test]
    fn i_hat6_n4_gamma4_matches_table() {
        let rec = i_hat(&table(4, 4), 3).unwrap();
        assert_eq!(rec.decimal.text, "5.1605471562275");
    }
}
