//! Finite-size extrapolation: exact four-point interpolation in the two
//! expansion bases used by the moment tables.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::rational_to_f64;

/// Expansion basis for the four-point fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitBasis {
    /// `{1, 1/N, 1/N^2, 1/N^3}` — sphere-moment tables.
    InversePowers,
    /// `{N, 1, 1/sqrt(N), 1/N}` — disk-mean tables.
    DiskMean,
}

/// Result of a four-point interpolation: the coefficients in basis order and
/// the largest relative deviation of the fitted curve from the input points.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub basis: FitBasis,
    pub anchor_n: usize,
    pub coefficients: [f64; 4],
    pub residual: f64,
}

impl FitResult {
    /// Evaluate the fitted curve at (possibly non-integer) `n`.
    pub fn predict(&self, n: f64) -> f64 {
        let c = &self.coefficients;
        match self.basis {
            FitBasis::InversePowers => c[0] + c[1] / n + c[2] / (n * n) + c[3] / (n * n * n),
            FitBasis::DiskMean => c[0] * n + c[1] + c[2] / n.sqrt() + c[3] / n,
        }
    }
}

/// Solve a 4x4 system in f64 with partial pivoting.
fn solve4_f64(mut a: [[f64; 5]; 4]) -> Result<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot);
        let pivot_row = a[col];
        for row in a.iter_mut().skip(col + 1) {
            let f = row[col] / pivot_row[col];
            for (k, &p) in pivot_row.iter().enumerate().skip(col) {
                row[k] -= f * p;
            }
        }
    }
    let mut x = [0.0f64; 4];
    for col in (0..4).rev() {
        let mut s = a[col][4];
        for k in (col + 1)..4 {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Ok(x)
}

/// Solve a 4x4 system exactly in rationals (fraction-free elimination).
fn solve4_exact(mut a: Vec<Vec<BigRational>>) -> Result<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4).find(|&i| !a[i][col].is_zero());
        let pivot = pivot.ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] / &pivot_row[col];
            for (k, p) in pivot_row.iter().enumerate().skip(col) {
                let sub = &f * p;
                row[k] -= sub;
            }
        }
    }
    let mut x = vec![BigRational::zero(); 4];
    for col in (0..4).rev() {
        let mut s = a[col][4].clone();
        for k in (col + 1)..4 {
            s -= &a[col][k] * &x[k];
        }
        x[col] = s / &a[col][col];
    }
    Ok([
        rational_to_f64(&x[0]),
        rational_to_f64(&x[1]),
        rational_to_f64(&x[2]),
        rational_to_f64(&x[3]),
    ])
}

/// Interpolate exactly four `(N, value)` points in the given basis.  The
/// inverse-powers system is solved exactly in rationals (the inputs convert
/// losslessly from binary floating point); the disk-mean basis contains the
/// irrational `1/sqrt(N)` and is solved in f64 with partial pivoting.
pub fn fit4(points: &[(usize, f64)], basis: FitBasis) -> Result<FitResult> {
    if points.len() != 4 {
        return Err(Error::InvalidParams(format!(
            "fit4 needs exactly 4 points (got {})",
            points.len()
        )));
    }
    for w in 0..4 {
        for v in (w + 1)..4 {
            if points[w].0 == points[v].0 {
                return Err(Error::InvalidParams(format!(
                    "duplicate N = {} in fit points",
                    points[w].0
                )));
            }
        }
        if points[w].0 == 0 {
            return Err(Error::InvalidParams("fit points need N >= 1".into()));
        }
    }
    let anchor_n = points.iter().map(|&(n, _)| n).max().unwrap();
    let coefficients = match basis {
        FitBasis::InversePowers => {
            let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(4);
            for &(n, v) in points {
                let n = BigRational::from(BigInt::from(n as u64));
                let one = BigRational::from(BigInt::from(1));
                let inv = &one / &n;
                let value = BigRational::from_f64(v)
                    .ok_or_else(|| Error::InvalidParams(format!("non-finite fit value {v}")))?;
                rows.push(vec![
                    one.clone(),
                    inv.clone(),
                    &inv * &inv,
                    &inv * &inv * &inv,
                    value,
                ]);
            }
            solve4_exact(rows)?
        }
        FitBasis::DiskMean => {
            let mut a = [[0.0f64; 5]; 4];
            for (row, &(n, v)) in points.iter().enumerate() {
                let nf = n as f64;
                a[row] = [nf, 1.0, 1.0 / nf.sqrt(), 1.0 / nf, v];
            }
            solve4_f64(a)?
        }
    };
    let partial = FitResult {
        basis,
        anchor_n,
        coefficients,
        residual: 0.0,
    };
    let residual = points
        .iter()
        .map(|&(n, v)| {
            let pred = partial.predict(n as f64);
            (pred - v).abs() / v.abs().max(1.0)
        })
        .fold(0.0f64, f64::max);
    Ok(FitResult {
        residual,
        ..partial
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_data_inverse_powers() {
        let pts = [(2usize, 7.0), (3, 7.0), (4, 7.0), (5, 7.0)];
        let fit = fit4(&pts, FitBasis::InversePowers).unwrap();
        assert_eq!(fit.anchor_n, 5);
        assert!((fit.coefficients[0] - 7.0).abs() < 1e-14);
        for c in &fit.coefficients[1..] {
            assert!(c.abs() < 1e-12);
        }
        assert!(fit.residual <= 1e-12);
    }

    #[test]
    fn synthetic_inverse_powers_exact() {
        // value = 2 - 3/N + 5/N^2 - 7/N^3 at N in 2..=5 (exact in f64).
        let f = |n: f64| 2.0 - 3.0 / n + 5.0 / (n * n) - 7.0 / (n * n * n);
        let pts: Vec<(usize, f64)> = (2..=5).map(|n| (n, f(n as f64))).collect();
        let fit = fit4(&pts, FitBasis::InversePowers).unwrap();
        let expect = [2.0, -3.0, 5.0, -7.0];
        for (c, e) in fit.coefficients.iter().zip(expect) {
            assert!((c - e).abs() < 1e-10, "{c} vs {e}");
        }
        assert!(fit.residual <= 1e-12);
    }

    #[test]
    fn synthetic_disk_mean() {
        let f = |n: f64| 3.0 * n + 2.0 - 1.0 / n.sqrt();
        let pts: Vec<(usize, f64)> = (3..=6).map(|n| (n, f(n as f64))).collect();
        let fit = fit4(&pts, FitBasis::DiskMean).unwrap();
        let expect = [3.0, 2.0, -1.0, 0.0];
        for (c, e) in fit.coefficients.iter().zip(expect) {
            assert!((c - e).abs() < 1e-9, "{c} vs {e}");
        }
        assert!(fit.residual <= 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fit4(&[(2, 1.0), (3, 1.0), (4, 1.0)], FitBasis::InversePowers).is_err());
        assert!(fit4(
            &[(2, 1.0), (2, 1.0), (4, 1.0), (5, 1.0)],
            FitBasis::InversePowers
        )
        .is_err());
    }

    #[test]
    fn interpolation_passes_through_points() {
        let pts = [(4usize, -0.4), (5, 0.3), (7, 1.9), (11, -2.5)];
        for basis in [FitBasis::InversePowers, FitBasis::DiskMean] {
            let fit = fit4(&pts, basis).unwrap();
            for &(n, v) in &pts {
                assert!((fit.predict(n as f64) - v).abs() < 1e-10, "{basis:?} N={n}");
            }
        }
    }
}
