//! Ornstein-Zernike / Legendre diagrammatics on the sphere: the Coulomb
//! coefficients `v_l`, the chain-resummed kernel `K_l`, the watermelon
//! coefficients `m_1, m_2, m_3`, approximate total-correlation coefficients
//! `h_l`, and the resulting fourth/sixth-moment approximations.
//!
//! Everything with a closed form is exact rational; only the infinite series
//! for `m_2` (and the series cross-checks for `m_1`, `m_3`) are floating
//! point, summed with compensated (Kahan) addition under an analytic `1/l^3`
//! tail bound.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::numeric::rational_to_f64;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Coulomb coefficient on the sphere: `v_l = (2l+1)/(2l(l+1))`, `l >= 1`.
/// The `l = 0` coefficient is an arbitrary constant and never enters any
/// `l >= 1` observable, so it is excluded.
pub fn v_coulomb(l: u32) -> Result<BigRational> {
    if l == 0 {
        return Err(Error::InvalidParams(
            "v_0 is an arbitrary constant; only l >= 1 is defined".into(),
        ));
    }
    let l = l as i64;
    Ok(rat(2 * l + 1, 2 * l * (l + 1)))
}

/// Chain-resummed kernel coefficient `K_l = -Gamma(2l+1)/(2l(l+1) + N Gamma)`.
pub fn k_kernel(n_particles: usize, gamma: u32, l: u32) -> BigRational {
    let l = l as i64;
    let n = n_particles as i64;
    let g = gamma as i64;
    rat(-g * (2 * l + 1), 2 * l * (l + 1) + n * g)
}

/// Legendre linearization coefficient
/// `p_{lpp}^{l,lp} = (2 lpp + 1)/2 * integral of P_l P_lp P_lpp` for
/// `lpp in {1, 2, 3}`, from the closed Kronecker-delta forms.
pub fn legendre_product_coeff(l: u32, lp: u32, lpp: u32) -> Result<BigRational> {
    let zero = BigRational::from(BigInt::from(0));
    let li = l as i64;
    match lpp {
        1 => {
            if lp == l + 1 {
                Ok(rat(3, 2) * rat(2 * (li + 1), (2 * li + 1) * (2 * li + 3)))
            } else if lp + 1 == l {
                Ok(rat(3, 2) * rat(2 * li, (2 * li - 1) * (2 * li + 1)))
            } else {
                Ok(zero)
            }
        }
        2 => {
            if lp == l + 2 {
                Ok(rat(5, 4)
                    * rat(
                        6 * (li + 1) * (li + 2),
                        (2 * li + 1) * (2 * li + 3) * (2 * li + 5),
                    ))
            } else if lp + 2 == l {
                // Mirror image of the previous case.
                legendre_product_coeff(lp, l, 2)
            } else if lp == l {
                // Diagonal entry 5l(l+1)/((2l-1)(2l+1)(2l+3)).
                Ok(rat(
                    5 * li * (li + 1),
                    (2 * li - 1) * (2 * li + 1) * (2 * li + 3),
                ))
            } else {
                Ok(zero)
            }
        }
        3 => {
            let pref = rat(7, 2 * (2 * li + 1));
            let inner = if lp + 3 == l {
                rat(
                    5 * li * (li - 1) * (li - 2),
                    (2 * li - 1) * (2 * li - 3) * (2 * li - 5),
                )
            } else if lp + 1 == l {
                rat(
                    3 * li * (li * li - 1),
                    (2 * li - 3) * (2 * li + 3) * (2 * li - 1),
                )
            } else if lp == l + 3 {
                rat(
                    5 * (li + 1) * (li + 2) * (li + 3),
                    (2 * li + 3) * (2 * li + 5) * (2 * li + 7),
                )
            } else if lp == l + 1 {
                rat(
                    3 * (li + 1) * ((li + 1) * (li + 1) - 1),
                    (2 * li - 1) * (2 * li + 5) * (2 * li + 3),
                )
            } else {
                return Ok(zero);
            };
            Ok(pref * inner)
        }
        _ => Err(Error::InvalidParams(format!(
            "product coefficients implemented for lpp in 1..=3 (got {lpp})"
        ))),
    }
}

/// Telescoped watermelon coefficient `m_1 = 3 Gamma / (2N)`.
pub fn m1_closed(n_particles: usize, gamma: u32) -> BigRational {
    rat(3 * gamma as i64, 2 * n_particles as i64)
}

/// Closed watermelon coefficient
/// `m_3 = 7 (2 + 3 N Gamma) Gamma / (2N (12 + 3 N Gamma))`.
pub fn m3_closed(n_particles: usize, gamma: u32) -> BigRational {
    let ng = n_particles as i64 * gamma as i64;
    rat(
        7 * (2 + 3 * ng) * gamma as i64,
        2 * n_particles as i64 * (12 + 3 * ng),
    )
}

/// Sum `term(l)` for `l = 0, 1, ...` with compensated addition.  The terms
/// decay like `a/l^3`, so once `|term_l|` is safely below `tol` the remaining
/// tail is added in closed form as `term_l * l / 2` (the exact tail of an
/// `a/l^3` sequence to leading order); the residual error is of the order of
/// the last term, comfortably inside `tol`.
fn sum_series<F>(term: F, tol: f64) -> Result<f64>
where
    F: Fn(u64) -> f64,
{
    const MAX_TERMS: u64 = 10_000_000;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for l in 0..=MAX_TERMS {
        let t = term(l);
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        if l >= 64 && t.abs() * 8.0 < tol {
            return Ok(sum + t * l as f64 / 2.0);
        }
    }
    Err(Error::NonConvergence {
        terms: MAX_TERMS as usize,
    })
}

/// Direct series for `m_1` (cross-check of [`m1_closed`]):
/// `6 Gamma^2 sum_l (l+1) / ((2l(l+1)+NG)(2(l+1)(l+2)+NG))`.
pub fn m1_series(n_particles: usize, gamma: u32, tol: f64) -> Result<f64> {
    let ng = (n_particles as f64) * gamma as f64;
    let g2 = (gamma as f64) * gamma as f64;
    sum_series(
        |l| {
            let l = l as f64;
            6.0 * g2 * (l + 1.0) / ((2.0 * l * (l + 1.0) + ng) * (2.0 * (l + 1.0) * (l + 2.0) + ng))
        },
        tol,
    )
}

/// Watermelon coefficient `m_2 = Gamma^2 f(N Gamma)` with
/// `f(x) = sum_l [ 15(l+1)(l+2)/((2l(l+1)+x)(2(l+2)(l+3)+x)(2l+3))
///               + 5(2l+1)l(l+1)/((2l(l+1)+x)^2 (2l-1)(2l+3)) ]`.
/// No closed form; summed to tolerance `tol`.
pub fn m2_series(n_particles: usize, gamma: u32, tol: f64) -> Result<f64> {
    let x = (n_particles as f64) * gamma as f64;
    let g2 = (gamma as f64) * gamma as f64;
    let f = sum_series(
        |l| {
            let l = l as f64;
            let a = 15.0 * (l + 1.0) * (l + 2.0)
                / ((2.0 * l * (l + 1.0) + x) * (2.0 * (l + 2.0) * (l + 3.0) + x) * (2.0 * l + 3.0));
            let b = if l == 0.0 {
                0.0
            } else {
                let d = 2.0 * l * (l + 1.0) + x;
                5.0 * (2.0 * l + 1.0) * l * (l + 1.0) / (d * d * (2.0 * l - 1.0) * (2.0 * l + 3.0))
            };
            a + b
        },
        tol,
    )?;
    Ok(g2 * f)
}

/// Direct series for `m_3` (cross-check of [`m3_closed`]):
/// `7 Gamma^2 sum_l (l+1)(l+2)/((2l+5)(2l(l+1)+NG)) *
///  [ 3l/((2(l+1)(l+2)+NG)(2l-1)) + 5(l+3)/((2(l+3)(l+4)+NG)(2l+3)) ]`.
pub fn m3_series(n_particles: usize, gamma: u32, tol: f64) -> Result<f64> {
    let ng = (n_particles as f64) * gamma as f64;
    let g2 = (gamma as f64) * gamma as f64;
    sum_series(
        |l| {
            let l = l as f64;
            let outer = (l + 1.0) * (l + 2.0) / ((2.0 * l + 5.0) * (2.0 * l * (l + 1.0) + ng));
            let first = if l == 0.0 {
                0.0
            } else {
                3.0 * l / ((2.0 * (l + 1.0) * (l + 2.0) + ng) * (2.0 * l - 1.0))
            };
            let second = 5.0 * (l + 3.0) / ((2.0 * (l + 3.0) * (l + 4.0) + ng) * (2.0 * l + 3.0));
            7.0 * g2 * outer * (first + second)
        },
        tol,
    )
}

/// Closed form for `h_1`: `-(3 Gamma / 4)(1 - 1/N) / (1 + N Gamma/4 - Gamma/4)`.
pub fn h1_closed(n_particles: usize, gamma: u32) -> BigRational {
    let n = n_particles as i64;
    let g = gamma as i64;
    let num = rat(-3 * g, 4) * (rat(1, 1) - rat(1, n));
    let den = rat(1, 1) + rat(n * g, 4) - rat(g, 4);
    num / den
}

/// Closed form for the approximate `h_3`:
/// `-7(-4 + N(4 - 6 Gamma) + N^2 Gamma) Gamma /
///  (N (96 + 4(7N - 1) Gamma + (N - 6) N Gamma^2))`.
///
/// Derived by eliminating `m_3` from `c_3 = -Gamma v_3 + m_3/2` and the
/// Ornstein-Zernike inversion; agrees with the assembled [`h_approx`] path
/// for every `(N, Gamma)`.  The denominator vanishes at genuine
/// Ornstein-Zernike poles (e.g. `N = 2`, `Gamma = 8`), reported as
/// [`Error::OzPole`].
pub fn h3_closed(n_particles: usize, gamma: u32) -> Result<BigRational> {
    let n = n_particles as i64;
    let g = gamma as i64;
    let num = -7 * (-4 + n * (4 - 6 * g) + n * n * g) * g;
    let den = n * (96 + 4 * (7 * n - 1) * g + (n - 6) * n * g * g);
    if den == 0 {
        return Err(Error::OzPole {
            n_particles: n_particles as u32,
            gamma,
            degree: 3,
        });
    }
    Ok(rat(num, den))
}

fn m_coefficient(n_particles: usize, gamma: u32, l: u32, tol: f64) -> Result<f64> {
    match l {
        1 => Ok(rational_to_f64(&m1_closed(n_particles, gamma))),
        2 => m2_series(n_particles, gamma, tol),
        3 => Ok(rational_to_f64(&m3_closed(n_particles, gamma))),
        _ => Err(Error::InvalidParams(format!(
            "h_approx implemented for l in 1..=3 (got {l})"
        ))),
    }
}

/// Approximate total-correlation coefficient for `l in {1, 2, 3}`:
/// `c_l = -Gamma v_l + m_l / 2`, inverted through the Ornstein-Zernike
/// relation `h_l = c_l / (1 - N c_l / (2l+1))`.
pub fn h_approx(n_particles: usize, gamma: u32, l: u32, tol: f64) -> Result<f64> {
    let m_l = m_coefficient(n_particles, gamma, l, tol)?;
    let v_l = rational_to_f64(&v_coulomb(l)?);
    let c_l = -(gamma as f64) * v_l + m_l / 2.0;
    let denom = 1.0 - (n_particles as f64) * c_l / (2.0 * l as f64 + 1.0);
    if denom.abs() < 1e-14 {
        return Err(Error::OzPole {
            n_particles: n_particles as u32,
            gamma,
            degree: l,
        });
    }
    Ok(c_l / denom)
}

/// Diagrammatic fourth-moment approximation
/// `I_hat_4 = (N Gamma)^2 / 24 * [N h_2 / 5 + 1 + 12/(Gamma - N Gamma - 4)]`.
pub fn i4_approx(n_particles: usize, gamma: u32, tol: f64) -> Result<f64> {
    let h2 = h_approx(n_particles, gamma, 2, tol)?;
    let n = n_particles as f64;
    let g = gamma as f64;
    let ng = n * g;
    Ok(ng * ng / 24.0 * (n * h2 / 5.0 + 1.0 + 12.0 / (g - ng - 4.0)))
}

/// Diagrammatic sixth-moment approximation
/// `I_hat_6 = (N Gamma)^3 [-N h_3/1120 + N h_2/160 + 1/40 + 9/(40(Gamma - N Gamma - 4))]`.
pub fn i6_approx(n_particles: usize, gamma: u32, tol: f64) -> Result<f64> {
    let h2 = h_approx(n_particles, gamma, 2, tol)?;
    let h3 = h_approx(n_particles, gamma, 3, tol)?;
    let n = n_particles as f64;
    let g = gamma as f64;
    let ng = n * g;
    Ok(ng
        * ng
        * ng
        * (-n * h3 / 1120.0 + n * h2 / 160.0 + 1.0 / 40.0 + 9.0 / (40.0 * (g - ng - 4.0))))
}

/// Bundle of the Legendre machinery for one `(N, Gamma)`: exact `v_l` and
/// `K_l` up to `max_degree`, the three watermelon coefficients, and the three
/// approximate `h_l`.
#[derive(Debug, Clone)]
pub struct LegendreCoefficients {
    pub n_particles: usize,
    pub gamma: u32,
    pub max_degree: u32,
    /// `v_1 ..= v_max_degree`.
    pub v: Vec<BigRational>,
    /// `K_1 ..= K_max_degree`.
    pub k: Vec<BigRational>,
    /// `m_1, m_2, m_3` (only `m_2` is a truncated series).
    pub m: [f64; 3],
    /// `h_1, h_2, h_3` approximations.
    pub h_approx: [f64; 3],
}

impl LegendreCoefficients {
    pub fn compute(
        n_particles: usize,
        gamma: u32,
        max_degree: u32,
        tol: f64,
    ) -> Result<LegendreCoefficients> {
        if max_degree < 1 {
            return Err(Error::InvalidParams("max_degree must be >= 1".into()));
        }
        let v: Vec<BigRational> = (1..=max_degree).map(|l| v_coulomb(l).unwrap()).collect();
        let k: Vec<BigRational> = (1..=max_degree)
            .map(|l| k_kernel(n_particles, gamma, l))
            .collect();
        let m = [
            m_coefficient(n_particles, gamma, 1, tol)?,
            m_coefficient(n_particles, gamma, 2, tol)?,
            m_coefficient(n_particles, gamma, 3, tol)?,
        ];
        let h = [
            h_approx(n_particles, gamma, 1, tol)?,
            h_approx(n_particles, gamma, 2, tol)?,
            h_approx(n_particles, gamma, 3, tol)?,
        ];
        Ok(LegendreCoefficients {
            n_particles,
            gamma,
            max_degree,
            v,
            k,
            m,
            h_approx: h,
        })
    }
}
