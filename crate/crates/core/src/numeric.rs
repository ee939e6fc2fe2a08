//! Exact arithmetic kernel: memoized factorials, decimal rendering at a fixed
//! number of significant digits, decimal parsing, and the complementary error
//! function used by the asymptotic checks.
//!
//! All exact quantities in this crate are `BigInt` / `BigRational`
//! (arbitrary-precision, always in lowest terms); floating point appears only
//! at the output boundary and in explicitly approximate series.

use std::sync::RwLock;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Growable factorial cache.  Readers proceed concurrently; growth takes the
/// write lock once per new high-water mark.
static FACTORIALS: Lazy<RwLock<Vec<BigInt>>> = Lazy::new(|| RwLock::new(vec![BigInt::one()]));

/// `n!` as an exact integer, memoized.
pub fn factorial(n: usize) -> BigInt {
    {
        let table = FACTORIALS.read().unwrap();
        if let Some(v) = table.get(n) {
            return v.clone();
        }
    }
    let mut table = FACTORIALS.write().unwrap();
    while table.len() <= n {
        let next = table.last().unwrap() * BigInt::from(table.len());
        table.push(next);
    }
    table[n].clone()
}

/// `(k + n)! / k!` as an exact integer (a falling-factorial style product).
pub fn factorial_ratio(k: usize, n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 1..=n {
        acc *= BigInt::from(k + i);
    }
    acc
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    &(&factorial(n) / factorial(k)) / factorial(n - k)
}

/// How a `Decimal` was produced: exactly (rounded rendering of a rational) or
/// through a truncated series / floating-point pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecimalOrigin {
    ExactRational,
    SeriesTruncation,
}

/// A decimal rendering carrying at least [`SIGNIFICANT_DIGITS`] significant
/// digits together with its provenance.  When `origin` is `ExactRational` the
/// text differs from the source rational by at most one unit in the last
/// rendered place.
#[derive(Debug, Clone, PartialEq)]
pub struct Decimal {
    pub text: String,
    pub value: f64,
    pub origin: DecimalOrigin,
}

/// Number of significant digits used by every table rendering in this crate.
pub const SIGNIFICANT_DIGITS: u32 = 15;

impl Decimal {
    /// Render an exact rational at [`SIGNIFICANT_DIGITS`] significant digits.
    pub fn from_rational(value: &BigRational) -> Decimal {
        Decimal {
            text: render_decimal(value, SIGNIFICANT_DIGITS),
            value: rational_to_f64(value),
            origin: DecimalOrigin::ExactRational,
        }
    }
}

/// Convert a rational of arbitrary magnitude to the nearest `f64`.
pub fn rational_to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

fn pow10(e: u32) -> BigInt {
    BigInt::from(10u32).pow(e)
}

/// Decimal exponent of `|r|`: the unique `e` with `10^e <= |r| < 10^(e+1)`.
/// `r` must be nonzero.
fn decimal_exponent(r: &BigRational) -> i64 {
    let num = r.numer().abs();
    let den = r.denom().clone();
    // First estimate from digit counts, then correct by direct comparison.
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    let cmp = |e: i64| -> std::cmp::Ordering {
        // compare |r| with 10^e, i.e. num * 10^max(0,-e) vs den * 10^max(0,e)
        let lhs = if e < 0 {
            &num * pow10((-e) as u32)
        } else {
            num.clone()
        };
        let rhs = if e > 0 {
            &den * pow10(e as u32)
        } else {
            den.clone()
        };
        lhs.cmp(&rhs)
    };
    while cmp(e) == std::cmp::Ordering::Less {
        e -= 1;
    }
    while cmp(e + 1) != std::cmp::Ordering::Less {
        e += 1;
    }
    e
}

/// Round `|r| * 10^shift` to the nearest integer, halves away from zero.
fn round_scaled(r: &BigRational, shift: i64) -> BigInt {
    let num = r.numer().abs();
    let den = r.denom().clone();
    let (num, den) = if shift >= 0 {
        (num * pow10(shift as u32), den)
    } else {
        (num, den * pow10((-shift) as u32))
    };
    // floor((2*num + den) / (2*den)) rounds half up, which is half away from
    // zero since num/den >= 0 here.
    (BigInt::from(2) * num + &den) / (BigInt::from(2) * den)
}

/// Render an exact rational with `sig` significant digits, rounding half away
/// from zero and trimming trailing zeros in the fractional part.  This matches
/// renderings like `0.8125` and `-0.73469387755102` (a trailing-zero 15th
/// digit is trimmed).
pub fn render_decimal(value: &BigRational, sig: u32) -> String {
    assert!(sig >= 1);
    if value.is_zero() {
        return "0".to_string();
    }
    let mut e = decimal_exponent(value);
    // m = round(|r| * 10^(sig-1-e)) has `sig` digits unless rounding carried
    // it to 10^sig, in which case bump the exponent and rescale.
    let mut m = round_scaled(value, sig as i64 - 1 - e);
    if m >= pow10(sig) {
        e += 1;
        m = round_scaled(value, sig as i64 - 1 - e);
    }
    let digits = m.to_string();
    debug_assert_eq!(digits.len(), sig as usize);
    let mut body = if e >= sig as i64 - 1 {
        // Integer with possible trailing zeros before the (absent) point.
        let mut s = digits;
        s.push_str(&"0".repeat((e - (sig as i64 - 1)) as usize));
        s
    } else if e >= 0 {
        let (int_part, frac_part) = digits.split_at((e + 1) as usize);
        let frac = frac_part.trim_end_matches('0');
        if frac.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac}")
        }
    } else {
        let frac = format!("{}{}", "0".repeat((-e - 1) as usize), digits);
        let frac = frac.trim_end_matches('0');
        format!("0.{frac}")
    };
    if value.is_negative() {
        body.insert(0, '-');
    }
    body
}

/// Parse a plain decimal string (optional sign, optional fractional part,
/// optional `e`/`E` exponent) into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Format("empty decimal".into()));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..]
                .parse()
                .map_err(|_| Error::Format(format!("bad exponent in '{s}'")))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (sign, body) = match mantissa.as_bytes().first() {
        Some(b'-') => (Sign::Minus, &mantissa[1..]),
        Some(b'+') => (Sign::Plus, &mantissa[1..]),
        _ => (Sign::Plus, mantissa),
    };
    let (int_part, frac_part) = match body.find('.') {
        Some(pos) => (&body[..pos], &body[pos + 1..]),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Format(format!("bad decimal '{s}'")));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(Error::Format(format!("bad decimal '{s}'")));
    }
    let digits: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .map_err(|_| Error::Format(format!("bad decimal '{s}'")))?;
    let digits = if sign == Sign::Minus { -digits } else { digits };
    let scale = exp - frac_part.len() as i64;
    let value = if scale >= 0 {
        BigRational::from(digits * pow10(scale as u32))
    } else {
        BigRational::new(digits, pow10((-scale) as u32))
    };
    Ok(value)
}

/// Complementary error function, absolute error below 1e-12 on |x| <= 10.
///
/// Small arguments use the Taylor series of erf; large arguments use the
/// standard continued fraction evaluated with the modified Lentz algorithm;
/// negative arguments use the reflection erfc(x) = 2 - erfc(-x).
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x == 0.0 {
        return 1.0;
    }
    const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
    if x <= 2.0 {
        // erf(x) = (2/sqrt(pi)) * sum (-1)^k x^(2k+1) / (k! (2k+1))
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 1u32;
        loop {
            term *= -x2 / k as f64;
            let add = term / (2 * k + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
            k += 1;
        }
        1.0 - TWO_OVER_SQRT_PI * sum
    } else {
        // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let tiny = 1e-300;
        let mut f = x;
        let mut c = f;
        let mut d = 0.0;
        let mut n = 1u32;
        loop {
            let a = n as f64 / 2.0;
            d = x + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = x + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 || n > 400 {
                break;
            }
            n += 1;
        }
        (-x * x).exp() / f64::sqrt(std::f64::consts::PI) / f
    }
}
