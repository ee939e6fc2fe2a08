//! Exact integer coefficients of Vandermonde powers.
//!
//! For even coupling `Gamma`, the polynomial `prod_{j<k} (z_k - z_j)^{Gamma/2}`
//! expands over monomial symmetric functions (`Gamma = 4p`) or antisymmetrized
//! monomials (`Gamma = 4p+2`).  The coefficients satisfy a triangular
//! recursion in dominance order driven by the Jack eigenvalues at negative
//! rational parameter `alpha`; this module implements that recursion, a
//! brute-force polynomial-multiplication oracle, and a text cache format.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::binomial;
use crate::partitions::{
    enumerate_admissible_with_limit, kind_for, AdmissibleSet, ExpansionKind, Partition,
    DEFAULT_MEMBER_LIMIT,
};

/// Physical and combinatorial parameters shared by every expansion: particle
/// count `N`, even coupling `Gamma`, the integer `p` with `Gamma = 4p` or
/// `4p+2`, and the Jack parameter `alpha`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlasmaParams {
    n: usize,
    gamma: u32,
    p: u32,
    kind: ExpansionKind,
    alpha: BigRational,
}

impl PlasmaParams {
    /// Validate `(N, Gamma)` and derive `p`, the expansion kind, and `alpha`
    /// (`-2/(2p-1)` for `Gamma = 4p`, `-2/(2p+1)` for `Gamma = 4p+2`).
    pub fn new(n: usize, gamma: u32) -> Result<PlasmaParams> {
        if n == 0 {
            return Err(Error::InvalidParams("need N >= 1".into()));
        }
        if gamma < 2 || !gamma.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "Gamma must be even and >= 2 (got {gamma})"
            )));
        }
        let half = gamma / 2;
        let kind = kind_for(half);
        let (p, alpha_den) = match kind {
            ExpansionKind::Symmetric => {
                let p = half / 2;
                (p, 2 * p as i64 - 1)
            }
            ExpansionKind::Antisymmetric => {
                let p = (half - 1) / 2;
                (p, 2 * p as i64 + 1)
            }
        };
        let alpha = BigRational::new(BigInt::from(-2), BigInt::from(alpha_den));
        Ok(PlasmaParams {
            n,
            gamma,
            p,
            kind,
            alpha,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    pub fn half_gamma(&self) -> u32 {
        self.gamma / 2
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn kind(&self) -> ExpansionKind {
        self.kind
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    /// `2/alpha` as an integer: `-(2p-1)` symmetric, `-(2p+1)` antisymmetric.
    fn two_over_alpha(&self) -> i64 {
        match self.kind {
            ExpansionKind::Symmetric => -(2 * self.p as i64 - 1),
            ExpansionKind::Antisymmetric => -(2 * self.p as i64 + 1),
        }
    }
}

/// Jack eigenvalue for the symmetric kind:
/// `e(kappa) = sum_i kappa_i (kappa_i - 1 - (2/alpha)(i-1))` with `i` 1-based.
pub fn eigenvalue_symmetric(kappa: &Partition, alpha: &BigRational) -> BigRational {
    let two_over_alpha = BigRational::from(BigInt::from(2)) / alpha;
    let mut e = BigRational::zero();
    for (i, &k) in kappa.parts().iter().enumerate() {
        let k = BigRational::from(BigInt::from(k));
        let shift = BigRational::from(BigInt::from(i as i64)) * &two_over_alpha;
        e += &k * (&k - BigRational::one() - shift);
    }
    e
}

/// Jack eigenvalue for the antisymmetric kind:
/// `e(kappa) = sum_i kappa_i (kappa_i - (2/alpha) i)` with `i` 1-based.
///
/// Equivalently the symmetric eigenvalue of `kappa - delta_N` at the
/// conjugate parameter `alpha/(1+alpha)`, up to a constant that depends only
/// on `|kappa|`; only eigenvalue differences enter the recursion.  This
/// separates every dominance-comparable pair at the crate's negative `alpha`
/// values, which the naive antisymmetric operator constant does not.
pub fn eigenvalue_antisymmetric(kappa: &Partition, alpha: &BigRational) -> BigRational {
    let two_over_alpha = BigRational::from(BigInt::from(2)) / alpha;
    let mut e = BigRational::zero();
    for (i, &k) in kappa.parts().iter().enumerate() {
        let k = BigRational::from(BigInt::from(k));
        let shift = BigRational::from(BigInt::from(i as i64 + 1)) * &two_over_alpha;
        e += &k * (&k - shift);
    }
    e
}

/// Integer fast path for the eigenvalues at the crate's rational `alpha`
/// values, where `2/alpha` is the integer `-(2p-1)` or `-(2p+1)`:
/// symmetric `sum kappa_i(kappa_i - 1) + (2p-1) sum kappa_i (i-1)`,
/// antisymmetric `sum kappa_i^2 + (2p+1) sum i kappa_i`.
fn eigenvalue_int(parts: &[u32], kind: ExpansionKind, p: u32) -> i64 {
    let mut e: i64 = 0;
    match kind {
        ExpansionKind::Symmetric => {
            let g = 2 * p as i64 - 1;
            for (i, &k) in parts.iter().enumerate() {
                let k = k as i64;
                e += k * (k - 1) + g * k * i as i64;
            }
        }
        ExpansionKind::Antisymmetric => {
            let g = 2 * p as i64 + 1;
            for (i, &k) in parts.iter().enumerate() {
                let k = k as i64;
                e += k * k + g * k * (i as i64 + 1);
            }
        }
    }
    e
}

/// One expansion: exact integer coefficient per admissible partition, aligned
/// with the canonical member order of the admissible set.  The coefficient at
/// the top partition `Gamma/2 * delta_N` is 1 (monic normalization); only
/// squared coefficients enter any observable, so the remaining signs follow
/// the recursion's convention and are not contractual.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    params: PlasmaParams,
    set: AdmissibleSet,
    coeffs: Vec<BigInt>,
}

impl CoefficientTable {
    pub fn params(&self) -> &PlasmaParams {
        &self.params
    }

    pub fn set(&self) -> &AdmissibleSet {
        &self.set
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn gamma(&self) -> u32 {
        self.params.gamma
    }

    pub fn top_partition(&self) -> &Partition {
        self.set.top()
    }

    /// Coefficient at the i-th member of the canonical order.
    pub fn coefficient(&self, index: usize) -> &BigInt {
        &self.coeffs[index]
    }

    /// Coefficient of a specific partition (zero if not admissible).
    pub fn coefficient_of(&self, mu: &Partition) -> BigInt {
        match self.set.position(mu) {
            Some(i) => self.coeffs[i].clone(),
            None => BigInt::zero(),
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(partition, coefficient)` pairs in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&Partition, &BigInt)> {
        self.set.members().iter().zip(self.coeffs.iter())
    }
}

/// Run the eigenvalue recursion for `params` with the default member limit.
pub fn expand(params: &PlasmaParams) -> Result<CoefficientTable> {
    expand_with_limit(params, DEFAULT_MEMBER_LIMIT)
}

/// Run the eigenvalue recursion: enumerate the admissible set, set the top
/// coefficient to 1, then fill every other coefficient in dominance-compatible
/// order from the already-computed coefficients of its squeeze sources.
pub fn expand_with_limit(params: &PlasmaParams, member_limit: usize) -> Result<CoefficientTable> {
    let set = enumerate_admissible_with_limit(params.n, params.half_gamma(), member_limit)?;
    let kind = params.kind;
    let p = params.p;
    let g = BigInt::from(params.two_over_alpha());
    let e_top = eigenvalue_int(set.top().parts(), kind, p);

    let mut coeffs: Vec<BigInt> = Vec::with_capacity(set.len());
    coeffs.push(BigInt::one());

    let n = params.n;
    let mut seq: Vec<u32> = vec![0; n];
    for idx in 1..set.len() {
        let rho = set.members()[idx].parts();
        let e_rho = eigenvalue_int(rho, kind, p);
        let denom = e_top - e_rho;
        if denom == 0 {
            return Err(Error::DegenerateEigenvalue {
                kappa: format!("{}", set.top()),
                rho: format!("{}", set.members()[idx]),
                alpha: params.alpha.to_string(),
            });
        }
        let mut acc = BigInt::zero();
        // Every raising move (i < j positionally, r units from part j to
        // part i); each (i, j, r) triple contributes separately.
        for i in 0..n {
            for j in (i + 1)..n {
                for r in 1..=rho[j] {
                    seq.copy_from_slice(rho);
                    seq[i] += r;
                    seq[j] -= r;
                    let (factor, sign): (i64, i64) = match kind {
                        ExpansionKind::Symmetric => {
                            ((rho[i] as i64 - rho[j] as i64) + 2 * r as i64, 1)
                        }
                        ExpansionKind::Antisymmetric => {
                            if !all_distinct(&seq) {
                                continue;
                            }
                            (rho[i] as i64 - rho[j] as i64, inversion_sign(&seq) as i64)
                        }
                    };
                    // Sort the modified sequence (descending) and look it up;
                    // non-members contribute nothing.
                    let key = sorted_key(&seq);
                    if let Some(src) = set.position_by_key(key) {
                        debug_assert!(src < idx);
                        acc += &coeffs[src] * BigInt::from(factor * sign);
                    }
                }
            }
        }
        let num = &g * acc;
        let den = BigInt::from(denom);
        let (q, rem) = num_integer::Integer::div_rem(&num, &den);
        if !rem.is_zero() {
            return Err(Error::NonIntegralCoefficient {
                partition: format!("{}", set.members()[idx]),
            });
        }
        coeffs.push(q);
    }
    Ok(CoefficientTable {
        params: params.clone(),
        set,
        coeffs,
    })
}

fn all_distinct(seq: &[u32]) -> bool {
    for a in 0..seq.len() {
        for b in (a + 1)..seq.len() {
            if seq[a] == seq[b] {
                return false;
            }
        }
    }
    true
}

fn inversion_sign(seq: &[u32]) -> i8 {
    let mut inv = 0usize;
    for a in 0..seq.len() {
        for b in (a + 1)..seq.len() {
            if seq[a] < seq[b] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Pack the descending-sorted copy of `seq` into the u128 partition key.
fn sorted_key(seq: &[u32]) -> u128 {
    let mut buf = [0u32; 16];
    let n = seq.len();
    buf[..n].copy_from_slice(seq);
    buf[..n].sort_unstable_by(|a, b| b.cmp(a));
    let mut k: u128 = 0;
    for &v in &buf[..n] {
        k = (k << 8) | v as u128;
    }
    k
}

/// Expand `prod_{j<k} (z_k - z_j)^{Gamma/2}` by iterated sparse polynomial
/// multiplication over exponent vectors and collect the coefficient of each
/// admissible partition's descending exponent vector.  Independent oracle for
/// [`expand`]; the global sign is normalized so the top coefficient is 1.
pub fn brute_force_expand(params: &PlasmaParams) -> Result<CoefficientTable> {
    let n = params.n;
    if n > 6 || params.gamma > 8 {
        return Err(Error::ResourceLimit(format!(
            "brute-force oracle limited to N <= 6, Gamma <= 8 (got N={n}, Gamma={})",
            params.gamma
        )));
    }
    let half = params.half_gamma();
    // Exponent vectors packed 8 bits per variable (exponents <= 20 here).
    let mut poly: HashMap<u64, BigInt> = HashMap::new();
    poly.insert(0, BigInt::one());
    let shift = |var: usize| 8 * (n - 1 - var) as u32;
    for j in 0..n {
        for k in (j + 1)..n {
            // Multiply by (z_k - z_j)^half = sum_t C(half,t) z_k^{half-t} (-z_j)^t.
            let mut next: HashMap<u64, BigInt> =
                HashMap::with_capacity(poly.len() * (half as usize + 1));
            for (&expvec, c) in &poly {
                for t in 0..=half {
                    let mut coeff = c * binomial(half as usize, t as usize);
                    if t % 2 == 1 {
                        coeff = -coeff;
                    }
                    let key = expvec
                        + ((half - t) as u64) * (1u64 << shift(k))
                        + (t as u64) * (1u64 << shift(j));
                    let slot = next.entry(key).or_insert_with(BigInt::zero);
                    *slot += coeff;
                    if slot.is_zero() {
                        next.remove(&key);
                    }
                }
            }
            poly = next;
        }
    }
    let set = enumerate_admissible_with_limit(n, half, DEFAULT_MEMBER_LIMIT)?;
    let mut coeffs: Vec<BigInt> = Vec::with_capacity(set.len());
    for member in set.members() {
        let mut key: u64 = 0;
        for (var, &v) in member.parts().iter().enumerate() {
            key += (v as u64) << shift(var);
        }
        coeffs.push(poly.get(&key).cloned().unwrap_or_else(BigInt::zero));
    }
    // Monic normalization: flip the global sign if the top coefficient is -1.
    if coeffs[0].is_negative() {
        for c in &mut coeffs {
            *c = -c.clone();
        }
    }
    if !coeffs[0].is_one() {
        return Err(Error::InvalidParams(format!(
            "oracle top coefficient is {} (expected ±1)",
            coeffs[0]
        )));
    }
    Ok(CoefficientTable {
        params: params.clone(),
        set,
        coeffs,
    })
}

const CHECKSUM_MODULUS: u64 = (1 << 61) - 1;

fn table_checksum(coeffs: &[BigInt]) -> u64 {
    let modulus = BigInt::from(CHECKSUM_MODULUS);
    let mut acc = BigInt::zero();
    for c in coeffs {
        acc += c.abs();
        acc %= &modulus;
    }
    let digits = acc.to_string();
    digits.parse().unwrap()
}

/// Serialize a table to the versioned text cache format: one header line with
/// counts and a checksum, then one `mu_1,...,mu_N<TAB>c` line per nonzero
/// coefficient in canonical order.
pub fn save_table(table: &CoefficientTable, path: &Path) -> Result<()> {
    let nonzero: Vec<(usize, &BigInt)> = table
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let checksum = table_checksum(&table.coeffs);
    let mut out = String::new();
    writeln!(
        out,
        "#vdm-coeff v1 N={} gamma={} count={} checksum={}",
        table.n(),
        table.gamma(),
        nonzero.len(),
        checksum
    )
    .expect("write to string");
    for (i, c) in nonzero {
        let parts: Vec<String> = table.set.members()[i]
            .parts()
            .iter()
            .map(|v| v.to_string())
            .collect();
        writeln!(out, "{}\t{}", parts.join(","), c).expect("write to string");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Load a table from the cache format, validating version, entry count, and
/// checksum.  The admissible index is rebuilt from the stored members.
pub fn load_table(path: &Path) -> Result<CoefficientTable> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty cache file".into()))?;
    let mut n: Option<usize> = None;
    let mut gamma: Option<u32> = None;
    let mut count: Option<usize> = None;
    let mut checksum: Option<u64> = None;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("#vdm-coeff") {
        return Err(Error::Format("missing #vdm-coeff header".into()));
    }
    if tokens.next() != Some("v1") {
        return Err(Error::Format("unsupported cache version".into()));
    }
    for tok in tokens {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad header token '{tok}'")))?;
        match key {
            "N" => n = val.parse().ok(),
            "gamma" => gamma = val.parse().ok(),
            "count" => count = val.parse().ok(),
            "checksum" => checksum = val.parse().ok(),
            _ => return Err(Error::Format(format!("unknown header key '{key}'"))),
        }
    }
    let (n, gamma, count, checksum) = match (n, gamma, count, checksum) {
        (Some(n), Some(g), Some(c), Some(s)) => (n, g, c, s),
        _ => return Err(Error::Format("incomplete header".into())),
    };
    let params = PlasmaParams::new(n, gamma)?;
    let mut members: Vec<Partition> = Vec::with_capacity(count);
    let mut coeffs: Vec<BigInt> = Vec::with_capacity(count);
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let (mu, c) = line
            .split_once('\t')
            .ok_or_else(|| Error::Format(format!("bad entry line '{line}'")))?;
        let parts: std::result::Result<Vec<u32>, _> =
            mu.split(',').map(|v| v.parse::<u32>()).collect();
        let parts = parts.map_err(|_| Error::Format(format!("bad partition '{mu}'")))?;
        if parts.len() != n {
            return Err(Error::Format(format!(
                "partition length {} != N={n}",
                parts.len()
            )));
        }
        members.push(Partition::new(parts).map_err(|e| Error::Format(e.to_string()))?);
        coeffs.push(
            c.parse::<BigInt>()
                .map_err(|_| Error::Format(format!("bad coefficient '{c}'")))?,
        );
    }
    if members.len() != count {
        return Err(Error::Format(format!(
            "entry count {} != header count {count} (truncated file?)",
            members.len()
        )));
    }
    if table_checksum(&coeffs) != checksum {
        return Err(Error::Format("checksum mismatch".into()));
    }
    let set = AdmissibleSet::from_members(n, gamma / 2, members)?;
    Ok(CoefficientTable {
        params,
        set,
        coeffs,
    })
}
