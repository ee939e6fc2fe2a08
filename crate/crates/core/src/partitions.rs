//! Integer partitions, dominance order, squeezing moves, and enumeration of
//! the admissible partition sets that index the Vandermonde-power expansions.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// An integer partition of fixed length `N`: a nonincreasing, zero-padded
/// sequence of nonnegative parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Build a partition from a nonincreasing sequence of parts.
    pub fn new(parts: Vec<u32>) -> Result<Partition> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "parts not nonincreasing: {parts:?}"
            )));
        }
        Ok(Partition { parts })
    }

    /// Build a partition from arbitrary nonnegative values, sorting them into
    /// nonincreasing order.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Partition {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// The staircase `delta_N = (N-1, N-2, ..., 1, 0)`.
    pub fn staircase(n: usize) -> Partition {
        Partition {
            parts: (0..n).rev().map(|i| i as u32).collect(),
        }
    }

    /// Multiply every part by a scalar.
    pub fn scaled(&self, c: u32) -> Partition {
        Partition {
            parts: self.parts.iter().map(|&v| v * c).collect(),
        }
    }

    /// The parts, largest first, zero-padded to the fixed length.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of parts including trailing zeros.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of the parts.
    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|&v| v as u64).sum()
    }

    /// Multiplicities `m_i` of each distinct value among the parts (zeros
    /// included), as `(value, count)` pairs in decreasing value order.
    pub fn frequencies(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &v in &self.parts {
            match out.last_mut() {
                Some((value, count)) if *value == v => *count += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    /// True when all parts are pairwise distinct.
    pub fn has_distinct_parts(&self) -> bool {
        self.parts.windows(2).all(|w| w[0] > w[1])
    }

    /// Pack the parts into a `u128` hash key: 8 bits per part, at most 16
    /// parts.  Every admissible set handled by this crate fits (parts are
    /// bounded by `halfGamma * (N-1) <= 255` for the supported sizes).
    pub fn key(&self) -> u128 {
        debug_assert!(self.parts.len() <= 16);
        let mut k: u128 = 0;
        for &v in &self.parts {
            debug_assert!(v <= 255);
            k = (k << 8) | v as u128;
        }
        k
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Dominance comparison on equal-weight partitions of equal length:
/// `a <= b` iff every prefix sum of `a` is at most the corresponding prefix
/// sum of `b`.
pub fn dominance_leq(a: &Partition, b: &Partition) -> Result<bool> {
    if a.weight() != b.weight() {
        return Err(Error::WeightMismatch {
            left: a.weight(),
            right: b.weight(),
        });
    }
    if a.len() != b.len() {
        return Err(Error::InvalidPartition(format!(
            "length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut sa: u64 = 0;
    let mut sb: u64 = 0;
    for (&x, &y) in a.parts.iter().zip(&b.parts) {
        sa += x as u64;
        sb += y as u64;
        if sa > sb {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which basis the expansion uses, determined by the parity of `Gamma/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionKind {
    /// `Gamma = 4p`: symmetric polynomial, monomial basis, weakly decreasing
    /// partitions.
    Symmetric,
    /// `Gamma = 4p+2`: antisymmetric polynomial, antisymmetrized-monomial
    /// basis, strictly decreasing partitions.
    Antisymmetric,
}

/// All partitions indexing the expansion of `prod (z_k - z_j)^{Gamma/2}` for
/// fixed `(N, Gamma)`, stored in descending lexicographic order (which refines
/// dominance: any partition dominating another appears before it).
#[derive(Debug, Clone)]
pub struct AdmissibleSet {
    n: usize,
    half_gamma: u32,
    kind: ExpansionKind,
    members: Vec<Partition>,
    index: HashMap<u128, usize>,
}

/// Default ceiling on the number of admissible partitions per set.
pub const DEFAULT_MEMBER_LIMIT: usize = 50_000_000;

impl AdmissibleSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_gamma(&self) -> u32 {
        self.half_gamma
    }

    pub fn gamma(&self) -> u32 {
        2 * self.half_gamma
    }

    pub fn kind(&self) -> ExpansionKind {
        self.kind
    }

    /// Members in descending lexicographic (dominance-compatible) order; the
    /// top partition `halfGamma * delta_N` is first.
    pub fn members(&self) -> &[Partition] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The top partition `halfGamma * delta_N`.
    pub fn top(&self) -> &Partition {
        &self.members[0]
    }

    /// Position of a partition in the canonical order, if admissible.
    pub fn position(&self, p: &Partition) -> Option<usize> {
        self.index.get(&p.key()).copied()
    }

    /// Position lookup by packed key (hot path of the expansion recursion).
    pub fn position_by_key(&self, key: u128) -> Option<usize> {
        self.index.get(&key).copied()
    }

    /// Rebuild a set from members already in canonical order (used by the
    /// cache loader; trusts the caller on ordering).
    pub(crate) fn from_members(
        n: usize,
        half_gamma: u32,
        members: Vec<Partition>,
    ) -> Result<AdmissibleSet> {
        let kind = kind_for(half_gamma);
        if members.is_empty() {
            return Err(Error::InvalidPartition("empty admissible set".into()));
        }
        let index = members
            .iter()
            .enumerate()
            .map(|(i, p)| (p.key(), i))
            .collect();
        Ok(AdmissibleSet {
            n,
            half_gamma,
            kind,
            members,
            index,
        })
    }
}

/// The expansion kind implied by `Gamma/2`: even means symmetric, odd means
/// antisymmetric.
pub fn kind_for(half_gamma: u32) -> ExpansionKind {
    if half_gamma.is_multiple_of(2) {
        ExpansionKind::Symmetric
    } else {
        ExpansionKind::Antisymmetric
    }
}

/// Enumerate the admissible set for `(N, Gamma/2)` with the default member
/// limit.
pub fn enumerate_admissible(n: usize, half_gamma: u32) -> Result<AdmissibleSet> {
    enumerate_admissible_with_limit(n, half_gamma, DEFAULT_MEMBER_LIMIT)
}

/// Enumerate the admissible set: all length-`N` partitions of weight
/// `halfGamma * N(N-1)/2` dominated by `halfGamma * delta_N`, with strictly
/// decreasing parts when `halfGamma` is odd.  Members are produced in
/// descending lexicographic order.
pub fn enumerate_admissible_with_limit(
    n: usize,
    half_gamma: u32,
    member_limit: usize,
) -> Result<AdmissibleSet> {
    if n == 0 || half_gamma == 0 {
        return Err(Error::InvalidParams(format!(
            "need N >= 1 and halfGamma >= 1 (got N={n}, halfGamma={half_gamma})"
        )));
    }
    if n > 16 {
        return Err(Error::InvalidParams(format!(
            "partition keys support at most 16 parts (got N={n})"
        )));
    }
    let kind = kind_for(half_gamma);
    let strict = kind == ExpansionKind::Antisymmetric;
    let weight = half_gamma as u64 * (n as u64) * (n as u64 - 1) / 2;
    // Prefix sums of the top partition halfGamma * (N-1, N-2, ..., 0).
    let top_prefix: Vec<u64> = (0..n)
        .scan(0u64, |acc, i| {
            *acc += half_gamma as u64 * (n - 1 - i) as u64;
            Some(*acc)
        })
        .collect();

    let mut members: Vec<Partition> = Vec::new();
    let mut current: Vec<u32> = Vec::with_capacity(n);
    dfs(
        n,
        weight,
        strict,
        &top_prefix,
        &mut current,
        0,
        &mut members,
        member_limit,
    )?;
    AdmissibleSet::from_members(n, half_gamma, members)
}

/// Depth-first generation of admissible partitions, largest candidate part
/// first at every level so the output is descending-lexicographic.
#[allow(clippy::too_many_arguments)]
fn dfs(
    n: usize,
    weight_left: u64,
    strict: bool,
    top_prefix: &[u64],
    current: &mut Vec<u32>,
    prefix_sum: u64,
    out: &mut Vec<Partition>,
    member_limit: usize,
) -> Result<()> {
    let pos = current.len();
    if pos == n {
        debug_assert_eq!(weight_left, 0);
        if out.len() >= member_limit {
            return Err(Error::ResourceLimit(format!(
                "admissible set exceeds member limit {member_limit}"
            )));
        }
        out.push(Partition {
            parts: current.clone(),
        });
        return Ok(());
    }
    let slots_after = (n - pos - 1) as u64;
    // Smallest weight the remaining slots can absorb: zero for weak
    // partitions, 0 + 1 + ... + (slots_after - 1) for strict ones.
    let min_tail = if strict && slots_after > 0 {
        slots_after * (slots_after - 1) / 2
    } else {
        0
    };

    let prev = current.last().copied();
    let hard_cap = match prev {
        Some(p) if strict => {
            if p == 0 {
                return Ok(()); // cannot go below a zero part strictly
            }
            p - 1
        }
        Some(p) => p,
        None => u32::MAX,
    };
    // Dominance: prefix_sum + v <= top_prefix[pos].
    let dom_cap = top_prefix[pos].saturating_sub(prefix_sum);
    // Weight: v <= weight_left - min_tail.
    if weight_left < min_tail {
        return Ok(());
    }
    let weight_cap = weight_left - min_tail;
    let mut v_max = hard_cap as u64;
    v_max = v_max.min(dom_cap).min(weight_cap);
    if v_max > u32::MAX as u64 {
        v_max = u32::MAX as u64;
    }

    // Lower bound: the tail after choosing v can hold at most
    // slots_after * v (weak) or sum_{t=1..slots_after} (v - t) (strict);
    // v must be large enough that weight_left - v fits.
    for v in (0..=v_max as u32).rev() {
        let tail_weight = weight_left - v as u64;
        // Largest weight the tail can hold below a part of size v:
        // slots_after * v for weak partitions; for strict ones the sum of the
        // slots_after largest distinct values below v, i.e.
        // (v-1) + (v-2) + ... capped when fewer than slots_after values exist.
        let max_tail = if strict {
            if (v as u64) < slots_after {
                (v as u64) * (v as u64 + 1) / 2
            } else {
                slots_after * v as u64 - slots_after * (slots_after + 1) / 2
            }
        } else {
            slots_after * v as u64
        };
        if tail_weight > max_tail {
            // Larger v needed, but v only decreases from here: prune the rest.
            break;
        }
        current.push(v);
        dfs(
            n,
            tail_weight,
            strict,
            top_prefix,
            current,
            prefix_sum + v as u64,
            out,
            member_limit,
        )?;
        current.pop();
    }
    Ok(())
}

/// One raising move applied to a partition: `r` units transferred from part
/// `j` to part `i` (0-based positions, `i < j`), producing `source` after
/// re-sorting.  `sign` is the parity of the re-sorting permutation; it is
/// always `+1` for the symmetric kind, where re-sorting never matters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqueezeMove {
    pub source: Partition,
    pub r: u32,
    pub i: usize,
    pub j: usize,
    pub sign: i8,
}

/// Enumerate every raising move out of `mu`: for each ordered position pair
/// `i < j` and each transfer `1 <= r <= mu[j]`, form the re-sorted partition
/// and keep it when it stays dominated by `top` (and has distinct parts in the
/// antisymmetric kind).  Each `(i, j, r)` triple is reported separately even
/// when several reach the same source partition.
pub fn squeeze_predecessors(
    mu: &Partition,
    top: &Partition,
    kind: ExpansionKind,
) -> Vec<SqueezeMove> {
    let n = mu.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for r in 1..=mu.parts[j] {
                let mut seq: Vec<u32> = mu.parts.clone();
                seq[i] += r;
                seq[j] -= r;
                let sign = match kind {
                    ExpansionKind::Symmetric => 1i8,
                    ExpansionKind::Antisymmetric => {
                        if !distinct(&seq) {
                            continue;
                        }
                        inversion_sign(&seq)
                    }
                };
                let source = Partition::from_unsorted(seq);
                if source.parts[0] as u64 > top.parts[0] as u64 {
                    continue;
                }
                match dominance_leq(&source, top) {
                    Ok(true) => out.push(SqueezeMove {
                        source,
                        r,
                        i,
                        j,
                        sign,
                    }),
                    _ => continue,
                }
            }
        }
    }
    out
}

fn distinct(seq: &[u32]) -> bool {
    for a in 0..seq.len() {
        for b in (a + 1)..seq.len() {
            if seq[a] == seq[b] {
                return false;
            }
        }
    }
    true
}

/// Sign of the permutation sorting `seq` into strictly decreasing order:
/// `(-1)^{#inversions}` where an inversion is a pair out of decreasing order.
fn inversion_sign(seq: &[u32]) -> i8 {
    let mut inversions = 0usize;
    for a in 0..seq.len() {
        for b in (a + 1)..seq.len() {
            if seq[a] < seq[b] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}
