//! Pillar counting through characteristic sequences.
//!
//! A characteristic sequence of length `4k` is a word over `{-1, 0, +1}` in
//! which `+1` (an up innovation) may only sit at even 1-based positions and
//! `-1` (a return) only at odd ones. The admissible sequences are those that
//! start with a zero, end with one zero (`f` counts) or three zeros (`g`
//! counts), and whose `+1`/`-1` pairs form a non-crossing matching where
//! every matched window has length divisible by four.
//!
//! Three independent routes produce the counts `f_m(k)` and `g_m(k)`:
//! exhaustive enumeration ([`enumerate_pillar_counts`]), the closed form for
//! `f` ([`f_closed_form`]), and the coupled first-return recursions
//! ([`build_tables_by_recursion`], [`index_polynomials`]).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `k` accepted by [`enumerate_pillar_counts`]; `4k - 2` free
/// positions means at most `2^14` candidates.
pub const ENUMERATION_CUTOFF: usize = 4;

/// Which tail condition an admissible sequence must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndVariant {
    /// Ends with (at least) one zero; counted by `f_m(k)`.
    EndOneZero,
    /// Ends with three zeros; counted by `g_m(k)`.
    EndThreeZeros,
}

impl EndVariant {
    fn trailing_zeros(self) -> usize {
        match self {
            EndVariant::EndOneZero => 1,
            EndVariant::EndThreeZeros => 3,
        }
    }
}

/// A `{-1, 0, +1}` word of length `4k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharacteristicSequence {
    entries: Vec<i8>,
}

impl CharacteristicSequence {
    /// Checks the alphabet and that the length is a positive multiple of
    /// four. Parity placement is *not* enforced here; see
    /// [`CharacteristicSequence::respects_parity`].
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.is_empty() || !entries.len().is_multiple_of(4) {
            return Err(Error::Domain(format!(
                "sequence length must be a positive multiple of 4, got {}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|v| !matches!(v, -1..=1)) {
            return Err(Error::Domain(format!("entry {bad} not in {{-1, 0, 1}}")));
        }
        Ok(Self { entries })
    }

    pub fn zeros(k: usize) -> Result<Self> {
        Self::new(vec![0; 4 * k])
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `k = len / 4`.
    pub fn k(&self) -> usize {
        self.entries.len() / 4
    }

    /// Number of up innovations (`+1` entries).
    pub fn up_count(&self) -> usize {
        self.entries.iter().filter(|&&v| v == 1).count()
    }

    /// First (1-based) position where a `+1` sits at an odd position or a
    /// `-1` at an even one.
    pub fn parity_violation(&self) -> Option<(usize, i8)> {
        self.entries.iter().enumerate().find_map(|(i, &v)| {
            let pos = i + 1;
            let ok = match v {
                1 => pos % 2 == 0,
                -1 => pos % 2 == 1,
                _ => true,
            };
            (!ok).then_some((pos, v))
        })
    }

    pub fn respects_parity(&self) -> bool {
        self.parity_violation().is_none()
    }

    /// Partial sums `S_1, ..., S_{4k}`.
    pub fn partial_sums(&self) -> Vec<i64> {
        self.entries
            .iter()
            .scan(0i64, |acc, &v| {
                *acc += i64::from(v);
                Some(*acc)
            })
            .collect()
    }
}

/// Pairs every `-1` with the nearest preceding unmatched `+1`.
///
/// Pairs are 1-based `(open, close)` positions listed in order of their
/// closing position.
pub fn canonical_matching(seq: &CharacteristicSequence) -> Result<Vec<(usize, usize)>> {
    if let Some((position, value)) = seq.parity_violation() {
        return Err(Error::ParityViolation { position, value });
    }
    let mut open = Vec::new();
    let mut pairs = Vec::new();
    for (i, &v) in seq.entries().iter().enumerate() {
        let pos = i + 1;
        match v {
            1 => open.push(pos),
            -1 => {
                let start = open.pop().ok_or(Error::PrefixViolation { position: pos })?;
                pairs.push((start, pos));
            }
            _ => {}
        }
    }
    if !open.is_empty() {
        return Err(Error::UnbalancedSequence {
            ups: seq.up_count(),
            downs: pairs.len(),
        });
    }
    Ok(pairs)
}

/// Whether `seq` is admissible for the given tail variant.
///
/// The subsequence structure (`1 00 -1`, `1 000000 -1`, ...) is checked as:
/// the canonical matching exists and every matched window
/// `close - open + 1` is a multiple of four.
pub fn validate_sequence(seq: &CharacteristicSequence, variant: EndVariant) -> bool {
    let e = seq.entries();
    if e.len() < 4 || e[0] != 0 {
        return false;
    }
    let tail = variant.trailing_zeros();
    if e[e.len() - tail..].iter().any(|&v| v != 0) {
        return false;
    }
    match canonical_matching(seq) {
        Ok(pairs) => pairs.iter().all(|&(i, j)| (j - i + 1) % 4 == 0),
        Err(_) => false,
    }
}

/// Brute-force count of admissible sequences of length `4k`, keyed by the
/// number of up innovations. Only nonzero counts are present.
pub fn enumerate_pillar_counts(k: usize, variant: EndVariant) -> Result<BTreeMap<usize, u64>> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    if k > ENUMERATION_CUTOFF {
        return Err(Error::CutoffExceeded {
            k,
            cutoff: ENUMERATION_CUTOFF,
        });
    }
    let n = 4 * k;
    // First and last entries are forced to zero by both variants.
    let free = n - 2;
    let mut counts = BTreeMap::new();
    let mut entries = vec![0i8; n];
    for mask in 0u32..(1u32 << free) {
        for b in 0..free {
            let pos = b + 2; // 1-based position of this free slot
            entries[pos - 1] = if mask >> b & 1 == 0 {
                0
            } else if pos % 2 == 0 {
                1
            } else {
                -1
            };
        }
        let seq = CharacteristicSequence {
            entries: entries.clone(),
        };
        if validate_sequence(&seq, variant) {
            *counts.entry(seq.up_count()).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// `C(n, r)` as an exact integer (zero when `r > n`).
pub fn binomial(n: usize, r: usize) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `f_m(k) = C(2k, m) C(k, m + 1) / k`.
pub fn f_closed_form(m: usize, k: usize) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    if m > k {
        return Err(Error::Domain(format!("m = {m} exceeds k = {k}")));
    }
    let numerator = binomial(2 * k, m) * binomial(k, m + 1);
    let (q, r) = numerator.div_rem(&BigUint::from(k));
    assert!(r.is_zero(), "k = {k} does not divide C(2k,{m}) C(k,{})", m + 1);
    Ok(q)
}

/// How a [`PillarCountTable`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableSource {
    ClosedForm,
    Recursion,
    Enumeration,
}

/// Dense tables of `f_m(k)` and `g_m(k)` for `1 <= k <= max_k`, `0 <= m <= k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PillarCountTable {
    max_k: usize,
    // Row `k - 1` holds m = 0..=k.
    f: Vec<Vec<BigUint>>,
    g: Vec<Vec<BigUint>>,
    source: TableSource,
    zero: BigUint,
}

impl PillarCountTable {
    pub fn max_k(&self) -> usize {
        self.max_k
    }

    pub fn source(&self) -> TableSource {
        self.source
    }

    /// `f_m(k)`; zero for `m > k`.
    ///
    /// Panics if `k` is zero or above `max_k`.
    pub fn f(&self, m: usize, k: usize) -> &BigUint {
        self.f[self.row(k)].get(m).unwrap_or(&self.zero)
    }

    /// `g_m(k)`; zero for `m > k`.
    ///
    /// Panics if `k` is zero or above `max_k`.
    pub fn g(&self, m: usize, k: usize) -> &BigUint {
        self.g[self.row(k)].get(m).unwrap_or(&self.zero)
    }

    pub fn f_row(&self, k: usize) -> &[BigUint] {
        &self.f[self.row(k)]
    }

    pub fn g_row(&self, k: usize) -> &[BigUint] {
        &self.g[self.row(k)]
    }

    fn row(&self, k: usize) -> usize {
        assert!(
            (1..=self.max_k).contains(&k),
            "k = {k} outside table range 1..={}",
            self.max_k
        );
        k - 1
    }

    /// Built from the closed form for `f`; `g` is peeled off with the first
    /// coupled recursion, `g_m(k) = f_m(k) - Σ g_{s-1}(j-1) f_{m-s}(k-j+1)`.
    pub fn from_closed_form(max_k: usize) -> Result<Self> {
        check_max_k(max_k)?;
        let mut f: Vec<Vec<BigUint>> = Vec::with_capacity(max_k);
        let mut g: Vec<Vec<BigUint>> = Vec::with_capacity(max_k);
        for k in 1..=max_k {
            let f_row = (0..=k)
                .map(|m| f_closed_form(m, k))
                .collect::<Result<Vec<_>>>()?;
            let mut g_row = vec![BigUint::zero(); k + 1];
            for m in 0..=k {
                let cross = first_return_sum(&g, &f, m, k);
                let fm = BigInt::from(f_row[m].clone());
                let gm = fm - cross;
                g_row[m] = gm.to_biguint().ok_or_else(|| {
                    Error::Domain(format!("negative g_{m}({k}) derived from closed form"))
                })?;
            }
            f.push(f_row);
            g.push(g_row);
        }
        Ok(Self {
            max_k,
            f,
            g,
            source: TableSource::ClosedForm,
            zero: BigUint::zero(),
        })
    }

    /// Exhaustive enumeration for every `k <= max_k <= ENUMERATION_CUTOFF`.
    pub fn from_enumeration(max_k: usize) -> Result<Self> {
        check_max_k(max_k)?;
        let mut f = Vec::with_capacity(max_k);
        let mut g = Vec::with_capacity(max_k);
        for k in 1..=max_k {
            let to_row = |counts: BTreeMap<usize, u64>| {
                let mut row = vec![BigUint::zero(); k + 1];
                for (m, c) in counts {
                    row[m] = BigUint::from(c);
                }
                row
            };
            f.push(to_row(enumerate_pillar_counts(k, EndVariant::EndOneZero)?));
            g.push(to_row(enumerate_pillar_counts(k, EndVariant::EndThreeZeros)?));
        }
        Ok(Self {
            max_k,
            f,
            g,
            source: TableSource::Enumeration,
            zero: BigUint::zero(),
        })
    }

    /// CSV with header `k,m,f,g`, rows sorted by `(k, m)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,m,f,g\n");
        for k in 1..=self.max_k {
            for m in 0..=k {
                let _ = writeln!(out, "{k},{m},{},{}", self.f(m, k), self.g(m, k));
            }
        }
        out
    }
}

fn check_max_k(max_k: usize) -> Result<()> {
    if max_k == 0 {
        Err(Error::Domain("max_k must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn lookup(rows: &[Vec<BigUint>], m: usize, k: usize) -> Option<&BigUint> {
    rows.get(k.checked_sub(1)?)?.get(m)
}

/// `Σ_{s=1..m} Σ_{j=2..k} g_{s-1}(j-1) f_{m-s}(k-j+1)` over completed rows
/// `1..k-1`.
fn first_return_sum(g: &[Vec<BigUint>], f: &[Vec<BigUint>], m: usize, k: usize) -> BigInt {
    let mut acc = BigUint::zero();
    for s in 1..=m {
        for j in 2..=k {
            if let (Some(a), Some(b)) = (lookup(g, s - 1, j - 1), lookup(f, m - s, k - j + 1)) {
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
        }
    }
    BigInt::from(acc)
}

/// Fills `f_m(k)`, `g_m(k)` for `k <= max_k` with the two coupled
/// first-return recursions:
///
/// ```text
/// f_m(k) - g_m(k) = Σ_{s=1..m} Σ_{j=2..k} g_{s-1}(j-1) f_{m-s}(k-j+1)
/// g_m(k) = Σ_{s=1..m} Σ_{j=3..k} (Σ_{l=2..j-1} g_{s-1}(j-l)) (f_{m-s}(k-j+1) + g_{m-s}(k-j+1))
///        + Σ_{s=1..m} Σ_{j=2..k} g_{s-1}(j-1) g_{m-s}(k-j+1)
/// ```
///
/// with `f_0(k) = g_0(k) = 1` and `f_k(k) = g_k(k) = 0`.
pub fn build_tables_by_recursion(max_k: usize) -> Result<PillarCountTable> {
    check_max_k(max_k)?;
    let mut f: Vec<Vec<BigUint>> = Vec::with_capacity(max_k);
    let mut g: Vec<Vec<BigUint>> = Vec::with_capacity(max_k);
    // prefix[s][n] = Σ_{i=1..n} g_s(i), kept for completed rows.
    let mut prefix: Vec<Vec<BigUint>> = Vec::new();

    for k in 1..=max_k {
        let mut f_row = vec![BigUint::zero(); k + 1];
        let mut g_row = vec![BigUint::zero(); k + 1];
        f_row[0] = BigUint::one();
        g_row[0] = BigUint::one();
        for m in 1..k {
            let mut gm = BigUint::zero();
            let mut cross = BigUint::zero();
            for s in 1..=m {
                for j in 2..=k {
                    let rest = k - j + 1;
                    let f_rest = lookup(&f, m - s, rest);
                    let g_rest = lookup(&g, m - s, rest);
                    if j >= 3 {
                        if let Some(p) = prefix.get(s - 1).and_then(|r| r.get(j - 2)) {
                            if !p.is_zero() {
                                let mut tail = BigUint::zero();
                                if let Some(x) = f_rest {
                                    tail += x;
                                }
                                if let Some(x) = g_rest {
                                    tail += x;
                                }
                                gm += p * tail;
                            }
                        }
                    }
                    if let Some(head) = lookup(&g, s - 1, j - 1) {
                        if head.is_zero() {
                            continue;
                        }
                        if let Some(x) = g_rest {
                            gm += head * x;
                        }
                        if let Some(x) = f_rest {
                            cross += head * x;
                        }
                    }
                }
            }
            f_row[m] = &gm + cross;
            g_row[m] = gm;
        }
        f.push(f_row);
        g.push(g_row);

        // Extend the prefix sums with row k of g.
        let new_row = &g[k - 1];
        for s in 0..=k {
            if prefix.len() <= s {
                prefix.push(vec![BigUint::zero(); 1]);
            }
            let row = &mut prefix[s];
            while row.len() < k {
                let last = row.last().cloned().unwrap_or_default();
                row.push(last);
            }
            let last = row.last().cloned().unwrap_or_default();
            row.push(last + new_row.get(s).cloned().unwrap_or_default());
        }
    }

    Ok(PillarCountTable {
        max_k,
        f,
        g,
        source: TableSource::Recursion,
        zero: BigUint::zero(),
    })
}

/// Polynomial in `z` with exact integer coefficients (`coefficients[m]` is
/// the coefficient of `z^m`), tagged with its index `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexPolynomial {
    pub k: usize,
    pub coefficients: Vec<BigInt>,
}

impl IndexPolynomial {
    pub fn new(k: usize, coefficients: Vec<BigInt>) -> Self {
        Self {
            k,
            coefficients: trim(coefficients),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn coefficient(&self, m: usize) -> BigInt {
        self.coefficients.get(m).cloned().unwrap_or_default()
    }
}

fn trim(mut c: Vec<BigInt>) -> Vec<BigInt> {
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    c
}

fn poly_add_assign(acc: &mut Vec<BigInt>, other: &[BigInt]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), BigInt::zero());
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

fn poly_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigInt::zero());
    }
    for (o, x) in out.iter_mut().zip(b) {
        *o -= x;
    }
    trim(out)
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Multiplies by `z`.
fn shift(mut c: Vec<BigInt>) -> Vec<BigInt> {
    if !c.is_empty() {
        c.insert(0, BigInt::zero());
    }
    c
}

/// `z Σ_{j=2..k} G_{j-1} F_{k-j+1}`; `fs[i]`, `gs[i]` hold index `i + 1`.
fn cross_term(fs: &[Vec<BigInt>], gs: &[Vec<BigInt>], k: usize) -> Vec<BigInt> {
    let mut acc = Vec::new();
    for j in 2..=k {
        poly_add_assign(&mut acc, &poly_mul(&gs[j - 2], &fs[k - j]));
    }
    shift(acc)
}

/// `1 + z Σ_{j=3..k} S_{j-2} (F_{k-j+1} + G_{k-j+1}) + z Σ_{j=2..k} G_{j-1} G_{k-j+1}`
/// with `S_n = G_1 + ... + G_n`.
fn g_from_lower(fs: &[Vec<BigInt>], gs: &[Vec<BigInt>], k: usize) -> Vec<BigInt> {
    let mut prefix: Vec<Vec<BigInt>> = Vec::with_capacity(k);
    let mut running = Vec::new();
    for gp in gs.iter().take(k.saturating_sub(2)) {
        poly_add_assign(&mut running, gp);
        prefix.push(running.clone());
    }
    let mut acc = Vec::new();
    for j in 3..=k {
        let mut tail = fs[k - j].clone();
        poly_add_assign(&mut tail, &gs[k - j]);
        poly_add_assign(&mut acc, &poly_mul(&prefix[j - 3], &tail));
    }
    for j in 2..=k {
        poly_add_assign(&mut acc, &poly_mul(&gs[j - 2], &gs[k - j]));
    }
    let mut out = shift(acc);
    if out.is_empty() {
        out.push(BigInt::zero());
    }
    out[0] += 1;
    trim(out)
}

/// `F_1..F_max_k` and `G_1..G_max_k` from the polynomial recursions,
/// `F_1 = G_1 = 1`.
pub fn index_polynomials(
    max_k: usize,
) -> Result<(Vec<IndexPolynomial>, Vec<IndexPolynomial>)> {
    check_max_k(max_k)?;
    let mut fs: Vec<Vec<BigInt>> = Vec::with_capacity(max_k);
    let mut gs: Vec<Vec<BigInt>> = Vec::with_capacity(max_k);
    for k in 1..=max_k {
        let g = g_from_lower(&fs, &gs, k);
        gs.push(g);
        let mut f = cross_term(&fs, &gs, k);
        poly_add_assign(&mut f, &gs[k - 1]);
        fs.push(trim(f));
    }
    let wrap = |v: Vec<Vec<BigInt>>| {
        v.into_iter()
            .enumerate()
            .map(|(i, c)| IndexPolynomial::new(i + 1, c))
            .collect()
    };
    Ok((wrap(fs), wrap(gs)))
}

/// `G_1..G_max_k` from the second polynomial recursion, driven by the given
/// `F` polynomials instead of the coupled first recursion.
pub fn g_polynomials_from(fs: &[IndexPolynomial]) -> Vec<IndexPolynomial> {
    let f_coeffs: Vec<Vec<BigInt>> = fs.iter().map(|p| p.coefficients.clone()).collect();
    let mut gs: Vec<Vec<BigInt>> = Vec::with_capacity(fs.len());
    for k in 1..=fs.len() {
        let g = g_from_lower(&f_coeffs, &gs, k);
        gs.push(g);
    }
    gs.into_iter()
        .enumerate()
        .map(|(i, c)| IndexPolynomial::new(i + 1, c))
        .collect()
}

/// `F_k - G_k - z Σ_{j=2..k} G_{j-1} F_{k-j+1}`, trimmed; empty iff the
/// first polynomial identity holds at `k`.
pub fn first_identity_residual(
    fs: &[IndexPolynomial],
    gs: &[IndexPolynomial],
    k: usize,
) -> Vec<BigInt> {
    let f: Vec<Vec<BigInt>> = fs.iter().map(|p| p.coefficients.clone()).collect();
    let g: Vec<Vec<BigInt>> = gs.iter().map(|p| p.coefficients.clone()).collect();
    let lhs = poly_sub(&f[k - 1], &g[k - 1]);
    poly_sub(&lhs, &cross_term(&f, &g, k))
}

/// Closed-form `F_1..F_max_k`.
pub fn closed_form_f_polynomials(max_k: usize) -> Result<Vec<IndexPolynomial>> {
    check_max_k(max_k)?;
    (1..=max_k)
        .map(|k| {
            let c = (0..=k)
                .map(|m| f_closed_form(m, k).map(BigInt::from))
                .collect::<Result<Vec<_>>>()?;
            Ok(IndexPolynomial::new(k, c))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(v: &[i8]) -> CharacteristicSequence {
        CharacteristicSequence::new(v.to_vec()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn matching_of_figure_sequence() {
        let s = seq(&[0, 1, 0, 1, 0, 0, -1, 0, -1, 0, 0, 0]);
        assert_eq!(canonical_matching(&s).unwrap(), vec![(4, 7), (2, 9)]);
        assert_eq!(s.partial_sums(), vec![0, 1, 1, 2, 2, 2, 1, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn matching_of_zero_sequence_is_empty() {
        assert!(canonical_matching(&CharacteristicSequence::zeros(2).unwrap())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn matching_errors() {
        let s = seq(&[0, 0, -1, 0, 0, 0, 0, 0]);
        assert_eq!(
            canonical_matching(&s),
            Err(Error::PrefixViolation { position: 3 })
        );
        let s = seq(&[0, 1, 0, 0, 0, 0, 0, 0]);
        assert!(matches!(
            canonical_matching(&s),
            Err(Error::UnbalancedSequence { ups: 1, downs: 0 })
        ));
        let s = seq(&[1, 0, 0, 0]);
        assert!(matches!(
            canonical_matching(&s),
            Err(Error::ParityViolation { position: 1, value: 1 })
        ));
    }

    #[test]
    fn construction_rejects_bad_shapes() {
        assert!(CharacteristicSequence::new(vec![0, 0, 0]).is_err());
        assert!(CharacteristicSequence::new(vec![]).is_err());
        assert!(CharacteristicSequence::new(vec![0, 2, 0, 0]).is_err());
    }

    #[test]
    fn validation_examples() {
        let good = seq(&[0, 1, 0, 1, 0, 0, -1, 0, -1, 0, 0, 0]);
        assert!(validate_sequence(&good, EndVariant::EndOneZero));
        assert!(validate_sequence(&good, EndVariant::EndThreeZeros));

        let crossing = seq(&[0, 1, 0, 0, 0, 0, 0, 1, -1, 0, -1, 0, 0, 0, 0, 0]);
        assert!(!validate_sequence(&crossing, EndVariant::EndOneZero));

        let parallel = seq(&[0, 1, 0, 0, 0, 0, 0, 0, -1, 1, 0, 0, -1, 0, 0, 0]);
        let nested = seq(&[0, 1, 0, 1, 0, 0, -1, 0, -1, 0, 0, 0, 0, 0, 0, 0]);
        assert!(validate_sequence(&parallel, EndVariant::EndOneZero));
        assert!(validate_sequence(&nested, EndVariant::EndOneZero));

        for k in 1..=4 {
            let z = CharacteristicSequence::zeros(k).unwrap();
            assert!(validate_sequence(&z, EndVariant::EndOneZero));
            assert!(validate_sequence(&z, EndVariant::EndThreeZeros));
        }
    }

    #[test]
    fn validation_tail_variants_differ() {
        // 0 1 0 0 -1 0 0 0 | window 4, ends with three zeros.
        let s = seq(&[0, 1, 0, 0, -1, 0, 0, 0]);
        assert!(validate_sequence(&s, EndVariant::EndThreeZeros));
        // 0 0 0 1 0 0 -1 0 | only one trailing zero.
        let s = seq(&[0, 0, 0, 1, 0, 0, -1, 0]);
        assert!(validate_sequence(&s, EndVariant::EndOneZero));
        assert!(!validate_sequence(&s, EndVariant::EndThreeZeros));
        // Window of length 2 is not a multiple of four.
        let s = seq(&[0, 1, -1, 0, 0, 0, 0, 0]);
        assert!(!validate_sequence(&s, EndVariant::EndOneZero));
    }

    #[test]
    fn enumeration_examples() {
        let f2 = enumerate_pillar_counts(2, EndVariant::EndOneZero).unwrap();
        assert_eq!(f2, BTreeMap::from([(0, 1), (1, 2)]));
        let g2 = enumerate_pillar_counts(2, EndVariant::EndThreeZeros).unwrap();
        assert_eq!(g2, BTreeMap::from([(0, 1), (1, 1)]));
        for v in [EndVariant::EndOneZero, EndVariant::EndThreeZeros] {
            assert_eq!(enumerate_pillar_counts(1, v).unwrap(), BTreeMap::from([(0, 1)]));
        }
        assert_eq!(
            enumerate_pillar_counts(5, EndVariant::EndOneZero),
            Err(Error::CutoffExceeded { k: 5, cutoff: 4 })
        );
        assert!(enumerate_pillar_counts(0, EndVariant::EndOneZero).is_err());
    }

    #[test]
    fn closed_form_examples() {
        for k in 1..10 {
            assert_eq!(f_closed_form(0, k).unwrap(), BigUint::one());
            assert_eq!(f_closed_form(k, k).unwrap(), BigUint::zero());
        }
        assert_eq!(f_closed_form(1, 2).unwrap(), BigUint::from(2u32));
        assert_eq!(f_closed_form(2, 3).unwrap(), BigUint::from(5u32));
        assert!(f_closed_form(4, 3).is_err());
        assert!(f_closed_form(0, 0).is_err());
    }

    #[test]
    fn recursion_table_examples() {
        let t = build_tables_by_recursion(5).unwrap();
        assert_eq!(t.source(), TableSource::Recursion);
        assert_eq!(t.f(1, 3), &BigUint::from(6u32));
        assert_eq!(t.g(1, 3), &BigUint::from(4u32));
        assert_eq!(t.g(1, 2), &BigUint::from(1u32));
        assert_eq!(t.f(7, 3), &BigUint::zero());
        for k in 1..=5 {
            assert_eq!(t.f(0, k), &BigUint::one());
            assert_eq!(t.g(0, k), &BigUint::one());
            assert_eq!(t.f(k, k), &BigUint::zero());
            assert_eq!(t.g(k, k), &BigUint::zero());
        }
    }

    #[test]
    fn three_routes_agree_up_to_cutoff() {
        let rec = build_tables_by_recursion(4).unwrap();
        let enu = PillarCountTable::from_enumeration(4).unwrap();
        let closed = PillarCountTable::from_closed_form(4).unwrap();
        for k in 1..=4 {
            for m in 0..=k {
                assert_eq!(rec.f(m, k), enu.f(m, k), "f_{m}({k})");
                assert_eq!(rec.g(m, k), enu.g(m, k), "g_{m}({k})");
                assert_eq!(closed.f(m, k), enu.f(m, k));
                assert_eq!(closed.g(m, k), enu.g(m, k));
            }
        }
    }

    #[test]
    fn recursion_matches_closed_form_far_beyond_cutoff() {
        let rec = build_tables_by_recursion(30).unwrap();
        let closed = PillarCountTable::from_closed_form(30).unwrap();
        assert_eq!(rec.f, closed.f);
        assert_eq!(rec.g, closed.g);
        // 64-bit overflow territory is handled.
        assert!(rec.f(15, 30).bits() > 64);
    }

    #[test]
    fn index_polynomial_examples() {
        let (fs, gs) = index_polynomials(6).unwrap();
        assert_eq!(fs[1].coefficients, ints(&[1, 2]));
        assert_eq!(gs[1].coefficients, ints(&[1, 1]));
        assert_eq!(gs[2].coefficients, ints(&[1, 4, 2]));
        assert_eq!(poly_sub(&fs[2].coefficients, &gs[2].coefficients), ints(&[0, 2, 3]));
        let table = build_tables_by_recursion(6).unwrap();
        for k in 1..=6 {
            assert!(fs[k - 1].degree().unwrap() < k);
            for m in 0..=k {
                assert_eq!(fs[k - 1].coefficient(m), BigInt::from(table.f(m, k).clone()));
                assert_eq!(gs[k - 1].coefficient(m), BigInt::from(table.g(m, k).clone()));
            }
        }
    }

    #[test]
    fn first_identity_with_closed_form_f() {
        let fs = closed_form_f_polynomials(12).unwrap();
        let gs = g_polynomials_from(&fs);
        for k in 2..=12 {
            assert!(first_identity_residual(&fs, &gs, k).is_empty(), "k = {k}");
        }
        // Dropping the 1/k factor breaks it.
        let broken: Vec<IndexPolynomial> = fs
            .iter()
            .map(|p| {
                IndexPolynomial::new(
                    p.k,
                    p.coefficients.iter().map(|c| c * BigInt::from(p.k)).collect(),
                )
            })
            .collect();
        let gb = g_polynomials_from(&broken);
        assert!((2..=12).any(|k| !first_identity_residual(&broken, &gb, k).is_empty()));
    }

    #[test]
    fn csv_dump_layout() {
        let csv = build_tables_by_recursion(2).unwrap().to_csv();
        assert_eq!(csv, "k,m,f,g\n1,0,1,1\n1,1,0,0\n2,0,1,1\n2,1,2,1\n2,2,0,0\n");
    }

    #[test]
    fn integrality_and_positive_row_sums() {
        for k in 1..=40usize {
            let mut row = BigUint::zero();
            for m in 0..=k {
                let n = binomial(2 * k, m) * binomial(k, m + 1);
                assert!((n % BigUint::from(k)).is_zero());
                row += f_closed_form(m, k).unwrap();
            }
            assert!(row >= BigUint::one());
        }
    }

    proptest! {
        #[test]
        fn matchings_are_nested_and_parity_placed(k in 1usize..=4, bits in any::<u32>()) {
            let n = 4 * k;
            let entries: Vec<i8> = (0..n)
                .map(|i| {
                    if bits >> (i % 32) & 1 == 0 { 0 } else if (i + 1) % 2 == 0 { 1 } else { -1 }
                })
                .collect();
            let s = CharacteristicSequence::new(entries).unwrap();
            if let Ok(pairs) = canonical_matching(&s) {
                for &(i, j) in &pairs {
                    prop_assert!(i < j && i % 2 == 0 && j % 2 == 1);
                }
                for (a, &(i1, j1)) in pairs.iter().enumerate() {
                    for &(i2, j2) in &pairs[a + 1..] {
                        let disjoint = j1 < i2 || j2 < i1;
                        let nested = (i1 < i2 && j2 < j1) || (i2 < i1 && j1 < j2);
                        prop_assert!(disjoint || nested);
                    }
                }
                let sums = s.partial_sums();
                prop_assert!(sums.iter().all(|&v| v >= 0));
                prop_assert_eq!(*sums.last().unwrap(), 0);
            }
        }
    }
}
