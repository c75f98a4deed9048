//! Eigenvalues of real symmetric matrices: Householder reduction to
//! tridiagonal form, then implicit-shift QL. No eigenvectors.

use serde::{Deserialize, Serialize};

use super::dense::{dot, DenseMatrix, LagCovMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 50;
const OFFDIAG_RTOL: f64 = 1e-14;
/// Negatives down to `-CLAMP_RTOL·λ_max` are roundoff and get clamped to 0.
pub const CLAMP_RTOL: f64 = 1e-10;

/// Diagonal `d` and subdiagonal `e` (with `e.len() == d.len() - 1`) of a
/// tridiagonal matrix orthogonally similar to `a`.
pub fn tridiagonalize(a: &DenseMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!("{}x{} is not square", a.rows(), a.cols())));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    if n == 0 {
        return Ok((d, e));
    }

    for k in 0..n.saturating_sub(2) {
        d[k] = m[(k, k)];
        let x: Vec<f64> = (k + 1..n).map(|i| m[(i, k)]).collect();
        let norm = dot(&x, &x).sqrt();
        let tail = x[1..].iter().any(|&v| v != 0.0);
        if !tail {
            e[k] = x[0];
            continue;
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        e[k] = alpha;
        let mut v = x;
        v[0] -= alpha;
        let vn = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|vi| *vi /= vn);

        // B ← B - v wᵀ - w vᵀ with p = B v, w = 2p - 2(vᵀp) v.
        let size = n - k - 1;
        let off = k + 1;
        let p: Vec<f64> = (0..size)
            .map(|i| (0..size).map(|j| m[(off + i, off + j)] * v[j]).sum())
            .collect();
        let kv = dot(&v, &p);
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| 2.0 * pi - 2.0 * kv * vi).collect();
        for i in 0..size {
            for j in 0..size {
                m[(off + i, off + j)] -= v[i] * w[j] + w[i] * v[j];
            }
        }
    }
    if n >= 2 {
        d[n - 2] = m[(n - 2, n - 2)];
        e[n - 2] = m[(n - 1, n - 2)];
    }
    d[n - 1] = m[(n - 1, n - 1)];
    Ok((d, e))
}

/// Eigenvalues of the symmetric tridiagonal matrix `(d, e)`, unsorted.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    if e.len() + 1 != n {
        return Err(Error::ShapeMismatch("subdiagonal length must be n - 1".into()));
    }
    let mut e: Vec<f64> = e.iter().copied().chain([0.0]).collect();
    let scale = d
        .iter()
        .zip(&e)
        .fold(0.0f64, |acc, (di, ei)| acc.max(di.abs() + ei.abs()));
    let floor = f64::EPSILON * scale;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= OFFDIAG_RTOL * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::EigenNonConvergence {
                    index: l,
                    iterations: MAX_SWEEPS,
                });
            }
            // Wilkinson-type shift from the leading 2×2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated_early = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated_early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated_early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// All eigenvalues of a symmetric matrix, ascending. Only the lower
/// triangle is trusted; the input is symmetrized first.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!("{}x{} is not square", a.rows(), a.cols())));
    }
    if !a.is_finite() {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let n = a.rows();
    let mut sym = a.clone();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            sym[(i, j)] = v;
            sym[(j, i)] = v;
        }
    }
    let (d, e) = tridiagonalize(&sym)?;
    let mut ev = tridiagonal_eigenvalues(d, &e)?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Spectrum of `A_T = X_T X_Tᵀ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Descending, with roundoff negatives clamped to 0.
    pub eigenvalues: Vec<f64>,
    pub l1: f64,
    /// How many negatives were clamped.
    pub clamped: usize,
    /// Smallest eigenvalue before clamping.
    pub min_raw: f64,
    /// Sum of the unclamped eigenvalues.
    pub raw_sum: f64,
    pub trace: f64,
}

impl Spectrum {
    pub fn from_raw(mut raw: Vec<f64>, trace: f64) -> Self {
        raw.sort_by(|a, b| b.total_cmp(a));
        let l1 = raw.first().copied().unwrap_or(0.0);
        let min_raw = raw.last().copied().unwrap_or(0.0);
        let raw_sum = raw.iter().sum();
        let mut clamped = 0;
        for v in raw.iter_mut().filter(|v| **v < 0.0) {
            *v = 0.0;
            clamped += 1;
        }
        Self {
            eigenvalues: raw,
            l1,
            clamped,
            min_raw,
            raw_sum,
            trace,
        }
    }

    pub fn p(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Whether the most negative raw eigenvalue is within roundoff of 0.
    pub fn is_psd_within_roundoff(&self) -> bool {
        self.min_raw >= -CLAMP_RTOL * self.l1.abs()
    }

    /// Eigenvalues at most `rtol·λ_max`.
    pub fn near_zero_count(&self, rtol: f64) -> usize {
        let cut = rtol * self.l1;
        self.eigenvalues.iter().filter(|&&v| v <= cut).count()
    }
}

pub fn gram_spectrum(x: &LagCovMatrix) -> Result<Spectrum> {
    if !x.values.is_square() || !x.values.is_finite() {
        return Err(Error::Domain("X_T must be a finite square matrix".into()));
    }
    let a = x.values.gram();
    let raw = symmetric_eigenvalues(&a)?;
    Ok(Spectrum::from_raw(raw, a.trace()))
}

/// `m̂_k = (1/p) Σ λ_j^k` for `k = 1..=K`.
pub fn empirical_moments(spectrum: &Spectrum, order: usize) -> Vec<f64> {
    let p = spectrum.p().max(1) as f64;
    let mut powers = vec![1.0; spectrum.p()];
    (1..=order)
        .map(|_| {
            let mut sum = 0.0;
            for (pw, &l) in powers.iter_mut().zip(&spectrum.eigenvalues) {
                *pw *= l;
                sum += *pw;
            }
            sum / p
        })
        .collect()
}
