//! Row-major dense matrices and the lag-s auto-covariance construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `M Mᵀ`. Only the upper triangle is computed and then mirrored, so the
    /// result is exactly symmetric.
    pub fn gram(&self) -> Self {
        let n = self.rows;
        let mut g = Self::zeros(n, n);
        for i in 0..n {
            let ri = self.row(i);
            for j in i..n {
                let v = dot(ri, self.row(j));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `X_T` together with the lag and sample size it was built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagCovMatrix {
    pub lag: usize,
    pub sample_size: usize,
    pub values: DenseMatrix,
}

impl LagCovMatrix {
    pub fn p(&self) -> usize {
        self.values.rows()
    }
}

/// `X_T = (1/T) Σ_{t=s+1}^{s+T} ε_t ε_{t-s}ᵀ` from a `p × (T + s)` noise
/// array whose columns are `ε_1, ..., ε_{T+s}`.
///
/// Entry `(i, j)` is the dot product of row `i` over columns `s..s+T` with
/// row `j` over columns `0..T`, both contiguous in row-major storage.
pub fn build_lag_autocov(noise: &DenseMatrix, lag: usize, sample_size: usize) -> Result<LagCovMatrix> {
    if lag == 0 || sample_size == 0 {
        return Err(Error::InvalidConfig("lag and sample size must be positive".into()));
    }
    if noise.cols() != sample_size + lag {
        return Err(Error::ShapeMismatch(format!(
            "noise has {} columns, expected T + s = {}",
            noise.cols(),
            sample_size + lag
        )));
    }
    let p = noise.rows();
    let scale = 1.0 / sample_size as f64;
    let mut x = DenseMatrix::zeros(p, p);
    for i in 0..p {
        let lead = &noise.row(i)[lag..lag + sample_size];
        for j in 0..p {
            x[(i, j)] = dot(lead, &noise.row(j)[..sample_size]) * scale;
        }
    }
    Ok(LagCovMatrix {
        lag,
        sample_size,
        values: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_noise() {
        let noise = DenseMatrix::from_vec(3, 7, vec![1.0; 21]).unwrap();
        let x = build_lag_autocov(&noise, 2, 5).unwrap();
        assert!(x.values.as_slice().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn scalar_direct_formula() {
        let (e1, e2, e3) = (0.3, -1.7, 2.5);
        let noise = DenseMatrix::from_vec(1, 3, vec![e1, e2, e3]).unwrap();
        let x = build_lag_autocov(&noise, 1, 2).unwrap();
        assert!((x.values[(0, 0)] - (e2 * e1 + e3 * e2) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn lag_longer_than_sample() {
        // s = 4 > T = 2: columns 4,5 pair with 0,1.
        let noise = DenseMatrix::from_rows(&[vec![1.0, 2.0, 0.0, 0.0, 3.0, 5.0]]).unwrap();
        let x = build_lag_autocov(&noise, 4, 2).unwrap();
        assert_eq!(x.values[(0, 0)], (3.0 * 1.0 + 5.0 * 2.0) / 2.0);
    }

    #[test]
    fn asymmetric_pairing() {
        let noise = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let x = build_lag_autocov(&noise, 1, 2).unwrap();
        // X[0][1] = (ε_2[0] ε_1[1] + ε_3[0] ε_2[1]) / 2
        assert_eq!(x.values[(0, 1)], (2.0 * 4.0 + 3.0 * 5.0) / 2.0);
        assert_eq!(x.values[(1, 0)], (5.0 * 1.0 + 6.0 * 2.0) / 2.0);
    }

    #[test]
    fn shape_mismatch() {
        let noise = DenseMatrix::zeros(2, 5);
        assert!(matches!(build_lag_autocov(&noise, 1, 5), Err(Error::ShapeMismatch(_))));
        assert!(build_lag_autocov(&noise, 0, 5).is_err());
    }

    #[test]
    fn gram_is_exactly_symmetric() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let g = m.gram();
        assert_eq!(g, DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap());
        assert_eq!(g.trace(), 3.0);
        assert_eq!(m.transpose().transpose(), m);
    }
}
