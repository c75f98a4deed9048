//! Exact-arithmetic eigenvalue oracle for small symmetric matrices.
//!
//! The characteristic polynomial is expanded in rationals by
//! Faddeev–LeVerrier, a Sturm chain counts its real roots below any
//! rational point, and each root is isolated by bisection. Every step is
//! exact except the final bisection midpoint.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dense::DenseMatrix;
use crate::error::{Error, Result};

fn to_rational(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::Domain(format!("non-finite entry {v}")))
}

/// Coefficients `c_0..c_n` (ascending, monic) of `det(λI - A)`.
pub fn characteristic_polynomial(a: &DenseMatrix) -> Result<Vec<BigRational>> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("characteristic polynomial needs a square matrix".into()));
    }
    let n = a.rows();
    let am: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| to_rational(a[(i, j)])).collect())
        .collect::<Result<_>>()?;
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k.
    let mut mk = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for l in 0..n {
                    if !mk[l][j].is_zero() {
                        acc += &am[i][l] * &mk[l][j];
                    }
                }
                next[i][j] = acc;
            }
            next[i][i] += &c[n - k + 1];
        }
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &am[i][l] * &next[l][i];
            }
        }
        c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
        mk = next;
    }
    Ok(c)
}

/// Integer polynomial, ascending, scaled by a positive factor (which keeps
/// the sign at every point).
type IntPoly = Vec<BigInt>;

fn clear_denominators(p: &[BigRational]) -> IntPoly {
    let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|c| c / &g).collect()
    }
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        p.push(BigRational::zero());
    }
    p
}

fn remainder(num: &[BigRational], den: &[BigRational]) -> Vec<BigRational> {
    let mut r = num.to_vec();
    let dl = den.len() - 1;
    let lead = &den[dl];
    while r.len() > dl {
        let shift = r.len() - 1 - dl;
        let q = r[r.len() - 1].clone() / lead;
        for (i, d) in den.iter().enumerate() {
            r[shift + i] -= &q * d;
        }
        r.pop();
    }
    trim(r)
}

pub struct SturmChain {
    chain: Vec<IntPoly>,
    bound: f64,
}

impl SturmChain {
    /// `None` when the polynomial has a repeated root (the chain would count
    /// distinct roots only).
    pub fn new(poly: &[BigRational]) -> Option<Self> {
        let p = trim(poly.to_vec());
        let deriv: Vec<BigRational> = p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect();
        let mut chain = vec![p.clone(), trim(deriv)];
        loop {
            let n = chain.len();
            if chain[n - 1].len() == 1 {
                break;
            }
            let r = remainder(&chain[n - 2], &chain[n - 1]);
            if r.len() == 1 && r[0].is_zero() {
                return None;
            }
            chain.push(r.into_iter().map(|c| -c).collect());
        }
        let lead = p.last()?.clone();
        let max_ratio = p[..p.len() - 1]
            .iter()
            .map(|c| (c / &lead).abs())
            .max()
            .unwrap_or_else(BigRational::zero);
        let bound = 1.0 + num_traits::ToPrimitive::to_f64(&max_ratio)?;
        Some(Self {
            chain: chain.iter().map(|q| clear_denominators(q)).collect(),
            bound,
        })
    }

    pub fn degree(&self) -> usize {
        self.chain[0].len() - 1
    }

    /// Sign of `q(num/den)` with `den > 0`.
    fn sign_at(q: &IntPoly, num: &BigInt, den_pows: &[BigInt]) -> i8 {
        let deg = q.len() - 1;
        let mut acc = BigInt::zero();
        for (i, c) in q.iter().enumerate().rev() {
            acc = acc * num + c * &den_pows[deg - i];
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    /// Number of roots `<= x`.
    pub fn roots_at_most(&self, x: f64) -> usize {
        let r = BigRational::from_float(x).expect("finite bisection point");
        let (num, den) = (r.numer().clone(), r.denom().clone());
        let mut den_pows = vec![BigInt::one()];
        for _ in 0..self.degree() {
            let next = den_pows.last().unwrap() * &den;
            den_pows.push(next);
        }
        let changes = |signs: Vec<i8>| {
            let nz: Vec<i8> = signs.into_iter().filter(|&s| s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at_x: Vec<i8> = self.chain.iter().map(|q| Self::sign_at(q, &num, &den_pows)).collect();
        // At +∞ every sign is the sign of the leading coefficient.
        let at_inf: Vec<i8> = self
            .chain
            .iter()
            .map(|q| if q.last().unwrap().is_positive() { 1 } else { -1 })
            .collect();
        // V(x) - V(∞) counts the roots in (x, ∞).
        self.degree() - (changes(at_x) - changes(at_inf))
    }

    /// All roots ascending, each isolated to an interval of width `tol`.
    pub fn roots(&self, tol: f64) -> Vec<f64> {
        (0..self.degree())
            .map(|i| {
                let (mut lo, mut hi) = (-self.bound, self.bound);
                while hi - lo > tol {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.roots_at_most(mid) > i {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }
}

/// Exact-oracle eigenvalues (ascending) of a small symmetric matrix, or
/// `None` if the characteristic polynomial has a repeated root.
pub fn oracle_eigenvalues(a: &DenseMatrix, tol: f64) -> Result<Option<Vec<f64>>> {
    let cp = characteristic_polynomial(a)?;
    Ok(SturmChain::new(&cp).map(|s| s.roots(tol)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn characteristic_polynomial_examples() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        // λ² - 3λ + 1
        assert_eq!(characteristic_polynomial(&a).unwrap(), vec![r(1), r(-3), r(1)]);
        let cp = characteristic_polynomial(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(cp, vec![r(-1), r(3), r(-3), r(1)]);
    }

    #[test]
    fn sturm_roots_of_known_cubic() {
        // (x - 1)(x - 2)(x + 3) = x³ - 7x + 6
        let s = SturmChain::new(&[r(6), r(-7), r(0), r(1)]).unwrap();
        assert_eq!(s.roots_at_most(0.0), 1);
        assert_eq!(s.roots_at_most(1.0), 2);
        assert_eq!(s.roots_at_most(10.0), 3);
        let roots = s.roots(1e-12);
        for (g, w) in roots.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((g - w).abs() < 1e-11);
        }
    }

    #[test]
    fn repeated_roots_are_flagged() {
        assert!(SturmChain::new(&[r(1), r(-2), r(1)]).is_none());
        assert!(oracle_eigenvalues(&DenseMatrix::identity(2), 1e-12).unwrap().is_none());
    }

    #[test]
    fn two_by_two_oracle() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let ev = oracle_eigenvalues(&a, 1e-12).unwrap().unwrap();
        let r5 = 5f64.sqrt();
        assert!((ev[0] - (3.0 - r5) / 2.0).abs() < 1e-11);
        assert!((ev[1] - (3.0 + r5) / 2.0).abs() < 1e-11);
    }
}
