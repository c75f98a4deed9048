//! Limiting moments `m_k(y)` of the singular-value law.
//!
//! Three routes are provided and must agree exactly on rational `y`:
//! the binomial closed form, the pillar-count sum, and the convolution
//! recursion `m_k = y² Σ_{a+b+c=k-1} m_a m_b m_c + (y - y²) Σ_{a+b=k-1} m_a m_b`
//! (with `m_0 = 1`). Floating-point variants exist for irrational `y` and
//! large orders.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{f_closed_form, PillarCountTable};
use crate::error::{Error, Result};
use crate::spectral::support_endpoints;

/// Orders above this switch the CLI to the floating-point path.
pub const EXACT_ORDER_LIMIT: usize = 64;

/// Exact positive aspect ratio `y = p/T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AspectRatio(BigRational);

impl AspectRatio {
    pub fn new(y: BigRational) -> Result<Self> {
        if !y.is_positive() {
            return Err(Error::Domain(format!("aspect ratio must be positive, got {y}")));
        }
        Ok(Self(y))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Self::new(BigRational::new(num.into(), den.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl FromStr for AspectRatio {
    type Err = Error;

    /// Accepts `"p/q"` or an integer.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parsed = match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim());
                let d = BigInt::from_str(d.trim());
                match (n, d) {
                    (Ok(n), Ok(d)) if !d.is_zero() => Some(BigRational::new(n, d)),
                    _ => None,
                }
            }
            None => BigInt::from_str(s).ok().map(BigRational::from_integer),
        };
        let y = parsed.ok_or_else(|| Error::Domain(format!("'{s}' is not a rational number")))?;
        Self::new(y)
    }
}

impl fmt::Display for AspectRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn check_real_ratio(y: f64) -> Result<()> {
    if y.is_finite() && y > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("aspect ratio must be positive, got {y}")))
    }
}

/// `m_1..m_K` at a fixed `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence<T> {
    pub y: T,
    /// `values[k - 1] = m_k`.
    pub values: Vec<T>,
}

impl<T> MomentSequence<T> {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `m_k` for `1 <= k <= K`.
    pub fn get(&self, k: usize) -> Option<&T> {
        k.checked_sub(1).and_then(|i| self.values.get(i))
    }
}

pub type ExactMoments = MomentSequence<BigRational>;
pub type NumericMoments = MomentSequence<f64>;

fn rational_pow(y: &BigRational, e: usize) -> BigRational {
    num_traits::pow(y.clone(), e)
}

/// `m_k = Σ_{i=0}^{k-1} (1/k) C(2k,i) C(k,i+1) y^{2k-1-i}`.
pub fn moment_closed_form(k: usize, y: &AspectRatio) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::Domain("moment order must be at least 1".into()));
    }
    let mut acc = BigRational::zero();
    for i in 0..k {
        let coeff = BigInt::from(f_closed_form(i, k)?);
        acc += rational_pow(y.value(), 2 * k - 1 - i) * coeff;
    }
    Ok(acc)
}

/// Floating-point closed form; the integer coefficients are still exact.
pub fn moment_closed_form_f64(k: usize, y: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("moment order must be at least 1".into()));
    }
    check_real_ratio(y)?;
    let mut acc = 0.0;
    for i in 0..k {
        let coeff = f_closed_form(i, k)?.to_f64().unwrap_or(f64::INFINITY);
        acc += coeff * y.powi((2 * k - 1 - i) as i32);
    }
    Ok(acc)
}

fn check_table(k: usize, table: &PillarCountTable) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("moment order must be at least 1".into()));
    }
    if k > table.max_k() {
        return Err(Error::TableTooSmall {
            k,
            max_k: table.max_k(),
        });
    }
    Ok(())
}

/// `m_k = Σ_{t=1}^{k} y^{2k-t} f_{t-1}(k)`.
pub fn moment_from_pillars(
    k: usize,
    y: &AspectRatio,
    table: &PillarCountTable,
) -> Result<BigRational> {
    check_table(k, table)?;
    let mut acc = BigRational::zero();
    for t in 1..=k {
        let count: &BigUint = table.f(t - 1, k);
        acc += rational_pow(y.value(), 2 * k - t) * BigInt::from(count.clone());
    }
    Ok(acc)
}

pub fn moment_from_pillars_f64(k: usize, y: f64, table: &PillarCountTable) -> Result<f64> {
    check_table(k, table)?;
    check_real_ratio(y)?;
    Ok((1..=k)
        .map(|t| {
            table.f(t - 1, k).to_f64().unwrap_or(f64::INFINITY) * y.powi((2 * k - t) as i32)
        })
        .sum())
}

/// Runs `c_k = cubic Σ_{a+b+c=k-1} c_a c_b c_c + quadratic Σ_{a+b=k-1} c_a c_b`
/// from `c_0 = 1` and returns `c_0..c_K`.
///
/// Running square and cube convolutions keep the total cost `O(K²)`.
/// `(y², y - y²)` gives the limiting moments; `(0, 1)` the Catalan numbers;
/// `(1, 0)` the order-three Catalan numbers.
pub fn convolution_recursion<T>(order: usize, cubic: &T, quadratic: &T) -> Vec<T>
where
    T: Num + Clone,
{
    let mut c: Vec<T> = Vec::with_capacity(order + 1);
    // square[n] = Σ_{a+b=n} c_a c_b, cube[n] = Σ_{a+b=n} c_a square[b]
    let mut square: Vec<T> = Vec::with_capacity(order);
    let mut cube: Vec<T> = Vec::with_capacity(order);
    c.push(T::one());
    for k in 1..=order {
        let n = k - 1;
        let sq = (0..=n).fold(T::zero(), |acc, a| acc + c[a].clone() * c[n - a].clone());
        square.push(sq);
        let cu = (0..=n).fold(T::zero(), |acc, a| acc + c[a].clone() * square[n - a].clone());
        cube.push(cu);
        let next = cubic.clone() * cube[n].clone() + quadratic.clone() * square[n].clone();
        c.push(next);
    }
    c
}

/// Exact moments `m_1..m_K` from the convolution recursion.
pub fn moment_recursion(order: usize, y: &AspectRatio) -> Result<ExactMoments> {
    if order == 0 {
        return Err(Error::Domain("order must be at least 1".into()));
    }
    let y2 = y.value() * y.value();
    let lin = y.value() - &y2;
    let mut c = convolution_recursion(order, &y2, &lin);
    c.remove(0);
    Ok(MomentSequence {
        y: y.value().clone(),
        values: c,
    })
}

pub fn moment_recursion_f64(order: usize, y: f64) -> Result<NumericMoments> {
    if order == 0 {
        return Err(Error::Domain("order must be at least 1".into()));
    }
    check_real_ratio(y)?;
    let mut c = convolution_recursion(order, &(y * y), &(y - y * y));
    c.remove(0);
    Ok(MomentSequence { y, values: c })
}

fn series_mul(a: &[BigRational], b: &[BigRational], len: usize) -> Vec<BigRational> {
    (0..len)
        .map(|n| {
            (0..=n)
                .filter_map(|i| Some(a.get(i)? * b.get(n - i)?))
                .fold(BigRational::zero(), |acc, t| acc + t)
        })
        .collect()
}

/// Coefficients `0..K` of `x y² h³ + x (y - y²) h² - h + 1` for the
/// truncated series `h = Σ_{k<=K} m_k x^k`; `h[0]` must be `m_0`.
pub fn series_residual(y: &BigRational, h: &[BigRational]) -> Vec<BigRational> {
    let len = h.len();
    let h2 = series_mul(h, h, len);
    let h3 = series_mul(&h2, h, len);
    let y2 = y * y;
    let lin = y - &y2;
    (0..len)
        .map(|n| {
            let mut r = -h[n].clone();
            if n == 0 {
                r += BigRational::one();
            } else {
                r += &y2 * &h3[n - 1] + &lin * &h2[n - 1];
            }
            r
        })
        .collect()
}

/// Residual of the moment generating-function equation for the exact
/// moments `m_0 = 1, m_1..m_K`; all `K + 1` entries are zero.
pub fn generating_function_residual(order: usize, y: &AspectRatio) -> Result<Vec<BigRational>> {
    if order == 0 {
        return Err(Error::Domain("order must be at least 1".into()));
    }
    let mut h = Vec::with_capacity(order + 1);
    h.push(BigRational::one());
    for k in 1..=order {
        h.push(moment_closed_form(k, y)?);
    }
    Ok(series_residual(y.value(), &h))
}

/// `m_k <= b(y)^k` for every `k <= K`, with relative slack `1e-12`.
pub fn moment_bound_check(order: usize, y: f64) -> Result<bool> {
    if order == 0 {
        return Err(Error::Domain("order must be at least 1".into()));
    }
    let b = support_endpoints(y)?.b;
    let moments = moment_recursion_f64(order, y)?;
    Ok(moments
        .values
        .iter()
        .enumerate()
        .all(|(i, &m)| m <= b.powi(i as i32 + 1) * (1.0 + 1e-12)))
}
