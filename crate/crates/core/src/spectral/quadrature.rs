//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The panel with the largest error estimate is bisected until the summed
//! estimate meets the requested tolerance. Integrands may fail (the
//! Stieltjes root selection can), so they return `Result`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Target: stop once the error estimate is below `max(abs, rel·|I|)`.
    pub abs: f64,
    pub rel: f64,
    /// Failure threshold applied when `max_subdivisions` is exhausted.
    pub fail_abs: f64,
    pub fail_rel: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-11,
            rel: 1e-11,
            fail_abs: 1e-8,
            fail_rel: 1e-8,
            max_subdivisions: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(f: &F, lo: f64, hi: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_k = kronrod.abs();
    let mut fv = [(0.0, 0.0); 10];
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[10] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kronrod * half;
    let abs_k = abs_k * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_k);
    }
    if !value.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            estimate: f64::INFINITY,
            tolerance: 0.0,
            subdivisions: 0,
        });
    }
    Ok(Panel {
        lo,
        hi,
        value,
        error,
    })
}

/// `∫_lo^hi f`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64>,
{
    if lo == hi {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            subdivisions: 0,
        });
    }
    let first = gauss_kronrod(&f, lo, hi)?;
    let mut total = first.value;
    let mut err = first.error;
    let mut heap = BinaryHeap::from([first]);
    // Panels too narrow to bisect in floating point.
    let mut frozen: Vec<Panel> = Vec::new();
    let mut subdivisions = 0;

    while err > tol.abs.max(tol.rel * total.abs()) && subdivisions < tol.max_subdivisions {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo.min(worst.hi) || mid >= worst.lo.max(worst.hi) {
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod(&f, worst.lo, mid)?;
        let right = gauss_kronrod(&f, mid, worst.hi)?;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    // Re-sum to shed accumulated update roundoff.
    let panels = || heap.iter().chain(frozen.iter());
    let value: f64 = panels().map(|p| p.value).sum();
    let abs_error: f64 = panels().map(|p| p.error).sum();
    let limit = tol.fail_abs.max(tol.fail_rel * value.abs());
    if abs_error > tol.abs.max(tol.rel * value.abs()) && abs_error > limit {
        return Err(Error::QuadratureNonConvergence {
            estimate: abs_error,
            tolerance: limit,
            subdivisions,
        });
    }
    Ok(Integral {
        value,
        abs_error,
        subdivisions,
    })
}
