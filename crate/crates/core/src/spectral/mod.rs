//! The limiting law itself: support, Stieltjes transform, density and CDF.
//!
//! The Stieltjes transform `s(z) = ∫ (x - z)^{-1} dF(x)` solves
//! `y² z² s³ + y² z s² - y z s² - z s - 1 = 0`. Substituting `w = z s` gives
//! the better-scaled cubic `y² w³ + (y² - y) w² - z w - z = 0`, which stays
//! well conditioned as `z → 0` (where `w → -atom`). The density is
//! `Im s(x + i0) / π`.
//!
//! For `y > 1` the law carries an atom of mass `1 - 1/y` at zero: `A_T` is
//! `p × p` with rank at most `T`. Only the continuous part lives on `[a, b]`.

pub mod cubic;
pub mod quadrature;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use cubic::{complex_cubic_roots, real_cubic_roots, RealCubicRoots};
use quadrature::{integrate, Tolerance};

/// Support `[a, b]` of the continuous part of the law at ratio `y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportEndpoints {
    pub a: f64,
    pub b: f64,
    pub y: f64,
}

fn check_ratio(y: f64) -> Result<()> {
    if y.is_finite() && y > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("aspect ratio must be positive, got {y}")))
    }
}

/// `a, b = (-1 + 20y + 8y² ∓ (1 + 8y)^{3/2}) / 8`, with `a = 0` for `y < 1`.
pub fn support_endpoints(y: f64) -> Result<SupportEndpoints> {
    check_ratio(y)?;
    let base = -1.0 + 20.0 * y + 8.0 * y * y;
    let root = (1.0 + 8.0 * y).powf(1.5);
    let a = if y >= 1.0 {
        ((base - root) / 8.0).max(0.0)
    } else {
        0.0
    };
    Ok(SupportEndpoints {
        a,
        b: (base + root) / 8.0,
        y,
    })
}

/// Point mass at zero: `1 - 1/y` for `y > 1`, else zero.
pub fn atom_at_zero(y: f64) -> f64 {
    if y > 1.0 {
        1.0 - 1.0 / y
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StieltjesEvaluation {
    pub z: Complex64,
    pub s: Complex64,
    /// `|y² z² s³ + y² z s² - y z s² - z s - 1|`.
    pub residual: f64,
}

fn w_cubic(z: Complex64, y: f64) -> [Complex64; 4] {
    [
        Complex64::new(y * y, 0.0),
        Complex64::new(y * y - y, 0.0),
        -z,
        -z,
    ]
}

/// How far a candidate root is from being the transform of a probability
/// measure on `[0, ∞)`: such transforms have `Im s > 0`, `Im(z s) >= 0`
/// and `|s| <= 1 / Im z` throughout the upper half plane.
fn herglotz_violation(z: Complex64, w: Complex64) -> f64 {
    let s = w / z;
    let mut v = 0.0;
    if s.norm() > 0.0 {
        v += (-s.im).max(0.0) / s.norm();
    }
    if w.norm() > 0.0 {
        v += (-w.im).max(0.0) / w.norm();
    }
    v + (s.norm() * z.im - 1.0).max(0.0)
}

const SELECTION_ACCEPT: f64 = 1e-9;
const SELECTION_AMBIGUOUS: f64 = 1e-14;

/// Solves the cubic at `z` (with `Im z > 0`) and selects the branch that is
/// a Stieltjes transform.
pub fn stieltjes(z: Complex64, y: f64) -> Result<StieltjesEvaluation> {
    check_ratio(y)?;
    if !z.re.is_finite() || !z.im.is_finite() || z.im <= 0.0 {
        return Err(Error::Domain(format!("need Im z > 0, got z = {z}")));
    }
    let coeffs = w_cubic(z, y);
    let mut scored: Vec<(f64, Complex64)> = complex_cubic_roots(coeffs)
        .into_iter()
        .map(|w| (herglotz_violation(z, w), w))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let fail = |reason: String| Error::RootSelection {
        re: z.re,
        im: z.im,
        reason,
    };
    let (best, w) = scored[0];
    if best.is_nan() || best > SELECTION_ACCEPT {
        return Err(fail(format!("no root satisfies the sign conditions (best violation {best:e})")));
    }
    if scored[1].0 <= SELECTION_AMBIGUOUS {
        return Err(fail("two roots satisfy the sign conditions".into()));
    }
    let residual = (cubic::eval_cubic(&coeffs, w) / z).norm();
    Ok(StieltjesEvaluation {
        z,
        s: w / z,
        residual,
    })
}

/// Density at `x`: `Im s(x + iε) / π` at `ε = (1e-6, 1e-7, 1e-8)·|x|`,
/// Richardson-extrapolated to `ε → 0`. Zero outside the open support.
pub fn density(x: f64, y: f64) -> Result<f64> {
    let e = support_endpoints(y)?;
    density_with(x, &e)
}

fn density_with(x: f64, e: &SupportEndpoints) -> Result<f64> {
    if !(x > e.a && x < e.b) {
        return Ok(0.0);
    }
    let h = x.abs();
    let f = |eps: f64| -> Result<f64> {
        Ok(stieltjes(Complex64::new(x, eps * h), e.y)?.s.im / PI)
    };
    let (f0, f1, f2) = (f(1e-6)?, f(1e-7)?, f(1e-8)?);
    let r1 = (10.0 * f1 - f0) / 9.0;
    let r2 = (10.0 * f2 - f1) / 9.0;
    Ok(((100.0 * r2 - r1) / 99.0).max(0.0))
}

/// Density from the real cubic at `ε = 0`: inside the support the `w`-cubic
/// has one real root and a conjugate pair, and `ρ(x) = |Im w| / (π x)`.
pub fn density_from_discriminant(x: f64, y: f64) -> Result<f64> {
    let e = support_endpoints(y)?;
    if !(x > e.a && x < e.b) {
        return Ok(0.0);
    }
    match real_cubic_roots([y * y, y * y - y, -x, -x]) {
        RealCubicRoots::OneRealPair { im, .. } => Ok(im / (PI * x)),
        RealCubicRoots::ThreeReal(_) => Ok(0.0),
    }
}

fn x_of_theta(theta: f64, e: &SupportEndpoints) -> f64 {
    let s = theta.sin();
    e.a + (e.b - e.a) * s * s
}

fn theta_of_x(x: f64, e: &SupportEndpoints) -> f64 {
    let u = ((x - e.a) / (e.b - e.a)).clamp(0.0, 1.0);
    u.sqrt().asin()
}

/// `x^k ρ(x) dx/dθ` under `x = a + (b - a) sin²θ`, which tames the
/// square-root behaviour at both edges.
fn theta_integrand(theta: f64, k: i32, e: &SupportEndpoints) -> Result<f64> {
    let x = x_of_theta(theta, e);
    let rho = density_with(x, e)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    Ok(x.powi(k) * rho * (e.b - e.a) * (2.0 * theta).sin())
}

fn moment_integral(k: i32, e: &SupportEndpoints, tol: &Tolerance) -> Result<f64> {
    Ok(integrate(|t| theta_integrand(t, k, e), 0.0, FRAC_PI_2, tol)?.value)
}

/// `∫ x^k ρ(x) dx` over the support; the atom adds nothing for `k >= 1`.
pub fn law_moment_quadrature(k: u32, y: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("moment order must be at least 1".into()));
    }
    let e = support_endpoints(y)?;
    moment_integral(k as i32, &e, &Tolerance::default())
}

/// `∫ ρ(x) dx`: 1 for `y <= 1`, `1/y` otherwise.
pub fn continuous_mass(y: f64) -> Result<f64> {
    let e = support_endpoints(y)?;
    moment_integral(0, &e, &Tolerance::default())
}

fn piece_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-12,
        rel: 1e-10,
        fail_abs: 1e-9,
        fail_rel: 1e-8,
        max_subdivisions: 500,
    }
}

/// `F(x)` at ascending `xs`, including the atom at zero. Integrates piece by
/// piece between consecutive points, so the cost is one pass over `[a, b]`.
pub fn cdf_at_sorted(y: f64, xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) || xs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("cdf points must be sorted ascending".into()));
    }
    let e = support_endpoints(y)?;
    let atom = atom_at_zero(y);
    let tol = piece_tolerance();
    let mut out = Vec::with_capacity(xs.len());
    let mut theta_prev = 0.0;
    let mut acc = 0.0;
    for &x in xs {
        if x < 0.0 {
            out.push(0.0);
            continue;
        }
        if x <= e.a {
            out.push(atom);
            continue;
        }
        let theta = theta_of_x(x.min(e.b), &e);
        if theta > theta_prev {
            acc += integrate(|t| theta_integrand(t, 0, &e), theta_prev, theta, &tol)?.value;
            theta_prev = theta;
        }
        out.push(atom + acc);
    }
    Ok(out)
}

/// Single-point CDF.
pub fn cdf_at(y: f64, x: f64) -> Result<f64> {
    Ok(cdf_at_sorted(y, &[x])?[0])
}

/// Grid points `x_i = a + (b - a) sin²(θ_i)`, `θ_i` uniform on `[0, π/2]`.
fn support_grid(e: &SupportEndpoints, npoints: usize) -> Vec<f64> {
    (0..npoints)
        .map(|i| {
            let theta = FRAC_PI_2 * i as f64 / (npoints - 1) as f64;
            if i + 1 == npoints {
                e.b
            } else {
                x_of_theta(theta, e)
            }
        })
        .collect()
}

/// `(x, F(x))` on an ascending grid over `[a, b]` that clusters at both
/// edges.
pub fn cdf_curve(y: f64, npoints: usize) -> Result<Vec<(f64, f64)>> {
    Ok(SpectralLaw::new(y, npoints)?
        .grid
        .into_iter()
        .map(|p| (p.x, p.cdf))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    pub density: f64,
    pub cdf: f64,
}

/// Tabulated law at a real ratio `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralLaw {
    pub y: f64,
    pub endpoints: SupportEndpoints,
    pub atom_at_zero: f64,
    pub grid: Vec<GridPoint>,
}

impl SpectralLaw {
    pub fn new(y: f64, npoints: usize) -> Result<Self> {
        if npoints < 2 {
            return Err(Error::Domain(format!("need at least 2 grid points, got {npoints}")));
        }
        let endpoints = support_endpoints(y)?;
        let xs = support_grid(&endpoints, npoints);
        let cdf = cdf_at_sorted(y, &xs)?;
        let grid = xs
            .iter()
            .zip(cdf)
            .map(|(&x, cdf)| Ok(GridPoint {
                x,
                density: density_with(x, &endpoints)?,
                cdf,
            }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            y,
            endpoints,
            atom_at_zero: atom_at_zero(y),
            grid,
        })
    }

    /// `F(b) - atom` as tabulated.
    pub fn continuous_mass(&self) -> f64 {
        self.grid.last().map_or(0.0, |p| p.cdf) - self.atom_at_zero
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{moment_closed_form, moment_recursion_f64, AspectRatio};
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn endpoint_examples() {
        let e = support_endpoints(1.0).unwrap();
        assert_eq!((e.a, e.b), (0.0, 6.75));
        let e = support_endpoints(0.5).unwrap();
        assert_eq!(e.a, 0.0);
        assert!((e.b - (11.0 + 5.0 * 5f64.sqrt()) / 8.0).abs() < 1e-14);
        assert!((e.b - 2.7725425).abs() < 1e-7);
        let e = support_endpoints(2.0).unwrap();
        assert!((e.a - 0.113_400_545_562).abs() < 1e-10, "{}", e.a);
        assert!((e.b - 17.636_599_454_438).abs() < 1e-10, "{}", e.b);
        assert!(support_endpoints(0.0).is_err());
        assert!(support_endpoints(-1.0).is_err());
    }

    #[test]
    fn atom_convention() {
        assert_eq!(atom_at_zero(0.5), 0.0);
        assert_eq!(atom_at_zero(1.0), 0.0);
        assert_eq!(atom_at_zero(2.0), 0.5);
    }

    #[test]
    fn large_z_asymptotics() {
        for y in [0.5, 1.0, 2.0] {
            let ev = stieltjes(c(0.0, 1e7), y).unwrap();
            assert!((ev.s * ev.z + 1.0).norm() < 1e-6);
        }
    }

    #[test]
    fn residual_is_tiny() {
        let ev = stieltjes(c(1.0, 1.0), 1.0).unwrap();
        assert!(ev.residual < 1e-12, "{}", ev.residual);
        assert!(ev.s.im > 0.0);
    }

    #[test]
    fn matches_moment_series_outside_radius() {
        // s(z) = -(1/z) Σ m_k z^{-k}, convergent for |z| > b.
        for (z, y) in [(c(0.0, 20.0), 1.0), (c(20.0, 5.0), 1.0), (c(-4.0, 6.0), 0.5)] {
            let m = moment_recursion_f64(40, y).unwrap();
            let mut series = Complex64::new(1.0, 0.0);
            let mut zpow = Complex64::new(1.0, 0.0);
            for mk in &m.values {
                zpow /= z;
                series += zpow * mk;
            }
            let expected = -series / z;
            let got = stieltjes(z, y).unwrap().s;
            assert!((got - expected).norm() < 1e-10 * expected.norm(), "{got} vs {expected}");
        }
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(matches!(stieltjes(c(1.0, 0.0), 1.0), Err(Error::Domain(_))));
        assert!(matches!(stieltjes(c(1.0, -1.0), 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn herglotz_grid() {
        for y in [0.5, 1.0, 2.0] {
            for i in 0..10 {
                for j in 0..10 {
                    let z = c(-5.0 + 3.0 * i as f64, 10f64.powf(-4.0 + j as f64 * 0.6));
                    let ev = stieltjes(z, y).unwrap();
                    assert!(ev.s.im > 0.0, "z = {z}, y = {y}");
                    assert!(ev.residual <= 1e-10 * z.norm().powi(3).max(1.0));
                }
            }
        }
    }

    #[test]
    fn density_outside_support_is_zero() {
        for y in [0.5, 1.0, 2.0] {
            let e = support_endpoints(y).unwrap();
            assert_eq!(density(e.b + 1.0, y).unwrap(), 0.0);
            assert_eq!(density(-1.0, y).unwrap(), 0.0);
        }
        assert_eq!(density(0.05, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn total_mass() {
        assert!((continuous_mass(0.5).unwrap() - 1.0).abs() < 1e-6);
        assert!((continuous_mass(1.0).unwrap() - 1.0).abs() < 1e-6);
        assert!((continuous_mass(2.0).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn quadrature_moment_examples() {
        assert!((law_moment_quadrature(1, 0.5).unwrap() - 0.5).abs() < 1e-6);
        assert!((law_moment_quadrature(2, 1.0).unwrap() - 3.0).abs() < 1e-6);
        let exact = moment_closed_form(4, &AspectRatio::from_ratio(1, 2).unwrap())
            .unwrap()
            .to_f64()
            .unwrap();
        assert!((law_moment_quadrature(4, 0.5).unwrap() - exact).abs() < 1e-6);
        assert!(law_moment_quadrature(0, 0.5).is_err());
    }

    #[test]
    fn discriminant_route_agrees() {
        for y in [0.5, 1.0, 2.0] {
            let e = support_endpoints(y).unwrap();
            for i in 1..200 {
                let x = e.a + (e.b - e.a) * i as f64 / 200.0;
                let d1 = density(x, y).unwrap();
                let d2 = density_from_discriminant(x, y).unwrap();
                assert!((d1 - d2).abs() < 1e-7, "x = {x}, y = {y}: {d1} vs {d2}");
            }
        }
    }

    #[test]
    fn density_vanishes_like_square_root_at_right_edge() {
        for y in [0.5, 1.0, 2.0] {
            let e = support_endpoints(y).unwrap();
            let w = e.b - e.a;
            let far = e.b - 1e-2 * w;
            let c = density(far, y).unwrap() / (e.b - far).sqrt();
            let near = e.b - 1e-4 * w;
            assert!(density(near, y).unwrap() < 10.0 * c * (e.b - near).sqrt());
            assert!(density(near, y).unwrap() < density(far, y).unwrap());
        }
    }

    #[test]
    fn cdf_examples() {
        for y in [0.5, 1.0, 2.0] {
            let e = support_endpoints(y).unwrap();
            assert!((cdf_at(y, e.b).unwrap() - 1.0).abs() < 1e-6);
            assert_eq!(cdf_at(y, -0.5).unwrap(), 0.0);
        }
        let e = support_endpoints(2.0).unwrap();
        assert!((cdf_at(2.0, e.a / 2.0).unwrap() - 0.5).abs() < 1e-6);
        assert!(cdf_at_sorted(1.0, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn cdf_curve_is_monotone_within_support() {
        let curve = cdf_curve(2.0, 64).unwrap();
        let e = support_endpoints(2.0).unwrap();
        assert_eq!(curve.len(), 64);
        assert_eq!(curve[0].0, e.a);
        assert_eq!(curve[63].0, e.b);
        assert!(curve.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        assert!((curve[0].1 - 0.5).abs() < 1e-12);
        assert!((curve[63].1 - 1.0).abs() < 1e-6);
        assert!(cdf_curve(1.0, 1).is_err());
    }

    #[test]
    fn law_table_mass() {
        let law = SpectralLaw::new(0.5, 33).unwrap();
        assert!((law.continuous_mass() - 1.0).abs() < 1e-6);
        assert!(law.grid.iter().all(|p| p.density >= 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn herglotz_everywhere(re in -10.0f64..40.0, log_im in -3.0f64..2.0, y in 0.1f64..5.0) {
            let z = c(re, 10f64.powf(log_im));
            let ev = stieltjes(z, y).unwrap();
            prop_assert!(ev.s.im > 0.0);
            prop_assert!((ev.s * ev.z).im >= -1e-12 * (ev.s * ev.z).norm());
            prop_assert!(ev.residual <= 1e-10 * z.norm().powi(3).max(1.0));
        }
    }
}
