//! Cubic root finders used by the Stieltjes-transform solver.

use num_complex::Complex64;

/// Horner evaluation of `c[0] x³ + c[1] x² + c[2] x + c[3]` and its derivative.
fn eval_with_derivative(c: &[Complex64; 4], x: Complex64) -> (Complex64, Complex64) {
    let mut p = c[0];
    let mut dp = Complex64::new(0.0, 0.0);
    for &ci in &c[1..] {
        dp = dp * x + p;
        p = p * x + ci;
    }
    (p, dp)
}

pub fn eval_cubic(c: &[Complex64; 4], x: Complex64) -> Complex64 {
    eval_with_derivative(c, x).0
}

/// All three roots of `c[0] x³ + c[1] x² + c[2] x + c[3]` with `c[0] != 0`.
///
/// Cardano on the depressed cubic, taking the larger-magnitude branch of the
/// square root to avoid cancellation, followed by a few guarded Newton steps
/// on the original polynomial.
pub fn complex_cubic_roots(c: [Complex64; 4]) -> [Complex64; 3] {
    let lead = c[0];
    let a = c[1] / lead;
    let b = c[2] / lead;
    let cc = c[3] / lead;

    let p = b - a * a / 3.0;
    let q = a * a * a * (2.0 / 27.0) - a * b / 3.0 + cc;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let plus = -q / 2.0 + disc;
    let minus = -q / 2.0 - disc;
    let u3 = if plus.norm() >= minus.norm() { plus } else { minus };

    let shift = a / 3.0;
    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let mut roots = if u3.norm() == 0.0 {
        [-shift; 3]
    } else {
        let u = u3.powf(1.0 / 3.0);
        let mut out = [Complex64::new(0.0, 0.0); 3];
        let mut uk = u;
        for r in out.iter_mut() {
            *r = uk - p / (uk * 3.0) - shift;
            uk *= omega;
        }
        out
    };

    for r in roots.iter_mut() {
        polish(&c, r);
    }
    roots
}

fn polish(c: &[Complex64; 4], root: &mut Complex64) {
    let (mut val, mut der) = eval_with_derivative(c, *root);
    for _ in 0..6 {
        if val.norm() == 0.0 || der.norm() == 0.0 {
            return;
        }
        let candidate = *root - val / der;
        let (cv, cd) = eval_with_derivative(c, candidate);
        if cv.norm().is_nan() || cv.norm() >= val.norm() {
            return;
        }
        *root = candidate;
        val = cv;
        der = cd;
    }
}

/// Roots of a real cubic classified by the sign of its discriminant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RealCubicRoots {
    /// Three real roots (possibly repeated), ascending.
    ThreeReal([f64; 3]),
    /// One real root and a conjugate pair `re ± i·im`, `im > 0`.
    OneRealPair { real: f64, re: f64, im: f64 },
}

/// Roots of `c[0] x³ + c[1] x² + c[2] x + c[3]` with real coefficients and
/// `c[0] != 0`.
pub fn real_cubic_roots(c: [f64; 4]) -> RealCubicRoots {
    let a = c[1] / c[0];
    let b = c[2] / c[0];
    let cc = c[3] / c[0];
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + cc;
    let shift = a / 3.0;
    let d = q * q / 4.0 + p * p * p / 27.0;

    if d > 0.0 {
        // One real root t; the deflated quadratic t² + t·r + (r² + p) holds the pair.
        let u = (-q / 2.0 - q.signum() * d.sqrt()).cbrt();
        let r = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        let im = ((3.0 * r * r + 4.0 * p).max(0.0)).sqrt() / 2.0;
        RealCubicRoots::OneRealPair {
            real: r - shift,
            re: -r / 2.0 - shift,
            im,
        }
    } else {
        // Trigonometric form; p <= 0 here.
        let m = 2.0 * (-p / 3.0).max(0.0).sqrt();
        let mut roots = if m == 0.0 {
            [-shift; 3]
        } else {
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            let tau = 2.0 * std::f64::consts::PI / 3.0;
            [
                m * theta.cos() - shift,
                m * (theta - tau).cos() - shift,
                m * (theta - 2.0 * tau).cos() - shift,
            ]
        };
        roots.sort_by(f64::total_cmp);
        RealCubicRoots::ThreeReal(roots)
    }
}
