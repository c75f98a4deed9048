//! Kolmogorov–Smirnov distances.

use crate::error::Result;
use crate::spectral::cdf_at_sorted;

/// `sup_x |F_n(x) - F(x)|` for an ascending sample against the law at ratio
/// `y`. The law may jump at 0 (the atom), so both one-sided limits of `F`
/// are compared at each sample point.
pub fn ks_against_law(sorted: &[f64], y: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Ok(0.0);
    }
    let atom = crate::spectral::atom_at_zero(y);
    let cdf = cdf_at_sorted(y, sorted)?;
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, (&x, &f)) in sorted.iter().zip(&cdf).enumerate() {
        let left = if x == 0.0 { f - atom } else { f };
        d = d.max((f - (i + 1) as f64 / n).abs());
        d = d.max((left - i as f64 / n).abs());
    }
    Ok(d)
}

/// Two-sample statistic `sup_x |F_a(x) - F_b(x)|` for ascending samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { 1.0 };
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{cdf_curve, support_endpoints};

    #[test]
    fn two_sample_examples() {
        assert_eq!(ks_two_sample(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        assert!((ks_two_sample(&[1.0, 2.0, 3.0, 4.0], &[2.5, 3.5]) - 0.5).abs() < 1e-15);
        // Ties across samples must not create spurious gaps.
        assert_eq!(ks_two_sample(&[0.0, 0.0, 1.0], &[0.0, 0.0, 1.0]), 0.0);
    }

    #[test]
    fn quantile_sample_is_close() {
        // Points placed at the law's own quantiles give D ≈ 1/n.
        let curve = cdf_curve(1.0, 4001).unwrap();
        let n = 400;
        let mut sample = Vec::new();
        let mut idx = 0;
        for i in 0..n {
            let target = (i as f64 + 0.5) / n as f64;
            while curve[idx].1 < target {
                idx += 1;
            }
            let ((x0, f0), (x1, f1)) = (curve[idx - 1], curve[idx]);
            sample.push(x0 + (x1 - x0) * (target - f0) / (f1 - f0));
        }
        let d = ks_against_law(&sample, 1.0).unwrap();
        assert!(d < 2.0 / n as f64, "{d}");
    }

    #[test]
    fn atom_is_credited_to_exact_zeros() {
        let e = support_endpoints(2.0).unwrap();
        let mut sample = vec![0.0; 50];
        sample.extend((0..50).map(|i| e.a + (e.b - e.a) * (i as f64 + 0.5) / 50.0));
        let d = ks_against_law(&sample, 2.0).unwrap();
        assert!(d < 0.5, "{d}");
        let shifted: Vec<f64> = sample.iter().map(|v| v + 1e3).collect();
        assert!((ks_against_law(&shifted, 2.0).unwrap() - 1.0).abs() < 1e-12);
    }
}
