//! Monte Carlo side: sample noise, build `X_T` and `A_T = X_T X_Tᵀ`, take
//! the full spectrum and compare it with the limiting law at `y_T = p/T`.

pub mod dense;
pub mod eigen;
pub mod ks;
pub mod noise;
pub mod oracle;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dense::{build_lag_autocov, DenseMatrix, LagCovMatrix};
pub use eigen::{empirical_moments, gram_spectrum, symmetric_eigenvalues, Spectrum};
pub use ks::{ks_against_law, ks_two_sample};
pub use noise::{sample_noise, Distribution};

use crate::error::{Error, Result};
use crate::moments::moment_recursion_f64;
use crate::spectral::support_endpoints;

/// Largest `p` accepted (dense `p × p` storage).
pub const MAX_DIMENSION: usize = 2000;
/// Eigenvalues at most this fraction of `λ_max` count as zero.
pub const NEAR_ZERO_RTOL: f64 = 1e-8;
/// Relative error allowed on `m̂_k`, `k <= 4`.
pub const MOMENT_RTOL: f64 = 0.03;
pub const MOMENT_CHECK_ORDER: usize = 4;
/// Pooled-ESD KS distance to the law.
pub const KS_TOL: f64 = 0.05;
/// Relative error allowed on the mean of `λ_max` against `b(y_T)`.
pub const EDGE_RTOL: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub p: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "s")]
    pub lag: usize,
    pub distribution: Distribution,
    pub replicates: usize,
    pub seed: u64,
    #[serde(rename = "K")]
    pub max_moment_order: usize,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.p < 2 || self.t < 2 {
            return bad(format!("need p, T >= 2 (got p = {}, T = {})", self.p, self.t));
        }
        if self.p > MAX_DIMENSION {
            return bad(format!("p = {} exceeds the limit {MAX_DIMENSION}", self.p));
        }
        if self.lag < 1 {
            return bad("lag s must be at least 1".into());
        }
        if self.replicates < 1 {
            return bad("need at least one replicate".into());
        }
        if self.max_moment_order < 1 {
            return bad("moment order K must be at least 1".into());
        }
        Ok(())
    }

    pub fn y_t(&self) -> f64 {
        self.p as f64 / self.t as f64
    }
}

/// One replicate: build `X_T` from stream `index` of the master seed and
/// return the spectrum of `A_T`.
pub fn replicate_spectrum(config: &EnsembleConfig, index: usize) -> Result<Spectrum> {
    let noise = sample_noise(
        config.p,
        config.t + config.lag,
        config.distribution,
        config.seed,
        index as u64,
    )?;
    let x = build_lag_autocov(&noise, config.lag, config.t)?;
    gram_spectrum(&x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub index: usize,
    pub moments: Vec<f64>,
    pub lambda_max: f64,
    pub near_zero_count: usize,
    pub clamped_negatives: usize,
    pub min_raw_eigenvalue: f64,
}

/// Pass/fail of the statistical comparisons, with the tolerances used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationChecks {
    pub moment_relative_errors: Vec<f64>,
    pub moment_rtol: f64,
    pub moments_pass: bool,
    pub ks_tol: f64,
    pub ks_pass: bool,
    pub lambda_max_relative_error: f64,
    pub edge_rtol: f64,
    pub lambda_max_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSummary {
    pub config: EnsembleConfig,
    #[serde(rename = "y_T")]
    pub y_t: f64,
    pub moments_empirical: Vec<f64>,
    pub moments_theoretical: Vec<f64>,
    pub lambda_max_mean: f64,
    pub lambda_max_se: f64,
    pub b_theoretical: f64,
    pub ks_distance: f64,
    pub replicate_count: usize,
    pub replicates: Vec<ReplicateSummary>,
    pub checks: SimulationChecks,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleRun {
    pub summary: EmpiricalSummary,
    pub spectra: Vec<Spectrum>,
}

impl EnsembleRun {
    /// All eigenvalues ascending, with near-zero ones set to exactly 0 so
    /// the atom of the law is matched.
    pub fn pooled_eigenvalues(&self) -> Vec<f64> {
        pooled(&self.spectra)
    }

    /// `replicate,index,eigenvalue` rows, eigenvalues descending.
    pub fn eigenvalue_csv(&self) -> String {
        let mut out = String::from("replicate,index,eigenvalue\n");
        for (r, s) in self.spectra.iter().enumerate() {
            for (i, v) in s.eigenvalues.iter().enumerate() {
                out.push_str(&format!("{r},{i},{v:e}\n"));
            }
        }
        out
    }
}

fn pooled(spectra: &[Spectrum]) -> Vec<f64> {
    let mut all: Vec<f64> = spectra
        .iter()
        .flat_map(|s| {
            let cut = NEAR_ZERO_RTOL * s.l1;
            s.eigenvalues.iter().map(move |&v| if v <= cut { 0.0 } else { v })
        })
        .collect();
    all.sort_by(f64::total_cmp);
    all
}

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs every replicate (in parallel) and reduces in replicate order, so
/// the summary does not depend on scheduling or thread count.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleRun> {
    config.validate()?;
    let spectra: Vec<Spectrum> = (0..config.replicates)
        .into_par_iter()
        .map(|r| replicate_spectrum(config, r))
        .collect::<Result<_>>()?;

    let k = config.max_moment_order;
    let y_t = config.y_t();
    let mut warnings = Vec::new();
    let replicates: Vec<ReplicateSummary> = spectra
        .iter()
        .enumerate()
        .map(|(index, s)| {
            if !s.is_psd_within_roundoff() {
                warnings.push(format!(
                    "replicate {index}: eigenvalue {:e} below -{:e} * lambda_max",
                    s.min_raw,
                    eigen::CLAMP_RTOL
                ));
            }
            if s.clamped > 0 {
                warnings.push(format!("replicate {index}: clamped {} negative eigenvalues to 0", s.clamped));
            }
            if (s.raw_sum - s.trace).abs() > 1e-8 * s.trace.abs() {
                warnings.push(format!(
                    "replicate {index}: eigenvalue sum {} differs from trace {}",
                    s.raw_sum, s.trace
                ));
            }
            ReplicateSummary {
                index,
                moments: empirical_moments(s, k),
                lambda_max: s.l1,
                near_zero_count: s.near_zero_count(NEAR_ZERO_RTOL),
                clamped_negatives: s.clamped,
                min_raw_eigenvalue: s.min_raw,
            }
        })
        .collect();

    let n = replicates.len() as f64;
    let moments_empirical: Vec<f64> = (0..k)
        .map(|j| replicates.iter().map(|r| r.moments[j]).sum::<f64>() / n)
        .collect();
    let moments_theoretical = moment_recursion_f64(k, y_t)?.values;
    let lambdas: Vec<f64> = replicates.iter().map(|r| r.lambda_max).collect();
    let (lambda_max_mean, lambda_max_se) = mean_and_se(&lambdas);
    let b_theoretical = support_endpoints(y_t)?.b;
    let ks_distance = ks_against_law(&pooled(&spectra), y_t)?;

    let moment_relative_errors: Vec<f64> = moments_empirical
        .iter()
        .zip(&moments_theoretical)
        .map(|(e, t)| (e - t).abs() / t)
        .collect();
    let lambda_max_relative_error = (lambda_max_mean - b_theoretical).abs() / b_theoretical;
    let checks = SimulationChecks {
        moments_pass: moment_relative_errors
            .iter()
            .take(MOMENT_CHECK_ORDER)
            .all(|&e| e <= MOMENT_RTOL),
        moment_relative_errors,
        moment_rtol: MOMENT_RTOL,
        ks_tol: KS_TOL,
        ks_pass: ks_distance <= KS_TOL,
        lambda_max_relative_error,
        edge_rtol: EDGE_RTOL,
        lambda_max_pass: lambda_max_relative_error <= EDGE_RTOL,
    };

    Ok(EnsembleRun {
        summary: EmpiricalSummary {
            config: config.clone(),
            y_t,
            moments_empirical,
            moments_theoretical,
            lambda_max_mean,
            lambda_max_se,
            b_theoretical,
            ks_distance,
            replicate_count: config.replicates,
            replicates,
            checks,
            warnings,
        },
        spectra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> EnsembleConfig {
        EnsembleConfig {
            p: 40,
            t: 80,
            lag: 1,
            distribution: Distribution::Gaussian,
            replicates: 4,
            seed: 11,
            max_moment_order: 4,
        }
    }

    #[test]
    fn validation() {
        assert!(config().validate().is_ok());
        for broken in [
            EnsembleConfig { p: 1, ..config() },
            EnsembleConfig { t: 1, ..config() },
            EnsembleConfig { p: 2001, ..config() },
            EnsembleConfig { lag: 0, ..config() },
            EnsembleConfig { replicates: 0, ..config() },
            EnsembleConfig { max_moment_order: 0, ..config() },
        ] {
            assert!(matches!(run_ensemble(&broken), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let a = run_ensemble(&config()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_ensemble(&config())).unwrap();
        assert_eq!(a, b);
        let alone = replicate_spectrum(&config(), 2).unwrap();
        assert_eq!(alone, a.spectra[2]);
    }

    #[test]
    fn summary_shape() {
        let run = run_ensemble(&config()).unwrap();
        let s = &run.summary;
        assert_eq!(s.replicates.len(), 4);
        assert_eq!(s.moments_empirical.len(), 4);
        assert_eq!(s.y_t, 0.5);
        assert!((s.moments_theoretical[0] - 0.5).abs() < 1e-15);
        assert!(s.ks_distance > 0.0 && s.ks_distance < 1.0);
        assert_eq!(run.pooled_eigenvalues().len(), 160);
        let csv = run.eigenvalue_csv();
        assert!(csv.starts_with("replicate,index,eigenvalue\n0,0,"));
        assert_eq!(csv.lines().count(), 161);
    }

    #[test]
    fn rank_deficient_when_p_exceeds_t() {
        let cfg = EnsembleConfig {
            p: 30,
            t: 15,
            replicates: 2,
            ..config()
        };
        let run = run_ensemble(&cfg).unwrap();
        for r in &run.summary.replicates {
            assert!(r.near_zero_count >= 15, "{}", r.near_zero_count);
        }
    }

    #[test]
    fn json_field_names() {
        let run = run_ensemble(&EnsembleConfig { replicates: 1, ..config() }).unwrap();
        let v = serde_json::to_value(&run.summary).unwrap();
        for key in [
            "config",
            "y_T",
            "moments_empirical",
            "moments_theoretical",
            "lambda_max_mean",
            "lambda_max_se",
            "b_theoretical",
            "ks_distance",
            "warnings",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["config"]["T"], 80);
        assert_eq!(v["config"]["distribution"], "gaussian");
        assert_eq!(v["lambda_max_se"], 0.0);
    }
}
