//! The acceptance suite: ten criteria, each returning an outcome with the
//! measured quantity, the pinned tolerance and the wall-clock time.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::combinatorics::{
    build_tables_by_recursion, closed_form_f_polynomials, enumerate_pillar_counts, f_closed_form,
    first_identity_residual, g_polynomials_from, index_polynomials, EndVariant,
    ENUMERATION_CUTOFF,
};
use crate::error::Result;
use crate::matrix_lab::oracle::oracle_eigenvalues;
use crate::matrix_lab::{
    gram_spectrum, build_lag_autocov, ks_two_sample, run_ensemble, sample_noise, symmetric_eigenvalues,
    DenseMatrix, Distribution, EnsembleConfig, EnsembleRun, NEAR_ZERO_RTOL,
};
use crate::matrix_lab::noise::stream_rng;
use crate::moments::{
    generating_function_residual, moment_bound_check, moment_closed_form, moment_from_pillars,
    moment_recursion, AspectRatio,
};
use crate::spectral::{atom_at_zero, continuous_mass, law_moment_quadrature};

pub const EXACT_ORDER: usize = 20;
pub const SERIES_ORDER: usize = 15;
pub const POLYNOMIAL_ORDER: usize = 15;
pub const QUADRATURE_ORDER: u32 = 8;
pub const QUADRATURE_RTOL: f64 = 1e-6;
pub const MASS_TOL: f64 = 1e-6;
pub const BOUND_ORDER: usize = 30;
pub const LAG_KS_TOL: f64 = 0.03;
pub const ORACLE_MATRICES: usize = 200;
pub const ORACLE_MAX_DIM: usize = 8;
pub const ORACLE_TOL: f64 = 1e-9;
pub const TRACE_RTOL: f64 = 1e-10;
pub const SEED: u64 = 20_240_611;
pub const SIM_REPLICATES: usize = 20;
pub const RANK_REPLICATES: usize = 20;

const RATIOS: [(i64, i64); 3] = [(1, 2), (1, 1), (2, 1)];
const REAL_RATIOS: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub skipped: bool,
    pub detail: String,
    pub elapsed_secs: f64,
    pub limit_secs: Option<f64>,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match (self.skipped, self.passed) {
            (true, _) => "SKIP",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        write!(
            f,
            "[{verdict}] criterion {:>2} {:<28} {:>8.2}s  {}",
            self.id, self.name, self.elapsed_secs, self.detail
        )
    }
}

fn timed(
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionOutcome {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail = format!("{detail}; exceeded {:.0}s limit", limit.as_secs_f64());
        }
    }
    CriterionOutcome {
        id,
        name,
        passed,
        skipped: false,
        detail,
        elapsed_secs: elapsed.as_secs_f64(),
        limit_secs: limit.map(|d| d.as_secs_f64()),
    }
}

fn skipped(id: u8, name: &'static str) -> CriterionOutcome {
    CriterionOutcome {
        id,
        name,
        passed: true,
        skipped: true,
        detail: "skipped in quick mode".into(),
        elapsed_secs: 0.0,
        limit_secs: None,
    }
}

fn ratios() -> Result<Vec<AspectRatio>> {
    RATIOS.iter().map(|&(p, q)| AspectRatio::from_ratio(p, q)).collect()
}

/// Closed form, pillar sum and recursion agree exactly for `k <= 20`.
pub fn exact_route_agreement() -> CriterionOutcome {
    timed(1, "exact route agreement", Some(Duration::from_secs(1)), || {
        let table = build_tables_by_recursion(EXACT_ORDER)?;
        let mut checked = 0;
        for y in ratios()? {
            let rec = moment_recursion(EXACT_ORDER, &y)?;
            for k in 1..=EXACT_ORDER {
                let closed = moment_closed_form(k, &y)?;
                let pillar = moment_from_pillars(k, &y, &table)?;
                let recursive = rec.get(k).expect("order covered");
                if closed != pillar || &closed != recursive {
                    return Ok((false, format!("routes disagree at y = {y}, k = {k}")));
                }
                checked += 1;
            }
        }
        Ok((true, format!("{checked} (y, k) pairs identical")))
    })
}

/// Brute-force counts for `k <= 4` against a closed form for `f` and the
/// recursion tables for `f` and `g`. The closed form is injectable so a
/// deliberately broken one can be shown to fail.
pub fn enumeration_oracle_with<F>(f_closed: F) -> CriterionOutcome
where
    F: Fn(usize, usize) -> Result<BigUint>,
{
    timed(2, "enumeration oracle", Some(Duration::from_secs(5)), || {
        let rec = build_tables_by_recursion(ENUMERATION_CUTOFF)?;
        for k in 1..=ENUMERATION_CUTOFF {
            let f_enum = enumerate_pillar_counts(k, EndVariant::EndOneZero)?;
            let g_enum = enumerate_pillar_counts(k, EndVariant::EndThreeZeros)?;
            for m in 0..=k {
                let fe = BigUint::from(f_enum.get(&m).copied().unwrap_or(0));
                let ge = BigUint::from(g_enum.get(&m).copied().unwrap_or(0));
                if f_closed(m, k)? != fe {
                    return Ok((false, format!("closed-form f_{m}({k}) != enumeration {fe}")));
                }
                if rec.f(m, k) != &fe {
                    return Ok((false, format!("recursion f_{m}({k}) != enumeration {fe}")));
                }
                if rec.g(m, k) != &ge {
                    return Ok((false, format!("recursion g_{m}({k}) != enumeration {ge}")));
                }
            }
        }
        let spots = [
            (f_closed(1, 2)?, 2u32, "f_1(2)"),
            (f_closed(2, 3)?, 5, "f_2(3)"),
            (rec.g(1, 2).clone(), 1, "g_1(2)"),
            (rec.g(1, 3).clone(), 4, "g_1(3)"),
        ];
        for (got, want, label) in spots {
            if got != BigUint::from(want) {
                return Ok((false, format!("{label} = {got}, expected {want}")));
            }
        }
        Ok((true, format!("f and g match enumeration for k <= {ENUMERATION_CUTOFF}")))
    })
}

pub fn enumeration_oracle() -> CriterionOutcome {
    enumeration_oracle_with(f_closed_form)
}

/// Series residual of the generating-function equation vanishes through
/// `x^15`.
pub fn generating_function_identity() -> CriterionOutcome {
    timed(3, "generating-function identity", None, || {
        for y in ratios()? {
            let res = generating_function_residual(SERIES_ORDER, &y)?;
            if let Some(i) = res.iter().position(|c: &BigRational| !c.is_zero()) {
                return Ok((false, format!("y = {y}: coefficient of x^{i} is {}", res[i])));
            }
        }
        Ok((true, format!("zero through x^{SERIES_ORDER} for y in {{1/2, 1, 2}}")))
    })
}

/// With `F_k` from the closed form and `G_k` from the second recursion, the
/// first polynomial identity holds for `k <= 15`, and the coupled
/// recursions reproduce the closed-form `F_k`.
pub fn polynomial_identity() -> CriterionOutcome {
    timed(4, "polynomial identity", None, || {
        let fs = closed_form_f_polynomials(POLYNOMIAL_ORDER)?;
        let gs = g_polynomials_from(&fs);
        for k in 1..=POLYNOMIAL_ORDER {
            let r = first_identity_residual(&fs, &gs, k);
            if !r.is_empty() {
                return Ok((false, format!("identity fails at k = {k}: residual {r:?}")));
            }
        }
        let (rec_f, rec_g) = index_polynomials(POLYNOMIAL_ORDER)?;
        if rec_f != fs || rec_g != gs {
            return Ok((false, "coupled recursion differs from closed-form F".into()));
        }
        Ok((true, format!("exact for k <= {POLYNOMIAL_ORDER}")))
    })
}

/// Quadrature moments of the density match `m_k`, and the masses add up.
pub fn law_moment_consistency() -> CriterionOutcome {
    timed(5, "law/moment consistency", Some(Duration::from_secs(30)), || {
        let mut worst: f64 = 0.0;
        for (y, yr) in REAL_RATIOS.iter().zip(ratios()?) {
            for k in 1..=QUADRATURE_ORDER {
                let exact = num_traits::ToPrimitive::to_f64(&moment_closed_form(k as usize, &yr)?)
                    .expect("finite moment");
                let q = law_moment_quadrature(k, *y)?;
                let rel = (q - exact).abs() / exact;
                worst = worst.max(rel);
                if rel > QUADRATURE_RTOL {
                    return Ok((false, format!("y = {y}, k = {k}: relative error {rel:.2e}")));
                }
            }
            let mass = continuous_mass(*y)?;
            let expected = 1.0 - atom_at_zero(*y);
            if (mass - expected).abs() > MASS_TOL {
                return Ok((false, format!("y = {y}: continuous mass {mass} vs {expected}")));
            }
        }
        Ok((true, format!("worst moment relative error {worst:.2e}; masses within {MASS_TOL:e}")))
    })
}

pub fn moment_bound() -> CriterionOutcome {
    timed(6, "moment bound", None, || {
        for y in REAL_RATIOS {
            if !moment_bound_check(BOUND_ORDER, y)? {
                return Ok((false, format!("m_k > b^k for some k <= {BOUND_ORDER} at y = {y}")));
            }
        }
        Ok((true, format!("m_k <= b(y)^k for k <= {BOUND_ORDER}")))
    })
}

pub fn simulation_config(lag: usize) -> EnsembleConfig {
    EnsembleConfig {
        p: 400,
        t: 800,
        lag,
        distribution: Distribution::Gaussian,
        replicates: SIM_REPLICATES,
        seed: SEED,
        max_moment_order: 4,
    }
}

fn verdicts(run: &EnsembleRun) -> (bool, bool, bool) {
    let c = &run.summary.checks;
    (c.moments_pass, c.ks_pass, c.lambda_max_pass)
}

fn describe(run: &EnsembleRun) -> String {
    let s = &run.summary;
    let worst = s.checks.moment_relative_errors.iter().fold(0.0f64, |a, &b| a.max(b));
    format!(
        "moments max rel err {worst:.4}, KS {:.4}, lambda_max {:.4} vs b {:.4}",
        s.ks_distance, s.lambda_max_mean, s.b_theoretical
    )
}

/// Desk-scale simulation against the law at `y_T = 1/2`.
pub fn simulation_vs_law(run: &Result<EnsembleRun>, elapsed: Duration) -> CriterionOutcome {
    let mut out = timed(7, "simulation vs law", None, || {
        let run = run.as_ref().map_err(Clone::clone)?;
        let (m, k, l) = verdicts(run);
        Ok((m && k && l, describe(run)))
    });
    finish_timing(&mut out, elapsed, Duration::from_secs(300));
    out
}

/// Same experiment at lag 2: identical verdicts and nearby pooled ESDs.
pub fn lag_invariance(
    lag1: &Result<EnsembleRun>,
    lag2: &Result<EnsembleRun>,
    elapsed: Duration,
) -> CriterionOutcome {
    let mut out = timed(8, "lag invariance", None, || {
        let a = lag1.as_ref().map_err(Clone::clone)?;
        let b = lag2.as_ref().map_err(Clone::clone)?;
        let d = ks_two_sample(&a.pooled_eigenvalues(), &b.pooled_eigenvalues());
        let same = verdicts(a) == verdicts(b);
        Ok((
            same && d <= LAG_KS_TOL,
            format!("verdicts {}; two-sample KS {d:.4}; s = 2: {}", if same { "match" } else { "differ" }, describe(b)),
        ))
    });
    finish_timing(&mut out, elapsed, Duration::from_secs(300));
    out
}

fn finish_timing(out: &mut CriterionOutcome, elapsed: Duration, limit: Duration) {
    out.elapsed_secs += elapsed.as_secs_f64();
    out.limit_secs = Some(limit.as_secs_f64());
    if out.elapsed_secs > limit.as_secs_f64() {
        out.passed = false;
        out.detail = format!("{}; exceeded {:.0}s limit", out.detail, limit.as_secs_f64());
    }
}

pub fn run_simulation(lag: usize) -> (Result<EnsembleRun>, Duration) {
    let start = Instant::now();
    let run = run_ensemble(&simulation_config(lag));
    (run, start.elapsed())
}

/// `p = 100`, `T = 50`: every replicate has at least `p - T` eigenvalues
/// below `1e-8·λ_max`.
pub fn rank_atom_check() -> CriterionOutcome {
    timed(9, "rank/atom check", None, || {
        let run = run_ensemble(&EnsembleConfig {
            p: 100,
            t: 50,
            lag: 1,
            distribution: Distribution::Gaussian,
            replicates: RANK_REPLICATES,
            seed: SEED,
            max_moment_order: 2,
        })?;
        let min = run
            .summary
            .replicates
            .iter()
            .map(|r| r.near_zero_count)
            .min()
            .unwrap_or(0);
        Ok((
            min >= 50,
            format!("fewest near-zero eigenvalues (<= {NEAR_ZERO_RTOL:e} lambda_max) in a replicate: {min}"),
        ))
    })
}

/// Symmetric `n × n` with entries `k/256`, `|k| <= 256`; dyadic so the
/// oracle sees exactly the matrix the solver sees.
pub fn dyadic_symmetric(n: usize, seed: u64, index: u64) -> DenseMatrix {
    let mut rng = stream_rng(seed, index);
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = f64::from(rng.random_range(-256i32..=256)) / 256.0;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Eigenvalues against exact characteristic-polynomial roots for 200 small
/// matrices, and trace against eigenvalue sum for Gram matrices up to
/// `p = 500`.
pub fn eigensolver_oracle() -> CriterionOutcome {
    timed(10, "eigensolver oracle", None, || {
        let mut worst: f64 = 0.0;
        let mut compared = 0;
        let mut index = 0u64;
        while compared < ORACLE_MATRICES {
            let n = 1 + (index as usize % ORACLE_MAX_DIM);
            let a = dyadic_symmetric(n, SEED, index);
            index += 1;
            // Repeated roots have probability ~0 here; skip rather than guess.
            let Some(exact) = oracle_eigenvalues(&a, 1e-12)? else { continue };
            let got = symmetric_eigenvalues(&a)?;
            for (g, e) in got.iter().zip(&exact) {
                worst = worst.max((g - e).abs());
            }
            compared += 1;
        }
        if worst > ORACLE_TOL {
            return Ok((false, format!("max deviation {worst:.2e} from exact roots")));
        }
        let mut worst_trace: f64 = 0.0;
        for (i, p) in [10usize, 50, 100, 250, 500].into_iter().enumerate() {
            let noise = sample_noise(p, p + 1, Distribution::Gaussian, SEED, 1000 + i as u64)?;
            let s = gram_spectrum(&build_lag_autocov(&noise, 1, p)?)?;
            worst_trace = worst_trace.max((s.raw_sum - s.trace).abs() / s.trace);
        }
        Ok((
            worst_trace <= TRACE_RTOL,
            format!("{compared} matrices, max deviation {worst:.2e}; trace rel err {worst_trace:.2e} up to p = 500"),
        ))
    })
}

/// Every criterion in order. `quick` skips the three simulation criteria.
pub fn run_all(quick: bool) -> Vec<CriterionOutcome> {
    let mut out = vec![
        exact_route_agreement(),
        enumeration_oracle(),
        generating_function_identity(),
        polynomial_identity(),
        law_moment_consistency(),
        moment_bound(),
    ];
    if quick {
        out.push(skipped(7, "simulation vs law"));
        out.push(skipped(8, "lag invariance"));
        out.push(skipped(9, "rank/atom check"));
    } else {
        let (lag1, t1) = run_simulation(1);
        let (lag2, t2) = run_simulation(2);
        out.push(simulation_vs_law(&lag1, t1));
        out.push(lag_invariance(&lag1, &lag2, t2));
        out.push(rank_atom_check());
    }
    out.push(eigensolver_oracle());
    out
}

pub fn all_passed(outcomes: &[CriterionOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::binomial;

    #[test]
    fn exact_criteria_pass() {
        for o in [
            exact_route_agreement(),
            enumeration_oracle(),
            generating_function_identity(),
            polynomial_identity(),
            moment_bound(),
        ] {
            assert!(o.passed, "{o}");
        }
    }

    #[test]
    fn missing_normalization_is_caught() {
        let broken = |m: usize, k: usize| Ok(binomial(2 * k, m) * binomial(k, m + 1));
        let o = enumeration_oracle_with(broken);
        assert!(!o.passed);
        assert!(o.detail.contains("closed-form"), "{}", o.detail);
        assert!(o.to_string().starts_with("[FAIL] criterion  2 enumeration oracle"));
    }

    #[test]
    fn skipped_criteria_do_not_fail() {
        let s = skipped(7, "simulation vs law");
        assert!(s.passed && s.skipped);
        assert!(s.to_string().starts_with("[SKIP]"));
    }

    #[test]
    fn dyadic_matrices_are_symmetric_and_exact() {
        let a = dyadic_symmetric(5, 1, 2);
        assert_eq!(a, a.transpose());
        assert!(a.as_slice().iter().all(|v| (v * 256.0).fract() == 0.0));
    }
}
