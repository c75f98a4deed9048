use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lagspec_core::acceptance::{all_passed, run_all};
use lagspec_core::combinatorics::build_tables_by_recursion;
use lagspec_core::matrix_lab::{run_ensemble, EnsembleConfig};
use lagspec_core::moments::{
    moment_closed_form, moment_closed_form_f64, moment_from_pillars, moment_from_pillars_f64,
    moment_recursion, moment_recursion_f64, AspectRatio, EXACT_ORDER_LIMIT,
};
use lagspec_core::spectral::SpectralLaw;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use crate::output::{cdf_sibling, emit, json_document, CliError, CliResult, Exit, Format, Header};
use crate::{DensityArgs, MomentsArgs, SimulateArgs, VerifyArgs};

/// Largest order `moments` accepts.
pub const MAX_ORDER: usize = 200;
/// Relative agreement required between the floating-point routes.
pub const NUMERIC_AGREEMENT: f64 = 1e-10;

enum Ratio {
    Exact(AspectRatio),
    Decimal(f64),
}

impl Ratio {
    fn to_f64(&self) -> f64 {
        match self {
            Ratio::Exact(y) => y.to_f64(),
            Ratio::Decimal(y) => *y,
        }
    }
}

fn parse_ratio(s: &str) -> CliResult<Ratio> {
    if let Ok(y) = s.parse::<AspectRatio>() {
        return Ok(Ratio::Exact(y));
    }
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => {
            eprintln!("note: decimal y = {s} uses floating-point routes; write it as p/q for exact output");
            Ok(Ratio::Decimal(v))
        }
        _ => Err(CliError::usage(format!("y must be a positive rational p/q or decimal, got {s:?}"))),
    }
}

#[derive(Serialize)]
struct MomentRow {
    k: usize,
    closed_form: String,
    pillar: String,
    recursion: String,
    value: f64,
    agree: bool,
}

/// Shortest round-trip form, switching to exponent notation for large
/// magnitudes.
fn fmt_f64(v: f64) -> String {
    if v.abs() < 1e15 {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn relative_spread(v: [f64; 3]) -> f64 {
    let hi = v.iter().fold(f64::MIN, |a, &b| a.max(b));
    let lo = v.iter().fold(f64::MAX, |a, &b| a.min(b));
    (hi - lo) / hi.abs().max(f64::MIN_POSITIVE)
}

pub fn moments(a: &MomentsArgs, format: Format, out: Option<&Path>) -> CliResult<Exit> {
    if a.order == 0 || a.order > MAX_ORDER {
        return Err(CliError::usage(format!("K must be in 1..={MAX_ORDER}, got {}", a.order)));
    }
    let y = parse_ratio(&a.y)?;
    let table = build_tables_by_recursion(a.order)?;
    let rows: Vec<MomentRow> = match &y {
        Ratio::Exact(yr) if a.order <= EXACT_ORDER_LIMIT => {
            let rec = moment_recursion(a.order, yr)?;
            (1..=a.order)
                .map(|k| {
                    let c = moment_closed_form(k, yr)?;
                    let p = moment_from_pillars(k, yr, &table)?;
                    let r = rec.get(k).expect("order covered").clone();
                    Ok(MomentRow {
                        k,
                        value: c.to_f64().unwrap_or(f64::NAN),
                        agree: c == p && c == r,
                        closed_form: c.to_string(),
                        pillar: p.to_string(),
                        recursion: r.to_string(),
                    })
                })
                .collect::<lagspec_core::Result<_>>()?
        }
        _ => {
            if matches!(y, Ratio::Exact(_)) {
                eprintln!("note: K > {EXACT_ORDER_LIMIT} uses floating-point routes");
            }
            let yf = y.to_f64();
            let rec = moment_recursion_f64(a.order, yf)?;
            let mut rows = Vec::with_capacity(a.order);
            for k in 1..=a.order {
                let v = [
                    moment_closed_form_f64(k, yf)?,
                    moment_from_pillars_f64(k, yf, &table)?,
                    rec.values[k - 1],
                ];
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(CliError::new(Exit::Numerical, format!("m_{k} overflows f64 at y = {yf}")));
                }
                rows.push(MomentRow {
                    k,
                    closed_form: fmt_f64(v[0]),
                    pillar: fmt_f64(v[1]),
                    recursion: fmt_f64(v[2]),
                    value: v[0],
                    agree: relative_spread(v) <= NUMERIC_AGREEMENT,
                });
            }
            rows
        }
    };
    let exact = matches!(y, Ratio::Exact(_)) && a.order <= EXACT_ORDER_LIMIT;
    let header = Header::new(
        "moments",
        json!({ "y": a.y, "K": a.order, "mode": if exact { "exact" } else { "numeric" } }),
    );
    let body = match format {
        Format::Json => json_document(&header, json!({ "rows": rows })),
        Format::Csv => {
            let mut s = header.csv_line();
            s.push_str("k,closed_form,pillar,recursion,agree\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{},{}", r.k, r.closed_form, r.pillar, r.recursion, r.agree);
            }
            s
        }
    };
    emit(out, &body)?;
    match rows.iter().find(|r| !r.agree) {
        Some(r) => Err(CliError::new(Exit::Disagreement, format!("moment routes disagree at k = {}", r.k))),
        None => Ok(Exit::Ok),
    }
}

pub fn density(a: &DensityArgs, format: Format, out: Option<&Path>) -> CliResult<Exit> {
    if a.grid < 2 {
        return Err(CliError::usage(format!("grid needs at least 2 points, got {}", a.grid)));
    }
    let y = parse_ratio(&a.y)?.to_f64();
    let law = SpectralLaw::new(y, a.grid)?;
    let header = Header::new("density", json!({ "y": a.y, "grid": a.grid }));
    let meta = json!({
        "y": y,
        "a": law.endpoints.a,
        "b": law.endpoints.b,
        "atom_at_zero": law.atom_at_zero,
        "npoints": law.grid.len(),
    });
    match format {
        Format::Json => {
            let mut doc = meta;
            doc["grid"] = serde_json::to_value(&law.grid).expect("grid serializes");
            emit(out, &json_document(&header, doc))?;
        }
        Format::Csv => {
            let preamble = format!("{}# {meta}\n", header.csv_line());
            let mut dens = format!("{preamble}x,density\n");
            let mut cdf = format!("{preamble}x,cdf\n");
            for p in &law.grid {
                let _ = writeln!(dens, "{},{}", p.x, p.density);
                let _ = writeln!(cdf, "{},{}", p.x, p.cdf);
            }
            match out {
                Some(path) => {
                    fs::write(path, dens)?;
                    fs::write(cdf_sibling(path), cdf)?;
                }
                None => emit(None, &format!("{dens}\n{cdf}"))?,
            }
        }
    }
    Ok(Exit::Ok)
}

pub fn simulate(a: &SimulateArgs, format: Format, out: Option<&Path>) -> CliResult<Exit> {
    let config = EnsembleConfig {
        p: a.p,
        t: a.t,
        lag: a.s,
        distribution: a.dist,
        replicates: a.reps,
        seed: a.seed,
        max_moment_order: a.order,
    };
    config.validate()?;
    let run = run_ensemble(&config)?;
    let header = Header::new("simulate", &config);
    let s = &run.summary;
    let body = match format {
        Format::Json => json_document(&header, s),
        Format::Csv => {
            let mut body = header.csv_line();
            body.push_str("k,empirical,theoretical,relative_error\n");
            for (k, ((e, t), r)) in s
                .moments_empirical
                .iter()
                .zip(&s.moments_theoretical)
                .zip(&s.checks.moment_relative_errors)
                .enumerate()
            {
                let _ = writeln!(body, "{},{e},{t},{r}", k + 1);
            }
            body.push_str("\nstatistic,value\n");
            let c = &s.checks;
            for (name, v) in [
                ("y_T", s.y_t.to_string()),
                ("lambda_max_mean", s.lambda_max_mean.to_string()),
                ("lambda_max_se", s.lambda_max_se.to_string()),
                ("b_theoretical", s.b_theoretical.to_string()),
                ("ks_distance", s.ks_distance.to_string()),
                ("min_near_zero_count", s.replicates.iter().map(|r| r.near_zero_count).min().unwrap_or(0).to_string()),
                ("moments_pass", c.moments_pass.to_string()),
                ("ks_pass", c.ks_pass.to_string()),
                ("lambda_max_pass", c.lambda_max_pass.to_string()),
                ("warnings", s.warnings.len().to_string()),
            ] {
                let _ = writeln!(body, "{name},{v}");
            }
            body
        }
    };
    emit(out, &body)?;
    if let Some(path) = &a.eigs {
        fs::write(path, format!("{}{}", header.csv_line(), run.eigenvalue_csv()))?;
    }
    Ok(Exit::Ok)
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn verify(a: &VerifyArgs, format: Option<Format>, out: Option<&Path>) -> CliResult<Exit> {
    let outcomes = run_all(a.quick);
    let passed = all_passed(&outcomes);
    let header = Header::new("verify", json!({ "quick": a.quick }));
    let body = match format {
        None => {
            let mut s = String::new();
            for o in &outcomes {
                let _ = writeln!(s, "{o}");
            }
            let ok = outcomes.iter().filter(|o| o.passed && !o.skipped).count();
            let run = outcomes.iter().filter(|o| !o.skipped).count();
            let _ = writeln!(s, "{ok}/{run} criteria passed{}", if a.quick { " (quick)" } else { "" });
            s
        }
        Some(Format::Json) => json_document(&header, json!({ "all_passed": passed, "criteria": outcomes })),
        Some(Format::Csv) => {
            let mut s = header.csv_line();
            s.push_str("id,name,verdict,elapsed_secs,detail\n");
            for o in &outcomes {
                let verdict = if o.skipped { "skip" } else if o.passed { "pass" } else { "fail" };
                let _ = writeln!(s, "{},{},{verdict},{:.3},{}", o.id, csv_quote(o.name), o.elapsed_secs, csv_quote(&o.detail));
            }
            s
        }
    };
    emit(out, &body)?;
    if passed {
        Ok(Exit::Ok)
    } else {
        let failed: Vec<String> = outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| format!("{} ({})", o.id, o.name))
            .collect();
        eprintln!("failed criteria: {}", failed.join(", "));
        Ok(Exit::AcceptanceFailed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_parsing() {
        assert!(matches!(parse_ratio("1/2"), Ok(Ratio::Exact(_))));
        assert!(matches!(parse_ratio("3"), Ok(Ratio::Exact(_))));
        assert!(matches!(parse_ratio("0.5"), Ok(Ratio::Decimal(v)) if v == 0.5));
        for bad in ["0", "-1", "1/0", "abc", "-0.5", "nan"] {
            assert!(parse_ratio(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn spread() {
        assert_eq!(relative_spread([2.0, 2.0, 2.0]), 0.0);
        assert!((relative_spread([1.0, 1.5, 2.0]) - 0.5).abs() < 1e-15);
    }
}
