//! Refinement ladders, observed rates and tabular output.

use std::fmt::Write as _;

use crate::verification::errors::ErrorReport;
use crate::verification::run::{run, LevelResult, RunSpec};
use crate::Result;

pub const CSV_HEADER: &str = "level,h,H,err_sigma,rate_sigma,err_div,rate_div,err_u,rate_u,err_Phu,rate_Phu,\
err_gamma,rate_gamma,err_mortar,rate_mortar,cg_iters,cond_est,solves_per_subdomain";

/// Run `spec` at every level, in order.
pub fn convergence_study(spec: &RunSpec, levels: &[u32]) -> Result<Vec<LevelResult>> {
    levels
        .iter()
        .map(|&level| {
            let mut s = spec.clone();
            s.level = level;
            run(&s)
        })
        .collect()
}

/// Observed rate `log(e0 / e1) / log(h0 / h1)`.
pub fn observed_rate(e0: f64, e1: f64, h0: f64, h1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

/// Per-level rates of the six error norms; `None` on the first level.
pub fn rates(results: &[LevelResult]) -> Vec<Option<[f64; 6]>> {
    let mut out = vec![None];
    for w in results.windows(2) {
        let r = match (&w[0].errors, &w[1].errors) {
            (Some(a), Some(b)) => {
                let (a, b) = (a.as_array(), b.as_array());
                Some(std::array::from_fn(|k| observed_rate(a[k], b[k], w[0].h, w[1].h)))
            }
            _ => None,
        };
        out.push(r);
    }
    out.truncate(results.len());
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_exponent(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn num(v: f64) -> String {
    if v.is_finite() { format!("{v}") } else { String::new() }
}

fn errors_or_nan(r: &LevelResult) -> [f64; 6] {
    r.errors.as_ref().map(ErrorReport::as_array).unwrap_or([f64::NAN; 6])
}

/// CSV in full round-trip precision.
pub fn to_csv(results: &[LevelResult]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for (r, rate) in results.iter().zip(rates(results)) {
        let e = errors_or_nan(r);
        let _ = write!(s, "{},{},{}", r.level, num(r.h), num(r.big_h));
        for k in 0..6 {
            let rk = rate.map(|a| a[k]).unwrap_or(f64::NAN);
            let _ = write!(s, ",{},{}", num(e[k]), num(rk));
        }
        let _ = writeln!(s, ",{},{},{}", r.cg_iters, num(r.cond_est), r.solves_per_subdomain);
    }
    s
}

fn sig3(v: f64) -> String {
    if v.is_finite() { format!("{v:.2E}") } else { "-".into() }
}

fn frac(h: f64) -> String {
    if h.is_finite() && h > 0.0 && (1.0 / h - (1.0 / h).round()).abs() < 1e-9 {
        format!("1/{}", (1.0 / h).round())
    } else {
        sig3(h)
    }
}

/// Aligned table with three significant digits.
pub fn pretty_table(results: &[LevelResult]) -> String {
    let mut s = format!(
        "{:>7} | {:>16} | {:>16} | {:>16} | {:>16} | {:>16} | {:>16} | {:>5} | {:>9} | {:>6}\n",
        "h", "sigma", "div", "u", "Phu", "gamma", "mortar", "iter", "cond", "solves"
    );
    for (r, rate) in results.iter().zip(rates(results)) {
        let e = errors_or_nan(r);
        let _ = write!(s, "{:>7}", frac(r.h));
        for k in 0..6 {
            let rk = rate.map(|a| format!("{:.1}", a[k])).filter(|t| t != "NaN").unwrap_or_else(|| "-".into());
            let _ = write!(s, " | {:>9} {:>6}", sig3(e[k]), rk);
        }
        let _ = writeln!(s, " | {:>5} | {:>9} | {:>6}", r.cg_iters, sig3(r.cond_est), r.solves_per_subdomain);
    }
    s
}
