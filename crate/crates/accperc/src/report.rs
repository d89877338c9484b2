//! Machine-readable output formatting shared by the command-line frontend
//! and the examples.
//!
//! CSV floats are printed with 17 significant digits, enough to reconstruct
//! the exact `f64`, so reruns can be compared byte for byte. JSON output
//! goes through `serde_json`, whose float encoding is the shortest string
//! that round-trips, which is equally lossless.

use crate::branching::{ConditionReport, SurvivalCurve};
use crate::records::RecordEstimate;
use crate::sim::LevelEstimates;

/// A float with all 17 significant digits, in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV table of per-level survival estimates.
pub fn level_estimates_csv(est: &LevelEstimates) -> String {
    let mut out = String::from("level,n_trials,n_survived,p_hat,stderr,frac_capped\n");
    for row in &est.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.level,
            row.n_trials,
            row.n_survived,
            fmt_f64(row.p_hat),
            fmt_f64(row.stderr),
            fmt_f64(row.frac_capped),
        ));
    }
    out
}

/// CSV table for a phase sweep: one row per (alpha, checkpoint depth).
pub fn phase_csv(rows: &[(f64, u32, f64, f64)]) -> String {
    let mut out = String::from("alpha,depth,p_hat,stderr\n");
    for &(alpha, depth, p_hat, stderr) in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(alpha),
            depth,
            fmt_f64(p_hat),
            fmt_f64(stderr),
        ));
    }
    out
}

/// CSV table of a branching-process survival curve.
pub fn survival_csv(curve: &SurvivalCurve) -> String {
    let mut out = String::from("generation,n_alive_trials,fraction\n");
    for row in &curve.rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.generation,
            row.n_alive_trials,
            fmt_f64(row.fraction),
        ));
    }
    out
}

/// CSV row (with header) for a perfect-record probability estimate.
pub fn records_csv(est: &RecordEstimate) -> String {
    let exact = est.exact_value.map(fmt_f64).unwrap_or_default();
    format!(
        "N,alpha_spec,trials,hits,p_hat,stderr,exact_value\n{},{},{},{},{},{},{}\n",
        est.editions,
        est.alpha_spec,
        est.trials,
        est.hits,
        fmt_f64(est.p_hat),
        fmt_f64(est.stderr),
        exact,
    )
}

/// JSON for a condition-checker report: `{n, values, holds}` with the
/// module-specific value key.
pub fn condition_json(report: &ConditionReport, value_key: &str) -> String {
    let values: Vec<serde_json::Value> = report
        .values
        .iter()
        .map(|&v| serde_json::json!(v))
        .collect();
    let body = serde_json::json!({
        "n": report.n,
        value_key: values,
        "holds": report.holds,
    });
    serde_json::to_string_pretty(&body).expect("static structure serializes") + "\n"
}
