//! Pass/fail thresholds applied by `--check` and by the acceptance tests.

use std::fmt;

use crate::experiments::{equilateral_errors, log_log_slope, ConvergeRow, DetBench, ErrorSummary, ScatteredRow};
use crate::testfns::F2_REFERENCE;
use arpist_core::{DetMethod, Result};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.to_owned(), pass, detail }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// Ensemble statistics: anchored methods accurate, baselines clearly worse,
/// and every sample inside the rounding bound `100·u·‖a1‖‖a2‖‖a3‖`.
pub fn det_bench(b: &DetBench) -> Vec<Check> {
    let atp = b.mean(DetMethod::ATP);
    let lu = b.mean(DetMethod::ALUPPE);
    let ratio = |m| b.mean(m) / atp;
    vec![
        Check::new("atp_mean", atp <= 1e-13, format!("{atp:.3e} <= 1e-13")),
        Check::new("aluppe_mean", lu <= 1e-13, format!("{lu:.3e} <= 1e-13")),
        Check::new("naive_vs_atp", ratio(DetMethod::NaiveTP) >= 1e3, format!("{:.3e} >= 1e3", ratio(DetMethod::NaiveTP))),
        Check::new("lupp_vs_atp", ratio(DetMethod::PlainLUPP) >= 10.0, format!("{:.3e} >= 10", ratio(DetMethod::PlainLUPP))),
        Check::new(
            "off_anchored_vs_atp",
            ratio(DetMethod::OffAnchoredTP) >= 10.0,
            format!("{:.3e} >= 10", ratio(DetMethod::OffAnchoredTP)),
        ),
        Check::new("atp_bound", b.worst_atp_bound <= 100.0, format!("worst {:.3} <= 100", b.worst_atp_bound)),
        Check::new("aluppe_bound", b.worst_aluppe_bound <= 100.0, format!("worst {:.3} <= 100", b.worst_aluppe_bound)),
    ]
}

/// Equilateral sweep. Index 0 of the error arrays is L'Huilier, 1 and 2 the
/// fixed rules, 3 adaptive.
pub fn edge_sweep(rows: &[(f64, ErrorSummary)], rotations: usize, seed: u64) -> Result<Vec<Check>> {
    let at4 = equilateral_errors(0.004, rotations, seed)?;
    let at8 = equilateral_errors(0.05, rotations, seed)?;
    let lt = equilateral_errors(1e-3, rotations, seed)?;
    let window: Vec<&(f64, ErrorSummary)> =
        rows.iter().filter(|(h, _)| (1e-3 * (1.0 - 1e-12)..=1e-1 * (1.0 + 1e-12)).contains(h)).collect();
    let slope = if window.len() >= 2 {
        let h: Vec<f64> = window.iter().map(|r| r.0).collect();
        let e: Vec<f64> = window.iter().map(|r| r.1.mean[0].max(f64::MIN_POSITIVE)).collect();
        log_log_slope(&h, &e)
    } else {
        f64::NAN
    };
    Ok(vec![
        Check::new("deg4_at_0.004", at4.max[1] <= 1e-14, format!("max {:.3e} <= 1e-14", at4.max[1])),
        Check::new("deg8_at_0.05", at8.max[2] <= 1e-14, format!("max {:.3e} <= 1e-14", at8.max[2])),
        Check::new("lhuilier_at_1e-3", lt.mean[0] > 1e-9, format!("mean {:.3e} > 1e-9", lt.mean[0])),
        Check::new(
            "lhuilier_trend",
            slope < 0.0,
            format!("slope {slope:.3} < 0 over {} sweep points in [1e-3, 1e-1]", window.len()),
        ),
    ])
}

/// Isosceles sweep, rows ordered by increasing base angle.
pub fn angle_sweep(rows: &[(f64, ErrorSummary)]) -> Vec<Check> {
    let adaptive: Vec<f64> = rows.iter().map(|r| r.1.mean[3]).collect();
    let hi = adaptive.iter().cloned().fold(0.0, f64::max);
    let lo = adaptive.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = hi / lo;
    let lt_growth = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => a.1.mean[0] / b.1.mean[0],
        _ => f64::NAN,
    };
    vec![
        Check::new("adaptive_flat", spread <= 1e2, format!("max/min {spread:.3e} <= 1e2 ({lo:.3e}..{hi:.3e})")),
        Check::new("lhuilier_growth", lt_growth >= 1e4, format!("{lt_growth:.3e} >= 1e4")),
    ]
}

/// Composite convergence (`slopes`) and the exact-integral checks.
pub fn converge(rows: &[ConvergeRow], function: &str) -> Vec<Check> {
    let mut out = Vec::new();
    if function == "f1" {
        let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let e4: Vec<f64> = rows.iter().map(|r| r.err_deg4).collect();
        let e8: Vec<f64> = rows.iter().map(|r| r.err_deg8.max(f64::MIN_POSITIVE)).collect();
        let s4 = log_log_slope(&h, &e4);
        let s8 = log_log_slope(&h, &e8);
        let floor8 = e8.iter().cloned().fold(f64::INFINITY, f64::min);
        if rows.len() < 2 {
            out.push(Check::new("deg4_slope", false, "needs at least two meshes".into()));
        } else {
            out.push(Check::new("deg4_slope", s4 >= 4.5, format!("{s4:.3} >= 4.5")));
        }
        out.push(Check::new(
            "deg8_slope",
            s8 >= 8.5 || floor8 <= 1e-13,
            format!("slope {s8:.3} >= 8.5 or floor {floor8:.3e} <= 1e-13"),
        ));
        let worst = rows.iter().map(|r| r.err_adaptive).fold(0.0, f64::max);
        out.push(Check::new("f1_adaptive_exact", worst <= 1e-12, format!("worst {worst:.3e} <= 1e-12")));
    } else if let Some(v) = rows.last().map(|r| r.value_adaptive) {
        let e = (v - F2_REFERENCE).abs() / F2_REFERENCE;
        out.push(Check::new(
            "f2_adaptive_reference",
            e <= 1e-9,
            format!("{v:.17e} vs {F2_REFERENCE:.17e}: {e:.3e} <= 1e-9"),
        ));
    }
    out
}

/// `E(s)` bands and near-monotonicity, rows ordered by `s`.
pub fn poisson(rows: &[(f64, f64)]) -> Vec<Check> {
    let mut out = Vec::new();
    for (s, bound) in [(0.8, 1e-7), (0.95, 1e-4), (0.995, 5e-2)] {
        let name = format!("E({s})");
        match rows.iter().find(|r| (r.0 - s).abs() < 1e-12) {
            Some(&(_, e)) => out.push(Check::new(&name, e <= bound, format!("{e:.3e} <= {bound:e}"))),
            None => out.push(Check::new(&name, false, "s not in the grid".into())),
        }
    }
    let inversions = rows.windows(2).filter(|w| w[1].1 < w[0].1).count();
    out.push(Check::new("monotone", inversions <= 1, format!("{inversions} inversions <= 1")));
    out
}

/// WLS coupling: degree 8 accurate and well ahead of degree 4 on the finest
/// mesh, constants exact everywhere, and degree-8 error falling with refinement.
pub fn scattered(rows: &[ScatteredRow]) -> Vec<Check> {
    let mut out = Vec::new();
    let worst_const = rows.iter().map(|r| r.err_const).fold(0.0, f64::max);
    out.push(Check::new("constant", worst_const <= 1e-12, format!("worst {worst_const:.3e} <= 1e-12")));
    let Some(last) = rows.last().map(|r| r.label.clone()) else { return out };
    let find = |d| rows.iter().find(|r| r.label == last && r.degree == d).map(|r| r.err_f1);
    match (find(8), find(4)) {
        (Some(e8), Some(e4)) => {
            out.push(Check::new("deg8_accuracy", e8 <= 1e-6, format!("mesh {last}: {e8:.3e} <= 1e-6")));
            out.push(Check::new("deg8_vs_deg4", e8 * 10.0 <= e4, format!("mesh {last}: {e8:.3e} * 10 <= {e4:.3e}")));
        }
        _ => out.push(Check::new("deg8_vs_deg4", false, format!("mesh {last} lacks degree 4 or 8"))),
    }
    let e8: Vec<f64> = rows.iter().filter(|r| r.degree == 8).map(|r| r.err_f1).collect();
    if e8.len() >= 2 {
        let drop = e8[0] / e8[e8.len() - 1];
        let inversions = e8.windows(2).filter(|w| w[1] > w[0]).count();
        out.push(Check::new(
            "deg8_refinement",
            drop >= 1e2 && inversions <= 1,
            format!("total decrease {drop:.3e} >= 1e2, {inversions} inversions <= 1"),
        ));
    }
    out
}
