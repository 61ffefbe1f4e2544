//! Acceptance suite. Each criterion prints one PASS/FAIL line followed by
//! its individual checks; the process exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::hint::black_box;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use arpist::checks::{self, Check};
use arpist::experiments::{
    angle_sweep, converge_levels, converge_mesh, det_bench, edge_sweep, nonuniform_mesh, par_mesh_integrate,
    poisson_errors, scattered_mesh,
};
use arpist::testfns::{f1, f2, F1_EXACT, F2_REFERENCE};
use arpist_core::{
    area_spherical, get_rule, icosphere, integrate_fixed, AdaptiveConfig, Method, SphericalTriangle, Vec3,
};

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check { name: name.to_owned(), pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

const POISSON_S: [f64; 9] = [0.8, 0.9, 0.95, 0.97, 0.975, 0.98, 0.985, 0.99, 0.995];

fn ac1() -> Vec<Check> {
    let octant = SphericalTriangle::new(Vec3::E1, Vec3::E2, Vec3::E3, 1.0).unwrap();
    let e = rel(area_spherical(&octant, &AdaptiveConfig::default()), FRAC_PI_2);
    let mesh = icosphere(2, 1.0).unwrap();
    let whole = par_mesh_integrate(&mesh, &|_| 1.0, Method::Adaptive(AdaptiveConfig::default())).unwrap();
    let e2 = rel(whole.value, 4.0 * PI);
    vec![
        check("octant", e <= 1e-14, format!("{e:.3e} <= 1e-14")),
        check("icosphere2_area", e2 <= 1e-13, format!("{e2:.3e} <= 1e-13")),
    ]
}

fn ac2() -> Vec<Check> {
    let rows = edge_sweep(1e-3, 1.0, 25, 16, 1).unwrap();
    checks::edge_sweep(&rows, 16, 1).unwrap()
}

fn ac3() -> Vec<Check> {
    checks::angle_sweep(&angle_sweep(0.26, PI / 500.0, PI / 3.0, 25, 16, 1).unwrap())
}

fn ac4() -> Vec<Check> {
    let b = det_bench(1000, 42, 0.01, 1e-4).unwrap();
    checks::det_bench(&b).into_iter().filter(|c| !c.name.ends_with("_bound")).collect()
}

fn ac5() -> Vec<Check> {
    let rows = converge_levels(&[1, 2, 3, 4, 5], &f1, F1_EXACT).unwrap();
    checks::converge(&rows, "f1").into_iter().filter(|c| c.name.ends_with("_slope")).collect()
}

fn ac6() -> Vec<Check> {
    let b = det_bench(1000, 42, 0.01, 1e-4).unwrap();
    checks::det_bench(&b).into_iter().filter(|c| c.name.ends_with("_bound")).collect()
}

fn ac7() -> Vec<Check> {
    let adaptive = Method::Adaptive(AdaptiveConfig::default());
    let m5 = icosphere(5, 1.0).unwrap();
    let mut out: Vec<Check> = [1, 3, 5]
        .into_iter()
        .map(|l| {
            let m = icosphere(l, 1.0).unwrap();
            let e = rel(par_mesh_integrate(&m, &f1, adaptive).unwrap().value, F1_EXACT);
            check(&format!("f1_icosphere{l}"), e <= 1e-12, format!("{e:.3e} <= 1e-12"))
        })
        .collect();
    let row = converge_mesh("5".into(), &m5, &f2, F2_REFERENCE).unwrap();
    let e = rel(row.value_adaptive, F2_REFERENCE);
    out.push(check(
        "f2_icosphere5",
        e <= 1e-9,
        format!("{:.17e} vs {F2_REFERENCE:.17e}: {e:.3e} <= 1e-9", row.value_adaptive),
    ));
    out
}

fn ac8() -> Vec<Check> {
    checks::poisson(&poisson_errors(&nonuniform_mesh().unwrap(), &POISSON_S, 50, 7).unwrap())
}

fn ac9() -> Vec<Check> {
    let adaptive = Method::Adaptive(AdaptiveConfig::default());
    let rows = scattered_mesh("5", &icosphere(5, 1.0).unwrap(), &[4, 8], adaptive).unwrap();
    let mut out = checks::scattered(&rows);
    let extra = [("icosphere2", icosphere(2, 1.0).unwrap()), ("icosphere3", icosphere(3, 1.0).unwrap()), (
        "nonuniform",
        nonuniform_mesh().unwrap(),
    )];
    for (name, mesh) in extra {
        let r = &scattered_mesh(name, &mesh, &[4], adaptive).unwrap()[0];
        out.push(check(&format!("constant_{name}"), r.err_const <= 1e-12, format!("{:.3e} <= 1e-12", r.err_const)));
    }
    out
}

fn ac10() -> Vec<Check> {
    let tri = SphericalTriangle::new_normalized(
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(1.0, 0.03, 0.0),
        Vec3::new(1.0, 0.01, 0.03),
        1.0,
    )
    .unwrap();
    let f = |p: Vec3| (p.x + p.y * p.z).exp();
    let time = |degree: usize| {
        let rule = get_rule(degree).unwrap();
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let t = Instant::now();
            let mut acc = 0.0;
            for _ in 0..100_000 {
                acc += integrate_fixed(black_box(&tri), &f, rule).unwrap().value;
            }
            black_box(acc);
            best = best.min(t.elapsed().as_secs_f64());
        }
        best
    };
    let (t6, t16) = (time(4), time(8));
    let ratio = t16 / t6;
    vec![check("cost_ratio_16_vs_6", (1.0..=6.0).contains(&ratio), format!("{ratio:.3} in [1, 6] ({t16:.3}s / {t6:.3}s)"))]
}

fn ac11() -> Vec<Check> {
    let bin = env!("CARGO_BIN_EXE_arpist");
    let commands: [&[&str]; 7] = [
        &["det-bench", "--n", "300", "--seed", "42"],
        &["area-stability", "--mode", "edge-sweep", "--h-min", "1e-3", "--h-max", "1", "--points", "6"],
        &["area-stability", "--mode", "angle-sweep", "--points", "6", "--seed", "3"],
        &["converge", "--level-min", "1", "--level-max", "3"],
        &["poisson", "--s", "0.8,0.95", "--trials", "4", "--seed", "7"],
        &["scattered", "--level-min", "2", "--level-max", "2", "--degrees", "2,4", "--quad-degree", "8"],
        &["converge", "--function", "f2", "--level-min", "2", "--level-max", "2"],
    ];
    commands
        .iter()
        .map(|args| {
            let run = |threads: &str| {
                let out = Command::new(bin).args(*args).env("ARPIST_THREADS", threads).output().unwrap();
                assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
                out.stdout
            };
            let (a, b, c) = (run("1"), run("1"), run("4"));
            check(
                args[0],
                !a.is_empty() && a == b && a == c,
                format!("{:?}: {} bytes, identical across runs and thread counts", args, a.len()),
            )
        })
        .collect()
}

fn main() {
    let criteria: [(&str, fn() -> Vec<Check>); 11] = [
        ("AC1 octant exactness", ac1),
        ("AC2 equilateral area sweep", ac2),
        ("AC3 isosceles angle sweep", ac3),
        ("AC4 sliver determinant statistics", ac4),
        ("AC5 composite convergence order", ac5),
        ("AC6 determinant error bounds", ac6),
        ("AC7 exact integrals of f1 and f2", ac7),
        ("AC8 Poisson error bands", ac8),
        ("AC9 WLS coupling", ac9),
        ("AC10 linear cost in quadrature points", ac10),
        ("AC11 CLI determinism", ac11),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(checks) => {
                let pass = checks::all_pass(&checks) && !checks.is_empty();
                println!("{} {name} ({secs:.1}s)", if pass { "PASS" } else { "FAIL" });
                for c in &checks {
                    println!("    {c}");
                }
                if !pass {
                    failed.push(name);
                }
            }
            Err(_) => {
                println!("FAIL {name} (panicked)");
                failed.push(name);
            }
        }
    }
    println!("\n{} of 11 criteria passed", 11 - failed.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
