use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use arpist::checks::{self, Check};
use arpist::csv::Table;
use arpist::experiments::{self, ErrorSummary};
use arpist::io::{load_mesh, save_mesh};
use arpist::row;
use arpist::testfns::{f1, f2, F1_EXACT, F2_CLOSED_FORM};
use arpist_core::{icosphere, AdaptiveConfig, DetMethod, Method, TriangleMesh};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Stable spherical-triangle quadrature benchmarks. Every command writes a
/// CSV table; `--check` turns the run into a pass/fail gate (exit code 3).
#[derive(Parser)]
#[command(name = "arpist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Enforce the accuracy thresholds; exit 3 if any fails.
    #[arg(long)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Determinant accuracy of every method on random sliver triangles.
    DetBench {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        h_long: f64,
        #[arg(long, default_value_t = 1e-4)]
        h_short: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Area error of L'Huilier and ARPIST over size or shape sweeps.
    AreaStability {
        #[arg(long, value_enum, default_value_t = Mode::EdgeSweep)]
        mode: Mode,
        #[arg(long, default_value_t = 1e-3)]
        h_min: f64,
        #[arg(long, default_value_t = 1.0)]
        h_max: f64,
        /// Base chord of the isosceles triangles (angle sweep).
        #[arg(long, default_value_t = 0.26)]
        h: f64,
        #[arg(long, default_value_t = PI / 500.0)]
        theta_min: f64,
        #[arg(long, default_value_t = PI / 3.0)]
        theta_max: f64,
        /// Sweep points, log-spaced.
        #[arg(long, default_value_t = 25)]
        points: usize,
        /// Random placements averaged per sweep point.
        #[arg(long, default_value_t = 16)]
        rotations: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Composite integration error over icosphere refinements (or one mesh).
    Converge {
        #[arg(long, value_enum, default_value_t = Function::F1)]
        function: Function,
        #[arg(long, default_value_t = 1)]
        level_min: u32,
        #[arg(long, default_value_t = 5)]
        level_max: u32,
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Mean relative error E(s) for random Poisson-kernel test functions.
    Poisson {
        #[arg(long, value_delimiter = ',', default_value = "0.8,0.9,0.95,0.97,0.975,0.98,0.985,0.99,0.995")]
        s: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Mesh to integrate on; defaults to a nonuniformly refined icosphere.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Integration of nodal samples through WLS reconstruction.
    Scattered {
        #[arg(long, default_value_t = 2)]
        level_min: u32,
        #[arg(long, default_value_t = 5)]
        level_max: u32,
        #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
        degrees: Vec<usize>,
        /// Fixed quadrature degree (4 or 8); adaptive quadrature if omitted.
        #[arg(long)]
        quad_degree: Option<usize>,
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Write an icosphere in SPHERETRI format.
    Icosphere {
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    EdgeSweep,
    AngleSweep,
}

#[derive(Clone, Copy, ValueEnum)]
enum Function {
    F1,
    F2,
}

/// Anything that should end the run with exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

struct Output {
    csv: String,
    checks: Vec<Check>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(Failure(msg)) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let (common, result) = match cli.command {
        Command::Icosphere { level, radius, out } => {
            return match icosphere(level, radius).map_err(Failure::from).and_then(|m| Ok(save_mesh(&m, &out)?)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(Failure(msg)) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(2)
                }
            };
        }
        Command::DetBench { n, seed, h_long, h_short, common } => (common, det_bench(n, seed, h_long, h_short)),
        Command::AreaStability { mode, h_min, h_max, h, theta_min, theta_max, points, rotations, seed, common } => {
            let r = match mode {
                Mode::EdgeSweep => edge_sweep(h_min, h_max, points, rotations, seed, common.check),
                Mode::AngleSweep => angle_sweep(h, theta_min, theta_max, points, rotations, seed),
            };
            (common, r)
        }
        Command::Converge { function, level_min, level_max, mesh, common } => {
            (common, converge(function, level_min, level_max, mesh))
        }
        Command::Poisson { s, trials, seed, mesh, common } => (common, poisson(&s, trials, seed, mesh)),
        Command::Scattered { level_min, level_max, degrees, quad_degree, mesh, common } => {
            (common, scattered(level_min, level_max, &degrees, quad_degree, mesh))
        }
    };
    let out = match result.and_then(|o| emit(&common, &o).map(|()| o)) {
        Ok(o) => o,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if common.check {
        for c in &out.checks {
            eprintln!("{c}");
        }
        if !checks::all_pass(&out.checks) {
            return ExitCode::from(3);
        }
    }
    ExitCode::SUCCESS
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("ARPIST_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure(format!("ARPIST_THREADS must be a positive integer, got {v:?}"))
    })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn emit(common: &Common, out: &Output) -> Result<(), Failure> {
    match &common.out {
        Some(path) => std::fs::write(path, &out.csv).map_err(|e| Failure(format!("{}: {e}", path.display()))),
        None => Ok(std::io::stdout().write_all(out.csv.as_bytes())?),
    }
}

fn load(path: &Option<PathBuf>) -> Result<Option<TriangleMesh>, Failure> {
    Ok(match path {
        Some(p) => Some(load_mesh(p)?),
        None => None,
    })
}

fn levels(min: u32, max: u32) -> Result<Vec<u32>, Failure> {
    if min > max {
        return Err(Failure(format!("--level-min {min} exceeds --level-max {max}")));
    }
    Ok((min..=max).collect())
}

fn det_bench(n: usize, seed: u64, h_long: f64, h_short: f64) -> Result<Output, Failure> {
    let b = experiments::det_bench(n, seed, h_long, h_short)?;
    let mut t = Table::new(&["method", "mean_rel_err", "min_rel_err", "max_rel_err"]);
    for m in DetMethod::ALL {
        let s = b.stats.iter().find(|s| s.method == m).expect("every method is benchmarked");
        t.push(row![m.name(), s.mean, s.min, s.max]);
    }
    Ok(Output { csv: t.render(), checks: checks::det_bench(&b) })
}

fn sweep_table(first: &'static str, rows: &[(f64, ErrorSummary)]) -> String {
    let mut t = Table::new(&[first, "err_lt", "err_arpist4", "err_arpist8", "err_adaptive"]);
    for (x, e) in rows {
        t.push(row![*x, e.mean[0], e.mean[1], e.mean[2], e.mean[3]]);
    }
    t.render()
}

fn edge_sweep(h_min: f64, h_max: f64, points: usize, rotations: usize, seed: u64, check: bool) -> Result<Output, Failure> {
    let rows = experiments::edge_sweep(h_min, h_max, points, rotations, seed)?;
    let checks = if check { checks::edge_sweep(&rows, rotations, seed)? } else { Vec::new() };
    Ok(Output { csv: sweep_table("h", &rows), checks })
}

fn angle_sweep(h: f64, lo: f64, hi: f64, points: usize, rotations: usize, seed: u64) -> Result<Output, Failure> {
    let rows = experiments::angle_sweep(h, lo, hi, points, rotations, seed)?;
    Ok(Output { csv: sweep_table("theta_min", &rows), checks: checks::angle_sweep(&rows) })
}

fn converge(function: Function, lo: u32, hi: u32, mesh: Option<PathBuf>) -> Result<Output, Failure> {
    let (f, exact, name): (fn(_) -> f64, f64, &str) = match function {
        Function::F1 => (f1, F1_EXACT, "f1"),
        Function::F2 => (f2, F2_CLOSED_FORM, "f2"),
    };
    let rows = match load(&mesh)? {
        Some(m) => {
            let r = m.radius();
            let unit = move |p: arpist_core::Vec3| f(p.scale(1.0 / r));
            vec![experiments::converge_mesh("mesh".into(), &m, &unit, exact * r * r)?]
        }
        None => experiments::converge_levels(&levels(lo, hi)?, &f, exact)?,
    };
    let mut t = Table::new(&["mesh", "n_triangles", "h", "err_deg4", "err_deg8", "err_adaptive", "value_adaptive"]);
    for r in &rows {
        t.push(row![r.label.as_str(), r.n_triangles, r.h, r.err_deg4, r.err_deg8, r.err_adaptive, r.value_adaptive]);
    }
    Ok(Output { csv: t.render(), checks: checks::converge(&rows, name) })
}

fn poisson(s: &[f64], trials: u64, seed: u64, mesh: Option<PathBuf>) -> Result<Output, Failure> {
    let mesh = match load(&mesh)? {
        Some(m) => m,
        None => experiments::nonuniform_mesh()?,
    };
    let rows = experiments::poisson_errors(&mesh, s, trials, seed)?;
    let mut t = Table::new(&["s", "E_s"]);
    for &(s, e) in &rows {
        t.push(row![s, e]);
    }
    Ok(Output { csv: t.render(), checks: checks::poisson(&rows) })
}

fn scattered(lo: u32, hi: u32, degrees: &[usize], quad: Option<usize>, mesh: Option<PathBuf>) -> Result<Output, Failure> {
    let quad = match quad {
        Some(d) => Method::Fixed(d),
        None => Method::Adaptive(AdaptiveConfig::default()),
    };
    let mut rows = Vec::new();
    match load(&mesh)? {
        Some(m) => rows.extend(experiments::scattered_mesh("mesh", &m, degrees, quad)?),
        None => {
            for l in levels(lo, hi)? {
                rows.extend(experiments::scattered_mesh(&l.to_string(), &icosphere(l, 1.0)?, degrees, quad)?);
            }
        }
    }
    let mut t = Table::new(&["mesh", "n_nodes", "degree", "err_f1", "err_const"]);
    for r in &rows {
        t.push(row![r.label.as_str(), r.n_nodes, r.degree, r.err_f1, r.err_const]);
    }
    Ok(Output { csv: t.render(), checks: checks::scattered(&rows) })
}
