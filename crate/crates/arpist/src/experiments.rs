//! Experiment drivers behind the CLI commands. Each returns plain rows;
//! parallel work is collected in index order and reduced sequentially, so
//! results do not depend on the thread count.

use std::f64::consts::PI;

use arpist_core::dd::DdVec3;
use arpist_core::mesh::quadrature_nodes;
use arpist_core::wls::{Workspace, WlsBuilder};
use arpist_core::{
    area_lhuilier, area_oracle, area_spherical, dd_det_reference, get_rule, icosphere, integrate_adaptive,
    integrate_fixed, random_sliver_triangles, select_anchor, AdaptiveConfig, CompensatedSum, DetMethod,
    DetReport, DoubleDouble, Error, IntegrationResult, IntegrationRow, Method, QuadNode, Result,
    SphericalTriangle, TriangleMesh, Vec3, UNIT_ROUNDOFF,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn param(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// `n` points from `lo` to `hi`, evenly spaced in log scale.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

// ---------------------------------------------------------------- det-bench

#[derive(Clone, Debug)]
pub struct MethodStats {
    pub method: DetMethod,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug)]
pub struct DetBench {
    pub samples: usize,
    pub stats: Vec<MethodStats>,
    /// Largest `|det − oracle| / (u ‖a1‖‖a2‖‖a3‖)` over the anchored columns.
    pub worst_atp_bound: f64,
    pub worst_aluppe_bound: f64,
}

impl DetBench {
    pub fn mean(&self, m: DetMethod) -> f64 {
        self.stats.iter().find(|s| s.method == m).map_or(f64::NAN, |s| s.mean)
    }
}

struct DetSample {
    rel: [f64; 5],
    atp_bound: f64,
    aluppe_bound: f64,
}

fn det_sample(tri: &SphericalTriangle) -> DetSample {
    let oracle = dd_det_reference(tri);
    let o = oracle.to_f64();
    let err = |v: f64| (DoubleDouble::from_f64(v) - oracle).to_f64().abs();
    let k = select_anchor(tri);
    let v = tri.vertices();
    let (a, b, c) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
    let scale = UNIT_ROUNDOFF * a.norm() * DdVec3::diff(b, a).norm().to_f64() * DdVec3::diff(c, a).norm().to_f64();
    let mut rel = [0.0; 5];
    let mut bounds = [0.0; 2];
    for (i, m) in DetMethod::ALL.iter().enumerate() {
        let r = DetReport::compute(tri, *m);
        rel[i] = err(r.value) / o.abs();
        match m {
            DetMethod::ATP => bounds[0] = err(r.value) / scale,
            DetMethod::ALUPPE => bounds[1] = err(r.value) / scale,
            _ => {}
        }
    }
    DetSample { rel, atp_bound: bounds[0], aluppe_bound: bounds[1] }
}

/// Relative determinant errors of every method on `n` seeded slivers.
pub fn det_bench(n: usize, seed: u64, h_long: f64, h_short: f64) -> Result<DetBench> {
    if n == 0 {
        return Err(param("--n must be positive"));
    }
    let tris = random_sliver_triangles(n, seed, h_long, h_short)?;
    let samples: Vec<DetSample> = tris.par_iter().map(det_sample).collect();
    let stats = DetMethod::ALL
        .iter()
        .enumerate()
        .map(|(i, &method)| {
            let errs = samples.iter().map(|s| s.rel[i]);
            let sum: CompensatedSum = errs.clone().collect();
            MethodStats {
                method,
                mean: sum.value() / n as f64,
                min: errs.clone().fold(f64::INFINITY, f64::min),
                max: errs.fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(DetBench {
        samples: n,
        stats,
        worst_atp_bound: samples.iter().map(|s| s.atp_bound).fold(0.0, f64::max),
        worst_aluppe_bound: samples.iter().map(|s| s.aluppe_bound).fold(0.0, f64::max),
    })
}

// ----------------------------------------------------------- area stability

/// Random tangent frame at a random point: `(center, t1, t2)`.
fn random_frame(seed: u64, index: u64) -> (Vec3, Vec3, Vec3) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let twist: f64 = rng.gen_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    let c = Vec3::new(s * phi.cos(), s * phi.sin(), z);
    let helper = if c.x.abs() < 0.9 { Vec3::E1 } else { Vec3::E2 };
    let e1 = helper - c.scale(helper.dot(c));
    let e1 = e1.scale(1.0 / e1.norm());
    let e2 = c.cross(e1);
    let (st, ct) = twist.sin_cos();
    (c, e1.scale(ct) + e2.scale(st), e2.scale(ct) - e1.scale(st))
}

/// Lifts tangent-plane points at `frame` to the unit sphere.
fn lift(frame: (Vec3, Vec3, Vec3), uv: [(f64, f64); 3]) -> Result<SphericalTriangle> {
    let (c, t1, t2) = frame;
    let p = uv.map(|(u, v)| c + t1.scale(u) + t2.scale(v));
    SphericalTriangle::new_normalized(p[0], p[1], p[2], 1.0)
}

/// Equilateral spherical triangle with chord `h` centered in `frame`.
pub fn equilateral(frame: (Vec3, Vec3, Vec3), h: f64) -> Result<SphericalTriangle> {
    if !(h > 0.0 && h < 3f64.sqrt()) {
        return Err(param(format!("equilateral chord {h} outside (0, √3)")));
    }
    let rho = h / (3.0 - h * h).sqrt();
    let at = |deg: f64| {
        let a = deg.to_radians();
        (rho * a.cos(), rho * a.sin())
    };
    lift(frame, [at(90.0), at(210.0), at(330.0)])
}

/// Flat isosceles triangle with base `h` and two base angles `theta`,
/// centered at its centroid, lifted to the sphere.
pub fn isosceles(frame: (Vec3, Vec3, Vec3), h: f64, theta: f64) -> Result<SphericalTriangle> {
    if !(theta > 0.0 && theta < PI / 2.0) {
        return Err(param(format!("base angle {theta} outside (0, π/2)")));
    }
    let apex = 0.5 * h * theta.tan();
    let cy = apex / 3.0;
    lift(frame, [(-0.5 * h, -cy), (0.5 * h, -cy), (0.0, apex - cy)])
}

/// Relative area errors of one triangle against the oracle, in the order
/// L'Huilier, degree-4, degree-8, adaptive.
pub fn area_errors(tri: &SphericalTriangle) -> Result<[f64; 4]> {
    let oracle = area_oracle(tri)?;
    let one = |_: Vec3| 1.0;
    Ok([
        rel_err(area_lhuilier(tri).area, oracle),
        rel_err(integrate_fixed(tri, &one, get_rule(4)?)?.value, oracle),
        rel_err(integrate_fixed(tri, &one, get_rule(8)?)?.value, oracle),
        rel_err(area_spherical(tri, &AdaptiveConfig::default()), oracle),
    ])
}

/// Mean and maximum of [`area_errors`] over `samples` random placements.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorSummary {
    pub mean: [f64; 4],
    pub max: [f64; 4],
}

fn summarize<F>(samples: usize, seed: u64, make: F) -> Result<ErrorSummary>
where
    F: Fn((Vec3, Vec3, Vec3)) -> Result<SphericalTriangle> + Sync,
{
    if samples == 0 {
        return Err(param("at least one rotation is required"));
    }
    let errs: Vec<[f64; 4]> = (0..samples as u64)
        .into_par_iter()
        .map(|i| area_errors(&make(random_frame(seed, i))?))
        .collect::<Result<_>>()?;
    let mut mean = [0.0; 4];
    let mut max = [0.0f64; 4];
    for e in &errs {
        for k in 0..4 {
            mean[k] += e[k] / samples as f64;
            max[k] = max[k].max(e[k]);
        }
    }
    Ok(ErrorSummary { mean, max })
}

pub fn equilateral_errors(h: f64, rotations: usize, seed: u64) -> Result<ErrorSummary> {
    summarize(rotations, seed, |f| equilateral(f, h))
}

pub fn isosceles_errors(h: f64, theta: f64, rotations: usize, seed: u64) -> Result<ErrorSummary> {
    summarize(rotations, seed, |f| isosceles(f, h, theta))
}

pub fn edge_sweep(h_min: f64, h_max: f64, points: usize, rotations: usize, seed: u64) -> Result<Vec<(f64, ErrorSummary)>> {
    if !(h_min > 0.0 && h_min <= h_max && h_max < 3f64.sqrt()) || points == 0 {
        return Err(param("edge sweep needs 0 < h-min ≤ h-max < √3 and at least one point"));
    }
    log_space(h_min, h_max, points).into_iter().map(|h| Ok((h, equilateral_errors(h, rotations, seed)?))).collect()
}

pub fn angle_sweep(
    h: f64,
    theta_min: f64,
    theta_max: f64,
    points: usize,
    rotations: usize,
    seed: u64,
) -> Result<Vec<(f64, ErrorSummary)>> {
    if !(theta_min > 0.0 && theta_min <= theta_max && theta_max < PI / 2.0) || points == 0 || !(h > 0.0 && h < 1.0) {
        return Err(param("angle sweep needs 0 < theta-min ≤ theta-max < π/2, 0 < h < 1 and at least one point"));
    }
    log_space(theta_min, theta_max, points)
        .into_iter()
        .map(|t| Ok((t, isosceles_errors(h, t, rotations, seed)?)))
        .collect()
}

// ------------------------------------------------------------- mesh helpers

/// Composite integral over a mesh, triangles integrated in parallel and
/// summed in index order (bit-identical to the sequential driver).
pub fn par_mesh_integrate<F>(mesh: &TriangleMesh, f: &F, method: Method) -> Result<IntegrationResult>
where
    F: Fn(Vec3) -> f64 + Sync,
{
    let per: Vec<IntegrationResult> = (0..mesh.len())
        .into_par_iter()
        .map(|i| {
            let tri = mesh.triangle(i);
            match method {
                Method::Fixed(d) => integrate_fixed(&tri, f, get_rule(d)?),
                Method::Adaptive(cfg) => integrate_adaptive(&tri, f, &cfg),
            }
        })
        .collect::<Result<_>>()?;
    let mut out = IntegrationResult { value: 0.0, points_used: 0, max_depth_reached: 0, depth_capped: false };
    let mut sum = CompensatedSum::new();
    for r in &per {
        sum.add(r.value);
        out.points_used += r.points_used;
        out.max_depth_reached = out.max_depth_reached.max(r.max_depth_reached);
        out.depth_capped |= r.depth_capped;
    }
    out.value = sum.value();
    Ok(out)
}

/// `Σ weight · f(point)` over precomputed nodes, compensated, in node order.
pub fn par_node_sum<F>(nodes: &[QuadNode], f: &F) -> f64
where
    F: Fn(Vec3) -> f64 + Sync,
{
    const CHUNK: usize = 4096;
    let partial: Vec<CompensatedSum> = nodes
        .par_chunks(CHUNK)
        .map(|c| c.iter().map(|n| n.weight * f(n.point)).collect())
        .collect();
    // Chunk boundaries are fixed, so the result does not depend on the thread count.
    let mut total = CompensatedSum::new();
    for p in partial {
        total.add(p.value());
    }
    total.value()
}

// ----------------------------------------------------------------- converge

#[derive(Clone, Debug)]
pub struct ConvergeRow {
    pub label: String,
    pub n_triangles: usize,
    pub h: f64,
    pub err_deg4: f64,
    pub err_deg8: f64,
    pub err_adaptive: f64,
    pub value_adaptive: f64,
}

pub fn converge_mesh<F>(label: String, mesh: &TriangleMesh, f: &F, exact: f64) -> Result<ConvergeRow>
where
    F: Fn(Vec3) -> f64 + Sync,
{
    let err = |m| -> Result<f64> { Ok(rel_err(par_mesh_integrate(mesh, f, m)?.value, exact)) };
    let adaptive = par_mesh_integrate(mesh, f, Method::Adaptive(AdaptiveConfig::default()))?.value;
    Ok(ConvergeRow {
        label,
        n_triangles: mesh.len(),
        h: mesh.max_chord() / mesh.radius(),
        err_deg4: err(Method::Fixed(4))?,
        err_deg8: err(Method::Fixed(8))?,
        err_adaptive: rel_err(adaptive, exact),
        value_adaptive: adaptive,
    })
}

pub fn converge_levels<F>(levels: &[u32], f: &F, exact: f64) -> Result<Vec<ConvergeRow>>
where
    F: Fn(Vec3) -> f64 + Sync,
{
    levels.iter().map(|&l| converge_mesh(l.to_string(), &icosphere(l, 1.0)?, f, exact)).collect()
}

// ------------------------------------------------------------------ poisson

/// Level-2 icosphere with its first face split 4 extra levels (256 pieces):
/// a nonuniform, non-watertight mesh with hanging vertices.
pub fn nonuniform_mesh() -> Result<TriangleMesh> {
    icosphere(2, 1.0)?.refine_triangle(0, 4)
}

/// `E(s)`: mean relative error of adaptive integration over `trials` random
/// Poisson test functions, for each `s`.
pub fn poisson_errors(mesh: &TriangleMesh, s_values: &[f64], trials: u64, seed: u64) -> Result<Vec<(f64, f64)>> {
    use crate::testfns::{poisson_exact, poisson_f, PoissonTestCase};
    if trials == 0 {
        return Err(param("--trials must be positive"));
    }
    if (mesh.radius() - 1.0).abs() > 1e-12 {
        return Err(param("the Poisson test needs a unit-sphere mesh"));
    }
    let nodes = quadrature_nodes(mesh, Method::Adaptive(AdaptiveConfig::default()))?;
    s_values
        .iter()
        .map(|&s| {
            let exact = poisson_exact(s);
            let mut total = 0.0;
            for q in 0..trials {
                let case = PoissonTestCase::random(seed, q, s)?;
                let approx = par_node_sum(&nodes, &|x| poisson_f(&case, x));
                total += rel_err(approx, exact);
            }
            Ok((s, total / trials as f64))
        })
        .collect()
}

// ---------------------------------------------------------------- scattered

/// Integration row `b` over the mesh vertices, WLS rows built in parallel
/// and folded into `b` in quadrature-point order.
pub fn par_integration_row(mesh: &TriangleMesh, degree: usize, method: Method) -> Result<IntegrationRow> {
    const CHUNK: usize = 1024;
    const WINDOW: usize = 64 * CHUNK;
    let nodes = quadrature_nodes(mesh, method)?;
    let builder = WlsBuilder::new(mesh.vertices(), degree)?;
    let mut b = vec![0.0; mesh.vertices().len()];
    for (w, window) in nodes.chunks(WINDOW).enumerate() {
        let parts: Vec<Vec<(u32, f64)>> = window
            .par_chunks(CHUNK)
            .enumerate()
            .map_init(Workspace::default, |ws, (c, chunk)| {
                let mut out = Vec::with_capacity(chunk.len() * 2 * arpist_core::wls::basis_len(degree));
                for (i, n) in chunk.iter().enumerate() {
                    let index = w * WINDOW + c * CHUNK + i;
                    out.extend(builder.row(n.point, index, ws)?.into_iter().map(|(j, v)| (j, n.weight * v)));
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        for (j, v) in parts.into_iter().flatten() {
            b[j as usize] += v;
        }
    }
    Ok(IntegrationRow { coefficients: b })
}

#[derive(Clone, Debug)]
pub struct ScatteredRow {
    pub label: String,
    pub n_nodes: usize,
    pub degree: usize,
    pub err_f1: f64,
    pub err_const: f64,
}

pub fn scattered_mesh(label: &str, mesh: &TriangleMesh, degrees: &[usize], quadrature: Method) -> Result<Vec<ScatteredRow>> {
    use crate::testfns::{f1, F1_EXACT};
    let r = mesh.radius();
    let f1_values: Vec<f64> = mesh.vertices().iter().map(|v| f1(v.scale(1.0 / r))).collect();
    let ones = vec![1.0; mesh.vertices().len()];
    let area = 4.0 * PI * r * r;
    degrees
        .iter()
        .map(|&d| {
            let b = par_integration_row(mesh, d, quadrature)?;
            Ok(ScatteredRow {
                label: label.to_owned(),
                n_nodes: mesh.vertices().len(),
                degree: d,
                err_f1: rel_err(b.dot(&f1_values), F1_EXACT * r * r),
                err_const: rel_err(b.dot(&ones), area),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_space_endpoints() {
        let v = log_space(1e-3, 1.0, 4);
        assert_eq!(v.len(), 4);
        assert_eq!((v[0], v[3]), (1e-3, 1.0));
        assert!((v[1] - 1e-2).abs() < 1e-15);
        assert!((log_log_slope(&[1.0, 2.0, 4.0], &[1.0, 4.0, 16.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn shapes_have_requested_size() {
        let f = random_frame(1, 0);
        let t = equilateral(f, 0.1).unwrap();
        let (a, b, c) = arpist_core::chord_edges(&t);
        for e in [a, b, c] {
            assert!((e - 0.1).abs() < 1e-15);
        }
        let t = isosceles(f, 0.26, PI / 3.0).unwrap();
        let (a, b, c) = arpist_core::chord_edges(&t);
        assert!((a - b).abs() < 1e-3 && (b - c).abs() < 1e-3);
        assert!(isosceles(f, 0.26, 0.0).is_err());
    }

    #[test]
    fn parallel_drivers_match_sequential() {
        let mesh = icosphere(2, 1.0).unwrap();
        let f = crate::testfns::f1;
        for m in [Method::Fixed(4), Method::Adaptive(AdaptiveConfig::default())] {
            let seq = arpist_core::mesh_integrate(&mesh, &f, m).unwrap();
            assert_eq!(par_mesh_integrate(&mesh, &f, m).unwrap(), seq);
        }
        let row = par_integration_row(&mesh, 4, Method::Fixed(4)).unwrap();
        assert_eq!(row, arpist_core::wls::integration_row(&mesh, 4, Method::Fixed(4)).unwrap());
    }
}
