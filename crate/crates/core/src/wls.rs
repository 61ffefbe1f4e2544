//! Weighted-least-squares transfer from scattered nodal samples to
//! quadrature points, and the resulting integration row `b = Σ_i A_iᵀ w_i`.
//!
//! For each quadrature point `q` the `k = 2·dim P_d` nearest nodes form a
//! stencil. Their offsets from `q` are projected onto the tangent plane at
//! `q` and a bivariate polynomial of degree `d` is fitted with weights
//! `(1 − ρ/ρ_max)²`, `ρ` the chord distance and `ρ_max` 1.1 times the
//! stencil radius. The fit is solved by Householder QR with column pivoting;
//! the constant coefficient of the fit, a linear functional of the samples,
//! is the operator row for `q`. A stencil that is rank deficient, or whose
//! row has `Σ|c|` above [`LEBESGUE_MAX`], is retried once with `2k` nodes.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::detstab::tangent_frame;
use crate::geom::COINCIDENT_TOL;
use crate::knn::KdTree;
use crate::mesh::{quadrature_nodes, Method, QuadNode};
use crate::{CompensatedSum, Error, Result, TriangleMesh, Vec3};

/// Highest polynomial degree accepted for the reconstruction.
pub const MAX_WLS_DEGREE: usize = 8;

/// Relative threshold on `|R_ii| / |R_00|` below which a column is treated as
/// linearly dependent.
const RANK_TOL: f64 = 1e-12;
/// A full-rank fit whose row has Σ|c| above this is treated as numerically
/// deficient: its coefficients sum to 1 only to about ε·Σ|c|. Quasi-uniform
/// stencils stay below 3.
const LEBESGUE_MAX: f64 = 1e2;

/// `dim P_d = (d+1)(d+2)/2`.
pub const fn basis_len(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Sparse operator from nodal values to quadrature-point values, one row of
/// `(node, coefficient)` pairs per quadrature point.
#[derive(Clone, Debug, PartialEq)]
pub struct WlsOperator {
    pub rows: Vec<Vec<(u32, f64)>>,
    pub degree: usize,
    pub n_nodes: usize,
}

impl WlsOperator {
    /// Reconstructed values at the quadrature points.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, c)| c * values[j as usize]).collect::<CompensatedSum>().value())
            .collect()
    }

    pub fn stencil_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(Vec::len)
    }
}

/// Dense integration row over the nodes: `∫ f ≈ Σ_j b_j f_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationRow {
    pub coefficients: Vec<f64>,
}

impl IntegrationRow {
    /// `b = Σ_i weight_i · row_i`, accumulated in row order.
    pub fn assemble(n_nodes: usize, rows: &[Vec<(u32, f64)>], weights: &[f64]) -> Self {
        let mut coefficients = vec![0.0; n_nodes];
        for (row, &w) in rows.iter().zip(weights) {
            for &(j, c) in row {
                coefficients[j as usize] += w * c;
            }
        }
        Self { coefficients }
    }

    pub fn dot(&self, values: &[f64]) -> f64 {
        self.coefficients.iter().zip(values).map(|(b, f)| b * f).collect::<CompensatedSum>().value()
    }
}

/// Scratch space reused across rows.
#[derive(Default, Debug)]
pub struct Workspace {
    neighbors: Vec<(u32, f64)>,
    weights: Vec<f64>,
    a: Vec<f64>,
    rdiag: Vec<f64>,
    betas: Vec<f64>,
    perm: Vec<usize>,
    norms: Vec<f64>,
    rhs: Vec<f64>,
    y: Vec<f64>,
    pu: Vec<f64>,
    pv: Vec<f64>,
}

/// Per-point WLS row construction over a fixed node set.
#[derive(Clone, Debug)]
pub struct WlsBuilder {
    tree: KdTree,
    radius: f64,
    degree: usize,
}

impl WlsBuilder {
    pub fn new(nodes: &[Vec3], degree: usize) -> Result<Self> {
        if degree > MAX_WLS_DEGREE {
            return Err(Error::InvalidParameter(format!(
                "WLS degree {degree} exceeds the maximum of {MAX_WLS_DEGREE}"
            )));
        }
        if nodes.len() < basis_len(degree) {
            return Err(Error::InvalidParameter(format!(
                "{} nodes cannot support a degree-{degree} fit ({} coefficients)",
                nodes.len(),
                basis_len(degree)
            )));
        }
        let radius = nodes[0].norm();
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGeometry("nodes must lie on a sphere of positive radius"));
        }
        Ok(Self { tree: KdTree::new(nodes), radius, degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_nodes(&self) -> usize {
        self.tree.len()
    }

    /// Operator row for quadrature point `q`; `index` only labels errors.
    pub fn row(&self, q: Vec3, index: usize, ws: &mut Workspace) -> Result<Vec<(u32, f64)>> {
        let m = basis_len(self.degree);
        let n = self.tree.len();
        let k = (2 * m).min(n);
        self.tree.nearest(q, k, &mut ws.neighbors);

        let tol = COINCIDENT_TOL * self.radius;
        if ws.neighbors[0].1 <= tol * tol {
            return Ok(vec![(ws.neighbors[0].0, 1.0)]);
        }
        let first = match self.fit(q, ws)? {
            Some(row) if lebesgue(&row) <= LEBESGUE_MAX => return Ok(row),
            first => first,
        };
        let k2 = (2 * k).min(n);
        if k2 > k {
            self.tree.nearest(q, k2, &mut ws.neighbors);
            if let Some(row) = self.fit(q, ws)? {
                return Ok(row);
            }
        }
        first.ok_or(Error::RankDeficient { point: index })
    }

    /// Fits over `ws.neighbors`; `None` when the design matrix is rank deficient.
    fn fit(&self, q: Vec3, ws: &mut Workspace) -> Result<Option<Vec<(u32, f64)>>> {
        let d = self.degree;
        let m = basis_len(d);
        let k = ws.neighbors.len();
        if k < m {
            return Ok(None);
        }
        let normal = q.scale(1.0 / q.norm());
        let (t1, t2) = tangent_frame(normal);
        let rho_far = libm::sqrt(ws.neighbors[k - 1].1);
        let rho_max = 1.1 * rho_far;

        ws.weights.clear();
        ws.a.clear();
        ws.a.resize(k * m, 0.0);
        ws.pu.resize(d + 1, 0.0);
        ws.pv.resize(d + 1, 0.0);
        for (j, &(idx, d2)) in ws.neighbors.iter().enumerate() {
            let x = self.tree.point(idx as usize) - q;
            let t = 1.0 - libm::sqrt(d2) / rho_max;
            let w = t * t;
            ws.weights.push(w);
            let (u, v) = (x.dot(t1) / rho_far, x.dot(t2) / rho_far);
            ws.pu[0] = 1.0;
            ws.pv[0] = 1.0;
            for e in 1..=d {
                ws.pu[e] = ws.pu[e - 1] * u;
                ws.pv[e] = ws.pv[e - 1] * v;
            }
            let mut c = 0;
            for total in 0..=d {
                for a in (0..=total).rev() {
                    ws.a[c * k + j] = w * ws.pu[a] * ws.pv[total - a];
                    c += 1;
                }
            }
        }

        if !householder_qrcp(&mut ws.a, k, m, &mut ws.rdiag, &mut ws.betas, &mut ws.perm, &mut ws.norms) {
            return Ok(None);
        }
        // y solves Aᵀ y = e_0 with minimum norm (column 0 is the constant).
        ws.rhs.clear();
        ws.rhs.resize(m, 0.0);
        ws.rhs[0] = 1.0;
        min_norm_solve(&ws.a, k, m, &ws.rdiag, &ws.betas, &ws.perm, &ws.rhs, &mut ws.y);
        let row = ws
            .neighbors
            .iter()
            .zip(ws.weights.iter().zip(&ws.y))
            .map(|(&(idx, _), (&w, &y))| (idx, w * y))
            .collect();
        Ok(Some(row))
    }
}

fn lebesgue(row: &[(u32, f64)]) -> f64 {
    row.iter().map(|&(_, c)| c.abs()).sum()
}

/// Minimum-norm solution `y` of `Aᵀ y = rhs` from the factorization left by
/// [`householder_qrcp`]: `Rᵀ z = Pᵀ rhs`, then `y = Q [z; 0]`.
#[allow(clippy::too_many_arguments)]
fn min_norm_solve(
    a: &[f64],
    k: usize,
    m: usize,
    rdiag: &[f64],
    betas: &[f64],
    perm: &[usize],
    rhs: &[f64],
    y: &mut Vec<f64>,
) {
    y.clear();
    y.resize(k, 0.0);
    for i in 0..m {
        let mut s = rhs[perm[i]];
        for l in 0..i {
            s -= a[i * k + l] * y[l];
        }
        y[i] = s / rdiag[i];
    }
    // Q = H_0 H_1 … H_{m-1}
    for i in (0..m).rev() {
        let col = &a[i * k..(i + 1) * k];
        let mut s = 0.0;
        for r in i..k {
            s += col[r] * y[r];
        }
        s *= betas[i];
        for r in i..k {
            y[r] -= s * col[r];
        }
    }
}

/// In-place Householder QR with column pivoting of the column-major `k × m`
/// matrix `a`. On return the strict upper triangle of `R` is in `a` (row `i`,
/// column `c` at `a[c*k + i]`), its diagonal in `rdiag`, reflector `i` in
/// `a[i*k + i..]` with coefficient `betas[i]`, and column `i` of the pivoted
/// matrix is original column `perm[i]`. Returns false if numerically rank
/// deficient.
fn householder_qrcp(
    a: &mut [f64],
    k: usize,
    m: usize,
    rdiag: &mut Vec<f64>,
    betas: &mut Vec<f64>,
    perm: &mut Vec<usize>,
    norms: &mut Vec<f64>,
) -> bool {
    rdiag.clear();
    betas.clear();
    perm.clear();
    perm.extend(0..m);
    norms.clear();
    norms.extend((0..m).map(|c| a[c * k..(c + 1) * k].iter().map(|x| x * x).sum::<f64>()));

    let mut r00 = 0.0;
    for i in 0..m {
        // Pivot on the largest remaining column norm.
        let mut p = i;
        for c in i + 1..m {
            if norms[c] > norms[p] {
                p = c;
            }
        }
        if p != i {
            for r in 0..k {
                a.swap(i * k + r, p * k + r);
            }
            perm.swap(i, p);
            norms.swap(i, p);
        }

        let col = &mut a[i * k..(i + 1) * k];
        let sigma = libm::sqrt(col[i..].iter().map(|x| x * x).sum::<f64>());
        if i == 0 {
            r00 = sigma;
        }
        if !(sigma > RANK_TOL * r00) || r00 == 0.0 {
            return false;
        }
        let alpha = if col[i] > 0.0 { -sigma } else { sigma };
        col[i] -= alpha;
        let vtv: f64 = col[i..].iter().map(|x| x * x).sum();
        let beta = 2.0 / vtv;
        rdiag.push(alpha);
        betas.push(beta);

        let (head, tail) = a.split_at_mut((i + 1) * k);
        let v = &head[i * k + i..(i + 1) * k];
        for c in 0..m - i - 1 {
            let target = &mut tail[c * k + i..(c + 1) * k];
            let s: f64 = v.iter().zip(target.iter()).map(|(x, y)| x * y).sum::<f64>() * beta;
            for (t, x) in target.iter_mut().zip(v) {
                *t -= s * x;
            }
            // Remaining norm below row i.
            norms[i + 1 + c] = target[1..].iter().map(|x| x * x).sum();
        }
    }
    true
}

/// Builds the WLS operator mapping values at `nodes` to `quad_points`.
pub fn build_wls_operator(nodes: &[Vec3], quad_points: &[Vec3], degree: usize) -> Result<WlsOperator> {
    let builder = WlsBuilder::new(nodes, degree)?;
    let mut ws = Workspace::default();
    let rows = quad_points
        .iter()
        .enumerate()
        .map(|(i, &q)| builder.row(q, i, &mut ws))
        .collect::<Result<Vec<_>>>()?;
    Ok(WlsOperator { rows, degree, n_nodes: nodes.len() })
}

/// Integration row for data sampled at the mesh vertices. Rows are folded
/// into `b` as they are built, so the full operator is never stored.
pub fn integration_row(mesh: &TriangleMesh, degree: usize, method: Method) -> Result<IntegrationRow> {
    let nodes: Vec<QuadNode> = quadrature_nodes(mesh, method)?;
    let builder = WlsBuilder::new(mesh.vertices(), degree)?;
    let mut ws = Workspace::default();
    let mut coefficients = vec![0.0; mesh.vertices().len()];
    for (i, node) in nodes.iter().enumerate() {
        for (j, c) in builder.row(node.point, i, &mut ws)? {
            coefficients[j as usize] += node.weight * c;
        }
    }
    Ok(IntegrationRow { coefficients })
}

/// `bᵀ f` for values sampled at the mesh vertices.
pub fn integrate_scattered(mesh: &TriangleMesh, nodal_values: &[f64], degree: usize, method: Method) -> Result<f64> {
    if nodal_values.len() != mesh.vertices().len() {
        return Err(Error::InvalidParameter(format!(
            "{} nodal values for {} mesh vertices",
            nodal_values.len(),
            mesh.vertices().len()
        )));
    }
    Ok(integration_row(mesh, degree, method)?.dot(nodal_values))
}
