//! Spherical triangulations and composite integration over them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::arpist::{classify, Cell, Leaf};
use crate::detstab::det_atp;
use crate::geom::{map_ref_vertices, radial_project, ON_SPHERE_TOL};
use crate::quadrules::{get_rule, QuadratureRule};
use crate::{
    integrate_adaptive, integrate_fixed, subdivide4, AdaptiveConfig, CompensatedSum, Error,
    IntegrationResult, Result, SphericalTriangle, Vec3,
};

/// Largest icosphere level accepted (20·4^10 ≈ 2·10^7 triangles).
pub const MAX_ICOSPHERE_LEVEL: u32 = 10;

/// An oriented spherical triangulation.
///
/// Every vertex lies on the sphere, every triangle is counterclockwise seen
/// from outside, and indices are in range. `watertight` records whether each
/// undirected edge is used exactly twice, once in each direction.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    radius: f64,
    watertight: bool,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGeometry("radius must be finite and positive"));
        }
        for (i, v) in vertices.iter().enumerate() {
            let dev = (v.norm() - radius).abs() / radius;
            if !(dev <= ON_SPHERE_TOL) {
                return Err(Error::NotOnSphere { vertex: i, deviation: dev });
            }
        }
        for (t, tri) in triangles.iter().enumerate() {
            let [a, b, c] = *tri;
            if let Some(&bad) = tri.iter().find(|&&i| i as usize >= vertices.len()) {
                return Err(Error::InvalidMesh {
                    triangle: t,
                    reason: format!("vertex index {bad} out of range ({} vertices)", vertices.len()),
                });
            }
            if a == b || b == c || c == a {
                return Err(Error::InvalidMesh { triangle: t, reason: "repeated vertex index".into() });
            }
            let v = [vertices[a as usize], vertices[b as usize], vertices[c as usize]];
            SphericalTriangle::new(v[0], v[1], v[2], radius).map_err(|e| Error::InvalidMesh {
                triangle: t,
                reason: match e {
                    Error::NotCounterclockwise { .. } => String::from("clockwise or flat orientation"),
                    other => format!("{other}"),
                },
            })?;
        }
        let watertight = Self::edge_balance(&triangles).is_empty();
        Ok(Self { vertices, triangles, radius, watertight })
    }

    /// Undirected edges whose directed uses do not cancel pairwise.
    fn edge_balance(triangles: &[[u32; 3]]) -> Vec<(u32, u32)> {
        let mut uses: BTreeMap<(u32, u32), (u32, u32)> = BTreeMap::new();
        for t in triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let e = uses.entry((a.min(b), a.max(b))).or_default();
                if a < b {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        uses.into_iter()
            .filter(|(_, (fwd, back))| !(*fwd == 1 && *back == 1))
            .map(|(k, _)| k)
            .collect()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_watertight(&self) -> bool {
        self.watertight
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, i: usize) -> SphericalTriangle {
        let [a, b, c] = self.triangles[i];
        SphericalTriangle::new_unchecked(
            [self.vertices[a as usize], self.vertices[b as usize], self.vertices[c as usize]],
            self.radius,
        )
    }

    pub fn spherical_triangles(&self) -> impl Iterator<Item = SphericalTriangle> + '_ {
        (0..self.len()).map(|i| self.triangle(i))
    }

    /// Longest chord over all triangles.
    pub fn max_chord(&self) -> f64 {
        self.spherical_triangles().map(|t| t.longest_chord()).fold(0.0, f64::max)
    }

    /// Replaces triangle `index` by its `levels`-fold 4-way subdivision.
    ///
    /// Neighbouring triangles are left alone, so the result has hanging
    /// vertices and is no longer watertight, but it still partitions the
    /// same region of the sphere.
    pub fn refine_triangle(&self, index: usize, levels: u32) -> Result<Self> {
        if index >= self.len() {
            return Err(Error::InvalidParameter(format!("no triangle {index}")));
        }
        let mut pieces = alloc::vec![self.triangle(index)];
        for _ in 0..levels {
            pieces = pieces.iter().flat_map(subdivide4).collect();
        }
        let mut vertices = self.vertices.clone();
        let mut lookup: BTreeMap<[u64; 3], u32> = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            lookup.insert(v.to_array().map(f64::to_bits), i as u32);
        }
        let mut triangles: Vec<[u32; 3]> = Vec::with_capacity(self.len() + pieces.len());
        triangles.extend(self.triangles.iter().enumerate().filter(|(i, _)| *i != index).map(|(_, t)| *t));
        for piece in &pieces {
            let idx = piece.vertices().map(|v| {
                *lookup.entry(v.to_array().map(f64::to_bits)).or_insert_with(|| {
                    vertices.push(v);
                    (vertices.len() - 1) as u32
                })
            });
            triangles.push(idx);
        }
        let watertight = Self::edge_balance(&triangles).is_empty();
        Ok(Self { vertices, triangles, radius: self.radius, watertight })
    }
}

/// Regular icosahedron, radially projected and split 4-way `level` times.
/// Shared edge midpoints are created once, so the mesh is watertight.
pub fn icosphere(level: u32, r: f64) -> Result<TriangleMesh> {
    if level > MAX_ICOSPHERE_LEVEL {
        return Err(Error::InvalidParameter(format!(
            "icosphere level {level} exceeds the maximum of {MAX_ICOSPHERE_LEVEL}"
        )));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidGeometry("radius must be finite and positive"));
    }
    let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let mut vertices: Vec<Vec3> = raw
        .iter()
        .map(|&(x, y, z)| radial_project(Vec3::new(x, y, z), r).expect("nonzero"))
        .collect();
    let mut triangles: Vec<[u32; 3]> = alloc::vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoints: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        let mut mid = |a: u32, b: u32, vertices: &mut Vec<Vec3>| -> u32 {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let m = (vertices[a as usize] + vertices[b as usize]).scale(0.5);
                vertices.push(radial_project(m, r).expect("icosphere edges are short"));
                (vertices.len() - 1) as u32
            })
        };
        for &[a, b, c] in &triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        triangles = next;
    }
    TriangleMesh::new(vertices, triangles, r)
}

/// Per-triangle integration scheme for composite rules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Fixed(usize),
    Adaptive(AdaptiveConfig),
}

/// Sum of per-triangle integrals in triangle order.
pub fn mesh_integrate<F>(mesh: &TriangleMesh, f: &F, method: Method) -> Result<IntegrationResult>
where
    F: Fn(Vec3) -> f64 + ?Sized,
{
    let rule = match method {
        Method::Fixed(d) => Some(get_rule(d)?),
        Method::Adaptive(_) => None,
    };
    let mut sum = CompensatedSum::new();
    let mut out = IntegrationResult { value: 0.0, points_used: 0, max_depth_reached: 0, depth_capped: false };
    for tri in mesh.spherical_triangles() {
        let r = match (method, rule) {
            (Method::Adaptive(cfg), _) => integrate_adaptive(&tri, f, &cfg)?,
            (Method::Fixed(_), Some(rule)) => integrate_fixed(&tri, f, rule)?,
            (Method::Fixed(_), None) => unreachable!(),
        };
        sum.add(r.value);
        out.points_used += r.points_used;
        out.max_depth_reached = out.max_depth_reached.max(r.max_depth_reached);
        out.depth_capped |= r.depth_capped;
    }
    out.value = sum.value();
    Ok(out)
}

/// A quadrature point on the sphere with its effective weight
/// `w_i r² det / ‖x_i‖³`, so that `Σ weight · f(point)` is the integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadNode {
    pub point: Vec3,
    pub weight: f64,
    /// Index of the mesh triangle the point belongs to.
    pub triangle: u32,
}

fn push_nodes(v: &[Vec3; 3], det: f64, r: f64, rule: &QuadratureRule, owner: u32, out: &mut Vec<QuadNode>) {
    let scale = r * r * det;
    for (xi, w) in rule.iter() {
        let x = map_ref_vertices(v, xi);
        let n = x.norm();
        out.push(QuadNode { point: x.scale(r / n), weight: w * scale / (n * n * n), triangle: owner });
    }
}

fn adaptive_nodes(cell: &Cell, cfg: &AdaptiveConfig, depth: u32, owner: u32, out: &mut Vec<QuadNode>) {
    match classify(cell, cfg, depth) {
        Leaf::Rule(rule, _) => push_nodes(cell.vertices(), cell.det(), cell.radius(), rule, owner, out),
        Leaf::Split => {
            for child in cell.split() {
                adaptive_nodes(&child, cfg, depth + 1, owner, out);
            }
        }
    }
}

/// Every quadrature point the composite rule would evaluate, in evaluation order.
pub fn quadrature_nodes(mesh: &TriangleMesh, method: Method) -> Result<Vec<QuadNode>> {
    let mut out = Vec::new();
    match method {
        Method::Fixed(d) => {
            let rule = get_rule(d)?;
            out.reserve(mesh.len() * rule.len());
            for (i, tri) in mesh.spherical_triangles().enumerate() {
                push_nodes(tri.vertices(), det_atp(&tri).value, tri.radius(), rule, i as u32, &mut out);
            }
        }
        Method::Adaptive(cfg) => {
            for (i, tri) in mesh.spherical_triangles().enumerate() {
                adaptive_nodes(&Cell::new(&tri), &cfg, 0, i as u32, &mut out);
            }
        }
    }
    Ok(out)
}
