//! Radially projected quadrature on spherical triangles, fixed-degree and
//! size-adaptive.

use crate::dd::DdVec3;
use crate::detstab::{det_atp, select_anchor_vertices, triple_product_naive};
use crate::geom::{map_ref_vertices, radial_project};
use crate::quadrules::{get_rule, QuadratureRule};
use crate::{CompensatedSum, Error, Result, SphericalTriangle, Vec3};

/// Thresholds for [`integrate_adaptive`], relative to the sphere radius.
///
/// A triangle whose longest chord is at most `h1·r` gets the degree-4 rule,
/// up to `h2·r` the degree-8 rule, and anything larger is split in four.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveConfig {
    h1: f64,
    h2: f64,
    max_depth: u32,
}

impl AdaptiveConfig {
    pub fn new(h1: f64, h2: f64, max_depth: u32) -> Result<Self> {
        if !(h1 > 0.0 && h1 <= h2 && h2.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "adaptive thresholds need 0 < h1 <= h2, got h1={h1}, h2={h2}"
            )));
        }
        if max_depth < 1 {
            return Err(Error::InvalidParameter("max_depth must be at least 1".into()));
        }
        Ok(Self { h1, h2, max_depth })
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn h2(&self) -> f64 {
        self.h2
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self { h1: 0.004, h2: 0.05, max_depth: 30 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub points_used: usize,
    pub max_depth_reached: u32,
    /// Some branch hit `max_depth` and was integrated with the degree-8 rule
    /// although it was still larger than `h2`.
    pub depth_capped: bool,
}

/// Integrates `f` over `tri` with one application of `rule`:
/// `r² det[x1, x2, x3] Σ_i w_i f(p_i) / ‖x_i‖³`, where `x_i` is the flat
/// quadrature point and `p_i` its radial projection.
pub fn integrate_fixed<F>(tri: &SphericalTriangle, f: &F, rule: &QuadratureRule) -> Result<IntegrationResult>
where
    F: Fn(Vec3) -> f64 + ?Sized,
{
    let value = rule_sum(tri.vertices(), det_atp(tri).value, tri.radius(), rule, f)?;
    Ok(IntegrationResult { value, points_used: rule.len(), max_depth_reached: 0, depth_capped: false })
}

fn rule_sum<F>(v: &[Vec3; 3], det: f64, r: f64, rule: &QuadratureRule, f: &F) -> Result<f64>
where
    F: Fn(Vec3) -> f64 + ?Sized,
{
    let mut t = CompensatedSum::new();
    for (xi, w) in rule.iter() {
        let x = map_ref_vertices(v, xi);
        let nx = x.norm();
        let p = radial_project(x, r)?;
        let value = f(p);
        if !value.is_finite() {
            return Err(Error::NonFiniteIntegrand { point: p, value });
        }
        t.add(w * value / (nx * nx * nx));
    }
    Ok(t.value() * (r * r) * det)
}

/// A triangle of the adaptive recursion. Vertices are kept in double-double
/// so that projected midpoints lie on the parent's great circles to about
/// `ε²`; with rounded midpoints the children miss the parent by `O(ε h)` in
/// area, which dominates the error on thin triangles.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Cell {
    v: [DdVec3; 3],
    rounded: [Vec3; 3],
    r: f64,
}

impl Cell {
    pub(crate) fn new(tri: &SphericalTriangle) -> Self {
        let rounded = *tri.vertices();
        Self { v: rounded.map(DdVec3::from_vec3), rounded, r: tri.radius() }
    }

    fn from_dd(v: [DdVec3; 3], r: f64) -> Self {
        Self { v, rounded: v.map(DdVec3::to_vec3), r }
    }

    pub(crate) fn vertices(&self) -> &[Vec3; 3] {
        &self.rounded
    }

    pub(crate) fn radius(&self) -> f64 {
        self.r
    }

    pub(crate) fn triangle(&self) -> SphericalTriangle {
        SphericalTriangle::new_unchecked(self.rounded, self.r)
    }

    /// Anchored triple product whose edge columns are rounded from the
    /// double-double differences.
    pub(crate) fn det(&self) -> f64 {
        let k = select_anchor_vertices(&self.rounded);
        let a = self.v[k];
        let e1 = self.v[(k + 1) % 3].sub(a).to_vec3();
        let e2 = self.v[(k + 2) % 3].sub(a).to_vec3();
        triple_product_naive(a.to_vec3(), e1, e2)
    }

    fn relative_size(&self) -> f64 {
        let [a, b, c] = self.rounded;
        a.distance(b).max(b.distance(c)).max(c.distance(a)) / self.r
    }

    pub(crate) fn split(&self) -> [Cell; 4] {
        let [a, b, c] = self.v;
        let mid = |u: DdVec3, w: DdVec3| u.add(w).project(self.r);
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        [
            Cell::from_dd([a, ab, ca], self.r),
            Cell::from_dd([ab, b, bc], self.r),
            Cell::from_dd([ca, bc, c], self.r),
            Cell::from_dd([ab, bc, ca], self.r),
        ]
    }
}

/// Splits a spherical triangle at the projected chord midpoints into three
/// corner children and one center child, all counterclockwise. The four
/// spherical children partition the parent up to the rounding of the
/// midpoints.
pub fn subdivide4(tri: &SphericalTriangle) -> [SphericalTriangle; 4] {
    Cell::new(tri).split().map(|c| c.triangle())
}

/// What the adaptive scheme does with one triangle.
pub(crate) enum Leaf {
    Rule(&'static QuadratureRule, bool),
    Split,
}

pub(crate) fn classify(cell: &Cell, cfg: &AdaptiveConfig, depth: u32) -> Leaf {
    let h = cell.relative_size();
    if h <= cfg.h1 {
        Leaf::Rule(get_rule(4).expect("degree 4 is tabulated"), false)
    } else if h <= cfg.h2 {
        Leaf::Rule(get_rule(8).expect("degree 8 is tabulated"), false)
    } else if depth >= cfg.max_depth {
        Leaf::Rule(get_rule(8).expect("degree 8 is tabulated"), true)
    } else {
        Leaf::Split
    }
}

/// Size-driven adaptive integration; children are summed in a fixed order
/// with compensated summation, so results are reproducible bit for bit.
pub fn integrate_adaptive<F>(tri: &SphericalTriangle, f: &F, cfg: &AdaptiveConfig) -> Result<IntegrationResult>
where
    F: Fn(Vec3) -> f64 + ?Sized,
{
    adaptive_at(&Cell::new(tri), f, cfg, 0)
}

fn adaptive_at<F>(cell: &Cell, f: &F, cfg: &AdaptiveConfig, depth: u32) -> Result<IntegrationResult>
where
    F: Fn(Vec3) -> f64 + ?Sized,
{
    match classify(cell, cfg, depth) {
        Leaf::Rule(rule, capped) => Ok(IntegrationResult {
            value: rule_sum(cell.vertices(), cell.det(), cell.r, rule, f)?,
            points_used: rule.len(),
            max_depth_reached: depth,
            depth_capped: capped,
        }),
        Leaf::Split => {
            let mut sum = CompensatedSum::new();
            let mut out = IntegrationResult {
                value: 0.0,
                points_used: 0,
                max_depth_reached: depth,
                depth_capped: false,
            };
            for child in cell.split() {
                let r = adaptive_at(&child, f, cfg, depth + 1)?;
                sum.add(r.value);
                out.points_used += r.points_used;
                out.max_depth_reached = out.max_depth_reached.max(r.max_depth_reached);
                out.depth_capped |= r.depth_capped;
            }
            out.value = sum.value();
            Ok(out)
        }
    }
}

/// Area of a spherical triangle, the adaptive integral of 1.
pub fn area_spherical(tri: &SphericalTriangle, cfg: &AdaptiveConfig) -> f64 {
    integrate_adaptive(tri, &|_| 1.0, cfg)
        .expect("the constant integrand is finite")
        .value
}
