//! Cartesian geometry of spherical triangles.

use crate::dd::{DdVec3, DoubleDouble};
use crate::detstab::anchored_triple_product;
use crate::{Error, Result, Vec3};

/// Relative distance from the sphere accepted for a vertex.
pub const ON_SPHERE_TOL: f64 = 1e-12;
/// Relative chord length below which two vertices are treated as coincident.
pub const COINCIDENT_TOL: f64 = 1e-14;

/// Natural coordinates on the reference triangle `{ξ ≥ 0, η ≥ 0, ξ + η ≤ 1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefPoint {
    pub xi: f64,
    pub eta: f64,
}

impl RefPoint {
    pub const fn new(xi: f64, eta: f64) -> Self {
        Self { xi, eta }
    }

    pub fn is_valid(&self) -> bool {
        self.xi >= 0.0 && self.eta >= 0.0 && self.xi + self.eta <= 1.0
    }

    /// Barycentric weights of `v1, v2, v3`.
    #[inline]
    pub fn barycentric(&self) -> [f64; 3] {
        [1.0 - self.xi - self.eta, self.xi, self.eta]
    }
}

/// Three counterclockwise vertices on a sphere of the given radius.
///
/// Construction checks that every vertex lies on the sphere (relative
/// tolerance [`ON_SPHERE_TOL`]), that no two vertices coincide, and that the
/// anchored determinant `det[v1, v2, v3]` is positive. A clockwise triangle is
/// rejected rather than silently reoriented.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalTriangle {
    v: [Vec3; 3],
    radius: f64,
}

impl SphericalTriangle {
    pub fn new(v1: Vec3, v2: Vec3, v3: Vec3, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGeometry("radius must be finite and positive"));
        }
        let v = [v1, v2, v3];
        for (i, p) in v.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidGeometry("vertex coordinates must be finite"));
            }
            let deviation = (p.norm() - radius).abs() / radius;
            if deviation > ON_SPHERE_TOL {
                return Err(Error::NotOnSphere { vertex: i, deviation });
            }
        }
        Self::checked(v, radius)
    }

    /// Like [`SphericalTriangle::new`], but first projects each vertex onto the
    /// sphere. Useful for meshes written with a few digits of precision.
    pub fn new_normalized(v1: Vec3, v2: Vec3, v3: Vec3, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGeometry("radius must be finite and positive"));
        }
        let v = [
            radial_project(v1, radius)?,
            radial_project(v2, radius)?,
            radial_project(v3, radius)?,
        ];
        Self::checked(v, radius)
    }

    /// Triangle on the sphere through `v1` (radius taken from `‖v1‖`).
    pub fn from_vertices(v1: Vec3, v2: Vec3, v3: Vec3) -> Result<Self> {
        Self::new(v1, v2, v3, v1.norm())
    }

    fn checked(v: [Vec3; 3], radius: f64) -> Result<Self> {
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            if v[i].distance(v[j]) <= COINCIDENT_TOL * radius {
                return Err(Error::CoincidentVertices {
                    first: i.min(j),
                    second: i.max(j),
                });
            }
        }
        let det = anchored_triple_product(&v).0;
        if !(det > 0.0) {
            return Err(Error::NotCounterclockwise { det });
        }
        Ok(Self { v, radius })
    }

    /// Skips validation; callers guarantee the invariants (subdivision children).
    pub(crate) fn new_unchecked(v: [Vec3; 3], radius: f64) -> Self {
        Self { v, radius }
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec3; 3] {
        &self.v
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> Vec3 {
        self.v[i]
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Same triangle with the vertex labels rotated by `shift` positions.
    pub fn rotated(&self, shift: usize) -> Self {
        let s = shift % 3;
        Self {
            v: [self.v[s], self.v[(s + 1) % 3], self.v[(s + 2) % 3]],
            radius: self.radius,
        }
    }

    /// Longest chord, the `h` of the error estimates and adaptive thresholds.
    pub fn longest_chord(&self) -> f64 {
        let (a, b, c) = chord_edges(self);
        a.max(b).max(c)
    }
}

/// Point of the flat triangle at natural coordinates `p`.
#[inline]
pub fn map_ref(tri: &SphericalTriangle, p: RefPoint) -> Vec3 {
    map_ref_vertices(&tri.v, p)
}

#[inline]
pub(crate) fn map_ref_vertices(v: &[Vec3; 3], p: RefPoint) -> Vec3 {
    let [w1, w2, w3] = p.barycentric();
    let [a, b, c] = *v;
    Vec3::new(
        w1 * a.x + w2 * b.x + w3 * c.x,
        w1 * a.y + w2 * b.y + w3 * c.y,
        w1 * a.z + w2 * b.z + w3 * c.z,
    )
}

/// Radial projection `r x / ‖x‖` onto the sphere of radius `r`.
#[inline]
pub fn radial_project(x: Vec3, r: f64) -> Result<Vec3> {
    // Norm, scale factor and products are carried in double-double so each
    // component is rounded once; re-projection is then a near no-op.
    let d = DdVec3::from_vec3(x);
    let n = d.dot(d).sqrt();
    if !(n.hi > 0.0) || !n.hi.is_finite() {
        return Err(Error::ZeroVector);
    }
    let q1 = r / n.hi;
    let rem = DoubleDouble::from_f64(r) - n * DoubleDouble::from_f64(q1);
    let s = DoubleDouble::new(q1, rem.to_f64() / n.hi);
    let c = |v: f64| (DoubleDouble::from_f64(v) * s).to_f64();
    Ok(Vec3::new(c(x.x), c(x.y), c(x.z)))
}

/// Euclidean edge lengths `(‖v1−v2‖, ‖v2−v3‖, ‖v3−v1‖)`.
pub fn chord_edges(tri: &SphericalTriangle) -> (f64, f64, f64) {
    let [a, b, c] = tri.v;
    (a.distance(b), b.distance(c), c.distance(a))
}

/// Central angle between two nonzero vectors, well conditioned near 0 and π.
#[inline]
pub fn central_angle(u: Vec3, v: Vec3) -> f64 {
    libm::atan2(u.cross(v).norm(), u.dot(v))
}

/// Edge angles on the unit sphere, `a_k` opposite vertex `k`.
pub fn edge_angles(tri: &SphericalTriangle) -> (f64, f64, f64) {
    let [a, b, c] = tri.v;
    (central_angle(b, c), central_angle(c, a), central_angle(a, b))
}

/// Great-circle side lengths `(a1, a2, a3)`, `a_k` opposite vertex `k`.
pub fn geodesic_edges(tri: &SphericalTriangle) -> (f64, f64, f64) {
    let r = tri.radius;
    let (a1, a2, a3) = edge_angles(tri);
    (r * a1, r * a2, r * a3)
}

/// True iff `det[v1, v2, v3] > 0` evaluated with the anchored triple product.
pub fn orientation_positive(v1: Vec3, v2: Vec3, v3: Vec3) -> bool {
    anchored_triple_product(&[v1, v2, v3]).0 > 0.0
}
