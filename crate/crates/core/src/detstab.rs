//! Determinants of `[x1, x2, x3]` for spherical triangles.
//!
//! The plain triple product and plain LU with partial pivoting lose most of
//! their digits once the vertices are nearly parallel, which is the normal
//! case for small triangles. Anchoring at the vertex opposite the longest
//! edge and differencing the other two against it,
//! `det[x_k, x_{k+1} − x_k, x_{k+2} − x_k]`, keeps the computation well
//! conditioned (`σ` is maximized); see [`det_atp`] and [`det_aluppe`].

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::radial_project;
use crate::{Error, Result, SphericalTriangle, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DetMethod {
    NaiveTP,
    PlainLUPP,
    ATP,
    ALUPPE,
    OffAnchoredTP,
}

impl DetMethod {
    pub const ALL: [DetMethod; 5] = [
        DetMethod::NaiveTP,
        DetMethod::PlainLUPP,
        DetMethod::ATP,
        DetMethod::ALUPPE,
        DetMethod::OffAnchoredTP,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetMethod::NaiveTP => "naive_tp",
            DetMethod::PlainLUPP => "plain_lupp",
            DetMethod::ATP => "atp",
            DetMethod::ALUPPE => "aluppe",
            DetMethod::OffAnchoredTP => "off_anchored_tp",
        }
    }

    pub fn is_anchored(self) -> bool {
        matches!(self, DetMethod::ATP | DetMethod::ALUPPE | DetMethod::OffAnchoredTP)
    }
}

/// A computed determinant and how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetReport {
    pub value: f64,
    pub method: DetMethod,
    /// 0-based anchor vertex; `Some` exactly for the anchored methods.
    pub anchor: Option<usize>,
    /// Set when LU hit an exactly zero pivot.
    pub degenerate: bool,
}

impl DetReport {
    /// Evaluates `method` on `tri`.
    pub fn compute(tri: &SphericalTriangle, method: DetMethod) -> Self {
        match method {
            DetMethod::NaiveTP => {
                let [a, b, c] = *tri.vertices();
                Self::plain(triple_product_naive(a, b, c), method)
            }
            DetMethod::PlainLUPP => {
                let [a, b, c] = *tri.vertices();
                let (value, degenerate) = lupp_det([a, b, c]);
                Self { value, method, anchor: None, degenerate }
            }
            DetMethod::ATP => det_atp(tri),
            DetMethod::ALUPPE => det_aluppe(tri),
            DetMethod::OffAnchoredTP => det_off_anchored(tri),
        }
    }

    fn plain(value: f64, method: DetMethod) -> Self {
        Self { value, method, anchor: None, degenerate: false }
    }
}

/// `a · (b × c)` expanded along `a`, evaluated left to right:
/// `a1(b2c3 − b3c2) + a2(b3c1 − b1c3) + a3(b1c2 − b2c1)`.
#[inline]
pub fn triple_product_naive(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    a.x * (b.y * c.z - b.z * c.y) + a.y * (b.z * c.x - b.x * c.z) + a.z * (b.x * c.y - b.y * c.x)
}

pub(crate) fn select_anchor_vertices(v: &[Vec3; 3]) -> usize {
    let l01 = v[0].distance(v[1]);
    let l12 = v[1].distance(v[2]);
    let l20 = v[2].distance(v[0]);
    let sums = [l01 + l20, l01 + l12, l12 + l20];
    let mut k = 0;
    for i in 1..3 {
        if sums[i] < sums[k] {
            k = i;
        }
    }
    k
}

/// Anchor vertex (0-based): the one incident on the two shorter edges, i.e.
/// minimizing the sum of its two incident chords. Ties go to the lower index.
pub fn select_anchor(tri: &SphericalTriangle) -> usize {
    select_anchor_vertices(tri.vertices())
}

/// The anchored columns `[x_k, x_{k+1} − x_k, x_{k+2} − x_k]`.
#[inline]
pub(crate) fn anchored_columns(v: &[Vec3; 3], k: usize) -> [Vec3; 3] {
    let a = v[k];
    [a, v[(k + 1) % 3] - a, v[(k + 2) % 3] - a]
}

/// Anchored triple product of arbitrary vertices, with the anchor used.
#[inline]
pub(crate) fn anchored_triple_product(v: &[Vec3; 3]) -> (f64, usize) {
    let k = select_anchor_vertices(v);
    let [a, b, c] = anchored_columns(v, k);
    (triple_product_naive(a, b, c), k)
}

/// Anchored triple product (ATP).
pub fn det_atp(tri: &SphericalTriangle) -> DetReport {
    let (value, k) = anchored_triple_product(tri.vertices());
    DetReport { value, method: DetMethod::ATP, anchor: Some(k), degenerate: false }
}

/// Triple product anchored at the vertex after the proper anchor, as a
/// deliberately worse-conditioned comparison.
pub fn det_off_anchored(tri: &SphericalTriangle) -> DetReport {
    let k = (select_anchor(tri) + 1) % 3;
    let [a, b, c] = anchored_columns(tri.vertices(), k);
    DetReport {
        value: triple_product_naive(a, b, c),
        method: DetMethod::OffAnchoredTP,
        anchor: Some(k),
        degenerate: false,
    }
}

/// `Π u_ii` with the permutation sign, from 3×3 LU with partial pivoting of
/// the matrix whose columns are `cols`. The flag reports a zero pivot.
fn lupp_det(cols: [Vec3; 3]) -> (f64, bool) {
    // m[i][j]: row i, column j.
    let mut m = [[0.0f64; 3]; 3];
    for (j, c) in cols.iter().enumerate() {
        m[0][j] = c.x;
        m[1][j] = c.y;
        m[2][j] = c.z;
    }
    let mut sign = 1.0;
    let mut det = 1.0;
    for j in 0..3 {
        let mut p = j;
        for i in j + 1..3 {
            if m[i][j].abs() > m[p][j].abs() {
                p = i;
            }
        }
        if m[p][j] == 0.0 {
            return (0.0, true);
        }
        if p != j {
            m.swap(p, j);
            sign = -sign;
        }
        let pivot = m[j][j];
        for i in j + 1..3 {
            let l = m[i][j] / pivot;
            for c in j + 1..3 {
                m[i][c] -= l * m[j][c];
            }
        }
        det *= pivot;
    }
    (sign * det, false)
}

/// LUPP determinant of `[v1, v2, v3]`, without anchoring or equilibration.
pub fn det_lupp_plain(v1: Vec3, v2: Vec3, v3: Vec3) -> f64 {
    lupp_det([v1, v2, v3]).0
}

/// Anchored LUPP with column equilibration (ALUPPE).
///
/// The anchored columns are scaled to unit length, factored with partial
/// pivoting, and the determinant is reassembled as `sign(P) Π d_i u_ii`,
/// where `d_i` are the column norms. The cyclic anchor shift is an even
/// permutation, so it does not change the sign.
pub fn det_aluppe(tri: &SphericalTriangle) -> DetReport {
    let k = select_anchor(tri);
    let cols = anchored_columns(tri.vertices(), k);
    let d = cols.map(Vec3::norm);
    let scaled = [cols[0].scale(1.0 / d[0]), cols[1].scale(1.0 / d[1]), cols[2].scale(1.0 / d[2])];
    let (u, degenerate) = lupp_det(scaled);
    let value = if degenerate { 0.0 } else { d[0] * d[1] * d[2] * u };
    DetReport { value, method: DetMethod::ALUPPE, anchor: Some(k), degenerate }
}

/// Orthonormal `(t1, t2)` with `(t1, t2, n)` right-handed, for unit `n`.
pub(crate) fn tangent_frame(n: Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() < 0.9 { Vec3::E1 } else { Vec3::E2 };
    let t1 = helper - n.scale(helper.dot(n));
    let t1 = t1.scale(1.0 / t1.norm());
    (t1, n.cross(t1))
}

fn uniform_on_sphere(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
    let s = libm::sqrt(1.0 - z * z);
    Vec3::new(s * libm::cos(phi), s * libm::sin(phi), z)
}

fn sliver(rng: &mut ChaCha8Rng, h_long: f64, h_short: f64) -> Option<SphericalTriangle> {
    let center = uniform_on_sphere(rng);
    let (t1, t2) = tangent_frame(center);
    let long = h_long * rng.gen_range(0.8..1.25);
    let short = h_short * rng.gen_range(0.8..1.25);
    // Direction of the short edge, kept away from the long edge's line so the
    // third edge stays close to `long` and the shape is a true sliver.
    let psi: f64 = rng.gen_range(core::f64::consts::FRAC_PI_6..5.0 * core::f64::consts::FRAC_PI_6);
    let rot: f64 = rng.gen_range(0.0..core::f64::consts::TAU);

    // Counterclockwise in the (t1, t2) plane, which faces outward.
    let local = [
        (0.0, 0.0),
        (long, 0.0),
        (long + short * libm::cos(psi), short * libm::sin(psi)),
    ];
    let cx = (local[0].0 + local[1].0 + local[2].0) / 3.0;
    let cy = (local[0].1 + local[1].1 + local[2].1) / 3.0;
    let (sr, cr) = (libm::sin(rot), libm::cos(rot));
    let lift = |(x, y): (f64, f64)| {
        let (x, y) = (x - cx, y - cy);
        let (u, v) = (cr * x - sr * y, sr * x + cr * y);
        radial_project(center + t1.scale(u) + t2.scale(v), 1.0)
    };
    let tri = SphericalTriangle::new(
        lift(local[0]).ok()?,
        lift(local[1]).ok()?,
        lift(local[2]).ok()?,
        1.0,
    )
    .ok()?;

    let (a, b, c) = crate::chord_edges(&tri);
    let (lo, hi) = (a.min(b).min(c), a.max(b).max(c));
    let in_band = |x: f64, h: f64| x >= 0.5 * h && x <= 2.0 * h;
    (in_band(hi, h_long) && in_band(lo, h_short)).then_some(tri)
}

/// `n` random slivers on the unit sphere with longest chord within a factor
/// two of `h_long` and shortest within a factor two of `h_short`.
///
/// Sample `i` is drawn from its own ChaCha stream of `seed`, so any index
/// range can be generated independently and the list is reproducible.
pub fn random_sliver_triangles(
    n: usize,
    seed: u64,
    h_long: f64,
    h_short: f64,
) -> Result<Vec<SphericalTriangle>> {
    if !(h_short > 0.0 && h_short <= h_long && h_long <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "sliver edge scales need 0 < h_short <= h_long <= 0.5, got h_long={h_long}, h_short={h_short}"
        )));
    }
    if h_short < 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "h_short={h_short} is too small to be resolved in double precision"
        )));
    }
    (0..n).map(|i| sliver_at(seed, i as u64, h_long, h_short)).collect()
}

fn sliver_at(seed: u64, index: u64, h_long: f64, h_short: f64) -> Result<SphericalTriangle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    for _ in 0..64 {
        if let Some(t) = sliver(&mut rng, h_long, h_short) {
            return Ok(t);
        }
    }
    Err(Error::InvalidParameter(format!(
        "could not build a sliver with h_long={h_long}, h_short={h_short}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn octant() -> SphericalTriangle {
        SphericalTriangle::new(Vec3::E1, Vec3::E2, Vec3::E3, 1.0).unwrap()
    }

    fn thin() -> SphericalTriangle {
        let v2 = radial_project(Vec3::new(1.0, 0.01, 0.0), 1.0).unwrap();
        let v3 = radial_project(Vec3::new(1.0, 0.0, 0.01), 1.0).unwrap();
        SphericalTriangle::new(Vec3::E1, v2, v3, 1.0).unwrap()
    }

    #[test]
    fn naive_triple_product_examples() {
        assert_eq!(triple_product_naive(Vec3::E1, Vec3::E2, Vec3::E3), 1.0);
        let v = |x, y, z| Vec3::new(x, y, z);
        assert_eq!(triple_product_naive(v(1.0, 0.0, 0.0), v(1.0, 1.0, 0.0), v(1.0, 1.0, 1.0)), 1.0);
        assert_eq!(triple_product_naive(v(1.0, 2.0, 3.0), v(2.0, 4.0, 6.0), v(0.0, 1.0, 0.0)), 0.0);
    }

    #[test]
    fn anchor_selection() {
        assert_eq!(select_anchor(&octant()), 0);
        let t = thin();
        let (l12, l23, l31) = crate::chord_edges(&t);
        assert!(l12 + l31 < l12 + l23 && l12 + l31 < l23 + l31);
        assert_eq!(select_anchor(&t), 0);
        // (v3, v1, v2): the former v1 is now the second vertex.
        assert_eq!(select_anchor(&t.rotated(2)), 1);
        assert_eq!(select_anchor(&t.rotated(1)), 2);
    }

    #[test]
    fn octant_determinants() {
        let t = octant();
        assert_eq!(det_atp(&t).value, 1.0);
        assert_eq!(det_atp(&t).anchor, Some(0));
        assert_eq!(det_aluppe(&t).value, 1.0);
        let s = SphericalTriangle::new(Vec3::E1.scale(2.0), Vec3::E2.scale(2.0), Vec3::E3.scale(2.0), 2.0)
            .unwrap();
        assert_eq!(det_aluppe(&s).value, 8.0);
        assert_eq!(det_lupp_plain(Vec3::E1, Vec3::E2, Vec3::E3), 1.0);
        assert_eq!(det_lupp_plain(Vec3::E2, Vec3::E1, Vec3::E3), -1.0);
    }

    #[test]
    fn singular_lupp_is_flagged() {
        let (v, flag) = lupp_det([Vec3::E1, Vec3::E1.scale(2.0), Vec3::E2]);
        assert_eq!((v, flag), (0.0, true));
    }

    #[test]
    fn report_anchor_only_for_anchored_methods() {
        let t = thin();
        for m in DetMethod::ALL {
            let r = DetReport::compute(&t, m);
            assert_eq!(r.anchor.is_some(), m.is_anchored(), "{m:?}");
            assert!(r.value > 0.0);
        }
        assert_eq!(det_off_anchored(&t).anchor, Some(1));
    }

    #[test]
    fn anchored_values_invariant_under_relabeling() {
        let t = thin();
        let base = det_atp(&t).value;
        let ulp = base * f64::EPSILON;
        for s in 1..3 {
            assert!((det_atp(&t.rotated(s)).value - base).abs() <= 2.0 * ulp);
            assert!((det_aluppe(&t.rotated(s)).value - det_aluppe(&t).value).abs() <= 2.0 * ulp);
        }
    }

    #[test]
    fn sliver_generator_contract() {
        let tris = random_sliver_triangles(1000, 42, 0.01, 1e-4).unwrap();
        assert_eq!(tris.len(), 1000);
        for t in &tris {
            let (a, b, c) = crate::chord_edges(t);
            let (lo, hi) = (a.min(b).min(c), a.max(b).max(c));
            assert!((0.005..=0.02).contains(&hi), "{hi}");
            assert!((5e-5..=2e-4).contains(&lo), "{lo}");
            assert!(det_atp(t).value > 0.0);
        }
        assert!(random_sliver_triangles(0, 42, 0.01, 1e-4).unwrap().is_empty());
        assert_eq!(tris, random_sliver_triangles(1000, 42, 0.01, 1e-4).unwrap());
        assert_eq!(&tris[500..510], &random_sliver_triangles(510, 42, 0.01, 1e-4).unwrap()[500..]);
        assert!(random_sliver_triangles(3, 1, 1e-4, 0.01).is_err());
        assert!(random_sliver_triangles(3, 1, 0.01, 0.0).is_err());
    }
}
