//! Classical area formulas: L'Huilier's theorem (the fragile baseline) and an
//! extended-precision spherical-excess oracle.

use crate::dd::{dd_det_reference, DdVec3};
use crate::geom::edge_angles;
use crate::{Error, Result, SphericalTriangle};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LhuilierArea {
    pub area: f64,
    /// The radicand came out negative through rounding and was set to zero.
    pub clamped: bool,
}

/// Area `R² E` with the spherical excess from L'Huilier's theorem,
/// `E = 4 atan √(tan(s/2) tan((s−a1)/2) tan((s−a2)/2) tan((s−a3)/2))`,
/// evaluated as written in working precision.
pub fn area_lhuilier(tri: &SphericalTriangle) -> LhuilierArea {
    let (a1, a2, a3) = edge_angles(tri);
    let s = (a1 + a2 + a3) / 2.0;
    let radicand = libm::tan(s / 2.0)
        * libm::tan((s - a1) / 2.0)
        * libm::tan((s - a2) / 2.0)
        * libm::tan((s - a3) / 2.0);
    let clamped = radicand < 0.0;
    let e = 4.0 * libm::atan(libm::sqrt(radicand.max(0.0)));
    let r = tri.radius();
    LhuilierArea { area: r * r * e, clamped }
}

/// Reference area from `tan(E/2) = det[u1,u2,u3] / (1 + u1·u2 + u2·u3 + u3·u1)`.
///
/// The vertices are not renormalized (that would move the triangle); with
/// `n_i = ‖v_i‖` the same ratio is `det[v] / (n1n2n3 + n3 v1·v2 + n1 v2·v3 + n2 v3·v1)`.
/// Numerator and denominator are accumulated in double-double and only the
/// final `atan2` runs in working precision.
pub fn area_oracle(tri: &SphericalTriangle) -> Result<f64> {
    let [v1, v2, v3] = tri.vertices().map(DdVec3::from_vec3);
    let delta = dd_det_reference(tri);
    let (n1, n2, n3) = (v1.norm(), v2.norm(), v3.norm());
    let sigma = n1 * n2 * n3 + n3 * v1.dot(v2) + n1 * v2.dot(v3) + n2 * v3.dot(v1);
    let (d, s) = (delta.to_f64(), sigma.to_f64());
    if d == 0.0 && s <= 0.0 {
        return Err(Error::DegenerateTriangle);
    }
    let r = tri.radius();
    Ok(r * r * 2.0 * libm::atan2(d, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{radial_project, Vec3};
    use core::f64::consts::FRAC_PI_2;

    fn octant() -> SphericalTriangle {
        SphericalTriangle::new(Vec3::E1, Vec3::E2, Vec3::E3, 1.0).unwrap()
    }

    /// Equilateral triangle with chord `h` centered on `(1,1,1)/√3`.
    fn equilateral(h: f64) -> SphericalTriangle {
        let n = Vec3::new(1.0, 1.0, 1.0).scale(1.0 / libm::sqrt(3.0));
        let (t1, t2) = crate::detstab::tangent_frame(n);
        // Circumradius ρ of the spherical-chord triangle: chord h = √3 ρ / ‖(ρ,1)‖.
        let rho = h / libm::sqrt(3.0 - h * h);
        let v = |k: f64| {
            let a = core::f64::consts::TAU * k / 3.0;
            radial_project(n + t1.scale(rho * libm::cos(a)) + t2.scale(rho * libm::sin(a)), 1.0).unwrap()
        };
        SphericalTriangle::new(v(0.0), v(1.0), v(2.0), 1.0).unwrap()
    }

    #[test]
    fn octant_values() {
        let lt = area_lhuilier(&octant());
        assert!(((lt.area - FRAC_PI_2) / FRAC_PI_2).abs() < 1e-15);
        assert!(!lt.clamped);
        let o = area_oracle(&octant()).unwrap();
        assert!((o.to_bits() as i64 - FRAC_PI_2.to_bits() as i64).abs() <= 2);
    }

    #[test]
    fn equilateral_chords_are_as_requested() {
        for h in [1.0, 0.1, 1e-3] {
            let t = equilateral(h);
            let (a, b, c) = crate::chord_edges(&t);
            for x in [a, b, c] {
                assert!(((x - h) / h).abs() < 1e-12, "{h} {x}");
            }
        }
    }

    #[test]
    fn oracle_flat_limit() {
        let h = 1e-4;
        let e = area_oracle(&equilateral(h)).unwrap();
        let flat = libm::sqrt(3.0) / 4.0 * h * h;
        assert!(((e - flat) / flat).abs() < 1e-8, "{:e}", (e - flat) / flat);
    }

    #[test]
    fn oracle_and_lhuilier_agree_for_large_triangles() {
        let t = equilateral(1.0);
        let o = area_oracle(&t).unwrap();
        let lt = area_lhuilier(&t).area;
        assert!(((o - lt) / o).abs() < 1e-13);
    }

    #[test]
    fn oracle_is_invariant_under_relabeling() {
        let t = equilateral(0.3);
        let base = area_oracle(&t).unwrap();
        for s in 1..3 {
            let x = area_oracle(&t.rotated(s)).unwrap();
            assert!((x.to_bits() as i64 - base.to_bits() as i64).abs() <= 2);
        }
    }

    #[test]
    fn oracle_octants_tile_the_sphere() {
        // Eight octants of a rotated orthogonal frame.
        let c = libm::cos(0.7);
        let s = libm::sin(0.7);
        let ex = Vec3::new(c, s, 0.0);
        let ey = Vec3::new(-s * 0.6, c * 0.6, 0.8);
        let ez = ex.cross(ey);
        let mut total = crate::CompensatedSum::new();
        for sx in [1.0, -1.0] {
            for sy in [1.0, -1.0] {
                for sz in [1.0, -1.0] {
                    let (a, b, cc) = (ex.scale(sx), ey.scale(sy), ez.scale(sz));
                    let t = if sx * sy * sz > 0.0 {
                        SphericalTriangle::new_normalized(a, b, cc, 1.0)
                    } else {
                        SphericalTriangle::new_normalized(a, cc, b, 1.0)
                    }
                    .unwrap();
                    total.add(area_oracle(&t).unwrap());
                }
            }
        }
        let four_pi = 4.0 * core::f64::consts::PI;
        assert!(((total.value() - four_pi) / four_pi).abs() < 1e-13);
    }
}
