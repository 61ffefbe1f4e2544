//! Double-double arithmetic: a value is the unevaluated sum `hi + lo` of two
//! `f64`s with `|lo| ≤ ½ ulp(hi)`, giving roughly 32 significant digits.
//!
//! Only `+`, `−`, `×` and a square root are provided. That is all the
//! determinant and area oracles need.

use core::ops::{Add, Mul, Neg, Sub};

use crate::detstab::select_anchor;
use crate::{SphericalTriangle, Vec3};

/// `(fl(a + b), err)` with `fl(a + b) + err == a + b` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// [`two_sum`] for `|a| ≥ |b|`.
#[inline]
pub fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    // 2^27 + 1
    const SPLITTER: f64 = 134_217_729.0;
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// `(fl(a · b), err)` with `fl(a · b) + err == a · b` exactly, by Dekker's
/// splitting. Exact barring overflow or underflow.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

/// [`two_prod`] through a fused multiply-add.
#[inline]
pub fn two_prod_fma(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };

    /// Renormalizes an arbitrary pair.
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Self { hi, lo }
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Self { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Square root, one Newton correction on top of the `f64` root.
    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(libm::sqrt(self.hi));
        }
        let s = libm::sqrt(self.hi);
        let residual = self - Self::from_prod(s, s);
        let (hi, lo) = quick_two_sum(s, residual.to_f64() / (2.0 * s));
        Self { hi, lo }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

/// Double-double addition (the accurate variant; both parts go through `two_sum`).
#[inline]
pub fn dd_add(x: DoubleDouble, y: DoubleDouble) -> DoubleDouble {
    let (s, e) = two_sum(x.hi, y.hi);
    let (t, f) = two_sum(x.lo, y.lo);
    let (s, e) = quick_two_sum(s, e + t);
    let (hi, lo) = quick_two_sum(s, e + f);
    DoubleDouble { hi, lo }
}

#[inline]
pub fn dd_sub(x: DoubleDouble, y: DoubleDouble) -> DoubleDouble {
    dd_add(x, -y)
}

#[inline]
pub fn dd_mul(x: DoubleDouble, y: DoubleDouble) -> DoubleDouble {
    let (p, e) = two_prod(x.hi, y.hi);
    let e = e + (x.hi * y.lo + x.lo * y.hi) + x.lo * y.lo;
    let (hi, lo) = quick_two_sum(p, e);
    DoubleDouble { hi, lo }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        dd_add(self, o)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        dd_sub(self, o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        dd_mul(self, o)
    }
}

/// Double-double division: one correction step on the `f64` quotient.
pub fn dd_div(x: DoubleDouble, y: DoubleDouble) -> DoubleDouble {
    let q1 = x.hi / y.hi;
    let r = x - y * DoubleDouble::from_f64(q1);
    let q2 = r.hi / y.hi;
    let r = r - y * DoubleDouble::from_f64(q2);
    let q3 = r.hi / y.hi;
    let (hi, lo) = quick_two_sum(q1, q2);
    DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
}

/// A vector with double-double components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdVec3(pub [DoubleDouble; 3]);

impl DdVec3 {
    pub fn from_vec3(v: Vec3) -> Self {
        Self([v.x.into(), v.y.into(), v.z.into()])
    }

    /// `a − b`, exact.
    pub fn diff(a: Vec3, b: Vec3) -> Self {
        Self([
            DoubleDouble::from_sum(a.x, -b.x),
            DoubleDouble::from_sum(a.y, -b.y),
            DoubleDouble::from_sum(a.z, -b.z),
        ])
    }

    pub fn add(self, o: Self) -> Self {
        let [a, b, c] = self.0;
        let [d, e, f] = o.0;
        Self([a + d, b + e, c + f])
    }

    pub fn sub(self, o: Self) -> Self {
        let [a, b, c] = self.0;
        let [d, e, f] = o.0;
        Self([a - d, b - e, c - f])
    }

    /// Rounded to working precision.
    pub fn to_vec3(self) -> Vec3 {
        let [a, b, c] = self.0;
        Vec3::new(a.to_f64(), b.to_f64(), c.to_f64())
    }

    /// `r · self / ‖self‖`, to double-double accuracy.
    pub fn project(self, r: f64) -> Self {
        self.scale(dd_div(DoubleDouble::from_f64(r), self.norm()))
    }

    pub fn scale(self, s: DoubleDouble) -> Self {
        let [a, b, c] = self.0;
        Self([a * s, b * s, c * s])
    }

    pub fn dot(self, o: Self) -> DoubleDouble {
        let [a, b, c] = self.0;
        let [d, e, f] = o.0;
        a * d + b * e + c * f
    }

    pub fn norm(self) -> DoubleDouble {
        self.dot(self).sqrt()
    }
}

/// `a · (b × c)` with every operation in double-double, same expression
/// order as the working-precision triple product.
pub fn dd_triple_product(a: DdVec3, b: DdVec3, c: DdVec3) -> DoubleDouble {
    let [a1, a2, a3] = a.0;
    let [b1, b2, b3] = b.0;
    let [c1, c2, c3] = c.0;
    a1 * (b2 * c3 - b3 * c2) + a2 * (b3 * c1 - b1 * c3) + a3 * (b1 * c2 - b2 * c1)
}

/// Reference value of `det[v1, v2, v3]`: the anchored triple product with the
/// edge differences formed exactly and every product and sum in double-double.
pub fn dd_det_reference(tri: &SphericalTriangle) -> DoubleDouble {
    let k = select_anchor(tri);
    let v = tri.vertices();
    let (a, b, c) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
    dd_triple_product(DdVec3::from_vec3(a), DdVec3::diff(b, a), DdVec3::diff(c, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = crate::UNIT_ROUNDOFF;

    #[test]
    fn two_sum_examples() {
        let big = 9_007_199_254_740_992.0; // 2^53
        assert_eq!(two_sum(big, 1.0), (big, 1.0));
        assert_eq!(two_sum(1.0, 0.0), (1.0, 0.0));
        for x in [3.7, -1e300, 5e-324, 0.1] {
            let (s, e) = two_sum(x, -x);
            assert_eq!(s, 0.0);
            assert_eq!(e, 0.0);
        }
    }

    #[test]
    fn two_prod_examples() {
        let a = 1_073_741_825.0; // 2^30 + 1
        let expect = (1_152_921_506_754_330_624.0, 1.0); // 2^60 + 2^31, 1
        assert_eq!(two_prod(a, a), expect);
        assert_eq!(two_prod_fma(a, a), expect);
        assert_eq!(two_prod(1.5, 2.0), (3.0, 0.0));
        assert_eq!(two_prod(7.25, 0.0), (0.0, 0.0));
        assert_eq!(two_prod_fma(1.5, 2.0), (3.0, 0.0));
    }

    /// `x / 2^k` as an integer; exact when `x` is a multiple of `2^k`.
    fn scaled(x: f64, k: i32) -> i128 {
        let y = x * libm::exp2(-k as f64);
        assert_eq!(y, libm::trunc(y));
        y as i128
    }

    #[test]
    fn error_free_transforms_are_exact() {
        // a = m1 2^k1, b = m2 2^k2 with 53-bit integer mantissas; the exact sum
        // and product are then integers times 2^min(k1,k2) (resp. 2^(k1+k2))
        // and fit in i128, so the residual identities are checked exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1_000_000 {
            let m1: i64 = rng.gen_range(-(1i64 << 53)..(1i64 << 53));
            let m2: i64 = rng.gen_range(-(1i64 << 53)..(1i64 << 53));
            let k1: i32 = rng.gen_range(-30..30);
            let k2: i32 = k1 + rng.gen_range(-60..60);
            let a = m1 as f64 * libm::exp2(k1 as f64);
            let b = m2 as f64 * libm::exp2(k2 as f64);
            let k = k1.min(k2);

            let (s, e) = two_sum(a, b);
            assert_eq!(s, a + b);
            assert_eq!(scaled(s, k) + scaled(e, k), scaled(a, k) + scaled(b, k));

            let exact = m1 as i128 * m2 as i128;
            for (p, f) in [two_prod(a, b), two_prod_fma(a, b)] {
                assert_eq!(p, a * b);
                assert_eq!(scaled(p, k1 + k2) + scaled(f, k1 + k2), exact);
            }
        }
    }

    #[test]
    fn residual_survives_cancellation() {
        let tiny = libm::exp2(-60.0);
        let x = dd_add(DoubleDouble::ONE, tiny.into());
        let y = dd_sub(x, DoubleDouble::ONE);
        assert_eq!(y.to_f64(), tiny);
        assert_eq!(y.lo, 0.0);
    }

    #[test]
    fn sqrt_two_squared() {
        let r2 = DoubleDouble::from_f64(2.0).sqrt();
        let sq = dd_mul(r2, r2);
        let err = dd_sub(sq, 2.0.into()).to_f64().abs() / 2.0;
        assert!(err <= libm::exp2(-100.0), "{err:e}");
    }

    #[test]
    fn multiply_by_one_is_identity() {
        let x = DoubleDouble::new(core::f64::consts::PI, 1.2246467991473532e-16);
        assert_eq!(dd_mul(x, DoubleDouble::ONE), x);
    }

    #[test]
    fn division_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            let x = DoubleDouble::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0) * 1e-17);
            let y = DoubleDouble::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0) * 1e-17);
            let back = dd_div(x, y) * y;
            assert!(((back - x).to_f64() / x.to_f64()).abs() < 1e-30);
        }
    }

    #[test]
    fn dd_det_of_octant_is_one() {
        let t = SphericalTriangle::new(Vec3::E1, Vec3::E2, Vec3::E3, 1.0).unwrap();
        assert_eq!(dd_det_reference(&t), DoubleDouble::ONE);
    }

    #[test]
    fn associativity_within_eight_eps_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draw = |rng: &mut ChaCha8Rng| {
            DoubleDouble::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0) * 1e-17)
        };
        for _ in 0..10_000 {
            let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let l = (a + b) + c;
            let r = a + (b + c);
            let rel = (l - r).to_f64().abs() / l.to_f64().abs();
            assert!(rel <= 8.0 * EPS * EPS, "add {rel:e}");
            let l = (a * b) * c;
            let r = a * (b * c);
            let rel = (l - r).to_f64().abs() / l.to_f64().abs();
            assert!(rel <= 8.0 * EPS * EPS, "mul {rel:e}");
        }
    }
}
