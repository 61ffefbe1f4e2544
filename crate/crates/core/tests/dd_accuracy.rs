//! Double-double operations checked against exact big-integer arithmetic.

use arpist_core::dd::{dd_add, dd_mul, dd_sub};
use arpist_core::DoubleDouble;
use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed-point scale: every value in these tests is a multiple of 2^-SHIFT.
const SHIFT: i32 = 400;

fn exact(x: f64) -> BigInt {
    if x == 0.0 {
        return BigInt::from(0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
    let m = BigInt::from(if x < 0.0 { -mant } else { mant });
    assert!(e + SHIFT >= 0);
    m << (e + SHIFT) as usize
}

fn exact_dd(x: DoubleDouble) -> BigInt {
    exact(x.hi) + exact(x.lo)
}

fn draw(rng: &mut ChaCha8Rng) -> DoubleDouble {
    let hi: f64 = rng.gen_range(1.0..2.0) * 2f64.powi(rng.gen_range(-20..20));
    let hi = if rng.gen_bool(0.5) { -hi } else { hi };
    DoubleDouble::new(hi, hi * rng.gen_range(-1.0..1.0) * f64::EPSILON / 2.0)
}

/// |got − want| ≤ 4ε²|want| with ε = 2^-53, i.e. |got − want|·2^104 ≤ |want|.
fn within_four_eps_squared(got: &BigInt, want: &BigInt, extra_shift: usize) -> bool {
    let diff = (got << extra_shift) - want;
    (diff.abs() << 104usize) <= want.abs()
}

fn normalized(x: DoubleDouble) -> bool {
    x.hi + x.lo == x.hi
}

#[test]
fn add_and_sub_within_four_eps_squared() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100_000 {
        let (x, y) = (draw(&mut rng), draw(&mut rng));
        let (ex, ey) = (exact_dd(x), exact_dd(y));
        let s = dd_add(x, y);
        let d = dd_sub(x, y);
        assert!(normalized(s) && normalized(d));
        assert!(within_four_eps_squared(&exact_dd(s), &(&ex + &ey), 0), "{x:?} + {y:?}");
        assert!(within_four_eps_squared(&exact_dd(d), &(&ex - &ey), 0), "{x:?} - {y:?}");
    }
}

#[test]
fn mul_within_four_eps_squared() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100_000 {
        let (x, y) = (draw(&mut rng), draw(&mut rng));
        let p = dd_mul(x, y);
        assert!(normalized(p));
        let want = exact_dd(x) * exact_dd(y);
        assert!(within_four_eps_squared(&exact_dd(p), &want, SHIFT as usize), "{x:?} * {y:?}");
    }
}

#[test]
fn det_reference_is_cubically_homogeneous() {
    use arpist_core::{dd_det_reference, random_sliver_triangles, SphericalTriangle};
    for tri in random_sliver_triangles(200, 3, 0.05, 0.01).unwrap() {
        let base = dd_det_reference(&tri);
        for lambda in [2.0, 0.5, 8.0] {
            let v = tri.vertices();
            let scaled = SphericalTriangle::new(v[0].scale(lambda), v[1].scale(lambda), v[2].scale(lambda), lambda).unwrap();
            let got = dd_det_reference(&scaled);
            let want = base * DoubleDouble::from_f64(lambda * lambda * lambda);
            assert!(((got - want).to_f64() / want.to_f64()).abs() <= 1e-28);
        }
    }
}
