//! Test integrands with known integrals over the unit sphere.

use std::f64::consts::PI;

use arpist_core::{Error, Result, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(1 + tanh(9(z − x − y))) / 9`.
pub fn f1(p: Vec3) -> f64 {
    (1.0 + (9.0 * (p.z - p.x - p.y)).tanh()) / 9.0
}

/// Exact integral of [`f1`] over the unit sphere.
pub const F1_EXACT: f64 = 4.0 * PI / 9.0;

/// `1/2 + atan(300(z − 0.9999))/π`, a smoothed step near the north pole.
pub fn f2(p: Vec3) -> f64 {
    0.5 + (300.0 * (p.z - 0.9999)).atan() / PI
}

/// Reference value for the integral of [`f2`] quoted with the benchmark.
pub const F2_REFERENCE: f64 = 0.014830900415995262852;

/// Integral of [`f2`] from its closed-form antiderivative in `z`:
/// `2π ∫_{-1}^{1} f2 dz`.
pub const F2_CLOSED_FORM: f64 = 0.049629692928687444948;

pub fn f2_closed_form() -> f64 {
    // ∫ atan(a(z − c)) dz = (z − c)·atan(a(z − c)) − ln(1 + a²(z − c)²)/(2a)
    let (a, c) = (300.0f64, 0.9999f64);
    let g = |z: f64| {
        let u = z - c;
        u * (a * u).atan() - (a * u).powi(2).ln_1p() / (2.0 * a)
    };
    2.0 * PI * (1.0 + (g(1.0) - g(-1.0)) / PI)
}

/// One random instance of the nine-kernel Poisson test function.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonTestCase {
    pub s: f64,
    pub alphas: [f64; 9],
    pub centers: [Vec3; 9],
    pub seed: u64,
}

impl PoissonTestCase {
    pub fn new(s: f64, alphas: [f64; 9], centers: [Vec3; 9], seed: u64) -> Result<Self> {
        check_s(s)?;
        let total: f64 = alphas.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}, expected 1")));
        }
        if centers.iter().any(|c| (c.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidParameter("centers must be unit vectors".into()));
        }
        Ok(Self { s, alphas, centers, seed })
    }

    /// Trial `trial` of the sequence determined by `seed`: weights uniform on
    /// [0, 1] normalized to sum 1, centers uniform on the sphere. The draw
    /// does not depend on `s`, so every `s` sees the same trials.
    pub fn random(seed: u64, trial: u64, s: f64) -> Result<Self> {
        check_s(s)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let mut alphas = [0.0; 9];
        for a in &mut alphas {
            *a = rng.gen_range(0.0..1.0);
        }
        let total: f64 = alphas.iter().sum();
        alphas.iter_mut().for_each(|a| *a /= total);
        let centers = std::array::from_fn(|_| {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..2.0 * PI);
            let r = (1.0 - z * z).sqrt();
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        });
        Ok(Self { s, alphas, centers, seed })
    }
}

fn check_s(s: f64) -> Result<()> {
    if (0.0..1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("s = {s} is outside [0, 1)")))
    }
}

/// Poisson kernel `(1−s)³ / (1 − 2st + s²)^{3/2}`.
pub fn poisson_kernel(s: f64, t: f64) -> f64 {
    let d = 1.0 - 2.0 * s * t + s * s;
    (1.0 - s).powi(3) / (d * d.sqrt())
}

pub fn poisson_f(case: &PoissonTestCase, x: Vec3) -> f64 {
    case.alphas.iter().zip(&case.centers).map(|(&a, &c)| a * poisson_kernel(case.s, x.dot(c))).sum()
}

/// `4π(1−s)²/(1+s)`, the integral of any normalized Poisson test function.
pub fn poisson_exact(s: f64) -> f64 {
    4.0 * PI * (1.0 - s) * (1.0 - s) / (1.0 + s)
}
