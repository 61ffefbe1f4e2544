//! Symmetric Gaussian rules on the reference triangle `{ξ, η ≥ 0, ξ + η ≤ 1}`.
//!
//! Weights include the reference area, so they sum to 1/2. All weights are
//! positive and every point set is invariant under the six permutations of
//! the barycentric coordinates.

use crate::{Error, RefPoint, Result};

#[derive(Debug)]
pub struct QuadratureRule {
    degree: usize,
    points: &'static [RefPoint],
    weights: &'static [f64],
}

impl QuadratureRule {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &'static [RefPoint] {
        self.points
    }

    pub fn weights(&self) -> &'static [f64] {
        self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (RefPoint, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

const fn p(xi: f64, eta: f64) -> RefPoint {
    RefPoint::new(xi, eta)
}

pub const SUPPORTED_DEGREES: &[usize] = &[1, 2, 4, 8];

static CENTROID: QuadratureRule = QuadratureRule {
    degree: 1,
    points: &[p(1.0 / 3.0, 1.0 / 3.0)],
    weights: &[0.5],
};

static STRANG_FIX_3: QuadratureRule = QuadratureRule {
    degree: 2,
    points: &[p(1.0 / 6.0, 1.0 / 6.0), p(2.0 / 3.0, 1.0 / 6.0), p(1.0 / 6.0, 2.0 / 3.0)],
    weights: &[1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0],
};

// Two S21 orbits.
const A4: f64 = 0.445_948_490_915_964_89;
const B4: f64 = 0.108_103_018_168_070_23;
const C4: f64 = 0.091_576_213_509_770_743;
const D4: f64 = 0.816_847_572_980_458_51;
const W4A: f64 = 0.111_690_794_839_005_73;
const W4C: f64 = 0.054_975_871_827_660_934;

static DEGREE_4: QuadratureRule = QuadratureRule {
    degree: 4,
    points: &[p(A4, B4), p(B4, A4), p(A4, A4), p(C4, D4), p(D4, C4), p(C4, C4)],
    weights: &[W4A, W4A, W4A, W4C, W4C, W4C],
};

// Centroid, three S21 orbits and one S111 orbit.
const W8_0: f64 = 0.072_157_803_838_893_584;
const A8: f64 = 0.459_292_588_292_723_16;
const A8B: f64 = 0.081_414_823_414_553_688;
const W8A: f64 = 0.047_545_817_133_642_312;
const C8: f64 = 0.170_569_307_751_760_21;
const C8B: f64 = 0.658_861_384_496_479_59;
const W8C: f64 = 0.051_608_685_267_359_125;
const E8: f64 = 0.050_547_228_317_030_975;
const E8B: f64 = 0.898_905_543_365_938_05;
const W8E: f64 = 0.016_229_248_811_599_040;
const G8A: f64 = 0.263_112_829_634_638_11;
const G8B: f64 = 0.728_492_392_955_404_28;
const G8C: f64 = 0.008_394_777_409_957_605_3;
const W8G: f64 = 0.013_615_157_087_217_497;

static DEGREE_8: QuadratureRule = QuadratureRule {
    degree: 8,
    points: &[
        p(1.0 / 3.0, 1.0 / 3.0),
        p(A8, A8B),
        p(A8B, A8),
        p(A8, A8),
        p(C8, C8B),
        p(C8B, C8),
        p(C8, C8),
        p(E8, E8B),
        p(E8B, E8),
        p(E8, E8),
        p(G8A, G8B),
        p(G8B, G8A),
        p(G8C, G8B),
        p(G8B, G8C),
        p(G8C, G8A),
        p(G8A, G8C),
    ],
    weights: &[
        W8_0, W8A, W8A, W8A, W8C, W8C, W8C, W8E, W8E, W8E, W8G, W8G, W8G, W8G, W8G, W8G,
    ],
};

/// Tabulated rule exact for polynomials of total degree `degree`.
pub fn get_rule(degree: usize) -> Result<&'static QuadratureRule> {
    match degree {
        1 => Ok(&CENTROID),
        2 => Ok(&STRANG_FIX_3),
        4 => Ok(&DEGREE_4),
        8 => Ok(&DEGREE_8),
        _ => Err(Error::UnsupportedDegree { degree, supported: SUPPORTED_DEGREES }),
    }
}

/// Largest monomial defect of a rule, and where it occurs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleDefect {
    pub max_defect: f64,
    /// Exponents `(a, b)` of the worst monomial `ξ^a η^b`.
    pub worst: (usize, usize),
}

/// `∫_T ξ^a η^b = a! b! / (a + b + 2)!` over the reference triangle.
pub fn monomial_moment(a: usize, b: usize) -> f64 {
    let mut num = 1.0;
    for i in 1..=a {
        num *= i as f64;
    }
    for i in 1..=b {
        num *= i as f64;
    }
    let mut den = 1.0;
    for i in 1..=(a + b + 2) {
        den *= i as f64;
    }
    num / den
}

/// Compares the rule against the exact moments of every monomial up to its degree.
pub fn verify_rule(rule: &QuadratureRule) -> RuleDefect {
    let mut out = RuleDefect { max_defect: 0.0, worst: (0, 0) };
    for total in 0..=rule.degree {
        for a in 0..=total {
            let b = total - a;
            let q: f64 = rule
                .iter()
                .map(|(pt, w)| w * libm::pow(pt.xi, a as f64) * libm::pow(pt.eta, b as f64))
                .sum();
            let d = (q - monomial_moment(a, b)).abs();
            if d > out.max_defect {
                out = RuleDefect { max_defect: d, worst: (a, b) };
            }
        }
    }
    out
}
