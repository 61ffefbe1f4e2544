//! Accurate and stable numerical integration over spherical triangles.
//!
//! A spherical triangle is integrated by pulling a Gaussian rule on its flat
//! (chordal) triangle back through radial projection. The Jacobian of that
//! map reduces to `r² det[x1, x2, x3] / ‖x‖³`, and the determinant is
//! evaluated with an anchored triple product so that small or badly shaped
//! triangles do not lose digits to cancellation.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the test
//! integrands and the benchmark CLI live in the companion `arpist-std` package.
//!
//! ```
//! use arpist_core::{area_spherical, AdaptiveConfig, SphericalTriangle, Vec3};
//!
//! let octant = SphericalTriangle::new(Vec3::E1, Vec3::E2, Vec3::E3, 1.0).unwrap();
//! let area = area_spherical(&octant, &AdaptiveConfig::default());
//! assert!((area - core::f64::consts::FRAC_PI_2).abs() < 1e-14);
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod vec3;

pub mod arpist;
pub mod baselines;
pub mod dd;
pub mod detstab;
pub mod geom;
pub mod knn;
pub mod mesh;
pub mod quadrules;
pub mod sum;
pub mod wls;

pub use arpist::{
    area_spherical, integrate_adaptive, integrate_fixed, subdivide4, AdaptiveConfig,
    IntegrationResult,
};
pub use baselines::{area_lhuilier, area_oracle, LhuilierArea};
pub use dd::{dd_det_reference, two_prod, two_sum, DoubleDouble};
pub use detstab::{
    det_aluppe, det_atp, det_lupp_plain, det_off_anchored, random_sliver_triangles,
    select_anchor, triple_product_naive, DetMethod, DetReport,
};
pub use error::{Error, Result};
pub use geom::{
    chord_edges, geodesic_edges, map_ref, orientation_positive, radial_project, RefPoint,
    SphericalTriangle,
};
pub use mesh::{icosphere, mesh_integrate, Method, QuadNode, TriangleMesh};
pub use quadrules::{get_rule, verify_rule, QuadratureRule, RuleDefect};
pub use sum::CompensatedSum;
pub use vec3::Vec3;
pub use wls::{build_wls_operator, integrate_scattered, IntegrationRow, WlsBuilder, WlsOperator};

/// Unit roundoff of `f64` (half the machine epsilon).
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;
