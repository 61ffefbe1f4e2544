use alloc::string::String;
use core::fmt;

use crate::Vec3;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vertex is farther from the sphere than the on-sphere tolerance.
    NotOnSphere { vertex: usize, deviation: f64 },
    /// Two vertices of a triangle coincide.
    CoincidentVertices { first: usize, second: usize },
    /// The triangle is clockwise or flat as seen from outside the sphere.
    NotCounterclockwise { det: f64 },
    /// Radius or coordinates are not finite and positive.
    InvalidGeometry(&'static str),
    /// Radial projection of the origin.
    ZeroVector,
    UnsupportedDegree { degree: usize, supported: &'static [usize] },
    InvalidParameter(String),
    /// The integrand returned NaN or infinity.
    NonFiniteIntegrand { point: Vec3, value: f64 },
    /// Spherical excess undefined (zero triple product and nonpositive denominator).
    DegenerateTriangle,
    /// Weighted least-squares fit is rank deficient even after enlarging the stencil.
    RankDeficient { point: usize },
    /// Mesh connectivity problem, located by triangle index.
    InvalidMesh { triangle: usize, reason: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotOnSphere { vertex, deviation } => write!(
                f,
                "vertex {vertex} is off the sphere by {deviation:e} (relative)"
            ),
            Error::CoincidentVertices { first, second } => {
                write!(f, "vertices {first} and {second} coincide")
            }
            Error::NotCounterclockwise { det } => write!(
                f,
                "triangle is not counterclockwise w.r.t. the outward normal (det = {det:e})"
            ),
            Error::InvalidGeometry(what) => write!(f, "invalid geometry: {what}"),
            Error::ZeroVector => f.write_str("cannot project the zero vector onto a sphere"),
            Error::UnsupportedDegree { degree, supported } => write!(
                f,
                "no quadrature rule of degree {degree}; supported degrees are {supported:?}"
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NonFiniteIntegrand { point, value } => write!(
                f,
                "integrand returned {value} at ({}, {}, {})",
                point.x, point.y, point.z
            ),
            Error::DegenerateTriangle => f.write_str("degenerate spherical triangle"),
            Error::RankDeficient { point } => write!(
                f,
                "least-squares stencil for quadrature point {point} is rank deficient"
            ),
            Error::InvalidMesh { triangle, reason } => {
                write!(f, "triangle {triangle}: {reason}")
            }
        }
    }
}

impl core::error::Error for Error {}
