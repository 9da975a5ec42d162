//! Computational geometry of dually flat (Bregman) manifolds.
//!
//! A convex generator induces a pair of global affine coordinate systems
//! (the theta and eta charts), a Hessian metric, and a pair of flat
//! connections. This crate provides:
//!
//! - built-in and custom generators with exact gradient/Hessian/conjugate
//!   triples ([`generator`]),
//! - tangent-space machinery: index raising/lowering, inner products,
//!   angles and the two flat parallel transports ([`chart`]),
//! - Bregman-type divergences and their algebraic identities
//!   ([`divergence`]),
//! - primal/dual geodesics and chart flats ([`geodesic`]),
//! - geodesic triangles, interior angles, right-angle constructions and
//!   simultaneous dual-Pythagoras solves ([`triangle`]),
//! - parametric divergence spheres via the Lambert W function ([`sphere`]),
//! - the shared numeric kernels ([`numeric`]).
//!
//! All modules are generic over the scalar type through the [`Real`] trait
//! (implemented by `f32` and `f64`); the aliases below fix `f64` for common
//! use.

pub mod chart;
pub mod divergence;
pub mod error;
pub mod generator;
pub mod geodesic;
pub mod numeric;
pub mod scalar;
pub mod sphere;
pub mod triangle;

pub use error::{GeometryError, Result};
pub use scalar::{real, Real};

pub use chart::{angle, dual_transport, inner_product, lower, primal_transport, raise};
pub use divergence::{
    bregman, check_pythagoras, dual_bregman, fenchel_young, four_param_residual, jensen,
    jensen_bregman, parallelogram_residual, residual_scale, three_param_residual,
};
pub use generator::GeneratorKind;
pub use geodesic::{intersect_flats_2d, Chart, GeodesicKind};
pub use sphere::{scalar_solve_is, scalar_solve_kl, sphere_points, tangent_box, SeparableKind};
pub use triangle::{
    dual_pythagoras_flats, interior_angles, parse_edges, right_angle_flat, search_triple_right,
    solve_double_right, solve_dual_pythagoras_is2d, solve_prescribed_angles,
};

/// `f64` specializations of the core types.
pub type Generator = generator::Generator<f64>;
pub type CustomGenerator = generator::CustomGenerator<f64>;
pub type ThetaCoords = generator::ThetaCoords<f64>;
pub type EtaCoords = generator::EtaCoords<f64>;
pub type Point = chart::Point<f64>;
pub type TangentVector = chart::TangentVector<f64>;
pub type Geodesic = geodesic::Geodesic<f64>;
pub type Flat = geodesic::Flat<f64>;
pub type GeodesicTriangle = triangle::GeodesicTriangle<f64>;
pub type AngleReport = triangle::AngleReport<f64>;
pub type SearchOutcome = triangle::SearchOutcome<f64>;
pub type PythagorasReport = divergence::PythagorasReport<f64>;
pub type SphereSpec = sphere::SphereSpec<f64>;
pub type SpherePoint = sphere::SpherePoint<f64>;
