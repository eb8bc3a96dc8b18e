//! Smooth convex bodies described by support functions.

pub mod evaluator;
pub mod hk;
pub mod quadrature;
pub mod random;
pub mod support;

pub use evaluator::{pointwise_mean_curvature, BoundaryPointData, SupportEvaluator};
pub use hk::{hk_functional, tube_bound_via_normal_bundle, HkReport, HkVerdict, ProofChain};
pub use quadrature::SphereQuadrature;
