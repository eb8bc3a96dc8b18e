//! Curvature machinery for convex bodies in the plane and in space.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod body_spec;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod mesh;
pub mod polytope;
pub mod smooth;
pub mod symmetric;
pub mod tube;
pub mod umbilic;

pub use bodies::{Body, BodyKind};
pub use error::{GeomError, Result};
pub use geometry::{Dim, Point};
