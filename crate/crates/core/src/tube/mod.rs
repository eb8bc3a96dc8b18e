//! Tubular neighbourhoods of closed sets: sampled distance fields, offset
//! volumes, the Steiner reach test and the geometry of parallel surfaces.

pub mod field;
pub mod level_set;
pub mod offset;
pub mod oracle;
pub mod steiner;

pub use field::{build_distance_field, DistanceField};
pub use level_set::{extract_level_set, OffsetSurface};
pub use offset::{complement_curvature, offset_curvature_check, parallel_curvature, OffsetCurvatureReport};
pub use oracle::{BBox, DistanceOracle};
pub use steiner::{steiner_fit, ReachVerdict, SteinerFit};
