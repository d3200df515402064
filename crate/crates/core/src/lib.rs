//! Random cubic ribbon graphs and the cusped hyperbolic surfaces built from
//! them by gluing ideal triangles: face tracing, closed-form cusp geometry,
//! an exact Farey development, and an explicit Cheeger cut giving a
//! certified upper bound on the Cheeger constant.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cheeger_cut;
pub mod cusp_geometry;
pub mod farey_tiling;
pub mod ribbon_graph;

pub use cheeger_cut::{cheeger_upper_bound, CutError, Division, Side};
pub use cusp_geometry::{partition_cusps, CuspPartition, GeometryError};
pub use farey_tiling::{FareyError, Fraction};
pub use ribbon_graph::{
    sample, sample_connected, Dart, FaceDecomposition, GraphError, RibbonGraph,
};
