//! Layout engine for strongly-meshed power transmission grids: takes a rough
//! drawing, reduces line crossings by visibility-region analysis, then
//! re-places nodes with a MILP over a K-linear coordinate system. Large grids
//! are partitioned and solved in parallel.

pub mod force;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod milp;
pub mod partition;
pub mod pipeline;
pub mod render;
pub mod reduce;

pub use graph::{EdgeKey, Layout, NodeId, PowerGraph};
