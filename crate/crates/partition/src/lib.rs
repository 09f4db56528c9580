//! Polynomial partitioning of finite point sets and of direction sets lying on
//! transverse complete intersections, with the cell audits built on top.

pub mod cluster;
pub mod direction;
pub mod error;
pub mod ham;
pub mod poly_partition;
pub mod probe;

pub use cluster::{band_counts, cluster_select, direction_items, ClusterSelection};
pub use direction::{
    crossing_audit, crossing_count, direction_partition, write_crossing_csv, CrossingRow, DirCell, DirectionOptions,
    DirectionPartition, DirectionRecord, NearWall, Patch, Wall, WallKind, WallRecord, DIRECTION_NUDGE,
};
pub use error::PartitionError;
pub use ham::{ham_sandwich_bisect, Hyperplane, ON_PLANE_TOL};
pub use poly_partition::{
    approx_poly_partition, cell_assign, round_count, BoundingBox, Cell, PartitionOptions, PartitionRecord, PartitionResult,
    RoundLog, MAX_LIFT_DEGREE,
};
pub use probe::probe_connected;
