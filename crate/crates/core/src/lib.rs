//! Two-neighbour bootstrap percolation on finite grids: dynamics, droplet
//! growth events, hierarchies, bound evaluators and a Monte Carlo harness.

pub mod dynamics;
pub mod error;
pub mod events;
pub mod hierarchy;
pub mod lattice;
pub mod montecarlo;
pub mod numerics;

pub use dynamics::{
    al_witness, closure, closure_within, crossed, disjoint_span_split, double_gap, is_internally_filled,
    minimal_percolating_subset, percolates, rectangles_process, step, Axis, MergeForest, SpanSplit,
};
pub use error::{Error, Result};
pub use events::{buffers, criticality, event_d1, event_d2, frame, Buffers, Criticality, Frame, FrameSpec, Selection};
pub use hierarchy::{
    build_hierarchy, check_good, check_satisfied, stats, trunk, verify_pod_inequality, weighted_count_bound,
    GoodnessReport, Hierarchy, HierarchyStats, SatisfactionCertificate,
};
pub use lattice::{rect_metrics, side_distances, Config, Direction, Rect, RectMetrics, SideDistances, Site};
pub use montecarlo::{Estimate, TrialStream};
pub use numerics::{BoundReport, Constants};
