//! The directed graph of positive-weight moves: reachability, sinks,
//! distances, holes, and the two-dimensional stairs and tadpoles.

mod graph;
mod stairs;
mod stats;

pub use graph::{build_digraph, directed_distance, find_sinks, DirectedLatticeGraph, SinkDecomposition};
pub use stairs::{es_stair, stair_formula, tadpole, Heading, StairPath, StairStructure, Tadpole};
pub use stats::{
    distance_tail, holes_are_rectangles, nested_sink_rows, reach_outside_sink, reach_outside_sink_tail, sample_sink_distances,
    sink_stats, subcube_hit_fraction, DistTailRow, DistanceSample, DistanceTail, HoleReport, HoleShape, ReachRow, ReachTail,
    SinkRow, SinkSizeSummary, SinkStats, MIN_SINK_SEEDS, SUBCUBES_PER_AXIS,
};
