//! Significance graphs: institutions joined when their difference is not
//! significant, partitioned into ordered tiers and ranked within them.

mod cluster;
mod graph;
mod grouping;

pub use cluster::{cluster, MIN_GAIN};
pub use graph::{build_graph, Criterion, Edge, Node, SignificanceGraph};
pub use grouping::{modularity, rank_groups, weak_components, Group, Grouping, RankRow, RankTable};
