//! Statistical significance of differences between ranked institutions.
//!
//! The crate tests whether two institutions' top-10% shares differ
//! (chi-square with standardized residuals, two-proportion z-tests,
//! stability-interval overlap), links indistinguishable institutions into a
//! significance graph, partitions that graph into ordered tiers, compares
//! tierings with association measures, and splits indicator change over
//! time into data and model effects.
//!
//! ```
//! use ranksig_core::stats::ContingencyTable;
//!
//! let t = ContingencyTable::from_matrix(vec![
//!     vec![2738.0, 17164.0],
//!     vec![2604.0, 20906.0],
//! ]).unwrap();
//! assert!((t.chi_square().unwrap() - 71.80).abs() < 0.05);
//! ```

pub mod compare;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod ingest;
pub mod siggraph;
pub mod stats;

pub use error::{Error, Result};
pub use ingest::{Counting, DatasetSelector, InstitutionRecord, LinkScore, NodeScore};
pub use siggraph::{Criterion, Grouping, RankTable, SignificanceGraph};
pub use stats::{ContingencyTable, Interval, IntervalRelation, PairwiseTest, ProportionMode, SignificanceLevel};
