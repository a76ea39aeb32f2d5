//! Significance statistics: chi-square with expected values and
//! standardized residuals, two-proportion z-tests, significance thresholds
//! and stability-interval relations.
//!
//! All counts are real-valued so that fractionally counted publications can
//! be tested directly; the chi-square significance interpretation is then an
//! approximation.

mod interval;
mod table;
mod ztest;

pub use interval::{ci_relation, record_relation, Containment, Interval, IntervalRelation};
pub use table::ContingencyTable;
pub use ztest::{
    chi_square_level, is_degenerate_pool, link_z, pairwise_test, pooled_proportion, significance_level, two_by_two,
    z_two_proportions, z_vs_expectation, PairwiseTest, ProportionMode, SignificanceLevel, EXPECTED_TOP_SHARE,
};
