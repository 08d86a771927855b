//! Pseudorandomness measures for the sequence `q_p(0), q_p(1), ...`.

mod concentration;
mod discrepancy;
mod expsum;
mod linear;
mod sequence;

pub use concentration::concentration_count;
pub use discrepancy::{
    star_discrepancy_1d, star_discrepancy_nd, star_discrepancy_nd_estimate, PointSet,
    EXACT_MAX_POINTS,
};
pub use expsum::{exp_sum, exp_sum_bound, exp_sum_with, BoundCheck, ExpSumSpec, MAX_TERMS};
pub use linear::{
    lc_bound_full, lc_bound_segment, linear_complexity, linear_complexity_profile,
    satisfies_recurrence, LinearComplexityResult,
};
pub use sequence::QuotientSequence;
