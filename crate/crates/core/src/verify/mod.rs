//! Numerical checks of the quantified inequalities behind the dimension-free
//! estimates: series constants, Hanner's inequality, counting sandwiches,
//! small-set bounds, shift bounds and the permutation bounds.
//!
//! Each check returns [`VerificationReport`](crate::report::VerificationReport)s
//! whose gates encode the hypotheses; outside them the verdict is report-only.

mod lattice;
mod permutations;
mod series;
mod small_sets;

pub use lattice::{check_count_volume, check_hanner, check_shift_difference};
pub use permutations::{monte_carlo_permutations, PermutationCase, EXHAUSTIVE_MAX_DIM};
pub use series::{a_q, c_tilde, even_binomial_series, generalized_binomial, slice_series, slice_threshold, Series};
pub use small_sets::{check_cube_slice, check_small_head_mass, check_sparse_large_coordinates, SliceCase};
