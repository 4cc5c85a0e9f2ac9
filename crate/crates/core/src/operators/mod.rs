//! Averages, maximal functions, the heat semigroup, the square function and
//! grid approximations of the continuous averages.

mod average;
mod continuous;
mod maximal;
mod selector;
mod semigroup;
mod square;

pub use average::{average, average_cube_separable};
pub use continuous::{continuous_average_grid, continuous_maximal_grid, GridAverage, GridKernel};
pub use maximal::{maximal, truncation_bound, MaximalPlan};
pub use selector::{dyadic_window, ScaleSelector};
pub use semigroup::{grid_size, semigroup_apply, HeatKernel};
pub use square::square_function;
