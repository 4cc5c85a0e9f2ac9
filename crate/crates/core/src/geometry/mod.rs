//! Bodies, gauges, volumes and exact lattice-point counts of their dilates.

mod body;
mod count;
mod scales;
mod volume;

pub use body::{kappa, BodyKind, BodySpec, GAUGE_TOL};
pub use count::{lattice_count, shell_count, shell_table, CountResult, DP_BUDGET_CAP};
pub use scales::{degenerate_scale, scale_breakpoints, ScaleShells};
pub use volume::{ball_volume, Volume};

pub(crate) use count::{big_to_f64, int_budget, iroot, LatticeBall};

/// Lattice points of `G_t`, in lexicographic order.
pub fn lattice_points(body: &BodySpec, t: f64) -> crate::Result<Vec<Vec<i64>>> {
    Ok(LatticeBall::new(body, t)?.points())
}
