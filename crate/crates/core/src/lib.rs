//! Discrete Hardy-Littlewood maximal functions over convex symmetric bodies
//! (q-balls, cubes, ellipsoids) in `Z^d`, with their continuous
//! counterparts.
//!
//! * [`geometry`]: bodies, gauges, exact lattice-point counts and volumes.
//! * [`operators`]: averages, maximal functions over scale sets, the heat
//!   semigroup and the square function.
//! * [`multiplier`]: Fourier multipliers of the averages and checks of
//!   their decay.
//! * [`constants`]: strong and weak type ratios, witness searches and
//!   discrete/continuous transference checks.
//! * [`verify`]: numerical checks of lattice-counting and probabilistic
//!   estimates, each returning a [`report::VerificationReport`].
//! * [`cli`]: the `dmax` command line.
//!
//! Randomness comes from [`rng::stream`], keyed by a seed and a sample index,
//! so results do not depend on the thread count.

pub mod cli;
pub mod constants;
pub mod error;
pub mod function;
pub mod multiplier;
pub mod geometry;
pub mod operators;
pub mod report;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
