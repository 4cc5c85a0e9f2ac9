//! Fourier multipliers of the discrete averages, the semigroup, and the
//! continuous ball averages, with sampled checks of their bounds near the
//! origin and decay away from it.

mod checks;
mod continuous;
mod discrete;
mod frequency;

pub use checks::{
    check_head_multiplier, continuous_decay_envelope, verify_prop1, verify_prop2_envelope, EnvelopeKind, EnvelopeReport,
    EnvelopeRow,
};
pub use continuous::continuous_multiplier;
pub use discrete::{fourier_transform, lower_dim_multiplier, multiplier, semigroup_multiplier, MultiplierPlan};
pub use frequency::{sample_frequency, FrequencyPoint};
