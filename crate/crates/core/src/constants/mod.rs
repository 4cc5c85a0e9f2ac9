//! Lower bounds for maximal-function constants from explicit witnesses, and
//! the sampling and step-extension constructions relating the discrete and
//! continuous operators.

mod ratios;
mod search;
mod transfer;

pub use ratios::{melas_constant, strong_ratio, weak_ratio, WeakRatio};
pub use search::{search_weak_constant, ConstantEstimate, ConstantKind, SearchConfig, SearchTrace, RECORD_VERSION};
pub use transfer::{check_step_extension, sample_and_compare, step_extension, triangular_bump};
