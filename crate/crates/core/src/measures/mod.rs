//! Prefix-complexity estimates and the information measures built on them.

mod complexity;
mod synergy;

pub use complexity::{
    a_hat, a_hat_cond, compression_fallback, deflate_bits, read_cache_keys, Budgets,
    ComplexityEstimate, Estimator, Method,
};
pub use synergy::{
    eac, expected_local_synergy, local_synergy, pick_labels, MeasureError, PickedLabels,
    SynergyReport, MAX_CONFIRM_BITS,
};
