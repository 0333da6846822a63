//! Maximal operators over flats, the p-maximal weight, rounding, and constants.

mod constants;
mod operator;
mod weight;

pub use constants::{
    appendix_constant, appendix_d, band_ratio, ceil_log, chain_constant, maxn_constant, ChainConstant, ChainTerm,
    ConstantLedger,
};
#[cfg(any(test, feature = "oracle"))]
pub use operator::naive_maximal;
pub use operator::{flat_maximal, line_maximal, MaximalPlan, MaximalProfile};
pub use weight::{mweight, mweight_with_plan, normalize_for_rounding, rounding_g};
