//! Exact moment engines in rational arithmetic, plus the semicircle law.

mod moments;
mod semicircle;
mod wick;

pub use moments::{
    catalan_closed_form, harer_zagier_moments, rat, semicircle_moments, to_f64, MomentKind,
    MomentSequence, MomentValue,
};
pub use semicircle::{semicircle_cdf, semicircle_density, semicircle_quantile};
pub use wick::{
    for_each_matching, wick_band_moment, wick_band_order, wick_gue_moment, wick_gue_order,
    wick_profile_order, PairingOracleResult, WICK_BAND_MAX_K, WICK_BAND_MAX_N, WICK_GUE_MAX_K,
};
