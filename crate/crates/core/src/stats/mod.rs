//! Quantile engine: normal distribution utilities, Monte-Carlo quantiles of
//! max statistics, and concentration widths for bounded means.

pub mod concentration;
pub mod interval;
pub mod mc;
pub mod normal;

pub use concentration::{bentkus_width, betting_ci, betting_ci_with, hoeffding_width, BettingConfig};
pub use interval::{Interval, IntervalSet};
pub use mc::{
    contrast_quantile_mc, max_abs_quantile_iid, max_stat_quantile_mc, nominal_quantile, GaussianNoise,
    upper_quantile, upper_quantile_estimate, lower_quantile, MaxStatSampler, QuantileEstimate, DEFAULT_N_DRAWS,
    MIN_N_DRAWS,
};
pub use normal::{normal_cdf, normal_quantile, normal_sf};
