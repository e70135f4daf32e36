//! Level statistics, line-forest census and selectivity scaling for
//! integrable versus random-matrix spectra.

mod scaling;
mod selectivity;
mod statistics;

pub use scaling::{
    chaotic_lines, fit_power_law, goe_gap_curve, goe_ratio_ensemble, integrable_ratio_ensemble,
    integrable_selectivity_curve, integrable_system, worst_band_selectivity, PowerLawFit, RatioEnsemble,
    ScalingCurve,
};
pub use selectivity::{
    band_selectivity_time, forest_census, min_coupled_gap, selectivity_time, Census, SELECTIVITY_CONSTANT,
};
pub use statistics::{spacing_statistics, SpectralReport, DEGENERATE_SPACING, GOE_MEAN_RATIO, MIN_LEVELS, POISSON_MEAN_RATIO};
