//! Coverage probability and ergodic rate.

pub mod coverage;
pub mod load;
pub mod pathloss;
pub mod rate;

pub use coverage::{
    pcov, pcov_approx_full, pcov_exact_full, pcov_partial_load, pcov_with_noise, CoverageCurve, PartialLoadCoverage,
    PcovKind,
};
pub use load::{load_model, load_model_from_ratio, LoadModel};
pub use pathloss::{pathloss_cdf, pathloss_pdf, PathLossPdf};
pub use rate::{
    rate_actual, rate_closed_general, rate_fully_loaded, rate_peak, rate_peak_partial_load, rate_quadrature,
    rate_quadrature_with, peak_rate_closed_form, verify_peak_closed_form, RateMethod, RateResult, PeakRateForm, ClosedFormReport,
};
