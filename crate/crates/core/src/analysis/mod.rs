//! Convolution-bound certification on traces and the constructive
//! robustness margins.

mod certificate;
mod margins;

pub use certificate::{
    check_convolution_bound, check_umd_closed_loop_bound, fit_gain_decay_frontier,
    fit_minimal_gain, fit_umd_minimal_gain, BoundCertificate, StateKind,
};
pub use margins::{
    a_cl, spectral_radius_2x2, thm1_margins, thm2_margins, thm3_analysis, MarginInputs,
    MarginReport, Thm1Margins, Thm2Margins, Thm3Margins,
};
