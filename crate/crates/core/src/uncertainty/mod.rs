//! Admissible parameter time-variations and the unmodelled-dynamics
//! disturbance model, with independent verifiers for both.

mod time_variation;
mod umd;

pub use time_variation::{
    generate_tv_trajectory, verify_tv_membership, ParameterTrajectory, TimeVariationClass,
    TvMembership, TvMode,
};
pub use umd::{
    umd_disturbance, umd_step, verify_umd_bound, DirectionSource, UmdCheck, UmdSetup, UmdState,
    UmdViolation, UnmodelledDynamicsSpec,
};
