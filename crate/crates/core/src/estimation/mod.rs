//! Convex parameter sets, Euclidean projections, and the projection-algorithm
//! estimator used by both switching controllers.

mod estimator;
mod param_set;

pub use estimator::{prediction_error, projection_update, EstimatorState, ZERO_REGRESSOR_GUARD};
pub use param_set::{
    project, ConvexParamSet, Halfspace, ParameterSet, DYKSTRA_MAX_ITERS, DYKSTRA_TOL,
};
