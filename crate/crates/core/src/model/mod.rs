//! Plants, gain-bounded maps, the two-part controller interface, and the
//! closed-loop simulator producing certification-ready traces.

mod controller;
mod gain_map;
mod plant;
mod regressor;
mod signal;
mod sim;
mod trace;

pub use controller::{Controller, ZeroController};
pub use gain_map::GainBoundedMap;
pub use plant::{plant_step, PlantSpec};
pub use regressor::{assemble_regressor, PreRegressor, Regressor, SignalHistory};
pub use signal::SignalSource;
pub use sim::{run_closed_loop, run_closed_loop_with, SimOptions};
pub use trace::{fmt_f64, ClosedLoopTrace, TraceStep};
