//! The concrete switching adaptive controllers, the known-parameter deadbeat
//! baseline, and the polynomial/Sylvester machinery for pole placement.

mod diophantine;
mod osa;
mod pole_placement;
mod polynomial;

pub use diophantine::{pp_solve_diophantine, sylvester_matrix, DiophantineSolution, CONDITION_LIMIT};
pub use osa::{osa_control, osa_switch, OsaController};
pub use pole_placement::{
    deadbeat_baseline, pp_control, pp_filtered_reference, pp_performance, pp_switch,
    DeadbeatController, PpController,
};
pub use polynomial::Polynomial;
