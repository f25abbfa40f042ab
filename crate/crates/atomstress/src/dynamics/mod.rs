//! Minimal NVE molecular dynamics, velocity initialization, and FIRE
//! lattice-statics minimization.

mod fire;
mod velocities;
mod verlet;

pub use fire::{minimize, MinimizeReport, MinimizerConfig};
pub use velocities::initialize_velocities;
pub use verlet::{run_nve, run_nve_observed, IntegratorConfig, StepObservation};
