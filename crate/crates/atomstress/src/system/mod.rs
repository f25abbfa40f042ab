//! Particle configurations, periodic cells, neighbor lists, lattice
//! generators and trajectory I/O.

mod cell;
mod lattice;
mod neighbors;
mod state;
mod trajectory;
pub mod xyz;

pub use cell::SimulationCell;
pub use lattice::{build_fcc_lattice, carve_plate_with_hole};
pub use neighbors::{build_neighbor_list, NeighborList};
pub use state::ParticleState;
pub use trajectory::{Snapshot, Trajectory};
