//! Continuum reference solutions and material-property derivation: cubic
//! elastic constants from the potential, engineering moduli, the anisotropic
//! plate-with-hole field, uniaxial periodic strain setup, and the
//! thermal-stress prediction.

mod kirsch;
mod lattice_sum;
mod moduli;

pub use kirsch::{isotropic_kirsch_stress, KirschField, KirschSolution};
pub use lattice_sum::{cubic_constants_fd, fcc_energy_per_atom, fcc_pressure, relaxed_lattice_constant};
pub use moduli::{engineering_moduli, thermal_stress, uniaxial_cell_strain, CubicConstants, Moduli};
