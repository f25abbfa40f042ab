use crate::error::{Error, Result};
use crate::system::SimulationCell;
use crate::Vec3;

/// Positions, velocities, masses and species of N particles plus the cell.
///
/// Immutable once constructed; builders return fresh states.
#[derive(Debug, Clone)]
pub struct ParticleState {
    positions: Vec<Vec3>,
    velocities: Vec<Vec3>,
    masses: Vec<f64>,
    species: Vec<String>,
    cell: SimulationCell,
}

impl ParticleState {
    pub fn new(
        positions: Vec<Vec3>,
        velocities: Vec<Vec3>,
        masses: Vec<f64>,
        species: Vec<String>,
        cell: SimulationCell,
    ) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(Error::invalid("particle state needs at least one particle"));
        }
        if velocities.len() != n || masses.len() != n || species.len() != n {
            return Err(Error::invalid(format!(
                "inconsistent particle arrays: {} positions, {} velocities, {} masses, {} species",
                n,
                velocities.len(),
                masses.len(),
                species.len()
            )));
        }
        if !positions.iter().all(|p| p.iter().all(|c| c.is_finite())) {
            return Err(Error::invalid("positions must be finite"));
        }
        if !masses.iter().all(|&m| m > 0.0 && m.is_finite()) {
            return Err(Error::invalid("all masses must be positive"));
        }
        Ok(ParticleState {
            positions,
            velocities,
            masses,
            species,
            cell,
        })
    }

    /// Uniform species and mass, zero velocities.
    pub fn at_rest(positions: Vec<Vec3>, mass: f64, species: &str, cell: SimulationCell) -> Result<Self> {
        let n = positions.len();
        ParticleState::new(
            positions,
            vec![Vec3::zeros(); n],
            vec![mass; n],
            vec![species.to_string(); n],
            cell,
        )
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: N >= 1
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vec3] {
        &self.velocities
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn cell(&self) -> &SimulationCell {
        &self.cell
    }

    pub fn with_positions(&self, positions: Vec<Vec3>) -> Result<Self> {
        ParticleState::new(
            positions,
            self.velocities.clone(),
            self.masses.clone(),
            self.species.clone(),
            self.cell.clone(),
        )
    }

    pub fn with_velocities(&self, velocities: Vec<Vec3>) -> Result<Self> {
        ParticleState::new(
            self.positions.clone(),
            velocities,
            self.masses.clone(),
            self.species.clone(),
            self.cell.clone(),
        )
    }

    pub fn with_cell(&self, cell: SimulationCell) -> Result<Self> {
        ParticleState::new(
            self.positions.clone(),
            self.velocities.clone(),
            self.masses.clone(),
            self.species.clone(),
            cell,
        )
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass-weighted mean velocity.
    pub fn center_of_mass_velocity(&self) -> Vec3 {
        let mut p = Vec3::zeros();
        for (m, v) in self.masses.iter().zip(&self.velocities) {
            p += *m * *v;
        }
        p / self.total_mass()
    }

    /// Kinetic energy relative to the lab frame.
    pub fn kinetic_energy(&self) -> f64 {
        self.masses
            .iter()
            .zip(&self.velocities)
            .map(|(m, v)| 0.5 * m * v.norm_squared())
            .sum()
    }
}
