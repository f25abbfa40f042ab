use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::system::ParticleState;
use crate::Vec3;

/// Draws Maxwell-Boltzmann velocities, removes the center-of-mass momentum,
/// and rescales so the instantaneous kinetic temperature (with the 3N-3
/// degrees of freedom left after the momentum constraint) is exactly
/// `temperature`. Reduced units: k_B = 1.
///
/// The stream cipher generator is seeded explicitly so runs are reproducible
/// across platforms and thread counts.
pub fn initialize_velocities(state: &ParticleState, temperature: f64, seed: u64) -> Result<ParticleState> {
    if !(temperature >= 0.0) {
        return Err(Error::invalid(format!("temperature must be non-negative, got {temperature}")));
    }
    let n = state.len();
    if temperature == 0.0 {
        return state.with_velocities(vec![Vec3::zeros(); n]);
    }
    if n < 2 {
        return Err(Error::invalid(
            "velocity initialization with center-of-mass removal needs at least 2 particles",
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    // Draw at twice the target temperature; the exact scale is irrelevant
    // because of the rescale below, but it keeps draws well-conditioned.
    let mut velocities: Vec<Vec3> = state
        .masses()
        .iter()
        .map(|&m| {
            let sigma = (2.0 * temperature / m).sqrt();
            Vec3::new(
                sigma * gaussian(&mut rng),
                sigma * gaussian(&mut rng),
                sigma * gaussian(&mut rng),
            )
        })
        .collect();

    // Remove center-of-mass momentum.
    let total_mass: f64 = state.masses().iter().sum();
    let mut p = Vec3::zeros();
    for (m, v) in state.masses().iter().zip(&velocities) {
        p += *m * *v;
    }
    let v_com = p / total_mass;
    for v in &mut velocities {
        *v -= v_com;
    }

    // Rescale to exactly (3N - 3) kT / 2 of kinetic energy.
    let ke: f64 = state
        .masses()
        .iter()
        .zip(&velocities)
        .map(|(m, v)| 0.5 * m * v.norm_squared())
        .sum();
    let target = 0.5 * (3 * n - 3) as f64 * temperature;
    let scale = (target / ke).sqrt();
    for v in &mut velocities {
        *v *= scale;
    }
    state.with_velocities(velocities)
}

/// Box-Muller standard normal.
fn gaussian(rng: &mut ChaCha12Rng) -> f64 {
    loop {
        let u1: f64 = rng.gen::<f64>();
        let u2: f64 = rng.gen::<f64>();
        if u1 > f64::MIN_POSITIVE {
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::build_fcc_lattice;

    #[test]
    fn zero_temperature_is_at_rest() {
        let state = build_fcc_lattice(2, 2, 2, 1.5, "X").unwrap();
        let out = initialize_velocities(&state, 0.0, 7).unwrap();
        assert!(out.velocities().iter().all(|v| *v == Vec3::zeros()));
    }

    #[test]
    fn momentum_is_removed() {
        let state = build_fcc_lattice(3, 3, 3, 1.5, "X").unwrap();
        let out = initialize_velocities(&state, 0.7, 42).unwrap();
        let mut p = Vec3::zeros();
        for (m, v) in out.masses().iter().zip(out.velocities()) {
            p += *m * *v;
        }
        assert!(p.norm() < 1e-12, "net momentum {p:?}");
    }

    #[test]
    fn kinetic_temperature_is_exact() {
        let state = build_fcc_lattice(5, 5, 5, 1.5, "X").unwrap();
        let out = initialize_velocities(&state, 1.0, 3).unwrap();
        let n = out.len();
        let t_kin = 2.0 * out.kinetic_energy() / (3 * n - 3) as f64;
        assert!((t_kin - 1.0).abs() < 1e-10, "T = {t_kin}");
    }

    #[test]
    fn same_seed_reproduces_exactly() {
        let state = build_fcc_lattice(2, 2, 2, 1.5, "X").unwrap();
        let a = initialize_velocities(&state, 0.3, 9).unwrap();
        let b = initialize_velocities(&state, 0.3, 9).unwrap();
        assert_eq!(a.velocities(), b.velocities());
        let c = initialize_velocities(&state, 0.3, 10).unwrap();
        assert_ne!(a.velocities(), c.velocities());
    }

    #[test]
    fn single_particle_is_rejected() {
        let cell = crate::system::SimulationCell::cubic(10.0, false).unwrap();
        let state = ParticleState::at_rest(vec![Vec3::zeros()], 1.0, "X", cell).unwrap();
        assert!(initialize_velocities(&state, 1.0, 1).is_err());
        assert!(initialize_velocities(&state, 0.0, 1).is_ok());
    }
}
