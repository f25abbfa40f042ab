use crate::error::Result;
use crate::potentials::{eval_forces_with, ForceWorkspace, PotentialModel};
use crate::system::{build_neighbor_list, ParticleState};
use crate::Vec3;

/// FIRE minimization parameters. The Fast-Inertial-Relaxation-Engine
/// constants follow the usual published values; only the stopping criteria
/// are exposed.
#[derive(Debug, Clone, Copy)]
pub struct MinimizerConfig {
    /// Convergence threshold on the max per-particle force norm.
    pub force_tolerance: f64,
    pub max_iterations: usize,
    /// Cap on any single-atom displacement per step.
    pub max_step: f64,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        MinimizerConfig {
            force_tolerance: 1e-8,
            max_iterations: 20_000,
            max_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MinimizeReport {
    pub converged: bool,
    pub iterations: usize,
    pub max_force: f64,
    pub energy: f64,
}

const ALPHA_START: f64 = 0.1;
const F_ALPHA: f64 = 0.99;
const F_INC: f64 = 1.1;
const F_DEC: f64 = 0.5;
const N_MIN: usize = 5;
const DT_START: f64 = 0.02;
const DT_MAX: f64 = 0.2;

/// FIRE relaxation toward a force minimum. Steps that would raise the
/// energy are rejected (positions restored, velocities zeroed), which keeps
/// the energy non-increasing across accepted iterations. On hitting the
/// iteration cap the best state found is returned with `converged = false`.
pub fn minimize(
    state: &ParticleState,
    model: &PotentialModel,
    cfg: &MinimizerConfig,
) -> Result<(ParticleState, MinimizeReport)> {
    let n = state.len();
    let masses = state.masses();
    let mut positions = state.positions().to_vec();
    let mut velocities = vec![Vec3::zeros(); n];
    let mut forces = Vec::new();
    let mut ws = ForceWorkspace::default();

    let mut current = state.clone();
    let mut nl = build_neighbor_list(&current, model.cutoff(), 0.3)?;
    let mut energy = eval_forces_with(&current, &nl, model, &mut forces, &mut ws)?;

    let max_force = |forces: &[Vec3]| forces.iter().map(|f| f.norm()).fold(0.0, f64::max);
    let mut fmax = max_force(&forces);
    if fmax < cfg.force_tolerance {
        return Ok((
            current,
            MinimizeReport {
                converged: true,
                iterations: 0,
                max_force: fmax,
                energy,
            },
        ));
    }

    let mut dt = DT_START;
    let mut alpha = ALPHA_START;
    let mut steps_downhill = 0usize;
    let mut iterations = 0usize;

    for _ in 0..cfg.max_iterations {
        iterations += 1;
        // Semi-implicit Euler step with FIRE velocity mixing.
        let mut power = 0.0;
        for i in 0..n {
            velocities[i] += forces[i] * (dt / masses[i]);
            power += forces[i].dot(&velocities[i]);
        }
        if power > 0.0 {
            let vnorm: f64 = velocities.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
            let fnorm: f64 = forces.iter().map(|f| f.norm_squared()).sum::<f64>().sqrt();
            if fnorm > 0.0 {
                let mix = alpha * vnorm / fnorm;
                for i in 0..n {
                    velocities[i] = velocities[i] * (1.0 - alpha) + forces[i] * mix;
                }
            }
            steps_downhill += 1;
            if steps_downhill > N_MIN {
                dt = (dt * F_INC).min(DT_MAX);
                alpha *= F_ALPHA;
            }
        } else {
            for v in velocities.iter_mut() {
                *v = Vec3::zeros();
            }
            dt *= F_DEC;
            alpha = ALPHA_START;
            steps_downhill = 0;
        }

        let prev_positions = positions.clone();
        for i in 0..n {
            let mut dx = velocities[i] * dt;
            let norm = dx.norm();
            if norm > cfg.max_step {
                dx *= cfg.max_step / norm;
            }
            positions[i] += dx;
        }
        current = current.with_positions(positions.clone())?;
        if nl.needs_rebuild(&current) {
            nl = build_neighbor_list(&current, model.cutoff(), 0.3)?;
        }
        let new_energy = eval_forces_with(&current, &nl, model, &mut forces, &mut ws)?;

        if new_energy > energy + 1e-14 * energy.abs().max(1.0) {
            // Uphill step: reject and restart the inertia.
            positions = prev_positions;
            current = current.with_positions(positions.clone())?;
            for v in velocities.iter_mut() {
                *v = Vec3::zeros();
            }
            dt *= F_DEC;
            alpha = ALPHA_START;
            steps_downhill = 0;
            energy = eval_forces_with(&current, &nl, model, &mut forces, &mut ws)?;
        } else {
            energy = new_energy;
        }

        fmax = max_force(&forces);
        if fmax < cfg.force_tolerance {
            return Ok((
                current,
                MinimizeReport {
                    converged: true,
                    iterations,
                    max_force: fmax,
                    energy,
                },
            ));
        }
    }

    Ok((
        current,
        MinimizeReport {
            converged: false,
            iterations,
            max_force: fmax,
            energy,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::build_fcc_lattice;

    #[test]
    fn perfect_lattice_converges_immediately() {
        let state = build_fcc_lattice(4, 4, 4, 1.556, "X").unwrap();
        let (out, report) = minimize(&state, &PotentialModel::lj(), &MinimizerConfig::default()).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 0);
        assert_eq!(out.positions(), state.positions());
    }

    #[test]
    fn perturbed_fcc_relaxes_back() {
        let a = 1.556;
        let ideal = build_fcc_lattice(4, 4, 4, a, "X").unwrap();
        let mut s = 1234u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let perturbed: Vec<Vec3> = ideal
            .positions()
            .iter()
            .map(|p| p + Vec3::new(next(), next(), next()) * (0.05 * a * 2.0))
            .collect();
        let state = ideal.with_positions(perturbed).unwrap();
        let (out, report) = minimize(&state, &PotentialModel::lj(), &MinimizerConfig::default()).unwrap();
        assert!(report.converged, "fmax = {}", report.max_force);
        assert!(report.max_force < 1e-8);
        // Forces vanish and the relaxed positions coincide with the ideal
        // lattice up to the center-of-mass drift of the perturbation.
        let mut drift = Vec3::zeros();
        for (p, q) in out.positions().iter().zip(ideal.positions()) {
            drift += p - q;
        }
        drift /= out.len() as f64;
        for (p, q) in out.positions().iter().zip(ideal.positions()) {
            let d = out.cell().minimum_image_displacement(*p, q + drift);
            assert!(d.norm() < 1e-5, "site error {}", d.norm());
        }
    }

    #[test]
    fn energy_never_increases() {
        let a = 1.556;
        let ideal = build_fcc_lattice(4, 4, 4, a, "X").unwrap();
        let moved: Vec<Vec3> = ideal
            .positions()
            .iter()
            .enumerate()
            .map(|(i, p)| p + Vec3::new(0.04 * ((i % 3) as f64 - 1.0), 0.03, -0.02))
            .collect();
        let state = ideal.with_positions(moved).unwrap();
        // Track energies of accepted iterates via successive one-iteration
        // calls.
        let mut current = state;
        let mut last_energy = f64::INFINITY;
        for _ in 0..40 {
            let (next, report) = minimize(
                &current,
                &PotentialModel::lj(),
                &MinimizerConfig {
                    max_iterations: 1,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(report.energy <= last_energy + 1e-12);
            last_energy = report.energy;
            if report.converged {
                break;
            }
            current = next;
        }
    }
}
