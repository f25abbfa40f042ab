use crate::error::{Error, Result};
use crate::potentials::{eval_forces_with, ForceWorkspace, PotentialModel};
use crate::system::{build_neighbor_list, NeighborList, ParticleState, Snapshot, Trajectory};
use crate::Vec3;

/// NVE integration parameters.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub steps: usize,
    pub snapshot_stride: usize,
    pub seed: u64,
    /// Verlet-list skin; the list is rebuilt when any particle has moved
    /// more than half of it.
    pub skin: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 0.002,
            steps: 1000,
            snapshot_stride: 10,
            seed: 0,
            skin: 0.3,
        }
    }
}

impl IntegratorConfig {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::invalid("snapshot stride must be at least 1"));
        }
        if !(self.skin >= 0.0) {
            return Err(Error::invalid("skin must be non-negative"));
        }
        Ok(())
    }
}

/// Per-step view handed to observers after each completed step.
pub struct StepObservation<'a> {
    pub step: usize,
    pub time: f64,
    pub positions: &'a [Vec3],
    pub velocities: &'a [Vec3],
    pub potential_energy: f64,
    pub kinetic_energy: f64,
}

/// Velocity-Verlet NVE run collecting snapshots every `snapshot_stride`
/// steps (step 0 included).
pub fn run_nve(state: &ParticleState, model: &PotentialModel, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let mut snapshots = Vec::new();
    run_nve_observed(state, model, cfg, |obs| {
        if obs.step % cfg.snapshot_stride == 0 {
            snapshots.push(Snapshot {
                time: obs.time,
                state: state
                    .with_positions(obs.positions.to_vec())
                    .and_then(|s| s.with_velocities(obs.velocities.to_vec()))
                    .expect("state arrays are consistent"),
            });
        }
    })?;
    Trajectory::new(snapshots)
}

/// Velocity-Verlet NVE run streaming every step to `observer` (including the
/// initial step 0 state). Aborts with a diagnostic if the total energy
/// drifts by more than ten times its initial magnitude.
pub fn run_nve_observed(
    state: &ParticleState,
    model: &PotentialModel,
    cfg: &IntegratorConfig,
    mut observer: impl FnMut(&StepObservation),
) -> Result<ParticleState> {
    cfg.validate()?;
    let n = state.len();
    let masses = state.masses();
    let mut positions = state.positions().to_vec();
    let mut velocities = state.velocities().to_vec();
    let mut forces = Vec::new();
    let mut ws = ForceWorkspace::default();

    let mut current = state.clone();
    let mut nl: NeighborList = build_neighbor_list(&current, model.cutoff(), cfg.skin)?;
    let mut potential = eval_forces_with(&current, &nl, model, &mut forces, &mut ws)?;
    let kinetic = |velocities: &[Vec3]| -> f64 {
        masses
            .iter()
            .zip(velocities)
            .map(|(m, v)| 0.5 * m * v.norm_squared())
            .sum()
    };
    let e0 = potential + kinetic(&velocities);
    let blowup = 10.0 * e0.abs().max(1.0);

    observer(&StepObservation {
        step: 0,
        time: 0.0,
        positions: &positions,
        velocities: &velocities,
        potential_energy: potential,
        kinetic_energy: kinetic(&velocities),
    });

    let half_dt = 0.5 * cfg.dt;
    for step in 1..=cfg.steps {
        for i in 0..n {
            velocities[i] += forces[i] * (half_dt / masses[i]);
            positions[i] += velocities[i] * cfg.dt;
        }
        current = current.with_positions(positions.clone())?;
        if nl.needs_rebuild(&current) {
            nl = build_neighbor_list(&current, model.cutoff(), cfg.skin)?;
        }
        potential = eval_forces_with(&current, &nl, model, &mut forces, &mut ws)?;
        for i in 0..n {
            velocities[i] += forces[i] * (half_dt / masses[i]);
        }

        let ke = kinetic(&velocities);
        let total = potential + ke;
        if (total - e0).abs() > blowup {
            return Err(Error::numerical(format!(
                "energy blow-up at step {step}: E = {total:.6e} vs initial {e0:.6e}; \
                 reduce dt (currently {})",
                cfg.dt
            )));
        }
        observer(&StepObservation {
            step,
            time: step as f64 * cfg.dt,
            positions: &positions,
            velocities: &velocities,
            potential_energy: potential,
            kinetic_energy: ke,
        });
    }
    current.with_velocities(velocities)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::initialize_velocities;
    use crate::system::{build_fcc_lattice, SimulationCell};

    #[test]
    fn perfect_lattice_stays_put() {
        let state = build_fcc_lattice(4, 4, 4, 1.556, "X").unwrap();
        let cfg = IntegratorConfig {
            steps: 50,
            snapshot_stride: 10,
            ..Default::default()
        };
        let traj = run_nve(&state, &PotentialModel::lj(), &cfg).unwrap();
        let last = traj.snapshots().last().unwrap();
        for (p, q) in last.state.positions().iter().zip(state.positions()) {
            assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn bound_pair_conserves_energy() {
        // Small-amplitude oscillation about the pair equilibrium spacing.
        let cell = SimulationCell::cubic(20.0, false).unwrap();
        let r0 = 1.1224679; // near the modified-LJ pair minimum
        let state = ParticleState::at_rest(
            vec![
                Vec3::new(5.0, 5.0, 5.0),
                Vec3::new(5.0 + r0 + 0.002, 5.0, 5.0),
            ],
            1.0,
            "X",
            cell,
        )
        .unwrap();
        let cfg = IntegratorConfig {
            dt: 0.001,
            steps: 100_000,
            snapshot_stride: 100_000,
            ..Default::default()
        };
        let mut e_first = None;
        let mut max_drift = 0.0f64;
        run_nve_observed(&state, &PotentialModel::lj(), &cfg, |obs| {
            let e = obs.potential_energy + obs.kinetic_energy;
            let e0 = *e_first.get_or_insert(e);
            max_drift = max_drift.max((e - e0).abs() / e0.abs());
        })
        .unwrap();
        assert!(max_drift < 1e-8, "relative drift {max_drift}");
    }

    #[test]
    fn momentum_is_conserved_for_isolated_system() {
        let lattice = build_fcc_lattice(2, 2, 2, 1.6, "X").unwrap();
        let cell = SimulationCell::cubic(30.0, false).unwrap();
        let state = lattice.with_cell(cell).unwrap();
        let state = initialize_velocities(&state, 0.05, 11).unwrap();
        let cfg = IntegratorConfig {
            steps: 500,
            snapshot_stride: 500,
            ..Default::default()
        };
        let mut worst = 0.0f64;
        run_nve_observed(&state, &PotentialModel::lj(), &cfg, |obs| {
            let mut p = Vec3::zeros();
            for (m, v) in state.masses().iter().zip(obs.velocities) {
                p += *m * *v;
            }
            worst = worst.max(p.norm());
        })
        .unwrap();
        assert!(worst < 1e-10, "momentum drift {worst}");
    }

    #[test]
    fn identical_runs_are_bitwise_identical_across_thread_counts() {
        let state = build_fcc_lattice(4, 4, 4, 1.6, "X").unwrap();
        let state = initialize_velocities(&state, 0.1, 5).unwrap();
        let cfg = IntegratorConfig {
            steps: 100,
            snapshot_stride: 100,
            ..Default::default()
        };
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run_nve(&state, &PotentialModel::lj(), &cfg).unwrap())
        };
        let a = run(1);
        let b = run(2);
        let pa = a.snapshots().last().unwrap().state.positions();
        let pb = b.snapshots().last().unwrap().state.positions();
        assert_eq!(pa, pb);
    }

    #[test]
    fn blowup_is_reported() {
        // Two overlapping-ish particles with a huge dt explode immediately.
        let cell = SimulationCell::cubic(20.0, false).unwrap();
        let state = ParticleState::at_rest(
            vec![Vec3::new(5.0, 5.0, 5.0), Vec3::new(5.4, 5.0, 5.0)],
            1.0,
            "X",
            cell,
        )
        .unwrap();
        let cfg = IntegratorConfig {
            dt: 0.5,
            steps: 100,
            snapshot_stride: 1,
            ..Default::default()
        };
        let err = run_nve(&state, &PotentialModel::lj(), &cfg).unwrap_err();
        assert!(err.to_string().contains("blow-up") || err.to_string().contains("overlap"),
            "unexpected error: {err}");
    }
}
