//! Periodic crystal at low temperature: traction across a Tsai plane swept
//! through a lattice plane. The kinetic and potential parts trade place as
//! the plane approaches the atom layer while their sum stays constant.

use std::path::Path;

use crate::config::RunConfig;
use crate::dynamics::{initialize_velocities, run_nve, IntegratorConfig};
use crate::elasticity::relaxed_lattice_constant;
use crate::error::Result;
use crate::estimators::{tsai_traction_multi, PlanarProbe, VelocityRule};
use crate::experiments::{stress_unit, write_config_echo, write_csv};
use crate::system::build_fcc_lattice;
use crate::Vec3;

#[derive(Debug, Clone)]
pub struct Exp2Result {
    /// Normalized plane positions s_P = (x_P - x_L) / dx.
    pub s_values: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub potential: Vec<f64>,
    pub total: Vec<f64>,
    pub crossings: Vec<usize>,
}

pub fn run_experiment_2(cfg: &RunConfig, outdir: &Path) -> Result<Exp2Result> {
    let mut cfg = cfg.clone();
    let cells: usize = cfg.resolve("experiment", "cells", "6").parse().unwrap_or(6);
    let temperature: f64 = cfg
        .resolve("experiment", "temperature", "0.1")
        .parse()
        .unwrap_or(0.1);
    let dt: f64 = cfg.resolve("experiment", "dt", "0.002").parse().unwrap_or(0.002);
    let equil_steps: usize = cfg
        .resolve("experiment", "equil_steps", "4000")
        .parse()
        .unwrap_or(4000);
    let measure_steps: usize = cfg
        .resolve("experiment", "measure_steps", "9000")
        .parse()
        .unwrap_or(9000);
    let stride: usize = cfg.resolve("experiment", "stride", "3").parse().unwrap_or(3);
    let seed: u64 = cfg.resolve("experiment", "seed", "777").parse().unwrap_or(777);
    let samples: usize = cfg
        .resolve("experiment", "plane_samples", "21")
        .parse()
        .unwrap_or(21);
    write_config_echo(&cfg, outdir)?;

    let model = cfg.potential()?;
    let a0 = relaxed_lattice_constant(&model, 1.2, 2.4)?;
    let lattice = build_fcc_lattice(cells, cells, cells, a0, "Al")?;
    let state = initialize_velocities(&lattice, temperature, seed)?;

    // Equilibrate, then record the measurement window densely.
    let equil = IntegratorConfig {
        dt,
        steps: equil_steps,
        snapshot_stride: equil_steps.max(1),
        seed,
        skin: 0.3,
    };
    let warm = run_nve(&state, &model, &equil)?;
    let warm_state = warm.snapshots().last().unwrap().state.clone();
    let measure = IntegratorConfig {
        dt,
        steps: measure_steps,
        snapshot_stride: stride,
        seed,
        skin: 0.3,
    };
    let traj = run_nve(&warm_state, &model, &measure)?;

    // Sweep s_P in [-0.1, 0.1] around the lattice plane at x = 0, in units
    // of the (100) interplane spacing a/2.
    let dx = 0.5 * a0;
    let lengths = warm_state.cell().lengths();
    let mut probes = Vec::new();
    let mut s_values = Vec::new();
    for k in 0..samples {
        let s = -0.1 + 0.2 * k as f64 / (samples - 1) as f64;
        s_values.push(s);
        let center = Vec3::new(s * dx, 0.5 * lengths.y, 0.5 * lengths.z);
        probes.push(PlanarProbe::new(
            center,
            Vec3::new(1.0, 0.0, 0.0),
            (lengths.y, lengths.z),
        )?);
    }
    let rule = VelocityRule::CrossingLimit {
        slab_half_thickness: a0,
    };
    let tractions = tsai_traction_multi(&traj, &probes, rule, &model)?;

    let kinetic: Vec<f64> = tractions.iter().map(|t| t.kinetic.x).collect();
    let potential: Vec<f64> = tractions.iter().map(|t| t.potential.x).collect();
    let total: Vec<f64> = tractions.iter().map(|t| t.total().x).collect();
    let crossings: Vec<usize> = tractions.iter().map(|t| t.crossing_events).collect();

    let unit = stress_unit(&cfg);
    let headers = [
        "s_plane".to_string(),
        format!("sigma11_kinetic_{unit}"),
        format!("sigma11_potential_{unit}"),
        format!("sigma11_total_{unit}"),
        "crossing_events".to_string(),
    ];
    write_csv(
        &outdir.join("tsai_plane_sweep.csv"),
        &headers.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        s_values
            .iter()
            .enumerate()
            .map(|(i, &s)| vec![s, kinetic[i], potential[i], total[i], crossings[i] as f64]),
    )?;

    Ok(Exp2Result {
        s_values,
        kinetic,
        potential,
        total,
        crossings,
    })
}
