//! Isolated cube in vacuum: kinetic, potential and total virial pressure as
//! a function of time. The total relaxes to zero as the cube equilibrates
//! while the kinetic and potential parts settle on equal and opposite
//! values.

use std::path::Path;

use crate::config::RunConfig;
use crate::dynamics::{initialize_velocities, run_nve_observed, IntegratorConfig};
use crate::elasticity::relaxed_lattice_constant;
use crate::error::Result;
use crate::estimators::virial_pressure_parts;
use crate::experiments::{stress_unit, write_config_echo, write_csv};
use crate::system::{build_fcc_lattice, SimulationCell};
use crate::Vec3;

#[derive(Debug, Clone)]
pub struct Exp1Result {
    pub times: Vec<f64>,
    pub p_kinetic: Vec<f64>,
    pub p_potential: Vec<f64>,
    pub p_total: Vec<f64>,
    /// Means over the second half of the run.
    pub mean_kinetic: f64,
    pub mean_total: f64,
    /// Kinetic temperature (3N-3 degrees of freedom) over the second half.
    pub mean_temperature: f64,
    pub n_atoms: usize,
    pub volume: f64,
}

pub fn run_experiment_1(cfg: &RunConfig, outdir: &Path) -> Result<Exp1Result> {
    let mut cfg = cfg.clone();
    let cells: usize = cfg.resolve("experiment", "cells", "10").parse().unwrap_or(10);
    let temperature: f64 = cfg
        .resolve("experiment", "temperature", "0.1")
        .parse()
        .map_err(|_| crate::error::Error::config("bad experiment temperature"))?;
    let dt: f64 = cfg.resolve("experiment", "dt", "0.002").parse().unwrap_or(0.002);
    let steps: usize = cfg
        .resolve("experiment", "measure_steps", "20000")
        .parse()
        .unwrap_or(20000);
    let stride: usize = cfg.resolve("experiment", "stride", "20").parse().unwrap_or(20);
    let seed: u64 = cfg.resolve("experiment", "seed", "12345").parse().unwrap_or(12345);
    write_config_echo(&cfg, outdir)?;

    let model = cfg.potential()?;
    let a0 = relaxed_lattice_constant(&model, 1.2, 2.4)?;
    let lattice = build_fcc_lattice(cells, cells, cells, a0, "Al")?;
    let extent = cells as f64 * a0;
    // Free cube floating in vacuum: finite non-periodic cell with headroom.
    let free_cell = SimulationCell::new(Vec3::new(3.0 * extent, 3.0 * extent, 3.0 * extent), [false; 3])?;
    let centered = lattice.with_cell(free_cell)?;
    let centered = centered.with_positions(
        centered
            .positions()
            .iter()
            .map(|p| p + Vec3::new(extent, extent, extent))
            .collect(),
    )?;
    let state = initialize_velocities(&centered, temperature, seed)?;
    let volume = extent.powi(3);
    let n_atoms = state.len();

    let integ = IntegratorConfig {
        dt,
        steps,
        snapshot_stride: stride,
        seed,
        skin: 0.3,
    };
    let mut times = Vec::new();
    let mut p_kin = Vec::new();
    let mut p_pot = Vec::new();
    let mut kinetic_energies = Vec::new();
    let template = state.clone();
    let mut sample_error: Option<crate::error::Error> = None;
    run_nve_observed(&state, &model, &integ, |obs| {
        if obs.step % stride != 0 || sample_error.is_some() {
            return;
        }
        let frame = template
            .with_positions(obs.positions.to_vec())
            .and_then(|s| s.with_velocities(obs.velocities.to_vec()));
        match frame.and_then(|f| virial_pressure_parts(&f, &model, volume)) {
            Ok((pk, pv)) => {
                times.push(obs.time);
                p_kin.push(pk);
                p_pot.push(pv);
                kinetic_energies.push(obs.kinetic_energy);
            }
            Err(e) => sample_error = Some(e),
        }
    })?;
    if let Some(e) = sample_error {
        return Err(e);
    }

    let p_tot: Vec<f64> = p_kin.iter().zip(&p_pot).map(|(a, b)| a + b).collect();
    let half = times.len() / 2;
    let mean = |v: &[f64]| v[half..].iter().sum::<f64>() / (v.len() - half) as f64;
    let mean_kinetic = mean(&p_kin);
    let mean_total = mean(&p_tot);
    let mean_ke = mean(&kinetic_energies);
    let mean_temperature = 2.0 * mean_ke / (3 * n_atoms - 3) as f64;

    let unit = stress_unit(&cfg);
    let headers = [
        "time".to_string(),
        format!("p_kinetic_{unit}"),
        format!("p_potential_{unit}"),
        format!("p_total_{unit}"),
    ];
    write_csv(
        &outdir.join("pressure_vs_time.csv"),
        &headers.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        times
            .iter()
            .zip(p_kin.iter().zip(p_pot.iter().zip(&p_tot)))
            .map(|(&t, (&k, (&v, &tot)))| vec![t, k, v, tot]),
    )?;

    Ok(Exp1Result {
        times,
        p_kinetic: p_kin,
        p_potential: p_pot,
        p_total: p_tot,
        mean_kinetic,
        mean_total,
        mean_temperature,
        n_atoms,
        volume,
    })
}
