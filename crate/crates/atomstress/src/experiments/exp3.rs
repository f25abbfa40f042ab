//! Uniform uniaxial stress in a periodic crystal: dependence of each
//! estimator on the averaging-domain size. The periodic box is strained per
//! the linear-elastic solution so the exact stress is sigma11 = 1.

use std::path::Path;

use crate::config::RunConfig;
use crate::elasticity::{
    cubic_constants_fd, engineering_moduli, relaxed_lattice_constant, uniaxial_cell_strain,
};
use crate::error::Result;
use crate::estimators::{
    da_stress, hardy_stress, tsai_traction_multi, virial_stress, FieldGrid, PlanarProbe,
    VelocityRule, VirialDomain,
};
use crate::experiments::{stress_unit, write_config_echo, write_csv};
use crate::system::{build_fcc_lattice, Trajectory};
use crate::weighting::WeightingFunction;
use crate::Vec3;

#[derive(Debug, Clone)]
pub struct Exp3Result {
    /// Normalized domain sizes s = d / (cells * a).
    pub s_values: Vec<f64>,
    pub hardy: Vec<f64>,
    pub virial: Vec<f64>,
    pub tsai: Vec<f64>,
    pub da: Vec<f64>,
    /// The exact applied stress (1 by construction).
    pub exact: f64,
    pub lattice_constant: f64,
}

pub fn run_experiment_3(cfg: &RunConfig, outdir: &Path) -> Result<Exp3Result> {
    let mut cfg = cfg.clone();
    let cells: usize = cfg.resolve("experiment", "cells", "10").parse().unwrap_or(10);
    let sigma: f64 = cfg.resolve("experiment", "sigma", "1.0").parse().unwrap_or(1.0);
    let ladder_text = cfg.resolve(
        "experiment",
        "ladder",
        "0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8 0.9 1.0",
    );
    let s_values: Vec<f64> = ladder_text
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| crate::error::Error::config("bad [experiment] ladder"))?;
    write_config_echo(&cfg, outdir)?;

    let model = cfg.potential()?;
    let a0 = relaxed_lattice_constant(&model, 1.2, 2.4)?;
    let constants = cubic_constants_fd(&model, a0)?;
    let moduli = engineering_moduli(&constants);
    let (l1, l2, l3) = uniaxial_cell_strain(sigma, &moduli, cells, a0)?;

    // Affinely strain the periodic crystal to the prescribed box.
    let lattice = build_fcc_lattice(cells, cells, cells, a0, "Al")?;
    let base = cells as f64 * a0;
    let scale = Vec3::new(l1 / base, l2 / base, l3 / base);
    let strained = lattice
        .with_positions(
            lattice
                .positions()
                .iter()
                .map(|p| Vec3::new(p.x * scale.x, p.y * scale.y, p.z * scale.z))
                .collect(),
        )?
        .with_cell(lattice.cell().with_lengths(Vec3::new(l1, l2, l3))?)?;
    let center = Vec3::new(0.5 * l1, 0.5 * l2, 0.5 * l3);
    let traj = Trajectory::single(strained);
    let grid = FieldGrid::from_points(vec![center])?;

    let mut hardy = Vec::new();
    let mut virial = Vec::new();
    let mut da = Vec::new();
    let mut probes = Vec::new();
    for &s in &s_values {
        let d = s * base;
        let wf = WeightingFunction::constant_mollified(0.5 * d)?;
        let h = hardy_stress(&traj, &wf, &grid, &model)?;
        hardy.push(h.samples[0].total()[(0, 0)]);
        let v = virial_stress(
            &traj,
            VirialDomain::Sphere {
                center,
                radius: 0.5 * d,
            },
            &model,
        )?;
        virial.push(v.total()[(0, 0)]);
        let dfield = da_stress(&traj.snapshots()[0].state, &wf, &grid, &model)?;
        da.push(dfield.samples[0].total()[(0, 0)]);
        probes.push(PlanarProbe::axis_aligned(center, 0, d)?);
    }
    let tractions = tsai_traction_multi(
        &traj,
        &probes,
        VelocityRule::CrossingLimit {
            slab_half_thickness: a0,
        },
        &model,
    )?;
    let tsai: Vec<f64> = tractions.iter().map(|t| t.total().x).collect();

    let unit = stress_unit(&cfg);
    let headers = [
        "s_domain".to_string(),
        format!("hardy_sigma11_{unit}"),
        format!("virial_sigma11_{unit}"),
        format!("tsai_sigma11_{unit}"),
        format!("da_sigma11_{unit}"),
        format!("exact_sigma11_{unit}"),
    ];
    write_csv(
        &outdir.join("stress_vs_domain_size.csv"),
        &headers.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        s_values
            .iter()
            .enumerate()
            .map(|(i, &s)| vec![s, hardy[i], virial[i], tsai[i], da[i], sigma]),
    )?;

    Ok(Exp3Result {
        s_values,
        hardy,
        virial,
        tsai,
        da,
        exact: sigma,
        lattice_constant: a0,
    })
}
