//! Interatomic potentials, total forces and the central-force decomposition.

pub mod decomposition;
mod eam;
mod lj;
mod pair_table;

pub use decomposition::{alternate_extension_forces_1d, noncentral_three_body_decomposition, Extension1d};
pub use eam::EamPotential;
pub use lj::LjPotential;
pub use pair_table::PairTable;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::system::{NeighborList, ParticleState};
use crate::Vec3;

/// Separation below which two particles are treated as overlapping.
pub const OVERLAP_THRESHOLD: f64 = 1e-9;

/// An interatomic potential model. Energy is a continuously differentiable
/// function of the interparticle distances inside the cutoff; energy and its
/// distance-derivatives vanish at and beyond the cutoff.
#[derive(Debug, Clone)]
pub enum PotentialModel {
    Lj(LjPotential),
    Eam(EamPotential),
    PairTable(PairTable),
}

impl PotentialModel {
    pub fn lj() -> Self {
        PotentialModel::Lj(LjPotential::default())
    }

    pub fn eam() -> Self {
        PotentialModel::Eam(EamPotential::default())
    }

    pub fn cutoff(&self) -> f64 {
        match self {
            PotentialModel::Lj(p) => p.cutoff,
            PotentialModel::Eam(p) => p.cutoff,
            PotentialModel::PairTable(t) => t.cutoff(),
        }
    }
}

/// One central-force contribution `f_ab` on particle `alpha` due to `beta`.
///
/// The force is parallel to the minimum-image direction from `alpha` to
/// `beta` and satisfies `f_ab = -f_ba` exactly. `shift` places the partner
/// at its minimum-image position (in cell-length units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondForceTerm {
    pub alpha: usize,
    pub beta: usize,
    pub shift: [i8; 3],
    pub force: Vec3,
}

/// Energy, per-particle forces and the full list of bond terms.
#[derive(Debug, Clone)]
pub struct ForceReport {
    pub energy: f64,
    pub forces: Vec<Vec3>,
    pub bond_terms: Vec<BondForceTerm>,
}

/// One unordered pair with its scalar distance-derivative and geometry;
/// the lean representation the estimators consume.
#[derive(Debug, Clone, Copy)]
pub struct PairTerm {
    pub alpha: usize,
    pub beta: usize,
    pub shift: [i8; 3],
    /// dV/d zeta_ab evaluated at the configuration.
    pub scalar: f64,
    /// Minimum-image vector x_beta - x_alpha.
    pub displacement: Vec3,
}

impl PairTerm {
    /// Force on `alpha` due to `beta` (Eq. of the central-force split).
    pub fn force_on_alpha(&self) -> Vec3 {
        let r = self.displacement.norm();
        self.scalar * self.displacement / r
    }
}

/// Electron densities for each particle under an EAM model (zeros otherwise).
fn eam_densities(state: &ParticleState, nl: &NeighborList, eam: &EamPotential) -> Result<Vec<f64>> {
    let positions = state.positions();
    let cell = state.cell();
    (0..state.len())
        .into_par_iter()
        .map(|i| {
            let mut rho = 0.0;
            for nb in nl.neighbors_of(i) {
                let j = nb.index as usize;
                let d = cell.minimum_image_displacement(positions[i], positions[j]);
                let r = d.norm();
                if r < OVERLAP_THRESHOLD {
                    return Err(Error::Overlap(i.min(j), i.max(j), r));
                }
                rho += eam.density(r).0;
            }
            Ok(rho)
        })
        .collect()
}

/// Evaluates each unordered pair's scalar distance-derivative once.
///
/// Output is sorted by (alpha, beta) so downstream accumulation is
/// deterministic regardless of thread count.
pub fn pair_terms(state: &ParticleState, nl: &NeighborList, model: &PotentialModel) -> Result<Vec<PairTerm>> {
    let positions = state.positions();
    let cell = state.cell();
    let densities = match model {
        PotentialModel::Eam(eam) => Some(eam_densities(state, nl, eam)?),
        _ => None,
    };
    let per_atom: Vec<Vec<PairTerm>> = (0..state.len())
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for nb in nl.neighbors_of(i) {
                let j = nb.index as usize;
                if j <= i {
                    continue;
                }
                let d = cell.minimum_image_displacement(positions[i], positions[j]);
                let r = d.norm();
                if r < OVERLAP_THRESHOLD {
                    return Err(Error::Overlap(i, j, r));
                }
                if r >= model.cutoff() {
                    continue;
                }
                let scalar = match model {
                    PotentialModel::Lj(p) => p.eval(r)?.1,
                    PotentialModel::PairTable(t) => t.eval(r)?.1,
                    PotentialModel::Eam(p) => {
                        let rho = densities.as_ref().unwrap();
                        let dv = p.pair(r)?.1;
                        let (_, fprime) = p.density(r);
                        let (_, ui) = p.embed(rho[i]);
                        let (_, uj) = p.embed(rho[j]);
                        dv + (ui + uj) * fprime
                    }
                };
                out.push(PairTerm {
                    alpha: i,
                    beta: j,
                    shift: nb.shift,
                    scalar,
                    displacement: d,
                });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_atom.into_iter().flatten().collect())
}

/// Full evaluation: energy, per-particle forces, and every bond term
/// (both orders, so each particle's terms sum to its force).
pub fn multibody_eval(state: &ParticleState, nl: &NeighborList, model: &PotentialModel) -> Result<ForceReport> {
    if nl.n_particles() != state.len() {
        return Err(Error::invalid("neighbor list does not match particle count"));
    }
    if nl.cutoff() < model.cutoff() {
        return Err(Error::invalid(format!(
            "neighbor list cutoff {} below model cutoff {}",
            nl.cutoff(),
            model.cutoff()
        )));
    }
    let terms = pair_terms(state, nl, model)?;
    let energy = total_energy(state, nl, model)?;
    let mut forces = vec![Vec3::zeros(); state.len()];
    let mut bond_terms = Vec::with_capacity(2 * terms.len());
    for t in &terms {
        let f = t.force_on_alpha();
        forces[t.alpha] += f;
        forces[t.beta] -= f;
        bond_terms.push(BondForceTerm {
            alpha: t.alpha,
            beta: t.beta,
            shift: t.shift,
            force: f,
        });
        bond_terms.push(BondForceTerm {
            alpha: t.beta,
            beta: t.alpha,
            shift: [-t.shift[0], -t.shift[1], -t.shift[2]],
            force: -f,
        });
    }
    bond_terms.sort_by_key(|t| (t.alpha, t.beta, t.shift));
    Ok(ForceReport {
        energy,
        forces,
        bond_terms,
    })
}

/// Total potential energy; deterministic per-atom accumulation.
pub fn total_energy(state: &ParticleState, nl: &NeighborList, model: &PotentialModel) -> Result<f64> {
    let positions = state.positions();
    let cell = state.cell();
    let densities = match model {
        PotentialModel::Eam(eam) => Some(eam_densities(state, nl, eam)?),
        _ => None,
    };
    let per_atom: Vec<f64> = (0..state.len())
        .into_par_iter()
        .map(|i| {
            let mut e = 0.0;
            for nb in nl.neighbors_of(i) {
                let j = nb.index as usize;
                let d = cell.minimum_image_displacement(positions[i], positions[j]);
                let r = d.norm();
                if r < OVERLAP_THRESHOLD {
                    return Err(Error::Overlap(i.min(j), i.max(j), r));
                }
                if r >= model.cutoff() {
                    continue;
                }
                e += 0.5
                    * match model {
                        PotentialModel::Lj(p) => p.eval(r)?.0,
                        PotentialModel::PairTable(t) => t.eval(r)?.0,
                        PotentialModel::Eam(p) => p.pair(r)?.0,
                    };
            }
            if let (PotentialModel::Eam(p), Some(rho)) = (model, densities.as_ref()) {
                e += p.embed(rho[i]).0;
            }
            Ok(e)
        })
        .collect::<Result<_>>()?;
    Ok(per_atom.iter().sum())
}

/// Reusable scratch buffers for the force fast path.
#[derive(Debug, Default)]
pub struct ForceWorkspace {
    rho: Vec<f64>,
    atom_energy: Vec<f64>,
}

/// Forces only, written into `forces` (resized as needed); returns the
/// energy. Each atom accumulates over its full neighbor list in canonical
/// order, so results are bitwise reproducible for any thread count.
pub fn eval_forces(
    state: &ParticleState,
    nl: &NeighborList,
    model: &PotentialModel,
    forces: &mut Vec<Vec3>,
) -> Result<f64> {
    let mut ws = ForceWorkspace::default();
    eval_forces_with(state, nl, model, forces, &mut ws)
}

pub fn eval_forces_with(
    state: &ParticleState,
    nl: &NeighborList,
    model: &PotentialModel,
    forces: &mut Vec<Vec3>,
    ws: &mut ForceWorkspace,
) -> Result<f64> {
    let n = state.len();
    let positions = state.positions();
    let cell = state.cell();
    forces.clear();
    forces.resize(n, Vec3::zeros());
    ws.atom_energy.clear();
    ws.atom_energy.resize(n, 0.0);

    if let PotentialModel::Eam(eam) = model {
        ws.rho.clear();
        ws.rho.resize(n, 0.0);
        ws.rho
            .par_iter_mut()
            .enumerate()
            .try_for_each(|(i, rho)| -> Result<()> {
                let mut acc = 0.0;
                for nb in nl.neighbors_of(i) {
                    let j = nb.index as usize;
                    let d = cell.minimum_image_displacement(positions[i], positions[j]);
                    let r = d.norm();
                    if r < OVERLAP_THRESHOLD {
                        return Err(Error::Overlap(i.min(j), i.max(j), r));
                    }
                    acc += eam.density(r).0;
                }
                *rho = acc;
                Ok(())
            })?;
    }

    let rho = &ws.rho;
    forces
        .par_iter_mut()
        .zip(ws.atom_energy.par_iter_mut())
        .enumerate()
        .try_for_each(|(i, (force, energy))| -> Result<()> {
            let mut f = Vec3::zeros();
            let mut e = 0.0;
            for nb in nl.neighbors_of(i) {
                let j = nb.index as usize;
                let d = cell.minimum_image_displacement(positions[i], positions[j]);
                let r = d.norm();
                if r < OVERLAP_THRESHOLD {
                    return Err(Error::Overlap(i.min(j), i.max(j), r));
                }
                if r >= model.cutoff() {
                    continue;
                }
                let (pair_e, scalar) = match model {
                    PotentialModel::Lj(p) => p.eval(r)?,
                    PotentialModel::PairTable(t) => t.eval(r)?,
                    PotentialModel::Eam(p) => {
                        let (pe, dv) = p.pair(r)?;
                        let (_, fprime) = p.density(r);
                        let (_, ui) = p.embed(rho[i]);
                        let (_, uj) = p.embed(rho[j]);
                        (pe, dv + (ui + uj) * fprime)
                    }
                };
                e += 0.5 * pair_e;
                f += scalar * d / r;
            }
            if let PotentialModel::Eam(p) = model {
                e += p.embed(rho[i]).0;
            }
            *force = f;
            *energy = e;
            Ok(())
        })?;

    Ok(ws.atom_energy.iter().sum())
}
