//! Per-frame bond data shared by the estimators: the neighbor list plus the
//! scalar distance-derivative of every ordered neighbor entry.

use rayon::prelude::*;

use crate::error::Result;
use crate::potentials::{PotentialModel, OVERLAP_THRESHOLD};
use crate::system::{build_neighbor_list, NeighborList, ParticleState};
use crate::Vec3;

pub(crate) struct BondFrame<'a> {
    pub state: &'a ParticleState,
    pub nl: NeighborList,
    /// CSR offsets into `scalars`, one row per atom.
    offsets: Vec<usize>,
    /// dV/d zeta for each ordered entry, aligned with the CSR entries.
    scalars: Vec<f64>,
}

impl<'a> BondFrame<'a> {
    pub fn build(state: &'a ParticleState, model: &PotentialModel) -> Result<Self> {
        let nl = build_neighbor_list(state, model.cutoff(), 0.0)?;
        let positions = state.positions();
        let cell = state.cell();
        let n = state.len();

        let densities = match model {
            PotentialModel::Eam(eam) => {
                let rho: Vec<f64> = (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let mut acc = 0.0;
                        for nb in nl.neighbors_of(i) {
                            let d = cell.minimum_image_displacement(
                                positions[i],
                                positions[nb.index as usize],
                            );
                            acc += eam.density(d.norm()).0;
                        }
                        acc
                    })
                    .collect();
                Some(rho)
            }
            _ => None,
        };

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0usize);
        for i in 0..n {
            offsets.push(offsets[i] + nl.neighbors_of(i).len());
        }
        let mut scalars = vec![0.0; offsets[n]];
        {
            // Borrow disjoint rows in parallel.
            let rows: Vec<&mut [f64]> = split_rows(&mut scalars, &offsets);
            rows.into_par_iter().enumerate().for_each(|(i, row)| {
                for (k, nb) in nl.neighbors_of(i).iter().enumerate() {
                    let j = nb.index as usize;
                    let d = cell.minimum_image_displacement(positions[i], positions[j]);
                    let r = d.norm();
                    row[k] = if r >= model.cutoff() || r < OVERLAP_THRESHOLD {
                        0.0
                    } else {
                        match model {
                            PotentialModel::Lj(p) => p.eval(r).map(|x| x.1).unwrap_or(0.0),
                            PotentialModel::PairTable(t) => t.eval(r).map(|x| x.1).unwrap_or(0.0),
                            PotentialModel::Eam(p) => {
                                let rho = densities.as_ref().unwrap();
                                let dv = p.pair(r).map(|x| x.1).unwrap_or(0.0);
                                let (_, fprime) = p.density(r);
                                let (_, ui) = p.embed(rho[i]);
                                let (_, uj) = p.embed(rho[j]);
                                dv + (ui + uj) * fprime
                            }
                        }
                    };
                }
            });
        }

        Ok(BondFrame {
            state,
            nl,
            offsets,
            scalars,
        })
    }

    /// Iterates the ordered neighbor entries of `alpha`:
    /// `(beta, displacement x_beta - x_alpha, dV/d zeta)`.
    #[inline]
    pub fn for_each_bond_of(&self, alpha: usize, mut f: impl FnMut(usize, Vec3, f64)) {
        let positions = self.state.positions();
        let cell = self.state.cell();
        let base = self.offsets[alpha];
        for (k, nb) in self.nl.neighbors_of(alpha).iter().enumerate() {
            let j = nb.index as usize;
            let d = cell.minimum_image_displacement(positions[alpha], positions[j]);
            f(j, d, self.scalars[base + k]);
        }
    }
}

fn split_rows<'s>(data: &'s mut [f64], offsets: &[usize]) -> Vec<&'s mut [f64]> {
    let mut rows = Vec::with_capacity(offsets.len() - 1);
    let mut rest = data;
    for w in offsets.windows(2) {
        let (row, tail) = rest.split_at_mut(w[1] - w[0]);
        rows.push(row);
        rest = tail;
    }
    rows
}
