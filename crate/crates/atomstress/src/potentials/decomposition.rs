//! Alternative force decompositions used as property-test fixtures: the
//! non-central three-body split (which violates the strong law of action and
//! reaction) and the two one-dimensional potential extensions whose central
//! decompositions differ while their total forces agree.

use crate::error::{Error, Result};
use crate::potentials::{multibody_eval, PotentialModel};
use crate::system::{build_neighbor_list, ParticleState};
use crate::Vec3;

/// A pair term of the non-central split, `fbar_ab = (f_a - f_b)/3`.
#[derive(Debug, Clone, Copy)]
pub struct NonCentralTerm {
    pub alpha: usize,
    pub beta: usize,
    pub force: Vec3,
}

/// Splits the forces of an isolated 3-particle cluster into the antisymmetric
/// pair terms `fbar_ab = (f_a^int - f_b^int)/3` for the three pairs
/// (1,2), (1,3), (2,3). The terms satisfy the weak law by construction but
/// are generally not parallel to the interparticle lines.
pub fn noncentral_three_body_decomposition(
    cluster: &ParticleState,
    model: &PotentialModel,
) -> Result<Vec<NonCentralTerm>> {
    if cluster.len() != 3 {
        return Err(Error::invalid(format!(
            "non-central 3-body decomposition needs exactly 3 particles, got {}",
            cluster.len()
        )));
    }
    let nl = build_neighbor_list(cluster, model.cutoff(), 0.0)?;
    let report = multibody_eval(cluster, &nl, model)?;
    let f = &report.forces;
    Ok(vec![
        NonCentralTerm {
            alpha: 0,
            beta: 1,
            force: (f[0] - f[1]) / 3.0,
        },
        NonCentralTerm {
            alpha: 0,
            beta: 2,
            force: (f[0] - f[2]) / 3.0,
        },
        NonCentralTerm {
            alpha: 1,
            beta: 2,
            force: (f[1] - f[2]) / 3.0,
        },
    ])
}

/// The two decompositions of the force on particle 1 for three collinear
/// particles: the standard pair split and the Cayley-Menger-augmented
/// extension split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extension1d {
    /// Standard pair decomposition (f12, f13), signed along +x.
    pub standard: (f64, f64),
    /// Alternate extension decomposition (f12~, f13~).
    pub extended: (f64, f64),
}

impl Extension1d {
    pub fn total_standard(&self) -> f64 {
        self.standard.0 + self.standard.1
    }

    pub fn total_extended(&self) -> f64 {
        self.extended.0 + self.extended.1
    }
}

/// Decomposes the force on particle 1 of an ordered collinear triple
/// (x1 < x2 < x3) interacting through the default modified Lennard-Jones
/// pair potential, under the standard extension and under the extension
/// augmented with the three-point Cayley-Menger constraint. The alternate
/// split shifts `8 r12 r23 (r12 + r23)` from the 1-2 term to the 1-3 term;
/// the totals agree exactly.
pub fn alternate_extension_forces_1d(x1: f64, x2: f64, x3: f64) -> Result<Extension1d> {
    if !(x1 < x2 && x2 < x3) {
        return Err(Error::invalid(format!(
            "collinear configuration must be ordered x1 < x2 < x3, got ({x1}, {x2}, {x3})"
        )));
    }
    let lj = crate::potentials::LjPotential::default();
    let r12 = x2 - x1;
    let r13 = x3 - x1;
    let r23 = x3 - x2;
    // f1 = -dV/dx1 with dr12/dx1 = dr13/dx1 = -1: f12 = V'(r12), f13 = V'(r13).
    let f12 = lj.eval(r12)?.1;
    let f13 = lj.eval(r13)?.1;
    let delta = 8.0 * r12 * r23 * (r12 + r23);
    Ok(Extension1d {
        standard: (f12, f13),
        extended: (f12 - delta, f13 + delta),
    })
}
