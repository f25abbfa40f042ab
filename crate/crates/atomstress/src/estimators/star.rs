use rayon::prelude::*;

use crate::error::Result;
use crate::estimators::{EstimatorTag, FieldGrid, PointStress, StressField};
use crate::potentials::{multibody_eval, PotentialModel};
use crate::system::{build_neighbor_list, ParticleState};
use crate::weighting::WeightingFunction;
use crate::Mat3;

/// The rejected estimator `sigma* = sum_(a != b) f_ab (x) (x - x_a)
/// a(|x - x_a|)` with `a(u) = u^-3 Int_0^u s^2 w(s) ds`.
///
/// Because only `f_ab` depends on b, the double sum collapses to the net
/// per-particle forces. The radial factor decays like `1/(4 pi u^3)` but
/// never vanishes, so a relaxed finite body radiates nonzero "stress"
/// everywhere; intended for finite (non-periodic) bodies.
pub fn stress_star_counterexample(
    state: &ParticleState,
    wf: &WeightingFunction,
    grid: &FieldGrid,
    model: &PotentialModel,
) -> Result<StressField> {
    let nl = build_neighbor_list(state, model.cutoff(), 0.0)?;
    let report = multibody_eval(state, &nl, model)?;
    let positions = state.positions();
    let w0_third = wf.eval(0.0) / 3.0;

    let samples: Vec<PointStress> = grid
        .points()
        .par_iter()
        .map(|&x| {
            let mut potential = Mat3::zeros();
            for (i, f) in report.forces.iter().enumerate() {
                let rel = x - positions[i];
                let u = rel.norm();
                let a_hat = if u < 1e-12 {
                    w0_third
                } else {
                    wf.radial_second_moment(u) / (u * u * u)
                };
                potential += *f * rel.transpose() * a_hat;
            }
            PointStress {
                kinetic: Mat3::zeros(),
                potential,
            }
        })
        .collect();

    Ok(StressField {
        grid: grid.clone(),
        samples,
        estimator: EstimatorTag::StressStar,
        window: (0.0, 0.0),
    })
}

/// `a(u)` saturation helper exposed for tests: for compact kernels and
/// u beyond the support, `a(u) = 1/(4 pi u^3)`.
pub fn radial_decay_factor(wf: &WeightingFunction, u: f64) -> f64 {
    if u <= 0.0 {
        wf.eval(0.0) / 3.0
    } else {
        wf.radial_second_moment(u) / (u * u * u)
    }
}
