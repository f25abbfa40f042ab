use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::frame::BondFrame;
use crate::estimators::geometry::{point_segment_distance, BallCollector, PeriodicImages};
use crate::estimators::{EstimatorTag, FieldGrid, PointStress, StressField};
use crate::potentials::PotentialModel;
use crate::system::Trajectory;
use crate::weighting::{bond_function, WeightingFunction};
use crate::{Mat3, Vec3};

/// Time-averaged Hardy stress over a snapshot window.
///
/// Potential part: `1/(2 tau) sum_(a != b) Int [-f_ab (x) (x_a - x_b)]
/// b(x; x_a, x_b) dt`, with the bond function summed over the periodic
/// images that can reach the kernel. Kinetic part: `-1/tau sum_a Int
/// w(x_a - x) m_a v_rel (x) v_rel dt`, with `v_rel` taken relative to the
/// kernel-weighted continuum velocity at the same point and frame. The time
/// integral is the snapshot mean.
pub fn hardy_stress(
    traj: &Trajectory,
    wf: &WeightingFunction,
    grid: &FieldGrid,
    model: &PotentialModel,
) -> Result<StressField> {
    if traj.snapshots().is_empty() {
        return Err(Error::invalid("empty trajectory window"));
    }
    let support = wf.support_radius();
    let n_frames = traj.len() as f64;
    let mut accum = vec![PointStress::zero(); grid.len()];

    for snap in traj.snapshots() {
        let state = &snap.state;
        let frame = BondFrame::build(state, model)?;
        let collector = BallCollector::new(state, support.max(model.cutoff()));
        let bond_images = PeriodicImages::new(state.cell(), support + 0.5 * model.cutoff());
        let atom_images = PeriodicImages::new(state.cell(), support);
        let collect_radius = support + model.cutoff();
        let positions = state.positions();
        let masses = state.masses();
        let velocities = state.velocities();

        let per_point: Vec<PointStress> = grid
            .points()
            .par_iter()
            .map(|&x| {
                let atoms = collector.collect(x, collect_radius);

                // Kernel-weighted density and momentum give the local
                // continuum velocity for the kinetic term.
                let mut density = 0.0;
                let mut momentum = Vec3::zeros();
                for &i in &atoms {
                    atom_images.for_each_image(positions[i] - x, |off| {
                        let w = wf.eval(off.norm());
                        if w > 0.0 {
                            density += masses[i] * w;
                            momentum += masses[i] * w * velocities[i];
                        }
                    });
                }
                let v_w = if density > 0.0 {
                    momentum / density
                } else {
                    Vec3::zeros()
                };

                let mut kinetic = Mat3::zeros();
                for &i in &atoms {
                    let mut w_total = 0.0;
                    atom_images.for_each_image(positions[i] - x, |off| {
                        w_total += wf.eval(off.norm());
                    });
                    if w_total > 0.0 {
                        let rel = velocities[i] - v_w;
                        kinetic -= masses[i] * w_total * rel * rel.transpose();
                    }
                }

                // Ordered enumeration over collected atoms visits every
                // contributing bond from both ends: keep the 1/2 prefactor.
                let mut potential = Mat3::zeros();
                for &alpha in &atoms {
                    frame.for_each_bond_of(alpha, |_beta, d, scalar| {
                        if scalar == 0.0 {
                            return;
                        }
                        let r = d.norm();
                        let f_ab = (scalar / r) * d;
                        // -f_ab (x) (x_a - x_b) = f_ab (x) d
                        let tensor = f_ab * d.transpose();
                        let mid = positions[alpha] + 0.5 * d - x;
                        let mut b_sum = 0.0;
                        bond_images.for_each_image(mid, |m| {
                            let u_rel = m - 0.5 * d;
                            let v_rel = m + 0.5 * d;
                            if point_segment_distance(u_rel, v_rel) <= support {
                                b_sum += bond_function(wf, Vec3::zeros(), u_rel, v_rel);
                            }
                        });
                        if b_sum != 0.0 {
                            potential += 0.5 * b_sum * tensor;
                        }
                    });
                }
                PointStress { kinetic, potential }
            })
            .collect();

        for (acc, p) in accum.iter_mut().zip(per_point) {
            acc.kinetic += p.kinetic;
            acc.potential += p.potential;
        }
    }

    for acc in accum.iter_mut() {
        acc.kinetic /= n_frames;
        acc.potential /= n_frames;
    }
    let t0 = traj.snapshots().first().unwrap().time;
    let t1 = traj.snapshots().last().unwrap().time;
    Ok(StressField {
        grid: grid.clone(),
        samples: accum,
        estimator: EstimatorTag::Hardy,
        window: (t0, t1),
    })
}
