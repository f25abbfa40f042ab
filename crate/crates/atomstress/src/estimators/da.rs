use rayon::prelude::*;

use crate::error::Result;
use crate::estimators::frame::BondFrame;
use crate::estimators::geometry::{point_segment_distance, BallCollector, PeriodicImages};
use crate::estimators::{EstimatorTag, FieldGrid, PointStress, StressField};
use crate::potentials::PotentialModel;
use crate::quadrature::gl_nodes;
use crate::system::{ParticleState, Trajectory};
use crate::weighting::WeightingFunction;
use crate::{Mat3, Vec3};

/// Doubly-averaged (DA) stress of one state: the potential part weights both
/// bond endpoints,
/// `sigma_v = 1/2 sum_(a != b) IntInt [-f_ab w(x_a - x - s z)
///  w(x_b - x + (1-s) z) (x) z] ds dz`,
/// with z integrated over the ball of radius `2 r_support` centered at
/// `x_a - x_b` (outside which the integrand vanishes). The kinetic part is
/// the same kernel-weighted expression the Hardy estimator uses.
///
/// Quadrature: product Gauss-Legendre 12^3 over the bounding box of the
/// z-ball, Gauss-Legendre 16 in s over the analytically-intersected support
/// window of each z node.
pub fn da_stress(
    state: &ParticleState,
    wf: &WeightingFunction,
    grid: &FieldGrid,
    model: &PotentialModel,
) -> Result<StressField> {
    let support = wf.support_radius();
    let frame = BondFrame::build(state, model)?;
    let collector = BallCollector::new(state, support.max(model.cutoff()));
    let bond_images = PeriodicImages::new(state.cell(), support + 0.5 * model.cutoff());
    let atom_images = PeriodicImages::new(state.cell(), support);
    let collect_radius = support + model.cutoff();
    let positions = state.positions();
    let masses = state.masses();
    let velocities = state.velocities();
    let (z_nodes, z_weights) = gl_nodes(12);
    let (s_nodes, s_weights) = gl_nodes(16);

    let samples: Vec<PointStress> = grid
        .points()
        .par_iter()
        .map(|&x| {
            let atoms = collector.collect(x, collect_radius);

            // Kinetic part shared with the Hardy estimator.
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

            // Potential part. The (a,b) and (b,a) terms of the double sum are
            // equal, so the ordered enumeration with the 1/2 prefactor equals
            // the unordered sum.
            let mut potential = Mat3::zeros();
            for &alpha in &atoms {
                frame.for_each_bond_of(alpha, |_beta, d, scalar| {
                    if scalar == 0.0 {
                        return;
                    }
                    let r = d.norm();
                    let f_ab = (scalar / r) * d;
                    let mid = positions[alpha] + 0.5 * d - x;
                    bond_images.for_each_image(mid, |m| {
                        let a_rel = m - 0.5 * d; // x_a - x (this image)
                        let b_rel = m + 0.5 * d; // x_b - x
                        if point_segment_distance(a_rel, b_rel) > support {
                            return;
                        }
                        let m_vec = double_integral(
                            wf, support, a_rel, b_rel, z_nodes, z_weights, s_nodes, s_weights,
                        );
                        potential += 0.5 * (-f_ab) * m_vec.transpose();
                    });
                });
            }
            PointStress { kinetic, potential }
        })
        .collect();

    Ok(StressField {
        grid: grid.clone(),
        samples,
        estimator: EstimatorTag::DoublyAveraged,
        window: (0.0, 0.0),
    })
}

/// Convenience wrapper evaluating the mean DA field over a window.
pub fn da_stress_window(
    traj: &Trajectory,
    wf: &WeightingFunction,
    grid: &FieldGrid,
    model: &PotentialModel,
) -> Result<StressField> {
    let mut accum = vec![PointStress::zero(); grid.len()];
    for snap in traj.snapshots() {
        let field = da_stress(&snap.state, wf, grid, model)?;
        for (a, s) in accum.iter_mut().zip(field.samples) {
            a.kinetic += s.kinetic;
            a.potential += s.potential;
        }
    }
    let n = traj.len() as f64;
    for a in accum.iter_mut() {
        a.kinetic /= n;
        a.potential /= n;
    }
    Ok(StressField {
        grid: grid.clone(),
        samples: accum,
        estimator: EstimatorTag::DoublyAveraged,
        window: (
            traj.snapshots().first().unwrap().time,
            traj.snapshots().last().unwrap().time,
        ),
    })
}

/// `IntInt w(a - s z) w(b + (1-s) z) z ds dz` for one bond image.
#[allow(clippy::too_many_arguments)]
fn double_integral(
    wf: &WeightingFunction,
    support: f64,
    a_rel: Vec3,
    b_rel: Vec3,
    z_nodes: &[f64],
    z_weights: &[f64],
    s_nodes: &[f64],
    s_weights: &[f64],
) -> Vec3 {
    let c = a_rel - b_rel; // x_a - x_b for this image
    let half = 2.0 * support;
    let ball2 = half * half;
    let mut acc = Vec3::zeros();
    for (iz, wz) in z_nodes.iter().zip(z_weights) {
        let z3 = c.z + half * iz;
        for (iy, wy) in z_nodes.iter().zip(z_weights) {
            let z2 = c.y + half * iy;
            for (ix, wx) in z_nodes.iter().zip(z_weights) {
                let z1 = c.x + half * ix;
                let z = Vec3::new(z1, z2, z3);
                if (z - c).norm_squared() > ball2 {
                    continue;
                }
                // Support windows in s: |a - s z| <= R and |b + (1-s) z| <= R.
                let w1 = quadratic_window(a_rel, z, support);
                let w2 = quadratic_window(b_rel + z, z, support);
                let lo = w1.0.max(w2.0).max(0.0);
                let hi = w1.1.min(w2.1).min(1.0);
                if hi <= lo {
                    continue;
                }
                let mid = 0.5 * (lo + hi);
                let span = 0.5 * (hi - lo);
                let mut s_int = 0.0;
                for (s_n, s_w) in s_nodes.iter().zip(s_weights) {
                    let s = mid + span * s_n;
                    let wa = wf.eval((a_rel - s * z).norm());
                    if wa == 0.0 {
                        continue;
                    }
                    let wb = wf.eval((b_rel + (1.0 - s) * z).norm());
                    s_int += s_w * wa * wb;
                }
                s_int *= span;
                acc += (wx * wy * wz) * s_int * z;
            }
        }
    }
    // The three half-interval scalings of the z box.
    acc * half * half * half
}

/// Roots of |p - s z| = R as an s-interval (empty when no intersection).
fn quadratic_window(p: Vec3, z: Vec3, radius: f64) -> (f64, f64) {
    let qa = z.norm_squared();
    if qa == 0.0 {
        return if p.norm() <= radius {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            (1.0, 0.0)
        };
    }
    let qb = -2.0 * p.dot(&z);
    let qc = p.norm_squared() - radius * radius;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return (1.0, 0.0);
    }
    let sq = disc.sqrt();
    ((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::SimulationCell;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn distant_pair_contributes_nothing() {
        let cell = SimulationCell::cubic(60.0, false).unwrap();
        let state = crate::system::ParticleState::at_rest(
            vec![Vec3::new(30.0, 30.0, 30.0), Vec3::new(31.5, 30.0, 30.0)],
            1.0,
            "X",
            cell,
        )
        .unwrap();
        let wf = WeightingFunction::constant(1.0).unwrap();
        // Far from the bond: both kernels empty.
        let grid = FieldGrid::from_points(vec![Vec3::new(40.0, 30.0, 30.0)]).unwrap();
        let field = da_stress(&state, &wf, &grid, &PotentialModel::lj()).unwrap();
        assert_eq!(field.samples[0].potential, Mat3::zeros());
    }

    #[test]
    fn single_pair_matches_monte_carlo() {
        let cell = SimulationCell::cubic(60.0, false).unwrap();
        let r = 1.4;
        let x1 = Vec3::new(30.0, 30.0, 30.0);
        let x2 = Vec3::new(30.0 + r, 30.0, 30.0);
        let state =
            crate::system::ParticleState::at_rest(vec![x1, x2], 1.0, "X", cell).unwrap();
        let model = PotentialModel::lj();
        let wf = WeightingFunction::constant(1.1).unwrap();
        let x = Vec3::new(30.6, 30.2, 30.0);
        let grid = FieldGrid::from_points(vec![x]).unwrap();
        let field = da_stress(&state, &wf, &grid, &model).unwrap();
        let got = field.samples[0].potential;

        // Independent Monte-Carlo oracle with a fixed seed: sample z in the
        // ball of radius 2 r_w around x1 - x2 and s uniformly in [0, 1].
        let scalar = crate::potentials::LjPotential::default().eval(r).unwrap().1;
        let d = x2 - x1;
        let f12 = (scalar / r) * d;
        let c = x1 - x2;
        let rw = wf.support_radius();
        let mut rng = ChaCha12Rng::seed_from_u64(20240901);
        let n = 1_000_000usize;
        let mut mean = Vec3::zeros();
        let a_rel = x1 - x;
        let b_rel = x2 - x;
        for _ in 0..n {
            // Rejection-sample the ball.
            let z = loop {
                let v = Vec3::new(
                    rng.gen::<f64>() * 2.0 - 1.0,
                    rng.gen::<f64>() * 2.0 - 1.0,
                    rng.gen::<f64>() * 2.0 - 1.0,
                );
                if v.norm_squared() <= 1.0 {
                    break c + v * (2.0 * rw);
                }
            };
            let s: f64 = rng.gen();
            let w1 = wf.eval((a_rel - s * z).norm());
            if w1 == 0.0 {
                continue;
            }
            let w2 = wf.eval((b_rel + (1.0 - s) * z).norm());
            mean += w1 * w2 * z;
        }
        let ball_vol = 4.0 / 3.0 * std::f64::consts::PI * (2.0 * rw).powi(3);
        let m_vec = mean * (ball_vol / n as f64);
        // Unordered pair: single term -f12 (x) m.
        let expect = -f12 * m_vec.transpose();
        let rel = (got - expect).norm() / expect.norm();
        assert!(rel < 0.01, "relative deviation {rel}: {got:?} vs {expect:?}");
    }
}
