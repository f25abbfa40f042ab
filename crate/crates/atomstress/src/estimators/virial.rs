use crate::error::{Error, Result};
use crate::estimators::frame::BondFrame;
use crate::potentials::PotentialModel;
use crate::system::{ParticleState, Trajectory};
use crate::{Mat3, Vec3};

/// Averaging domain of the virial estimator. Bonds count only when both
/// endpoints lie inside; over the whole periodic cell every minimum-image
/// bond is interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VirialDomain {
    Sphere { center: Vec3, radius: f64 },
    WholeCell,
}

/// Time-averaged virial stress over a domain.
#[derive(Debug, Clone, Copy)]
pub struct VirialStress {
    pub kinetic: Mat3,
    pub potential: Mat3,
    pub volume: f64,
    /// The domain contained no particles in at least one frame.
    pub empty: bool,
    pub window: (f64, f64),
}

impl VirialStress {
    pub fn total(&self) -> Mat3 {
        self.kinetic + self.potential
    }
}

/// `sigma = 1/(tau vol) Int [ -sum_a m v_rel (x) v_rel
///  - 1/2 sum_(a != b in domain) f_ab (x) (x_a - x_b) ] dt`;
/// particle velocities are taken relative to the mass-weighted mean velocity
/// of the domain in each frame.
pub fn virial_stress(
    traj: &Trajectory,
    domain: VirialDomain,
    model: &PotentialModel,
) -> Result<VirialStress> {
    virial_stress_with_reference(traj, domain, model, None)
}

/// Like [`virial_stress`] but with an explicit continuum reference velocity
/// for the kinetic term instead of the per-frame domain mean.
pub fn virial_stress_with_reference(
    traj: &Trajectory,
    domain: VirialDomain,
    model: &PotentialModel,
    reference_velocity: Option<Vec3>,
) -> Result<VirialStress> {
    if let VirialDomain::Sphere { radius, .. } = domain {
        if !(radius > 0.0) {
            return Err(Error::invalid("virial sphere radius must be positive"));
        }
    }
    let mut kinetic = Mat3::zeros();
    let mut potential = Mat3::zeros();
    let mut empty = false;
    let n_frames = traj.len() as f64;

    for snap in traj.snapshots() {
        let state = &snap.state;
        let volume = domain_volume(&domain, state);
        let frame = BondFrame::build(state, model)?;
        let positions = state.positions();
        let masses = state.masses();
        let velocities = state.velocities();
        let cell = state.cell();

        // Domain membership and bond-coherent placement.
        let members: Vec<usize> = match domain {
            VirialDomain::WholeCell => (0..state.len()).collect(),
            VirialDomain::Sphere { center, radius } => (0..state.len())
                .filter(|&i| {
                    cell.minimum_image_displacement(center, positions[i]).norm() <= radius
                })
                .collect(),
        };
        if members.is_empty() {
            empty = true;
            continue;
        }

        let v_mean = match reference_velocity {
            Some(v) => v,
            None => {
                let mut mass = 0.0;
                let mut mom = Vec3::zeros();
                for &i in &members {
                    mass += masses[i];
                    mom += masses[i] * velocities[i];
                }
                mom / mass
            }
        };
        for &i in &members {
            let rel = velocities[i] - v_mean;
            kinetic -= masses[i] * rel * rel.transpose() / (volume * n_frames);
        }

        for &alpha in &members {
            let a_pos = match domain {
                VirialDomain::WholeCell => positions[alpha],
                VirialDomain::Sphere { center, .. } => {
                    center + cell.minimum_image_displacement(center, positions[alpha])
                }
            };
            frame.for_each_bond_of(alpha, |_beta, d, scalar| {
                if scalar == 0.0 {
                    return;
                }
                if let VirialDomain::Sphere { center, radius } = domain {
                    // Partner placed coherently at the alpha image.
                    if (a_pos + d - center).norm() > radius {
                        return;
                    }
                }
                let r = d.norm();
                let f_ab = (scalar / r) * d;
                // Ordered sum with the 1/2 prefactor:
                // -1/2 f_ab (x) (x_a - x_b) = +1/2 f_ab (x) d.
                potential += 0.5 * f_ab * d.transpose() / (volume * n_frames);
            });
        }
    }

    let t0 = traj.snapshots().first().unwrap().time;
    let t1 = traj.snapshots().last().unwrap().time;
    Ok(VirialStress {
        kinetic,
        potential,
        volume: domain_volume(&domain, &traj.snapshots()[0].state),
        empty,
        window: (t0, t1),
    })
}

fn domain_volume(domain: &VirialDomain, state: &ParticleState) -> f64 {
    match domain {
        VirialDomain::WholeCell => state.cell().volume(),
        VirialDomain::Sphere { radius, .. } => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
    }
}

/// Kinetic and potential parts of the scalar virial pressure of one frame
/// over a given volume: `p = 1/(3V) [sum m |v_rel|^2 - 1/2 sum (dV/dr) r]`,
/// velocities relative to the center of mass.
pub fn virial_pressure_parts(
    state: &ParticleState,
    model: &PotentialModel,
    volume: f64,
) -> Result<(f64, f64)> {
    if !(volume > 0.0) {
        return Err(Error::invalid("volume must be positive"));
    }
    let frame = BondFrame::build(state, model)?;
    let v_com = state.center_of_mass_velocity();
    let mut kinetic = 0.0;
    for (m, v) in state.masses().iter().zip(state.velocities()) {
        let rel = v - v_com;
        kinetic += m * rel.norm_squared();
    }
    let mut virial = 0.0;
    for alpha in 0..state.len() {
        frame.for_each_bond_of(alpha, |_beta, d, scalar| {
            virial += 0.5 * scalar * d.norm();
        });
    }
    Ok((kinetic / (3.0 * volume), -virial / (3.0 * volume)))
}
