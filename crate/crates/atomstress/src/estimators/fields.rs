use rayon::prelude::*;

use crate::error::Result;
use crate::estimators::geometry::PeriodicImages;
use crate::estimators::FieldGrid;
use crate::system::ParticleState;
use crate::weighting::WeightingFunction;
use crate::Vec3;

/// Instantaneous density, momentum density and velocity at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumSample {
    pub density: f64,
    pub momentum_density: Vec3,
    /// `momentum / density`; undefined (None) where the kernel sees no mass.
    pub velocity: Option<Vec3>,
}

/// Direct spatial averages of the discrete state:
/// `rho(x) = sum_a m_a w(x_a - x)`, `p(x) = sum_a m_a v_a w(x_a - x)`,
/// `v = p / rho` where the density is positive.
pub fn continuum_fields(
    state: &ParticleState,
    wf: &WeightingFunction,
    grid: &FieldGrid,
) -> Result<Vec<ContinuumSample>> {
    let images = PeriodicImages::new(state.cell(), wf.support_radius());
    let positions = state.positions();
    let masses = state.masses();
    let velocities = state.velocities();
    Ok(grid
        .points()
        .par_iter()
        .map(|&x| {
            let mut density = 0.0;
            let mut momentum = Vec3::zeros();
            for i in 0..state.len() {
                images.for_each_image(positions[i] - x, |offset| {
                    let w = wf.eval(offset.norm());
                    if w > 0.0 {
                        density += masses[i] * w;
                        momentum += masses[i] * w * velocities[i];
                    }
                });
            }
            ContinuumSample {
                density,
                momentum_density: momentum,
                velocity: if density > 0.0 {
                    Some(momentum / density)
                } else {
                    None
                },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{build_fcc_lattice, SimulationCell};

    #[test]
    fn single_particle_density() {
        let cell = SimulationCell::cubic(20.0, false).unwrap();
        let m = 2.5;
        let state = ParticleState::new(
            vec![Vec3::new(10.0, 10.0, 10.0)],
            vec![Vec3::zeros()],
            vec![m],
            vec!["X".into()],
            cell,
        )
        .unwrap();
        let wf = WeightingFunction::constant(1.5).unwrap();
        let grid = FieldGrid::from_points(vec![Vec3::new(10.0, 10.0, 10.0)]).unwrap();
        let s = continuum_fields(&state, &wf, &grid).unwrap();
        let vw = 4.0 / 3.0 * std::f64::consts::PI * 1.5f64.powi(3);
        assert!((s[0].density - m / vw).abs() < 1e-12);
    }

    #[test]
    fn common_velocity_is_recovered() {
        let state = build_fcc_lattice(3, 3, 3, 1.5, "X").unwrap();
        let v0 = Vec3::new(0.3, -0.1, 0.7);
        let state = state
            .with_velocities(vec![v0; state.len()])
            .unwrap();
        let wf = WeightingFunction::quartic_spline(1.8).unwrap();
        let grid = FieldGrid::from_points(vec![
            Vec3::new(2.0, 2.0, 2.0),
            Vec3::new(0.0, 0.0, 0.0),
        ])
        .unwrap();
        for s in continuum_fields(&state, &wf, &grid).unwrap() {
            let v = s.velocity.expect("kernel sees atoms");
            assert!((v - v0).norm() < 1e-12);
        }
    }

    #[test]
    fn homogeneous_fcc_density() {
        // Off-site evaluation point and a smooth kernel a couple of lattice
        // constants wide keep the commensuration wiggle under 2%.
        let a = 1.45;
        let state = build_fcc_lattice(6, 6, 6, a, "X").unwrap();
        let wf = WeightingFunction::quartic_spline(2.4 * a).unwrap();
        let grid =
            FieldGrid::from_points(vec![Vec3::new(3.21 * a, 2.87 * a, 3.43 * a)]).unwrap();
        let s = continuum_fields(&state, &wf, &grid).unwrap();
        let expect = 4.0 / (a * a * a);
        assert!(
            (s[0].density - expect).abs() < 0.02 * expect,
            "rho = {}, expect {}",
            s[0].density,
            expect
        );
    }

    #[test]
    fn empty_support_has_undefined_velocity() {
        let cell = SimulationCell::cubic(30.0, false).unwrap();
        let state = ParticleState::at_rest(vec![Vec3::new(1.0, 1.0, 1.0)], 1.0, "X", cell).unwrap();
        let wf = WeightingFunction::constant(1.0).unwrap();
        let grid = FieldGrid::from_points(vec![Vec3::new(20.0, 20.0, 20.0)]).unwrap();
        let s = continuum_fields(&state, &wf, &grid).unwrap();
        assert_eq!(s[0].density, 0.0);
        assert!(s[0].velocity.is_none());
    }
}
