use crate::error::{Error, Result};
use crate::system::{ParticleState, SimulationCell};
use crate::Vec3;

/// Conventional fcc basis in fractional coordinates of the cubic cell.
pub const FCC_BASIS: [[f64; 3]; 4] = [
    [0.0, 0.0, 0.0],
    [0.0, 0.5, 0.5],
    [0.5, 0.0, 0.5],
    [0.5, 0.5, 0.0],
];

/// Builds `nx x ny x nz` conventional fcc cells with lattice constant `a`.
///
/// Particles start at rest with unit mass; the orthogonal cell is
/// `(nx*a, ny*a, nz*a)` and periodic in all directions.
pub fn build_fcc_lattice(nx: usize, ny: usize, nz: usize, a: f64, species: &str) -> Result<ParticleState> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::invalid("cell counts must be at least 1"));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::invalid(format!("lattice constant must be positive, got {a}")));
    }
    let mut positions = Vec::with_capacity(4 * nx * ny * nz);
    for ix in 0..nx {
        for iy in 0..ny {
            for iz in 0..nz {
                let origin = Vec3::new(ix as f64, iy as f64, iz as f64) * a;
                for b in FCC_BASIS {
                    positions.push(origin + Vec3::new(b[0], b[1], b[2]) * a);
                }
            }
        }
    }
    let cell = SimulationCell::new(
        Vec3::new(nx as f64 * a, ny as f64 * a, nz as f64 * a),
        [true; 3],
    )?;
    ParticleState::at_rest(positions, 1.0, species, cell)
}

/// Removes every particle whose in-plane (x1, x2) distance to `center` is
/// strictly less than `radius`. The cell is unchanged.
pub fn carve_plate_with_hole(state: &ParticleState, center: Vec3, radius: f64) -> Result<ParticleState> {
    if !(radius >= 0.0) {
        return Err(Error::invalid(format!("hole radius must be non-negative, got {radius}")));
    }
    let r2 = radius * radius;
    let keep: Vec<usize> = (0..state.len())
        .filter(|&i| {
            let p = state.positions()[i];
            let dx = p.x - center.x;
            let dy = p.y - center.y;
            dx * dx + dy * dy >= r2
        })
        .collect();
    if keep.is_empty() {
        return Err(Error::geometry("hole removes every particle"));
    }
    ParticleState::new(
        keep.iter().map(|&i| state.positions()[i]).collect(),
        keep.iter().map(|&i| state.velocities()[i]).collect(),
        keep.iter().map(|&i| state.masses()[i]).collect(),
        keep.iter().map(|&i| state.species()[i].clone()).collect(),
        state.cell().clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_cube_has_4000_atoms() {
        let state = build_fcc_lattice(10, 10, 10, 1.556, "Al").unwrap();
        assert_eq!(state.len(), 4000);
    }

    #[test]
    fn single_cell_basis_positions() {
        let a = 1.556;
        let state = build_fcc_lattice(1, 1, 1, a, "X").unwrap();
        assert_eq!(state.len(), 4);
        let expect = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(0.0, 0.778, 0.778),
            Vec3::new(0.778, 0.0, 0.778),
            Vec3::new(0.778, 0.778, 0.0),
        ];
        for (p, e) in state.positions().iter().zip(expect) {
            assert!((p - e).norm() < 1e-12, "{p:?} vs {e:?}");
        }
    }

    #[test]
    fn cell_scales_with_counts() {
        let state = build_fcc_lattice(2, 1, 1, 1.0, "X").unwrap();
        let l = state.cell().lengths();
        assert_eq!((l.x, l.y, l.z), (2.0, 1.0, 1.0));
    }

    #[test]
    fn tiling_matches_basis_oracle() {
        // Independent oracle: enumerate every cell origin and basis atom and
        // compare against the builder output in order.
        let (nx, ny, nz, a) = (3, 2, 4, 0.91);
        let state = build_fcc_lattice(nx, ny, nz, a, "X").unwrap();
        let mut oracle = Vec::new();
        for ix in 0..nx {
            for iy in 0..ny {
                for iz in 0..nz {
                    for b in FCC_BASIS {
                        oracle.push(Vec3::new(
                            (ix as f64 + b[0]) * a,
                            (iy as f64 + b[1]) * a,
                            (iz as f64 + b[2]) * a,
                        ));
                    }
                }
            }
        }
        assert_eq!(state.len(), oracle.len());
        for (p, e) in state.positions().iter().zip(oracle) {
            assert!((p - e).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_radius_keeps_everything() {
        let state = build_fcc_lattice(2, 2, 2, 1.0, "X").unwrap();
        let carved = carve_plate_with_hole(&state, Vec3::new(1.0, 1.0, 0.0), 0.0).unwrap();
        assert_eq!(carved.len(), state.len());
    }

    #[test]
    fn paper_plate_geometry_count() {
        // 100x100x10 cells with the hole radius in reduced length units
        // (25 sigma, about 16a): this is the radius that reproduces the
        // published atom count of 367,590.
        let a = 1.556;
        let state = build_fcc_lattice(100, 100, 10, a, "X").unwrap();
        let center = Vec3::new(50.0 * a, 50.0 * a, 0.0);
        let carved = carve_plate_with_hole(&state, center, 25.0).unwrap();
        assert_eq!(carved.len(), 367_590);
    }

    #[test]
    fn desk_plate_matches_brute_force_filter() {
        let a = 1.1;
        let state = build_fcc_lattice(20, 20, 4, a, "X").unwrap();
        let center = Vec3::new(10.0 * a, 10.0 * a, 0.0);
        let radius = 5.0 * a;
        let carved = carve_plate_with_hole(&state, center, radius).unwrap();
        let expected = state
            .positions()
            .iter()
            .filter(|p| {
                let dx = p.x - center.x;
                let dy = p.y - center.y;
                (dx * dx + dy * dy).sqrt() >= radius
            })
            .count();
        assert_eq!(carved.len(), expected);
    }
}
