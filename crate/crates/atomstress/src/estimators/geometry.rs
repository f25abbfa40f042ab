//! Shared estimator geometry: periodic image enumeration for kernel sums and
//! a cell-list ball collector for spatial pruning.

use crate::system::{ParticleState, SimulationCell};
use crate::Vec3;

/// Enumerates the periodic images of an object (atom or bond, characterized
/// by a reach = kernel support + half bond length) that can contribute at an
/// evaluation point. Along directions where the reach stays below half the
/// cell extent only the minimum image is visited.
#[derive(Debug, Clone)]
pub(crate) struct PeriodicImages {
    lengths: Vec3,
    extra: [i32; 3],
    periodic: [bool; 3],
}

impl PeriodicImages {
    pub fn new(cell: &SimulationCell, reach: f64) -> Self {
        let lengths = cell.lengths();
        let periodic = cell.periodic();
        let mut extra = [0i32; 3];
        for k in 0..3 {
            if periodic[k] && reach >= 0.5 * lengths[k] {
                extra[k] = 1 + (reach / lengths[k]).floor() as i32;
            }
        }
        PeriodicImages {
            lengths,
            extra,
            periodic,
        }
    }

    /// Calls `f` with every image of `base` (an offset relative to the
    /// evaluation point) that can matter: the minimum image plus, where the
    /// reach demands it, its neighbors.
    #[inline]
    pub fn for_each_image(&self, base: Vec3, mut f: impl FnMut(Vec3)) {
        let mut reduced = base;
        for k in 0..3 {
            if self.periodic[k] {
                let l = self.lengths[k];
                reduced[k] -= l * (reduced[k] / l).round();
            }
        }
        if self.extra == [0, 0, 0] {
            f(reduced);
            return;
        }
        for dz in -self.extra[2]..=self.extra[2] {
            for dy in -self.extra[1]..=self.extra[1] {
                for dx in -self.extra[0]..=self.extra[0] {
                    f(reduced
                        + Vec3::new(
                            dx as f64 * self.lengths.x,
                            dy as f64 * self.lengths.y,
                            dz as f64 * self.lengths.z,
                        ));
                }
            }
        }
    }
}

/// Cell-list over wrapped atom positions answering "which atoms lie within
/// `radius` (minimum image) of a point", in ascending index order.
#[derive(Debug)]
pub(crate) struct BallCollector {
    cell: SimulationCell,
    positions: Vec<Vec3>,
    nbins: [usize; 3],
    origin: Vec3,
    inv_width: [f64; 3],
    heads: Vec<usize>,
    chain: Vec<usize>,
}

impl BallCollector {
    pub fn new(state: &ParticleState, bin_width: f64) -> Self {
        let cell = state.cell().clone();
        let positions: Vec<Vec3> = state.positions().to_vec();
        let wrapped: Vec<Vec3> = positions.iter().map(|p| cell.wrap(*p)).collect();
        let lengths = cell.lengths();
        let periodic = cell.periodic();

        let mut nbins = [1usize; 3];
        let mut origin = Vec3::zeros();
        let mut inv_width = [0.0; 3];
        for k in 0..3 {
            let (lo, extent) = if periodic[k] {
                (0.0, lengths[k])
            } else {
                let lo = wrapped.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
                let hi = wrapped.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
                (lo, (hi - lo).max(1e-12))
            };
            origin[k] = lo;
            nbins[k] = ((extent / bin_width).floor() as usize).clamp(1, 64);
            inv_width[k] = nbins[k] as f64 / extent;
        }
        let total = nbins[0] * nbins[1] * nbins[2];
        let mut heads = vec![usize::MAX; total];
        let mut chain = vec![usize::MAX; wrapped.len()];
        for (i, p) in wrapped.iter().enumerate() {
            let b = Self::bin_index(&nbins, &origin, &inv_width, periodic, *p);
            chain[i] = heads[b];
            heads[b] = i;
        }
        let _ = bin_width;
        BallCollector {
            cell,
            positions,
            nbins,
            origin,
            inv_width,
            heads,
            chain,
        }
    }

    fn bin_index(
        nbins: &[usize; 3],
        origin: &Vec3,
        inv_width: &[f64; 3],
        periodic: [bool; 3],
        p: Vec3,
    ) -> usize {
        let mut b = [0usize; 3];
        for k in 0..3 {
            let n = nbins[k] as isize;
            let mut idx = ((p[k] - origin[k]) * inv_width[k]).floor() as isize;
            if periodic[k] {
                idx = idx.rem_euclid(n);
            } else {
                idx = idx.clamp(0, n - 1);
            }
            b[k] = idx as usize;
        }
        (b[2] * nbins[1] + b[1]) * nbins[0] + b[0]
    }

    /// Atom indices within `radius` of `x` under the minimum-image metric,
    /// ascending.
    pub fn collect(&self, x: Vec3, radius: f64) -> Vec<usize> {
        let lengths = self.cell.lengths();
        let periodic = self.cell.periodic();
        let r2 = radius * radius;
        let mut out = Vec::new();

        // Bin span to cover the ball; full span when the grid is coarse.
        let center = self.cell.wrap(x);
        let mut ranges: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for k in 0..3 {
            let n = self.nbins[k] as isize;
            let width = 1.0 / self.inv_width[k];
            let need = (radius / width).ceil() as isize + 1;
            if 2 * need + 1 >= n {
                ranges[k] = (0..self.nbins[k]).collect();
            } else {
                let c = ((center[k] - self.origin[k]) * self.inv_width[k]).floor() as isize;
                for d in -need..=need {
                    let mut idx = c + d;
                    if periodic[k] {
                        idx = idx.rem_euclid(n);
                    } else if idx < 0 || idx >= n {
                        continue;
                    }
                    ranges[k].push(idx as usize);
                }
                ranges[k].sort_unstable();
                ranges[k].dedup();
            }
        }
        let _ = lengths;
        for &bz in &ranges[2] {
            for &by in &ranges[1] {
                for &bx in &ranges[0] {
                    let flat = (bz * self.nbins[1] + by) * self.nbins[0] + bx;
                    let mut i = self.heads[flat];
                    while i != usize::MAX {
                        let d = self.cell.minimum_image_displacement(x, self.positions[i]);
                        if d.norm_squared() <= r2 {
                            out.push(i);
                        }
                        i = self.chain[i];
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Distance from a point to a segment [p, q] (all relative coordinates).
pub(crate) fn point_segment_distance(p: Vec3, q: Vec3) -> f64 {
    let d = q - p;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return p.norm();
    }
    let t = (-p.dot(&d) / len2).clamp(0.0, 1.0);
    (p + t * d).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::build_fcc_lattice;

    #[test]
    fn collector_matches_direct_scan() {
        let state = build_fcc_lattice(4, 4, 4, 1.4, "X").unwrap();
        let collector = BallCollector::new(&state, 1.4);
        for (x, r) in [
            (Vec3::new(0.1, 0.2, 0.3), 1.5),
            (Vec3::new(2.8, 2.8, 2.8), 2.2),
            (Vec3::new(5.5, 0.0, 5.5), 3.0),
        ] {
            let got = collector.collect(x, r);
            let want: Vec<usize> = (0..state.len())
                .filter(|&i| {
                    state
                        .cell()
                        .minimum_image_displacement(x, state.positions()[i])
                        .norm()
                        <= r
                })
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn image_enumeration_covers_thin_slabs() {
        // Periodic slab thinner than the kernel reach: three z-images.
        let state = build_fcc_lattice(6, 6, 2, 1.0, "X").unwrap();
        let images = PeriodicImages::new(state.cell(), 1.6);
        let mut count = 0;
        images.for_each_image(Vec3::new(0.2, 0.2, 0.3), |_| count += 1);
        assert_eq!(count, 3);

        let wide = PeriodicImages::new(state.cell(), 0.4);
        let mut count2 = 0;
        wide.for_each_image(Vec3::new(0.2, 0.2, 0.3), |_| count2 += 1);
        assert_eq!(count2, 1);
    }

    #[test]
    fn segment_distance_basics() {
        let d = point_segment_distance(Vec3::new(-1.0, 1.0, 0.0), Vec3::new(1.0, 1.0, 0.0));
        assert!((d - 1.0).abs() < 1e-14);
        let d2 = point_segment_distance(Vec3::new(2.0, 0.0, 0.0), Vec3::new(3.0, 0.0, 0.0));
        assert!((d2 - 2.0).abs() < 1e-14);
    }
}
