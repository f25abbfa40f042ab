use crate::error::{Error, Result};
use crate::Vec3;

/// An orthogonal simulation cell with per-direction periodic flags.
///
/// Non-periodic directions keep a finite extent so that weighting-function
/// support checks and cell-list binning remain well defined.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationCell {
    lengths: Vec3,
    periodic: [bool; 3],
}

impl SimulationCell {
    pub fn new(lengths: Vec3, periodic: [bool; 3]) -> Result<Self> {
        if !(lengths.x > 0.0 && lengths.y > 0.0 && lengths.z > 0.0)
            || !lengths.iter().all(|l| l.is_finite())
        {
            return Err(Error::geometry(format!(
                "cell extents must be positive and finite, got {:?}",
                lengths
            )));
        }
        Ok(SimulationCell { lengths, periodic })
    }

    pub fn cubic(l: f64, periodic: bool) -> Result<Self> {
        SimulationCell::new(Vec3::new(l, l, l), [periodic; 3])
    }

    pub fn lengths(&self) -> Vec3 {
        self.lengths
    }

    pub fn periodic(&self) -> [bool; 3] {
        self.periodic
    }

    pub fn with_periodic(&self, periodic: [bool; 3]) -> Self {
        SimulationCell {
            lengths: self.lengths,
            periodic,
        }
    }

    /// Replaces the cell extents, keeping the periodic flags.
    pub fn with_lengths(&self, lengths: Vec3) -> Result<Self> {
        SimulationCell::new(lengths, self.periodic)
    }

    /// The three cell edge vectors (orthogonal cell: aligned with the axes).
    pub fn edge_vectors(&self) -> [Vec3; 3] {
        [
            Vec3::new(self.lengths.x, 0.0, 0.0),
            Vec3::new(0.0, self.lengths.y, 0.0),
            Vec3::new(0.0, 0.0, self.lengths.z),
        ]
    }

    /// Scalar triple product of the edge vectors.
    pub fn volume(&self) -> f64 {
        self.lengths.x * self.lengths.y * self.lengths.z
    }

    /// Smallest extent among periodic directions, if any direction is periodic.
    pub fn min_periodic_extent(&self) -> Option<f64> {
        (0..3)
            .filter(|&k| self.periodic[k])
            .map(|k| self.lengths[k])
            .fold(None, |acc, l| Some(acc.map_or(l, |a: f64| a.min(l))))
    }

    /// Minimum-image representative of `xb - xa`: the smallest-norm vector
    /// among periodic images in periodic directions; the raw difference in
    /// non-periodic directions.
    pub fn minimum_image_displacement(&self, xa: Vec3, xb: Vec3) -> Vec3 {
        let mut d = xb - xa;
        for k in 0..3 {
            if self.periodic[k] {
                let l = self.lengths[k];
                d[k] -= l * (d[k] / l).round();
            }
        }
        d
    }

    /// Integer image shift `n` such that `xb + n*L - xa` is the minimum image.
    pub fn minimum_image_shift(&self, xa: Vec3, xb: Vec3) -> [i32; 3] {
        let d = xb - xa;
        let mut shift = [0i32; 3];
        for k in 0..3 {
            if self.periodic[k] {
                shift[k] = -((d[k] / self.lengths[k]).round() as i32);
            }
        }
        shift
    }

    /// Wraps a position into the primary cell along periodic directions.
    pub fn wrap(&self, x: Vec3) -> Vec3 {
        let mut w = x;
        for k in 0..3 {
            if self.periodic[k] {
                let l = self.lengths[k];
                w[k] -= l * (w[k] / l).floor();
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_min_image(cell: &SimulationCell, xa: Vec3, xb: Vec3) -> Vec3 {
        let mut best = xb - xa;
        let l = cell.lengths();
        for ix in -1..=1i32 {
            for iy in -1..=1i32 {
                for iz in -1..=1i32 {
                    let mut shift = Vec3::zeros();
                    if cell.periodic()[0] {
                        shift.x = ix as f64 * l.x;
                    }
                    if cell.periodic()[1] {
                        shift.y = iy as f64 * l.y;
                    }
                    if cell.periodic()[2] {
                        shift.z = iz as f64 * l.z;
                    }
                    let d = xb + shift - xa;
                    if d.norm() < best.norm() {
                        best = d;
                    }
                }
            }
        }
        best
    }

    #[test]
    fn wraparound_pair() {
        let cell = SimulationCell::cubic(10.0, true).unwrap();
        let d = cell.minimum_image_displacement(Vec3::new(9.5, 0.0, 0.0), Vec3::new(0.5, 0.0, 0.0));
        assert!((d - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn non_periodic_direction_is_raw_difference() {
        let cell = SimulationCell::new(Vec3::new(10.0, 10.0, 10.0), [true, true, false]).unwrap();
        let d = cell.minimum_image_displacement(Vec3::new(0.0, 0.0, 9.5), Vec3::new(0.0, 0.0, 0.5));
        assert!((d.z - (-9.0)).abs() < 1e-14);
    }

    #[test]
    fn matches_27_image_search() {
        // Deterministic pseudo-random pairs vs exhaustive image search.
        let cell = SimulationCell::new(Vec3::new(7.0, 11.0, 5.0), [true, false, true]).unwrap();
        let mut s = 0.123_f64;
        let mut next = || {
            s = (s * 9301.0 + 49297.0) % 233280.0;
            s / 233280.0
        };
        for _ in 0..200 {
            let xa = Vec3::new(next() * 7.0, next() * 11.0, next() * 5.0);
            let xb = Vec3::new(next() * 7.0, next() * 11.0, next() * 5.0);
            let fast = cell.minimum_image_displacement(xa, xb);
            let brute = brute_force_min_image(&cell, xa, xb);
            assert!((fast - brute).norm() < 1e-12, "fast {fast:?} brute {brute:?}");
            // Norm never exceeds the raw difference.
            assert!(fast.norm() <= (xb - xa).norm() + 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate_cell() {
        assert!(SimulationCell::cubic(0.0, true).is_err());
        assert!(SimulationCell::new(Vec3::new(1.0, -1.0, 1.0), [true; 3]).is_err());
    }
}
