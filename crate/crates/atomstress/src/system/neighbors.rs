use crate::error::{Error, Result};
use crate::system::ParticleState;
use crate::Vec3;

/// One neighbor entry: partner index and the periodic image shift that
/// places the partner at its minimum-image position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Neighbor {
    pub index: u32,
    pub shift: [i8; 3],
}

/// Symmetric Verlet neighbor list in CSR layout.
///
/// Every pair with minimum-image distance <= cutoff + skin at build time is
/// listed from both endpoints; the reverse entry carries the negated shift.
#[derive(Debug, Clone)]
pub struct NeighborList {
    offsets: Vec<usize>,
    entries: Vec<Neighbor>,
    cutoff: f64,
    skin: f64,
    build_positions: Vec<Vec3>,
}

impl NeighborList {
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn skin(&self) -> f64 {
        self.skin
    }

    pub fn reach(&self) -> f64 {
        self.cutoff + self.skin
    }

    pub fn n_particles(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors_of(&self, i: usize) -> &[Neighbor] {
        &self.entries[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Iterates each unordered pair exactly once as `(alpha, beta, shift)`
    /// with `alpha < beta`, in canonical (alpha, beta, shift) order.
    pub fn unordered_pairs(&self) -> impl Iterator<Item = (usize, usize, [i8; 3])> + '_ {
        (0..self.n_particles()).flat_map(move |i| {
            self.neighbors_of(i)
                .iter()
                .filter(move |n| (n.index as usize) > i)
                .map(move |n| (i, n.index as usize, n.shift))
        })
    }

    /// True when some particle has moved more than skin/2 since the list was
    /// built, which invalidates the cutoff guarantee.
    pub fn needs_rebuild(&self, state: &ParticleState) -> bool {
        let half_skin2 = (0.5 * self.skin) * (0.5 * self.skin);
        state
            .positions()
            .iter()
            .zip(&self.build_positions)
            .any(|(p, p0)| (p - p0).norm_squared() > half_skin2)
    }
}

struct BinGrid {
    nbins: [usize; 3],
    inv_width: [f64; 3],
    origin: Vec3,
    periodic: [bool; 3],
}

impl BinGrid {
    fn bin_of(&self, p: Vec3) -> [usize; 3] {
        let mut b = [0usize; 3];
        for k in 0..3 {
            let mut idx = ((p[k] - self.origin[k]) * self.inv_width[k]).floor() as isize;
            let n = self.nbins[k] as isize;
            if self.periodic[k] {
                idx = idx.rem_euclid(n);
            } else {
                idx = idx.clamp(0, n - 1);
            }
            b[k] = idx as usize;
        }
        b
    }

    fn flat(&self, b: [usize; 3]) -> usize {
        (b[2] * self.nbins[1] + b[1]) * self.nbins[0] + b[0]
    }
}

/// Builds the Verlet list with a cell-list sweep (O(N) for bounded density).
///
/// Requires cutoff + skin < half the smallest periodic extent so that the
/// minimum-image convention identifies each pair with a unique image.
pub fn build_neighbor_list(state: &ParticleState, cutoff: f64, skin: f64) -> Result<NeighborList> {
    if !(cutoff > 0.0) {
        return Err(Error::invalid(format!("cutoff must be positive, got {cutoff}")));
    }
    if !(skin >= 0.0) {
        return Err(Error::invalid(format!("skin must be non-negative, got {skin}")));
    }
    let reach = cutoff + skin;
    let cell = state.cell();
    if let Some(l_min) = cell.min_periodic_extent() {
        if reach >= 0.5 * l_min {
            return Err(Error::geometry(format!(
                "cutoff + skin = {reach} must be below half the smallest periodic extent {l_min}"
            )));
        }
    }

    let n = state.len();
    let positions = state.positions();
    let periodic = cell.periodic();
    let lengths = cell.lengths();

    // Grid geometry: periodic directions bin the cell, free directions bin the
    // bounding box of the configuration.
    let mut nbins = [1usize; 3];
    let mut inv_width = [0.0f64; 3];
    let mut origin = Vec3::zeros();
    for k in 0..3 {
        let (lo, extent) = if periodic[k] {
            (0.0, lengths[k])
        } else {
            let lo = positions.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            let hi = positions.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            (lo, (hi - lo).max(1e-12))
        };
        origin[k] = lo;
        nbins[k] = ((extent / reach).floor() as usize).max(1);
        inv_width[k] = nbins[k] as f64 / extent;
    }
    // With fewer than three bins along a periodic direction the 27-stencil
    // would revisit bins; collapse to a single bin and rely on the distance
    // test (only affects small systems).
    for k in 0..3 {
        if periodic[k] && nbins[k] < 3 {
            nbins[k] = 1;
            inv_width[k] = 1.0 / lengths[k].max(1e-12);
        }
    }

    let grid = BinGrid {
        nbins,
        inv_width,
        origin,
        periodic,
    };
    let total_bins = nbins[0] * nbins[1] * nbins[2];
    let mut heads = vec![usize::MAX; total_bins];
    let mut chain = vec![usize::MAX; n];
    for i in 0..n {
        let b = grid.flat(grid.bin_of(positions[i]));
        chain[i] = heads[b];
        heads[b] = i;
    }

    let reach2 = reach * reach;
    let mut per_atom: Vec<Vec<Neighbor>> = vec![Vec::new(); n];

    let single_bin = total_bins == 1;
    for i in 0..n {
        let bi = grid.bin_of(positions[i]);
        let mut visit = |j: usize| {
            if j == i {
                return;
            }
            let d = cell.minimum_image_displacement(positions[i], positions[j]);
            if d.norm_squared() <= reach2 {
                let s = cell.minimum_image_shift(positions[i], positions[j]);
                per_atom[i].push(Neighbor {
                    index: j as u32,
                    shift: [s[0] as i8, s[1] as i8, s[2] as i8],
                });
            }
        };
        if single_bin {
            for j in 0..n {
                visit(j);
            }
        } else {
            for dz in -1..=1isize {
                for dy in -1..=1isize {
                    for dx in -1..=1isize {
                        let mut b = [0usize; 3];
                        let mut skip = false;
                        for (k, d) in [dx, dy, dz].iter().enumerate() {
                            let nk = grid.nbins[k] as isize;
                            let mut idx = bi[k] as isize + d;
                            if grid.periodic[k] && nk >= 3 {
                                idx = idx.rem_euclid(nk);
                            } else if idx < 0 || idx >= nk {
                                skip = true;
                                break;
                            }
                            b[k] = idx as usize;
                        }
                        if skip {
                            continue;
                        }
                        let mut j = heads[grid.flat(b)];
                        while j != usize::MAX {
                            visit(j);
                            j = chain[j];
                        }
                    }
                }
            }
        }
    }

    // Canonical per-atom order so downstream accumulation is deterministic.
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut entries = Vec::new();
    for list in &mut per_atom {
        list.sort_unstable();
        entries.extend_from_slice(list);
        offsets.push(entries.len());
    }

    Ok(NeighborList {
        offsets,
        entries,
        cutoff,
        skin,
        build_positions: positions.to_vec(),
    })
}
