use crate::error::{Error, Result};
use crate::system::ParticleState;

/// One frame of a trajectory.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub state: ParticleState,
}

/// An ordered sequence of snapshots with uniform time spacing.
///
/// All frames share particle count, species, masses and cell topology.
#[derive(Debug, Clone)]
pub struct Trajectory {
    snapshots: Vec<Snapshot>,
    velocities_present: bool,
}

impl Trajectory {
    pub fn new(snapshots: Vec<Snapshot>) -> Result<Self> {
        Self::with_flags(snapshots, true)
    }

    pub fn with_flags(snapshots: Vec<Snapshot>, velocities_present: bool) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::invalid("trajectory needs at least one snapshot"));
        }
        let first = &snapshots[0];
        if !first.time.is_finite() {
            return Err(Error::invalid("snapshot times must be finite"));
        }
        for (k, s) in snapshots.iter().enumerate().skip(1) {
            if !s.time.is_finite() || s.time < snapshots[k - 1].time {
                return Err(Error::invalid(format!(
                    "snapshot times must be finite and non-decreasing (frame {k})"
                )));
            }
            if s.state.len() != first.state.len() {
                return Err(Error::invalid(format!(
                    "frame {k} has {} particles, frame 0 has {}",
                    s.state.len(),
                    first.state.len()
                )));
            }
            if s.state.species() != first.state.species() {
                return Err(Error::invalid(format!("frame {k} changes species labels")));
            }
            if s.state.masses() != first.state.masses() {
                return Err(Error::invalid(format!("frame {k} changes masses")));
            }
            if s.state.cell().periodic() != first.state.cell().periodic() {
                return Err(Error::invalid(format!("frame {k} changes cell periodicity")));
            }
        }
        // Uniform spacing within a relative tolerance.
        if snapshots.len() > 2 {
            let dt0 = snapshots[1].time - snapshots[0].time;
            for k in 2..snapshots.len() {
                let dt = snapshots[k].time - snapshots[k - 1].time;
                if (dt - dt0).abs() > 1e-9 * dt0.abs().max(1.0) {
                    return Err(Error::invalid(format!(
                        "non-uniform snapshot spacing at frame {k}: {dt} vs {dt0}"
                    )));
                }
            }
        }
        Ok(Trajectory {
            snapshots,
            velocities_present,
        })
    }

    pub fn single(state: ParticleState) -> Self {
        Trajectory {
            snapshots: vec![Snapshot { time: 0.0, state }],
            velocities_present: true,
        }
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: at least one snapshot
    }

    /// Snapshot spacing; zero for a single-frame trajectory.
    pub fn dt(&self) -> f64 {
        if self.snapshots.len() < 2 {
            0.0
        } else {
            self.snapshots[1].time - self.snapshots[0].time
        }
    }

    /// Whether the source carried velocity data (readers flag the default).
    pub fn velocities_present(&self) -> bool {
        self.velocities_present
    }

    /// A sub-window [first, last] as a new trajectory (indices inclusive).
    pub fn window(&self, first: usize, last: usize) -> Result<Trajectory> {
        if first > last || last >= self.snapshots.len() {
            return Err(Error::invalid(format!(
                "window [{first}, {last}] out of range for {} frames",
                self.snapshots.len()
            )));
        }
        Trajectory::with_flags(
            self.snapshots[first..=last].to_vec(),
            self.velocities_present,
        )
    }
}
