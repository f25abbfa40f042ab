//! Continuum-field estimators: instantaneous density/momentum/velocity
//! fields, time-averaged Hardy stress, virial stress, DA stress, Tsai
//! traction with crossing detection, the sigma-star counterexample, and
//! tensor assembly from tractions.

mod da;
mod fields;
mod frame;
mod geometry;
mod hardy;
mod star;
mod tsai;
mod virial;

pub use da::{da_stress, da_stress_window};
pub use fields::{continuum_fields, ContinuumSample};
pub use hardy::hardy_stress;
pub use star::{radial_decay_factor, stress_star_counterexample};
pub use tsai::{
    assemble_tensor_from_tractions, tsai_traction, tsai_traction_multi, PlanarProbe,
    TractionSample, VelocityRule,
};
pub use virial::{
    virial_pressure_parts, virial_stress, virial_stress_with_reference, VirialDomain, VirialStress,
};

use crate::error::{Error, Result};
use crate::{Mat3, Vec3};

/// Regular-grid metadata that reproduces the point sequence of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularGridMeta {
    pub origin: Vec3,
    pub spacing: Vec3,
    pub counts: [usize; 3],
}

/// Ordered evaluation points, optionally carrying regular-grid metadata.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    points: Vec<Vec3>,
    regular: Option<RegularGridMeta>,
}

impl FieldGrid {
    pub fn from_points(points: Vec<Vec3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("field grid needs at least one point"));
        }
        if !points.iter().all(|p| p.iter().all(|c| c.is_finite())) {
            return Err(Error::invalid("grid points must be finite"));
        }
        Ok(FieldGrid {
            points,
            regular: None,
        })
    }

    /// Row-major regular grid: x fastest, then y, then z.
    pub fn regular(origin: Vec3, spacing: Vec3, counts: [usize; 3]) -> Result<Self> {
        if counts.iter().any(|&c| c == 0) {
            return Err(Error::invalid("grid counts must be positive"));
        }
        let mut points = Vec::with_capacity(counts[0] * counts[1] * counts[2]);
        for iz in 0..counts[2] {
            for iy in 0..counts[1] {
                for ix in 0..counts[0] {
                    points.push(
                        origin
                            + Vec3::new(
                                ix as f64 * spacing.x,
                                iy as f64 * spacing.y,
                                iz as f64 * spacing.z,
                            ),
                    );
                }
            }
        }
        Ok(FieldGrid {
            points,
            regular: Some(RegularGridMeta {
                origin,
                spacing,
                counts,
            }),
        })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn regular_meta(&self) -> Option<&RegularGridMeta> {
        self.regular.as_ref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Which estimator produced a stress field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorTag {
    Hardy,
    Virial,
    DoublyAveraged,
    StressStar,
}

impl EstimatorTag {
    pub fn label(&self) -> &'static str {
        match self {
            EstimatorTag::Hardy => "hardy",
            EstimatorTag::Virial => "virial",
            EstimatorTag::DoublyAveraged => "da",
            EstimatorTag::StressStar => "star",
        }
    }
}

/// Kinetic and potential tensors at one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointStress {
    pub kinetic: Mat3,
    pub potential: Mat3,
}

impl PointStress {
    pub fn zero() -> Self {
        PointStress {
            kinetic: Mat3::zeros(),
            potential: Mat3::zeros(),
        }
    }

    pub fn total(&self) -> Mat3 {
        self.kinetic + self.potential
    }
}

/// A stress field over a grid: per-point kinetic/potential/total tensors,
/// the producing estimator, and the averaging window.
#[derive(Debug, Clone)]
pub struct StressField {
    pub grid: FieldGrid,
    pub samples: Vec<PointStress>,
    pub estimator: EstimatorTag,
    pub window: (f64, f64),
}

impl StressField {
    pub fn total_at(&self, i: usize) -> Mat3 {
        self.samples[i].total()
    }
}
