//! Continuum mechanical fields from discrete particle data.
//!
//! `atomstress` computes density, momentum, velocity, stress and traction
//! fields from particle configurations and trajectories using a family of
//! spatial-averaging estimators (Hardy, virial, Tsai traction, doubly-averaged
//! stress), built on a central-force decomposition of the interatomic forces.
//! A minimal NVE molecular-dynamics engine and a FIRE lattice-statics
//! minimizer generate the trajectories the estimators consume, and an
//! anisotropic plate-with-hole reference solver provides continuum fields to
//! compare against.

pub mod config;
pub mod distgeo;
pub mod dynamics;
pub mod elasticity;
pub mod error;
pub mod estimators;
mod quadrature;
pub mod experiments;
pub mod potentials;
pub mod system;
pub mod weighting;

pub use error::Error;

/// 3-vector of f64, used for positions, velocities and forces.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3x3 tensor of f64, used for stress tensors.
pub type Mat3 = nalgebra::Matrix3<f64>;
