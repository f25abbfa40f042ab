//! Direct lattice summation for the homogeneously deformed infinite fcc
//! crystal: energy per atom under a deformation gradient, relaxed lattice
//! constant, and cubic elastic constants from second finite differences of
//! the strain energy density.

use crate::elasticity::CubicConstants;
use crate::error::{Error, Result};
use crate::potentials::PotentialModel;
use crate::{Mat3, Vec3};

/// Enumerates fcc lattice vectors (one-atom primitive basis) whose deformed
/// image can lie within the cutoff.
fn fcc_shells(a: f64, cutoff: f64) -> Vec<Vec3> {
    // Primitive vectors a/2 (0,1,1), a/2 (1,0,1), a/2 (1,1,0).
    let half = 0.5 * a;
    let nn = a / 2.0_f64.sqrt();
    let m = (cutoff / nn).ceil() as i32 + 2;
    let mut out = Vec::new();
    for n1 in -m..=m {
        for n2 in -m..=m {
            for n3 in -m..=m {
                if n1 == 0 && n2 == 0 && n3 == 0 {
                    continue;
                }
                let r = Vec3::new(
                    half * (n2 + n3) as f64,
                    half * (n1 + n3) as f64,
                    half * (n1 + n2) as f64,
                );
                // Keep a margin for moderate deformations of the shell.
                if r.norm() <= cutoff * 1.25 {
                    out.push(r);
                }
            }
        }
    }
    out
}

/// Energy per atom of the infinite fcc crystal with lattice constant `a`
/// deformed by the gradient `f`.
pub fn fcc_energy_per_atom(model: &PotentialModel, a: f64, f: &Mat3) -> Result<f64> {
    let cutoff = model.cutoff();
    let mut pair = 0.0;
    let mut rho = 0.0;
    for r0 in fcc_shells(a, cutoff) {
        let r = (f * r0).norm();
        if r >= cutoff {
            continue;
        }
        if r <= 0.0 {
            return Err(Error::geometry("deformation collapses a lattice vector"));
        }
        match model {
            PotentialModel::Lj(p) => pair += 0.5 * p.eval(r)?.0,
            PotentialModel::PairTable(t) => pair += 0.5 * t.eval(r)?.0,
            PotentialModel::Eam(p) => {
                pair += 0.5 * p.pair(r)?.0;
                rho += p.density(r).0;
            }
        }
    }
    if let PotentialModel::Eam(p) = model {
        pair += p.embed(rho).0;
    }
    Ok(pair)
}

/// Pressure of the undeformed crystal at lattice constant `a`:
/// `p = -(du/da) / (3 a^2 / 4)` with u the energy per atom.
pub fn fcc_pressure(model: &PotentialModel, a: f64) -> Result<f64> {
    let h = 1e-6 * a;
    let id = Mat3::identity();
    let up = fcc_energy_per_atom(model, a + h, &id)?;
    let um = fcc_energy_per_atom(model, a - h, &id)?;
    let dua = (up - um) / (2.0 * h);
    Ok(-dua / (0.75 * a * a))
}

/// Relaxed lattice constant: minimizes the energy per atom over `a` by
/// golden-section search followed by a derivative bisection polish.
pub fn relaxed_lattice_constant(model: &PotentialModel, lo: f64, hi: f64) -> Result<f64> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::invalid("bracket must satisfy 0 < lo < hi"));
    }
    let id = Mat3::identity();
    let u = |a: f64| fcc_energy_per_atom(model, a, &id);
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a1, mut b1) = (lo, hi);
    let mut x1 = b1 - phi * (b1 - a1);
    let mut x2 = a1 + phi * (b1 - a1);
    let mut f1 = u(x1)?;
    let mut f2 = u(x2)?;
    for _ in 0..200 {
        if f1 < f2 {
            b1 = x2;
            x2 = x1;
            f2 = f1;
            x1 = b1 - phi * (b1 - a1);
            f1 = u(x1)?;
        } else {
            a1 = x1;
            x1 = x2;
            f1 = f2;
            x2 = a1 + phi * (b1 - a1);
            f2 = u(x2)?;
        }
        if (b1 - a1) < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (a1 + b1))
}

/// Cubic elastic constants by second central differences of the strain
/// energy density about the relaxed state, strain amplitude 1e-4.
///
/// Uniaxial strain probes c11, equibiaxial c11 + c12, and simple shear c44.
/// Fails if the reference state carries residual pressure above 1e-6.
pub fn cubic_constants_fd(model: &PotentialModel, a: f64) -> Result<CubicConstants> {
    let p = fcc_pressure(model, a)?;
    if p.abs() >= 1e-6 {
        return Err(Error::invalid(format!(
            "reference lattice constant {a} carries residual pressure {p:.3e}"
        )));
    }
    cubic_constants_fd_with_amplitude(model, a, 1e-4)
}

pub fn cubic_constants_fd_with_amplitude(
    model: &PotentialModel,
    a: f64,
    h: f64,
) -> Result<CubicConstants> {
    // Energy density relative to the reference volume a^3/4 per atom.
    let density = |f: &Mat3| -> Result<f64> {
        Ok(fcc_energy_per_atom(model, a, f)? * 4.0 / (a * a * a))
    };
    let id = Mat3::identity();
    let w0 = density(&id)?;

    let uni = |s: f64| {
        let mut f = id;
        f[(0, 0)] += s;
        f
    };
    let biax = |s: f64| {
        let mut f = id;
        f[(0, 0)] += s;
        f[(1, 1)] += s;
        f
    };
    let shear = |s: f64| {
        let mut f = id;
        f[(0, 1)] += s;
        f
    };

    let second = |probe: &dyn Fn(f64) -> Mat3| -> Result<f64> {
        let wp = density(&probe(h))?;
        let wm = density(&probe(-h))?;
        Ok((wp - 2.0 * w0 + wm) / (h * h))
    };

    let c11 = second(&|s| uni(s))?;
    let d_biax = second(&|s| biax(s))?;
    let c12 = 0.5 * d_biax - c11;
    let c44 = second(&|s| shear(s))?;
    CubicConstants::new(c11, c12, c44)
}
