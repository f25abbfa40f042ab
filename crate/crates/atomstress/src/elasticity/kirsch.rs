//! Plane-strain solution for an infinite anisotropic plate with a circular
//! hole under remote uniaxial tension, via the two-complex-potential
//! formulation with conformal mapping of the hole exterior. Cubic material
//! axes are aligned with the load (x1) and transverse (x2) directions.
//!
//! The repeated-root (isotropic) degeneracy is handled by splitting the
//! second root with a small perturbation and Richardson-extrapolating the
//! evaluated fields.

use num_complex::Complex64;

use crate::elasticity::CubicConstants;
use crate::error::{Error, Result};

/// Field values at one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KirschField {
    /// In-plane stress components (s11, s22, s12).
    pub stress: [f64; 3],
    /// In-plane displacement (u1, u2).
    pub displacement: [f64; 2],
    /// Point lies strictly inside the hole: all fields zero.
    pub inside_hole: bool,
}

#[derive(Debug, Clone)]
struct Core {
    mu1: Complex64,
    mu2: Complex64,
    b_uni: Complex64,
    lam: Complex64,
    a_hole: Complex64,
    b_hole: Complex64,
    p1: Complex64,
    p2: Complex64,
    q1: Complex64,
    q2: Complex64,
    radius: f64,
    rotation: f64,
}

/// Solver for the anisotropic plate-with-hole problem.
#[derive(Debug, Clone)]
pub struct KirschSolution {
    /// Either a single core or a (half-perturbation, full-perturbation) pair
    /// for Richardson extrapolation near the isotropic degeneracy.
    direct: Core,
    richardson: Option<Core>,
    radius: f64,
}

/// Relative root separation below which the degenerate path engages.
const DEGENERACY_THRESHOLD: f64 = 1e-4;
/// Root perturbation used by the degenerate path.
const DEGENERACY_SPLIT: f64 = 1e-6;

impl KirschSolution {
    pub fn new(c: &CubicConstants, sigma_inf: f64, hole_radius: f64) -> Result<Self> {
        if !(hole_radius > 0.0) {
            return Err(Error::invalid("hole radius must be positive"));
        }
        // Plane-strain reduced compliances for a cubic crystal on its axes.
        let d = c.c11 * c.c11 - c.c12 * c.c12;
        let beta11 = c.c11 / d;
        let beta12 = -c.c12 / d;
        let beta66 = 1.0 / c.c44;

        let (mu1, mu2) = characteristic_roots(beta11, beta12, beta66)?;
        let separation = (mu1 - mu2).norm() / mu1.norm().max(mu2.norm());
        if separation < DEGENERACY_THRESHOLD {
            let half = build_core(
                beta11,
                beta12,
                beta66,
                sigma_inf,
                hole_radius,
                mu1,
                mu1 * Complex64::new(1.0 + 0.5 * DEGENERACY_SPLIT, 0.0),
            )?;
            let full = build_core(
                beta11,
                beta12,
                beta66,
                sigma_inf,
                hole_radius,
                mu1,
                mu1 * Complex64::new(1.0 + DEGENERACY_SPLIT, 0.0),
            )?;
            Ok(KirschSolution {
                direct: half,
                richardson: Some(full),
                radius: hole_radius,
            })
        } else {
            let core = build_core(beta11, beta12, beta66, sigma_inf, hole_radius, mu1, mu2)?;
            Ok(KirschSolution {
                direct: core,
                richardson: None,
                radius: hole_radius,
            })
        }
    }

    pub fn hole_radius(&self) -> f64 {
        self.radius
    }

    /// Stress and displacement at an in-plane point.
    pub fn eval(&self, x: f64, y: f64) -> KirschField {
        if x * x + y * y < self.radius * self.radius * (1.0 - 1e-12) {
            return KirschField {
                stress: [0.0; 3],
                displacement: [0.0; 2],
                inside_hole: true,
            };
        }
        match &self.richardson {
            None => eval_core(&self.direct, x, y),
            Some(full) => {
                // Linear-order Richardson: 2 f(delta/2) - f(delta).
                let h = eval_core(&self.direct, x, y);
                let f = eval_core(full, x, y);
                KirschField {
                    stress: [
                        2.0 * h.stress[0] - f.stress[0],
                        2.0 * h.stress[1] - f.stress[1],
                        2.0 * h.stress[2] - f.stress[2],
                    ],
                    displacement: [
                        2.0 * h.displacement[0] - f.displacement[0],
                        2.0 * h.displacement[1] - f.displacement[1],
                    ],
                    inside_hole: false,
                }
            }
        }
    }
}

/// Roots of `beta11 mu^4 + (2 beta12 + beta66) mu^2 + beta22 = 0` with
/// positive imaginary part (beta22 = beta11 for the cubic case).
fn characteristic_roots(beta11: f64, beta12: f64, beta66: f64) -> Result<(Complex64, Complex64)> {
    let beta22 = beta11;
    let q = 2.0 * beta12 + beta66;
    let disc = Complex64::new(q * q - 4.0 * beta11 * beta22, 0.0).sqrt();
    let mu2_a = (Complex64::new(-q, 0.0) + disc) / (2.0 * beta11);
    let mu2_b = (Complex64::new(-q, 0.0) - disc) / (2.0 * beta11);
    let upper = |w: Complex64| {
        let r = w.sqrt();
        if r.im > 0.0 {
            r
        } else {
            -r
        }
    };
    let mu1 = upper(mu2_a);
    let mu2 = upper(mu2_b);
    if !(mu1.im > 0.0 && mu2.im > 0.0) {
        return Err(Error::numerical(
            "characteristic roots did not split into the upper half plane",
        ));
    }
    Ok((mu1, mu2))
}

fn build_core(
    beta11: f64,
    beta12: f64,
    beta66: f64,
    sigma: f64,
    radius: f64,
    mu1: Complex64,
    mu2: Complex64,
) -> Result<Core> {
    let _ = beta66;
    let beta22 = beta11;

    // Uniform-field coefficients: phi_u = B z1, psi_u = (B' + iC') z2 with
    // B real, reproducing sigma_x = sigma, sigma_y = tau = 0 at infinity.
    let m = nalgebra::Matrix3::new(
        (mu1 * mu1).re,
        (mu2 * mu2).re,
        -(mu2 * mu2).im,
        1.0,
        1.0,
        0.0,
        mu1.re,
        mu2.re,
        -mu2.im,
    );
    let rhs = nalgebra::Vector3::new(0.5 * sigma, 0.0, 0.0);
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::numerical("uniform-field system is singular"))?;
    let b_uni = Complex64::new(sol[0], 0.0);
    let lam = Complex64::new(sol[1], sol[2]);

    // Hole coefficients from the traction-free boundary conditions, written
    // as vanishing first-harmonic coefficients on the mapped unit circle.
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let half_r = Complex64::new(0.5 * radius, 0.0);
    let u1 = half_r * (b_uni * (one - i * mu1) + lam * (one - i * mu2));
    let v1 = half_r * (b_uni * (one + i * mu1) + lam * (one + i * mu2));
    let u2 = half_r * (mu1 * b_uni * (one - i * mu1) + mu2 * lam * (one - i * mu2));
    let v2 = half_r * (mu1 * b_uni * (one + i * mu1) + mu2 * lam * (one + i * mu2));
    let rhs1 = -(u1 + v1.conj());
    let rhs2 = -(u2 + v2.conj());
    let mu1c = mu1.conj();
    let mu2c = mu2.conj();
    let det = mu1c - mu2c;
    if det.norm() == 0.0 {
        return Err(Error::numerical("coincident characteristic roots"));
    }
    let a_bar = (rhs2 - mu2c * rhs1) / det;
    let b_bar = rhs1 - a_bar;
    let a_hole = a_bar.conj();
    let b_hole = b_bar.conj();

    // Displacement factors (plane strain, beta16 = beta26 = 0).
    let p1 = beta11 * mu1 * mu1 + beta12;
    let p2 = beta11 * mu2 * mu2 + beta12;
    let q1 = beta12 * mu1 + beta22 / mu1;
    let q2 = beta12 * mu2 + beta22 / mu2;

    // Rigid rotation carried by the uniform part; removed so the far field
    // is a pure symmetric strain.
    let du_dy = 2.0 * (p1 * b_uni * mu1 + p2 * lam * mu2).re;
    let dv_dx = 2.0 * (q1 * b_uni + q2 * lam).re;
    let rotation = 0.5 * (du_dy - dv_dx);

    Ok(Core {
        mu1,
        mu2,
        b_uni,
        lam,
        a_hole,
        b_hole,
        p1,
        p2,
        q1,
        q2,
        radius,
        rotation,
    })
}

/// Exterior mapping coordinate for one root: `|zeta| >= 1` outside the hole.
fn zeta_of(z: Complex64, mu: Complex64, radius: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let w = (z * z - radius * radius * (one + mu * mu)).sqrt();
    let denom = radius * (one - i * mu);
    let za = (z + w) / denom;
    let zb = (z - w) / denom;
    if za.norm() >= zb.norm() {
        za
    } else {
        zb
    }
}

fn eval_core(core: &Core, x: f64, y: f64) -> KirschField {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let r = core.radius;

    let z1 = Complex64::new(x, 0.0) + core.mu1 * Complex64::new(y, 0.0);
    let z2 = Complex64::new(x, 0.0) + core.mu2 * Complex64::new(y, 0.0);
    let zeta1 = zeta_of(z1, core.mu1, r);
    let zeta2 = zeta_of(z2, core.mu2, r);

    let dz1_dzeta = 0.5 * r * ((one - i * core.mu1) - (one + i * core.mu1) / (zeta1 * zeta1));
    let dz2_dzeta = 0.5 * r * ((one - i * core.mu2) - (one + i * core.mu2) / (zeta2 * zeta2));

    let phi_p = core.b_uni - core.a_hole / (zeta1 * zeta1 * dz1_dzeta);
    let psi_p = core.lam - core.b_hole / (zeta2 * zeta2 * dz2_dzeta);

    let sxx = 2.0 * (core.mu1 * core.mu1 * phi_p + core.mu2 * core.mu2 * psi_p).re;
    let syy = 2.0 * (phi_p + psi_p).re;
    let sxy = -2.0 * (core.mu1 * phi_p + core.mu2 * psi_p).re;

    let phi = core.b_uni * z1 + core.a_hole / zeta1;
    let psi = core.lam * z2 + core.b_hole / zeta2;
    let u = 2.0 * (core.p1 * phi + core.p2 * psi).re - core.rotation * y;
    let v = 2.0 * (core.q1 * phi + core.q2 * psi).re + core.rotation * x;

    KirschField {
        stress: [sxx, syy, sxy],
        displacement: [u, v],
        inside_hole: false,
    }
}

/// Classical isotropic closed-form solution (stresses only), used as the
/// independent check of the anisotropic machinery in the isotropic limit.
pub fn isotropic_kirsch_stress(sigma: f64, radius: f64, x: f64, y: f64) -> [f64; 3] {
    let r2 = x * x + y * y;
    if r2 < radius * radius {
        return [0.0; 3];
    }
    let theta = y.atan2(x);
    let a2 = radius * radius / r2;
    let a4 = a2 * a2;
    let c2 = (2.0 * theta).cos();
    let s2 = (2.0 * theta).sin();
    let srr = 0.5 * sigma * (1.0 - a2) + 0.5 * sigma * (1.0 - 4.0 * a2 + 3.0 * a4) * c2;
    let stt = 0.5 * sigma * (1.0 + a2) - 0.5 * sigma * (1.0 + 3.0 * a4) * c2;
    let srt = -0.5 * sigma * (1.0 + 2.0 * a2 - 3.0 * a4) * s2;
    // Rotate polar components back to Cartesian.
    let (ct, st) = (theta.cos(), theta.sin());
    let sxx = srr * ct * ct + stt * st * st - 2.0 * srt * st * ct;
    let syy = srr * st * st + stt * ct * ct + 2.0 * srt * st * ct;
    let sxy = (srr - stt) * st * ct + srt * (ct * ct - st * st);
    [sxx, syy, sxy]
}
