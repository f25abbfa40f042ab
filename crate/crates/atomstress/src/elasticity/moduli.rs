use crate::error::{Error, Result};

/// Cubic elastic constants in stress units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicConstants {
    pub c11: f64,
    pub c12: f64,
    pub c44: f64,
}

impl CubicConstants {
    pub fn new(c11: f64, c12: f64, c44: f64) -> Result<Self> {
        if !(c11 > c12.abs()) || !(c44 > 0.0) || !(c11 + 2.0 * c12 > 0.0) {
            return Err(Error::invalid(format!(
                "unstable cubic constants: c11 = {c11}, c12 = {c12}, c44 = {c44}"
            )));
        }
        Ok(CubicConstants { c11, c12, c44 })
    }

    /// Zener anisotropy ratio `2 c44 / (c11 - c12)`; 1 for isotropy.
    pub fn zener_ratio(&self) -> f64 {
        2.0 * self.c44 / (self.c11 - self.c12)
    }
}

/// Engineering moduli for a cubic crystal loaded along the cube axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moduli {
    pub youngs: f64,
    pub shear: f64,
    pub poisson: f64,
}

/// `E = (c11^2 + c11 c12 - 2 c12^2)/(c11 + c12)`, `mu = c44`,
/// `nu = c12/(c11 + c12)`.
pub fn engineering_moduli(c: &CubicConstants) -> Moduli {
    let e = (c.c11 * c.c11 + c.c11 * c.c12 - 2.0 * c.c12 * c.c12) / (c.c11 + c.c12);
    Moduli {
        youngs: e,
        shear: c.c44,
        poisson: c.c12 / (c.c11 + c.c12),
    }
}

/// Periodic box lengths that impose uniform uniaxial stress `sigma11` on an
/// `n x n x n`-cell cubic crystal: `l1 = n a (1 + sigma11/E)`,
/// `l2 = l3 = n a (1 - nu sigma11/E)`.
pub fn uniaxial_cell_strain(sigma11: f64, m: &Moduli, n_cells: usize, a: f64) -> Result<(f64, f64, f64)> {
    if n_cells == 0 || !(a > 0.0) {
        return Err(Error::invalid("cell count and lattice constant must be positive"));
    }
    let base = n_cells as f64 * a;
    let l1 = base * (1.0 + sigma11 / m.youngs);
    let lt = base * (1.0 - m.poisson * sigma11 / m.youngs);
    Ok((l1, lt, lt))
}

/// Triaxial stress that builds up when a cubic crystal constrained to its
/// reference volume is heated by `dt`: `sigma = -(c11 + 2 c12) alpha_T dt`
/// on the diagonal, zero elsewhere.
pub fn thermal_stress(c: &CubicConstants, alpha_t: f64, dt: f64) -> f64 {
    -(c.c11 + 2.0 * c.c12) * alpha_t * dt
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_constants() -> CubicConstants {
        CubicConstants::new(87.652, 50.379, 50.379).unwrap()
    }

    #[test]
    fn published_moduli_values() {
        let m = engineering_moduli(&paper_constants());
        assert!((m.youngs - 50.877).abs() < 5e-3, "E = {}", m.youngs);
        assert_eq!(m.shear, 50.379);
        assert!((m.poisson - 0.365).abs() < 5e-4, "nu = {}", m.poisson);
    }

    #[test]
    fn isotropic_input_has_unit_zener_ratio() {
        let c = CubicConstants::new(100.0, 40.0, 30.0).unwrap();
        assert!((c.zener_ratio() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_limit() {
        let c = CubicConstants::new(80.0, 0.0, 30.0).unwrap();
        let m = engineering_moduli(&c);
        assert_eq!(m.poisson, 0.0);
        assert_eq!(m.youngs, 80.0);
    }

    #[test]
    fn strained_box_lengths_in_lattice_units() {
        let m = engineering_moduli(&paper_constants());
        let a = 1.556;
        let (l1, l2, l3) = uniaxial_cell_strain(1.0, &m, 10, a).unwrap();
        // The published values 10.197 and 9.928 are in units of the lattice
        // constant.
        assert!((l1 / a - 10.197).abs() < 5e-3, "l1/a = {}", l1 / a);
        assert!((l2 / a - 9.928).abs() < 5e-3, "l2/a = {}", l2 / a);
        assert_eq!(l2, l3);
    }

    #[test]
    fn zero_stress_keeps_reference_lengths() {
        let m = engineering_moduli(&paper_constants());
        let (l1, l2, l3) = uniaxial_cell_strain(0.0, &m, 10, 1.5).unwrap();
        assert_eq!((l1, l2, l3), (15.0, 15.0, 15.0));
    }

    #[test]
    fn strain_is_linear_in_stress() {
        let m = engineering_moduli(&paper_constants());
        let base = 10.0 * 1.556;
        let (l1a, ..) = uniaxial_cell_strain(1.0, &m, 10, 1.556).unwrap();
        let (l1b, ..) = uniaxial_cell_strain(2.0, &m, 10, 1.556).unwrap();
        assert!(((l1b - base) - 2.0 * (l1a - base)).abs() < 1e-12);
    }

    #[test]
    fn aluminum_thermal_stress() {
        // c11 = 118.1 GPa, c12 = 62.3 GPa, alpha = 1.6e-5 / K, dT = 310 K.
        let c = CubicConstants::new(118.1, 62.3, 28.0).unwrap();
        let s = thermal_stress(&c, 1.6e-5, 310.0);
        assert!((s - (-1.204)).abs() < 2e-3, "sigma = {s}");
        assert_eq!(thermal_stress(&c, 1.6e-5, 0.0), 0.0);
        // Heating a constrained solid is compressive.
        assert!(s < 0.0);
    }

    #[test]
    fn unstable_constants_are_rejected() {
        assert!(CubicConstants::new(10.0, 20.0, 5.0).is_err());
        assert!(CubicConstants::new(10.0, -6.0, 5.0).is_err());
        assert!(CubicConstants::new(10.0, 2.0, -1.0).is_err());
    }
}
