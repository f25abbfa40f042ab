use crate::error::{Error, Result};

/// Modified Lennard-Jones potential in reduced units:
/// `phi(r) = 4(r^-12 - r^-6) - 0.0078 r^2 + 0.0651` for `r < r_cut`, zero
/// beyond. The quadratic shift brings both the energy and its derivative
/// near zero at the cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LjPotential {
    pub quad_coeff: f64,
    pub const_coeff: f64,
    pub cutoff: f64,
}

impl Default for LjPotential {
    fn default() -> Self {
        LjPotential {
            quad_coeff: 0.0078,
            const_coeff: 0.0651,
            cutoff: 2.5,
        }
    }
}

impl LjPotential {
    /// Energy and distance-derivative at separation `r`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return Err(Error::invalid(format!("pair distance must be positive, got {r}")));
        }
        if r >= self.cutoff {
            return Ok((0.0, 0.0));
        }
        let inv = 1.0 / r;
        let inv2 = inv * inv;
        let inv6 = inv2 * inv2 * inv2;
        let inv12 = inv6 * inv6;
        let energy = 4.0 * (inv12 - inv6) - self.quad_coeff * r * r + self.const_coeff;
        let derivative = 4.0 * (-12.0 * inv12 + 6.0 * inv6) * inv - 2.0 * self.quad_coeff * r;
        Ok((energy, derivative))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_zero_at_cutoff() {
        let lj = LjPotential::default();
        let (e, de) = lj.eval(2.5 - 1e-12).unwrap();
        assert!(e.abs() < 1e-4, "phi(2.5) = {e}");
        assert!(de.abs() < 1e-4, "phi'(2.5) = {de}");
    }

    #[test]
    fn zero_beyond_cutoff() {
        let lj = LjPotential::default();
        assert_eq!(lj.eval(3.0).unwrap(), (0.0, 0.0));
        assert_eq!(lj.eval(2.5).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let lj = LjPotential::default();
        for &r in &[0.9, 1.0, 1.3, 1.9, 2.3] {
            let (_, de) = lj.eval(r).unwrap();
            let h = 1e-6;
            let fd = (lj.eval(r + h).unwrap().0 - lj.eval(r - h).unwrap().0) / (2.0 * h);
            assert!(
                (de - fd).abs() <= 1e-8 * de.abs().max(1.0),
                "r={r}: analytic {de} vs fd {fd}"
            );
        }
    }

    #[test]
    fn rejects_non_positive_distance() {
        let lj = LjPotential::default();
        assert!(lj.eval(0.0).is_err());
        assert!(lj.eval(-1.0).is_err());
    }

    #[test]
    fn hand_value_at_unit_distance() {
        let lj = LjPotential::default();
        let (_, de) = lj.eval(1.0).unwrap();
        // 4(-12 + 6) - 2*0.0078 = -24.0156
        assert!((de - (-24.0156)).abs() < 1e-12);
    }
}
