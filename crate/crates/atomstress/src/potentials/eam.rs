use crate::error::{Error, Result};

/// Generic analytic embedded-atom model:
/// `V = 1/2 sum V_pair(r_ab) + sum U(rho_a)`, `rho_a = sum f(r_ab)`
/// with `V_pair(r) = A (r_c - r)^2 exp(-p r)`, `f(r) = (r_c - r)^2 exp(-q r)`
/// and embedding `U(rho) = -D sqrt(rho)`. Pair part and density vanish with
/// zero slope at the cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EamPotential {
    pub pair_scale: f64,
    pub pair_decay: f64,
    pub density_decay: f64,
    pub embed_scale: f64,
    pub cutoff: f64,
}

impl Default for EamPotential {
    fn default() -> Self {
        // Defaults give the fcc ground state a cohesive minimum near
        // a = 1.85 (nearest-neighbor distance 1.31), comfortably inside the
        // cutoff.
        EamPotential {
            pair_scale: 1.0,
            pair_decay: 2.0,
            density_decay: 4.0,
            embed_scale: 3.0,
            cutoff: 2.5,
        }
    }
}

impl EamPotential {
    pub fn pair(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return Err(Error::invalid(format!("pair distance must be positive, got {r}")));
        }
        if r >= self.cutoff {
            return Ok((0.0, 0.0));
        }
        let g = self.cutoff - r;
        let e = (-self.pair_decay * r).exp();
        let v = self.pair_scale * g * g * e;
        let dv = -self.pair_scale * g * e * (2.0 + self.pair_decay * g);
        Ok((v, dv))
    }

    /// Electron density contribution of one neighbor and its derivative.
    pub fn density(&self, r: f64) -> (f64, f64) {
        if r >= self.cutoff || r <= 0.0 {
            return (0.0, 0.0);
        }
        let g = self.cutoff - r;
        let e = (-self.density_decay * r).exp();
        (g * g * e, -g * e * (2.0 + self.density_decay * g))
    }

    /// Embedding energy and its density-derivative. A particle with zero
    /// density (no neighbors) contributes nothing.
    pub fn embed(&self, rho: f64) -> (f64, f64) {
        if rho <= 0.0 {
            return (0.0, 0.0);
        }
        let s = rho.sqrt();
        (-self.embed_scale * s, -0.5 * self.embed_scale / s)
    }
}
