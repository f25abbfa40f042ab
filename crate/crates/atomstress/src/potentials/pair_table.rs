use crate::error::{Error, Result};

/// Tabulated pair potential given as `(r, dV/dr)` samples with natural cubic
/// spline interpolation of the derivative. Energy comes from the exact
/// segment-wise integral of the spline, anchored to zero at the last sample
/// (the cutoff).
#[derive(Debug, Clone)]
pub struct PairTable {
    r: Vec<f64>,
    dv: Vec<f64>,
    second: Vec<f64>,
    /// Energy at each knot, integrating backwards from the cutoff.
    energy_at_knot: Vec<f64>,
}

impl PairTable {
    pub fn new(r: Vec<f64>, dv: Vec<f64>) -> Result<Self> {
        if r.len() != dv.len() || r.len() < 3 {
            return Err(Error::invalid(format!(
                "pair table needs at least 3 matching samples, got {} radii and {} derivatives",
                r.len(),
                dv.len()
            )));
        }
        if !r.iter().all(|x| x.is_finite()) || !dv.iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("pair table entries must be finite"));
        }
        if !(r[0] > 0.0) || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("pair table radii must be positive and strictly increasing"));
        }
        let second = natural_cubic_second_derivatives(&r, &dv);
        let n = r.len();
        let mut energy_at_knot = vec![0.0; n];
        for k in (0..n - 1).rev() {
            let seg = segment_integral(&r, &dv, &second, k);
            // V(r_k) = V(r_{k+1}) - integral of dV/dr over [r_k, r_{k+1}]
            energy_at_knot[k] = energy_at_knot[k + 1] - seg;
        }
        Ok(PairTable {
            r,
            dv,
            second,
            energy_at_knot,
        })
    }

    /// Parses a two-column CSV (comma or whitespace separated, `#` comments).
    pub fn parse_csv(content: &str) -> Result<Self> {
        let mut radii = Vec::new();
        let mut derivs = Vec::new();
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(Error::invalid(format!(
                    "pair table line {}: expected two columns, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let r: f64 = fields[0]
                .parse()
                .map_err(|_| Error::invalid(format!("pair table line {}: bad radius {:?}", lineno + 1, fields[0])))?;
            let dv: f64 = fields[1]
                .parse()
                .map_err(|_| Error::invalid(format!("pair table line {}: bad derivative {:?}", lineno + 1, fields[1])))?;
            radii.push(r);
            derivs.push(dv);
        }
        PairTable::new(radii, derivs)
    }

    pub fn cutoff(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// Energy and distance-derivative at separation `r`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return Err(Error::invalid(format!("pair distance must be positive, got {r}")));
        }
        if r >= self.cutoff() {
            return Ok((0.0, 0.0));
        }
        // Below the first knot: clamp the derivative, extend energy linearly.
        if r <= self.r[0] {
            let dv = self.dv[0];
            return Ok((self.energy_at_knot[0] - dv * (self.r[0] - r), dv));
        }
        let k = match self.r.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(self.r.len() - 2),
            Err(i) => i - 1,
        };
        let dv = spline_value(&self.r, &self.dv, &self.second, k, r);
        let partial = partial_segment_integral(&self.r, &self.dv, &self.second, k, r);
        let energy = self.energy_at_knot[k + 1] - (segment_integral(&self.r, &self.dv, &self.second, k) - partial);
        Ok((energy, dv))
    }
}

/// Second derivatives of the natural cubic spline through `(x, y)`.
fn natural_cubic_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    // Thomas algorithm over the interior unknowns.
    for i in 2..n - 1 {
        let h0 = x[i] - x[i - 1];
        let w = h0 / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for i in (1..n - 1).rev() {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }
    m
}

fn spline_value(x: &[f64], y: &[f64], m: &[f64], k: usize, at: f64) -> f64 {
    let h = x[k + 1] - x[k];
    let a = (x[k + 1] - at) / h;
    let b = (at - x[k]) / h;
    a * y[k] + b * y[k + 1] + ((a * a * a - a) * m[k] + (b * b * b - b) * m[k + 1]) * h * h / 6.0
}

/// Integral of the spline over the full segment `[x_k, x_{k+1}]`.
fn segment_integral(x: &[f64], y: &[f64], m: &[f64], k: usize) -> f64 {
    let h = x[k + 1] - x[k];
    0.5 * h * (y[k] + y[k + 1]) - h * h * h * (m[k] + m[k + 1]) / 24.0
}

/// Integral of the spline over `[x_k, at]`.
fn partial_segment_integral(x: &[f64], y: &[f64], m: &[f64], k: usize, at: f64) -> f64 {
    let h = x[k + 1] - x[k];
    let a = (x[k + 1] - at) / h;
    let b = (at - x[k]) / h;
    // Antiderivative in terms of a and b; at the left end a=1, b=0.
    let poly = |a: f64, b: f64| {
        -0.5 * a * a * y[k] * h
            + 0.5 * b * b * y[k + 1] * h
            + (h * h * h / 6.0)
                * (-(a * a * a * a / 4.0 - a * a / 2.0) * m[k] + (b * b * b * b / 4.0 - b * b / 2.0) * m[k + 1])
    };
    poly(a, b) - poly(1.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::lj::LjPotential;

    #[test]
    fn reproduces_tabulated_lj_between_knots() {
        let lj = LjPotential::default();
        let n = 400;
        let r0 = 0.8;
        let rc = 2.5;
        let r: Vec<f64> = (0..n).map(|i| r0 + (rc - r0) * i as f64 / (n - 1) as f64).collect();
        let dv: Vec<f64> = r.iter().map(|&x| lj.eval(x.min(rc - 1e-12)).unwrap().1).collect();
        let table = PairTable::new(r, dv).unwrap();
        for &x in &[0.9, 1.0, 1.37, 1.9, 2.2] {
            let (e_t, dv_t) = table.eval(x).unwrap();
            let (e_l, dv_l) = lj.eval(x).unwrap();
            assert!((dv_t - dv_l).abs() < 1e-4, "dV at {x}: {dv_t} vs {dv_l}");
            // Energies differ by the (tiny) residual of phi at the cutoff.
            assert!((e_t - e_l).abs() < 1e-3, "V at {x}: {e_t} vs {e_l}");
        }
    }

    #[test]
    fn csv_parsing_and_errors() {
        let good = "# r, dVdr\n1.0, -5.0\n1.5, -1.0\n2.0, 0.0\n";
        let table = PairTable::parse_csv(good).unwrap();
        assert_eq!(table.cutoff(), 2.0);
        assert!(PairTable::parse_csv("1.0\n2.0\n").is_err());
        assert!(PairTable::parse_csv("1.0, 2.0\n0.5, 1.0\n0.7, 0.0\n").is_err());
        assert!(PairTable::parse_csv("").is_err());
    }

    #[test]
    fn energy_is_antiderivative_of_tabulated_derivative() {
        // V(r) = -integral_r^rc g, so dV/dr recovered by finite differences.
        let r: Vec<f64> = (0..50).map(|i| 0.9 + 0.03 * i as f64).collect();
        let dv: Vec<f64> = r.iter().map(|&x| (x - 2.0) * (-x).exp()).collect();
        let table = PairTable::new(r, dv).unwrap();
        for &x in &[1.0, 1.3, 1.9, 2.2] {
            let h = 1e-6;
            let fd = (table.eval(x + h).unwrap().0 - table.eval(x - h).unwrap().0) / (2.0 * h);
            let (_, g) = table.eval(x).unwrap();
            assert!((fd - g).abs() < 1e-6, "at {x}: fd {fd} vs spline {g}");
        }
        // Zero at the cutoff by construction.
        let rc = table.cutoff();
        assert_eq!(table.eval(rc).unwrap(), (0.0, 0.0));
    }
}
