//! Gauss-Legendre nodes and small adaptive quadrature helpers.

use once_cell::sync::Lazy;

use crate::Vec3;

/// Nodes and weights on [-1, 1] for a fixed order, computed once by Newton
/// iteration on the Legendre polynomial.
fn compute_gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let mut p0 = 1.0;
        let mut p1 = x;
        for k in 2..=n {
            let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = pk;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

static GL8: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| compute_gl(8));
static GL12: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| compute_gl(12));
static GL16: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| compute_gl(16));
static GL32: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| compute_gl(32));
static GL64: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| compute_gl(64));

pub(crate) fn gl_nodes(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    match n {
        8 => &GL8,
        12 => &GL12,
        16 => &GL16,
        32 => &GL32,
        64 => &GL64,
        _ => panic!("unsupported Gauss-Legendre order {n}"),
    }
}

/// Fixed-order Gauss-Legendre integral of `f` over [a, b].
pub(crate) fn gl_integrate(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, order: usize) -> f64 {
    let (nodes, weights) = gl_nodes(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Adaptive Gauss-Legendre: bisects until the GL16 estimate of an interval
/// agrees with the sum of its halves within the interval's share of `tol`.
pub(crate) fn adaptive_gl(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = gl_integrate(f, a, m, 16);
        let right = gl_integrate(f, m, b, 16);
        if depth >= 24 || (left + right - whole).abs() <= tol {
            return left + right;
        }
        recurse(f, a, m, left, 0.5 * tol, depth + 1) + recurse(f, m, b, right, 0.5 * tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    let whole = gl_integrate(f, a, b, 16);
    recurse(f, a, b, whole, tol.max(1e-300), 0)
}

/// Vector-valued adaptive Gauss-Legendre with a norm-based tolerance.
pub(crate) fn adaptive_gl_vec3(f: &mut impl FnMut(f64) -> Vec3, a: f64, b: f64, tol: f64) -> Vec3 {
    fn gl_vec(f: &mut impl FnMut(f64) -> Vec3, a: f64, b: f64) -> Vec3 {
        let (nodes, weights) = gl_nodes(16);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = Vec3::zeros();
        for (x, w) in nodes.iter().zip(weights) {
            sum += *w * f(mid + half * x);
        }
        sum * half
    }
    fn recurse(f: &mut impl FnMut(f64) -> Vec3, a: f64, b: f64, whole: Vec3, tol: f64, depth: u32) -> Vec3 {
        let m = 0.5 * (a + b);
        let left = gl_vec(f, a, m);
        let right = gl_vec(f, m, b);
        if depth >= 24 || (left + right - whole).norm() <= tol {
            return left + right;
        }
        recurse(f, a, m, left, 0.5 * tol, depth + 1) + recurse(f, m, b, right, 0.5 * tol, depth + 1)
    }
    if a == b {
        return Vec3::zeros();
    }
    let whole = gl_vec(f, a, b);
    recurse(f, a, b, whole, tol.max(1e-300), 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        // GL of order n is exact for degree 2n-1.
        let mut f = |x: f64| x.powi(15) + 3.0 * x.powi(4) - x;
        let got = gl_integrate(&mut f, -1.0, 1.0, 8);
        let expect = 2.0 * 3.0 / 5.0; // odd terms cancel
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kinks() {
        // |x| around zero.
        let mut f = |x: f64| x.abs();
        let got = adaptive_gl(&mut f, -1.0, 2.0, 1e-12);
        assert!((got - 2.5).abs() < 1e-9, "{got}");
    }

    #[test]
    fn weights_sum_to_interval() {
        for n in [8, 12, 16, 32, 64] {
            let (_, w) = gl_nodes(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "order {n}: {s}");
        }
    }
}
