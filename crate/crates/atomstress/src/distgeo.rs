//! Cayley-Menger determinants, R^3 embeddability verification, and the
//! tenth-distance quadratic for five-point clusters.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::Vec3;

/// Symmetric table of squared distances between `n` points.
#[derive(Debug, Clone)]
pub struct SquaredDistanceSet {
    n: usize,
    s: Vec<f64>,
}

impl SquaredDistanceSet {
    /// Builds from a full n x n table of squared distances (row-major).
    pub fn from_squared(n: usize, table: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("need at least two points"));
        }
        if table.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {}x{} table, got {} entries",
                n,
                n,
                table.len()
            )));
        }
        for i in 0..n {
            if table[i * n + i] != 0.0 {
                return Err(Error::invalid(format!("diagonal entry ({i},{i}) must be zero")));
            }
            for j in 0..n {
                let v = table[i * n + j];
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::invalid(format!(
                        "squared distance ({i},{j}) must be finite and non-negative, got {v}"
                    )));
                }
                if (v - table[j * n + i]).abs() > 1e-12 * v.abs().max(1.0) {
                    return Err(Error::invalid(format!("table not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(SquaredDistanceSet { n, s: table })
    }

    pub fn from_points(points: &[Vec3]) -> Result<Self> {
        let n = points.len();
        let mut s = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d2 = (points[i] - points[j]).norm_squared();
                s[i * n + j] = d2;
                s[j * n + i] = d2;
            }
        }
        SquaredDistanceSet::from_squared(n, s)
    }

    /// Builds from plain distances in lexicographic pair order
    /// (d12, d13, ..., d1n, d23, ...).
    pub fn from_distances(n: usize, d: &[f64]) -> Result<Self> {
        if d.len() != n * (n - 1) / 2 {
            return Err(Error::invalid(format!(
                "expected {} pair distances for {} points, got {}",
                n * (n - 1) / 2,
                n,
                d.len()
            )));
        }
        let mut s = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = d[k] * d[k];
                s[i * n + j] = v;
                s[j * n + i] = v;
                k += 1;
            }
        }
        SquaredDistanceSet::from_squared(n, s)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn squared(&self, i: usize, j: usize) -> f64 {
        self.s[i * self.n + j]
    }

    /// Sub-table over a subset of point indices.
    pub fn subset(&self, idx: &[usize]) -> SquaredDistanceSet {
        let m = idx.len();
        let mut s = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                s[a * m + b] = self.squared(idx[a], idx[b]);
            }
        }
        SquaredDistanceSet { n: m, s }
    }

    pub fn max_squared(&self) -> f64 {
        self.s.iter().cloned().fold(0.0, f64::max)
    }
}

/// The bordered Cayley-Menger determinant of an n-point squared-distance set,
/// evaluated by LU factorization with partial pivoting.
pub fn cayley_menger(dists: &SquaredDistanceSet) -> Result<f64> {
    let n = dists.len();
    if !(2..=6).contains(&n) {
        return Err(Error::invalid(format!(
            "Cayley-Menger determinant supported for 2..=6 points, got {n}"
        )));
    }
    Ok(bordered_determinant(dists))
}

fn bordered_determinant(dists: &SquaredDistanceSet) -> f64 {
    let n = dists.len();
    let m = n + 1;
    let mut a = DMatrix::<f64>::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = dists.squared(i, j);
        }
        a[(i, n)] = 1.0;
        a[(n, i)] = 1.0;
    }
    a.lu().determinant()
}

/// Absolute scale against which "chi = 0" is judged for an n-point subset:
/// chi carries units of (squared distance)^(n-1).
fn chi_zero_scale(dists: &SquaredDistanceSet) -> f64 {
    let s_max = dists.max_squared().max(f64::MIN_POSITIVE);
    s_max.powi(dists.len() as i32 - 1)
}

/// Which of the four sign/degeneracy conditions failed first, with the
/// offending point indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: u8,
    pub indices: Vec<usize>,
}

/// Result of the four-condition embeddability test.
#[derive(Debug, Clone)]
pub struct EmbeddabilityVerdict {
    pub embeddable: bool,
    pub first_violated: Option<Violation>,
}

fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return false;
        }
        // Advance to the next k-combination of 0..n in lexicographic order.
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in (i + 1)..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return true;
            }
        }
    }
}

/// Checks the four Cayley-Menger sign conditions over all subsets of sizes
/// 3 to 6: triples non-positive, quadruples non-negative, quintuples and
/// sextuples zero (within `tolerance` times the dimensional chi scale).
pub fn embeddability_check(dists: &SquaredDistanceSet, tolerance: f64) -> Result<EmbeddabilityVerdict> {
    let n = dists.len();
    if n < 3 {
        return Err(Error::invalid("embeddability check needs at least 3 points"));
    }
    if n > 12 {
        return Err(Error::invalid(format!(
            "embeddability check capped at 12 points to bound subset enumeration, got {n}"
        )));
    }
    let mut first: Option<Violation> = None;
    let conditions: [(usize, u8); 4] = [(3, 1), (4, 2), (5, 3), (6, 4)];
    for (k, cond) in conditions {
        if n < k {
            break;
        }
        let ok = for_each_subset(n, k, |idx| {
            let sub = dists.subset(idx);
            let chi = bordered_determinant(&sub);
            let scale = tolerance * chi_zero_scale(&sub);
            let violated = match cond {
                1 => chi > scale,
                2 => chi < -scale,
                _ => chi.abs() > scale,
            };
            if violated {
                first = Some(Violation {
                    condition: cond,
                    indices: idx.to_vec(),
                });
                return false;
            }
            true
        });
        if !ok {
            break;
        }
    }
    Ok(EmbeddabilityVerdict {
        embeddable: first.is_none(),
        first_violated: first,
    })
}

/// Real candidates for the tenth squared distance of a five-point cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TenthDistance {
    /// The quadratic has no real root: no R^3 embedding extends the nine
    /// given distances.
    NoEmbedding,
    Double(f64),
    Two(f64, f64),
}

impl TenthDistance {
    pub fn roots(&self) -> Vec<f64> {
        match *self {
            TenthDistance::NoEmbedding => vec![],
            TenthDistance::Double(r) => vec![r],
            TenthDistance::Two(a, b) => vec![a, b],
        }
    }
}

/// Given the nine squared distances {s12..s35} of a 5-point set (all pairs
/// except s45, lexicographic order), returns the real roots of the quadratic
/// that the five-point Cayley-Menger identity imposes on s45.
///
/// The coefficients are recovered by evaluating chi at three trial values of
/// s45 and fitting the exact quadratic, which is robust to transcription of
/// the expanded identity.
pub fn tenth_distance_candidates(nine: &[f64; 9]) -> Result<TenthDistance> {
    if !nine.iter().all(|v| *v >= 0.0 && v.is_finite()) {
        return Err(Error::invalid("squared distances must be finite and non-negative"));
    }
    let chi_at = |s45: f64| -> f64 {
        // Full 5-point table: order s12 s13 s14 s15 s23 s24 s25 s34 s35 [s45].
        let mut d = [0.0; 10];
        d[..9].copy_from_slice(nine);
        d[9] = s45;
        let mut s = vec![0.0; 25];
        let mut k = 0;
        for i in 0..5 {
            for j in (i + 1)..5 {
                s[i * 5 + j] = d[k];
                s[j * 5 + i] = d[k];
                k += 1;
            }
        }
        bordered_determinant(&SquaredDistanceSet { n: 5, s })
    };

    let t = nine.iter().cloned().fold(0.0, f64::max).max(1.0);
    let chi0 = chi_at(0.0);
    let chi1 = chi_at(t);
    let chi2 = chi_at(2.0 * t);
    // chi(x) = A x^2 + B x + C exactly; three-point fit.
    let c = chi0;
    let a = (chi2 - 2.0 * chi1 + chi0) / (2.0 * t * t);
    let b = (4.0 * chi1 - 3.0 * chi0 - chi2) / (2.0 * t);

    let scale = a.abs() * t * t + b.abs() * t + c.abs();
    if a.abs() * t * t <= 1e-12 * scale {
        // Degenerate to a linear equation.
        if b.abs() * t <= 1e-12 * scale {
            return Ok(TenthDistance::NoEmbedding);
        }
        return Ok(TenthDistance::Double(-c / b));
    }
    let disc = b * b - 4.0 * a * c;
    let disc_scale = (b * b).max((4.0 * a * c).abs()).max(f64::MIN_POSITIVE);
    if disc < -1e-10 * disc_scale {
        return Ok(TenthDistance::NoEmbedding);
    }
    if disc <= 1e-10 * disc_scale {
        return Ok(TenthDistance::Double(-b / (2.0 * a)));
    }
    let sq = disc.sqrt();
    // Numerically stable pairing of the two roots.
    let q = -0.5 * (b + b.signum() * sq);
    let r1 = q / a;
    let r2 = c / q;
    Ok(TenthDistance::Two(r1.min(r2), r1.max(r2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> impl FnMut() -> f64 {
        let mut s = seed;
        move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64)
        }
    }

    #[test]
    fn segment_value() {
        let l = 3.7;
        let set = SquaredDistanceSet::from_distances(2, &[l]).unwrap();
        let chi = cayley_menger(&set).unwrap();
        assert!((chi - 2.0 * l * l).abs() < 1e-12);
    }

    #[test]
    fn right_triangle_345() {
        // chi = -16 A^2 with area 6 for the 3-4-5 right triangle: -576, exact
        // for these rational inputs.
        let set = SquaredDistanceSet::from_distances(3, &[3.0, 4.0, 5.0]).unwrap();
        let chi = cayley_menger(&set).unwrap();
        assert_eq!(chi, -576.0);
    }

    #[test]
    fn five_random_points_have_zero_chi() {
        let mut r = rng(17);
        for _ in 0..50 {
            let pts: Vec<Vec3> = (0..5).map(|_| Vec3::new(r(), r(), r())).collect();
            let set = SquaredDistanceSet::from_points(&pts).unwrap();
            let chi = cayley_menger(&set).unwrap();
            let scale = set.max_squared().powi(4);
            assert!(chi.abs() < 1e-8 * scale, "chi = {chi}, scale = {scale}");
        }
    }

    #[test]
    fn embedded_point_sets_pass_all_conditions() {
        let mut r = rng(99);
        for trial in 0..200 {
            let n = 5 + trial % 2;
            let pts: Vec<Vec3> = (0..n).map(|_| Vec3::new(r() * 2.0, r() * 2.0, r() * 2.0)).collect();
            let set = SquaredDistanceSet::from_points(&pts).unwrap();
            let verdict = embeddability_check(&set, 1e-8).unwrap();
            assert!(verdict.embeddable, "trial {trial}: {:?}", verdict.first_violated);
            // Sign pattern: triples <= 0, quadruples >= 0.
            let tri = set.subset(&[0, 1, 2]);
            let chi3 = cayley_menger(&tri).unwrap();
            assert!(chi3 <= 1e-8 * chi_zero_scale(&tri));
            let quad = set.subset(&[0, 1, 2, 3]);
            let chi4 = cayley_menger(&quad).unwrap();
            assert!(chi4 >= -1e-8 * chi_zero_scale(&quad));
        }
    }

    #[test]
    fn triangle_inequality_violation_is_condition_one() {
        let set = SquaredDistanceSet::from_distances(3, &[1.0, 1.0, 10.0]).unwrap();
        let verdict = embeddability_check(&set, 1e-8).unwrap();
        assert!(!verdict.embeddable);
        let v = verdict.first_violated.unwrap();
        assert_eq!(v.condition, 1);
        assert_eq!(v.indices, vec![0, 1, 2]);
    }

    #[test]
    fn regular_four_simplex_needs_r4() {
        // Five mutually equidistant points: condition 3 (quintuples) fails.
        let d = vec![1.0; 10];
        let set = SquaredDistanceSet::from_distances(5, &d).unwrap();
        let verdict = embeddability_check(&set, 1e-8).unwrap();
        assert!(!verdict.embeddable);
        assert_eq!(verdict.first_violated.unwrap().condition, 3);
    }

    fn nine_of(points: &[Vec3; 5]) -> [f64; 9] {
        let mut nine = [0.0; 9];
        let mut k = 0;
        for i in 0..5 {
            for j in (i + 1)..5 {
                if i == 3 && j == 4 {
                    continue;
                }
                nine[k] = (points[i] - points[j]).norm_squared();
                k += 1;
            }
        }
        nine
    }

    #[test]
    fn mirror_configurations_give_both_roots() {
        let mut r = rng(3);
        for trial in 0..200 {
            // Points 1-3 span the z=0 plane, point 4 above it, point 5 off-plane;
            // mirroring point 5 through the plane changes only r45.
            let p1 = Vec3::new(r(), r(), 0.0);
            let p2 = Vec3::new(r() + 1.0, r(), 0.0);
            let p3 = Vec3::new(r(), r() + 1.0, 0.0);
            let p4 = Vec3::new(r(), r(), 0.5 + r());
            let z5 = 0.3 + r();
            let p5_up = Vec3::new(r() + 0.5, r() + 0.5, z5);
            let p5_down = Vec3::new(p5_up.x, p5_up.y, -z5);

            let nine = nine_of(&[p1, p2, p3, p4, p5_up]);
            let s45_up = (p4 - p5_up).norm_squared();
            let s45_down = (p4 - p5_down).norm_squared();
            let roots = tenth_distance_candidates(&nine).unwrap().roots();
            assert_eq!(roots.len(), 2, "trial {trial}");
            let (lo, hi) = (s45_up.min(s45_down), s45_up.max(s45_down));
            assert!((roots[0] - lo).abs() < 1e-8 * hi.max(1.0), "trial {trial}: {roots:?} vs {lo}");
            assert!((roots[1] - hi).abs() < 1e-8 * hi.max(1.0), "trial {trial}: {roots:?} vs {hi}");

            // Substituting a root back zeroes chi.
            let mut d = [0.0; 10];
            d[..9].copy_from_slice(&nine);
            d[9] = roots[0];
            let mut s = vec![0.0; 25];
            let mut k = 0;
            for i in 0..5 {
                for j in (i + 1)..5 {
                    s[i * 5 + j] = d[k];
                    s[j * 5 + i] = d[k];
                    k += 1;
                }
            }
            let set = SquaredDistanceSet::from_squared(5, s).unwrap();
            let chi = cayley_menger(&set).unwrap();
            assert!(chi.abs() < 1e-6 * set.max_squared().powi(4));
        }
    }

    #[test]
    fn coplanar_fifth_point_gives_double_root() {
        let p1 = Vec3::new(0.0, 0.0, 0.0);
        let p2 = Vec3::new(1.0, 0.0, 0.0);
        let p3 = Vec3::new(0.0, 1.0, 0.0);
        let p4 = Vec3::new(0.3, 0.3, 1.2);
        let p5 = Vec3::new(0.8, 0.6, 0.0); // in the 1-2-3 plane
        let nine = nine_of(&[p1, p2, p3, p4, p5]);
        let roots = tenth_distance_candidates(&nine).unwrap().roots();
        assert_eq!(roots.len(), 1, "mirror images coincide: {roots:?}");
        assert!((roots[0] - (p4 - p5).norm_squared()).abs() < 1e-7);
    }

    #[test]
    fn size_limits_are_enforced() {
        let set = SquaredDistanceSet::from_distances(7, &vec![1.0; 21]).unwrap();
        assert!(cayley_menger(&set).is_err());
        let set2 = SquaredDistanceSet::from_distances(2, &[1.0]).unwrap();
        assert!(embeddability_check(&set2, 1e-8).is_err());
    }
}
