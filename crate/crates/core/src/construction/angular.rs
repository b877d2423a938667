//! Symmetric cubature on the unit sphere S^{N−1}, exact for polynomials of
//! degree ≤ 5.
//!
//! Points: the 2N axis points ±e_i with weight (4−N)/(2N(N+2)) and the
//! 2N(N−1) edge points (±e_i ± e_j)/√2, i < j, with weight 1/(N(N+2)),
//! in the normalized measure. Antipodal symmetry integrates every odd
//! polynomial to exactly zero.

/// Cubature points and weights (normalized: weights sum to 1).
pub fn sphere_cubature_points(n_dim: usize) -> Vec<(Vec<f64>, f64)> {
    let n = n_dim;
    let nf = n as f64;
    let w_axis = (4.0 - nf) / (2.0 * nf * (nf + 2.0));
    let w_edge = 1.0 / (nf * (nf + 2.0));
    let mut pts = Vec::with_capacity(2 * n + 2 * n * (n - 1));
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut p = vec![0.0; n];
            p[i] = s;
            pts.push((p, w_axis));
        }
    }
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            for si in [1.0, -1.0] {
                for sj in [1.0, -1.0] {
                    let mut p = vec![0.0; n];
                    p[i] = si * inv;
                    p[j] = sj * inv;
                    pts.push((p, w_edge));
                }
            }
        }
    }
    pts
}

/// ∫_{S^{N−1}} f dω (unnormalized: includes the sphere area factor).
pub fn sphere_integral<F: Fn(&[f64]) -> f64>(n_dim: usize, f: F) -> f64 {
    let area = crate::quad::sphere_area(n_dim);
    sphere_cubature_points(n_dim)
        .iter()
        .map(|(p, w)| w * f(p))
        .sum::<f64>()
        * area
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::sphere_area;

    #[test]
    fn exactness_through_degree_five() {
        for n in [5usize, 7, 9] {
            let nf = n as f64;
            let area = sphere_area(n);
            // Constant.
            let v = sphere_integral(n, |_| 1.0);
            assert!((v - area).abs() < 1e-12 * area);
            // ξ₀²: mean 1/N.
            let v = sphere_integral(n, |p| p[0] * p[0]);
            assert!((v - area / nf).abs() < 1e-12 * area);
            // ξ₀⁴: mean 3/(N(N+2)).
            let v = sphere_integral(n, |p| p[0].powi(4));
            let want = 3.0 * area / (nf * (nf + 2.0));
            assert!((v - want).abs() < 1e-12 * area, "n={n}: {v} vs {want}");
            // ξ₀²ξ₁²: mean 1/(N(N+2)).
            let v = sphere_integral(n, |p| p[0] * p[0] * p[1] * p[1]);
            let want = area / (nf * (nf + 2.0));
            assert!((v - want).abs() < 1e-12 * area);
            // Odd monomials vanish identically.
            for f in [
                |p: &[f64]| p[0],
                |p: &[f64]| p[0] * p[1] * p[2],
                |p: &[f64]| p[0].powi(3) * p[1] * p[1],
            ] {
                let v = sphere_integral(n, f);
                assert!(v.abs() < 1e-14 * area, "odd monomial gave {v}");
            }
        }
    }

    #[test]
    fn weights_sum_to_one() {
        for n in [5usize, 7, 10] {
            let s: f64 = sphere_cubature_points(n).iter().map(|(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }
}
