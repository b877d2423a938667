//! Symmetric tridiagonal eigensolves and banded linear solves.
//!
//! Eigenvalues come from Sturm-sequence bisection (the LDLT pivot count),
//! eigenvectors from shifted inverse iteration with a partially pivoted
//! tridiagonal LU.

use crate::error::{Error, Result};

const PIVOT_GUARD: f64 = 1e-300;

/// Symmetric tridiagonal matrix stored as main diagonal and off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "band lengths inconsistent");
        Self { diag, off }
    }

    /// Build from general bands, rejecting non-symmetric input.
    pub fn from_bands(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        assert_eq!(lower.len(), upper.len());
        assert_eq!(lower.len() + 1, diag.len());
        let mut max_asym = 0.0;
        let mut row = 0;
        for i in 0..lower.len() {
            let a = (lower[i] - upper[i]).abs();
            if a > max_asym {
                max_asym = a;
                row = i + 1;
            }
        }
        if max_asym > 0.0 {
            return Err(Error::NonSymmetric {
                row,
                max_asymmetry: max_asym,
            });
        }
        Ok(Self::new(diag.to_vec(), lower.to_vec()))
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly less than `lambda` (Sturm count).
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let n = self.len();
        let mut count = 0;
        let mut q = self.diag[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let q_safe = if q.abs() < PIVOT_GUARD {
                if q >= 0.0 {
                    PIVOT_GUARD
                } else {
                    -PIVOT_GUARD
                }
            } else {
                q
            };
            q = (self.diag[i] - lambda) - self.off[i - 1] * self.off[i - 1] / q_safe;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for i in 0..n {
            let e_left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let e_right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - e_left - e_right);
            hi = hi.max(self.diag[i] + e_left + e_right);
        }
        let pad = 1e-8 * (hi - lo).abs().max(1.0);
        (lo - pad, hi + pad)
    }

    /// k-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut a, mut b) = self.gershgorin();
        for _ in 0..220 {
            let mid = 0.5 * (a + b);
            if (b - a) < 2.0 * f64::EPSILON * mid.abs().max(1.0) {
                break;
            }
            if self.sturm_count(mid) <= k {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    /// The `count` algebraically smallest eigenpairs, eigenvalues ascending,
    /// eigenvectors unit length in ℓ².
    pub fn eig_smallest(&self, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
        let n = self.len();
        if count > n {
            return Err(Error::SpectralFailure(format!(
                "requested {count} eigenpairs from a matrix of size {n}"
            )));
        }
        let scale = self
            .diag
            .iter()
            .chain(self.off.iter())
            .fold(0.0f64, |m, &x| m.max(x.abs()))
            .max(1.0);
        let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
        for k in 0..count {
            let lambda = self.eigenvalue(k);
            // Collect previously found vectors in the same cluster so repeated
            // eigenvalues get orthogonal representatives.
            let cluster: Vec<&Vec<f64>> = out
                .iter()
                .filter(|(l, _)| (l - lambda).abs() <= 1e-10 * scale)
                .map(|(_, v)| v)
                .collect();
            let v = self.inverse_iteration(lambda, &cluster, scale)?;
            out.push((lambda, v));
        }
        Ok(out)
    }

    fn inverse_iteration(
        &self,
        lambda: f64,
        orthogonalize_against: &[&Vec<f64>],
        scale: f64,
    ) -> Result<Vec<f64>> {
        let n = self.len();
        // Small shift off the eigenvalue keeps the factorization well defined.
        let shift = lambda + 1e-12 * scale;
        let lower: Vec<f64> = self.off.clone();
        let diag: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        let upper: Vec<f64> = self.off.clone();
        let lu = TridiagLu::factor(&lower, &diag, &upper);

        // Deterministic pseudo-random start vector.
        let mut v: Vec<f64> = (0..n)
            .map(|i| {
                let x = (i as f64 * 0.754_877_666 + 0.1).fract();
                2.0 * x - 1.0
            })
            .collect();
        project_out(&mut v, orthogonalize_against);
        normalize(&mut v)?;
        for _ in 0..4 {
            let mut w = lu.solve(&v);
            project_out(&mut w, orthogonalize_against);
            normalize(&mut w)?;
            v = w;
        }
        Ok(v)
    }

    /// Largest eigenvalue magnitude estimate from the Gershgorin interval.
    pub fn spectral_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Eigenvector for a ground state that decays monotonically toward the
    /// last index, computed by the three-term recurrence integrated backward
    /// from the boundary. Backward integration runs in the growing direction,
    /// so exponentially small tail entries keep full relative accuracy, which
    /// inverse iteration cannot deliver. Returns a unit ℓ² vector.
    pub fn ground_state_backward(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let mut v = vec![0.0; n];
        v[n - 1] = 1.0;
        // Row n-1: (d-λ)v[n-1] + e v[n-2] = 0.
        v[n - 2] = -(self.diag[n - 1] - lambda) * v[n - 1] / self.off[n - 2];
        for i in (1..n - 1).rev() {
            // Row i: e[i-1] v[i-1] + (d[i]-λ) v[i] + e[i] v[i+1] = 0.
            v[i - 1] = -((self.diag[i] - lambda) * v[i] + self.off[i] * v[i + 1])
                / self.off[i - 1];
            let a = v[i - 1].abs();
            if !a.is_finite() {
                return Err(Error::SpectralFailure(
                    "backward recurrence overflowed; eigenvalue off or state not decaying".into(),
                ));
            }
            if a > 1e250 {
                let s = 1e-250;
                for x in v[i - 1..].iter_mut() {
                    *x *= s;
                }
            }
        }
        normalize(&mut v)?;
        Ok(v)
    }

    /// Overwrite entries 0..k with the solution of the leading (S − λ) block
    /// given the value at index k. Backward recurrences pick up the singular
    /// companion solution near index 0; the restricted block is far from
    /// singular there, so this boundary-value solve restores full accuracy.
    pub fn repair_leading_entries(&self, lambda: f64, v: &mut [f64], k: usize) {
        if k == 0 || k + 1 >= self.len() {
            return;
        }
        let diag: Vec<f64> = self.diag[..k].iter().map(|d| d - lambda).collect();
        let lower = self.off[..k - 1].to_vec();
        let upper = self.off[..k - 1].to_vec();
        let mut rhs = vec![0.0; k];
        rhs[k - 1] = -self.off[k - 1] * v[k];
        let x = solve_tridiag(&lower, &diag, &upper, &rhs);
        v[..k].copy_from_slice(&x);
    }
}

fn project_out(v: &mut [f64], basis: &[&Vec<f64>]) {
    for b in basis {
        let dot: f64 = v.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
        for (x, y) in v.iter_mut().zip(b.iter()) {
            *x -= dot * y;
        }
    }
}

fn normalize(v: &mut [f64]) -> Result<()> {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::SpectralFailure(
            "inverse iteration collapsed to the zero vector".into(),
        ));
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    Ok(())
}

/// Tridiagonal LU with partial pivoting. Pivoting introduces one extra
/// superdiagonal of fill-in, stored in `u2`.
pub struct TridiagLu {
    n: usize,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Self {
        let n = diag.len();
        assert_eq!(lower.len() + 1, n);
        assert_eq!(upper.len() + 1, n);
        let mut d = diag.to_vec();
        let mut du = vec![0.0; n];
        du[..n - 1].copy_from_slice(upper);
        let mut du2 = vec![0.0; n];
        let mut l = vec![0.0; n - 1];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            let sub = lower[i];
            if d[i].abs() >= sub.abs() {
                let piv = if d[i].abs() < PIVOT_GUARD {
                    PIVOT_GUARD.copysign(d[i])
                } else {
                    d[i]
                };
                let m = sub / piv;
                l[i] = m;
                d[i + 1] -= m * du[i];
                // Row i has no entry in column i+2, so du2[i] stays zero.
            } else {
                swapped[i] = true;
                let m = d[i] / sub;
                l[i] = m;
                // Rows i and i+1 trade places; after elimination the new
                // row i is the old row i+1 and picks up its du2 fill-in.
                d[i] = sub;
                let old_d_next = d[i + 1];
                d[i + 1] = du[i] - m * old_d_next;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -m * du2[i];
                }
                du[i] = old_d_next;
            }
        }
        Self {
            n,
            u0: d,
            u1: du,
            u2: du2,
            l,
            swapped,
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut b = rhs.to_vec();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.l[i] * b[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * x[i + 2];
            }
            let piv = if self.u0[i].abs() < PIVOT_GUARD {
                PIVOT_GUARD.copysign(self.u0[i])
            } else {
                self.u0[i]
            };
            x[i] = s / piv;
        }
        x
    }
}

/// Convenience: solve a single tridiagonal system with partial pivoting.
pub fn solve_tridiag(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    TridiagLu::factor(lower, diag, upper).solve(rhs)
}
