//! Mode-decomposed radial differential operators.
//!
//! The transverse operator −Δ + V on ℝ^N restricted to the spherical-harmonic
//! mode ℓ acts on radial profiles as
//!
//!   L_ℓ φ = −φ″ − (N−1)/r φ′ + ℓ(ℓ+N−2)/r² φ + V φ.
//!
//! Substituting φ = r^ℓ ψ removes the centrifugal singularity exactly:
//! L_ℓ(r^ℓ ψ) = r^ℓ [−ψ″ − (Ñ−1)/r ψ′ + V ψ] with Ñ = N + 2ℓ, so every mode
//! is discretized as the regular mode-0 problem in the effective dimension.
//! The discretization is conservative (finite volume) with interfaces at node
//! midpoints and exact cell masses ∫ r^{Ñ−1} dr; conjugating by the square
//! root of the cell masses gives a symmetric tridiagonal form exactly.
//! Dirichlet truncation at R_out; at r = 0 the inner flux vanishes.

use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid};
use crate::linalg::{SymTridiag, TridiagLu};
use crate::quad::sphere_area;
use std::sync::Arc;

/// Spherical-harmonic mode index ℓ ∈ {0, 1, 2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Zero,
    One,
    Two,
}

impl Mode {
    pub fn index(self) -> usize {
        match self {
            Mode::Zero => 0,
            Mode::One => 1,
            Mode::Two => 2,
        }
    }

    pub fn from_index(l: usize) -> Result<Self> {
        match l {
            0 => Ok(Mode::Zero),
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            other => Err(Error::ModeOutOfRange(other)),
        }
    }
}

/// Discretized mode-ℓ radial operator.
///
/// Internal unknowns are ψ = φ/r^ℓ at nodes 0..M-1 (node M is the Dirichlet
/// boundary). Public entry points speak the φ representation: node values at
/// `first_node()..M`, where `first_node()` is 0 for ℓ = 0 and 1 for ℓ ≥ 1
/// (φ vanishes at the origin for ℓ ≥ 1).
pub struct RadialOperator {
    grid: Arc<RadialGrid>,
    n_dim: usize,
    mode: Mode,
    /// Flux coefficients m_i^{Ñ-1}/h_{i+1} at interfaces i = 0..M-1.
    flux: Vec<f64>,
    /// Cell masses (m_i^Ñ − m_{i-1}^Ñ)/Ñ at nodes 0..M-1 (effective dim).
    mass: Vec<f64>,
    /// Potential at nodes 0..M-1.
    q: Vec<f64>,
    sym: SymTridiag,
}

impl RadialOperator {
    pub fn assemble(
        mode: Mode,
        n_dim: usize,
        potential: &RadialField,
        grid: &Arc<RadialGrid>,
    ) -> Result<Self> {
        if n_dim < 3 {
            return Err(Error::InvalidConfig(format!(
                "radial operator needs dimension >= 3, got {n_dim}"
            )));
        }
        if potential.grid().nodes() != grid.nodes() {
            return Err(Error::InvalidField(
                "potential sampled on a different grid".into(),
            ));
        }
        let m = grid.intervals();
        let eff = n_dim + 2 * mode.index();
        let efff = eff as f64;
        let r = grid.nodes();

        let flux: Vec<f64> = (0..m)
            .map(|i| grid.interface(i).powi(eff as i32 - 1) / (r[i + 1] - r[i]))
            .collect();
        let mass: Vec<f64> = (0..m)
            .map(|i| {
                let outer = grid.interface(i).powi(eff as i32);
                let inner = if i == 0 {
                    0.0
                } else {
                    grid.interface(i - 1).powi(eff as i32)
                };
                (outer - inner) / efff
            })
            .collect();
        let q: Vec<f64> = potential.values()[..m].to_vec();

        let mut diag = Vec::with_capacity(m);
        let mut off = Vec::with_capacity(m - 1);
        for i in 0..m {
            let left = if i == 0 { 0.0 } else { flux[i - 1] };
            diag.push((left + flux[i]) / mass[i] + q[i]);
            if i + 1 < m {
                off.push(-flux[i] / (mass[i] * mass[i + 1]).sqrt());
            }
        }

        Ok(Self {
            grid: grid.clone(),
            n_dim,
            mode,
            flux,
            mass,
            q,
            sym: SymTridiag::new(diag, off),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// First node carried in the φ representation (0 for ℓ = 0, else 1).
    pub fn first_node(&self) -> usize {
        if self.mode == Mode::Zero {
            0
        } else {
            1
        }
    }

    /// The weight-conjugated symmetric tridiagonal form (ψ unknowns).
    pub fn symmetric_form(&self) -> &SymTridiag {
        &self.sym
    }

    fn ell(&self) -> i32 {
        self.mode.index() as i32
    }

    /// ψ samples at nodes 0..M-1 from φ samples at all nodes, with an even
    /// quadratic extrapolation of ψ to r = 0 for ℓ ≥ 1.
    fn to_psi(&self, phi_full: &[f64]) -> Vec<f64> {
        let m = self.grid.intervals();
        let r = self.grid.nodes();
        let l = self.ell();
        if l == 0 {
            return phi_full[..m].to_vec();
        }
        let mut psi = vec![0.0; m];
        for i in 1..m {
            psi[i] = phi_full[i] / r[i].powi(l);
        }
        // ψ is even and smooth in r; extrapolate in the r² variable.
        let (r1, r2) = (r[1] * r[1], r[2] * r[2]);
        psi[0] = psi[1] - r1 * (psi[2] - psi[1]) / (r2 - r1);
        psi
    }

    fn psi_row(&self, psi: &[f64], psi_boundary: f64, i: usize) -> f64 {
        let m = self.grid.intervals();
        let mut acc = 0.0;
        if i > 0 {
            acc += self.flux[i - 1] * (psi[i] - psi[i - 1]);
        }
        let right = if i + 1 < m { psi[i + 1] } else { psi_boundary };
        acc += self.flux[i] * (psi[i] - right);
        acc / self.mass[i] + self.q[i] * psi[i]
    }

    /// Apply the operator in natural form to full φ node samples
    /// `values[0..=M]`, including the boundary sample at R_out. Returns the
    /// result at nodes `first_node()..M`; rows use the actual neighbor
    /// samples, so residual checks of smooth functions are free of the
    /// Dirichlet truncation error.
    pub fn apply_natural(&self, values: &[f64]) -> Vec<f64> {
        let m = self.grid.intervals();
        assert_eq!(values.len(), m + 1, "need samples at all nodes 0..=M");
        let r = self.grid.nodes();
        let l = self.ell();
        let psi = self.to_psi(values);
        let psi_boundary = if l == 0 {
            values[m]
        } else {
            values[m] / r[m].powi(l)
        };
        (self.first_node()..m)
            .map(|i| r[i].powi(l) * self.psi_row(&psi, psi_boundary, i))
            .collect()
    }

    /// Weighted inner product ∫_{ℝ^N} f g dξ of two mode-ℓ profiles given at
    /// nodes `first_node()..M`, in the grid's cell-mass measure.
    pub fn weighted_dot(&self, f: &[f64], g: &[f64]) -> f64 {
        // ∫ f g r^{N-1} dr = ∫ (f/r^ℓ)(g/r^ℓ) r^{Ñ-1} dr: the effective-dim
        // cell masses integrate the ψ products exactly in the same measure.
        let s = sphere_area(self.n_dim);
        let first = self.first_node();
        let r = self.grid.nodes();
        let l = self.ell();
        let mut acc = 0.0;
        for k in 0..f.len() {
            let i = first + k;
            let scale = if l == 0 { 1.0 } else { r[i].powi(2 * l) };
            acc += self.mass[i] * f[k] * g[k] / scale.max(f64::MIN_POSITIVE);
        }
        s * acc
    }

    /// The `count` smallest eigenpairs. Eigenvectors are returned in the φ
    /// representation at nodes `first_node()..M`, unit-normalized in the
    /// grid's weighted inner product ∫_{ℝ^N} φ² dξ, ascending eigenvalues.
    pub fn eig_smallest(&self, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
        let pairs = self.sym.eig_smallest(count)?;
        let s = sphere_area(self.n_dim);
        let r = self.grid.nodes();
        let l = self.ell();
        let first = self.first_node();
        Ok(pairs
            .into_iter()
            .map(|(lambda, chi)| {
                // ψ = W^{-1/2} χ, φ = r^ℓ ψ; ∫ φ² r^{N-1} dr = Σ m_i ψ_i².
                let psi: Vec<f64> = chi
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| c / self.mass[i].sqrt())
                    .collect();
                let nrm = (s * psi
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| self.mass[i] * x * x)
                    .sum::<f64>())
                .sqrt();
                let phi: Vec<f64> = (first..self.grid.intervals())
                    .map(|i| r[i].powi(l) * psi[i] / nrm)
                    .collect();
                (lambda, phi)
            })
            .collect())
    }

    /// Convert a symmetric-form vector χ (ψ = W^{-1/2} χ) into φ node values
    /// at `first_node()..M`, unit-normalized in the weighted inner product.
    pub fn from_symmetric_coords(&self, chi: &[f64]) -> Vec<f64> {
        let s = sphere_area(self.n_dim);
        let r = self.grid.nodes();
        let l = self.ell();
        let psi: Vec<f64> = chi
            .iter()
            .enumerate()
            .map(|(i, &c)| c / self.mass[i].sqrt())
            .collect();
        let nrm = (s * psi
            .iter()
            .enumerate()
            .map(|(i, &x)| self.mass[i] * x * x)
            .sum::<f64>())
        .sqrt();
        (self.first_node()..self.grid.intervals())
            .map(|i| r[i].powi(l) * psi[i] / nrm)
            .collect()
    }

    fn factor(&self) -> TridiagLu {
        let m = self.grid.intervals();
        let mut lower = Vec::with_capacity(m - 1);
        let mut diag = Vec::with_capacity(m);
        let mut upper = Vec::with_capacity(m - 1);
        for i in 0..m {
            let left = if i == 0 { 0.0 } else { self.flux[i - 1] };
            diag.push((left + self.flux[i]) / self.mass[i] + self.q[i]);
            if i + 1 < m {
                upper.push(-self.flux[i] / self.mass[i]);
                lower.push(-self.flux[i] / self.mass[i + 1]);
            }
        }
        TridiagLu::factor(&lower, &diag, &upper)
    }

    /// RHS in φ representation (nodes first..M) to ψ-space RHS (nodes 0..M-1).
    fn rhs_to_psi(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.grid.intervals();
        let l = self.ell();
        if l == 0 {
            return rhs.to_vec();
        }
        let r = self.grid.nodes();
        let mut out = vec![0.0; m];
        for k in 0..rhs.len() {
            let i = 1 + k;
            out[i] = rhs[k] / r[i].powi(l);
        }
        let (r1, r2) = (r[1] * r[1], r[2] * r[2]);
        out[0] = out[1] - r1 * (out[2] - out[1]) / (r2 - r1);
        out
    }

    fn psi_to_phi(&self, psi: &[f64]) -> Vec<f64> {
        let m = self.grid.intervals();
        let l = self.ell();
        let r = self.grid.nodes();
        (self.first_node()..m)
            .map(|i| r[i].powi(l) * psi[i])
            .collect()
    }

    /// Plain solve L_ℓ φ = rhs with Dirichlet truncation. `rhs` and the
    /// returned φ are node values at `first_node()..M`.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let b = self.rhs_to_psi(rhs);
        self.psi_to_phi(&self.factor().solve(&b))
    }

    /// Solve L_ℓ φ + λ·kernel_dir = rhs with the constraint ⟨c, φ⟩_w = 0,
    /// by block elimination on the pivoted tridiagonal factorization.
    /// Returns (φ, λ). All vectors are φ node values at `first_node()..M`.
    pub fn solve_constrained(
        &self,
        rhs: &[f64],
        kernel_dir: &[f64],
        constraint: &[f64],
    ) -> Result<(Vec<f64>, f64)> {
        let lu = self.factor();
        let x_h = lu.solve(&self.rhs_to_psi(rhs));
        let x_z = lu.solve(&self.rhs_to_psi(kernel_dir));
        let x_h_phi = self.psi_to_phi(&x_h);
        let x_z_phi = self.psi_to_phi(&x_z);
        let num = self.weighted_dot(constraint, &x_h_phi);
        let den = self.weighted_dot(constraint, &x_z_phi);
        if !den.is_finite() || den.abs() < 1e-300 {
            return Err(Error::SolverFailure(
                "constrained radial solve is singular (constraint direction lost)".into(),
            ));
        }
        let lambda = num / den;
        let phi: Vec<f64> = x_h_phi
            .iter()
            .zip(x_z_phi.iter())
            .map(|(a, b)| a - lambda * b)
            .collect();
        Ok((phi, lambda))
    }

    /// Embed values at `first_node()..M` into full node samples 0..=M with
    /// zeros at the Dirichlet nodes.
    pub fn embed(&self, inner: &[f64]) -> Vec<f64> {
        let m = self.grid.intervals();
        let mut full = vec![0.0; m + 1];
        full[self.first_node()..m].copy_from_slice(inner);
        full
    }

    /// Restrict full node samples to `first_node()..M`.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        full[self.first_node()..self.grid.intervals()].to_vec()
    }
}
