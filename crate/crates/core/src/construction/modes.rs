//! Fields on K × transverse space stored as per-mode radial profiles.
//!
//! The first-order interior terms only excite the spherical-harmonic modes
//! ℓ = 0 (scalars), ℓ = 1 (the N translation components) and ℓ = 2. All
//! mode-2 content of the construction lies along a single symmetric traceless
//! direction matrix per K-node, so the ℓ = 2 block stores one direction and
//! one shared radial profile:
//!
//!   w(z, ξ)|_{ℓ=2} = ρ_z(r) · Σ_{m,l} D_z[m][l] (ξ_m ξ_l / r² − δ_{ml}/N).

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use nalgebra::DMatrix;
use std::sync::Arc;

/// Mode-2 block: one traceless symmetric direction and one profile per node.
#[derive(Debug, Clone)]
pub struct M2Part {
    /// Flattened N×N symmetric traceless matrix per K-node.
    pub dir: Vec<Vec<f64>>,
    /// Shared radial profile per K-node (all grid nodes 0..=M).
    pub profile: Vec<Vec<f64>>,
}

/// Per-mode radial profiles at every K-node. Profiles are sampled on all
/// radial nodes 0..=M (Dirichlet zeros included where applicable).
#[derive(Debug, Clone)]
pub struct ModeField {
    pub grid: Arc<RadialGrid>,
    pub n_dim: usize,
    /// Mode-0 profile per K-node.
    pub m0: Vec<Vec<f64>>,
    /// Mode-1 component profiles per K-node: [node][component][radial].
    pub m1: Option<Vec<Vec<Vec<f64>>>>,
    /// Mode-2 block.
    pub m2: Option<M2Part>,
}

impl ModeField {
    pub fn zeros(grid: Arc<RadialGrid>, n_dim: usize, n_nodes: usize) -> Self {
        let len = grid.nodes().len();
        Self {
            grid,
            n_dim,
            m0: vec![vec![0.0; len]; n_nodes],
            m1: None,
            m2: None,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.m0.len()
    }

    pub fn validate(&self) -> Result<()> {
        let len = self.grid.nodes().len();
        for (z, p) in self.m0.iter().enumerate() {
            if p.len() != len {
                return Err(Error::InvalidField(format!(
                    "mode-0 profile at node {z} has wrong length"
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidField(format!(
                    "non-finite mode-0 sample at node {z}"
                )));
            }
        }
        if let Some(m1) = &self.m1 {
            for (z, comps) in m1.iter().enumerate() {
                if comps.len() != self.n_dim {
                    return Err(Error::InvalidField(format!(
                        "mode-1 block at node {z} must carry {} components",
                        self.n_dim
                    )));
                }
                for c in comps {
                    if c.iter().any(|v| !v.is_finite()) {
                        return Err(Error::InvalidField(format!(
                            "non-finite mode-1 sample at node {z}"
                        )));
                    }
                    if c[0] != 0.0 {
                        return Err(Error::InvalidField(format!(
                            "mode-1 profile at node {z} must vanish at r = 0"
                        )));
                    }
                }
            }
        }
        if let Some(m2) = &self.m2 {
            for (z, p) in m2.profile.iter().enumerate() {
                if p.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidField(format!(
                        "non-finite mode-2 sample at node {z}"
                    )));
                }
                if p[0] != 0.0 {
                    return Err(Error::InvalidField(format!(
                        "mode-2 profile at node {z} must vanish at r = 0"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Spectral radius of the mode-2 direction at a node: the sharp bound on
    /// its angular factor over the unit sphere.
    pub fn m2_direction_bound(&self, node: usize) -> f64 {
        match &self.m2 {
            None => 0.0,
            Some(m2) => {
                let n = self.n_dim;
                let d = DMatrix::from_row_slice(n, n, &m2.dir[node]);
                d.symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .fold(0.0f64, |m, &e| m.max(e.abs()))
            }
        }
    }

    /// Pointwise evaluation at a K-node and point ξ = r·ω (|ω| = 1).
    /// Radial profiles are interpolated linearly between grid nodes.
    pub fn eval_at(&self, node: usize, r: f64, omega: &[f64]) -> f64 {
        let interp = |p: &[f64]| interp_linear(self.grid.nodes(), p, r);
        let mut v = interp(&self.m0[node]);
        if let Some(m1) = &self.m1 {
            for (j, c) in m1[node].iter().enumerate() {
                v += interp(c) * omega[j];
            }
        }
        if let Some(m2) = &self.m2 {
            let n = self.n_dim;
            let mut quad = 0.0;
            for m in 0..n {
                for l in 0..n {
                    quad += m2.dir[node][m * n + l] * omega[m] * omega[l];
                }
            }
            v += interp(&m2.profile[node]) * quad;
        }
        v
    }
}

pub(crate) fn interp_linear(nodes: &[f64], values: &[f64], r: f64) -> f64 {
    if r <= nodes[0] {
        return values[0];
    }
    let m = nodes.len() - 1;
    if r >= nodes[m] {
        return values[m];
    }
    let i = nodes.partition_point(|&x| x < r);
    let (r0, r1) = (nodes[i - 1], nodes[i]);
    let t = (r - r0) / (r1 - r0);
    values[i - 1] * (1.0 - t) + values[i] * t
}

/// Symmetric traceless part of a square matrix (flattened row-major).
pub fn sym_traceless(n: usize, a: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
    for m in 0..n {
        for l in 0..n {
            out[m * n + l] = 0.5 * (a[m * n + l] + a[l * n + m]);
        }
    }
    for i in 0..n {
        out[i * n + i] -= trace / n as f64;
    }
    out
}
