//! Discretized compact model submanifolds with curvature data.
//!
//! Supported models are the circle of length ℓ and the flat rectangular torus,
//! both with uniform periodic grids. Curvature components, the induced metric
//! and the connection one-forms are user-supplied per node; the geometry layer
//! only ever consumes these components.

pub mod geometry;

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::Deserialize;
use std::f64::consts::PI;

/// Model kind: circle(ℓ) or flat torus(ℓ₁, ℓ₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Circle { length: f64 },
    FlatTorus { lengths: [f64; 2] },
}

/// Overall sign convention for the geometric potential Ω. The two displays
/// of Ω in the source material disagree by an overall sign; the positive
/// convention is the one under which the mode-0 projection identity closes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaSign {
    Positive,
    Negative,
}

impl OmegaSign {
    pub fn factor(self) -> f64 {
        match self {
            OmegaSign::Positive => 1.0,
            OmegaSign::Negative => -1.0,
        }
    }
}

/// Per-node curvature data on the normal bundle.
///
/// Index conventions (k intrinsic, N normal dimensions):
///   r_normal[m][i][j][l]  — components R_{mijl}, all indices normal,
///                           antisymmetric in (m, i);
///   r_mixed[m][a][b][j]   — components R_{mabj}, m, j normal, a, b tangent;
///   gtilde[a][b]          — induced metric on K;
///   gamma[a][i][b]        — connection one-forms Γᵇ_{ai} = g(∇_{E_a}E_b, E_i).
#[derive(Debug, Clone, Default)]
pub struct CurvatureData {
    pub r_normal: Option<Vec<f64>>,
    pub r_mixed: Option<Vec<f64>>,
    pub gtilde: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
}

/// Discretized model submanifold K with fields.
#[derive(Debug, Clone)]
pub struct SubmanifoldModel {
    kind: ModelKind,
    /// Nodes per dimension: [n] for the circle, [n1, n2] for the torus.
    shape: Vec<usize>,
    k_dim: usize,
    n_codim: usize,
    h: Vec<f64>,
    curvature: CurvatureData,
}

impl SubmanifoldModel {
    pub fn new(
        kind: ModelKind,
        shape: Vec<usize>,
        n_codim: usize,
        h: Vec<f64>,
        curvature: CurvatureData,
    ) -> Result<Self> {
        let k_dim = match kind {
            ModelKind::Circle { length } => {
                if !(length > 0.0) {
                    return Err(Error::InvalidConfig("circle length must be positive".into()));
                }
                1
            }
            ModelKind::FlatTorus { lengths } => {
                if !(lengths[0] > 0.0 && lengths[1] > 0.0) {
                    return Err(Error::InvalidConfig("torus lengths must be positive".into()));
                }
                2
            }
        };
        if shape.len() != k_dim {
            return Err(Error::InvalidConfig(format!(
                "shape {shape:?} does not match intrinsic dimension {k_dim}"
            )));
        }
        if shape.iter().any(|&n| n < 32) {
            return Err(Error::InvalidConfig(
                "need at least 32 nodes per dimension".into(),
            ));
        }
        if n_codim < 5 {
            return Err(Error::InvalidConfig(format!(
                "codimension {n_codim} must be at least 5"
            )));
        }
        let n_nodes: usize = shape.iter().product();
        if h.len() != n_nodes {
            return Err(Error::InvalidConfig(format!(
                "potential has {} samples for {} nodes",
                h.len(),
                n_nodes
            )));
        }
        let model = Self {
            kind,
            shape,
            k_dim,
            n_codim,
            h,
            curvature,
        };
        model.validate_curvature()?;
        Ok(model)
    }

    fn validate_curvature(&self) -> Result<()> {
        let n = self.n_codim;
        let k = self.k_dim;
        let nodes = self.n_nodes();
        if let Some(rn) = &self.curvature.r_normal {
            let want = nodes * n * n * n * n;
            if rn.len() != want {
                return Err(Error::InvalidConfig(format!(
                    "r_normal has {} entries, want {want}",
                    rn.len()
                )));
            }
            let scale = rn.iter().fold(0.0f64, |s, &x| s.max(x.abs())).max(1e-30);
            for node in 0..nodes {
                for m in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            for l in 0..n {
                                let a = rn[self.rn_idx(node, m, i, j, l)];
                                let b = rn[self.rn_idx(node, i, m, j, l)];
                                if (a + b).abs() > 1e-12 * scale {
                                    return Err(Error::InvalidConfig(format!(
                                        "r_normal violates antisymmetry in its first index pair \
                                         at node {node}, (m,i,j,l)=({m},{i},{j},{l})"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        if let Some(rm) = &self.curvature.r_mixed {
            let want = nodes * n * k * k * n;
            if rm.len() != want {
                return Err(Error::InvalidConfig(format!(
                    "r_mixed has {} entries, want {want}",
                    rm.len()
                )));
            }
        }
        if let Some(gt) = &self.curvature.gtilde {
            let want = nodes * k * k;
            if gt.len() != want {
                return Err(Error::InvalidConfig(format!(
                    "gtilde has {} entries, want {want}",
                    gt.len()
                )));
            }
            for node in 0..nodes {
                let g = self.gtilde_at(node);
                // Symmetric positive definite, k ≤ 2.
                if (g[(0, 1)] - g[(1, 0)]).abs() > 1e-12 * (1.0 + g[(0, 0)].abs()) && k == 2 {
                    return Err(Error::InvalidConfig(format!(
                        "gtilde not symmetric at node {node}"
                    )));
                }
                let det = if k == 1 {
                    g[(0, 0)]
                } else {
                    g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]
                };
                if !(g[(0, 0)] > 0.0 && det > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "gtilde not positive definite at node {node}"
                    )));
                }
            }
        }
        if let Some(ga) = &self.curvature.gamma {
            let want = nodes * k * n * k;
            if ga.len() != want {
                return Err(Error::InvalidConfig(format!(
                    "gamma has {} entries, want {want}",
                    ga.len()
                )));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    pub fn n_codim(&self) -> usize {
        self.n_codim
    }

    pub fn n_nodes(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn curvature(&self) -> &CurvatureData {
        &self.curvature
    }

    /// Coordinates of a node (1 or 2 components).
    pub fn coords(&self, node: usize) -> Vec<f64> {
        match self.kind {
            ModelKind::Circle { length } => {
                vec![node as f64 * length / self.shape[0] as f64]
            }
            ModelKind::FlatTorus { lengths } => {
                let (i, j) = (node / self.shape[1], node % self.shape[1]);
                vec![
                    i as f64 * lengths[0] / self.shape[0] as f64,
                    j as f64 * lengths[1] / self.shape[1] as f64,
                ]
            }
        }
    }

    fn rn_idx(&self, node: usize, m: usize, i: usize, j: usize, l: usize) -> usize {
        let n = self.n_codim;
        (((node * n + m) * n + i) * n + j) * n + l
    }

    fn rm_idx(&self, node: usize, m: usize, a: usize, b: usize, j: usize) -> usize {
        let (n, k) = (self.n_codim, self.k_dim);
        (((node * n + m) * k + a) * k + b) * n + j
    }

    fn ga_idx(&self, node: usize, a: usize, i: usize, b: usize) -> usize {
        let (n, k) = (self.n_codim, self.k_dim);
        ((node * k + a) * n + i) * k + b
    }

    pub fn r_normal_at(&self, node: usize, m: usize, i: usize, j: usize, l: usize) -> f64 {
        self.curvature
            .r_normal
            .as_ref()
            .map_or(0.0, |v| v[self.rn_idx(node, m, i, j, l)])
    }

    pub fn r_mixed_at(&self, node: usize, m: usize, a: usize, b: usize, j: usize) -> f64 {
        self.curvature
            .r_mixed
            .as_ref()
            .map_or(0.0, |v| v[self.rm_idx(node, m, a, b, j)])
    }

    pub fn gamma_at(&self, node: usize, a: usize, i: usize, b: usize) -> f64 {
        self.curvature
            .gamma
            .as_ref()
            .map_or(0.0, |v| v[self.ga_idx(node, a, i, b)])
    }

    /// Induced metric at a node as a k×k matrix (identity when absent).
    pub fn gtilde_at(&self, node: usize) -> DMatrix<f64> {
        let k = self.k_dim;
        match &self.curvature.gtilde {
            None => DMatrix::identity(k, k),
            Some(v) => {
                let mut g = DMatrix::zeros(k, k);
                for a in 0..k {
                    for b in 0..k {
                        g[(a, b)] = v[(node * k + a) * k + b];
                    }
                }
                g
            }
        }
    }

    pub fn gtilde_inv_at(&self, node: usize) -> DMatrix<f64> {
        let g = self.gtilde_at(node);
        g.try_inverse().expect("gtilde validated positive definite")
    }

    /// Grid steps per dimension.
    pub fn steps(&self) -> Vec<f64> {
        match self.kind {
            ModelKind::Circle { length } => vec![length / self.shape[0] as f64],
            ModelKind::FlatTorus { lengths } => vec![
                lengths[0] / self.shape[0] as f64,
                lengths[1] / self.shape[1] as f64,
            ],
        }
    }

    /// Periodic neighbors of a node along each dimension: (prev, next) pairs.
    pub fn neighbors(&self, node: usize) -> Vec<(usize, usize)> {
        match self.kind {
            ModelKind::Circle { .. } => {
                let n = self.shape[0];
                vec![((node + n - 1) % n, (node + 1) % n)]
            }
            ModelKind::FlatTorus { .. } => {
                let (n1, n2) = (self.shape[0], self.shape[1]);
                let (i, j) = (node / n2, node % n2);
                vec![
                    (((i + n1 - 1) % n1) * n2 + j, ((i + 1) % n1) * n2 + j),
                    (i * n2 + (j + n2 - 1) % n2, i * n2 + (j + 1) % n2),
                ]
            }
        }
    }

    /// Second-order periodic stencil for −Δ_K applied to node values.
    pub fn minus_laplacian(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.n_nodes());
        let steps = self.steps();
        (0..self.n_nodes())
            .map(|node| {
                let mut acc = 0.0;
                for (d, (prev, next)) in self.neighbors(node).into_iter().enumerate() {
                    let h2 = steps[d] * steps[d];
                    acc += (2.0 * f[node] - f[prev] - f[next]) / h2;
                }
                acc
            })
            .collect()
    }

    /// Gradient (central differences) at a node.
    pub fn gradient(&self, f: &[f64], node: usize) -> Vec<f64> {
        let steps = self.steps();
        self.neighbors(node)
            .into_iter()
            .enumerate()
            .map(|(d, (prev, next))| (f[next] - f[prev]) / (2.0 * steps[d]))
            .collect()
    }

    /// Dense matrix of −Δ_K (periodic stencil).
    pub fn minus_laplacian_matrix(&self) -> DMatrix<f64> {
        let n = self.n_nodes();
        let steps = self.steps();
        let mut m = DMatrix::zeros(n, n);
        for node in 0..n {
            for (d, (prev, next)) in self.neighbors(node).into_iter().enumerate() {
                let h2 = steps[d] * steps[d];
                m[(node, node)] += 2.0 / h2;
                m[(node, prev)] -= 1.0 / h2;
                m[(node, next)] -= 1.0 / h2;
            }
        }
        m
    }

    /// Spectrum of −Δ_K, ascending. Fourier is exact for these flat models;
    /// the stencil route diagonalizes the discrete operator and serves as the
    /// operator-consistent spectrum.
    pub fn laplace_spectrum(&self, count: usize, method: SpectrumMethod) -> Vec<f64> {
        let mut eigs: Vec<f64> = match method {
            SpectrumMethod::Fourier => match self.kind {
                ModelKind::Circle { length } => circle_fourier_eigs(length, self.shape[0]),
                ModelKind::FlatTorus { lengths } => {
                    let e1 = circle_fourier_eigs(lengths[0], self.shape[0]);
                    let e2 = circle_fourier_eigs(lengths[1], self.shape[1]);
                    let mut out = Vec::with_capacity(e1.len() * e2.len());
                    for a in &e1 {
                        for b in &e2 {
                            out.push(a + b);
                        }
                    }
                    out
                }
            },
            SpectrumMethod::Stencil => match self.kind {
                ModelKind::Circle { length } => circle_stencil_eigs(length, self.shape[0]),
                ModelKind::FlatTorus { lengths } => {
                    let e1 = circle_stencil_eigs(lengths[0], self.shape[0]);
                    let e2 = circle_stencil_eigs(lengths[1], self.shape[1]);
                    let mut out = Vec::with_capacity(e1.len() * e2.len());
                    for a in &e1 {
                        for b in &e2 {
                            out.push(a + b);
                        }
                    }
                    out
                }
            },
        };
        eigs.sort_by(|a, b| a.total_cmp(b));
        eigs.truncate(count);
        eigs
    }

    /// Max over nodes and normal directions of |Σ_a Γᵃ_{ai}|; the model is
    /// minimal when the mean-curvature trace vanishes.
    pub fn check_minimality(&self) -> f64 {
        let mut worst = 0.0f64;
        for node in 0..self.n_nodes() {
            for i in 0..self.n_codim {
                let mut trace = 0.0;
                for a in 0..self.k_dim {
                    trace += self.gamma_at(node, a, i, a);
                }
                worst = worst.max(trace.abs());
            }
        }
        worst
    }

    pub fn is_minimal(&self) -> bool {
        self.check_minimality() <= 1e-12
    }

    /// Geometric potential Ω at a node:
    ///
    ///   Ω = sign · 3(N−2)/(4(N−1)) [ (1/3) Σ_{m,i} R_{mimi}
    ///       − Σ_{j,a,b} g̃^{ab} R_{jabj} + Σ_{j,a,b} Γᵇ_{aj} Γᵃ_{bj} ],
    ///
    /// where the mixed term uses the stored (normal, tangent, tangent, normal)
    /// components through the last-pair antisymmetry R_{iaib} = −R_{iabi}.
    pub fn compute_omega(&self, node: usize, sign: OmegaSign) -> f64 {
        let n = self.n_codim;
        let k = self.k_dim;
        let nf = n as f64;

        let mut normal_trace = 0.0;
        if self.curvature.r_normal.is_some() {
            for m in 0..n {
                for i in 0..n {
                    normal_trace += self.r_normal_at(node, m, i, m, i);
                }
            }
        }

        let mut mixed = 0.0;
        if self.curvature.r_mixed.is_some() {
            let ginv = self.gtilde_inv_at(node);
            for j in 0..n {
                for a in 0..k {
                    for b in 0..k {
                        mixed -= ginv[(a, b)] * self.r_mixed_at(node, j, a, b, j);
                    }
                }
            }
        }

        let mut gamma_sq = 0.0;
        if self.curvature.gamma.is_some() {
            for j in 0..n {
                for a in 0..k {
                    for b in 0..k {
                        gamma_sq += self.gamma_at(node, a, j, b) * self.gamma_at(node, b, j, a);
                    }
                }
            }
        }

        sign.factor() * 3.0 * (nf - 2.0) / (4.0 * (nf - 1.0))
            * (normal_trace / 3.0 + mixed + gamma_sq)
    }

    /// Coupling matrix of the normal-bundle operator at a node:
    /// V[l][m] = Σ_{a,b} ( g̃^{ab} R_{mabl} − Γᵇ_{am} Γᵃ_{bl} ).
    pub fn jacobi_potential(&self, node: usize) -> DMatrix<f64> {
        let n = self.n_codim;
        let k = self.k_dim;
        let ginv = self.gtilde_inv_at(node);
        let mut v = DMatrix::zeros(n, n);
        for l in 0..n {
            for m in 0..n {
                let mut acc = 0.0;
                for a in 0..k {
                    for b in 0..k {
                        acc += ginv[(a, b)] * self.r_mixed_at(node, m, a, b, l)
                            - self.gamma_at(node, a, m, b) * self.gamma_at(node, b, l, a);
                    }
                }
                v[(l, m)] = acc;
            }
        }
        v
    }

    /// Dense matrix of the normal-bundle (Jacobi-type) operator
    /// −Δ_K Φ_l + Σ_m V[l][m] Φ_m, with unknowns indexed node-major.
    pub fn jacobi_matrix(&self) -> DMatrix<f64> {
        let n_nodes = self.n_nodes();
        let n = self.n_codim;
        let dim = n_nodes * n;
        let steps = self.steps();
        let mut m = DMatrix::zeros(dim, dim);
        for node in 0..n_nodes {
            for (d, (prev, next)) in self.neighbors(node).into_iter().enumerate() {
                let h2 = steps[d] * steps[d];
                for l in 0..n {
                    m[(node * n + l, node * n + l)] += 2.0 / h2;
                    m[(node * n + l, prev * n + l)] -= 1.0 / h2;
                    m[(node * n + l, next * n + l)] -= 1.0 / h2;
                }
            }
            let v = self.jacobi_potential(node);
            for l in 0..n {
                for mm in 0..n {
                    m[(node * n + l, node * n + mm)] += v[(l, mm)];
                }
            }
        }
        m
    }

    /// Smallest singular value of the discretized normal-bundle operator and
    /// the degeneracy flag (σ_min ≤ 1e−8 σ_max).
    ///
    /// For node-uniform coupling data the operator block-diagonalizes under
    /// the discrete Fourier transform into the N×N blocks λ_κ I + V, a
    /// unitary similarity that preserves singular values exactly; otherwise
    /// the dense matrix is factored directly.
    pub fn jacobi_nondegeneracy(&self) -> Result<(f64, bool)> {
        let n = self.n_codim;
        let v0 = self.jacobi_potential(0);
        let uniform = (1..self.n_nodes()).all(|z| {
            let v = self.jacobi_potential(z);
            let scale = v0.amax().max(1.0);
            (&v - &v0).amax() <= 1e-13 * scale
        });
        let (smin, smax) = if uniform {
            let stencil_eigs: Vec<f64> = match self.kind {
                ModelKind::Circle { length } => circle_stencil_eigs(length, self.shape[0]),
                ModelKind::FlatTorus { lengths } => {
                    let e1 = circle_stencil_eigs(lengths[0], self.shape[0]);
                    let e2 = circle_stencil_eigs(lengths[1], self.shape[1]);
                    let mut out = Vec::with_capacity(e1.len() * e2.len());
                    for a in &e1 {
                        for b in &e2 {
                            out.push(a + b);
                        }
                    }
                    out
                }
            };
            let mut smin = f64::INFINITY;
            let mut smax = 0.0f64;
            for lam in stencil_eigs {
                let block = DMatrix::identity(n, n) * lam + &v0;
                let svd = block.svd(false, false);
                for s in svd.singular_values.iter() {
                    smin = smin.min(*s);
                    smax = smax.max(*s);
                }
            }
            (smin, smax)
        } else {
            let dim = self.n_nodes() * n;
            if dim > 6000 {
                return Err(Error::InvalidConfig(format!(
                    "normal-bundle operator of size {dim} with node-varying data \
                     exceeds the dense SVD guard"
                )));
            }
            let m = self.jacobi_matrix();
            let svd = m.svd(false, false);
            let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
            let smin = svd
                .singular_values
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            (smin, smax)
        };
        Ok((smin, smin <= 1e-8 * smax))
    }
}

/// Which spectrum to report for −Δ_K.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMethod {
    Fourier,
    Stencil,
}

fn circle_fourier_eigs(length: f64, n: usize) -> Vec<f64> {
    // Eigenvalues (2πκ/ℓ)², κ = 0, ±1, ±2, … represented on n nodes.
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    let mut kappa = 1;
    while out.len() < n {
        let lam = (2.0 * PI * kappa as f64 / length).powi(2);
        out.push(lam);
        if out.len() < n {
            out.push(lam);
        }
        kappa += 1;
    }
    out
}

fn circle_stencil_eigs(length: f64, n: usize) -> Vec<f64> {
    // Eigenvalues of the periodic 3-point stencil: (4/h²) sin²(πκ/n).
    let h = length / n as f64;
    (0..n)
        .map(|kappa| {
            let s = (PI * kappa as f64 / n as f64).sin();
            4.0 * s * s / (h * h)
        })
        .collect()
}
