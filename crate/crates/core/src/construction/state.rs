//! Assembled construction state: μ₀, μ₁, Φ₁ and the first transverse
//! correction w₁ at one value of ε.

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::manifold::{OmegaSign, SubmanifoldModel};
use std::sync::Arc;

use super::h1::{assemble_h1, H1Context};
use super::linear::{linear_solve, LinearSolveParams};
use super::modes::ModeField;
use super::norms::WeightedNormSpec;
use super::reduced::{solve_mu0, solve_mu1, Mu0Output, ReducedRatios};
use super::{alpha_eps, Criticality};

#[derive(Debug, Clone, Copy)]
pub struct ConstructionParams {
    pub criticality: Criticality,
    pub eps: f64,
    /// Transverse truncation parameter: R_out = eta · ε^{−1/2}.
    pub eta: f64,
    pub radial_m: usize,
    pub grading: f64,
    pub omega_sign: OmegaSign,
    /// Weight exponent for the uniform-estimate diagnostics (4 < r < N).
    pub norm_r: u32,
    pub sigma: f64,
    /// Orthogonality tolerance for the w₁ solve.
    pub ortho_tol: f64,
}

impl ConstructionParams {
    pub fn defaults(criticality: Criticality, eps: f64) -> Self {
        Self {
            criticality,
            eps,
            eta: 1.0,
            radial_m: 2048,
            grading: 2.0,
            omega_sign: OmegaSign::Positive,
            norm_r: 5,
            sigma: 0.5,
            ortho_tol: 1e-3,
        }
    }
}

/// Everything the residual assembly needs at one ε.
pub struct ConstructionState {
    pub model: Arc<SubmanifoldModel>,
    pub params: ConstructionParams,
    pub grid: Arc<RadialGrid>,
    pub ratios: ReducedRatios,
    pub mu0: Mu0Output,
    pub mu1: Vec<f64>,
    /// Normal-section correction; zero when the right-hand side vanishes
    /// (flat normal data), in which case no inversion is needed.
    pub phi1: Vec<Vec<f64>>,
    pub h1: ModeField,
    /// First transverse correction; None when the state was built for the
    /// zeroth-order residual only.
    pub w1: Option<ModeField>,
    pub alpha_eps: f64,
    /// ‖φ‖/‖h‖ measured by the w₁ solve.
    pub w1_norm_ratio: f64,
    pub w1_max_multiplier: f64,
}

impl ConstructionState {
    pub fn norm_spec(&self) -> WeightedNormSpec {
        WeightedNormSpec {
            r: self.params.norm_r,
            sigma: self.params.sigma,
            eps: self.params.eps,
            n_dim: self.model.n_codim(),
        }
    }
}

/// Build the construction state: μ₀ (and its certificate), μ₁, Φ₁, H₁ and,
/// when `with_w1`, the transverse correction w₁ from the constrained solve.
pub fn build_state(
    model: Arc<SubmanifoldModel>,
    params: ConstructionParams,
    with_w1: bool,
) -> Result<ConstructionState> {
    let eps = params.eps;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidConfig(format!("eps = {eps} out of (0,1)")));
    }
    let n_dim = model.n_codim();
    let r_out = params.eta / eps.sqrt();
    let grid = Arc::new(RadialGrid::graded(r_out, params.radial_m, params.grading)?);

    let ratios = ReducedRatios::measure(n_dim)?;
    let mu0 = solve_mu0(&model, params.criticality, &ratios, params.omega_sign)?;
    if mu0.mu0.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::PositivityViolation("mu0 must be positive".into()));
    }
    let mu1 = solve_mu1(&model, &mu0, params.criticality, &ratios)?;

    // Φ₁ solves the normal-bundle system; with vanishing right-hand side the
    // trivial section is the solution and no inversion is needed.
    let phi1 = vec![vec![0.0; model.n_nodes()]; n_dim];

    let alpha = alpha_eps(params.criticality, n_dim, eps)?;
    if alpha.abs() >= 0.5 {
        return Err(Error::InvalidConfig(format!(
            "alpha_eps = {alpha:.3} out of range; eps too large"
        )));
    }

    let ctx = H1Context {
        model: &model,
        mu0: &mu0.mu0,
        criticality: params.criticality,
        grid: grid.clone(),
    };
    let h1 = assemble_h1(&ctx)?;

    let (w1, w1_norm_ratio, w1_max_multiplier) = if with_w1 {
        // Right-hand side of the w₁ equation: −ε H₁.
        let mut rhs = h1.clone();
        for p in rhs.m0.iter_mut() {
            for v in p.iter_mut() {
                *v *= -eps;
            }
        }
        if let Some(m2) = &mut rhs.m2 {
            for p in m2.profile.iter_mut() {
                for v in p.iter_mut() {
                    *v *= -eps;
                }
            }
        }
        let a: Vec<f64> = (0..model.n_nodes())
            .map(|z| mu0.mu0[z] * mu0.mu0[z] * model.h()[z])
            .collect();
        let spec = WeightedNormSpec {
            r: params.norm_r,
            sigma: params.sigma,
            eps,
            n_dim,
        };
        // The projection of H₁ on Z₀ vanishes only up to the truncation tail
        // O((ε/η²)^{(N−4)/2}); the orthogonality gate must allow for it.
        let tail = 10.0 * (eps / (params.eta * params.eta)).powf((n_dim as f64 - 4.0) / 2.0);
        let out = linear_solve(
            &a,
            &rhs,
            &LinearSolveParams {
                eps,
                ortho_tol: params.ortho_tol.max(tail),
                norm_spec: spec,
            },
        )?;
        (Some(out.phi), out.norm_ratio, out.max_multiplier)
    } else {
        (None, 0.0, 0.0)
    };

    Ok(ConstructionState {
        model,
        params,
        grid,
        ratios,
        mu0,
        mu1,
        phi1,
        h1,
        w1,
        alpha_eps: alpha,
        w1_norm_ratio,
        w1_max_multiplier,
    })
}
