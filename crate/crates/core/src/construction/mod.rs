//! First stages of the iterative approximate-solution scheme: weighted norms,
//! Fermi-coordinate operator terms, the constrained mode-decomposed linear
//! solver, the reduced equations for μ₀, μ₁ and Φ₁, and residual measurement
//! with ε-scaling studies.

mod angular;
mod h1;
mod linear;
mod modes;
mod norms;
mod reduced;
mod residual;
mod state;
mod terms;

pub use angular::{sphere_cubature_points, sphere_integral};
pub use h1::{assemble_h1, h1_z0_projection, H1Context};
pub use linear::{linear_solve, LinearSolveOutput, LinearSolveParams};
pub use modes::{M2Part, ModeField};
pub use norms::{weighted_norm_field, weighted_norm_holder, weighted_norm_radial, WeightedNormSpec};
pub use reduced::{apply_jacobi_form, solve_mu0, solve_mu1, solve_phi1, Mu0Output, ReducedRatios};
pub use residual::{
    assemble_residual, extended_second_stage, residual, scaling_study, ResidualOutput,
    ResidualVersion, ScalingStudy,
};
pub use state::{build_state, ConstructionParams, ConstructionState};
pub use terms::{assemble_t_terms, curvature_g_matrix, curvature_s_matrix, TTerms};

use crate::error::{Error, Result};

/// The weighted-norm specification the residual bounds are stated in: weight
/// exponent N−2 (outside the admissibility window of the solver estimate, so
/// built directly).
pub fn bubble_spec_norm(n_dim: usize, sigma: f64, eps: f64) -> WeightedNormSpec {
    WeightedNormSpec {
        r: (n_dim - 2) as u32,
        sigma,
        eps,
        n_dim,
    }
}

/// Which side of the critical exponent the perturbation sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criticality {
    /// Exponent p − ε; the reduced problem is attractive.
    Subcritical,
    /// Exponent p + ε; the reduced problem is repulsive.
    Supercritical,
}

impl Criticality {
    /// Sign s in p ± ε: −1 subcritical, +1 supercritical.
    pub fn sign(self) -> f64 {
        match self {
            Criticality::Subcritical => -1.0,
            Criticality::Supercritical => 1.0,
        }
    }
}

/// The normalization number α_ε of the blow-up change of variables, defined
/// so that (1+α_ε)^{p−1±ε} ε^{∓(N−2)ε/4} = 1:
///
///   ln(1+α_ε) = ±(N−2)² ε ln ε / (16 ± 4(N−2)ε).
pub fn alpha_eps(criticality: Criticality, n_dim: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "eps = {eps} must lie in (0, 1)"
        )));
    }
    let s = criticality.sign();
    let nm2 = n_dim as f64 - 2.0;
    let ln1p = s * nm2 * nm2 * eps * eps.ln() / (16.0 + s * 4.0 * nm2 * eps);
    Ok(ln1p.exp() - 1.0)
}

/// The defining identity of α_ε, evaluated for verification; equals 1 up to
/// rounding for the implemented α_ε.
pub fn alpha_eps_identity(criticality: Criticality, n_dim: usize, eps: f64) -> Result<f64> {
    let s = criticality.sign();
    let nm2 = n_dim as f64 - 2.0;
    let p = (n_dim as f64 + 2.0) / nm2;
    let alpha = alpha_eps(criticality, n_dim, eps)?;
    Ok((1.0 + alpha).powf(p - 1.0 + s * eps) * eps.powf(-s * nm2 * eps / 4.0))
}
