//! The first-order interior forcing term
//!
//!   H₁(z, ξ) = μ₀ Δ_K μ₀ · Z₀ − |∇_K μ₀|² T₁(w₀) + μ₀² (T₂(w₀) − T₃(w₀))
//!            + μ₀² h w₀ ∓ w₀^p ln w₀,
//!
//! assembled as mode-0 plus mode-2 profiles per K-node. Its translation-mode
//! projections vanish by parity; choosing μ₀ as the solution of the reduced
//! equation makes the Z₀ projection vanish up to quadrature and truncation.

use crate::bubble::BubbleFamily;
use crate::error::Result;
use crate::grid::RadialGrid;
use crate::manifold::SubmanifoldModel;
use crate::quad::weighted_inner;
use std::sync::Arc;

use super::modes::{M2Part, ModeField};
use super::terms::assemble_t_terms;
use super::Criticality;

/// Inputs shared by every node when assembling H₁.
pub struct H1Context<'a> {
    pub model: &'a SubmanifoldModel,
    pub mu0: &'a [f64],
    pub criticality: Criticality,
    pub grid: Arc<RadialGrid>,
}

/// Assemble H₁ over all K-nodes.
pub fn assemble_h1(ctx: &H1Context) -> Result<ModeField> {
    let model = ctx.model;
    let n_dim = model.n_codim();
    let fam = BubbleFamily::new(n_dim)?;
    let s = ctx.criticality.sign();
    let nodes = ctx.grid.nodes();
    let n_nodes = model.n_nodes();

    // Δ_K μ₀ and |∇_K μ₀|² from the same discrete stencils used by the
    // reduced solves, so the projection identity closes discretely.
    let minus_lap_mu0 = model.minus_laplacian(ctx.mu0);

    let w0: Vec<f64> = nodes.iter().map(|&r| fam.w0(r)).collect();
    let z0: Vec<f64> = nodes.iter().map(|&r| fam.z0(r)).collect();
    let w0plnw0: Vec<f64> = nodes.iter().map(|&r| fam.w0_p_ln_w0(r)).collect();

    let mut m0 = Vec::with_capacity(n_nodes);
    let mut any_curvature = false;
    let mut dirs = Vec::with_capacity(n_nodes);
    let mut profiles = Vec::with_capacity(n_nodes);

    for z in 0..n_nodes {
        let mu = ctx.mu0[z];
        let lap_mu = -minus_lap_mu0[z];
        let grad = model.gradient(ctx.mu0, z);
        let ginv = model.gtilde_inv_at(z);
        let mut grad2 = 0.0;
        for a in 0..model.k_dim() {
            for b in 0..model.k_dim() {
                grad2 += ginv[(a, b)] * grad[a] * grad[b];
            }
        }

        let t = assemble_t_terms(model, z, &ctx.grid)?;
        let h = model.h()[z];
        let mut profile = vec![0.0; nodes.len()];
        for i in 0..nodes.len() {
            profile[i] = mu * lap_mu * z0[i] - grad2 * t.t1[i]
                + mu * mu * (t.t2_mode0[i] - t.t3_mode0[i])
                + mu * mu * h * w0[i]
                - s * w0plnw0[i];
        }
        m0.push(profile);

        let dir: Vec<f64> = t.d2_dir.iter().map(|d| mu * mu * d).collect();
        if dir.iter().any(|&d| d != 0.0) {
            any_curvature = true;
        }
        dirs.push(dir);
        profiles.push(t.d2_profile);
    }

    Ok(ModeField {
        grid: ctx.grid.clone(),
        n_dim,
        m0,
        m1: None,
        m2: if any_curvature {
            Some(M2Part {
                dir: dirs,
                profile: profiles,
            })
        } else {
            None
        },
    })
}

/// ∫ H₁ Z₀ dξ at one node, through the production mode-0 profile route.
pub fn h1_z0_projection(h1: &ModeField, node: usize) -> Result<f64> {
    let fam = BubbleFamily::new(h1.n_dim)?;
    let nodes = h1.grid.nodes();
    let z0: Vec<f64> = nodes.iter().map(|&r| fam.z0(r)).collect();
    Ok(weighted_inner(nodes, h1.n_dim, &h1.m0[node], &z0))
}
