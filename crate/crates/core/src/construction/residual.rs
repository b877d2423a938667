//! The measured residual of the approximate solution,
//!
//!   Ξ_ε(v) = −[μ² Δ_{K_ε} v + Δ_ξ v + A₀ v + A₁ v + A₂ v]
//!            + ε μ² h v − (1+α_ε)^{p−1±ε} ε^{∓(N−2)ε/4} μ^{∓ε(N−2)/2} v^{p±ε},
//!
//! evaluated keeping the spherical-harmonic modes 0–2 and measured in the
//! ‖·‖_{ε,N−2} weighted sup norm. The bubble part of every derivative uses
//! the closed forms; the corrections use the same discrete operators their
//! defining equations were solved with, so the linear block cancels exactly
//! and what remains is the genuine residual content. The exact nonlinearity
//! powers are used; the cubic metric remainder is excluded and its uniform
//! O(ε²) size folded into the reported tolerance.

use crate::bubble::BubbleFamily;
use crate::error::{Error, Result};
use crate::grid::RadialField;
use crate::operator::{Mode, RadialOperator};
use std::sync::Arc;

use super::bubble_spec_norm;
use super::modes::{M2Part, ModeField};
use super::norms::weighted_norm_field;
use super::state::ConstructionState;
use super::terms::assemble_t_terms;

/// Which approximation the residual is evaluated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualVersion {
    /// v = w₀ alone.
    V0,
    /// v = w₀ + w₁.
    V1,
}

#[derive(Debug)]
pub struct ResidualOutput {
    pub field: ModeField,
    /// ‖Ξ_ε‖_{ε,N−2}.
    pub norm: f64,
    /// ‖H₁‖_{ε,N−2} for term-by-term bookkeeping.
    pub h1_norm: f64,
}

/// First derivative on a nonuniform grid (3-point interior, one-sided ends).
fn deriv1(nodes: &[f64], f: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        if i == 0 {
            let h = nodes[1] - nodes[0];
            out[0] = (f[1] - f[0]) / h;
        } else if i == n - 1 {
            let h = nodes[n - 1] - nodes[n - 2];
            out[i] = (f[n - 1] - f[n - 2]) / h;
        } else {
            let hl = nodes[i] - nodes[i - 1];
            let hr = nodes[i + 1] - nodes[i];
            out[i] = (hl * hl * f[i + 1] - hr * hr * f[i - 1]
                + (hr * hr - hl * hl) * f[i])
                / (hl * hr * (hl + hr));
        }
    }
    out
}

/// Second derivative on a nonuniform grid.
fn deriv2(nodes: &[f64], f: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let hl = nodes[i] - nodes[i - 1];
        let hr = nodes[i + 1] - nodes[i];
        out[i] = 2.0 * (hl * f[i + 1] + hr * f[i - 1] - (hl + hr) * f[i])
            / (hl * hr * (hl + hr));
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];
    out
}

/// −Δ_K applied across K-nodes to per-node radial profiles.
fn minus_lap_k_profiles(
    state: &ConstructionState,
    profiles: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let model = &state.model;
    let n_nodes = model.n_nodes();
    let len = profiles[0].len();
    let steps = model.steps();
    let mut out = vec![vec![0.0; len]; n_nodes];
    for z in 0..n_nodes {
        for (d, (prev, next)) in model.neighbors(z).into_iter().enumerate() {
            let h2 = steps[d] * steps[d];
            for i in 0..len {
                out[z][i] += (2.0 * profiles[z][i] - profiles[prev][i] - profiles[next][i]) / h2;
            }
        }
    }
    out
}

/// ∂_{y_d} applied across K-nodes.
fn grad_k_profiles(
    state: &ConstructionState,
    profiles: &[Vec<f64>],
    dim: usize,
) -> Vec<Vec<f64>> {
    let model = &state.model;
    let n_nodes = model.n_nodes();
    let len = profiles[0].len();
    let steps = model.steps();
    let mut out = vec![vec![0.0; len]; n_nodes];
    for z in 0..n_nodes {
        let (prev, next) = model.neighbors(z)[dim];
        for i in 0..len {
            out[z][i] = (profiles[next][i] - profiles[prev][i]) / (2.0 * steps[dim]);
        }
    }
    out
}

/// Mode-diagonal part of −A₀ applied to a radial profile f at one node:
///
///   −A₀(f) = ε μ Δ_K μ (γ f + r f′)
///            − ε |∇_K μ|² (r² f″ + 2(1+γ) r f′ + γ(1+γ) f).
fn minus_a0_radial(
    nodes: &[f64],
    f: &[f64],
    f1: &[f64],
    f2: &[f64],
    eps: f64,
    mu: f64,
    lap_mu: f64,
    grad2: f64,
    gamma: f64,
) -> Vec<f64> {
    (0..nodes.len())
        .map(|i| {
            let r = nodes[i];
            eps * mu * lap_mu * (gamma * f[i] + r * f1[i])
                - eps * grad2
                    * (r * r * f2[i] + 2.0 * (1.0 + gamma) * r * f1[i] + gamma * (1.0 + gamma) * f[i])
        })
        .collect()
}

struct NodeGeometry {
    mu: f64,
    lap_mu: f64,
    grad_mu: Vec<f64>,
    grad2: f64,
    h: f64,
}

fn node_geometry(
    state: &ConstructionState,
    minus_lap_mu: &[f64],
    z: usize,
) -> NodeGeometry {
    let model = &state.model;
    let mu = state.mu0.mu0[z];
    let grad_mu = model.gradient(&state.mu0.mu0, z);
    let ginv = model.gtilde_inv_at(z);
    let mut grad2 = 0.0;
    for a in 0..model.k_dim() {
        for b in 0..model.k_dim() {
            grad2 += ginv[(a, b)] * grad_mu[a] * grad_mu[b];
        }
    }
    NodeGeometry {
        mu,
        lap_mu: -minus_lap_mu[z],
        grad_mu,
        grad2,
        h: model.h()[z],
    }
}

/// Assemble Ξ_ε(w₀ + w) with μ_ε = μ₀ and Φ_ε = 0; `w` is the total
/// transverse correction (None for the bare bubble).
pub fn assemble_residual(
    state: &ConstructionState,
    w: Option<&ModeField>,
) -> Result<ResidualOutput> {
    let model = &state.model;
    let n_dim = model.n_codim();
    let fam = BubbleFamily::new(n_dim)?;
    let eps = state.params.eps;
    let s = state.params.criticality.sign();
    let gamma = fam.gamma();
    let p = fam.p();
    let grid = &state.grid;
    let nodes = grid.nodes();
    let len = nodes.len();
    let n_nodes = model.n_nodes();

    // Exact nonlinearity coefficient (1+α_ε)^{p−1±ε} ε^{∓(N−2)ε/4} ≈ 1.
    let coeff = (1.0 + state.alpha_eps).powf(p - 1.0 + s * eps)
        * eps.powf(-s * (n_dim as f64 - 2.0) * eps / 4.0);

    // Bubble closed forms.
    let w0: Vec<f64> = nodes.iter().map(|&r| fam.w0(r)).collect();
    let w0p: Vec<f64> = nodes.iter().map(|&r| (p * fam.ln_w0(r)).exp()).collect();
    let w0_1: Vec<f64> = nodes.iter().map(|&r| fam.w0_prime(r)).collect();
    let w0_2: Vec<f64> = nodes.iter().map(|&r| fam.w0_second(r)).collect();

    // Free (zero-potential) mode operators for the discrete −Δ of the
    // corrections; identical flux structure to the solve operators.
    let zero_pot = RadialField::zeros(grid.clone());
    let op0 = RadialOperator::assemble(Mode::Zero, n_dim, &zero_pot, grid)?;
    let op2 = RadialOperator::assemble(Mode::Two, n_dim, &zero_pot, grid)?;

    // K-grid couplings of the corrections.
    let (w_m0_lapk, w_m0_grads) = match w {
        Some(field) => {
            let lapk = minus_lap_k_profiles(state, &field.m0);
            let grads: Vec<Vec<Vec<f64>>> = (0..model.k_dim())
                .map(|d| grad_k_profiles(state, &field.m0, d))
                .collect();
            (Some(lapk), Some(grads))
        }
        None => (None, None),
    };
    let w_m2_lapk = match w.and_then(|f| f.m2.as_ref()) {
        Some(m2) => Some(minus_lap_k_profiles(state, &m2.profile)),
        None => None,
    };

    let mut out_m0 = Vec::with_capacity(n_nodes);
    let mut out_m2_dir = Vec::with_capacity(n_nodes);
    let mut out_m2_profile = Vec::with_capacity(n_nodes);
    let mut any_m2 = false;
    let minus_lap_mu = model.minus_laplacian(&state.mu0.mu0);

    for z in 0..n_nodes {
        let geo = node_geometry(state, &minus_lap_mu, z);
        let t = assemble_t_terms(model, z, grid)?;
        let mu = geo.mu;
        let mu2 = mu * mu;
        let nf = n_dim as f64;
        // Mode-0 trace weights of the curvature operator terms.
        let a12_weight = t.trace_s / (3.0 * nf) - t.trace_g / nf;

        // --- mode-0 channel -------------------------------------------------
        let wz = w.map(|f| &f.m0[z]);
        let v: Vec<f64> = match wz {
            Some(c) => (0..len).map(|i| w0[i] + c[i]).collect(),
            None => w0.clone(),
        };
        if v.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::State(
                "approximate solution lost positivity on the grid".into(),
            ));
        }

        // −Δ_ξ v: closed form for the bubble, discrete for the correction.
        let mut xi = w0p.clone();
        if let Some(c) = wz {
            let lap = op0.apply_natural(c);
            for (i, l) in lap.iter().enumerate() {
                xi[i] += l;
            }
        }

        // −A₀(v): bubble part from closed-form derivatives.
        let a0_w0 = minus_a0_radial(
            nodes, &w0, &w0_1, &w0_2, eps, mu, geo.lap_mu, geo.grad2, gamma,
        );
        for i in 0..len {
            xi[i] += a0_w0[i];
        }
        if let Some(c) = wz {
            let c1 = deriv1(nodes, c);
            let c2 = deriv2(nodes, c);
            let a0_w = minus_a0_radial(
                nodes, c, &c1, &c2, eps, mu, geo.lap_mu, geo.grad2, gamma,
            );
            for i in 0..len {
                xi[i] += a0_w[i];
            }
            // Cross terms in z: −(−2 ε^{5/2} μ g̃^{ab} ∂_b μ (r ∂_r + γ) ∂_{y_a} w).
            if let Some(grads) = &w_m0_grads {
                let ginv = model.gtilde_inv_at(z);
                for a in 0..model.k_dim() {
                    let dya = &grads[a][z];
                    let dya1 = deriv1(nodes, dya);
                    for b in 0..model.k_dim() {
                        let c_ab = 2.0 * eps.powf(2.5) * mu * ginv[(a, b)] * geo.grad_mu[b];
                        for i in 0..len {
                            xi[i] += c_ab * (nodes[i] * dya1[i] + gamma * dya[i]);
                        }
                    }
                }
            }
        }

        // −(A₁+A₂)(radial parts): εμ² r g′ [trS/(3N) − trG/N].
        if a12_weight != 0.0 {
            for i in 0..len {
                xi[i] += eps * mu2 * nodes[i] * w0_1[i] * a12_weight;
            }
            if let Some(c) = wz {
                let c1 = deriv1(nodes, c);
                for i in 0..len {
                    xi[i] += eps * mu2 * nodes[i] * c1[i] * a12_weight;
                }
            }
        }

        // −μ² Δ_{K_ε} v = ε μ² (−Δ_K) w (the bubble is z-independent).
        if let Some(lapk) = &w_m0_lapk {
            for i in 0..len {
                xi[i] += eps * mu2 * lapk[z][i];
            }
        }

        // + ε μ² h v − exact nonlinearity.
        let mu_pow = mu.powf(-s * eps * gamma);
        for i in 0..len {
            let nonlin = coeff * mu_pow * v[i].powf(p + s * eps);
            xi[i] += eps * mu2 * geo.h * v[i] - nonlin;
        }
        // Dirichlet boundary row carries no residual statement.
        xi[len - 1] = 0.0;
        out_m0.push(xi);

        // --- mode-2 channel -------------------------------------------------
        let dir: Vec<f64> = t.d2_dir.iter().map(|d| mu2 * d).collect();
        let has_dir = dir.iter().any(|&d| d != 0.0);
        let w_m2 = w.and_then(|f| f.m2.as_ref());
        if has_dir || w_m2.is_some() {
            any_m2 = true;
            let mut xi2 = vec![0.0; len];
            // −(A₁+A₂)(w₀ + w-mode0) mode-2 part: +ε r g′ along μ²D.
            for i in 0..len {
                xi2[i] += eps * nodes[i] * w0_1[i];
            }
            if let Some(c) = wz {
                let c1 = deriv1(nodes, c);
                for i in 0..len {
                    xi2[i] += eps * nodes[i] * c1[i];
                }
            }
            if let Some(m2) = w_m2 {
                let rho = &m2.profile[z];
                // −Δ_ξ on the ℓ = 2 profile.
                let lap = op2.apply_natural(rho);
                for (k, i) in (op2.first_node()..len - 1).enumerate() {
                    xi2[i] += lap[k];
                }
                // −A₀ on the profile.
                let r1 = deriv1(nodes, rho);
                let r2 = deriv2(nodes, rho);
                let a0 = minus_a0_radial(
                    nodes, rho, &r1, &r2, eps, mu, geo.lap_mu, geo.grad2, gamma,
                );
                for i in 0..len {
                    xi2[i] += a0[i];
                }
                // −μ² Δ_{K_ε}: the direction is treated as locally constant;
                // its z-variation is second-stage content.
                if let Some(lapk) = &w_m2_lapk {
                    for i in 0..len {
                        xi2[i] += eps * mu2 * lapk[z][i];
                    }
                }
                // + ε μ² h ρ − tangent nonlinearity on the mode-2 channel.
                for i in 0..len {
                    let tangent = coeff
                        * mu_pow
                        * (p + s * eps)
                        * v[i].powf(p - 1.0 + s * eps)
                        * rho[i];
                    xi2[i] += eps * mu2 * geo.h * rho[i] - tangent;
                }
            }
            xi2[len - 1] = 0.0;
            out_m2_dir.push(dir);
            out_m2_profile.push(xi2);
        } else {
            out_m2_dir.push(vec![0.0; n_dim * n_dim]);
            out_m2_profile.push(vec![0.0; len]);
        }
    }

    let field = ModeField {
        grid: grid.clone(),
        n_dim,
        m0: out_m0,
        m1: None,
        m2: if any_m2 {
            Some(M2Part {
                dir: out_m2_dir,
                profile: out_m2_profile,
            })
        } else {
            None
        },
    };
    let spec = bubble_spec_norm(n_dim, state.params.sigma, eps);
    let norm = weighted_norm_field(&field, &spec);
    let h1_norm = weighted_norm_field(&state.h1, &spec);
    Ok(ResidualOutput {
        field,
        norm,
        h1_norm,
    })
}

/// Residual for a named version of the approximation.
pub fn residual(state: &ConstructionState, version: ResidualVersion) -> Result<ResidualOutput> {
    match version {
        ResidualVersion::V0 => assemble_residual(state, None),
        ResidualVersion::V1 => {
            let w1 = state.w1.as_ref().ok_or_else(|| {
                Error::State("first-order residual requested without a solved w1".into())
            })?;
            assemble_residual(state, Some(w1))
        }
    }
}

/// Extended second-stage correction: solve for w₂ from the measured
/// first-stage residual and re-measure. Returns (‖Ξ(v₂)‖, w₂).
pub fn extended_second_stage(state: &ConstructionState) -> Result<(f64, ModeField)> {
    use super::linear::{linear_solve, LinearSolveParams};
    let w1 = state
        .w1
        .as_ref()
        .ok_or_else(|| Error::State("second stage requires w1".into()))?;
    let r1 = assemble_residual(state, Some(w1))?;
    // Right-hand side −Ξ(v₁); its Z₀ component is second-order small and is
    // removed by the constrained solve, reappearing as the multiplier leak.
    let mut rhs = r1.field.clone();
    for prof in rhs.m0.iter_mut() {
        for v in prof.iter_mut() {
            *v = -*v;
        }
    }
    if let Some(m2) = &mut rhs.m2 {
        for prof in m2.profile.iter_mut() {
            for v in prof.iter_mut() {
                *v = -*v;
            }
        }
    }
    let a: Vec<f64> = (0..state.model.n_nodes())
        .map(|z| state.mu0.mu0[z] * state.mu0.mu0[z] * state.model.h()[z])
        .collect();
    let out = linear_solve(
        &a,
        &rhs,
        &LinearSolveParams {
            eps: state.params.eps,
            ortho_tol: 1.0,
            norm_spec: state.norm_spec(),
        },
    )?;
    // v₂ = w₀ + (w₁ + w₂).
    let mut total = w1.clone();
    for z in 0..total.m0.len() {
        for i in 0..total.m0[z].len() {
            total.m0[z][i] += out.phi.m0[z][i];
        }
    }
    match (&mut total.m2, &out.phi.m2) {
        (Some(t2), Some(p2)) => {
            for z in 0..t2.profile.len() {
                for i in 0..t2.profile[z].len() {
                    t2.profile[z][i] += p2.profile[z][i];
                }
            }
        }
        (None, Some(p2)) => total.m2 = Some(p2.clone()),
        _ => {}
    }
    let r2 = assemble_residual(state, Some(&total))?;
    Ok((r2.norm, out.phi))
}

/// Result of an ε-scaling study.
#[derive(Debug, Clone)]
pub struct ScalingStudy {
    pub eps: Vec<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
    /// Set when the norms fail to decrease monotonically with ε.
    pub non_monotone: bool,
}

/// Least-squares slope of log ‖Ξ_ε‖ against log ε over the supplied list.
pub fn scaling_study(
    model: &Arc<crate::manifold::SubmanifoldModel>,
    base: super::state::ConstructionParams,
    version: ResidualVersion,
    eps_list: &[f64],
) -> Result<ScalingStudy> {
    if eps_list.len() < 4 {
        return Err(Error::InvalidConfig(
            "scaling study needs at least 4 eps values".into(),
        ));
    }
    let lo = eps_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eps_list.iter().cloned().fold(0.0f64, f64::max);
    if hi / lo < 10.0 {
        return Err(Error::InvalidConfig(
            "scaling study needs eps values spanning at least one decade".into(),
        ));
    }
    let mut norms = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let params = super::state::ConstructionParams { eps, ..base };
        let state = super::state::build_state(
            model.clone(),
            params,
            version == ResidualVersion::V1,
        )?;
        norms.push(residual(&state, version)?.norm);
    }
    let xs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let slope = crate::bubble::least_squares_slope(&xs, &ys);
    // Non-monotone decay (in decreasing eps) flags an assembly bug.
    let mut sorted: Vec<(f64, f64)> = eps_list.iter().cloned().zip(norms.iter().cloned()).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let non_monotone = sorted.windows(2).any(|w| w[0].1 > w[1].1);
    Ok(ScalingStudy {
        eps: eps_list.to_vec(),
        norms,
        slope,
        non_monotone,
    })
}
