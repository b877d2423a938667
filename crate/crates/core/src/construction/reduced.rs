//! Reduced equations on K: the concentration scale μ₀, its first correction
//! μ₁, and the normal-section correction Φ₁.
//!
//! μ₀ solves the normalized singular equation with coefficients built from
//! the measured projection-constant ratios,
//!
//!   −Δ_K μ₀ + a·H μ₀ ∓ b/μ₀ = 0,   a = |c₃|/c₁,  b = c₄/c₁,  H = h − Ω,
//!
//! attractive (−, H > 0) in the subcritical regime and repulsive (+, H < 0)
//! in the supercritical one. μ₁ solves the linearization of that equation
//! with the forcing ∓(N−2)² b/(16 μ₀); Φ₁ solves the normal-bundle system
//! with a supplied right-hand side.

use crate::constants::{compute_constants, default_constants_grid, ProjectionConstants};
use crate::error::{Error, Result};
use crate::manifold::{OmegaSign, SubmanifoldModel};
use crate::singular::{
    solve_attractive, solve_repulsive, solve_shifted, SingularKind, SingularProblem,
    SingularSolution,
};
use nalgebra::{DMatrix, DVector};

use super::Criticality;

/// The measured constant ratios consumed by the reduced equations.
#[derive(Debug, Clone, Copy)]
pub struct ReducedRatios {
    pub n_dim: usize,
    /// a = |c₃|/c₁.
    pub a: f64,
    /// b = c₄/c₁.
    pub b: f64,
    pub constants: ProjectionConstants,
}

impl ReducedRatios {
    pub fn measure(n_dim: usize) -> Result<Self> {
        let grid = default_constants_grid();
        let pc = compute_constants(n_dim, &grid)?;
        Ok(Self {
            n_dim,
            a: pc.a_ratio(),
            b: pc.b_ratio(),
            constants: pc,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Mu0Output {
    pub mu0: Vec<f64>,
    /// H = h − Ω used in the solve.
    pub h_field: Vec<f64>,
    pub solution: SingularSolution,
}

/// Solve the reduced equation for μ₀.
pub fn solve_mu0(
    model: &SubmanifoldModel,
    criticality: Criticality,
    ratios: &ReducedRatios,
    omega_sign: OmegaSign,
) -> Result<Mu0Output> {
    let n = model.n_nodes();
    let h_field: Vec<f64> = (0..n)
        .map(|z| model.h()[z] - model.compute_omega(z, omega_sign))
        .collect();
    match criticality {
        Criticality::Subcritical => {
            let min_h = h_field.iter().cloned().fold(f64::INFINITY, f64::min);
            if !(min_h > 0.0) {
                return Err(Error::Precondition(format!(
                    "subcritical regime needs h − Ω > 0 everywhere; min = {min_h:.6}"
                )));
            }
            let alpha: Vec<f64> = h_field.iter().map(|h| ratios.a * h).collect();
            let beta = vec![ratios.b; n];
            let problem = SingularProblem::new(model, alpha, beta, SingularKind::Attractive)?;
            let solution = solve_attractive(&problem, 1e-12)?;
            Ok(Mu0Output {
                mu0: solution.u.clone(),
                h_field,
                solution,
            })
        }
        Criticality::Supercritical => {
            let max_h = h_field.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !(max_h < 0.0) {
                return Err(Error::Precondition(format!(
                    "supercritical regime needs h − Ω < 0 everywhere; max = {max_h:.6}"
                )));
            }
            let alpha: Vec<f64> = h_field.iter().map(|h| ratios.a * h).collect();
            let beta = vec![ratios.b; n];
            let problem = SingularProblem::new(model, alpha, beta, SingularKind::Repulsive)?;
            let solution = solve_repulsive(&problem, 1e-12, None)?;
            Ok(Mu0Output {
                mu0: solution.u.clone(),
                h_field,
                solution,
            })
        }
    }
}

/// Solve the linear equation for μ₁: the linearization of the μ₀ equation,
///
///   [−Δ_K + a·H ± b/μ₀²] μ₁ = ∓ (N−2)² b / (16 μ₀),
///
/// upper sign subcritical (attractive linearization), lower supercritical.
/// The operator is exactly the certified nondegenerate linearization at μ₀.
pub fn solve_mu1(
    model: &SubmanifoldModel,
    mu0: &Mu0Output,
    criticality: Criticality,
    ratios: &ReducedRatios,
) -> Result<Vec<f64>> {
    if !mu0.solution.nondegenerate {
        return Err(Error::Precondition(
            "mu1 needs a nondegenerate mu0 linearization".into(),
        ));
    }
    let n = model.n_nodes();
    let s = criticality.sign();
    let nm2 = ratios.n_dim as f64 - 2.0;
    let forcing = nm2 * nm2 * ratios.b / 16.0;
    // Linearization of ∓b/μ: the potential term is ±b/μ₀² relative to the
    // attracting sign convention; equivalently −s·(−b/μ²)-derivative.
    let coeff: Vec<f64> = (0..n)
        .map(|z| {
            ratios.a * mu0.h_field[z] - s * ratios.b / (mu0.mu0[z] * mu0.mu0[z])
        })
        .collect();
    let rhs: Vec<f64> = (0..n).map(|z| -s * forcing / mu0.mu0[z]).collect();
    let mu1 = solve_shifted(model, &coeff, &rhs)?;
    // Verify the discrete equation to solver accuracy.
    let minus_lap = model.minus_laplacian(&mu1);
    let mut worst = 0.0f64;
    for z in 0..n {
        let res = minus_lap[z] + coeff[z] * mu1[z] - rhs[z];
        worst = worst.max(res.abs());
    }
    let scale = rhs.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1.0);
    if worst > 1e-10 * scale {
        return Err(Error::Degenerate(format!(
            "mu1 linear solve residual {worst:.3e} contradicts the certificate"
        )));
    }
    Ok(mu1)
}

/// Solve the normal-bundle system Δ_K Φ^s − Σ_m V[s][m] Φ^m = G for a given
/// N-component right-hand side G. Requires a nondegenerate operator.
pub fn solve_phi1(model: &SubmanifoldModel, g: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n_codim = model.n_codim();
    let n_nodes = model.n_nodes();
    if g.len() != n_codim || g.iter().any(|c| c.len() != n_nodes) {
        return Err(Error::InvalidConfig(
            "right-hand side must carry N components on the K-grid".into(),
        ));
    }
    let (smin, degenerate) = model.jacobi_nondegeneracy()?;
    if degenerate {
        return Err(Error::Precondition(format!(
            "normal-bundle operator is degenerate (smallest singular value {smin:.3e})"
        )));
    }
    // The assembled matrix realizes −Δ_K + V; the stated equation is its
    // negative, so solve (−Δ + V) Φ = −G.
    let j = model.jacobi_matrix();
    let dim = n_nodes * n_codim;
    let mut rhs = DVector::zeros(dim);
    for l in 0..n_codim {
        for z in 0..n_nodes {
            rhs[z * n_codim + l] = -g[l][z];
        }
    }
    let lu = j.clone().lu();
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::SolverFailure("normal-bundle linear system".into()))?;
    // Residual check against the assembled matrix.
    let res = &j * &sol - &rhs;
    let scale = rhs.amax().max(1.0);
    let worst = res.amax();
    if worst > 1e-10 * scale {
        return Err(Error::SolverFailure(format!(
            "normal-bundle solve residual {worst:.3e}"
        )));
    }
    let mut out = vec![vec![0.0; n_nodes]; n_codim];
    for l in 0..n_codim {
        for z in 0..n_nodes {
            out[l][z] = sol[z * n_codim + l];
        }
    }
    Ok(out)
}

/// Apply the stated normal-bundle operator Δ_K Φ − V Φ to component fields
/// (diagnostic helper for residual checks).
pub fn apply_jacobi_form(model: &SubmanifoldModel, phi: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n_codim = model.n_codim();
    let n_nodes = model.n_nodes();
    let mut out = vec![vec![0.0; n_nodes]; n_codim];
    let minus_lap: Vec<Vec<f64>> = phi.iter().map(|c| model.minus_laplacian(c)).collect();
    for z in 0..n_nodes {
        let v: DMatrix<f64> = model.jacobi_potential(z);
        for l in 0..n_codim {
            let mut acc = -minus_lap[l][z];
            for m in 0..n_codim {
                acc -= v[(l, m)] * phi[m][z];
            }
            out[l][z] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{CurvatureData, ModelKind};
    use std::f64::consts::PI;

    fn circle(n: usize, h: f64) -> SubmanifoldModel {
        SubmanifoldModel::new(
            ModelKind::Circle { length: 2.0 * PI },
            vec![n],
            7,
            vec![h; n],
            CurvatureData::default(),
        )
        .unwrap()
    }

    #[test]
    fn mu0_constant_balance_subcritical() {
        // H ≡ 1: μ₀ = √(b/a) with the measured ratios.
        let model = circle(64, 1.0);
        let ratios = ReducedRatios::measure(7).unwrap();
        let out = solve_mu0(&model, Criticality::Subcritical, &ratios, OmegaSign::Positive)
            .unwrap();
        let expect = (ratios.b / ratios.a).sqrt();
        for &u in &out.mu0 {
            assert!((u - expect).abs() < 1e-11 * expect, "{u} vs {expect}");
        }
        // The measured balance point: √((25/12)/(8/15)) for N = 7.
        let closed = (25.0f64 / 12.0 / (8.0 / 15.0)).sqrt();
        assert!((expect - closed).abs() < 1e-5 * closed);
    }

    #[test]
    fn mu0_constant_balance_supercritical_same_value() {
        let model = circle(64, -1.0);
        let ratios = ReducedRatios::measure(7).unwrap();
        let out = solve_mu0(
            &model,
            Criticality::Supercritical,
            &ratios,
            OmegaSign::Positive,
        )
        .unwrap();
        let expect = (ratios.b / ratios.a).sqrt();
        for &u in &out.mu0 {
            assert!((u - expect).abs() < 1e-11 * expect);
        }
    }

    #[test]
    fn mu0_sign_incompatibility_is_rejected() {
        let model = circle(64, -1.0);
        let ratios = ReducedRatios::measure(7).unwrap();
        let err = solve_mu0(&model, Criticality::Subcritical, &ratios, OmegaSign::Positive)
            .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn mu0_cosine_refinement_order() {
        let solve_at = |n: usize| {
            let h: Vec<f64> = (0..n)
                .map(|i| 1.0 + 0.3 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect();
            let model = SubmanifoldModel::new(
                ModelKind::Circle { length: 2.0 * PI },
                vec![n],
                7,
                h,
                CurvatureData::default(),
            )
            .unwrap();
            let ratios = ReducedRatios::measure(7).unwrap();
            solve_mu0(&model, Criticality::Subcritical, &ratios, OmegaSign::Positive)
                .unwrap()
                .mu0
        };
        let (u1, u2, u3) = (solve_at(64), solve_at(128), solve_at(256));
        let d12 = (0..64)
            .map(|i| (u1[i] - u2[2 * i]).abs())
            .fold(0.0f64, f64::max);
        let d23 = (0..128)
            .map(|i| (u2[i] - u3[2 * i]).abs())
            .fold(0.0f64, f64::max);
        let order = (d12 / d23).log2();
        assert!(order >= 1.9, "mu0 refinement order {order:.2}");
    }

    #[test]
    fn mu1_constant_closed_form() {
        // Constant data: μ₁ = (N−2)² μ₀ / 32 from the algebraic balance.
        let model = circle(64, 1.0);
        let ratios = ReducedRatios::measure(7).unwrap();
        let mu0 = solve_mu0(&model, Criticality::Subcritical, &ratios, OmegaSign::Positive)
            .unwrap();
        let mu1 = solve_mu1(&model, &mu0, Criticality::Subcritical, &ratios).unwrap();
        let expect = 25.0 * mu0.mu0[0] / 32.0;
        for &v in &mu1 {
            assert!((v - expect).abs() < 1e-9 * expect, "{v} vs {expect}");
        }
    }

    #[test]
    fn mu1_scales_linearly_with_forcing() {
        // Doubling b's forcing contribution doubles μ₁ in the linear solve;
        // realized by scaling the solve's right-hand side through ratios.b
        // only in the forcing (compare against a manual solve).
        let n = 64;
        let model = circle(n, 1.0);
        let ratios = ReducedRatios::measure(7).unwrap();
        let mu0 = solve_mu0(&model, Criticality::Subcritical, &ratios, OmegaSign::Positive)
            .unwrap();
        let mu1 = solve_mu1(&model, &mu0, Criticality::Subcritical, &ratios).unwrap();
        // Manual re-solve with the forcing doubled.
        let s = Criticality::Subcritical.sign();
        let nm2 = 5.0;
        let coeff: Vec<f64> = (0..n)
            .map(|z| ratios.a * mu0.h_field[z] - s * ratios.b / (mu0.mu0[z] * mu0.mu0[z]))
            .collect();
        let rhs: Vec<f64> = (0..n)
            .map(|z| -s * 2.0 * nm2 * nm2 * ratios.b / 16.0 / mu0.mu0[z])
            .collect();
        let doubled = solve_shifted(&model, &coeff, &rhs).unwrap();
        for z in 0..n {
            assert!((doubled[z] - 2.0 * mu1[z]).abs() < 1e-10 * mu1[z].abs().max(1.0));
        }
    }

    #[test]
    fn phi1_zero_rhs_gives_zero() {
        // Identity-shifted coupling is nondegenerate; G = 0 forces Φ = 0.
        let n = 48;
        let n_codim = 5;
        let mut rm = vec![0.0; n * n_codim * n_codim];
        for node in 0..n {
            for m in 0..n_codim {
                rm[(node * n_codim + m) * n_codim + m] = 1.0;
            }
        }
        let model = SubmanifoldModel::new(
            ModelKind::Circle { length: 2.0 * PI },
            vec![n],
            n_codim,
            vec![1.0; n],
            CurvatureData {
                r_mixed: Some(rm),
                ..Default::default()
            },
        )
        .unwrap();
        let g = vec![vec![0.0; n]; n_codim];
        let phi = solve_phi1(&model, &g).unwrap();
        for c in &phi {
            assert!(c.iter().all(|&x| x.abs() < 1e-14));
        }
    }

    #[test]
    fn phi1_constant_rhs_identity_coupling() {
        // With coupling +I and constant G ≡ c: on constants Δ = 0, so
        // −V Φ = G gives Φ = −c.
        let n = 48;
        let n_codim = 5;
        let mut rm = vec![0.0; n * n_codim * n_codim];
        for node in 0..n {
            for m in 0..n_codim {
                rm[(node * n_codim + m) * n_codim + m] = 1.0;
            }
        }
        let model = SubmanifoldModel::new(
            ModelKind::Circle { length: 2.0 * PI },
            vec![n],
            n_codim,
            vec![1.0; n],
            CurvatureData {
                r_mixed: Some(rm),
                ..Default::default()
            },
        )
        .unwrap();
        let mut g = vec![vec![0.0; n]; n_codim];
        for (l, comp) in g.iter_mut().enumerate() {
            for v in comp.iter_mut() {
                *v = 0.3 + 0.1 * l as f64;
            }
        }
        let phi = solve_phi1(&model, &g).unwrap();
        for l in 0..n_codim {
            let expect = -(0.3 + 0.1 * l as f64);
            for &x in &phi[l] {
                assert!((x - expect).abs() < 1e-12, "{x} vs {expect}");
            }
        }
    }

    #[test]
    fn phi1_random_rhs_residual() {
        let n = 48;
        let n_codim = 5;
        let mut rm = vec![0.0; n * n_codim * n_codim];
        for node in 0..n {
            for m in 0..n_codim {
                rm[(node * n_codim + m) * n_codim + m] = 0.8 + 0.2 * m as f64;
            }
        }
        let model = SubmanifoldModel::new(
            ModelKind::Circle { length: 2.0 * PI },
            vec![n],
            n_codim,
            vec![1.0; n],
            CurvatureData {
                r_mixed: Some(rm),
                ..Default::default()
            },
        )
        .unwrap();
        // Deterministic pseudo-random right-hand side.
        let mut g = vec![vec![0.0; n]; n_codim];
        for (l, comp) in g.iter_mut().enumerate() {
            for (z, v) in comp.iter_mut().enumerate() {
                *v = ((l * 37 + z * 101) as f64 * 0.618).fract() - 0.5;
            }
        }
        let phi = solve_phi1(&model, &g).unwrap();
        let applied = apply_jacobi_form(&model, &phi);
        let mut worst = 0.0f64;
        for l in 0..n_codim {
            for z in 0..n {
                worst = worst.max((applied[l][z] - g[l][z]).abs());
            }
        }
        assert!(worst < 1e-10, "normal-bundle residual {worst:.3e}");
    }

    #[test]
    fn phi1_degenerate_operator_is_rejected() {
        let model = circle(48, 1.0); // flat: kernel of constants
        let g = vec![vec![0.0; 48]; 7];
        let err = solve_phi1(&model, &g).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
