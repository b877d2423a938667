//! Command implementations: compute, write artifacts, record pass flags.

use crate::output::{fmt, OutDir, Summary};
use crate::problem::load_problem;
use crate::GridArgs;
use concentra_core::bubble::{compute_kernel_set, BubbleFamily};
use concentra_core::constants::{
    compute_constants, default_constants_grid, second_derivative_identity_value,
    verify_t1_orthogonality, ProjectionConstants,
};
use concentra_core::construction::{
    build_state, extended_second_stage, h1_z0_projection, residual,
    ConstructionParams, Criticality, ResidualVersion,
};
use concentra_core::grid::RadialGrid;
use concentra_core::manifold::geometry::load_geometry;
use concentra_core::manifold::{OmegaSign, SpectrumMethod};
use concentra_core::singular::{
    bracket_constants, integral_identity, repulsive_feasibility, solve_attractive,
    solve_repulsive, window_check, SingularKind, SingularProblem,
};
use concentra_core::{Error, Result};
use rayon::prelude::*;
use std::path::Path;
use std::sync::Arc;

fn parse_omega_sign(s: &str) -> Result<OmegaSign> {
    match s {
        "positive" => Ok(OmegaSign::Positive),
        "negative" => Ok(OmegaSign::Negative),
        other => Err(Error::InvalidConfig(format!(
            "omega-sign must be `positive` or `negative`, got `{other}`"
        ))),
    }
}

fn parse_sign(s: &str) -> Result<Criticality> {
    match s {
        "sub" => Ok(Criticality::Subcritical),
        "super" => Ok(Criticality::Supercritical),
        other => Err(Error::InvalidConfig(format!(
            "sign must be `sub` or `super`, got `{other}`"
        ))),
    }
}

pub fn constants(out_dir: &Path, n_dims: &[usize]) -> Result<()> {
    let out = OutDir::create(out_dir)?;
    let grid = default_constants_grid();
    let mut rows = Vec::new();
    let mut summary = Summary::new("constants");
    let mut all_pass = true;
    for &n in n_dims {
        let pc = compute_constants(n, &grid)?;
        let a_t = ProjectionConstants::a_target(n);
        let b_closed = ProjectionConstants::b_target(n);
        let b_def = ProjectionConstants::b_definitional(n);
        let c2_t = ProjectionConstants::c2_target(n);
        let rel = |x: f64, t: f64| (x - t).abs() / t.abs();
        let pass = rel(pc.a_ratio(), a_t) <= 1e-6
            && rel(pc.b_ratio(), b_def) <= 1e-6
            && rel(pc.c2_ratio(), c2_t) <= 1e-6;
        all_pass &= pass;
        rows.push(vec![
            n.to_string(),
            fmt(pc.c1),
            fmt(pc.c2),
            fmt(pc.c3),
            fmt(pc.c4),
            fmt(pc.c0),
            fmt(pc.c4_log_route),
            fmt(pc.a_ratio()),
            fmt(a_t),
            fmt(pc.b_ratio()),
            fmt(b_closed),
            fmt(b_def),
            fmt(pc.c2_ratio()),
            fmt(c2_t),
            fmt(rel(pc.a_ratio(), a_t)),
            fmt(rel(pc.b_ratio(), b_def)),
            fmt(rel(pc.c2_ratio(), c2_t)),
            pass.to_string(),
        ]);
        let t1 = verify_t1_orthogonality(n, &grid)?;
        let dd = second_derivative_identity_value(n, &grid)?;
        summary.num(&format!("n{n}_t1_orthogonality"), t1);
        summary.num(&format!("n{n}_t1_budget"), 1e-8 * pc.c1);
        summary.num(&format!("n{n}_second_derivative_identity"), dd);
        summary.num(&format!("n{n}_second_derivative_target"), -pc.c0 / 2.0);
        summary.flag(&format!("n{n}_ratios_pass"), pass);
    }
    out.write_csv(
        "constants.csv",
        "n_dim,c1,c2,c3,c4,c0,c4_log_route,a_ratio,a_target,b_ratio,b_target_closed_form,\
         b_target_definitional,c2_ratio,c2_target,rel_err_a,rel_err_b_definitional,rel_err_c2,pass",
        &rows,
    )?;
    summary.flag("compute_constants_pass", all_pass);
    out.write_summary(&summary.finish())?;
    Ok(())
}

pub fn profile(out_dir: &Path, n_dim: usize, grid_args: &GridArgs) -> Result<()> {
    let out = OutDir::create(out_dir)?;
    let grid = Arc::new(RadialGrid::graded(
        grid_args.r_out,
        grid_args.radial_m,
        grid_args.grading,
    )?);
    let fam = BubbleFamily::new(n_dim)?;
    let rows: Vec<Vec<String>> = grid
        .nodes()
        .iter()
        .map(|&r| {
            vec![
                fmt(r),
                fmt(fam.w0(r)),
                fmt(fam.w0_prime(r)),
                fmt(fam.z0(r)),
            ]
        })
        .collect();
    out.write_csv("profile.csv", "r,w0,w0_prime,z0", &rows)?;
    let mut summary = Summary::new("profile");
    summary
        .int("n_dim", n_dim)
        .num("alpha_n", fam.alpha())
        .num("p", fam.p())
        .num("gamma", fam.gamma())
        .num("sample_w0_at_zero", fam.w0(0.0));
    out.write_summary(&summary.finish())?;
    Ok(())
}

pub fn eigenpair(out_dir: &Path, n_dim: usize, grid_args: &GridArgs) -> Result<()> {
    let out = OutDir::create(out_dir)?;
    let grid = Arc::new(RadialGrid::graded(
        grid_args.r_out,
        grid_args.radial_m,
        grid_args.grading,
    )?);
    let ks = compute_kernel_set(&grid, n_dim)?;
    let rows: Vec<Vec<String>> = ks
        .zeig
        .grid()
        .nodes()
        .iter()
        .zip(ks.zeig.values())
        .map(|(&r, &z)| vec![fmt(r), fmt(z)])
        .collect();
    out.write_csv("zeig.csv", "r,zeig", &rows)?;
    let sq = concentra_core::grid::RadialField::new(
        ks.zeig.grid().clone(),
        ks.zeig.values().iter().map(|v| v * v).collect(),
    )?;
    let norm = concentra_core::quad::radial_quadrature(&sq, n_dim)?;
    let rate = ks.lambda0.sqrt();
    let slope_rel = (ks.tail_slope + rate).abs() / rate;
    let mut summary = Summary::new("eigenpair");
    summary
        .int("n_dim", n_dim)
        .num("compute_eigenpair_lambda0", ks.lambda0)
        .num("lambda0_agreement", ks.lambda0_agreement)
        .num("zeig_norm", norm)
        .num("tail_slope", ks.tail_slope)
        .num("tail_slope_target", -rate)
        .num("tail_slope_rel_err", slope_rel)
        .flag("lambda0_positive", ks.lambda0 > 0.0)
        .flag("normalization_pass", (norm - 1.0).abs() <= 1e-10)
        .flag("agreement_pass", ks.lambda0_agreement <= 1e-6)
        .flag("tail_slope_pass", slope_rel <= 0.05);
    out.write_summary(&summary.finish())?;
    Ok(())
}

pub fn singular_solve(out_dir: &Path, problem_path: &Path, tol: f64, attractive: bool) -> Result<()> {
    let out = OutDir::create(out_dir)?;
    let loaded = load_problem(problem_path)?;
    let kind = if attractive {
        SingularKind::Attractive
    } else {
        SingularKind::Repulsive
    };
    let problem = SingularProblem::new(&loaded.model, loaded.alpha.clone(), loaded.beta.clone(), kind)?;
    let command = if attractive {
        "attractive-solve"
    } else {
        "repulsive-solve"
    };
    let mut summary = Summary::new(command);

    if !attractive {
        let feas = repulsive_feasibility(&problem);
        summary
            .flag("repulsive_feasibility", feas.feasible)
            .num("min_alpha", feas.min_alpha);
        if !feas.feasible {
            summary.text(
                "error",
                &format!("no solution found: min alpha = {:.6} >= 0", feas.min_alpha),
            );
            out.write_summary(&summary.finish())?;
            return Err(Error::NoSolutionFound(format!(
                "min alpha = {:.6} >= 0",
                feas.min_alpha
            )));
        }
        // Report the printed window condition and the spectrum-based window.
        if let concentra_core::manifold::ModelKind::Circle { length } = loaded.model.kind() {
            let alpha_max = loaded
                .alpha
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            for kappa in 1..=4u32 {
                let w = window_check(length, alpha_max, kappa)?;
                summary.flag(&format!("window_check_kappa{kappa}"), w);
            }
            let spec = loaded.model.laplace_spectrum(12, SpectrumMethod::Stencil);
            summary.nums("laplace_spectrum", &spec);
        }
    } else {
        let (lo, hi) = bracket_constants(&problem)?;
        summary.num("bracket_lower", lo).num("bracket_upper", hi);
    }

    let solution = if attractive {
        solve_attractive(&problem, tol)
    } else {
        solve_repulsive(&problem, tol, None)
    };
    let solution = match solution {
        Ok(s) => s,
        Err(e) => {
            summary.text("error", &e.to_string());
            out.write_summary(&summary.finish())?;
            return Err(e);
        }
    };

    let residuals = {
        let lap = loaded.model.minus_laplacian(&solution.u);
        let sgn = if attractive { -1.0 } else { 1.0 };
        (0..solution.u.len())
            .map(|i| lap[i] + loaded.alpha[i] * solution.u[i] + sgn * loaded.beta[i] / solution.u[i])
            .collect::<Vec<f64>>()
    };
    let rows: Vec<Vec<String>> = (0..solution.u.len())
        .map(|i| {
            let coords = loaded.model.coords(i);
            let mut row = vec![i.to_string()];
            row.extend(coords.iter().map(|&c| fmt(c)));
            row.push(fmt(solution.u[i]));
            row.push(fmt(residuals[i]));
            row
        })
        .collect();
    let header = if loaded.model.k_dim() == 1 {
        "node,y,u,residual"
    } else {
        "node,y1,y2,u,residual"
    };
    out.write_csv("solution.csv", header, &rows)?;

    let identity = integral_identity(&problem, &solution.u);
    summary
        .num("residual_norm", solution.residual_norm)
        .flag("nondegenerate", solution.nondegenerate)
        .nums("linearized_eigs", &solution.linearized_eigs)
        .num("integral_identity", identity)
        .flag("integral_identity_pass", identity.abs() <= 1e-8);
    out.write_summary(&summary.finish())?;
    Ok(())
}

pub fn jacobi(out_dir: &Path, geometry: &Path, omega_sign: &str) -> Result<()> {
    let out = OutDir::create(out_dir)?;
    let model = load_geometry(geometry)?;
    let sign = parse_omega_sign(omega_sign)?;
    let (smin, degenerate) = model.jacobi_nondegeneracy()?;
    let minimality = model.check_minimality();
    let omega0 = model.compute_omega(0, sign);
    let mut summary = Summary::new("jacobi");
    summary
        .num("jacobi_nondegeneracy_smallest_singular_value", smin)
        .flag("jacobi_degenerate", degenerate)
        .num("check_minimality", minimality)
        .flag("is_minimal", model.is_minimal())
        .num("compute_omega_node0", omega0)
        .int("n_nodes", model.n_nodes())
        .int("codimension", model.n_codim());
    out.write_summary(&summary.finish())?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn construct(
    out_dir: &Path,
    geometry: &Path,
    sign: &str,
    eps: f64,
    radial_m: usize,
    grading: f64,
    eta: f64,
    omega_sign: &str,
) -> Result<()> {
    let out = OutDir::create(out_dir)?;
    let model = Arc::new(load_geometry(geometry)?);
    let criticality = parse_sign(sign)?;
    let mut params = ConstructionParams::defaults(criticality, eps);
    params.radial_m = radial_m;
    params.grading = grading;
    params.eta = eta;
    params.omega_sign = parse_omega_sign(omega_sign)?;

    let mut summary = Summary::new("construct");
    let state = match build_state(model.clone(), params, true) {
        Ok(s) => s,
        Err(e) => {
            summary.text("error", &e.to_string());
            out.write_summary(&summary.finish())?;
            return Err(e);
        }
    };

    // Fields on K.
    let n_codim = model.n_codim();
    let rows: Vec<Vec<String>> = (0..model.n_nodes())
        .map(|z| {
            let mut row = vec![z.to_string()];
            row.extend(model.coords(z).iter().map(|&c| fmt(c)));
            row.push(fmt(state.mu0.mu0[z]));
            row.push(fmt(state.mu1[z]));
            for l in 0..n_codim {
                row.push(fmt(state.phi1[l][z]));
            }
            row
        })
        .collect();
    let mut header = if model.k_dim() == 1 {
        "node,y,mu0,mu1".to_string()
    } else {
        "node,y1,y2,mu0,mu1".to_string()
    };
    for l in 0..n_codim {
        header.push_str(&format!(",phi1_{l}"));
    }
    out.write_csv("fields.csv", &header, &rows)?;

    // w1 per-mode profiles: node index, mode, radius, value.
    if let Some(w1) = &state.w1 {
        let mut rows = Vec::new();
        for z in 0..w1.n_nodes() {
            for (i, &r) in w1.grid.nodes().iter().enumerate() {
                rows.push(vec![z.to_string(), "0".into(), fmt(r), fmt(w1.m0[z][i])]);
            }
            if let Some(m2) = &w1.m2 {
                for (i, &r) in w1.grid.nodes().iter().enumerate() {
                    rows.push(vec![
                        z.to_string(),
                        "2".into(),
                        fmt(r),
                        fmt(m2.profile[z][i]),
                    ]);
                }
            }
        }
        out.write_csv("w1_profiles.csv", "node,mode,radius,value", &rows)?;
        if let Some(m2) = &w1.m2 {
            let mut rows = Vec::new();
            for z in 0..w1.n_nodes() {
                for m in 0..n_codim {
                    for l in 0..n_codim {
                        let v = m2.dir[z][m * n_codim + l];
                        if v != 0.0 {
                            rows.push(vec![
                                z.to_string(),
                                m.to_string(),
                                l.to_string(),
                                fmt(v),
                            ]);
                        }
                    }
                }
            }
            out.write_csv("w1_mode2_directions.csv", "node,m,l,value", &rows)?;
        }
    }

    let v0 = residual(&state, ResidualVersion::V0)?;
    let v1 = residual(&state, ResidualVersion::V1)?;
    out.write_csv(
        "residual_norms.csv",
        "version,norm",
        &[
            vec!["v0".into(), fmt(v0.norm)],
            vec!["v1".into(), fmt(v1.norm)],
        ],
    )?;

    // Projection diagnostics.
    let mut max_proj = 0.0f64;
    for z in 0..model.n_nodes() {
        max_proj = max_proj.max(h1_z0_projection(&state.h1, z)?.abs());
    }
    let c1 = state.ratios.constants.c1;
    summary
        .num("eps", eps)
        .num("alpha_eps", state.alpha_eps)
        .num("residual_norm_v0", v0.norm)
        .num("residual_norm_v1", v1.norm)
        .num("h1_norm", v0.h1_norm)
        .num("mu0_residual_norm", state.mu0.solution.residual_norm)
        .flag("mu0_nondegenerate", state.mu0.solution.nondegenerate)
        .num("linear_solve_norm_ratio", state.w1_norm_ratio)
        .num("linear_solve_max_multiplier", state.w1_max_multiplier)
        .num("max_h1_z0_projection", max_proj)
        .num("max_h1_z0_projection_over_c1", max_proj / c1)
        .flag("v1_below_v0", v1.norm < v0.norm);
    out.write_summary(&summary.finish())?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn scaling(
    out_dir: &Path,
    geometry: &Path,
    sign: &str,
    version: &str,
    eps_list: &[f64],
    radial_m: usize,
    grading: f64,
    eta: f64,
    omega_sign: &str,
    extended: bool,
) -> Result<()> {
    let out = OutDir::create(out_dir)?;
    let model = Arc::new(load_geometry(geometry)?);
    let criticality = parse_sign(sign)?;
    let mut base = ConstructionParams::defaults(criticality, eps_list[0]);
    base.radial_m = radial_m;
    base.grading = grading;
    base.eta = eta;
    base.omega_sign = parse_omega_sign(omega_sign)?;

    let run_v0 = version == "v0" || version == "both";
    let run_v1 = version == "v1" || version == "both";
    if !(run_v0 || run_v1) {
        return Err(Error::InvalidConfig(format!(
            "version must be `v0`, `v1` or `both`, got `{version}`"
        )));
    }

    let mut summary = Summary::new("scaling");
    summary.nums("eps_list", eps_list);

    // Norms per eps, computed in parallel with deterministic ordering.
    let compute = |ver: ResidualVersion| -> Result<Vec<f64>> {
        eps_list
            .par_iter()
            .map(|&eps| {
                let params = ConstructionParams { eps, ..base };
                let state = build_state(model.clone(), params, ver == ResidualVersion::V1)?;
                Ok(residual(&state, ver)?.norm)
            })
            .collect()
    };

    let norms_v0 = if run_v0 {
        Some(compute(ResidualVersion::V0)?)
    } else {
        None
    };
    let norms_v1 = if run_v1 {
        Some(compute(ResidualVersion::V1)?)
    } else {
        None
    };
    let norms_v2 = if extended {
        let v: Result<Vec<f64>> = eps_list
            .par_iter()
            .map(|&eps| {
                let params = ConstructionParams { eps, ..base };
                let state = build_state(model.clone(), params, true)?;
                Ok(extended_second_stage(&state)?.0)
            })
            .collect();
        Some(v?)
    } else {
        None
    };

    let slope_of = |norms: &[f64]| {
        let xs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        num / den
    };

    let mut rows = Vec::new();
    for (i, &eps) in eps_list.iter().enumerate() {
        let mut row = vec![fmt(eps)];
        if let Some(v) = &norms_v0 {
            row.push(fmt(v[i]));
        }
        if let Some(v) = &norms_v1 {
            row.push(fmt(v[i]));
        }
        if let Some(v) = &norms_v2 {
            row.push(fmt(v[i]));
        }
        rows.push(row);
    }
    let mut header = "eps".to_string();
    if norms_v0.is_some() {
        header.push_str(",norm_v0");
    }
    if norms_v1.is_some() {
        header.push_str(",norm_v1");
    }
    if norms_v2.is_some() {
        header.push_str(",norm_v2");
    }
    out.write_csv("scaling.csv", &header, &rows)?;

    if let Some(v) = &norms_v0 {
        let s = slope_of(v);
        summary.nums("norms_v0", v).num("scaling_study_slope_v0", s);
        summary.flag("slope_v0_pass", (0.85..=1.15).contains(&s));
    }
    if let Some(v) = &norms_v1 {
        let s = slope_of(v);
        summary.nums("norms_v1", v).num("scaling_study_slope_v1", s);
        summary.flag("slope_v1_pass", (0.85..=1.15).contains(&s));
    }
    if let (Some(v0), Some(v1)) = (&norms_v0, &norms_v1) {
        let below = v0.iter().zip(v1.iter()).all(|(a, b)| b < a);
        summary.flag("v1_constant_below_v0", below);
    }
    if let Some(v) = &norms_v2 {
        let s = slope_of(v);
        summary.nums("norms_v2", v).num("scaling_study_slope_v2", s);
        // Consistency with at-least-3/2 decay of the second stage, up to the
        // fit tolerance.
        summary.flag("slope_v2_at_least_three_halves", s >= 1.3);
    }
    out.write_summary(&summary.finish())?;
    Ok(())
}
