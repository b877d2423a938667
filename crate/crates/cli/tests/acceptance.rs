//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its measured quantities and elapsed time.
//!
//! Criterion 1 is implemented exactly as stated and is expected to fail on
//! the c₄/c₁ identity: the definitional integral for c₄ evaluates (by exact
//! Beta-function calculus, by the dual log-moment route, and by quadrature)
//! to half the quoted closed-form target b_N. Every quantity the pipeline
//! consumes uses the measured ratios, which is what makes criteria 9 and 10
//! pass; see the constants module documentation.

use concentra_core::bubble::{compute_kernel_set, BubbleFamily};
use concentra_core::constants::{
    compute_constants, default_constants_grid, second_derivative_identity_value,
    verify_t1_orthogonality, ProjectionConstants,
};
use concentra_core::construction::*;
use concentra_core::grid::{RadialField, RadialGrid};
use concentra_core::manifold::geometry::load_geometry;
use concentra_core::manifold::{CurvatureData, ModelKind, SpectrumMethod, SubmanifoldModel};
use concentra_core::operator::{Mode, RadialOperator};
use concentra_core::quad::{radial_quadrature, sphere_area, weighted_inner};
use concentra_core::singular::*;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

fn geometries() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../geometries")
}

fn report(criterion: u32, pass: bool, started: Instant, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion:02} [{status}] ({:.2}s) {detail}",
        started.elapsed().as_secs_f64()
    );
}

fn circle(n: usize, n_codim: usize, h: f64) -> SubmanifoldModel {
    SubmanifoldModel::new(
        ModelKind::Circle { length: 2.0 * PI },
        vec![n],
        n_codim,
        vec![h; n],
        CurvatureData::default(),
    )
    .unwrap()
}

#[test]
fn criterion_01_constants_ratios() {
    let t = Instant::now();
    let grid = default_constants_grid();
    let mut detail = String::new();
    let mut pass = true;
    for n in 7..=10usize {
        let pc = compute_constants(n, &grid).unwrap();
        let a_t = ProjectionConstants::a_target(n);
        let b_t = ProjectionConstants::b_target(n);
        let c_t = ProjectionConstants::c2_target(n);
        let ra = (pc.a_ratio() - a_t).abs() / a_t;
        let rb = (pc.b_ratio() - b_t).abs() / b_t;
        let rc = (pc.c2_ratio() - c_t).abs() / c_t;
        pass &= ra <= 1e-6 && rb <= 1e-6 && rc <= 1e-6;
        detail.push_str(&format!(
            "N={n}: |c3|/c1 err {ra:.1e}, c4/c1 err {rb:.3e} (measured {:.6}, target {b_t:.6}), c2/c1 err {rc:.1e}; ",
            pc.b_ratio()
        ));
    }
    detail.push_str(
        "the c4/c1 target is unattainable: the definitional integral gives exactly half \
         the quoted closed form (confirmed by Beta-function calculus and the dual \
         log-moment route); the pipeline uses the measured ratio",
    );
    let within_time = t.elapsed().as_secs_f64() < 10.0;
    pass &= within_time;
    report(1, pass, t, &detail);
    assert!(within_time, "criterion 1 exceeded its 10 s budget");
    assert!(pass, "criterion 1: {detail}");
}

#[test]
fn criterion_02_integral_identities() {
    let t = Instant::now();
    let grid = default_constants_grid();
    let mut pass = true;
    let mut detail = String::new();
    for n in [7usize, 8] {
        let pc = compute_constants(n, &grid).unwrap();
        let t1 = verify_t1_orthogonality(n, &grid).unwrap();
        let ok1 = t1.abs() <= 1e-8 * pc.c1;
        pass &= ok1;
        detail.push_str(&format!("N={n}: |int Z0 T1| = {:.2e} vs 1e-8 c1 = {:.2e}; ", t1.abs(), 1e-8 * pc.c1));
    }
    for n in [7usize, 9] {
        let pc = compute_constants(n, &grid).unwrap();
        let v = second_derivative_identity_value(n, &grid).unwrap();
        let target = -pc.c0 / 2.0;
        let rel = (v - target).abs() / target.abs();
        pass &= rel <= 1e-6;
        detail.push_str(&format!("N={n}: second-derivative identity rel err {rel:.2e}; "));
    }
    let within_time = t.elapsed().as_secs_f64() < 5.0;
    pass &= within_time;
    report(2, pass, t, &detail);
    assert!(pass, "criterion 2: {detail}");
}

#[test]
fn criterion_03_kernel_residual_convergence() {
    let t = Instant::now();
    let fam = BubbleFamily::new(7).unwrap();
    let residual_order = |mode: Mode, use_w0_equation: bool| -> f64 {
        let worst = |m: usize| {
            let grid = Arc::new(RadialGrid::graded(30.0, m, 2.0).unwrap());
            let pot = if use_w0_equation {
                RadialField::zeros(grid.clone())
            } else {
                RadialField::sample(grid.clone(), |r| fam.linearization_potential(r)).unwrap()
            };
            let op = RadialOperator::assemble(mode, 7, &pot, &grid).unwrap();
            let samples: Vec<f64> = grid
                .nodes()
                .iter()
                .map(|&r| {
                    if use_w0_equation {
                        fam.w0(r)
                    } else {
                        match mode {
                            Mode::Zero => fam.z0(r),
                            Mode::One => fam.w0_prime(r),
                            Mode::Two => unreachable!(),
                        }
                    }
                })
                .collect();
            let out = op.apply_natural(&samples);
            let mut worst = 0.0f64;
            for (k, i) in (op.first_node()..grid.intervals()).enumerate() {
                let r = grid.nodes()[i];
                let target = if use_w0_equation {
                    fam.w0(r).powf(fam.p())
                } else {
                    0.0
                };
                worst = worst.max((out[k] - target).abs());
            }
            worst
        };
        (worst(1024) / worst(2048)).log2()
    };
    let o_w0 = residual_order(Mode::Zero, true);
    let o_z0 = residual_order(Mode::Zero, false);
    let o_z1 = residual_order(Mode::One, false);
    let pass = o_w0 >= 1.9 && o_z0 >= 1.9 && o_z1 >= 1.9 && t.elapsed().as_secs_f64() < 10.0;
    report(
        3,
        pass,
        t,
        &format!("orders: bubble equation {o_w0:.2}, Z0 mode 0 {o_z0:.2}, w0' mode 1 {o_z1:.2}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_eigenpair() {
    let t = Instant::now();
    let grid = Arc::new(RadialGrid::graded(30.0, 1024, 2.0).unwrap());
    let ks = compute_kernel_set(&grid, 7).unwrap();
    let sq = RadialField::new(
        ks.zeig.grid().clone(),
        ks.zeig.values().iter().map(|v| v * v).collect(),
    )
    .unwrap();
    let norm = radial_quadrature(&sq, 7).unwrap();
    let rate = ks.lambda0.sqrt();
    let slope_rel = (ks.tail_slope + rate).abs() / rate;
    let pass = ks.lambda0 > 0.0
        && (norm - 1.0).abs() <= 1e-10
        && ks.lambda0_agreement <= 1e-6
        && slope_rel <= 0.05
        && t.elapsed().as_secs_f64() < 30.0;
    report(
        4,
        pass,
        t,
        &format!(
            "lambda0 = {:.9} (agreement {:.1e}), norm-1 = {:.1e}, tail slope rel err {:.2}%",
            ks.lambda0,
            ks.lambda0_agreement,
            (norm - 1.0).abs(),
            100.0 * slope_rel
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_attractive_solver() {
    let t = Instant::now();
    let mut pass = true;
    let mut detail = String::new();

    // Constant case exact to 1e-12.
    let model = circle(64, 7, 1.0);
    let p = SingularProblem::new(&model, vec![1.0; 64], vec![4.0; 64], SingularKind::Attractive)
        .unwrap();
    let sol = solve_attractive(&p, 1e-12).unwrap();
    let worst = sol.u.iter().map(|u| (u - 2.0).abs()).fold(0.0f64, f64::max);
    pass &= worst <= 1e-12;
    detail.push_str(&format!("constant |u-2| = {worst:.1e}; "));

    // Monotone decreasing iterates from the upper bracket.
    let n = 64;
    let alpha: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect();
    let p2 = SingularProblem::new(&model, alpha.clone(), vec![1.0; n], SingularKind::Attractive)
        .unwrap();
    let (lo, hi) = bracket_constants(&p2).unwrap();
    let sigma = 1.0 / (lo * lo);
    let coeff: Vec<f64> = alpha.iter().map(|a| a + sigma).collect();
    let mut u = vec![hi; n];
    let mut monotone = true;
    for _ in 0..40 {
        let rhs: Vec<f64> = (0..n)
            .map(|i| 1.0 / u[i].clamp(lo, hi) + sigma * u[i])
            .collect();
        let next = solve_shifted(&model, &coeff, &rhs).unwrap();
        monotone &= (0..n).all(|i| next[i] <= u[i] + 1e-14 * hi);
        u = next;
    }
    pass &= monotone;
    detail.push_str(&format!("monotone iterates: {monotone}; "));

    // Nondegeneracy eigenvalue >= min alpha − 1e-8 for the bundled cases.
    let bundled: Vec<(Vec<f64>, Vec<f64>)> = vec![
        (vec![1.0; n], vec![4.0; n]),
        (vec![2.0; n], vec![3.0; n]),
        (alpha.clone(), vec![1.0; n]),
    ];
    for (a, b) in &bundled {
        let prob = SingularProblem::new(&model, a.clone(), b.clone(), SingularKind::Attractive)
            .unwrap();
        let sol = solve_attractive(&prob, 1e-12).unwrap();
        let min_alpha = a.iter().cloned().fold(f64::INFINITY, f64::min);
        pass &= sol.linearized_eigs[0] >= min_alpha - 1e-8;
    }
    detail.push_str("nondegeneracy bound holds on bundled cases; ");

    // Nonconstant case: observed order >= 1.9 against refined grids.
    let solve_at = |nn: usize| {
        let m = circle(nn, 7, 1.0);
        let a: Vec<f64> = (0..nn)
            .map(|i| 1.0 + 0.5 * (2.0 * PI * i as f64 / nn as f64).cos())
            .collect();
        let prob = SingularProblem::new(&m, a, vec![1.0; nn], SingularKind::Attractive).unwrap();
        solve_attractive(&prob, 1e-12).unwrap().u
    };
    let (u1, u2, u3) = (solve_at(64), solve_at(128), solve_at(256));
    let d12 = (0..64).map(|i| (u1[i] - u2[2 * i]).abs()).fold(0.0f64, f64::max);
    let d23 = (0..128).map(|i| (u2[i] - u3[2 * i]).abs()).fold(0.0f64, f64::max);
    let order = (d12 / d23).log2();
    pass &= order >= 1.9;
    detail.push_str(&format!("refinement order {order:.2}"));

    pass &= t.elapsed().as_secs_f64() < 10.0;
    report(5, pass, t, &detail);
    assert!(pass, "criterion 5: {detail}");
}

#[test]
fn criterion_06_repulsive_solver() {
    let t = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    let n = 64;
    let model = circle(n, 7, 1.0);

    // Constant case u = sqrt(-b/a).
    let p = SingularProblem::new(&model, vec![-1.0; n], vec![4.0; n], SingularKind::Repulsive)
        .unwrap();
    let sol = solve_repulsive(&p, 1e-12, None).unwrap();
    let worst = sol.u.iter().map(|u| (u - 2.0).abs()).fold(0.0f64, f64::max);
    pass &= worst <= 1e-11;
    detail.push_str(&format!("constant |u-2| = {worst:.1e}; "));

    // Integral identity.
    let id = integral_identity(&p, &sol.u);
    pass &= id.abs() <= 1e-8;
    detail.push_str(&format!("integral identity {:.1e}; ", id.abs()));

    // Ten-case window sweep with the model's own spectrum, including the
    // engineered degenerate case 2a = −λ₁.
    let spec: Vec<f64> = {
        let raw = model.laplace_spectrum(16, SpectrumMethod::Stencil);
        let mut distinct: Vec<f64> = Vec::new();
        for lam in raw.into_iter().skip(1) {
            if distinct.last().map_or(true, |l| (lam - l).abs() > 1e-9) {
                distinct.push(lam);
            }
        }
        distinct
    };
    let lam1 = spec[0];
    let two_a_cases = [
        -0.5,
        -1.5,
        -2.0,
        -2.5,
        -3.5,
        -4.5,
        -6.0,
        -8.0,
        -8.8,
        -lam1,
    ];
    let mut sweep_ok = true;
    for &two_a in &two_a_cases {
        let a = two_a / 2.0;
        let prob =
            SingularProblem::new(&model, vec![a; n], vec![1.0; n], SingularKind::Repulsive)
                .unwrap();
        let s = solve_repulsive(&prob, 1e-12, None).unwrap();
        let in_window = spec
            .windows(2)
            .any(|w| -w[1] < two_a && two_a < -w[0]);
        let at_eigenvalue = spec.iter().any(|l| (two_a + l).abs() <= 1e-8);
        if in_window && !s.nondegenerate {
            sweep_ok = false;
        }
        if at_eigenvalue && s.nondegenerate {
            sweep_ok = false;
        }
    }
    pass &= sweep_ok;
    detail.push_str(&format!("window sweep (10 cases incl. 2a = -lambda1): {sweep_ok}"));

    pass &= t.elapsed().as_secs_f64() < 20.0;
    report(6, pass, t, &detail);
    assert!(pass, "criterion 6: {detail}");
}

#[test]
fn criterion_07_jacobi_checks() {
    let t = Instant::now();
    // Flat data: constants in the kernel.
    let flat = circle(48, 5, 1.0);
    let (smin_flat, degen_flat) = flat.jacobi_nondegeneracy().unwrap();
    // Identity-shifted coupling.
    let n = 48;
    let n_codim = 5;
    let mut rm = vec![0.0; n * n_codim * n_codim];
    for node in 0..n {
        for m in 0..n_codim {
            rm[(node * n_codim + m) * n_codim + m] = 1.0;
        }
    }
    let shifted = SubmanifoldModel::new(
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
    let (smin_shift, degen_shift) = shifted.jacobi_nondegeneracy().unwrap();
    let pass = degen_flat
        && !degen_shift
        && (smin_shift - 1.0).abs() <= 1e-3
        && t.elapsed().as_secs_f64() < 5.0;
    report(
        7,
        pass,
        t,
        &format!(
            "flat: sigma_min = {smin_flat:.2e} (degenerate {degen_flat}); \
             identity shift: sigma_min = {smin_shift:.6} (degenerate {degen_shift})"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_linear_solver_uniform_estimate() {
    let t = Instant::now();
    let n_dim = 7;
    let fam = BubbleFamily::new(n_dim).unwrap();
    let bump = |r: f64, c: f64, w: f64| {
        let x: f64 = (r - c) / w;
        if x.abs() < 1.0 {
            (-1.0 / (1.0 - x * x)).exp()
        } else {
            0.0
        }
    };
    let mut ratios = Vec::new();
    for &eps in &[1e-1f64, 3e-2, 1e-2, 3e-3] {
        let r_out = (1.0 / eps.sqrt()).max(8.0);
        let grid = Arc::new(RadialGrid::graded(r_out, 2048, 2.0).unwrap());
        let nodes = grid.nodes();
        let q1: Vec<f64> = nodes.iter().map(|&r| bump(r, 1.0, 0.8)).collect();
        let q2: Vec<f64> = nodes.iter().map(|&r| bump(r, 3.0, 0.8)).collect();
        let z0: Vec<f64> = nodes.iter().map(|&r| fam.z0(r)).collect();
        let c = weighted_inner(nodes, n_dim, &q1, &z0) / weighted_inner(nodes, n_dim, &q2, &z0);
        let q: Vec<f64> = (0..nodes.len()).map(|i| q1[i] - c * q2[i]).collect();
        let pot = RadialField::sample(grid.clone(), |r| {
            fam.linearization_potential(r) + eps
        })
        .unwrap();
        let op = RadialOperator::assemble(Mode::Zero, n_dim, &pot, &grid).unwrap();
        let rhs_full = op.embed(&op.apply_natural(&q));
        let mut h = ModeField::zeros(grid.clone(), n_dim, 1);
        h.m0[0] = rhs_full;
        let spec = WeightedNormSpec::new(5, 0.5, eps, n_dim).unwrap();
        let out = linear_solve(
            &[1.0],
            &h,
            &LinearSolveParams {
                eps,
                ortho_tol: 1e-4,
                norm_spec: spec,
            },
        )
        .unwrap();
        ratios.push(out.norm_ratio);
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
    let pass = hi / lo < 2.0 && t.elapsed().as_secs_f64() < 60.0;
    report(
        8,
        pass,
        t,
        &format!("norm ratios across eps: {ratios:?} (max/min = {:.3})", hi / lo),
    );
    assert!(pass);
}

#[test]
fn criterion_09_projection_suite() {
    let t = Instant::now();
    let mut pass = true;
    let mut detail = String::new();

    // Parity: translation-mode projections of H₁ rebuilt pointwise from the
    // curvature tensors on the bundled curved torus, via the antipodally
    // symmetric cubature.
    let torus = Arc::new(load_geometry(&geometries().join("torus_curved.json")).unwrap());
    let mut params = ConstructionParams::defaults(Criticality::Subcritical, 1e-2);
    params.radial_m = 256;
    let state = build_state(torus.clone(), params, false).unwrap();
    let n_dim = 7;
    let fam = BubbleFamily::new(n_dim).unwrap();
    let pts = sphere_cubature_points(n_dim);
    let g = curvature_g_matrix(&torus, 0);
    let mu = state.mu0.mu0[0];
    let s_sign = -1.0;
    let h0 = torus.h()[0];
    let t1 = |r: f64| {
        r * r * fam.w0_second(r)
            + 2.0 * (1.0 + fam.gamma()) * r * fam.w0_prime(r)
            + fam.gamma() * (1.0 + fam.gamma()) * fam.w0(r)
    };
    let h1_point = |r: f64, omega: &[f64]| -> f64 {
        let a_r = fam.w0_second(r) - fam.w0_prime(r) / r.max(1e-300);
        let b_r = fam.w0_prime(r) / r.max(1e-300);
        let mut t2 = 0.0;
        for i in 0..n_dim {
            for j in 0..n_dim {
                let dd = a_r * omega[i] * omega[j] + if i == j { b_r } else { 0.0 };
                let mut quad = 0.0;
                for m in 0..n_dim {
                    for l in 0..n_dim {
                        quad += torus.r_normal_at(0, m, i, j, l) * omega[m] * omega[l] * r * r;
                    }
                }
                t2 += quad * dd;
            }
        }
        t2 /= 3.0;
        let mut t3 = 0.0;
        for m in 0..n_dim {
            for j in 0..n_dim {
                t3 += g[m * n_dim + j] * r * omega[m] * fam.w0_prime(r) * omega[j];
            }
        }
        mu * mu * (t2 - t3) + mu * mu * h0 * fam.w0(r) - s_sign * fam.w0_p_ln_w0(r)
    };
    let nodes = state.grid.nodes();
    let mut worst_parity = 0.0f64;
    for j in [0usize, 2, 5] {
        let val = concentra_core::quad::radial_quadrature_fn(nodes, n_dim, |r| {
            if r == 0.0 {
                return 0.0;
            }
            pts.iter()
                .map(|(p, w)| w * h1_point(r, p) * fam.w0_prime(r) * p[j])
                .sum::<f64>()
        });
        let scale = concentra_core::quad::radial_quadrature_fn(nodes, n_dim, |r| {
            if r == 0.0 {
                return 0.0;
            }
            pts.iter()
                .map(|(p, w)| (w * h1_point(r, p) * fam.w0_prime(r) * p[j]).abs())
                .sum::<f64>()
        });
        worst_parity = worst_parity.max(val.abs() / scale.max(1e-300));
    }
    pass &= worst_parity <= 1e-10;
    detail.push_str(&format!("parity worst rel = {worst_parity:.1e}; "));

    // Projection budget on the bundled circle geometries at every node.
    for (file, eps) in [
        ("circle_constant.json", 1e-2),
        ("circle_constant.json", 1e-3),
        ("circle_cosine.json", 1e-3),
    ] {
        let model = Arc::new(load_geometry(&geometries().join(file)).unwrap());
        let mut params = ConstructionParams::defaults(Criticality::Subcritical, eps);
        params.radial_m = 2048;
        let state = build_state(model.clone(), params, false).unwrap();
        let c1 = state.ratios.constants.c1;
        let nodes = state.grid.nodes();
        let m = nodes.len() - 1;
        let mut worst_excess = f64::NEG_INFINITY;
        for z in 0..model.n_nodes() {
            let proj = h1_z0_projection(&state.h1, z).unwrap().abs();
            let r_edge = nodes[m - 1];
            let g_edge = (state.h1.m0[z][m - 1] * fam.z0(r_edge)).abs()
                * r_edge.powi(n_dim as i32 - 1)
                * sphere_area(n_dim);
            let tail_bound = 4.0 * g_edge * r_edge / (n_dim as f64 - 4.0);
            worst_excess = worst_excess.max(proj / c1 - (1e-6 + tail_bound / c1));
        }
        pass &= worst_excess <= 0.0;
        detail.push_str(&format!("{file} eps={eps}: budget excess {worst_excess:.1e}; "));
    }

    pass &= t.elapsed().as_secs_f64() < 30.0;
    report(9, pass, t, &detail);
    assert!(pass, "criterion 9: {detail}");
}

#[test]
fn criterion_10_residual_scaling() {
    let t = Instant::now();
    let model = Arc::new(load_geometry(&geometries().join("circle_constant.json")).unwrap());
    let base = ConstructionParams::defaults(Criticality::Subcritical, 1e-2);
    let eps_list = [1e-2, 5e-3, 2e-3, 1e-3];
    let v0 = scaling_study(&model, base, ResidualVersion::V0, &eps_list).unwrap();
    let v1 = scaling_study(&model, base, ResidualVersion::V1, &eps_list).unwrap();
    let below = v0
        .norms
        .iter()
        .zip(v1.norms.iter())
        .all(|(a, b)| b < a);
    let mut pass = (0.85..=1.15).contains(&v1.slope) && below && !v1.non_monotone;

    // Optional, non-gating: the extended second stage. Its measured slope is
    // reported for information; the gate is only on consistency with decay at
    // least ε^{3/2} up to the fit tolerance.
    let mut v2_norms = Vec::new();
    for &eps in &eps_list {
        let params = ConstructionParams { eps, ..base };
        let state = build_state(model.clone(), params, true).unwrap();
        v2_norms.push(extended_second_stage(&state).unwrap().0);
    }
    let xs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = v2_norms.iter().map(|n| n.ln()).collect();
    let nn = xs.len() as f64;
    let (mx, my) = (
        xs.iter().sum::<f64>() / nn,
        ys.iter().sum::<f64>() / nn,
    );
    let slope_v2 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();

    pass &= t.elapsed().as_secs_f64() < 600.0;
    report(
        10,
        pass,
        t,
        &format!(
            "v1 slope {:.4} in [0.85, 1.15]; v1 below v0 at every eps: {below}; \
             v0 slope {:.4}; OPTIONAL extended stage slope {slope_v2:.3} \
             (consistent with at-least-3/2 decay: {})",
            v1.slope,
            v0.slope,
            slope_v2 >= 1.3
        ),
    );
    assert!(pass, "criterion 10 failed");
}

#[test]
fn criterion_11_reproducibility() {
    let t = Instant::now();
    let bin = env!("CARGO_BIN_EXE_concentra");
    let tmp = std::env::temp_dir().join("concentra-acceptance-repro");
    let _ = std::fs::remove_dir_all(&tmp);
    let geometry = geometries().join("circle_constant.json");
    let run = |out: &Path, threads: &str| {
        let status = std::process::Command::new(bin)
            .args([
                "scaling",
                "--geometry",
                geometry.to_str().unwrap(),
                "--version",
                "both",
                "--eps-list",
                "1e-2,5e-3,2e-3,1e-3",
                "--radial-m",
                "1024",
                "--out-dir",
                out.to_str().unwrap(),
            ])
            .env("RAYON_NUM_THREADS", threads)
            .status()
            .expect("binary runs");
        assert!(status.success(), "scaling run failed");
    };
    run(&tmp.join("a"), "4");
    run(&tmp.join("b"), "4");
    run(&tmp.join("c"), "2");
    let mut pass = true;
    for name in ["scaling.csv", "summary.json"] {
        let a = std::fs::read(tmp.join("a").join(name)).unwrap();
        let b = std::fs::read(tmp.join("b").join(name)).unwrap();
        let c = std::fs::read(tmp.join("c").join(name)).unwrap();
        pass &= a == b && a == c;
    }
    report(
        11,
        pass,
        t,
        "byte-identical artifacts across repeated runs and thread counts",
    );
    assert!(pass);
}
