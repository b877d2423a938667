//! Solvers and nondegeneracy certificates for the singular reduced equations
//! on a model submanifold K:
//!
//!   attractive:  −Δ_K u + α u − β/u = 0,  u > 0,  min α > 0, min β > 0,
//!   repulsive:   −Δ_K u + α u + β/u = 0,  u > 0,  min β > 0.
//!
//! The attractive problem is solved by bracketed monotone iteration (the
//! constructive counterpart of the sub/supersolution argument) with a Newton
//! polish; the repulsive one by damped Newton with a positivity floor, plus a
//! coefficient homotopy when the data is nonconstant. Nondegeneracy is
//! certified through the spectrum of the linearized operator.

use crate::error::{Error, Result};
use crate::manifold::SubmanifoldModel;
use nalgebra::DVector;
use std::f64::consts::PI;

/// Sign of the singular term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularKind {
    /// −β/u.
    Attractive,
    /// +β/u.
    Repulsive,
}

/// Problem data on a model submanifold.
#[derive(Debug, Clone)]
pub struct SingularProblem<'a> {
    pub model: &'a SubmanifoldModel,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub kind: SingularKind,
}

impl<'a> SingularProblem<'a> {
    pub fn new(
        model: &'a SubmanifoldModel,
        alpha: Vec<f64>,
        beta: Vec<f64>,
        kind: SingularKind,
    ) -> Result<Self> {
        let n = model.n_nodes();
        if alpha.len() != n || beta.len() != n {
            return Err(Error::InvalidConfig(format!(
                "coefficient fields must have {n} samples"
            )));
        }
        let min_beta = beta.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min_beta > 0.0) {
            return Err(Error::Precondition(format!(
                "min beta = {min_beta} must be positive"
            )));
        }
        if kind == SingularKind::Attractive {
            let min_alpha = alpha.iter().cloned().fold(f64::INFINITY, f64::min);
            if !(min_alpha > 0.0) {
                return Err(Error::Precondition(format!(
                    "attractive problem needs min alpha > 0, got {min_alpha}"
                )));
            }
        }
        Ok(Self {
            model,
            alpha,
            beta,
            kind,
        })
    }

    fn sign(&self) -> f64 {
        match self.kind {
            SingularKind::Attractive => -1.0,
            SingularKind::Repulsive => 1.0,
        }
    }
}

/// Converged solution with its certificates.
#[derive(Debug, Clone)]
pub struct SingularSolution {
    pub u: Vec<f64>,
    pub residual_norm: f64,
    pub nondegenerate: bool,
    /// Smallest few eigenvalues of the linearization −Δ_K + (α ∓ β/u²).
    pub linearized_eigs: Vec<f64>,
}

/// Constant sub/supersolution bracket for the attractive problem:
/// c = 0.5·min √(β/α), C = 2·max √(β/α).
pub fn bracket_constants(problem: &SingularProblem) -> Result<(f64, f64)> {
    if problem.kind != SingularKind::Attractive {
        return Err(Error::Precondition(
            "bracket constants are defined for the attractive problem".into(),
        ));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (a, b) in problem.alpha.iter().zip(problem.beta.iter()) {
        let bal = (b / a).sqrt();
        lo = lo.min(bal);
        hi = hi.max(bal);
    }
    Ok((0.5 * lo, 2.0 * hi))
}

/// Solve (−Δ_K + diag(coeff)) x = rhs by dense LU.
pub fn solve_shifted(model: &SubmanifoldModel, coeff: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = model.n_nodes();
    if n > 4096 {
        return Err(Error::InvalidConfig(format!(
            "dense K-space solve guard: {n} nodes"
        )));
    }
    let mut m = model.minus_laplacian_matrix();
    for i in 0..n {
        m[(i, i)] += coeff[i];
    }
    let lu = m.lu();
    lu.solve(&DVector::from_column_slice(rhs))
        .map(|v| v.as_slice().to_vec())
        .ok_or_else(|| Error::SolverFailure("singular K-space linear system".into()))
}

fn equation_residual(problem: &SingularProblem, u: &[f64]) -> Vec<f64> {
    let lap = problem.model.minus_laplacian(u);
    let s = problem.sign();
    (0..u.len())
        .map(|i| lap[i] + problem.alpha[i] * u[i] + s * problem.beta[i] / u[i])
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Smallest `count` eigenvalues of −Δ_K + diag(potential).
pub fn linearization_eigs(model: &SubmanifoldModel, potential: &[f64], count: usize) -> Vec<f64> {
    let n = model.n_nodes();
    let mut m = model.minus_laplacian_matrix();
    for i in 0..n {
        m[(i, i)] += potential[i];
    }
    let mut eigs: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().cloned().collect();
    eigs.sort_by(|a, b| a.total_cmp(b));
    eigs.truncate(count);
    eigs
}

/// Newton with damping and a positivity floor; drives the residual max norm
/// below `tol`.
fn newton_polish(
    problem: &SingularProblem,
    mut u: Vec<f64>,
    tol: f64,
    floor: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64)> {
    let s = problem.sign();
    // The discrete residual cannot beat the stencil's rounding floor.
    let stencil_scale: f64 = problem
        .model
        .steps()
        .iter()
        .map(|h| 4.0 / (h * h))
        .sum::<f64>()
        + max_abs(&problem.alpha)
        + max_abs(&problem.beta);
    let tol = tol.max(16.0 * f64::EPSILON * stencil_scale);
    let mut res = equation_residual(problem, &u);
    let mut rnorm = max_abs(&res);
    for _ in 0..max_iter {
        if rnorm <= tol {
            return Ok((u, rnorm));
        }
        // J = −Δ + α ∓ β/u² (the derivative of ±β/u is ∓β/u²).
        let coeff: Vec<f64> = (0..u.len())
            .map(|i| problem.alpha[i] - s * problem.beta[i] / (u[i] * u[i]))
            .collect();
        let neg_res: Vec<f64> = res.iter().map(|r| -r).collect();
        let step = solve_shifted(problem.model, &coeff, &neg_res)?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            if trial.iter().all(|&x| x > floor) {
                let tres = equation_residual(problem, &trial);
                let tnorm = max_abs(&tres);
                if tnorm < rnorm || t < 1e-6 {
                    u = trial;
                    res = tres;
                    rnorm = tnorm;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::PositivityViolation(format!(
                    "Newton step cannot stay above the positivity floor {floor:.3e}"
                )));
            }
        }
    }
    if rnorm <= tol {
        Ok((u, rnorm))
    } else {
        Err(Error::SolverFailure(format!(
            "Newton stagnated at residual {rnorm:.3e} (tol {tol:.1e})"
        )))
    }
}

/// Monotone iteration from the upper bracket, then Newton polish.
///
/// Each step solves the coercive problem L_σ(u_{n+1}) = β/u_n + σ u_n with
/// the shift σ = max β/c² that makes the right-hand side monotone increasing
/// in u on the bracket [c, C]; iterates then decrease pointwise from the
/// constant supersolution. The singular-term argument is clamped to the
/// bracket as in the modified problem.
pub fn solve_attractive(problem: &SingularProblem, tol: f64) -> Result<SingularSolution> {
    if problem.kind != SingularKind::Attractive {
        return Err(Error::Precondition(
            "solve_attractive needs an attractive problem".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive".into()));
    }
    let (lo, hi) = bracket_constants(problem)?;
    let n = problem.model.n_nodes();
    if n > 4096 {
        return Err(Error::InvalidConfig(format!(
            "dense K-space solve guard: {n} nodes"
        )));
    }
    let sigma = problem
        .beta
        .iter()
        .map(|b| b / (lo * lo))
        .fold(0.0f64, f64::max);

    // The shifted operator is fixed along the iteration: factor once.
    let mut mat = problem.model.minus_laplacian_matrix();
    for i in 0..n {
        mat[(i, i)] += problem.alpha[i] + sigma;
    }
    let lu = mat.lu();

    let mut u = vec![hi; n];
    for _ in 0..400 {
        let rhs: Vec<f64> = (0..n)
            .map(|i| problem.beta[i] / u[i].clamp(lo, hi) + sigma * u[i])
            .collect();
        let next = lu
            .solve(&DVector::from_column_slice(&rhs))
            .map(|v| v.as_slice().to_vec())
            .ok_or_else(|| Error::SolverFailure("monotone iteration linear system".into()))?;
        let mut delta = 0.0f64;
        for i in 0..n {
            if next[i] > u[i] + 1e-12 * hi {
                return Err(Error::SolverFailure(format!(
                    "monotone iteration increased at node {i}: {} -> {}",
                    u[i], next[i]
                )));
            }
            if !(next[i] > 0.0) {
                return Err(Error::PositivityViolation(format!(
                    "iterate non-positive at node {i}"
                )));
            }
            if next[i] < lo - 1e-9 * hi || next[i] > hi + 1e-9 * hi {
                return Err(Error::SolverFailure(format!(
                    "iterate escaped the bracket [{lo}, {hi}] at node {i}: {}",
                    next[i]
                )));
            }
            delta = delta.max((next[i] - u[i]).abs());
        }
        u = next;
        if delta <= 1e-6 * hi {
            break;
        }
    }
    let floor = 1e-8 * lo;
    let (u, rnorm) = newton_polish(problem, u, tol, floor, 30)?;

    // Certificate: −Δ + (α + β/u²) has strictly positive spectrum here.
    let potential: Vec<f64> = (0..n)
        .map(|i| problem.alpha[i] + problem.beta[i] / (u[i] * u[i]))
        .collect();
    let eigs = linearization_eigs(problem.model, &potential, 6);
    if !(eigs[0] > 0.0) {
        return Err(Error::Degenerate(format!(
            "attractive linearization has nonpositive smallest eigenvalue {:.3e}; \
             this contradicts strict positivity of the potential and flags a bug",
            eigs[0]
        )));
    }
    Ok(SingularSolution {
        u,
        residual_norm: rnorm,
        nondegenerate: true,
        linearized_eigs: eigs,
    })
}

/// Nondegeneracy certificate for a converged attractive solution.
pub fn certify_attractive_nondegeneracy(
    problem: &SingularProblem,
    solution: &SingularSolution,
) -> Result<Vec<f64>> {
    let n = problem.model.n_nodes();
    let potential: Vec<f64> = (0..n)
        .map(|i| problem.alpha[i] + problem.beta[i] / (solution.u[i] * solution.u[i]))
        .collect();
    let eigs = linearization_eigs(problem.model, &potential, 6);
    if !(eigs[0] > 0.0) {
        return Err(Error::Degenerate(format!(
            "smallest linearization eigenvalue {:.3e} is not positive",
            eigs[0]
        )));
    }
    Ok(eigs)
}

/// Feasibility diagnostics for the repulsive problem. Integrating the
/// equation over K forces ∫ α u = −∫ β/u < 0, so α must be negative
/// somewhere; this is necessary, not sufficient.
#[derive(Debug, Clone, Copy)]
pub struct RepulsiveFeasibility {
    pub feasible: bool,
    pub min_alpha: f64,
}

pub fn repulsive_feasibility(problem: &SingularProblem) -> RepulsiveFeasibility {
    let min_alpha = problem.alpha.iter().cloned().fold(f64::INFINITY, f64::min);
    RepulsiveFeasibility {
        feasible: min_alpha < 0.0,
        min_alpha,
    }
}

/// The circle-length window condition:
/// −((κ+1)π/(2ℓ))² < max α < −(κπ/(2ℓ))² < 0 for an integer κ ≥ 1.
pub fn window_check(length: f64, alpha_max: f64, kappa: u32) -> Result<bool> {
    if !(length > 0.0) {
        return Err(Error::InvalidConfig("length must be positive".into()));
    }
    if kappa < 1 {
        return Err(Error::InvalidConfig("kappa must be at least 1".into()));
    }
    let lower = -((kappa as f64 + 1.0) * PI / (2.0 * length)).powi(2);
    let upper = -(kappa as f64 * PI / (2.0 * length)).powi(2);
    Ok(lower < alpha_max && alpha_max < upper && upper < 0.0)
}

/// Damped Newton with positivity safeguarding for the repulsive problem.
///
/// Constant coefficients start from the exact balance u ≡ √(−b/a); otherwise
/// the solve starts from the supplied seed or the averaged-coefficient
/// constant and continues along the homotopy α_t = (1−t)·ᾱ + t·α with steps
/// of 0.1, halved on failure. Nondegeneracy is certified from the spectrum of
/// −Δ_K + (α − β/u²); failure to converge is reported as no-solution-found,
/// which is not a proof of nonexistence.
pub fn solve_repulsive(
    problem: &SingularProblem,
    tol: f64,
    seed: Option<&[f64]>,
) -> Result<SingularSolution> {
    if problem.kind != SingularKind::Repulsive {
        return Err(Error::Precondition(
            "solve_repulsive needs a repulsive problem".into(),
        ));
    }
    let n = problem.model.n_nodes();
    let feas = repulsive_feasibility(problem);
    if !feas.feasible {
        return Err(Error::NoSolutionFound(format!(
            "min alpha = {:.6} >= 0, but a solution requires alpha < 0 somewhere",
            feas.min_alpha
        )));
    }

    let spread = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let scale = max_abs(&problem.alpha).max(max_abs(&problem.beta));
    let constant_data =
        spread(&problem.alpha) <= 1e-13 * scale && spread(&problem.beta) <= 1e-13 * scale;

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let a_bar = mean(&problem.alpha);
    let b_bar = mean(&problem.beta);

    let u = if constant_data {
        let a = problem.alpha[0];
        let b = problem.beta[0];
        if !(a < 0.0) {
            return Err(Error::NoSolutionFound(format!(
                "constant repulsive data needs a < 0, got {a}"
            )));
        }
        let start = vec![(-b / a).sqrt(); n];
        let floor = 1e-8 * (-b / a).sqrt();
        newton_polish(problem, start, tol, floor, 50)?.0
    } else {
        let mut current: Vec<f64> = match seed {
            Some(s) => {
                if s.len() != n {
                    return Err(Error::InvalidConfig("seed field has wrong length".into()));
                }
                s.to_vec()
            }
            None => {
                if !(a_bar < 0.0) {
                    return Err(Error::NoSolutionFound(format!(
                        "averaged coefficient {a_bar:.6} is not negative; \
                         supply a seed to start the homotopy"
                    )));
                }
                vec![(-b_bar / a_bar).sqrt(); n]
            }
        };
        let floor = 1e-8 * current.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut t = 0.0f64;
        let mut dt = 0.1f64;
        while t < 1.0 {
            let t_next = (t + dt).min(1.0);
            let alpha_t: Vec<f64> = problem
                .alpha
                .iter()
                .map(|a| (1.0 - t_next) * a_bar + t_next * a)
                .collect();
            let sub = SingularProblem {
                model: problem.model,
                alpha: alpha_t,
                beta: problem.beta.clone(),
                kind: SingularKind::Repulsive,
            };
            match newton_polish(&sub, current.clone(), tol, floor, 40) {
                Ok((u_t, _)) => {
                    current = u_t;
                    t = t_next;
                    dt = (dt * 1.5).min(0.1);
                }
                Err(_) => {
                    dt *= 0.5;
                    if dt < 1.0 / 64.0 {
                        return Err(Error::NoSolutionFound(format!(
                            "homotopy stalled at t = {t:.3}; Newton could not continue"
                        )));
                    }
                }
            }
        }
        current
    };

    let res = equation_residual(problem, &u);
    let rnorm = max_abs(&res);
    let potential: Vec<f64> = (0..n)
        .map(|i| problem.alpha[i] - problem.beta[i] / (u[i] * u[i]))
        .collect();
    let eigs = linearization_eigs(problem.model, &potential, 8);
    let nondegenerate = eigs.iter().all(|e| e.abs() > 1e-8);
    Ok(SingularSolution {
        u,
        residual_norm: rnorm,
        nondegenerate,
        linearized_eigs: eigs,
    })
}

/// ∫_K (α u ± β/u) dy by the periodic trapezoid rule (exact node weights on
/// a uniform periodic grid); vanishes for any solution.
pub fn integral_identity(problem: &SingularProblem, u: &[f64]) -> f64 {
    let s = problem.sign();
    let cell: f64 = problem.model.steps().iter().product();
    let mut acc = 0.0;
    for i in 0..u.len() {
        acc += (problem.alpha[i] * u[i] + s * problem.beta[i] / u[i]) * cell;
    }
    acc
}
