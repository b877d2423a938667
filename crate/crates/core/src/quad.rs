//! Radial quadrature for integrals over ℝ^N.
//!
//! ∫_{ℝ^N} f(|ξ|) dξ = |S^{N-1}| ∫_0^∞ f(r) r^{N-1} dr, truncated at R_out
//! and evaluated by the composite trapezoid rule on the graded grid.
//! Summation is strictly left to right so results are bit-reproducible.

use crate::error::{Error, Result};
use crate::grid::RadialField;

/// Γ(n/2) for integer n ≥ 1.
pub fn gamma_half(n: usize) -> f64 {
    assert!(n >= 1, "gamma_half needs n >= 1");
    // Γ(1/2) = √π, Γ(1) = 1, Γ(x+1) = x Γ(x).
    let mut x = if n % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut k = if n % 2 == 0 { 2 } else { 1 };
    while k < n {
        x *= k as f64 / 2.0;
        k += 2;
    }
    x
}

/// Surface area of the unit sphere S^{N-1}: 2 π^{N/2} / Γ(N/2).
pub fn sphere_area(n_dim: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(n_dim as f64 / 2.0) / gamma_half(n_dim)
}

/// Trapezoid value of ∫_0^{R_out} g(r) dr for sampled g.
fn trapezoid(nodes: &[f64], g: impl Fn(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..nodes.len() - 1 {
        let h = nodes[i + 1] - nodes[i];
        acc += 0.5 * h * (g(i) + g(i + 1));
    }
    acc
}

/// ∫_{ℝ^N} f(|ξ|) dξ truncated at the grid's outer radius.
pub fn radial_quadrature(f: &RadialField, n_dim: usize) -> Result<f64> {
    if n_dim < 2 {
        return Err(Error::InvalidConfig(format!(
            "radial quadrature needs dimension >= 2, got {n_dim}"
        )));
    }
    let nodes = f.grid().nodes();
    let v = f.values();
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidField(format!(
            "non-finite sample at node {i} in quadrature input"
        )));
    }
    let p = (n_dim - 1) as i32;
    Ok(sphere_area(n_dim) * trapezoid(nodes, |i| v[i] * nodes[i].powi(p)))
}

/// Same rule applied to a closed-form integrand, avoiding field allocation.
pub fn radial_quadrature_fn<F: Fn(f64) -> f64>(
    nodes: &[f64],
    n_dim: usize,
    f: F,
) -> f64 {
    let p = (n_dim - 1) as i32;
    sphere_area(n_dim) * trapezoid(nodes, |i| f(nodes[i]) * nodes[i].powi(p))
}

/// Weighted inner product ⟨f, g⟩ = ∫_{ℝ^N} f g dξ for sampled radial profiles.
pub fn weighted_inner(nodes: &[f64], n_dim: usize, f: &[f64], g: &[f64]) -> f64 {
    let p = (n_dim - 1) as i32;
    let mut acc = 0.0;
    for i in 0..nodes.len() - 1 {
        let h = nodes[i + 1] - nodes[i];
        let a = f[i] * g[i] * nodes[i].powi(p);
        let b = f[i + 1] * g[i + 1] * nodes[i + 1].powi(p);
        acc += 0.5 * h * (a + b);
    }
    sphere_area(n_dim) * acc
}
