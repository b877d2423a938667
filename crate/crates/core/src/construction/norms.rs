//! Weighted sup norms measuring transverse polynomial decay,
//! ‖w‖_{ε,r} = sup (1+|ξ|²)^{r/2} |w|, with the optional local Hölder
//! seminorm variant over unit-distance node pairs.

use crate::error::{Error, Result};
use crate::grid::RadialField;

use super::modes::ModeField;

/// Parameters of the weighted norm: decay exponent r (4 < r < N), Hölder
/// exponent σ ∈ (0,1), scaling parameter ε ∈ (0,1).
#[derive(Debug, Clone, Copy)]
pub struct WeightedNormSpec {
    pub r: u32,
    pub sigma: f64,
    pub eps: f64,
    pub n_dim: usize,
}

impl WeightedNormSpec {
    pub fn new(r: u32, sigma: f64, eps: f64, n_dim: usize) -> Result<Self> {
        if !(4 < r && (r as usize) < n_dim) {
            return Err(Error::InvalidConfig(format!(
                "weight exponent r = {r} must satisfy 4 < r < N = {n_dim}"
            )));
        }
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sigma = {sigma} must lie in (0, 1)"
            )));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "eps = {eps} must lie in (0, 1)"
            )));
        }
        Ok(Self {
            r,
            sigma,
            eps,
            n_dim,
        })
    }

    fn weight(&self, radius: f64, extra: f64) -> f64 {
        (1.0 + radius * radius).powf((self.r as f64 + extra) / 2.0)
    }
}

/// Sup norm of a radial (mode-0) field.
pub fn weighted_norm_radial(field: &RadialField, spec: &WeightedNormSpec) -> f64 {
    field
        .grid()
        .nodes()
        .iter()
        .zip(field.values().iter())
        .map(|(&r, &v)| spec.weight(r, 0.0) * v.abs())
        .fold(0.0, f64::max)
}

/// Sup norm of a mode field: the pointwise bound combines the mode-0 value,
/// the ℓ² norm of the mode-1 component vector (sharp over directions) and the
/// spectral radius of the mode-2 direction.
pub fn weighted_norm_field(field: &ModeField, spec: &WeightedNormSpec) -> f64 {
    let nodes = field.grid.nodes();
    let mut worst = 0.0f64;
    for z in 0..field.n_nodes() {
        let m2_bound = field.m2_direction_bound(z);
        for (i, &r) in nodes.iter().enumerate() {
            let mut s = field.m0[z][i].abs();
            if let Some(m1) = &field.m1 {
                s += m1[z]
                    .iter()
                    .map(|c| c[i] * c[i])
                    .sum::<f64>()
                    .sqrt();
            }
            if let Some(m2) = &field.m2 {
                s += m2_bound * m2.profile[z][i].abs();
            }
            worst = worst.max(spec.weight(r, 0.0) * s);
        }
    }
    worst
}

/// Discrete Hölder seminorm of one radial profile over node pairs within unit
/// distance, weighted at (1+r²)^{(r+σ)/2}.
fn holder_profile(nodes: &[f64], values: &[f64], spec: &WeightedNormSpec) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..nodes.len() {
        let mut local = 0.0f64;
        let mut j = i + 1;
        while j < nodes.len() && nodes[j] - nodes[i] <= 1.0 {
            let d = nodes[j] - nodes[i];
            if d > 0.0 {
                local = local.max((values[j] - values[i]).abs() / d.powf(spec.sigma));
            }
            j += 1;
        }
        worst = worst.max(spec.weight(nodes[i], spec.sigma) * local);
    }
    worst
}

/// ‖w‖_{ε,r,σ} = ‖w‖_{ε,r} + weighted local Hölder seminorm, applied to each
/// stored profile.
pub fn weighted_norm_holder(field: &ModeField, spec: &WeightedNormSpec) -> f64 {
    let nodes = field.grid.nodes();
    let mut semi = 0.0f64;
    for z in 0..field.n_nodes() {
        semi = semi.max(holder_profile(nodes, &field.m0[z], spec));
        if let Some(m1) = &field.m1 {
            for c in &m1[z] {
                semi = semi.max(holder_profile(nodes, c, spec));
            }
        }
        if let Some(m2) = &field.m2 {
            let b = field.m2_direction_bound(z);
            let scaled: Vec<f64> = m2.profile[z].iter().map(|v| v * b).collect();
            semi = semi.max(holder_profile(nodes, &scaled, spec));
        }
    }
    weighted_norm_field(field, spec) + semi
}
