//! JSON geometry input: model kind, node counts, potential field and
//! per-node curvature components. Missing components default to zero.

use crate::error::{Error, Result};
use serde::Deserialize;
use std::path::Path;

use super::{CurvatureData, ModelKind, SubmanifoldModel};

/// A scalar field on the K-grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSpec {
    /// Same value at every node.
    Constant(f64),
    /// Explicit per-node values (node-major, second dimension fastest).
    Values(Vec<f64>),
    /// mean + amplitude · cos(frequency · 2π y_d / ℓ_d) along dimension d.
    Cosine {
        mean: f64,
        amplitude: f64,
        #[serde(default = "one")]
        frequency: u32,
        #[serde(default)]
        dimension: usize,
    },
}

fn one() -> u32 {
    1
}

impl FieldSpec {
    pub fn sample(&self, kind: ModelKind, shape: &[usize]) -> Result<Vec<f64>> {
        let n_nodes: usize = shape.iter().product();
        match self {
            FieldSpec::Constant(constant) => Ok(vec![*constant; n_nodes]),
            FieldSpec::Values(values) => {
                if values.len() != n_nodes {
                    return Err(Error::Geometry(format!(
                        "field has {} values for {} nodes",
                        values.len(),
                        n_nodes
                    )));
                }
                Ok(values.clone())
            }
            FieldSpec::Cosine {
                mean,
                amplitude,
                frequency,
                dimension,
            } => {
                let d = *dimension;
                if d >= shape.len() {
                    return Err(Error::Geometry(format!(
                        "cosine dimension {d} out of range for shape {shape:?}"
                    )));
                }
                let out = (0..n_nodes)
                    .map(|node| {
                        let idx = match kind {
                            ModelKind::Circle { .. } => node,
                            ModelKind::FlatTorus { .. } => {
                                if d == 0 {
                                    node / shape[1]
                                } else {
                                    node % shape[1]
                                }
                            }
                        };
                        let phase = 2.0 * std::f64::consts::PI * *frequency as f64 * idx as f64
                            / shape[d] as f64;
                        mean + amplitude * phase.cos()
                    })
                    .collect();
                Ok(out)
            }
        }
    }
}

/// One tensor component assignment, uniform over nodes.
#[derive(Debug, Clone, Deserialize)]
pub struct TensorEntry {
    pub indices: Vec<usize>,
    pub value: f64,
}

/// A curvature tensor block.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorSpec {
    /// Flat per-node values in the documented index order.
    Values(Vec<f64>),
    /// Node-uniform sparse entries.
    Entries(Vec<TensorEntry>),
    /// Constant-curvature pattern R_{abcd} = c (δ_ac δ_bd − δ_ad δ_bc),
    /// restricted to the stored index groups.
    ConstantCurvature(f64),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureSpec {
    pub r_normal: Option<TensorSpec>,
    pub r_mixed: Option<TensorSpec>,
    pub gtilde: Option<TensorSpec>,
    pub gamma: Option<TensorSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub kind: String,
    #[serde(default)]
    pub length: Option<f64>,
    #[serde(default)]
    pub lengths: Option<[f64; 2]>,
    /// Node count: a single number for the circle, [n1, n2] for the torus.
    pub nodes: serde_json::Value,
    pub codimension: usize,
    pub h: FieldSpec,
    #[serde(default)]
    pub curvature: Option<CurvatureSpec>,
}

fn expand_tensor(
    spec: &TensorSpec,
    n_nodes: usize,
    dims: &[usize],
    pattern: TensorPattern,
) -> Result<Vec<f64>> {
    let per_node: usize = dims.iter().product();
    match spec {
        TensorSpec::Values(values) => {
            if values.len() != n_nodes * per_node {
                return Err(Error::Geometry(format!(
                    "tensor block has {} values, want {}",
                    values.len(),
                    n_nodes * per_node
                )));
            }
            Ok(values.clone())
        }
        TensorSpec::Entries(entries) => {
            let mut out = vec![0.0; n_nodes * per_node];
            for e in entries {
                if e.indices.len() != dims.len() {
                    return Err(Error::Geometry(format!(
                        "tensor entry has {} indices, want {}",
                        e.indices.len(),
                        dims.len()
                    )));
                }
                let mut flat = 0;
                for (ix, (&i, &d)) in e.indices.iter().zip(dims.iter()).enumerate() {
                    if i >= d {
                        return Err(Error::Geometry(format!(
                            "tensor index {i} out of range {d} at position {ix}"
                        )));
                    }
                    flat = flat * d + i;
                }
                for node in 0..n_nodes {
                    out[node * per_node + flat] = e.value;
                }
            }
            Ok(out)
        }
        TensorSpec::ConstantCurvature(constant_curvature) => {
            let c = *constant_curvature;
            let mut out = vec![0.0; n_nodes * per_node];
            match pattern {
                TensorPattern::Normal4 => {
                    let n = dims[0];
                    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                    for node in 0..n_nodes {
                        for m in 0..n {
                            for i in 0..n {
                                for j in 0..n {
                                    for l in 0..n {
                                        out[node * per_node + ((m * n + i) * n + j) * n + l] =
                                            c * (d(m, j) * d(i, l) - d(m, l) * d(i, j));
                                    }
                                }
                            }
                        }
                    }
                }
                TensorPattern::Mixed => {
                    // R_{mabj} = c(δ_mb δ_aj − δ_mj δ_ab): the first delta
                    // never fires across index groups, leaving −c δ_mj δ_ab.
                    let (n, k) = (dims[0], dims[1]);
                    for node in 0..n_nodes {
                        for m in 0..n {
                            for a in 0..k {
                                for b in 0..k {
                                    for j in 0..n {
                                        if m == j && a == b {
                                            out[node * per_node
                                                + ((m * k + a) * k + b) * n
                                                + j] = -c;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                TensorPattern::Other => {
                    return Err(Error::Geometry(
                        "constant_curvature applies to r_normal and r_mixed only".into(),
                    ));
                }
            }
            Ok(out)
        }
    }
}

#[derive(Clone, Copy)]
enum TensorPattern {
    Normal4,
    Mixed,
    Other,
}

impl GeometrySpec {
    pub fn build(&self) -> Result<SubmanifoldModel> {
        let kind = match self.kind.as_str() {
            "circle" => {
                let length = self.length.ok_or_else(|| {
                    Error::Geometry("circle geometry needs a `length` field".into())
                })?;
                ModelKind::Circle { length }
            }
            "flat_torus" => {
                let lengths = self.lengths.ok_or_else(|| {
                    Error::Geometry("flat_torus geometry needs a `lengths` field".into())
                })?;
                ModelKind::FlatTorus { lengths }
            }
            other => {
                return Err(Error::Geometry(format!(
                    "unknown geometry kind `{other}` (expected `circle` or `flat_torus`)"
                )));
            }
        };
        let shape: Vec<usize> = match (&kind, &self.nodes) {
            (ModelKind::Circle { .. }, serde_json::Value::Number(n)) => {
                vec![n.as_u64().ok_or_else(|| {
                    Error::Geometry("`nodes` must be a positive integer".into())
                })? as usize]
            }
            (ModelKind::FlatTorus { .. }, serde_json::Value::Array(a)) if a.len() == 2 => a
                .iter()
                .map(|v| {
                    v.as_u64()
                        .map(|x| x as usize)
                        .ok_or_else(|| Error::Geometry("`nodes` entries must be integers".into()))
                })
                .collect::<Result<Vec<usize>>>()?,
            _ => {
                return Err(Error::Geometry(
                    "`nodes` must be an integer (circle) or a pair (flat_torus)".into(),
                ));
            }
        };
        let n_nodes: usize = shape.iter().product();
        let n = self.codimension;
        let k = shape.len();
        let h = self.h.sample(kind, &shape)?;
        let curvature = match &self.curvature {
            None => CurvatureData::default(),
            Some(spec) => CurvatureData {
                r_normal: spec
                    .r_normal
                    .as_ref()
                    .map(|t| expand_tensor(t, n_nodes, &[n, n, n, n], TensorPattern::Normal4))
                    .transpose()?,
                r_mixed: spec
                    .r_mixed
                    .as_ref()
                    .map(|t| expand_tensor(t, n_nodes, &[n, k, k, n], TensorPattern::Mixed))
                    .transpose()?,
                gtilde: spec
                    .gtilde
                    .as_ref()
                    .map(|t| expand_tensor(t, n_nodes, &[k, k], TensorPattern::Other))
                    .transpose()?,
                gamma: spec
                    .gamma
                    .as_ref()
                    .map(|t| expand_tensor(t, n_nodes, &[k, n, k], TensorPattern::Other))
                    .transpose()?,
            },
        };
        SubmanifoldModel::new(kind, shape, n, h, curvature)
    }
}

/// Load and build a model from a JSON geometry file.
pub fn load_geometry(path: &Path) -> Result<SubmanifoldModel> {
    let text = std::fs::read_to_string(path)?;
    let spec: GeometrySpec = serde_json::from_str(&text)?;
    spec.build()
}

/// Parse a geometry spec from a JSON string.
pub fn parse_geometry(text: &str) -> Result<SubmanifoldModel> {
    let spec: GeometrySpec = serde_json::from_str(text)?;
    spec.build()
}
