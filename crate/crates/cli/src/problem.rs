//! Problem files for the singular solves: a geometry (inline or by path)
//! plus coefficient field specs.

use concentra_core::manifold::geometry::{FieldSpec, GeometrySpec};
use concentra_core::manifold::SubmanifoldModel;
use concentra_core::{Error, Result};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GeometryRef {
    Path(String),
    Inline(GeometrySpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub geometry: GeometryRef,
    pub alpha: FieldSpec,
    pub beta: FieldSpec,
}

pub struct LoadedProblem {
    pub model: SubmanifoldModel,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

pub fn load_problem(path: &Path) -> Result<LoadedProblem> {
    let text = std::fs::read_to_string(path)?;
    let spec: ProblemSpec = serde_json::from_str(&text)?;
    let geometry = match &spec.geometry {
        GeometryRef::Inline(g) => g.clone(),
        GeometryRef::Path(rel) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            let gtext = std::fs::read_to_string(base.join(rel))?;
            serde_json::from_str(&gtext)?
        }
    };
    let model = geometry.build()?;
    let kind = model.kind();
    let shape = model.shape().to_vec();
    let alpha = spec.alpha.sample(kind, &shape)?;
    let beta = spec.beta.sample(kind, &shape)?;
    if alpha.len() != model.n_nodes() || beta.len() != model.n_nodes() {
        return Err(Error::InvalidConfig(
            "coefficient fields must match the geometry's node count".into(),
        ));
    }
    Ok(LoadedProblem { model, alpha, beta })
}
