//! Graded radial grids and sampled radial fields.
//!
//! The transverse domain is the ball |ξ| < R_out; everything radial lives on
//! nodes 0 = r_0 < r_1 < … < r_M = R_out with power-law clustering near the
//! origin, r_i = R_out (i/M)^s.

use crate::error::{Error, Result};
use std::sync::Arc;

/// Radial grid on [0, R_out] with power-law grading.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    grading: f64,
    r_out: f64,
}

impl RadialGrid {
    /// Graded grid r_i = r_out (i/m)^grading, i = 0..=m.
    pub fn graded(r_out: f64, m: usize, grading: f64) -> Result<Self> {
        if !(r_out > 1.0) {
            return Err(Error::InvalidGrid(format!("r_out = {r_out} must exceed 1")));
        }
        if m < 64 {
            return Err(Error::InvalidGrid(format!("m = {m} must be at least 64")));
        }
        if !(grading >= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "grading = {grading} must be at least 1"
            )));
        }
        let nodes = (0..=m)
            .map(|i| r_out * (i as f64 / m as f64).powf(grading))
            .collect();
        Ok(Self {
            nodes,
            grading,
            r_out,
        })
    }

    /// Same extent and grading, twice the node count.
    pub fn refined(&self) -> Self {
        Self::graded(self.r_out, 2 * self.intervals(), self.grading)
            .expect("refinement of a valid grid is valid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of intervals M (nodes are 0..=M).
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    /// Interface radius between nodes i and i+1 (arithmetic midpoint).
    pub fn interface(&self, i: usize) -> f64 {
        0.5 * (self.nodes[i] + self.nodes[i + 1])
    }
}

/// Real samples of a radial function on a shared grid.
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes().len() {
            return Err(Error::InvalidField(format!(
                "value count {} does not match node count {}",
                values.len(),
                grid.nodes().len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "non-finite sample {} at node {i}",
                values[i]
            )));
        }
        Ok(Self { grid, values })
    }

    /// Sample a closed-form radial function.
    pub fn sample<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.nodes().len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}
