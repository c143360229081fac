//! High-temperature edge weights `x_e` and their parametrizations.

use crate::error::{Error, Result};
use crate::toric_graph::ToricGraph;

/// Per-edge weights `x_e`, optionally remembering the `(beta, J)` pair they
/// came from. Weights live in `[0, 1]`; operations with stricter needs (the
/// rectangle construction, dual weights) check their own range.
#[derive(Clone, Debug)]
pub struct WeightSystem {
    x: Vec<f64>,
    provenance: Option<(f64, Vec<f64>)>,
}

impl WeightSystem {
    /// `x_e = tanh(beta * J_e)` with the couplings stored on the graph.
    pub fn from_beta(g: &ToricGraph, beta: f64) -> Self {
        Self::from_beta_couplings(&g.couplings(), beta)
    }

    pub fn from_beta_couplings(couplings: &[f64], beta: f64) -> Self {
        WeightSystem {
            x: couplings.iter().map(|j| (beta * j).tanh()).collect(),
            provenance: Some((beta, couplings.to_vec())),
        }
    }

    pub fn from_x(x: Vec<f64>) -> Result<Self> {
        for &v in &x {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(Error::InvalidWeight(v));
            }
        }
        Ok(WeightSystem {
            x,
            provenance: None,
        })
    }

    /// `x_e = tan(theta_e / 2)` with `theta_e` in `(0, pi/2)`.
    pub fn from_theta(theta: &[f64]) -> Result<Self> {
        for &t in theta {
            if !(t > 0.0 && t < std::f64::consts::FRAC_PI_2) {
                return Err(Error::InvalidWeight(t));
            }
        }
        Ok(WeightSystem {
            x: theta.iter().map(|t| (t / 2.0).tan()).collect(),
            provenance: None,
        })
    }

    pub fn uniform(len: usize, x: f64) -> Result<Self> {
        Self::from_x(vec![x; len])
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self, edge: usize) -> f64 {
        self.x[edge]
    }

    pub fn xs(&self) -> &[f64] {
        &self.x
    }

    /// Half-rhombus angle `theta_e = 2 atan(x_e)`.
    pub fn theta(&self, edge: usize) -> f64 {
        2.0 * self.x[edge].atan()
    }

    pub fn provenance(&self) -> Option<(f64, &[f64])> {
        self.provenance.as_ref().map(|(b, j)| (*b, j.as_slice()))
    }

    /// True when every weight lies strictly inside `(0, 1)`.
    pub fn strictly_interior(&self) -> bool {
        self.x.iter().all(|&v| v > 0.0 && v < 1.0)
    }

    /// Pointwise scaling `t * x`, used by sign tracking along a ray.
    pub fn scaled(&self, t: f64) -> Self {
        WeightSystem {
            x: self.x.iter().map(|v| t * v).collect(),
            provenance: None,
        }
    }
}
