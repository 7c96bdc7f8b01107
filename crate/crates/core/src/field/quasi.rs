use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::trig::{Extrema, SupSampler, TrigPolynomial};
use crate::field::WindingMatrix;

/// A vector-valued quasiperiodic function `f(x) = F(M x)`, one trigonometric
/// polynomial per component, all sharing the winding matrix.
///
/// Sup norms of vector values are the max over components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiField {
    winding: WindingMatrix,
    components: Vec<TrigPolynomial>,
}

impl QuasiField {
    pub fn new(winding: WindingMatrix, components: Vec<TrigPolynomial>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("field needs at least one component"));
        }
        if components
            .iter()
            .any(|c| c.torus_dim() != winding.torus_dim())
        {
            return Err(invalid(
                "component torus dimension does not match winding matrix",
            ));
        }
        Ok(Self {
            winding,
            components,
        })
    }

    pub fn scalar(winding: WindingMatrix, f: TrigPolynomial) -> Result<Self> {
        Self::new(winding, vec![f])
    }

    pub fn winding(&self) -> &WindingMatrix {
        &self.winding
    }

    pub fn components(&self) -> &[TrigPolynomial] {
        &self.components
    }

    pub fn phys_dim(&self) -> usize {
        self.winding.phys_dim()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let alpha = self.winding.apply(x);
        self.components.iter().map(|c| c.eval(&alpha)).collect()
    }

    fn map(&self, f: impl Fn(&TrigPolynomial) -> TrigPolynomial) -> Self {
        Self {
            winding: self.winding.clone(),
            components: self.components.iter().map(f).collect(),
        }
    }

    /// `x -> f(x + y)`.
    pub fn translated(&self, y: &[f64]) -> Self {
        let beta = self.winding.apply(y);
        self.map(|c| c.translated(&beta))
    }

    /// `x -> (f(x + y) - f(x + z)) / 2`, in closed form.
    pub fn difference(&self, y: &[f64], z: &[f64]) -> Self {
        let beta = self.winding.apply(y);
        let gamma = self.winding.apply(z);
        self.map(|c| c.difference(&beta, &gamma))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|c| c.scaled(factor))
    }

    pub fn extrema(&self, sampler: &SupSampler) -> Vec<Extrema> {
        self.components.iter().map(|c| c.extrema(sampler)).collect()
    }

    pub fn sup_norm(&self, sampler: &SupSampler) -> f64 {
        self.components
            .iter()
            .map(|c| c.sup_abs(sampler))
            .fold(0.0, f64::max)
    }

    /// Torus means of the components.
    pub fn mean(&self) -> Vec<f64> {
        self.components.iter().map(TrigPolynomial::mean).collect()
    }
}
