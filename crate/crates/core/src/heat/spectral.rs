use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::lattice::{capped_resolution, torus_lattice};
use crate::field::{Extrema, QuasiField, SupSampler, TrigPolynomial, WindingMatrix};

/// A real mode `c cos(2 pi xi.x) + s sin(2 pi xi.x)` with physical frequency `xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyMode {
    pub xi: Vec<f64>,
    pub c: f64,
    pub s: f64,
}

/// A scalar band-limited function `f(x) = c_0 + sum [c cos(2 pi xi.x) + s sin(2 pi xi.x)]`
/// with `xi = M^t k`, kept together with its torus lift so that suprema can be
/// taken over `T^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyField {
    winding: WindingMatrix,
    poly: TrigPolynomial,
}

impl FrequencyField {
    pub fn new(winding: WindingMatrix, poly: TrigPolynomial) -> Result<Self> {
        if poly.torus_dim() != winding.torus_dim() {
            return Err(invalid("torus dimension does not match winding matrix"));
        }
        let (_, merged) = poly.modes();
        let mut xis: Vec<Vec<f64>> = merged.iter().map(|m| winding.frequency(&m.k)).collect();
        xis.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        if xis.windows(2).any(|w| w[0] == w[1]) || xis.iter().any(|x| x.iter().all(|v| *v == 0.0)) {
            return Err(invalid(
                "distinct torus modes map to the same physical frequency (resonant lift)",
            ));
        }
        Ok(Self { winding, poly })
    }

    /// The single component of a scalar quasiperiodic field.
    pub fn from_quasi(f: &QuasiField) -> Result<Self> {
        if f.components().len() != 1 {
            return Err(invalid("frequency fields are scalar"));
        }
        Self::new(f.winding().clone(), f.components()[0].clone())
    }

    pub fn to_quasi(&self) -> QuasiField {
        QuasiField::scalar(self.winding.clone(), self.poly.clone()).expect("dimensions agree")
    }

    pub fn winding(&self) -> &WindingMatrix {
        &self.winding
    }

    pub fn poly(&self) -> &TrigPolynomial {
        &self.poly
    }

    pub fn dim(&self) -> usize {
        self.winding.phys_dim()
    }

    /// Zero-frequency amplitude.
    pub fn mean(&self) -> f64 {
        self.poly.mean()
    }

    /// The field minus its mean. Oscillations of a nearly constant field are
    /// measured on this, where they do not round away against the mean.
    pub fn centered(&self) -> Self {
        Self {
            winding: self.winding.clone(),
            poly: self.poly.plus_constant(-self.mean()),
        }
    }

    /// Nonzero modes with their physical frequencies.
    pub fn modes(&self) -> Vec<FrequencyMode> {
        self.poly
            .modes()
            .1
            .into_iter()
            .map(|m| FrequencyMode {
                xi: self.winding.frequency(&m.k),
                c: m.c,
                s: m.s,
            })
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.poly.eval(&self.winding.apply(x))
    }

    /// Multiplies each mode by `g(|xi|^2)`; the constant is multiplied by `g(0)`.
    pub fn map_modes(&self, g: impl Fn(f64) -> f64) -> Self {
        let terms = self
            .poly
            .terms()
            .iter()
            .map(|t| {
                let xi = self.winding.frequency(&t.k);
                let w = g(xi.iter().map(|v| v * v).sum());
                crate::field::TrigTerm {
                    k: t.k.clone(),
                    c: t.c * w,
                    s: t.s * w,
                }
            })
            .collect();
        Self {
            winding: self.winding.clone(),
            poly: TrigPolynomial::new(self.poly.torus_dim(), terms).expect("same frequencies"),
        }
    }

    /// `d f / d x_i` as a torus polynomial.
    pub fn partial(&self, i: usize) -> TrigPolynomial {
        // d/dx_i F(Mx) = sum_j M_{ji} (d_j F)(Mx)
        let m = self.winding.torus_dim();
        let mut terms: std::collections::BTreeMap<Vec<i64>, (f64, f64)> = Default::default();
        for j in 0..m {
            let coef = self.winding.rows()[j][i];
            if coef == 0.0 {
                continue;
            }
            for t in self.poly.partial(j).terms() {
                let e = terms.entry(t.k.clone()).or_insert((0.0, 0.0));
                e.0 += coef * t.c;
                e.1 += coef * t.s;
            }
        }
        let terms = terms
            .into_iter()
            .map(|(k, (c, s))| crate::field::TrigTerm { k, c, s })
            .collect();
        TrigPolynomial::new(m, terms).expect("distinct keys")
    }

    /// Extreme values over `R^d`, taken on the torus lift.
    pub fn extrema(&self, sampler: &SupSampler) -> Extrema {
        self.poly.extrema(sampler)
    }

    /// `sup |grad f|` (Euclidean). Exact or refined in one dimension, lattice-sampled otherwise.
    pub fn grad_sup(&self, sampler: &SupSampler) -> f64 {
        let d = self.dim();
        let parts: Vec<TrigPolynomial> = (0..d).map(|i| self.partial(i)).collect();
        if d == 1 {
            return parts[0].sup_abs(sampler);
        }
        let m = self.winding.torus_dim();
        let res = capped_resolution(m, sampler.resolution, sampler.max_points);
        torus_lattice(m, res)
            .iter()
            .map(|a| parts.iter().map(|p| p.eval(a).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// `e^{t Delta} f`: every mode multiplied by `exp(-4 pi^2 |xi|^2 t)`.
pub fn heat_evolve(f: &FrequencyField, t: f64) -> Result<FrequencyField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("heat evolution needs t >= 0, got {t}")));
    }
    Ok(f.map_modes(|xi2| (-4.0 * PI * PI * xi2 * t).exp()))
}

/// `sup f - inf f` over `R^d`, sampled on the torus lift.
pub fn osc(f: &FrequencyField, sampler: &SupSampler) -> Result<Extrema> {
    f.winding()
        .check_resonance(f.winding().default_resonance_radius())?;
    Ok(f.extrema(sampler))
}

/// A field at time `t` of the heat flow started from `initial`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatState {
    pub field: FrequencyField,
    pub t: f64,
}

impl HeatState {
    pub fn new(initial: &FrequencyField, t: f64) -> Result<Self> {
        Ok(Self {
            field: heat_evolve(initial, t)?,
            t,
        })
    }

    /// Advances by `dt`.
    pub fn advance(&self, dt: f64) -> Result<Self> {
        Ok(Self {
            field: heat_evolve(&self.field, dt)?,
            t: self.t + dt,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cosine() -> FrequencyField {
        FrequencyField::new(
            WindingMatrix::identity(1),
            TrigPolynomial::cosine(vec![1], 1.0),
        )
        .unwrap()
    }

    #[test]
    fn eigenfunction_decay() {
        let t = 0.01;
        let u = heat_evolve(&cosine(), t).unwrap();
        let want = (-4.0 * PI * PI * t).exp();
        assert!((u.eval(&[0.0]) - want).abs() < 1e-15);
    }

    #[test]
    fn oscillation_of_cosine() {
        let e = osc(&cosine(), &SupSampler::default()).unwrap();
        assert!((e.osc() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_lifted_field() {
        let f = FrequencyField::new(
            WindingMatrix::golden(),
            TrigPolynomial::new(
                2,
                vec![crate::field::TrigTerm {
                    k: vec![1, 1],
                    c: 0.3,
                    s: -0.2,
                }],
            )
            .unwrap(),
        )
        .unwrap();
        let d = f.partial(0);
        let x = 0.37;
        let h = 1e-6;
        let fd = (f.eval(&[x + h]) - f.eval(&[x - h])) / (2.0 * h);
        assert!((d.eval(&f.winding().apply(&[x])) - fd).abs() < 1e-7);
    }
}
