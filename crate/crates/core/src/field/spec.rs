use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::coefficient::{CoefficientField, Holder};
use crate::field::trig::{TrigPolynomial, TrigTerm};
use crate::field::WindingMatrix;

/// On-disk description of a coefficient field.
///
/// ```toml
/// lambda = 3.0
/// theta = 1.0
/// [winding]
/// rows = [[1.0], [1.618033988749895]]
/// [[entry]]
/// i = 0
/// j = 0
/// shift = 2.0
/// terms = [[1, 0, 0.5, 0.0], [0, 1, 0.5, 0.0]]
/// ```
///
/// Each term row lists the integer frequency vector followed by the cosine and
/// sine amplitudes. Indices are 0-based; entries not listed are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub lambda: f64,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub holder: Option<Holder>,
    pub winding: WindingSpec,
    #[serde(default, rename = "entry")]
    pub entries: Vec<EntrySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindingSpec {
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub i: usize,
    pub j: usize,
    #[serde(default)]
    pub shift: f64,
    #[serde(default)]
    pub terms: Vec<Vec<f64>>,
}

impl FieldSpec {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Validates the description and builds the field (including the ellipticity check).
    pub fn build(&self) -> Result<CoefficientField> {
        let winding = WindingMatrix::new(self.winding.rows.clone())?;
        let (m, d) = (winding.torus_dim(), winding.phys_dim());
        let mut entries = vec![TrigPolynomial::zero(m); d * d];
        let mut shift = vec![0.0; d * d];
        let mut seen = vec![false; d * d];
        for e in &self.entries {
            if e.i >= d || e.j >= d {
                return Err(invalid(format!(
                    "entry ({}, {}) out of range for d={d}",
                    e.i, e.j
                )));
            }
            let idx = e.i * d + e.j;
            if std::mem::replace(&mut seen[idx], true) {
                return Err(invalid(format!("entry ({}, {}) listed twice", e.i, e.j)));
            }
            let mut terms = Vec::with_capacity(e.terms.len());
            for row in &e.terms {
                if row.len() != m + 2 {
                    return Err(invalid(format!("term {row:?} must have {} numbers", m + 2)));
                }
                let mut k = Vec::with_capacity(m);
                for v in &row[..m] {
                    if v.fract() != 0.0 || v.abs() > 1e9 {
                        return Err(invalid(format!(
                            "frequency component {v} is not an integer"
                        )));
                    }
                    k.push(*v as i64);
                }
                terms.push(TrigTerm {
                    k,
                    c: row[m],
                    s: row[m + 1],
                });
            }
            entries[idx] = TrigPolynomial::new(m, terms)?;
            shift[idx] = e.shift;
        }
        let mut field = CoefficientField::new(winding, entries, shift, self.lambda)?;
        if let Some(h) = self.holder {
            field.holder = h;
        }
        if let Some(k) = self.kappa {
            field.kappa = k;
        }
        Ok(field)
    }
}

/// Reads and builds a field description file.
pub fn load_field(path: &Path) -> Result<(FieldSpec, CoefficientField)> {
    let spec = FieldSpec::load(path)?;
    let field = spec.build()?;
    Ok((spec, field))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = r#"
lambda = 3.5
theta = 1.0
[winding]
rows = [[1.0], [1.618033988749895]]
[[entry]]
i = 0
j = 0
shift = 2.5
terms = [[1, 0, 0.5, 0.0], [0, 1, 0.5, 0.0]]
"#;

    #[test]
    fn parses_golden() {
        let f = FieldSpec::parse(GOLDEN).unwrap().build().unwrap();
        assert!((f.eval(&[1.0])[0] - 2.631_315_560_960_84).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_elliptic_spec() {
        let text = GOLDEN.replace("shift = 2.5", "shift = 1.5");
        assert!(matches!(
            FieldSpec::parse(&text).unwrap().build(),
            Err(Error::NotElliptic(_))
        ));
    }

    #[test]
    fn rejects_fractional_frequency() {
        let text = GOLDEN.replace("[1, 0, 0.5", "[1.5, 0, 0.5");
        assert!(FieldSpec::parse(&text).unwrap().build().is_err());
    }
}
