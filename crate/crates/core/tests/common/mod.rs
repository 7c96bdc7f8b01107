#![allow(dead_code)]

use apcorr::field::{CoefficientField, QuasiField, TrigPolynomial, TrigTerm, WindingMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `2.5 + 0.5 cos(2 pi a_1) + 0.5 cos(2 pi a_2)` on the golden lift.
pub fn golden_poly() -> TrigPolynomial {
    TrigPolynomial::new(
        2,
        vec![
            TrigTerm {
                k: vec![0, 0],
                c: 2.5,
                s: 0.0,
            },
            TrigTerm {
                k: vec![1, 0],
                c: 0.5,
                s: 0.0,
            },
            TrigTerm {
                k: vec![0, 1],
                c: 0.5,
                s: 0.0,
            },
        ],
    )
    .unwrap()
}

pub fn golden_quasi() -> QuasiField {
    QuasiField::scalar(WindingMatrix::golden(), golden_poly()).unwrap()
}

pub fn golden_field() -> CoefficientField {
    CoefficientField::isotropic(WindingMatrix::golden(), golden_poly(), 3.5).unwrap()
}

/// `2 + cos(2 pi x)`.
pub fn cos_field() -> CoefficientField {
    let f = TrigPolynomial::cosine(vec![1], 1.0).plus_constant(2.0);
    CoefficientField::isotropic(WindingMatrix::identity(1), f, 3.0).unwrap()
}

pub fn constant_field(d: usize) -> CoefficientField {
    let mut a = vec![0.0; d * d];
    for i in 0..d {
        a[i * d + i] = 1.0;
    }
    CoefficientField::constant(a, d, 1.0).unwrap()
}

/// Random polynomial with `terms` modes, frequencies in `[-2, 2]^m`.
pub fn random_poly(rng: &mut impl Rng, m: usize, terms: usize) -> TrigPolynomial {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < terms {
        let k: Vec<i64> = (0..m).map(|_| rng.gen_range(-2..=2)).collect();
        if seen.insert(k.clone()) {
            out.push(TrigTerm {
                k,
                c: rng.gen_range(-1.0..1.0),
                s: rng.gen_range(-1.0..1.0),
            });
        }
    }
    TrigPolynomial::new(m, out).unwrap()
}

pub fn random_quasi(rng: &mut impl Rng, terms: usize) -> QuasiField {
    QuasiField::scalar(WindingMatrix::golden(), random_poly(rng, 2, terms)).unwrap()
}

pub fn random_point(rng: &mut impl Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-scale..scale)).collect()
}
