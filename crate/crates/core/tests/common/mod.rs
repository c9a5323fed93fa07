//! Helpers shared by the integration tests.
#![allow(dead_code)]

pub mod checks;
pub mod oracle;

use num_complex::Complex64;
use rand::Rng;
use spinbasis::weyl::{GaussianRational, Generator, RawTerm, WeylExpression};
use std::f64::consts::FRAC_1_SQRT_2 as H;

pub const GENERATORS: [Generator; 6] = [
    Generator::X,
    Generator::Y,
    Generator::Z,
    Generator::Px,
    Generator::Py,
    Generator::Pz,
];

/// Exact amplitudes of the standard right-handed bases.
pub fn expected_final_states() -> [(&'static str, Complex64, Complex64); 4] {
    [
        ("x_up", Complex64::new(H, 0.0), Complex64::new(H, 0.0)),
        ("x_down", Complex64::new(H, 0.0), Complex64::new(-H, 0.0)),
        ("y_up", Complex64::new(H, 0.0), Complex64::new(0.0, H)),
        ("y_down", Complex64::new(H, 0.0), Complex64::new(0.0, -H)),
    ]
}

pub fn random_word<R: Rng>(rng: &mut R, min_len: usize, max_len: usize) -> Vec<Generator> {
    let len = rng.random_range(min_len..=max_len);
    (0..len).map(|_| GENERATORS[rng.random_range(0..6)]).collect()
}

pub fn random_coeff<R: Rng>(rng: &mut R) -> GaussianRational {
    let re = GaussianRational::from_ratio(rng.random_range(-5..=5), rng.random_range(1..=4));
    let im = GaussianRational::from_ratio(rng.random_range(-5..=5), rng.random_range(1..=4));
    re + im * GaussianRational::i()
}

/// A random sum of raw words of length at most `max_len`.
pub fn random_raw<R: Rng>(rng: &mut R, max_terms: usize, max_len: usize) -> Vec<RawTerm> {
    let n = rng.random_range(1..=max_terms);
    (0..n)
        .map(|_| RawTerm {
            coeff: random_coeff(rng),
            hbar: rng.random_range(0..=1),
            word: random_word(rng, 0, max_len),
        })
        .collect()
}

/// A random normal-ordered expression of degree at most `max_len`.
pub fn random_expr<R: Rng>(rng: &mut R, max_terms: usize, max_len: usize) -> WeylExpression {
    spinbasis::weyl::normal_order(&random_raw(rng, max_terms, max_len)).expect("degree is bounded")
}

/// Product of the generators in `word` through the closed-form multiplication.
pub fn closed_form_word(word: &[Generator]) -> WeylExpression {
    word.iter().fold(WeylExpression::int(1), |acc, g| {
        acc.mul(&WeylExpression::generator(*g)).expect("degree is bounded")
    })
}

/// Closed-form evaluation of a sum of raw words.
pub fn closed_form(terms: &[RawTerm]) -> WeylExpression {
    let mut out = WeylExpression::zero();
    for t in terms {
        let hbar = (0..t.hbar).fold(WeylExpression::int(1), |acc, _| {
            acc.mul(&WeylExpression::hbar()).unwrap()
        });
        out = out.add(&closed_form_word(&t.word).mul(&hbar).unwrap().scale(&t.coeff));
    }
    out
}
