#![allow(dead_code)]

use carnot_core::derivations::{constrain_g0, strata_derivations, GZeroConstraint};
use carnot_core::{Frame, GradedLieAlgebra, Polynomial, PolyVectorField, Rational, Subspace};
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn conformal_g0(g: &GradedLieAlgebra) -> Subspace {
    constrain_g0(g, &strata_derivations(g), &GZeroConstraint::Conformal).unwrap()
}

/// A rational with numerator in `-20..=20` and denominator in `1..=9`.
pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-20..=20)), BigInt::from(rng.gen_range(1..=9)))
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| random_rational(rng)).collect()
}

pub fn poly(frame: &Frame, s: &str) -> Polynomial {
    let names: Vec<&str> = frame.coordinate_names().iter().map(String::as_str).collect();
    Polynomial::parse(s, &names).unwrap()
}

pub fn field(frame: &Frame, comps: &[&str]) -> PolyVectorField {
    PolyVectorField::new(comps.iter().map(|c| poly(frame, c)).collect())
}
