//! Shared fixtures for the benchmarks.

use nangle_core::cluster::{random_splice_triple, SpliceTriple};
use nangle_core::decompose::{random_exact_with, GenParams};
use nangle_core::engine::{random_first_square, random_octa_setup, OctaSetup};
use nangle_core::rng::rng_from;
use nangle_core::{GradedMap, Matrix, NSeq, PrimeField};

pub fn f5() -> PrimeField {
    PrimeField::new(5).expect("5 is prime")
}

pub fn square_matrix(n: usize, seed: u64) -> Matrix {
    Matrix::random(f5(), n, n, &mut rng_from(seed))
}

pub fn exact(n: usize, seed: u64) -> NSeq {
    random_exact_with(f5(), &GenParams::new(n), &mut rng_from(seed)).expect("generator")
}

/// Two exact sequences and a commuting first square.
pub fn pair(n: usize, seed: u64) -> (NSeq, NSeq, GradedMap, GradedMap) {
    let mut rng = rng_from(seed);
    let g = GenParams::new(n);
    let s = random_exact_with(f5(), &g, &mut rng).expect("generator");
    let t = random_exact_with(f5(), &g, &mut rng).expect("generator");
    let (p1, p2) = random_first_square(&s, &t, &mut rng).expect("square");
    (s, t, p1, p2)
}

pub fn octa(n: usize, seed: u64) -> OctaSetup {
    random_octa_setup(f5(), &GenParams::new(n), &mut rng_from(seed)).expect("setup")
}

pub fn splice(seed: u64) -> SpliceTriple {
    let g = GenParams {
        max_dim: 2,
        ..GenParams::new(4)
    };
    random_splice_triple(f5(), &g, &mut rng_from(seed)).expect("splice")
}
