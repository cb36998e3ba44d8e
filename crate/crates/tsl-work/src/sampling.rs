//! Seeded random operators for tests and randomized verification sweeps.
//!
//! Everything here runs off an explicit [`ChaCha8Rng`] so that any check
//! built on random inputs is reproducible from its seed alone.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::operator_algebra::{c, dagger, trace, CMat};

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with independent complex-Gaussian entries scaled by `scale`.
pub fn random_complex_matrix(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> CMat {
    Array2::from_shape_fn((dim, dim), |_| {
        c(scale * standard_normal(rng), scale * standard_normal(rng))
    })
}

/// Random Hermitian matrix `(G + G†)/2` with entries of order `scale`.
pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> CMat {
    let g = random_complex_matrix(rng, dim, scale);
    (&g + &dagger(&g)) * c(0.5, 0.0)
}

/// Random full-rank density matrix from the Ginibre ensemble: `GG†/Tr[GG†]`.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> CMat {
    let g = random_complex_matrix(rng, dim, 1.0);
    let w = g.dot(&dagger(&g));
    let t = trace(&w);
    &w / t
}

/// Random density matrix whose smallest eigenvalue is at least `floor`
/// (mix with the maximally mixed state): `(1−λ)ρ + λ I/d` with
/// `λ = floor · d`.  Useful where strictly positive spectra are required.
pub fn random_density_regular(rng: &mut ChaCha8Rng, dim: usize, floor: f64) -> CMat {
    let rho = random_density(rng, dim);
    let lambda = (floor * dim as f64).min(0.5);
    let mixed = CMat::eye(dim) * c(lambda / dim as f64, 0.0);
    &rho * c(1.0 - lambda, 0.0) + &mixed
}

/// Box–Muller standard normal draw.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
