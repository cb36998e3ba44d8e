//! Dense complex operator algebra on small Hilbert spaces.
//!
//! Operators are `d×d` matrices of `Complex64`; superoperators are `d²×d²`
//! matrices acting on column-major vectorized operators,
//! `vec(X)[i + d·j] = X[i, j]`.  The Hilbert–Schmidt inner product
//! `⟨X, Y⟩ = Tr[X†Y]` then coincides with the ordinary vector inner product
//! of `vec(X)` and `vec(Y)`, so the adjoint of a superoperator is the
//! conjugate transpose of its matrix.

mod eigen;
mod superop;

pub use eigen::{eigensystem_derivative, hermitian_eigensystem, EigenDerivative, EigenSystem};
pub use superop::{
    unvectorize, vectorize_matrix, DrazinInverse, DrazinOptions, SuperopKind, SuperopSpectrum,
    Superoperator,
};

use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

/// Shorthand complex constructor.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `d×d` identity matrix.
pub fn identity(dim: usize) -> CMat {
    CMat::eye(dim)
}

/// Conjugate transpose `A†`.
pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

/// Commutator `[A, B] = AB − BA`.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) - b.dot(a)
}

/// Anticommutator `{A, B} = AB + BA`.
pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) + b.dot(a)
}

/// Matrix trace.
pub fn trace(a: &CMat) -> C64 {
    a.diag().sum()
}

/// Hilbert–Schmidt inner product `⟨A, B⟩ = Tr[A†B]`.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Outer product `|u⟩⟨v|`.
pub fn outer(u: &CVec, v: &CVec) -> CMat {
    let d = u.len();
    CMat::from_shape_fn((d, d), |(i, j)| u[i] * v[j].conj())
}

/// Hermitian part `(A + A†)/2`.
pub fn hermitize(a: &CMat) -> CMat {
    (a + &dagger(a)) * c(0.5, 0.0)
}

/// Entrywise max-norm `max_{ij} |A_{ij}|`.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermiticity defect `‖A − A†‖_max`.
pub fn herm_defect(a: &CMat) -> f64 {
    max_abs(&(a - &dagger(a)))
}

/// `Re Tr[AB]` — the usual real expectation-value contraction for a
/// Hermitian observable against a Hermitian state.
pub fn re_trace_prod(a: &CMat, b: &CMat) -> f64 {
    // Tr[AB] = Σ_{ij} A_ij B_ji
    let mut s = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s.re
}
