//! Hermitian eigendecomposition with deterministic, trackable gauge.
//!
//! Eigenvector phases are physically irrelevant one time slice at a time, but
//! quantities built from eigenbasis *derivatives* need a smooth gauge along a
//! trajectory.  Two rules are used:
//!
//! * without an anchor, each eigenvector is rotated so its largest-magnitude
//!   component is real and positive (ties broken by the smallest index);
//! * with an anchor (the eigensystem of the previous time slice), each vector
//!   is rotated so its overlap with the corresponding anchor vector is real
//!   and positive, which keeps the basis continuous along the trajectory.

use ndarray::{Array1, Axis};
use ndarray_linalg::{Eigh, UPLO};

use super::{c, dagger, herm_defect, identity, max_abs, CMat, CVec, C64};
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance for eigendecomposition inputs.
const HERMITICITY_RTOL: f64 = 1e-12;
/// Orthonormality / reconstruction tolerance for the returned basis.
const BASIS_TOL: f64 = 1e-10;
/// Relative eigenvalue gap below which two levels count as degenerate.
pub(crate) const DEGENERACY_RTOL: f64 = 1e-10;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// Hermitian matrix, with phases fixed as described in the module docs.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Real eigenvalues in ascending order.
    pub values: Array1<f64>,
    /// Unitary matrix whose column `n` is the eigenvector of `values[n]`.
    pub vectors: CMat,
}

/// Diagonalize a Hermitian matrix, optionally phase-aligning the eigenbasis
/// against `anchor` (the eigensystem of a nearby matrix).
pub fn hermitian_eigensystem(x: &CMat, anchor: Option<&EigenSystem>) -> Result<EigenSystem> {
    let d = x.nrows();
    if x.ncols() != d {
        return Err(Error::DimensionMismatch {
            context: "hermitian_eigensystem",
            got: x.ncols(),
            expected: d,
        });
    }
    let scale = max_abs(x);
    let defect = herm_defect(x);
    if defect > HERMITICITY_RTOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian {
            defect,
            tol: HERMITICITY_RTOL * scale,
        });
    }
    if let Some(a) = anchor {
        if a.dim() != d {
            return Err(Error::DimensionMismatch {
                context: "hermitian_eigensystem anchor",
                got: a.dim(),
                expected: d,
            });
        }
    }

    let (values, mut vectors) = x
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Eigensolver(e.to_string()))?;

    // Some LAPACK layout paths hand back the eigenbasis of the transposed
    // (= conjugated, for Hermitian input) matrix: still unitary, but
    // diagonalizing the wrong operator.  Detect via the reconstruction
    // residual and conjugate when that repairs it; `validate` below remains
    // the hard gate either way.
    let tol = BASIS_TOL * scale.max(1.0);
    if reconstruction_residual(&values, &vectors, x) > tol {
        let conjugated = vectors.mapv(|z| z.conj());
        if reconstruction_residual(&values, &conjugated, x) <= tol {
            vectors = conjugated;
        }
    }

    // Deterministic ordering inside degenerate clusters before phase fixing.
    reorder_degenerate_clusters(&values, &mut vectors);

    for n in 0..d {
        let phase = match anchor {
            Some(a) => {
                let overlap: C64 = a
                    .vectors
                    .column(n)
                    .iter()
                    .zip(vectors.column(n).iter())
                    .map(|(u, v)| u.conj() * v)
                    .sum();
                if overlap.norm() > 1e-8 {
                    overlap / overlap.norm()
                } else {
                    largest_component_phase(&vectors.column(n).to_owned())
                }
            }
            None => largest_component_phase(&vectors.column(n).to_owned()),
        };
        let rot = phase.conj();
        for v in vectors.column_mut(n).iter_mut() {
            *v *= rot;
        }
    }

    let eig = EigenSystem { values, vectors };
    eig.validate(x)?;
    Ok(eig)
}

/// Max-norm residual of `V diag(λ) V† − X`.
fn reconstruction_residual(values: &Array1<f64>, vectors: &CMat, x: &CMat) -> f64 {
    let mut scaled = vectors.clone();
    for (n, col) in scaled.columns_mut().into_iter().enumerate() {
        let w = c(values[n], 0.0);
        for v in col {
            *v *= w;
        }
    }
    max_abs(&(&scaled.dot(&dagger(vectors)) - x))
}

/// Phase of the largest-magnitude component (ties broken by smallest index).
fn largest_component_phase(v: &CVec) -> C64 {
    let mut best = 0usize;
    let mut best_mag = -1.0f64;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mag + 1e-15 {
            best = i;
            best_mag = m;
        }
    }
    let z = v[best];
    if z.norm() == 0.0 {
        c(1.0, 0.0)
    } else {
        z / z.norm()
    }
}

/// Sort the columns of each degenerate eigenvalue cluster lexicographically
/// by component values, so repeated decompositions of identical input are
/// bit-for-bit reproducible.
fn reorder_degenerate_clusters(values: &Array1<f64>, vectors: &mut CMat) {
    let d = values.len();
    if d < 2 {
        return;
    }
    let spread = (values[d - 1] - values[0]).abs().max(1e-300);
    let tie_tol = DEGENERACY_RTOL * spread;
    let mut start = 0usize;
    while start < d {
        let mut end = start + 1;
        while end < d && (values[end] - values[end - 1]).abs() <= tie_tol {
            end += 1;
        }
        if end - start > 1 {
            let mut cols: Vec<CVec> = (start..end).map(|k| vectors.column(k).to_owned()).collect();
            cols.sort_by(lex_cmp);
            for (offset, col) in cols.into_iter().enumerate() {
                vectors.index_axis_mut(Axis(1), start + offset).assign(&col);
            }
        }
        start = end;
    }
}

fn lex_cmp(a: &CVec, b: &CVec) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.partial_cmp(&y.re).unwrap_or(std::cmp::Ordering::Equal) {
            std::cmp::Ordering::Equal => {}
            ord => return ord,
        }
        match x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal) {
            std::cmp::Ordering::Equal => {}
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvector `n` as an owned column.
    pub fn vector(&self, n: usize) -> CVec {
        self.vectors.column(n).to_owned()
    }

    /// Rank-one projector `|n⟩⟨n|`.
    pub fn projector(&self, n: usize) -> CMat {
        let v = self.vector(n);
        super::outer(&v, &v)
    }

    /// `Σ_n λ_n |n⟩⟨n|` rebuilt from the decomposition.
    pub fn reconstruct(&self) -> CMat {
        self.from_basis_diag(self.values.as_slice().unwrap())
    }

    /// `Σ_n d_n |n⟩⟨n|` for arbitrary real weights in this eigenbasis.
    pub fn from_basis_diag(&self, diag: &[f64]) -> CMat {
        assert_eq!(diag.len(), self.dim(), "weight count must match dimension");
        let mut scaled = self.vectors.clone();
        for (n, &w) in diag.iter().enumerate() {
            let w = c(w, 0.0);
            for v in scaled.column_mut(n).iter_mut() {
                *v *= w;
            }
        }
        scaled.dot(&dagger(&self.vectors))
    }

    /// Matrix elements `⟨m|A|n⟩` of an operator in this eigenbasis.
    pub fn to_basis(&self, a: &CMat) -> CMat {
        dagger(&self.vectors).dot(a).dot(&self.vectors)
    }

    /// Operator with the given eigenbasis matrix elements, `V B V†`.
    pub fn from_basis(&self, b: &CMat) -> CMat {
        self.vectors.dot(b).dot(&dagger(&self.vectors))
    }

    /// Largest minus smallest eigenvalue.
    pub fn spectral_range(&self) -> f64 {
        let d = self.dim();
        (self.values[d - 1] - self.values[0]).abs()
    }

    /// Smallest gap between adjacent eigenvalues (`∞` for `d = 1`).
    pub fn min_gap(&self) -> f64 {
        let d = self.dim();
        (1..d)
            .map(|n| (self.values[n] - self.values[n - 1]).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Error if any adjacent eigenvalue pair is closer than
    /// `DEGENERACY_RTOL` times the spectral range.
    pub fn require_nondegenerate(&self) -> Result<()> {
        let d = self.dim();
        let tol = DEGENERACY_RTOL * self.spectral_range().max(f64::MIN_POSITIVE);
        for n in 1..d {
            let gap = (self.values[n] - self.values[n - 1]).abs();
            if gap < tol {
                return Err(Error::DegenerateSpectrum {
                    lower: n - 1,
                    upper: n,
                    gap,
                    tol,
                });
            }
        }
        Ok(())
    }

    /// Check orthonormality and reconstruction against the original matrix.
    pub fn validate(&self, original: &CMat) -> Result<()> {
        let gram = dagger(&self.vectors).dot(&self.vectors);
        let ortho = max_abs(&(&gram - &identity(self.dim())));
        if ortho > BASIS_TOL {
            return Err(Error::Eigensolver(format!(
                "eigenbasis not orthonormal: defect {ortho:.3e}"
            )));
        }
        let scale = max_abs(original).max(f64::MIN_POSITIVE);
        let resid = max_abs(&(&self.reconstruct() - original));
        if resid > BASIS_TOL * scale.max(1.0) {
            return Err(Error::Eigensolver(format!(
                "eigendecomposition does not reconstruct its input: residual {resid:.3e}"
            )));
        }
        Ok(())
    }
}

/// Eigenvalue and eigenvector time derivatives obtained from first-order
/// perturbation theory with the generator `Ẋ`:
///
/// `λ̇_n = ⟨n|Ẋ|n⟩`,  `⟨m|∂_t n⟩ = ⟨m|Ẋ|n⟩/(λ_n − λ_m)` for `m ≠ n`.
///
/// The diagonal overlaps are zero (parallel-transport gauge), so every
/// quantity assembled from `overlaps` is automatically phase-gauge invariant.
#[derive(Debug, Clone)]
pub struct EigenDerivative {
    /// `λ̇_n`.
    pub values_dot: Array1<f64>,
    /// `overlaps[(m, n)] = ⟨m|∂_t n⟩`; zero on the diagonal.
    pub overlaps: CMat,
}

/// Differentiate an eigensystem along a path with known generator derivative.
/// Fails on (near-)degenerate spectra, where the perturbative formula blows up.
pub fn eigensystem_derivative(eig: &EigenSystem, x_dot: &CMat) -> Result<EigenDerivative> {
    let d = eig.dim();
    if x_dot.nrows() != d || x_dot.ncols() != d {
        return Err(Error::DimensionMismatch {
            context: "eigensystem_derivative",
            got: x_dot.nrows(),
            expected: d,
        });
    }
    eig.require_nondegenerate()?;
    let in_basis = eig.to_basis(x_dot);
    let values_dot = Array1::from_iter((0..d).map(|n| in_basis[(n, n)].re));
    let mut overlaps = CMat::zeros((d, d));
    for m in 0..d {
        for n in 0..d {
            if m != n {
                overlaps[(m, n)] = in_basis[(m, n)] / c(eig.values[n] - eig.values[m], 0.0);
            }
        }
    }
    Ok(EigenDerivative {
        values_dot,
        overlaps,
    })
}

impl EigenDerivative {
    /// Columns `|∂_t n⟩ = Σ_{m≠n} |m⟩⟨m|∂_t n⟩` in the ambient basis.
    pub fn vector_dot_columns(&self, eig: &EigenSystem) -> CMat {
        eig.vectors.dot(&self.overlaps)
    }
}
