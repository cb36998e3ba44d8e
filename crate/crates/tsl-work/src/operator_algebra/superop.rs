//! Superoperators as dense `d²×d²` matrices over vectorized operators.
//!
//! The Drazin (group) pseudo-inverse of a diagonalizable superoperator
//! `S = Σ_Γ Γ P_Γ` is `S⁺ = Σ_{Γ≠0} Γ⁻¹ P_Γ`: it inverts every decaying mode
//! and annihilates the kernel.  It is built here from the spectral
//! decomposition `S = V Λ V⁻¹`, with defectiveness detected through the
//! reconstruction residual and the eigenvector condition number.

use ndarray::Array1;
use ndarray_linalg::{Eig, Inverse};

use super::{c, dagger, max_abs, CMat, CVec, C64};
use crate::error::{Error, Result};

/// Role tag recording how a superoperator was constructed; metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperopKind {
    /// Full generator of the dissipative semigroup.
    Liouvillian,
    /// Commutator (Hamiltonian) part.
    UnitaryPart,
    /// Jump (dissipative) part.
    Dissipator,
    /// Hilbert–Schmidt adjoint of another superoperator.
    Adjoint,
    /// Drazin pseudo-inverse of another superoperator.
    Drazin,
    /// Anything else.
    General,
}

/// Column-major vectorization `vec(X)[i + d·j] = X[i, j]`.
pub fn vectorize_matrix(x: &CMat) -> CVec {
    let d = x.nrows();
    CVec::from_shape_fn(d * d, |k| x[(k % d, k / d)])
}

/// Inverse of [`vectorize_matrix`].
pub fn unvectorize(v: &CVec, dim: usize) -> CMat {
    CMat::from_shape_fn((dim, dim), |(i, j)| v[i + dim * j])
}

/// A linear map on operators, stored as its matrix in the vectorized basis.
#[derive(Debug, Clone)]
pub struct Superoperator {
    dim: usize,
    pub matrix: CMat,
    pub kind: SuperopKind,
}

/// Spectral decomposition `S = V Λ V⁻¹` of a (generally non-normal)
/// superoperator.
#[derive(Debug, Clone)]
pub struct SuperopSpectrum {
    pub eigenvalues: CVec,
    /// Right eigenvectors as columns.
    pub vectors: CMat,
    pub vectors_inv: CMat,
    /// 1-norm condition number of the eigenvector matrix.
    pub condition: f64,
}

/// Options for [`Superoperator::drazin_inverse`].
#[derive(Debug, Clone, Copy)]
pub struct DrazinOptions {
    /// Eigenvalues with `|Γ| ≤ zero_tol · max|Γ|` are treated as kernel modes.
    pub zero_tol: f64,
}

impl Default for DrazinOptions {
    fn default() -> Self {
        Self { zero_tol: 1e-9 }
    }
}

/// Result of a Drazin inversion, with spectral diagnostics attached.
#[derive(Debug, Clone)]
pub struct DrazinInverse {
    pub op: Superoperator,
    /// Condition number of the eigenvector matrix used for the construction.
    pub eigvec_condition: f64,
    /// Number of eigenvalues treated as exactly zero.
    pub kernel_dim: usize,
    /// Set when some eigenvalue magnitude falls inside the ambiguous band
    /// `(zero_tol/10, zero_tol·10) · max|Γ|`, i.e. the spectrum does not
    /// cleanly separate into kernel and decaying modes at this tolerance.
    pub ambiguous_zero_cluster: bool,
}

impl DrazinInverse {
    pub fn apply(&self, x: &CMat) -> CMat {
        self.op.apply(x)
    }
}

/// Maximum relative residual allowed for `V Λ V⁻¹` to count as a faithful
/// spectral reconstruction.
const SPECTRAL_RESIDUAL_RTOL: f64 = 1e-8;

impl Superoperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Side length of the underlying matrix, `dim²`.
    pub fn matrix_order(&self) -> usize {
        self.dim * self.dim
    }

    pub fn from_matrix(dim: usize, matrix: CMat, kind: SuperopKind) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::DimensionMismatch {
                context: "Superoperator::from_matrix",
                got: matrix.nrows(),
                expected: dim * dim,
            });
        }
        Ok(Self { dim, matrix, kind })
    }

    /// Build the matrix of a linear operator map by applying it to each of
    /// the `d²` matrix units `E_ij = |i⟩⟨j|`.
    pub fn from_action(dim: usize, kind: SuperopKind, action: impl Fn(&CMat) -> CMat) -> Self {
        let order = dim * dim;
        let mut matrix = CMat::zeros((order, order));
        for j in 0..dim {
            for i in 0..dim {
                let mut unit = CMat::zeros((dim, dim));
                unit[(i, j)] = c(1.0, 0.0);
                let image = vectorize_matrix(&action(&unit));
                let col = i + dim * j;
                for row in 0..order {
                    matrix[(row, col)] = image[row];
                }
            }
        }
        Self { dim, matrix, kind }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMat::eye(dim * dim),
            kind: SuperopKind::General,
        }
    }

    pub fn zero(dim: usize, kind: SuperopKind) -> Self {
        Self {
            dim,
            matrix: CMat::zeros((dim * dim, dim * dim)),
            kind,
        }
    }

    /// Apply to an operator: `unvec(M · vec(X))`.
    pub fn apply(&self, x: &CMat) -> CMat {
        unvectorize(&self.matrix.dot(&vectorize_matrix(x)), self.dim)
    }

    /// Hilbert–Schmidt adjoint `S̃`, satisfying `⟨X, S[Y]⟩ = ⟨S̃[X], Y⟩`.
    /// In the vectorized basis this is the conjugate transpose.
    pub fn adjoint(&self) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: dagger(&self.matrix),
            kind: SuperopKind::Adjoint,
        }
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: self.matrix.dot(&other.matrix),
            kind: SuperopKind::General,
        }
    }

    /// Largest value of `|Tr[S[X]]|` over unit matrix-units; zero (to
    /// rounding) exactly when the map annihilates traces, as semigroup
    /// generators must.
    pub fn max_trace_defect(&self) -> f64 {
        // Tr[unvec(y)] = Σ_i y[i + d·i]  ⇒  the trace functional is the row
        // covector picking those entries; evaluate it against every column.
        let order = self.matrix_order();
        let mut worst = 0.0f64;
        for col in 0..order {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..self.dim {
                s += self.matrix[(i + self.dim * i, col)];
            }
            worst = worst.max(s.norm());
        }
        worst
    }

    /// Spectral decomposition via the general complex eigensolver.
    pub fn spectral(&self) -> Result<SuperopSpectrum> {
        let (eigenvalues, vectors) = self
            .matrix
            .eig()
            .map_err(|e| Error::Eigensolver(format!("superoperator eig: {e}")))?;
        let vectors_inv = vectors.inv().map_err(|_| Error::DefectiveSuperoperator {
            residual: f64::INFINITY,
            condition: f64::INFINITY,
        })?;
        let condition = one_norm(&vectors) * one_norm(&vectors_inv);

        // Residual of V Λ V⁻¹ against the original matrix.
        let mut scaled = vectors.clone();
        for (k, lambda) in eigenvalues.iter().enumerate() {
            for v in scaled.column_mut(k).iter_mut() {
                *v *= *lambda;
            }
        }
        let recon = scaled.dot(&vectors_inv);
        let scale = max_abs(&self.matrix).max(1.0);
        let residual = max_abs(&(&recon - &self.matrix)) / scale;
        if residual > SPECTRAL_RESIDUAL_RTOL {
            return Err(Error::DefectiveSuperoperator {
                residual,
                condition,
            });
        }
        Ok(SuperopSpectrum {
            eigenvalues,
            vectors,
            vectors_inv,
            condition,
        })
    }

    /// Drazin pseudo-inverse `S⁺ = Σ_{Γ≠0} Γ⁻¹ P_Γ` (spectral construction).
    pub fn drazin_inverse(&self, opts: DrazinOptions) -> Result<DrazinInverse> {
        let order = self.matrix_order();
        let scale = max_abs(&self.matrix);
        if scale == 0.0 {
            return Ok(DrazinInverse {
                op: Superoperator::zero(self.dim, SuperopKind::Drazin),
                eigvec_condition: 1.0,
                kernel_dim: order,
                ambiguous_zero_cluster: false,
            });
        }
        let spectrum = self.spectral()?;
        let max_mag = spectrum
            .eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let cut = opts.zero_tol * max_mag;
        let band_lo = cut / 10.0;
        let band_hi = cut * 10.0;

        let mut kernel_dim = 0usize;
        let mut ambiguous = false;
        let mut inv_diag = Array1::zeros(order);
        for (k, lambda) in spectrum.eigenvalues.iter().enumerate() {
            let mag = lambda.norm();
            if mag > band_lo && mag < band_hi {
                ambiguous = true;
            }
            if mag <= cut {
                kernel_dim += 1;
                inv_diag[k] = C64::new(0.0, 0.0);
            } else {
                inv_diag[k] = C64::new(1.0, 0.0) / lambda;
            }
        }

        let mut scaled = spectrum.vectors.clone();
        for k in 0..order {
            let w: C64 = inv_diag[k];
            for v in scaled.column_mut(k).iter_mut() {
                *v *= w;
            }
        }
        let matrix = scaled.dot(&spectrum.vectors_inv);
        Ok(DrazinInverse {
            op: Superoperator {
                dim: self.dim,
                matrix,
                kind: SuperopKind::Drazin,
            },
            eigvec_condition: spectrum.condition,
            kernel_dim,
            ambiguous_zero_cluster: ambiguous,
        })
    }
}

impl SuperopSpectrum {
    /// `1/min|Re Γ|` over eigenvalues outside the kernel cut: the slowest
    /// relaxation time of the decaying modes.
    pub fn slowest_relaxation_time(&self, zero_tol: f64) -> Option<f64> {
        let max_mag = self
            .eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let cut = zero_tol * max_mag;
        let min_decay = self
            .eigenvalues
            .iter()
            .filter(|z| z.norm() > cut)
            .map(|z| z.re.abs())
            .fold(f64::INFINITY, f64::min);
        if min_decay.is_finite() && min_decay > 0.0 {
            Some(1.0 / min_decay)
        } else {
            None
        }
    }
}

/// Matrix 1-norm (maximum absolute column sum).
fn one_norm(a: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for col in a.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        worst = worst.max(s);
    }
    worst
}
