//! Crate-wide error type.
//!
//! Numerical routines return structured diagnostics (what failed, by how
//! much, against which threshold) so that callers can distinguish a bad
//! configuration from a genuine numerical breakdown.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("dimension mismatch in {context}: got {got}, expected {expected}")]
    DimensionMismatch {
        context: &'static str,
        got: usize,
        expected: usize,
    },

    #[error(
        "degenerate Hamiltonian spectrum: levels {lower} and {upper} are \
         separated by {gap:.3e} (threshold {tol:.3e}); non-degenerate spectra required"
    )]
    DegenerateSpectrum {
        lower: usize,
        upper: usize,
        gap: f64,
        tol: f64,
    },

    #[error(
        "superoperator is defective or too ill-conditioned for spectral inversion: \
         reconstruction residual {residual:.3e}, eigenvector condition {condition:.3e}"
    )]
    DefectiveSuperoperator { residual: f64, condition: f64 },

    #[error(
        "detailed balance violated at ω = {omega:.6e}: \
         rate ratio γ(ω)/γ(−ω) = {ratio:.12e} but e^(βħω) = {expected:.12e}"
    )]
    DetailedBalance {
        omega: f64,
        ratio: f64,
        expected: f64,
    },

    #[error(
        "state positivity lost at t = {t:.6e}: minimum eigenvalue {min_eigenvalue:.3e} \
         is below {threshold:.3e} (integration step too large)"
    )]
    PositivityLost {
        t: f64,
        min_eigenvalue: f64,
        threshold: f64,
    },

    #[error("state invariant violated at t = {t:.6e}: {what}")]
    StateInvariant { t: f64, what: String },

    #[error(
        "finite-difference derivative failed its step-halving consistency check \
         at t = {t:.6e}: disagreement {disagreement:.3e} exceeds {tol:.3e}"
    )]
    DerivativeCheck { t: f64, disagreement: f64, tol: f64 },

    #[error(
        "density-matrix spectrum is degenerate at t = {t:.6e} (gap {gap:.3e}); \
         the eigenbasis-dependent dissipator split is undefined there"
    )]
    StateDegenerate { t: f64, gap: f64 },

    #[error(
        "observable identity violated: {what} deviates by {deviation:.3e} (tolerance {tol:.3e})"
    )]
    IdentityViolation {
        what: &'static str,
        deviation: f64,
        tol: f64,
    },

    #[error("at t = {t:.6e}: {source}")]
    AtTime {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wrap this error with the trajectory time at which it occurred.
    pub fn at_time(self, t: f64) -> Error {
        Error::AtTime {
            t,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
