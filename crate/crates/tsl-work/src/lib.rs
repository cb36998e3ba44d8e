//! Driven open-quantum-system simulator with thermodynamic speed-limit
//! verification.
//!
//! The crate integrates Markovian master equations in GKSL form for
//! finite-dimensional systems under slow parametric driving, splits the work
//! rate into classical and coherent contributions, and checks — pointwise in
//! time — a family of bounds on the non-adiabatic part of the work rate built
//! from entropy production, dynamical activity, and quantum-geometric
//! quantities.
//!
//! Layering, bottom to top:
//!
//! * [`operator_algebra`] — complex matrices, Hermitian eigensystems with
//!   gauge-continuous eigenvectors, superoperators, and Drazin inverses.
//! * [`sampling`] — seeded random operators for randomized checks.
//! * [`lindblad`] — thermal jump operators, detailed balance, and generator
//!   assembly for a driven system attached to a heat bath.
//! * [`twolevel`] — closed-form reference results for a driven two-level
//!   system, used as an independent oracle.
//! * [`dynamics`] — fixed-step propagation of the master equation with state
//!   validity monitoring.
//! * [`thermo`] — work decomposition, entropy production, activity, quantum
//!   and classical Fisher information, and the speed-limit bounds.
//! * [`scenario`], [`report`], [`runner`] — configuration, verification
//!   checks, and the command-line entry points.

pub mod dynamics;
pub mod error;
pub mod lindblad;
pub mod operator_algebra;
pub mod report;
pub mod runner;
pub mod sampling;
pub mod scenario;
pub mod thermo;
pub mod twolevel;

pub use error::{Error, Result};
pub use operator_algebra::{c, CMat, CVec, C64};
