//! Thermal GKSL generator assembly for a driven system attached to a heat
//! bath.
//!
//! Given a drive `H(t)` with non-degenerate spectrum and a bath at inverse
//! temperature `β`, the dissipator uses one jump operator `L = |ε_m⟩⟨ε_n|`
//! per ordered pair of energy levels, at Bohr frequency `ω = ε_n − ε_m`
//! (ħ = 1), with rates obeying detailed balance `γ(ω)/γ(−ω) = e^{βω}`.
//! That structure makes the instantaneous Gibbs state stationary and the
//! population / coherence sectors decouple.
//!
//! [`GeneratorBundle`] materializes, at one time slice, every superoperator
//! the thermodynamic analysis needs: `𝓛 = 𝓗 + 𝓓`, the symmetrized jump part
//! `𝓓^sym`, Hilbert–Schmidt adjoints, and the Drazin inverses of `𝓛`, `𝓓`,
//! and `𝓗` together with their adjoints.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::operator_algebra::{
    anticommutator, c, commutator, dagger, eigensystem_derivative, hermitian_eigensystem, max_abs,
    outer, CMat, DrazinInverse, DrazinOptions, EigenDerivative, EigenSystem, SuperopKind,
    Superoperator,
};

/// Default centered finite-difference step for drive derivatives.
pub const FD_STEP: f64 = 1e-5;
/// Two finite-difference estimates at steps `h` and `h/2` must agree to this
/// (relative to the drive's energy scale) or the derivative is rejected.
pub const FD_CONSISTENCY_TOL: f64 = 1e-6;
/// Bohr frequencies closer than this are treated as one frequency channel.
pub const BOHR_CLUSTER_TOL: f64 = 1e-9;
/// Maximum relative defect tolerated in `γ(ω)/γ(−ω) = e^{βω}`.
pub const DETAILED_BALANCE_RTOL: f64 = 1e-10;
/// Residual tolerance for stationarity of the Gibbs state, `𝓛[ρ_eq] ≈ 0`.
pub const STATIONARITY_TOL: f64 = 1e-9;
/// Residual tolerance for the eigenoperator identity `[L, H] = ωL`.
pub const EIGENOPERATOR_TOL: f64 = 1e-9;

/// Bath at fixed inverse temperature with Bose–Einstein transition rates.
///
/// `rate(ω) = γ₀(N(ω)+1)` for emission (`ω > 0`) and `γ₀N(|ω|)` for
/// absorption (`ω < 0`), with `N(ω) = 1/(e^{βω}−1)`.  `absorption_scale`
/// multiplies the absorption rates; any value other than 1 deliberately
/// breaks detailed balance (useful to exercise the failure path) and is
/// rejected by [`BathSpec::require_detailed_balance`].
#[derive(Debug, Clone, Copy)]
pub struct BathSpec {
    /// Inverse temperature β (1/energy; k_B = 1).
    pub beta: f64,
    /// Base coupling rate γ₀ (1/time).
    pub gamma0: f64,
    /// Multiplier on absorption rates; 1.0 restores detailed balance.
    pub absorption_scale: f64,
}

impl BathSpec {
    /// Thermal bath satisfying detailed balance.
    pub fn thermal(beta: f64, gamma0: f64) -> Self {
        Self {
            beta,
            gamma0,
            absorption_scale: 1.0,
        }
    }

    /// Bose–Einstein occupation `N = 1/(e^{βω}−1)` for `ω > 0`.
    pub fn occupation(&self, omega: f64) -> f64 {
        1.0 / (self.beta * omega).exp_m1()
    }

    /// Transition rate at signed Bohr frequency `ω` (`ω > 0`: emission).
    pub fn rate(&self, omega: f64) -> f64 {
        if omega > 0.0 {
            self.gamma0 * (self.occupation(omega) + 1.0)
        } else if omega < 0.0 {
            self.absorption_scale * self.gamma0 * self.occupation(-omega)
        } else {
            0.0
        }
    }

    /// Relative defect of `rate(ω)/rate(−ω) = e^{βω}` at `ω > 0`.
    /// Channels whose absorption rate has underflowed to zero are skipped
    /// (they contribute nothing to the dynamics).
    pub fn detailed_balance_defect(&self, omega: f64) -> f64 {
        let up = self.rate(omega);
        let down = self.rate(-omega);
        if down == 0.0 || up == 0.0 {
            return 0.0;
        }
        let expected = (self.beta * omega).exp();
        ((up / down) - expected).abs() / expected
    }

    /// Error unless detailed balance holds at every supplied frequency.
    pub fn require_detailed_balance(&self, omegas: &[f64]) -> Result<()> {
        for &omega in omegas {
            let w = omega.abs();
            if w == 0.0 {
                continue;
            }
            let defect = self.detailed_balance_defect(w);
            if defect > DETAILED_BALANCE_RTOL {
                return Err(Error::DetailedBalance {
                    omega: w,
                    ratio: self.rate(w) / self.rate(-w),
                    expected: (self.beta * w).exp(),
                });
            }
        }
        Ok(())
    }
}

/// Structural class of a drive protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveClass {
    /// Both eigenvalues and eigenvectors of `H(t)` may move.
    General,
    /// Eigenvectors fixed; only eigenvalues move (commuting drive).
    Classical,
    /// Eigenvalues fixed; only eigenvectors move.
    Quantum,
}

/// A time-dependent Hamiltonian protocol.
///
/// `hamiltonian_dot` defaults to a Richardson-extrapolated centered finite
/// difference with a built-in consistency check; implementations with an
/// analytic derivative should override it.
pub trait Drive {
    fn dim(&self) -> usize;

    fn hamiltonian(&self, t: f64) -> CMat;

    fn hamiltonian_dot(&self, t: f64) -> Result<CMat> {
        finite_difference_dot(&|s| self.hamiltonian(s), t, FD_STEP)
    }

    fn drive_class(&self) -> DriveClass {
        DriveClass::General
    }

    fn label(&self) -> String {
        "custom".to_string()
    }
}

/// Centered finite-difference derivative of a matrix-valued function with
/// Richardson extrapolation.  The estimates at steps `h` and `h/2` must agree
/// to [`FD_CONSISTENCY_TOL`] relative to the function's scale.
pub fn finite_difference_dot(f: &dyn Fn(f64) -> CMat, t: f64, h: f64) -> Result<CMat> {
    let central = |step: f64| (&f(t + step) - &f(t - step)) * c(0.5 / step, 0.0);
    let d_h = central(h);
    let d_h2 = central(0.5 * h);
    let scale = max_abs(&f(t)).max(1.0);
    let disagreement = max_abs(&(&d_h2 - &d_h)) / scale;
    if disagreement > FD_CONSISTENCY_TOL {
        return Err(Error::DerivativeCheck {
            t,
            disagreement,
            tol: FD_CONSISTENCY_TOL,
        });
    }
    // Richardson: error of the centered difference is O(h²), so the
    // combination below cancels the leading term.
    Ok((&d_h2 * c(4.0, 0.0) - &d_h) * c(1.0 / 3.0, 0.0))
}

/// One thermal jump channel `L = |ε_to⟩⟨ε_from|` at Bohr frequency
/// `ω = ε_from − ε_to`.
#[derive(Debug, Clone)]
pub struct JumpOperator {
    /// Signed Bohr frequency of the transition (after channel clustering).
    pub omega: f64,
    /// Rate `γ(ω)` attached by the bath.
    pub rate: f64,
    /// Source level index `n` (the level the jump leaves).
    pub from_level: usize,
    /// Destination level index `m` (the level the jump enters).
    pub to_level: usize,
    /// The operator `|ε_m⟩⟨ε_n|` in the ambient basis.
    pub op: CMat,
}

/// Jump operators for all ordered level pairs of a non-degenerate spectrum.
///
/// Frequencies equal within [`BOHR_CLUSTER_TOL`] are snapped to a common
/// representative so that rates for shared channels (and for the `±ω`
/// partners) are evaluated at identical arguments.
pub fn build_jump_operators(eig: &EigenSystem, bath: &BathSpec) -> Result<Vec<JumpOperator>> {
    eig.require_nondegenerate()?;
    let d = eig.dim();

    // Cluster the distinct |ω| values.
    let mut mags: Vec<f64> = Vec::new();
    for m in 0..d {
        for n in 0..d {
            if m != n {
                mags.push((eig.values[n] - eig.values[m]).abs());
            }
        }
    }
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut reps: Vec<f64> = Vec::new(); // cluster representatives (means)
    let mut cluster: Vec<f64> = Vec::new();
    for w in mags {
        if let Some(&last) = cluster.last() {
            if (w - last).abs() > BOHR_CLUSTER_TOL {
                reps.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
                cluster.clear();
            }
        }
        cluster.push(w);
    }
    if !cluster.is_empty() {
        reps.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
    }
    let snap = |w: f64| -> f64 {
        reps.iter()
            .copied()
            .min_by(|a, b| (a - w).abs().partial_cmp(&(b - w).abs()).unwrap())
            .unwrap_or(w)
    };

    let mut jumps = Vec::with_capacity(d * (d - 1));
    for m in 0..d {
        for n in 0..d {
            if m == n {
                continue;
            }
            let omega = {
                let raw = eig.values[n] - eig.values[m];
                raw.signum() * snap(raw.abs())
            };
            let rate = bath.rate(omega);
            let vm = eig.vector(m);
            let vn = eig.vector(n);
            jumps.push(JumpOperator {
                omega,
                rate,
                from_level: n,
                to_level: m,
                op: outer(&vm, &vn),
            });
        }
    }
    Ok(jumps)
}

/// Everything the thermodynamic analysis needs at one time slice.
#[derive(Debug, Clone)]
pub struct GeneratorBundle {
    pub t: f64,
    pub beta: f64,
    /// `H(t)`.
    pub h: CMat,
    /// `Ḣ(t)`.
    pub h_dot: CMat,
    /// Eigensystem of `H(t)` with gauge fixed (optionally anchored).
    pub h_eig: EigenSystem,
    /// Eigenvalue rates and eigenvector overlaps generated by `Ḣ`.
    pub h_der: EigenDerivative,
    pub jumps: Vec<JumpOperator>,
    /// Instantaneous Gibbs state `e^{−βH}/Z`.
    pub rho_eq: CMat,
    /// Full generator `𝓛 = 𝓗 + 𝓓`.
    pub liouvillian: Superoperator,
    /// Commutator part `𝓗[X] = −i[H, X]`.
    pub unitary_part: Superoperator,
    /// Jump part `𝓓`.
    pub dissipator: Superoperator,
    /// Sign-flipped jump part `𝓓^sym[X] = Σ γ(LXL† + ½{L†L, X})`.
    pub dissipator_sym: Superoperator,
    /// Hilbert–Schmidt adjoint `𝓛̃`.
    pub liouvillian_adjoint: Superoperator,
    /// `𝓛⁺`.
    pub l_drazin: DrazinInverse,
    /// `𝓛̃⁺ = (𝓛⁺)†`.
    pub l_drazin_adjoint: Superoperator,
    /// `𝓓⁺`.
    pub d_drazin: DrazinInverse,
    /// `𝓓̃⁺ = (𝓓⁺)†`.
    pub d_drazin_adjoint: Superoperator,
    /// `𝓗⁺`.
    pub h_drazin: DrazinInverse,
}

impl GeneratorBundle {
    pub fn dim(&self) -> usize {
        self.h_eig.dim()
    }

    /// `𝓛̃⁺[Ḣ]` — the central dressed-drive operator of the analysis.
    pub fn lad_drazin_h_dot(&self) -> CMat {
        self.l_drazin_adjoint.apply(&self.h_dot)
    }

    /// Equilibrium populations `⟨ε_n|ρ_eq|ε_n⟩`.
    pub fn eq_populations(&self) -> Array1<f64> {
        gibbs_populations(&self.h_eig.values, self.beta)
    }
}

/// Gibbs weights `e^{−βε_n}/Z`, shifted by the ground energy for overflow
/// safety.
pub fn gibbs_populations(values: &Array1<f64>, beta: f64) -> Array1<f64> {
    let e0 = values.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Array1<f64> = values.mapv(|e| (-beta * (e - e0)).exp());
    let z: f64 = weights.sum();
    weights / z
}

/// Dissipator action `Σ_k γ_k (L_k X L_k† − ½{L_k†L_k, X})` in operator form.
pub fn dissipator_action(jumps: &[JumpOperator], x: &CMat) -> CMat {
    let d = x.nrows();
    let mut out = CMat::zeros((d, d));
    for j in jumps {
        let l = &j.op;
        let ldag = dagger(l);
        let sandwich = l.dot(x).dot(&ldag);
        let number = ldag.dot(l);
        out = out + (sandwich - anticommutator(&number, x) * c(0.5, 0.0)) * c(j.rate, 0.0);
    }
    out
}

/// Symmetrized dissipator `Σ_k γ_k (L_k X L_k† + ½{L_k†L_k, X})`.
pub fn symmetric_dissipator_action(jumps: &[JumpOperator], x: &CMat) -> CMat {
    let d = x.nrows();
    let mut out = CMat::zeros((d, d));
    for j in jumps {
        let l = &j.op;
        let ldag = dagger(l);
        let sandwich = l.dot(x).dot(&ldag);
        let number = ldag.dot(l);
        out = out + (sandwich + anticommutator(&number, x) * c(0.5, 0.0)) * c(j.rate, 0.0);
    }
    out
}

/// The generator (and the energy eigensystem it was built from) without any
/// Drazin machinery — the cheap path for integrator stages.
pub fn assemble_liouvillian(
    drive: &dyn Drive,
    bath: &BathSpec,
    t: f64,
    anchor: Option<&EigenSystem>,
) -> Result<(Superoperator, EigenSystem)> {
    let h = drive.hamiltonian(t);
    let h_eig = hermitian_eigensystem(&h, anchor)?;
    let jumps = build_jump_operators(&h_eig, bath)?;
    let omegas: Vec<f64> = jumps.iter().map(|j| j.omega).collect();
    bath.require_detailed_balance(&omegas)?;
    let d = drive.dim();
    let unitary = Superoperator::from_action(d, SuperopKind::UnitaryPart, |x| {
        commutator(&h, x) * c(0.0, -1.0)
    });
    let dissip =
        Superoperator::from_action(d, SuperopKind::Dissipator, |x| dissipator_action(&jumps, x));
    let full = Superoperator::from_matrix(
        d,
        &unitary.matrix + &dissip.matrix,
        SuperopKind::Liouvillian,
    )?;
    Ok((full, h_eig))
}

/// Assemble the complete [`GeneratorBundle`] at time `t`.
///
/// Construction-time invariants enforced here: non-degenerate spectrum,
/// detailed balance at every Bohr frequency, the eigenoperator identity
/// `[L, H] = ωL`, and stationarity `𝓛[ρ_eq] = 0`.
pub fn assemble_generators(
    drive: &dyn Drive,
    bath: &BathSpec,
    t: f64,
    anchor: Option<&EigenSystem>,
) -> Result<GeneratorBundle> {
    let d = drive.dim();
    let h = drive.hamiltonian(t);
    let h_dot = drive.hamiltonian_dot(t)?;
    let h_eig = hermitian_eigensystem(&h, anchor)?;
    let h_der = eigensystem_derivative(&h_eig, &h_dot)?;
    let jumps = build_jump_operators(&h_eig, bath)?;
    let omegas: Vec<f64> = jumps.iter().map(|j| j.omega).collect();
    bath.require_detailed_balance(&omegas)?;

    let energy_scale = h_eig.spectral_range().max(1.0);
    for j in &jumps {
        let defect = max_abs(&(commutator(&j.op, &h) - &j.op * c(j.omega, 0.0)));
        if defect > EIGENOPERATOR_TOL * energy_scale {
            return Err(Error::IdentityViolation {
                what: "eigenoperator identity [L, H] = ωL",
                deviation: defect,
                tol: EIGENOPERATOR_TOL * energy_scale,
            });
        }
    }

    let rho_eq = {
        let p = gibbs_populations(&h_eig.values, bath.beta);
        h_eig.from_basis_diag(p.as_slice().unwrap())
    };

    let unitary_part = Superoperator::from_action(d, SuperopKind::UnitaryPart, |x| {
        commutator(&h, x) * c(0.0, -1.0)
    });
    let dissipator =
        Superoperator::from_action(d, SuperopKind::Dissipator, |x| dissipator_action(&jumps, x));
    let dissipator_sym = Superoperator::from_action(d, SuperopKind::Dissipator, |x| {
        symmetric_dissipator_action(&jumps, x)
    });
    let liouvillian = Superoperator::from_matrix(
        d,
        &unitary_part.matrix + &dissipator.matrix,
        SuperopKind::Liouvillian,
    )?;
    let liouvillian_adjoint = liouvillian.adjoint();

    let stationarity = max_abs(&liouvillian.apply(&rho_eq));
    let rate_scale = jumps.iter().map(|j| j.rate).fold(0.0f64, f64::max).max(1.0);
    if stationarity > STATIONARITY_TOL * rate_scale {
        return Err(Error::IdentityViolation {
            what: "stationarity of the Gibbs state",
            deviation: stationarity,
            tol: STATIONARITY_TOL * rate_scale,
        });
    }

    let opts = DrazinOptions::default();
    let l_drazin = liouvillian.drazin_inverse(opts)?;
    let l_drazin_adjoint = l_drazin.op.adjoint();
    let d_drazin = dissipator.drazin_inverse(opts)?;
    let d_drazin_adjoint = d_drazin.op.adjoint();

    // The coherent part's spectral data is known exactly: its eigenvectors
    // are the energy-basis matrix units |ε_m⟩⟨ε_n| (an orthonormal set) with
    // eigenvalues −i(ε_m − ε_n).  Assembling the group inverse directly in
    // that basis — multiply off-diagonal entries by i/(ε_m − ε_n), zero the
    // diagonal — avoids the dense eigensolve, whose kernel basis can come
    // out nearly collinear and cost ~8 digits in the projector.
    let h_drazin = {
        let op = Superoperator::from_action(d, SuperopKind::Drazin, |x| {
            let mut xb = h_eig.to_basis(x);
            for m in 0..d {
                for n in 0..d {
                    if m == n {
                        xb[(m, n)] = c(0.0, 0.0);
                    } else {
                        let gap = h_eig.values[m] - h_eig.values[n];
                        xb[(m, n)] *= c(0.0, 1.0) / c(gap, 0.0);
                    }
                }
            }
            h_eig.from_basis(&xb)
        });
        DrazinInverse {
            op,
            eigvec_condition: 1.0,
            kernel_dim: d,
            ambiguous_zero_cluster: false,
        }
    };

    Ok(GeneratorBundle {
        t,
        beta: bath.beta,
        h,
        h_dot,
        h_eig,
        h_der,
        jumps,
        rho_eq,
        liouvillian,
        unitary_part,
        dissipator,
        dissipator_sym,
        liouvillian_adjoint,
        l_drazin,
        l_drazin_adjoint,
        d_drazin,
        d_drazin_adjoint,
        h_drazin,
    })
}

/// Diagonal / non-diagonal split of the dissipator action at state `ρ`:
/// `𝓓[ρ] = D_d − i[H_D, ρ]` with `D_d` the part diagonal in the eigenbasis
/// of `ρ` and `H_D` a Hermitian effective Hamiltonian built from the
/// off-diagonal part.  Requires a non-degenerate `ρ` spectrum.
pub fn dissipator_split(bundle: &GeneratorBundle, rho: &CMat) -> Result<(CMat, CMat)> {
    let rho_eig = hermitian_eigensystem(rho, None)?;
    let gap = rho_eig.min_gap();
    if gap <= 1e-10 {
        return Err(Error::StateDegenerate { t: bundle.t, gap });
    }
    let d = rho_eig.dim();
    let image = bundle.dissipator.apply(rho);
    let image_b = rho_eig.to_basis(&image);

    let mut d_d_b = CMat::zeros((d, d));
    let mut h_d_b = CMat::zeros((d, d));
    for m in 0..d {
        for n in 0..d {
            if m == n {
                d_d_b[(m, m)] = c(image_b[(m, m)].re, 0.0);
            } else {
                let dp = rho_eig.values[n] - rho_eig.values[m];
                h_d_b[(m, n)] = c(0.0, 1.0) * image_b[(m, n)] / c(dp, 0.0);
            }
        }
    }
    let d_d = rho_eig.from_basis(&d_d_b);
    let h_d = rho_eig.from_basis(&h_d_b);

    let herm = crate::operator_algebra::herm_defect(&h_d);
    if herm > 1e-9 * max_abs(&h_d).max(1.0) {
        return Err(Error::IdentityViolation {
            what: "Hermiticity of the effective bath Hamiltonian",
            deviation: herm,
            tol: 1e-9,
        });
    }
    let recon = &d_d + &(commutator(&h_d, rho) * c(0.0, -1.0));
    let resid = max_abs(&(&recon - &image));
    if resid > 1e-9 * max_abs(&image).max(1.0) {
        return Err(Error::IdentityViolation {
            what: "dissipator diagonal/non-diagonal reconstruction",
            deviation: resid,
            tol: 1e-9,
        });
    }
    Ok((d_d, h_d))
}

/// Check the structural invariant of a drive's declared class over sampled
/// times: classical drives keep every spectral projector fixed; quantum
/// drives keep every eigenvalue fixed (tolerance 1e-8).
pub fn validate_drive_class(drive: &dyn Drive, times: &[f64]) -> Result<()> {
    const TOL: f64 = 1e-8;
    let class = drive.drive_class();
    if matches!(class, DriveClass::General) || times.is_empty() {
        return Ok(());
    }
    let eig0 = hermitian_eigensystem(&drive.hamiltonian(times[0]), None)?;
    let mut anchor = eig0.clone();
    for &t in &times[1..] {
        let eig = hermitian_eigensystem(&drive.hamiltonian(t), Some(&anchor))?;
        match class {
            DriveClass::Classical => {
                for n in 0..eig.dim() {
                    let defect = max_abs(&(&eig.projector(n) - &eig0.projector(n)));
                    if defect > TOL {
                        return Err(Error::IdentityViolation {
                            what: "time-independence of eigenprojectors (commuting drive)",
                            deviation: defect,
                            tol: TOL,
                        });
                    }
                }
            }
            DriveClass::Quantum => {
                for n in 0..eig.dim() {
                    let defect = (eig.values[n] - eig0.values[n]).abs();
                    if defect > TOL {
                        return Err(Error::IdentityViolation {
                            what: "time-independence of eigenvalues (isospectral drive)",
                            deviation: defect,
                            tol: TOL,
                        });
                    }
                }
            }
            DriveClass::General => unreachable!(),
        }
        anchor = eig;
    }
    Ok(())
}
