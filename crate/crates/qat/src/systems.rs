//! Preset driven systems and their closed-form reference solutions.
//!
//! Frequencies are dimensionless (scaled by the unperturbed transition
//! frequency) and two-level systems use |0⟩ = excited, |1⟩ = ground.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::expansion::{qat_expand, ExpansionConfig, ExpansionError, QatExpansion};
use crate::fourier::{FourierError, FourierOperator};
use crate::linalg::{self, pauli, OperatorMatrix};
use crate::propagator::{interaction_picture, PropagatorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error("lambda must lie in (0, 1), got {0}")]
    InvalidLambda(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("detuning {detuning} is not far from resonance (|detuning| must exceed lambda = {lambda})")]
    NotFarDetuned { detuning: f64, lambda: f64 },
    #[error("basis dimension {dim} is below the minimum {min}")]
    BasisTooSmall { dim: usize, min: usize },
    #[error("closed form outside its branch domain: {0}")]
    BranchDomain(String),
    #[error("detuned Raman ansatz failed: {0}")]
    AnsatzFailure(String),
}

#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub name: String,
    pub dim: usize,
    /// Schrödinger-picture unperturbed Hamiltonian.
    pub h0: OperatorMatrix,
    /// Schrödinger-picture perturbation, `v_orders[n−1]` multiplies `λⁿ`.
    pub v_orders: Vec<FourierOperator>,
    /// Interaction-picture perturbation with exact analytic frequencies.
    pub interaction: Vec<FourierOperator>,
    pub lambda: f64,
    pub base_freqs: Vec<(String, f64)>,
    pub default_cutoff: f64,
}

impl SystemSpec {
    /// `H_I(s; λ) = Σ λⁿ interaction[n−1]`.
    pub fn interaction_hamiltonian(&self) -> Result<FourierOperator, FourierError> {
        FourierOperator::weighted_sum(&self.interaction, self.lambda)
    }

    /// Interaction picture recomputed numerically from `h0` and `v_orders`.
    pub fn interaction_from_parts(&self) -> Result<Vec<FourierOperator>, PropagatorError> {
        self.v_orders.iter().map(|v| interaction_picture(&self.h0, v)).collect()
    }

    pub fn expand(&self, order: usize, cutoff: Option<f64>) -> Result<QatExpansion, ExpansionError> {
        let cfg = ExpansionConfig::new(order, cutoff.unwrap_or(self.default_cutoff), self.lambda);
        qat_expand(&self.interaction, &cfg)
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        if (out.default_cutoff - out.lambda).abs() <= f64::EPSILON * out.lambda.max(1.0) {
            out.default_cutoff = lambda;
        }
        out.lambda = lambda;
        out
    }

    pub fn max_base_frequency(&self) -> f64 {
        self.base_freqs.iter().fold(0.0_f64, |a, (_, f)| a.max(f.abs()))
    }
}

fn check_lambda(lambda: f64) -> Result<(), SystemError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(SystemError::InvalidLambda(lambda));
    }
    Ok(())
}

fn check_finite(name: &str, x: f64) -> Result<(), SystemError> {
    if !x.is_finite() {
        return Err(SystemError::InvalidParameter(format!("{name} must be finite, got {x}")));
    }
    Ok(())
}

/// Complex drive `H = σ_z/2 + λ(e^{−iΛ_ω s}σ₊ + h.c.)`, `Λ_ω = 1 + Λ_Δ`.
pub fn build_rabi_complex(lambda: f64, detuning: f64) -> Result<SystemSpec, SystemError> {
    check_lambda(lambda)?;
    check_finite("detuning", detuning)?;
    let omega = 1.0 + detuning;
    let v = FourierOperator::hermitian_pair(omega, pauli::sigma_plus())?;
    let hi = FourierOperator::hermitian_pair(detuning, pauli::sigma_plus())?;
    let far = detuning.abs() > lambda;
    Ok(SystemSpec {
        name: "rabi_complex".into(),
        dim: 2,
        h0: pauli::sigma_z().scale(0.5),
        v_orders: vec![v],
        interaction: vec![hi],
        lambda,
        base_freqs: vec![("detuning".into(), detuning)],
        default_cutoff: if far { 0.0 } else { lambda },
    })
}

/// Real drive `H = σ_z/2 + 2λ cos(Λ_ω s) σ_x`.
pub fn build_rabi_real(lambda: f64, detuning: f64) -> Result<SystemSpec, SystemError> {
    check_lambda(lambda)?;
    check_finite("detuning", detuning)?;
    let omega = 1.0 + detuning;
    if omega <= 0.0 {
        return Err(SystemError::InvalidParameter(format!("drive frequency 1 + detuning must be positive, got {omega}")));
    }
    let sum = 2.0 + detuning;
    let v = FourierOperator::hermitian_pair(omega, pauli::sigma_x())?;
    let hi = FourierOperator::hermitian_pair(detuning, pauli::sigma_plus())?
        .add(&FourierOperator::hermitian_pair(-sum, pauli::sigma_plus())?)?;
    Ok(SystemSpec {
        name: "rabi_real".into(),
        dim: 2,
        h0: pauli::sigma_z().scale(0.5),
        v_orders: vec![v],
        interaction: vec![hi],
        lambda,
        base_freqs: vec![("detuning".into(), detuning), ("counter_rotating".into(), sum)],
        default_cutoff: lambda,
    })
}

/// Detuning at which the second-order counter-rotating shift cancels the
/// detuning in the rotating frame: `Λ_Δ = 2λ²/(2 + Λ_Δ)`.
pub fn light_shift_cancelling_detuning(lambda: f64) -> f64 {
    (1.0 + 2.0 * lambda * lambda).sqrt() - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanParams {
    pub lambda: f64,
    /// Rabi frequencies of the two tones; normalized by their maximum.
    pub omega: [f64; 2],
    pub detuning: [f64; 2],
    pub phase: [f64; 2],
    /// Energy of |r⟩ in units of the |1⟩–|2⟩ splitting.
    pub excited_energy: f64,
}

impl RamanParams {
    pub fn resonant(lambda: f64, omega: [f64; 2], detuning: f64) -> Self {
        Self { lambda, omega, detuning: [detuning; 2], phase: [0.0; 2], excited_energy: 10.0 }
    }

    /// Interaction amplitudes `a_k = (Ω_k/2Ω_max) e^{iφ_k}` on `|r⟩⟨k|`.
    pub fn amplitudes(&self) -> [Complex64; 2] {
        let max = self.omega[0].abs().max(self.omega[1].abs());
        [0, 1].map(|k| Complex64::from_polar(self.omega[k] / (2.0 * max), self.phase[k]))
    }
}

pub const RAMAN_R: usize = 2;

/// Λ system: |1⟩ = index 0 (energy 0), |2⟩ = index 1 (energy 1), |r⟩ = index 2.
pub fn build_raman(p: &RamanParams) -> Result<SystemSpec, SystemError> {
    check_lambda(p.lambda)?;
    for (k, d) in p.detuning.iter().enumerate() {
        check_finite("detuning", *d)?;
        if d.abs() <= p.lambda {
            return Err(SystemError::NotFarDetuned { detuning: *d, lambda: p.lambda });
        }
        check_finite("omega", p.omega[k])?;
        check_finite("phase", p.phase[k])?;
    }
    if p.omega.iter().all(|w| *w == 0.0) {
        return Err(SystemError::InvalidParameter("at least one Raman tone must be nonzero".into()));
    }
    check_finite("excited_energy", p.excited_energy)?;
    if p.excited_energy <= 1.0 {
        return Err(SystemError::InvalidParameter("|r⟩ must lie above |2⟩".into()));
    }
    let energies = [0.0, 1.0, p.excited_energy];
    let a = p.amplitudes();
    let mut v = FourierOperator::zero(3);
    let mut hi = FourierOperator::zero(3);
    for k in 0..2 {
        let coupling = linalg::ket_bra(3, RAMAN_R, k) * a[k];
        let laser = energies[RAMAN_R] - energies[k] + p.detuning[k];
        v = v.add(&FourierOperator::hermitian_pair(laser, coupling.clone())?)?;
        hi = hi.add(&FourierOperator::hermitian_pair(p.detuning[k], coupling)?)?;
    }
    let h0 = OperatorMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, energies.iter().map(|&e| Complex64::new(e, 0.0))));
    let mut freqs = vec![("detuning_1".into(), p.detuning[0]), ("detuning_2".into(), p.detuning[1])];
    if p.detuning[0] != p.detuning[1] {
        freqs.push(("beat".into(), p.detuning[0] - p.detuning[1]));
    }
    Ok(SystemSpec {
        name: "raman".into(),
        dim: 3,
        h0,
        v_orders: vec![v],
        interaction: vec![hi],
        lambda: p.lambda,
        base_freqs: freqs,
        default_cutoff: p.lambda,
    })
}

/// Second detuning for which the two-photon transition is resonant once the
/// second-order light shifts are included:
/// `Λ₁ − Λ₂ = (λ²/4)(|Ω̄₂|²/Λ₂ − |Ω̄₁|²/Λ₁)`, root continuously connected to `Λ₂ = Λ₁`.
pub fn raman_light_shift_cancelling_detuning(lambda: f64, detuning_1: f64, omega_bar: [f64; 2]) -> f64 {
    let a = omega_bar[0] * omega_bar[0];
    let b = omega_bar[1] * omega_bar[1];
    let p = detuning_1 + lambda * lambda * a / (4.0 * detuning_1);
    let q = lambda * lambda * b / 4.0;
    (p + p.signum() * (p * p - 4.0 * q).sqrt()) / 2.0
}

/// Far-detuned Raman parameters in the ratio Ω₁ = Δ₁/4, Ω₂ = Δ₁/5, with the
/// |1⟩–|2⟩ splitting set equal to Δ₁.
pub fn raman_fig5_params() -> RamanParams {
    let lambda = 0.25;
    let d1 = 1.0;
    let omega = [1.0, 0.8];
    let d2 = raman_light_shift_cancelling_detuning(lambda, d1, omega);
    RamanParams { lambda, omega, detuning: [d1, d2], phase: [0.0; 2], excited_energy: 10.0 }
}

/// Harmonic-oscillator lowering operator truncated to `dim` levels.
pub fn ladder(dim: usize) -> OperatorMatrix {
    let mut a = linalg::zeros(dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn position(dim: usize) -> OperatorMatrix {
    let a = ladder(dim);
    (&a + a.adjoint()).scale(std::f64::consts::FRAC_1_SQRT_2)
}

pub fn momentum(dim: usize) -> OperatorMatrix {
    let a = ladder(dim);
    (a.adjoint() - &a) * Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWellParams {
    /// `ω₀/ω_rf`.
    pub lambda: f64,
    /// `ω_dc/ω_eff`.
    pub dc_ratio: f64,
    /// Quartic coupling with ħ = m = ω_rf = 1.
    pub g: f64,
    pub basis_dim: usize,
}

impl DoubleWellParams {
    pub fn figure_defaults() -> Self {
        Self { lambda: 0.2, dc_ratio: 1.5, g: 1.75e-2, basis_dim: 60 }
    }

    pub fn omega_eff(&self) -> f64 {
        self.lambda * self.lambda / std::f64::consts::SQRT_2
    }

    pub fn omega_dc(&self) -> f64 {
        self.dc_ratio * self.omega_eff()
    }

    /// Expected `x′²` coefficient of the summed effective Hamiltonian.
    pub fn expected_x2(&self) -> f64 {
        0.5 * (self.omega_eff().powi(2) - self.omega_dc().powi(2)) / self.lambda
    }

    /// Expected `x′⁴` coefficient of the summed effective Hamiltonian.
    pub fn expected_x4(&self) -> f64 {
        self.g / (4.0 * self.lambda * self.lambda)
    }
}

pub const DOUBLE_WELL_MIN_DIM: usize = 30;

/// Rf-modulated trap with DC and quartic terms, in time `s = ω_rf t` and
/// oscillator units of `ω₀`; no interaction picture is taken (`H₀ = 0`).
pub fn build_double_well(p: &DoubleWellParams) -> Result<SystemSpec, SystemError> {
    check_lambda(p.lambda)?;
    check_finite("dc_ratio", p.dc_ratio)?;
    check_finite("g", p.g)?;
    if p.basis_dim < DOUBLE_WELL_MIN_DIM {
        return Err(SystemError::BasisTooSmall { dim: p.basis_dim, min: DOUBLE_WELL_MIN_DIM });
    }
    let m = p.basis_dim;
    let x = position(m);
    let pm = momentum(m);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let p2 = &pm * &pm;
    let w0 = p.lambda;
    let h1 = FourierOperator::constant(p2.scale(0.5)).add(&FourierOperator::hermitian_pair(1.0, x2.scale(0.25))?)?;
    let dc = (p.omega_dc() / w0).powi(2);
    let h3 = FourierOperator::constant((x2.scale(-0.5 * dc) + x4.scale(0.25 * p.g / w0.powi(3))).scale(1.0 / (w0 * w0)));
    let orders = vec![h1, FourierOperator::zero(m), h3];
    Ok(SystemSpec {
        name: "double_well".into(),
        dim: m,
        h0: linalg::zeros(m),
        v_orders: orders.clone(),
        interaction: orders,
        lambda: p.lambda,
        base_freqs: vec![("rf".into(), 1.0)],
        default_cutoff: p.lambda,
    })
}

/// Three levels coupled from a common state by two tones whose beat note is
/// `0.3λ`, written directly in the interaction picture.
pub fn build_three_level_nested(lambda: f64) -> Result<SystemSpec, SystemError> {
    check_lambda(lambda)?;
    let l1 = 1.0;
    let l2 = 1.0 + 0.3 * lambda;
    let hi = FourierOperator::hermitian_pair(l1, linalg::ket_bra(3, 0, 1))?
        .add(&FourierOperator::hermitian_pair(l2, linalg::ket_bra(3, 0, 2).scale(0.7))?)?;
    Ok(SystemSpec {
        name: "three_level_nested".into(),
        dim: 3,
        h0: linalg::zeros(3),
        v_orders: vec![hi.clone()],
        interaction: vec![hi],
        lambda,
        base_freqs: vec![("tone_1".into(), l1), ("tone_2".into(), l2), ("beat".into(), l2 - l1)],
        default_cutoff: lambda,
    })
}

pub fn table3() -> SystemSpec {
    build_rabi_complex(0.1, 2.0).expect("valid preset")
}

/// λ = 0.5e−5 with λ/|Λ_Δ| = 0.4.
pub fn fig1_caption() -> SystemSpec {
    build_rabi_complex(0.5e-5, 0.5e-5 / 0.4).expect("valid preset")
}

/// Weak drive well inside the far-detuned regime.
pub fn fig1_textbook() -> SystemSpec {
    build_rabi_complex(1e-3, 0.1).expect("valid preset")
}

pub fn fig4() -> SystemSpec {
    build_rabi_real(0.05, light_shift_cancelling_detuning(0.05)).expect("valid preset")
}

/// Λ_Δ = 1.14λ in place of the light-shift-cancelling detuning.
pub fn fig4_caption() -> SystemSpec {
    build_rabi_real(0.05, 1.14 * 0.05).expect("valid preset")
}

pub fn fig5() -> SystemSpec {
    build_raman(&raman_fig5_params()).expect("valid preset")
}

pub const PRESET_NAMES: [&str; 11] = [
    "table3",
    "fig1_caption",
    "fig1_textbook",
    "fig4",
    "fig4_caption",
    "raman_resonant",
    "fig5",
    "double_well",
    "double_well_harmonic",
    "three_level_nested",
    "rabi_resonant",
];

pub fn preset(name: &str) -> Option<SystemSpec> {
    Some(match name {
        "table3" => table3(),
        "fig1_caption" => fig1_caption(),
        "fig1_textbook" => fig1_textbook(),
        "fig4" => fig4(),
        "fig4_caption" => fig4_caption(),
        "raman_resonant" => build_raman(&RamanParams::resonant(0.05, [1.0, 0.8], 1.0)).ok()?,
        "fig5" => fig5(),
        "double_well" => build_double_well(&DoubleWellParams::figure_defaults()).ok()?,
        "double_well_harmonic" => {
            build_double_well(&DoubleWellParams { dc_ratio: 0.5, g: 0.0, ..DoubleWellParams::figure_defaults() }).ok()?
        }
        "three_level_nested" => build_three_level_nested(1e-2).ok()?,
        "rabi_resonant" => build_rabi_complex(1e-3, 0.0).ok()?,
        _ => return None,
    })
}

pub fn catalan(k: usize) -> u64 {
    let mut c: u64 = 1;
    for n in 0..k as u64 {
        c = c * 2 * (2 * n + 1) / (n + 2);
    }
    c
}

/// `(−1)^k C_k [Ω̄_rms²/(4Λ²)]^k` with `Ω̄_k = 2a_k`.
pub fn raman_catalan_factor(k: usize, amplitudes: [Complex64; 2], detuning: f64) -> f64 {
    let rms2 = 4.0 * (amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr());
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * catalan(k) as f64 * (rms2 / (4.0 * detuning * detuning)).powi(k as i32)
}

/// Taylor coefficients `a_0..a_{count−1}` of an analytic `f` from `K = 64`
/// samples on the circle `|z| = radius`.
pub fn taylor_coefficients<F: Fn(Complex64) -> Complex64>(f: F, radius: f64, count: usize) -> Vec<Complex64> {
    const K: usize = 64;
    let samples: Vec<Complex64> = (0..K).map(|j| f(Complex64::from_polar(radius, 2.0 * PI * j as f64 / K as f64))).collect();
    (0..count)
        .map(|n| {
            let acc: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * n) as f64 / K as f64))
                .sum();
            acc / (K as f64 * radius.powi(n as i32))
        })
        .collect()
}

/// σ_z coefficient of the all-orders far-detuned Rabi effective Hamiltonian.
pub fn rabi_effective_coefficient(lambda: Complex64, detuning: f64) -> Complex64 {
    let half = detuning / 2.0;
    Complex64::new(half, 0.0) - (lambda * lambda + half * half).sqrt() * detuning.signum()
}

/// `c` in `Φ = c(λ)(i e^{−iΛ_Δ s}σ₊ + h.c.)` for the far-detuned Rabi problem.
pub fn rabi_phase_coefficient(lambda: Complex64, detuning: f64) -> Complex64 {
    (lambda * (2.0 / detuning)).atan() * 0.5
}

/// `c(x) = (1 − √(1 − 4x))/(2x)`.
pub fn catalan_generating(x: Complex64) -> Complex64 {
    if x.norm() < 1e-300 {
        return Complex64::new(1.0, 0.0);
    }
    (Complex64::new(1.0, 0.0) - (Complex64::new(1.0, 0.0) - x * 4.0).sqrt()) / (x * 2.0)
}

/// Exact interaction-picture propagator of the complex-drive Rabi problem,
/// `e^{−iΛσ_z s/2} e^{−i(−Λσ_z + 2λσ_x)s/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiExact {
    pub lambda: f64,
    pub detuning: f64,
}

impl RabiExact {
    pub fn propagator(&self, s: f64) -> OperatorMatrix {
        let z = pauli::sigma_z();
        let first = linalg::expm_hermitian_unchecked(&z.scale(self.detuning / 2.0), s);
        let gen = z.scale(-self.detuning / 2.0) + pauli::sigma_x().scale(self.lambda);
        first * linalg::expm_hermitian_unchecked(&gen, s)
    }
}

/// All-orders QAT solution of the far-detuned complex-drive Rabi problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiAllOrders {
    pub lambda: f64,
    pub detuning: f64,
}

impl RabiAllOrders {
    pub fn new(lambda: f64, detuning: f64) -> Result<Self, SystemError> {
        if detuning == 0.0 || !detuning.is_finite() {
            return Err(SystemError::BranchDomain(format!("detuning must be finite and nonzero, got {detuning}")));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(SystemError::BranchDomain(format!("lambda must be finite and nonnegative, got {lambda}")));
        }
        Ok(Self { lambda, detuning })
    }

    /// `θ = arctan(2λ/Λ_Δ)` on the principal branch.
    pub fn theta(&self) -> f64 {
        (2.0 * self.lambda / self.detuning).atan()
    }

    pub fn effective_hamiltonian(&self) -> OperatorMatrix {
        pauli::sigma_z().scale(rabi_effective_coefficient(Complex64::new(self.lambda, 0.0), self.detuning).re)
    }

    pub fn phase(&self, s: f64) -> OperatorMatrix {
        let c = 0.5 * self.theta();
        let up = pauli::sigma_plus() * (linalg::I * Complex64::from_polar(c, -self.detuning * s));
        &up + up.adjoint()
    }

    pub fn fast(&self, s: f64) -> OperatorMatrix {
        let half = 0.5 * self.theta();
        let rot = Complex64::from_polar(half.sin(), -self.detuning * s);
        let mut u = linalg::identity(2).scale(half.cos());
        u[(0, 1)] = rot;
        u[(1, 0)] = -rot.conj();
        u
    }

    pub fn effective(&self, s: f64) -> OperatorMatrix {
        linalg::expm_hermitian_unchecked(&self.effective_hamiltonian(), s)
    }

    /// Constant gauge factor `U_fast(0)`.
    pub fn rotation(&self) -> OperatorMatrix {
        self.fast(0.0)
    }

    pub fn propagator(&self, s: f64) -> OperatorMatrix {
        self.fast(s) * self.effective(s)
    }
}

/// All-orders QAT solution of the resonant far-detuned Raman problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanAllOrders {
    pub lambda: f64,
    pub amplitudes: [Complex64; 2],
    pub detuning: f64,
}

impl RamanAllOrders {
    pub fn new(lambda: f64, amplitudes: [Complex64; 2], detuning: f64) -> Result<Self, SystemError> {
        if detuning == 0.0 || !detuning.is_finite() {
            return Err(SystemError::BranchDomain(format!("detuning must be finite and nonzero, got {detuning}")));
        }
        if amplitudes.iter().all(|a| a.norm() == 0.0) {
            return Err(SystemError::BranchDomain("both Raman amplitudes vanish".into()));
        }
        Ok(Self { lambda, amplitudes, detuning })
    }

    pub fn from_params(p: &RamanParams) -> Result<Self, SystemError> {
        if p.detuning[0] != p.detuning[1] {
            return Err(SystemError::BranchDomain("all-orders Raman form needs equal detunings".into()));
        }
        Self::new(p.lambda, p.amplitudes(), p.detuning[0])
    }

    /// `Ω̄_rms = √(|Ω̄₁|² + |Ω̄₂|²)` with `Ω̄_k = 2a_k`.
    pub fn omega_rms(&self) -> f64 {
        2.0 * (self.amplitudes[0].norm_sqr() + self.amplitudes[1].norm_sqr()).sqrt()
    }

    /// Second-order effective Hamiltonian `Ĥ_R + Ĥ_LS`.
    pub fn second_order(&self) -> OperatorMatrix {
        let [a1, a2] = self.amplitudes;
        let d = self.detuning;
        let mut h = linalg::zeros(3);
        h[(1, 0)] = a1 * a2.conj() / d;
        h[(0, 1)] = h[(1, 0)].conj();
        h[(0, 0)] = Complex64::new(a1.norm_sqr() / d, 0.0);
        h[(1, 1)] = Complex64::new(a2.norm_sqr() / d, 0.0);
        h[(2, 2)] = Complex64::new(-(a1.norm_sqr() + a2.norm_sqr()) / d, 0.0);
        h
    }

    pub fn x(&self) -> f64 {
        -(self.lambda / (2.0 * self.detuning)).powi(2) * self.omega_rms().powi(2)
    }

    pub fn effective_hamiltonian(&self) -> OperatorMatrix {
        let c = catalan_generating(Complex64::new(self.x(), 0.0)).re;
        self.second_order().scale(self.lambda * self.lambda * c)
    }

    /// First-order phase `∫ H_I⁽¹⁾`.
    pub fn first_order_phase(&self, s: f64) -> OperatorMatrix {
        let mut m = linalg::zeros(3);
        for k in 0..2 {
            let z = self.amplitudes[k] * (linalg::I / self.detuning) * Complex64::from_polar(1.0, -self.detuning * s);
            m[(RAMAN_R, k)] = z;
            m[(k, RAMAN_R)] = z.conj();
        }
        m
    }

    pub fn phase(&self, s: f64) -> OperatorMatrix {
        let rms = self.omega_rms();
        let factor = self.detuning / rms * (self.lambda * rms / self.detuning).atan();
        self.first_order_phase(s).scale(factor)
    }

    pub fn fast(&self, s: f64) -> OperatorMatrix {
        linalg::expm_hermitian_unchecked(&self.phase(s), 1.0)
    }

    pub fn effective(&self, s: f64) -> OperatorMatrix {
        linalg::expm_hermitian_unchecked(&self.effective_hamiltonian(), s)
    }

    pub fn propagator(&self, s: f64) -> OperatorMatrix {
        self.fast(s) * self.effective(s)
    }
}

/// Exact Raman dynamics with unequal detunings from a block-diagonalizing
/// phase ansatz.
#[derive(Debug, Clone, PartialEq)]
pub struct DetunedRamanAnsatz {
    pub lambda: f64,
    pub amplitudes: [Complex64; 2],
    pub detuning: [f64; 2],
    pub alpha: [f64; 2],
    /// `α_k = 1 ± (Λ₁ − Λ₂)α′_k`; undefined at equal detunings.
    pub alpha_prime: Option<[f64; 2]>,
    /// Effective Hamiltonian in the co-rotating frame, `H_eff(s) = D(s) M D(s)†`.
    pub m: OperatorMatrix,
}

fn ansatz_theta(lambda: f64, mags: [f64; 2], detuning: [f64; 2], alpha: [f64; 2]) -> [f64; 2] {
    let g = (detuning[0] * detuning[1]).sqrt();
    let om = [2.0 * lambda * mags[0], 2.0 * lambda * mags[1]];
    let rms = ((alpha[0] * detuning[1] * om[0]).powi(2) + (alpha[1] * detuning[0] * om[1]).powi(2)).sqrt() / g;
    let ratio = if rms == 0.0 { 1.0 } else { g / rms * (rms / g).atan() };
    [alpha[0] * ratio, alpha[1] * ratio]
}

fn ansatz_phase0(lambda: f64, amps: [Complex64; 2], detuning: [f64; 2], theta: [f64; 2]) -> OperatorMatrix {
    let mut m = linalg::zeros(3);
    for k in 0..2 {
        let z = amps[k] * (linalg::I * (lambda * theta[k] / detuning[k]));
        m[(RAMAN_R, k)] = z;
        m[(k, RAMAN_R)] = z.conj();
    }
    m
}

fn frame_generator(detuning: [f64; 2]) -> OperatorMatrix {
    let mut l = linalg::zeros(3);
    l[(0, 0)] = Complex64::new(detuning[0], 0.0);
    l[(1, 1)] = Complex64::new(detuning[1], 0.0);
    l
}

fn ansatz_m(lambda: f64, amps: [Complex64; 2], detuning: [f64; 2], alpha: [f64; 2]) -> OperatorMatrix {
    let mags = [amps[0].norm(), amps[1].norm()];
    let theta = ansatz_theta(lambda, mags, detuning, alpha);
    let u0 = linalg::expm_hermitian_unchecked(&ansatz_phase0(lambda, amps, detuning, theta), 1.0);
    let mut hc = linalg::zeros(3);
    for k in 0..2 {
        hc[(RAMAN_R, k)] = amps[k] * lambda;
        hc[(k, RAMAN_R)] = (amps[k] * lambda).conj();
    }
    let l = frame_generator(detuning);
    u0.adjoint() * (hc + &l) * u0 - l
}

fn ansatz_residual(lambda: f64, mags: [f64; 2], detuning: [f64; 2], alpha: [f64; 2]) -> [f64; 2] {
    let amps = mags.map(|m| Complex64::new(m, 0.0));
    let m = ansatz_m(lambda, amps, detuning, alpha);
    [m[(0, RAMAN_R)].re, m[(1, RAMAN_R)].re]
}

fn newton(lambda: f64, mags: [f64; 2], detuning: [f64; 2], start: [f64; 2]) -> Option<[f64; 2]> {
    let mut a = start;
    for _ in 0..60 {
        let r = ansatz_residual(lambda, mags, detuning, a);
        if r[0].abs().max(r[1].abs()) < 1e-15 {
            return Some(a);
        }
        let h = 1e-7;
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let mut ap = a;
            let mut am = a;
            ap[j] += h;
            am[j] -= h;
            let rp = ansatz_residual(lambda, mags, detuning, ap);
            let rm = ansatz_residual(lambda, mags, detuning, am);
            for i in 0..2 {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 || !det.is_finite() {
            return None;
        }
        let d0 = (r[0] * jac[1][1] - r[1] * jac[0][1]) / det;
        let d1 = (jac[0][0] * r[1] - jac[1][0] * r[0]) / det;
        a = [a[0] - d0, a[1] - d1];
        if !(a[0].is_finite() && a[1].is_finite()) {
            return None;
        }
        if d0.abs().max(d1.abs()) < 1e-15 {
            return Some(a);
        }
    }
    let r = ansatz_residual(lambda, mags, detuning, a);
    (r[0].abs().max(r[1].abs()) < 1e-12).then_some(a)
}

/// Solves `⟨k|M|r⟩ = 0` for real `α₁, α₂` by continuation in `Λ₂` from `Λ₂ = Λ₁`.
pub fn detuned_raman_ansatz_solve(p: &RamanParams) -> Result<DetunedRamanAnsatz, SystemError> {
    check_lambda(p.lambda)?;
    let [d1, d2] = p.detuning;
    if d1 * d2 <= 0.0 || !(d1.is_finite() && d2.is_finite()) {
        return Err(SystemError::AnsatzFailure("detunings must be finite and share a sign".into()));
    }
    for d in p.detuning {
        if d.abs() <= p.lambda {
            return Err(SystemError::NotFarDetuned { detuning: d, lambda: p.lambda });
        }
    }
    let amps = p.amplitudes();
    let mags = [amps[0].norm(), amps[1].norm()];
    let steps = 40;
    let mut alpha = [1.0, 1.0];
    for j in 1..=steps {
        let t = j as f64 / steps as f64;
        let path = [d1, d1 + t * (d2 - d1)];
        alpha = newton(p.lambda, mags, path, alpha)
            .ok_or_else(|| SystemError::AnsatzFailure(format!("Newton iteration lost the branch at detuning_2 = {}", path[1])))?;
    }
    let delta = d1 - d2;
    let alpha_prime = (delta != 0.0).then(|| [(alpha[0] - 1.0) / delta, (1.0 - alpha[1]) / delta]);
    let m = ansatz_m(p.lambda, amps, p.detuning, alpha);
    Ok(DetunedRamanAnsatz { lambda: p.lambda, amplitudes: amps, detuning: p.detuning, alpha, alpha_prime, m })
}

impl DetunedRamanAnsatz {
    fn frame(&self, s: f64) -> Vec<Complex64> {
        vec![Complex64::from_polar(1.0, self.detuning[0] * s), Complex64::from_polar(1.0, self.detuning[1] * s), linalg::ONE]
    }

    pub fn theta(&self) -> [f64; 2] {
        let mags = [self.amplitudes[0].norm(), self.amplitudes[1].norm()];
        ansatz_theta(self.lambda, mags, self.detuning, self.alpha)
    }

    pub fn phase(&self, s: f64) -> OperatorMatrix {
        let p0 = ansatz_phase0(self.lambda, self.amplitudes, self.detuning, self.theta());
        let d = self.frame(s);
        OperatorMatrix::from_fn(3, 3, |r, c| d[r] * p0[(r, c)] * d[c].conj())
    }

    pub fn fast(&self, s: f64) -> OperatorMatrix {
        linalg::expm_hermitian_unchecked(&self.phase(s), 1.0)
    }

    pub fn effective_hamiltonian(&self, s: f64) -> OperatorMatrix {
        let d = self.frame(s);
        OperatorMatrix::from_fn(3, 3, |r, c| d[r] * self.m[(r, c)] * d[c].conj())
    }

    /// `D(s) e^{−i(M+L)s} U_fast(0)†`, so that `U_fast(s)U_eff(s)` is the exact propagator.
    pub fn effective(&self, s: f64) -> OperatorMatrix {
        let gen = &self.m + frame_generator(self.detuning);
        let inner = linalg::expm_hermitian_unchecked(&gen, s) * self.fast(0.0).adjoint();
        let d = self.frame(s);
        OperatorMatrix::from_fn(3, 3, |r, c| d[r] * inner[(r, c)])
    }

    pub fn propagator(&self, s: f64) -> OperatorMatrix {
        self.fast(s) * self.effective(s)
    }

    /// Largest `|⟨k|M|r⟩|`.
    pub fn off_diagonal_residual(&self) -> f64 {
        self.m[(0, RAMAN_R)].norm().max(self.m[(1, RAMAN_R)].norm())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    RabiExact(RabiExact),
    RabiAllOrders(RabiAllOrders),
    RamanAllOrders(RamanAllOrders),
    RamanDetunedAnsatz(DetunedRamanAnsatz),
}

/// Propagator of the closed form at `s` (referenced to `s = 0`).
pub fn closed_form_eval(cf: &ClosedForm, s: f64) -> OperatorMatrix {
    match cf {
        ClosedForm::RabiExact(c) => c.propagator(s),
        ClosedForm::RabiAllOrders(c) => c.propagator(s) * c.rotation().adjoint(),
        ClosedForm::RamanAllOrders(c) => c.propagator(s) * c.fast(0.0).adjoint(),
        ClosedForm::RamanDetunedAnsatz(c) => c.propagator(s),
    }
}
