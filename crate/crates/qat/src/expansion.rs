//! Order-by-order construction of effective Hamiltonians and dynamical phases.
//!
//! At order `n` the auxiliary operator is
//!
//! ```text
//! 𝓗⁽ⁿ⁾ = H⁽ⁿ⁾ + Σ_{k=1}^{n−1} (B_k / k!) ((−1)^k S_k⁽ⁿ⁾ − T_k⁽ⁿ⁾)
//! A_k⁽ⁿ⁾ = Σ_{m=1}^{n−k} [iΦ⁽ᵐ⁾, A_{k−1}⁽ⁿ⁻ᵐ⁾],   S_0⁽ⁿ⁾ = H⁽ⁿ⁾,  T_0⁽ⁿ⁾ = H_eff⁽ⁿ⁾
//! ```
//!
//! Its modes with `|Λ| ≤ Λc` form `h_eff[n]`; the rest are integrated (zero
//! integration constant) into `phi[n]`.

use num_complex::Complex64;
use num_rational::Ratio;
use thiserror::Error;

use crate::fourier::{FourierError, FourierOperator};
use crate::linalg;

pub const MAX_BERNOULLI: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpansionError {
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error("Bernoulli index {0} exceeds supported range 0..={MAX_BERNOULLI}")]
    BernoulliRange(usize),
    #[error("expansion order must be at least 1")]
    ZeroOrder,
    #[error("no interaction orders supplied")]
    EmptyInput,
    #[error("interaction order {order} is not Hermitian-closed (defect {defect:.3e})")]
    NotHermitian { order: usize, defect: f64 },
    #[error("cutoff {cutoff} is below lambda {lambda}; the slow band must contain [0, lambda]")]
    InvalidCutoff { cutoff: f64, lambda: f64 },
    #[error("lambda must lie in [0, 1), got {0}")]
    InvalidLambda(f64),
    #[error(
        "resonant leak at order {order}: fast mode at frequency {frequency:.6e} is within {floor:.3e} of resonance; raise the cutoff above it"
    )]
    ResonantLeak { order: usize, frequency: f64, floor: f64 },
    #[error("order {order} requires lower orders that have not been computed")]
    MissingLowerOrder { order: usize },
}

/// Bernoulli number `B_k` with the `B₁ = −1/2` convention.
pub fn bernoulli(k: usize) -> Result<Ratio<i128>, ExpansionError> {
    if k > MAX_BERNOULLI {
        return Err(ExpansionError::BernoulliRange(k));
    }
    let mut table: Vec<Ratio<i128>> = Vec::with_capacity(k + 1);
    table.push(Ratio::from_integer(1));
    for m in 1..=k {
        let mut acc = Ratio::from_integer(0);
        let mut binom: i128 = 1;
        for (j, b) in table.iter().enumerate() {
            acc += *b * binom;
            binom = binom * (m as i128 + 1 - j as i128) / (j as i128 + 1);
        }
        table.push(-acc / (m as i128 + 1));
    }
    Ok(table[k])
}

fn bernoulli_f64(k: usize) -> Result<f64, ExpansionError> {
    let b = bernoulli(k)?;
    Ok(*b.numer() as f64 / *b.denom() as f64)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionConfig {
    pub order: usize,
    pub cutoff: f64,
    /// Only used to flag small denominators: a fast mode with `|Λ| ≤ max(lambda, tol.res)`
    /// is refused. Zero disables the check beyond exact resonance.
    pub lambda: f64,
    /// Also integrate `phi[N]`, which the order-`N` propagator does not need.
    pub final_phase: bool,
}

impl ExpansionConfig {
    pub fn new(order: usize, cutoff: f64, lambda: f64) -> Self {
        Self { order, cutoff, lambda, final_phase: false }
    }

    /// Cutoff defaulting to `lambda`.
    pub fn near_resonant(order: usize, lambda: f64) -> Self {
        Self::new(order, lambda, lambda)
    }

    /// Cutoff zero: only exact resonances are kept in `h_eff`.
    pub fn far_detuned(order: usize, lambda: f64) -> Self {
        Self::new(order, 0.0, lambda)
    }

    pub fn with_final_phase(mut self) -> Self {
        self.final_phase = true;
        self
    }
}

/// Nested-commutator tables. `s[n][k]` and `t[n][k]` hold `S_k⁽ⁿ⁾` and `T_k⁽ⁿ⁾`
/// for `0 ≤ k ≤ n−1` (index `n` is 1-based; slot 0 is unused).
#[derive(Debug, Clone)]
pub struct RecurrenceCache {
    s: Vec<Vec<FourierOperator>>,
    t: Vec<Vec<FourierOperator>>,
}

impl RecurrenceCache {
    fn new() -> Self {
        Self { s: vec![Vec::new()], t: vec![Vec::new()] }
    }

    pub fn s(&self, k: usize, n: usize) -> Option<&FourierOperator> {
        self.s.get(n).and_then(|row| row.get(k))
    }

    pub fn t(&self, k: usize, n: usize) -> Option<&FourierOperator> {
        self.t.get(n).and_then(|row| row.get(k))
    }
}

#[derive(Debug, Clone)]
pub struct QatExpansion {
    pub order: usize,
    pub cutoff: f64,
    pub lambda: f64,
    pub dim: usize,
    /// `h_eff[n−1]` is the order-`n` effective Hamiltonian, `n = 1..=N`.
    pub h_eff: Vec<FourierOperator>,
    /// `phi[n−1]` is the order-`n` phase, `n = 1..N` (or `..=N` with `final_phase`).
    pub phi: Vec<FourierOperator>,
    /// `auxiliary[n−1]` is 𝓗⁽ⁿ⁾.
    pub auxiliary: Vec<FourierOperator>,
}

impl QatExpansion {
    /// 1-based accessor for the effective Hamiltonian.
    pub fn h(&self, n: usize) -> &FourierOperator {
        &self.h_eff[n - 1]
    }

    /// 1-based accessor for the dynamical phase.
    pub fn phase(&self, n: usize) -> &FourierOperator {
        &self.phi[n - 1]
    }

    /// Effective Hamiltonian `Σ λⁿ h_eff[n]`.
    pub fn effective_hamiltonian(&self, lambda: f64) -> Result<FourierOperator, ExpansionError> {
        Ok(FourierOperator::weighted_sum(&self.h_eff, lambda)?)
    }

    /// Phase `Σ_{n<N} λⁿ phi[n]` used by the order-`N` propagator.
    pub fn truncated_phase(&self, lambda: f64) -> Result<FourierOperator, ExpansionError> {
        let used = self.phi.len().min(self.order.saturating_sub(1));
        if used == 0 {
            return Ok(FourierOperator::zero(self.dim));
        }
        Ok(FourierOperator::weighted_sum(&self.phi[..used], lambda)?)
    }

    /// Largest mode-coefficient norm of `∂_s phi[n] + h_eff[n] − 𝓗⁽ⁿ⁾` over the phase orders.
    pub fn homological_residual(&self) -> Result<f64, ExpansionError> {
        let mut worst = 0.0_f64;
        for (n, phi) in self.phi.iter().enumerate() {
            let lhs = phi.derivative().add(&self.h_eff[n])?;
            worst = worst.max(lhs.distance(&self.auxiliary[n])?);
        }
        Ok(worst)
    }
}

fn interaction_order(h_i: &[FourierOperator], n: usize, dim: usize) -> FourierOperator {
    h_i.get(n - 1).cloned().unwrap_or_else(|| FourierOperator::zero_with(dim, h_i[0].tolerances()))
}

/// Auxiliary operator 𝓗⁽ⁿ⁾ from lower-order data, filling `cache` rows for order `n`.
pub fn auxiliary_hamiltonian(
    n: usize,
    h_i: &[FourierOperator],
    i_phi: &[FourierOperator],
    h_eff: &[FourierOperator],
    cache: &mut RecurrenceCache,
) -> Result<FourierOperator, ExpansionError> {
    if n == 0 || cache.s.len() != n || i_phi.len() < n - 1 || h_eff.len() < n - 1 {
        return Err(ExpansionError::MissingLowerOrder { order: n });
    }
    let dim = h_i[0].dim();
    let tol = h_i[0].tolerances();
    let base = interaction_order(h_i, n, dim);
    let mut s_row = vec![base.clone()];
    let mut t_row = vec![FourierOperator::zero_with(dim, tol)];
    let mut aux = base;
    for k in 1..n {
        let mut s_k = FourierOperator::zero_with(dim, tol);
        let mut t_k = FourierOperator::zero_with(dim, tol);
        for m in 1..=(n - k) {
            let j = n - m;
            let s_prev = if k - 1 == 0 { interaction_order(h_i, j, dim) } else { cache.s[j][k - 1].clone() };
            let t_prev = if k - 1 == 0 { h_eff[j - 1].clone() } else { cache.t[j][k - 1].clone() };
            s_k = s_k.add(&i_phi[m - 1].commutator(&s_prev)?)?;
            t_k = t_k.add(&i_phi[m - 1].commutator(&t_prev)?)?;
        }
        let weight = bernoulli_f64(k)? / factorial(k);
        if weight != 0.0 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            aux = aux.add(&s_k.scale_real(sign * weight))?.add(&t_k.scale_real(-weight))?;
        }
        s_row.push(s_k);
        t_row.push(t_k);
    }
    cache.s.push(s_row);
    cache.t.push(t_row);
    Ok(aux)
}

fn validate_inputs(h_i: &[FourierOperator], cfg: &ExpansionConfig) -> Result<usize, ExpansionError> {
    if cfg.order == 0 {
        return Err(ExpansionError::ZeroOrder);
    }
    let first = h_i.first().ok_or(ExpansionError::EmptyInput)?;
    let dim = first.dim();
    for (idx, op) in h_i.iter().enumerate() {
        if op.dim() != dim {
            return Err(FourierError::DimensionMismatch { left: dim, right: op.dim() }.into());
        }
        let scale = op.max_coeff_norm().max(1.0);
        let defect = op.hermitian_defect();
        if defect > 1e-12 * scale {
            return Err(ExpansionError::NotHermitian { order: idx + 1, defect });
        }
    }
    if !cfg.cutoff.is_finite() || cfg.cutoff < 0.0 {
        return Err(FourierError::InvalidCutoff(cfg.cutoff).into());
    }
    if !(0.0..1.0).contains(&cfg.lambda) {
        return Err(ExpansionError::InvalidLambda(cfg.lambda));
    }
    Ok(dim)
}

/// Runs the expansion to order `cfg.order`.
pub fn qat_expand(h_i: &[FourierOperator], cfg: &ExpansionConfig) -> Result<QatExpansion, ExpansionError> {
    let dim = validate_inputs(h_i, cfg)?;
    let floor = cfg.lambda.max(h_i[0].tolerances().res);
    let mut cache = RecurrenceCache::new();
    let mut h_eff = Vec::with_capacity(cfg.order);
    let mut phi = Vec::with_capacity(cfg.order);
    let mut i_phi = Vec::with_capacity(cfg.order);
    let mut auxiliary = Vec::with_capacity(cfg.order);
    let phase_orders = if cfg.final_phase { cfg.order } else { cfg.order - 1 };
    for n in 1..=cfg.order {
        let aux = auxiliary_hamiltonian(n, h_i, &i_phi, &h_eff, &mut cache)?;
        let (slow, fast) = aux.lowpass(cfg.cutoff)?;
        h_eff.push(slow);
        if n <= phase_orders {
            if let Some(bad) = fast.modes().iter().find(|m| m.frequency.abs() <= floor) {
                return Err(ExpansionError::ResonantLeak { order: n, frequency: bad.frequency, floor });
            }
            let p = fast.antiderivative()?;
            i_phi.push(p.scale(linalg::I));
            phi.push(p);
        }
        auxiliary.push(aux);
    }
    Ok(QatExpansion { order: cfg.order, cutoff: cfg.cutoff, lambda: cfg.lambda, dim, h_eff, phi, auxiliary })
}

/// Second-order effective Hamiltonian and first-order phase written out as
/// explicit sums over mode pairs, without the recurrence machinery.
pub fn second_order_pets(
    h1: &FourierOperator,
    cutoff: f64,
) -> Result<(FourierOperator, FourierOperator), ExpansionError> {
    let (slow, fast) = h1.lowpass(cutoff)?;
    let phi1 = fast.antiderivative()?;
    let dim = h1.dim();
    let tol = h1.tolerances();
    let edge = cutoff.max(tol.res);
    let mut terms = Vec::new();
    // ½[iΦ⁽¹⁾, H⁽¹⁾ + H_eff⁽¹⁾] restricted to slow output; iΦ⁽¹⁾ has coefficient −A_k/Λ_k.
    for a in fast.modes() {
        for (b, weight) in fast.modes().iter().map(|b| (b, 1.0)).chain(slow.modes().iter().map(|b| (b, 2.0))) {
            let freq = a.frequency + b.frequency;
            if freq.abs() <= edge {
                let c = linalg::commutator(&a.coeff, &b.coeff).scale(-weight / (2.0 * a.frequency));
                terms.push((freq, c));
            }
        }
    }
    let h2 = FourierOperator::from_modes_with(dim, tol, terms)?;
    Ok((h2, phi1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyClass {
    Slow,
    Fast,
}

pub fn classify_frequencies(freqs: &[f64], cutoff: f64, lambda: f64) -> Result<Vec<FrequencyClass>, ExpansionError> {
    if !cutoff.is_finite() || cutoff < lambda {
        return Err(ExpansionError::InvalidCutoff { cutoff, lambda });
    }
    Ok(freqs
        .iter()
        .map(|f| if f.abs() <= cutoff { FrequencyClass::Slow } else { FrequencyClass::Fast })
        .collect())
}

/// Coefficient `c` with `op ≈ c·basis` in the least-squares sense over all modes at `frequency`.
pub fn projection_coefficient(op: &FourierOperator, frequency: f64, basis: &linalg::OperatorMatrix) -> Complex64 {
    match op.coefficient(frequency) {
        None => Complex64::new(0.0, 0.0),
        Some(c) => {
            let num: Complex64 = basis.iter().zip(c.iter()).map(|(b, x)| b.conj() * x).sum();
            let den: f64 = basis.iter().map(|b| b.norm_sqr()).sum();
            num / den
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0).unwrap(), Ratio::from_integer(1));
        assert_eq!(bernoulli(1).unwrap(), Ratio::new(-1, 2));
        assert_eq!(bernoulli(2).unwrap(), Ratio::new(1, 6));
        assert_eq!(bernoulli(3).unwrap(), Ratio::from_integer(0));
        assert_eq!(bernoulli(4).unwrap(), Ratio::new(-1, 30));
        assert_eq!(bernoulli(12).unwrap(), Ratio::new(-691, 2730));
        assert_eq!(bernoulli(32).unwrap(), Ratio::new(-7_709_321_041_217, 510));
        assert!(bernoulli(33).is_err());
    }

    #[test]
    fn first_order_auxiliary_is_the_interaction() {
        let h = FourierOperator::hermitian_pair(1.5, sigma_plus()).unwrap();
        let exp = qat_expand(std::slice::from_ref(&h), &ExpansionConfig::far_detuned(1, 0.0)).unwrap();
        assert_eq!(exp.auxiliary[0], h);
        assert!(exp.h(1).is_empty());
        assert!(exp.phi.is_empty());
    }

    #[test]
    fn second_order_rabi_shift() {
        let det = 2.0;
        let h = FourierOperator::hermitian_pair(det, sigma_plus()).unwrap();
        let exp = qat_expand(std::slice::from_ref(&h), &ExpansionConfig::far_detuned(2, 0.0)).unwrap();
        let dc = exp.h(2).time_average();
        assert!(linalg::max_abs(&(dc - sigma_z().scale(-1.0 / det))) < 1e-15);
        let (h2, phi1) = second_order_pets(&h, 0.0).unwrap();
        assert!(h2.distance(exp.h(2)).unwrap() < 1e-15);
        assert!(phi1.distance(exp.phase(1)).unwrap() < 1e-15);
    }

    #[test]
    fn beat_note_above_cutoff_gives_no_cross_term() {
        let h = FourierOperator::hermitian_pair(1.0, linalg::ket_bra(3, 2, 0))
            .unwrap()
            .add(&FourierOperator::hermitian_pair(1.5, linalg::ket_bra(3, 2, 1)).unwrap())
            .unwrap();
        let (h2, _) = second_order_pets(&h, 0.1).unwrap();
        assert!(h2.is_static());
        let dc = h2.time_average();
        assert_eq!(dc[(1, 0)].norm(), 0.0);
    }

    #[test]
    fn classify_examples() {
        use FrequencyClass::*;
        assert_eq!(classify_frequencies(&[2.0], 0.1, 0.05).unwrap(), vec![Fast]);
        assert_eq!(classify_frequencies(&[0.05], 0.1, 0.05).unwrap(), vec![Slow]);
        assert_eq!(classify_frequencies(&[0.05, 2.05], 0.1, 0.05).unwrap(), vec![Slow, Fast]);
        assert!(classify_frequencies(&[1.0], 0.01, 0.05).is_err());
    }

    #[test]
    fn small_denominator_is_refused() {
        let lambda = 0.1;
        let h = FourierOperator::hermitian_pair(0.05, sigma_plus()).unwrap();
        let err = qat_expand(&[h], &ExpansionConfig::far_detuned(2, lambda)).unwrap_err();
        assert!(matches!(err, ExpansionError::ResonantLeak { order: 1, .. }));
    }

    #[test]
    fn zero_order_rejected() {
        let h = FourierOperator::hermitian_pair(1.0, sigma_plus()).unwrap();
        assert_eq!(qat_expand(&[h], &ExpansionConfig::new(0, 0.0, 0.0)).unwrap_err(), ExpansionError::ZeroOrder);
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let h = FourierOperator::from_modes(2, [(1.0, sigma_plus())]).unwrap();
        let err = qat_expand(&[h], &ExpansionConfig::new(2, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, ExpansionError::NotHermitian { order: 1, .. }));
    }
}
