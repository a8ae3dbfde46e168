//! Factorized propagator `U(s) = exp(−iΦ(s)) U_eff(s)` and its pieces.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::expansion::{qat_expand, ExpansionConfig, ExpansionError, QatExpansion};
use crate::fourier::{FourierError, FourierOperator};
use crate::linalg::{self, OperatorMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagatorError {
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error("generator is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("time grid must be sorted ascending")]
    UnsortedGrid,
    #[error("effective propagator plan does not fit the effective Hamiltonian: {0}")]
    PlanMismatch(String),
    #[error("slow integration failed at s = {s}: {reason}")]
    StepFailure { s: f64, reason: String },
    #[error("first-order effective Hamiltonian is time dependent; renormalization stops here")]
    NotRenormalizable,
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Fast,
    Effective,
    Assembled,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorSample {
    pub s: f64,
    pub u: OperatorMatrix,
    pub kind: SampleKind,
}

impl PropagatorSample {
    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.u)
    }
}

/// `exp(−iHt)` for Hermitian `H`.
pub fn matrix_exp_hermitian(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix, PropagatorError> {
    let defect = linalg::hermiticity_defect(h);
    if defect > 1e-10 {
        return Err(PropagatorError::NotHermitian(defect));
    }
    Ok(linalg::expm_hermitian_unchecked(h, t))
}

fn check_sorted(grid: &[f64]) -> Result<(), PropagatorError> {
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(PropagatorError::UnsortedGrid);
    }
    Ok(())
}

/// Re-references a track: `U(s) ↦ U(s) U(s₀)†`.
pub fn referenced(samples: &[PropagatorSample], u0: &OperatorMatrix) -> Vec<PropagatorSample> {
    let u0_dag = u0.adjoint();
    samples
        .iter()
        .map(|p| PropagatorSample { s: p.s, u: &p.u * &u0_dag, kind: p.kind })
        .collect()
}

/// Evaluates `exp(−i Σ_{n<N} λⁿ phi[n](s))`.
pub struct FastTrack {
    phase: FourierOperator,
}

impl FastTrack {
    pub fn new(exp: &QatExpansion) -> Result<Self, PropagatorError> {
        Ok(Self { phase: exp.truncated_phase(exp.lambda)? })
    }

    pub fn phase(&self) -> &FourierOperator {
        &self.phase
    }

    pub fn at(&self, s: f64) -> PropagatorSample {
        let u = linalg::expm_hermitian_unchecked(&self.phase.evaluate(s), 1.0);
        PropagatorSample { s, u, kind: SampleKind::Fast }
    }
}

pub fn fast_propagator(exp: &QatExpansion, s: f64) -> Result<PropagatorSample, PropagatorError> {
    Ok(FastTrack::new(exp)?.at(s))
}

/// `H(s) = e^{−iGs} K e^{iGs}` with diagonal `G`, so `i∂U = H U` has the exact
/// solution `U(s) = e^{−iGs} e^{−i(K−G)s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatingFrame {
    pub diag: Vec<f64>,
    pub k: OperatorMatrix,
}

impl RotatingFrame {
    /// Finds `G` by propagating `g_i − g_j = Λ` over the nonzero entries of each mode.
    pub fn find(h: &FourierOperator) -> Option<Self> {
        let dim = h.dim();
        let tol = h.tolerances();
        let mut constraints: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        let mut k = linalg::zeros(dim);
        let mut owner: Vec<Option<f64>> = vec![None; dim * dim];
        for mode in h.modes() {
            for r in 0..dim {
                for c in 0..dim {
                    let z = mode.coeff[(r, c)];
                    if z.norm() <= tol.drop {
                        continue;
                    }
                    let slot = &mut owner[r * dim + c];
                    match slot {
                        Some(f) if (*f - mode.frequency).abs() > tol.freq => return None,
                        _ => *slot = Some(mode.frequency),
                    }
                    k[(r, c)] += z;
                    if r != c {
                        constraints[r].push((c, mode.frequency));
                        constraints[c].push((r, -mode.frequency));
                    } else if mode.frequency.abs() > tol.res {
                        return None;
                    }
                }
            }
        }
        let mut g: Vec<Option<f64>> = vec![None; dim];
        for root in 0..dim {
            if g[root].is_some() {
                continue;
            }
            g[root] = Some(0.0);
            let mut stack = vec![root];
            while let Some(i) = stack.pop() {
                let gi = g[i].expect("assigned");
                for &(j, f) in &constraints[i] {
                    // entry (i, j) oscillates as e^{−i(g_i − g_j)s}
                    let want = gi - f;
                    match g[j] {
                        None => {
                            g[j] = Some(want);
                            stack.push(j);
                        }
                        Some(gj) if (gj - want).abs() > 10.0 * tol.freq => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(Self { diag: g.into_iter().map(|x| x.unwrap_or(0.0)).collect(), k })
    }

    pub fn generator(&self) -> OperatorMatrix {
        let dim = self.diag.len();
        OperatorMatrix::from_fn(dim, dim, |r, c| if r == c { Complex64::new(self.diag[r], 0.0) } else { linalg::ZERO })
    }

    fn phases(&self, s: f64) -> Vec<Complex64> {
        self.diag.iter().map(|g| Complex64::from_polar(1.0, -g * s)).collect()
    }

    /// Exact propagator from 0 to `s`.
    pub fn propagator(&self, s: f64) -> OperatorMatrix {
        let inner = linalg::expm_hermitian_unchecked(&(&self.k - self.generator()), s);
        let ph = self.phases(s);
        OperatorMatrix::from_fn(inner.nrows(), inner.ncols(), |r, c| ph[r] * inner[(r, c)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffectiveMode {
    /// Static generator, or one that becomes static in a diagonal rotating frame.
    ConstantExponential,
    /// Fourth-order Magnus integration on the slow grid.
    SlowOde,
    /// Exact first-order frame, higher orders by exponential perturbation theory.
    ExponentialPt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePropagatorPlan {
    pub mode: EffectiveMode,
    /// Upper bound on the slow step; the resolution bound 2π/(50·rate) always applies.
    pub slow_step: Option<f64>,
    /// Number of Magnus terms used in the exponential-PT frame (1 or 2).
    pub pt_order: usize,
}

impl EffectivePropagatorPlan {
    pub fn constant() -> Self {
        Self { mode: EffectiveMode::ConstantExponential, slow_step: None, pt_order: 1 }
    }

    pub fn slow_ode() -> Self {
        Self { mode: EffectiveMode::SlowOde, slow_step: None, pt_order: 1 }
    }

    pub fn exponential_pt(pt_order: usize) -> Self {
        Self { mode: EffectiveMode::ExponentialPt, slow_step: None, pt_order }
    }

    /// Constant exponential whenever the effective Hamiltonian admits it, slow ODE otherwise.
    pub fn auto(exp: &QatExpansion) -> Result<Self, PropagatorError> {
        let h = exp.effective_hamiltonian(exp.lambda)?;
        if h.is_static() || RotatingFrame::find(&h).is_some() {
            Ok(Self::constant())
        } else {
            Ok(Self::slow_ode())
        }
    }
}

/// Classical fourth-order (two-point Gauss) Magnus step generator for `[t, t+h]`.
fn magnus4_generator(h_op: &FourierOperator, t: f64, h: f64) -> OperatorMatrix {
    let c = 3.0_f64.sqrt() / 6.0;
    let h1 = h_op.evaluate(t + (0.5 - c) * h);
    let h2 = h_op.evaluate(t + (0.5 + c) * h);
    let comm = linalg::commutator(&h2, &h1);
    (&h1 + &h2).scale(0.5 * h) - comm * (linalg::I * (3.0_f64.sqrt() / 12.0 * h * h))
}

/// Characteristic rate used to bound slow steps.
fn slow_rate(h: &FourierOperator) -> f64 {
    h.max_frequency().max(h.norm_bound())
}

fn magnus4_track(h: &FourierOperator, grid: &[f64], step: f64) -> Vec<OperatorMatrix> {
    let dim = h.dim();
    let mut out = vec![linalg::identity(dim); grid.len()];
    let start = grid.partition_point(|&s| s < 0.0);
    for range in [(start..grid.len()).collect::<Vec<_>>(), (0..start).rev().collect()] {
        let mut u = linalg::identity(dim);
        let mut t = 0.0;
        for idx in range {
            let target = grid[idx];
            let span = (target - t).abs();
            let n = (span / step).ceil().max(if span > 0.0 { 1.0 } else { 0.0 }) as usize;
            let hstep = if n > 0 { (target - t) / n as f64 } else { 0.0 };
            for j in 0..n {
                let k = magnus4_generator(h, t + j as f64 * hstep, hstep);
                u = linalg::expm_hermitian_unchecked(&k, 1.0) * u;
            }
            t = target;
            out[idx] = u.clone();
        }
    }
    out
}

const SLOW_TOL: f64 = 1e-11;

fn slow_ode_track(h: &FourierOperator, grid: &[f64], plan: &EffectivePropagatorPlan) -> Result<Vec<OperatorMatrix>, PropagatorError> {
    let rate = slow_rate(h);
    if rate == 0.0 {
        return Ok(vec![linalg::identity(h.dim()); grid.len()]);
    }
    let mut step = (2.0 * PI / (50.0 * rate)).min(plan.slow_step.unwrap_or(f64::INFINITY));
    let mut coarse = magnus4_track(h, grid, step);
    for _ in 0..14 {
        let fine = magnus4_track(h, grid, step / 2.0);
        let diff = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| linalg::max_abs(&(a - b)))
            .fold(0.0_f64, f64::max);
        if diff <= SLOW_TOL {
            let drift = fine.iter().map(linalg::unitarity_defect).fold(0.0_f64, f64::max);
            if drift > 1e-10 {
                let s = grid.last().copied().unwrap_or(0.0);
                return Err(PropagatorError::StepFailure { s, reason: format!("unitarity drift {drift:.3e}") });
            }
            return Ok(fine.iter().map(linalg::polar_unitary).collect());
        }
        step /= 2.0;
        coarse = fine;
    }
    let s = grid.last().copied().unwrap_or(0.0);
    Err(PropagatorError::StepFailure { s, reason: "Richardson check did not converge".into() })
}

/// Exact solution of the first-order effective equation, used as the frame for
/// exponential perturbation theory.
#[derive(Debug, Clone)]
pub struct FirstOrderFrame {
    frame: RotatingFrame,
}

impl FirstOrderFrame {
    /// `h1` is the full first-order generator (already multiplied by λ).
    pub fn solve(h1: &FourierOperator) -> Option<Self> {
        RotatingFrame::find(h1).map(|frame| Self { frame })
    }

    pub fn propagator(&self, s: f64) -> OperatorMatrix {
        self.frame.propagator(s)
    }

    /// `U₀′(s)† M U₀′(s)`.
    pub fn conjugate(&self, m: &OperatorMatrix, s: f64) -> OperatorMatrix {
        let u = self.propagator(s);
        u.adjoint() * m * u
    }

    pub fn rate(&self) -> f64 {
        let gen = &self.frame.k - self.frame.generator();
        let g_max = self.frame.diag.iter().fold(0.0_f64, |a, g| a.max(g.abs()));
        2.0 * linalg::spectral_norm(&gen).max(g_max)
    }
}

/// Exponential perturbation theory for `i∂U = (Σ λⁿ h_eff[n]) U`: the first
/// order is solved exactly, the remainder is exponentiated in that frame with
/// `pt_order` Magnus terms.
pub fn exp_perturbation_theory(
    h_eff: &[FourierOperator],
    lambda: f64,
    pt_order: usize,
    grid: &[f64],
) -> Result<Vec<PropagatorSample>, PropagatorError> {
    check_sorted(grid)?;
    if h_eff.is_empty() {
        return Err(PropagatorError::PlanMismatch("no effective orders".into()));
    }
    let dim = h_eff[0].dim();
    let h1 = h_eff[0].scale_real(lambda);
    let rest: Vec<FourierOperator> = h_eff.iter().skip(1).cloned().collect();
    let mut h_rest = FourierOperator::zero(dim);
    let mut w = lambda;
    for op in &rest {
        w *= lambda;
        h_rest = h_rest.add(&op.scale_real(w))?;
    }
    let frame = match FirstOrderFrame::solve(&h1) {
        Some(f) => f,
        None => {
            log::warn!("first-order effective frame not solvable in closed form; falling back to slow ODE");
            let total = h1.add(&h_rest)?;
            let us = slow_ode_track(&total, grid, &EffectivePropagatorPlan::slow_ode())?;
            return Ok(grid
                .iter()
                .zip(us)
                .map(|(&s, u)| PropagatorSample { s, u, kind: SampleKind::Effective })
                .collect());
        }
    };
    if h_rest.is_empty() {
        return Ok(grid
            .iter()
            .map(|&s| PropagatorSample { s, u: frame.propagator(s), kind: SampleKind::Effective })
            .collect());
    }
    let primed = |s: f64| frame.conjugate(&h_rest.evaluate(s), s);
    let rate = frame.rate().max(h_rest.max_frequency()).max(1e-300);
    let step = 2.0 * PI / (400.0 * rate);
    let mut out = vec![PropagatorSample { s: 0.0, u: linalg::identity(dim), kind: SampleKind::Effective }; grid.len()];
    let start = grid.partition_point(|&s| s < 0.0);
    let order = pt_order.max(1);
    for range in [(start..grid.len()).collect::<Vec<_>>(), (0..start).rev().collect()] {
        let mut k1 = linalg::zeros(dim);
        let mut k2 = linalg::zeros(dim);
        let mut t = 0.0;
        for idx in range {
            let target = grid[idx];
            let span = (target - t).abs();
            let n = (span / step).ceil() as usize;
            let h = if n > 0 { (target - t) / n as f64 } else { 0.0 };
            for j in 0..n {
                let t0 = t + j as f64 * h;
                // RK4 on (K₁, K₂) with K₁′ = H′, K₂′ = −(i/2)[H′, K₁]
                let ha = primed(t0);
                let hm = primed(t0 + 0.5 * h);
                let hb = primed(t0 + h);
                if order >= 2 {
                    let f = |hp: &OperatorMatrix, k: &OperatorMatrix| linalg::commutator(hp, k) * Complex64::new(0.0, -0.5);
                    let k1_mid = &k1 + (&ha + &hm).scale(0.25 * h);
                    let k1_end = &k1 + (&ha + hm.scale(4.0) + &hb).scale(h / 6.0);
                    let d1 = f(&ha, &k1);
                    let d2 = f(&hm, &k1_mid);
                    let d4 = f(&hb, &k1_end);
                    k2 += (d1 + d2.scale(4.0) + d4).scale(h / 6.0);
                }
                k1 += (&ha + hm.scale(4.0) + &hb).scale(h / 6.0);
            }
            t = target;
            let total = if order >= 2 { &k1 + &k2 } else { k1.clone() };
            let u = frame.propagator(target) * linalg::expm_hermitian_unchecked(&total, 1.0);
            out[idx] = PropagatorSample { s: target, u, kind: SampleKind::Effective };
        }
    }
    Ok(out)
}

/// Effective propagator `U_eff(s)` (with `U_eff(0) = I`) on a sorted grid.
pub fn effective_track(
    exp: &QatExpansion,
    grid: &[f64],
    plan: &EffectivePropagatorPlan,
) -> Result<Vec<PropagatorSample>, PropagatorError> {
    check_sorted(grid)?;
    let h = exp.effective_hamiltonian(exp.lambda)?;
    let us: Vec<OperatorMatrix> = match plan.mode {
        EffectiveMode::ConstantExponential => {
            if h.is_static() {
                let m = h.time_average();
                let (values, v) = linalg::eigh(&m);
                grid.iter()
                    .map(|&s| {
                        let mut scaled = v.clone();
                        for (c, e) in values.iter().enumerate() {
                            let ph = Complex64::from_polar(1.0, -e * s);
                            for r in 0..scaled.nrows() {
                                scaled[(r, c)] *= ph;
                            }
                        }
                        scaled * v.adjoint()
                    })
                    .collect()
            } else {
                let frame = RotatingFrame::find(&h).ok_or_else(|| {
                    PropagatorError::PlanMismatch("effective Hamiltonian is time dependent and not frame-solvable".into())
                })?;
                grid.iter().map(|&s| frame.propagator(s)).collect()
            }
        }
        EffectiveMode::SlowOde => slow_ode_track(&h, grid, plan)?,
        EffectiveMode::ExponentialPt => {
            return exp_perturbation_theory(&exp.h_eff, exp.lambda, plan.pt_order, grid);
        }
    };
    Ok(grid
        .iter()
        .zip(us)
        .map(|(&s, u)| PropagatorSample { s, u, kind: SampleKind::Effective })
        .collect())
}

pub fn effective_propagator(
    exp: &QatExpansion,
    s: f64,
    plan: &EffectivePropagatorPlan,
) -> Result<PropagatorSample, PropagatorError> {
    Ok(effective_track(exp, &[s], plan)?.remove(0))
}

/// `U(s) = U_fast(s) U_eff(s)` on a sorted grid.
pub fn assemble(
    exp: &QatExpansion,
    grid: &[f64],
    plan: &EffectivePropagatorPlan,
) -> Result<Vec<PropagatorSample>, PropagatorError> {
    let fast = FastTrack::new(exp)?;
    let eff = effective_track(exp, grid, plan)?;
    Ok(eff
        .into_iter()
        .map(|e| PropagatorSample { s: e.s, u: fast.at(e.s).u * e.u, kind: SampleKind::Assembled })
        .collect())
}

/// `U(s, s₀) = U(s) U(s₀)†` on a sorted grid.
pub fn assemble_from(
    exp: &QatExpansion,
    grid: &[f64],
    plan: &EffectivePropagatorPlan,
    s0: f64,
) -> Result<Vec<PropagatorSample>, PropagatorError> {
    let samples = assemble(exp, grid, plan)?;
    let u0 = assemble(exp, &[s0], plan)?.remove(0).u;
    Ok(referenced(&samples, &u0))
}

/// `U₀† V(s) U₀` with `U₀ = e^{−iH₀s}`: each entry of a mode in the eigenbasis of
/// `H₀` picks up the Bohr frequency of its row and column.
pub fn interaction_picture(h0: &OperatorMatrix, v: &FourierOperator) -> Result<FourierOperator, PropagatorError> {
    let defect = linalg::hermiticity_defect(h0);
    if defect > 1e-10 {
        return Err(PropagatorError::NotHermitian(defect));
    }
    if h0.nrows() != v.dim() {
        return Err(FourierError::DimensionMismatch { left: h0.nrows(), right: v.dim() }.into());
    }
    if linalg::max_abs(h0) == 0.0 {
        return Ok(v.clone());
    }
    let dim = v.dim();
    let tol = v.tolerances();
    let (eps, vecs) = linalg::eigh(h0);
    let vecs_dag = vecs.adjoint();
    let mut entries: Vec<(f64, usize, usize, Complex64)> = Vec::new();
    for mode in v.modes() {
        let a = &vecs_dag * &mode.coeff * &vecs;
        for i in 0..dim {
            for j in 0..dim {
                if a[(i, j)].norm() > 0.0 {
                    // e^{iε_i s} a_ij e^{−iε_j s} e^{−iΛs}
                    entries.push((mode.frequency - (eps[i] - eps[j]), i, j, a[(i, j)]));
                }
            }
        }
    }
    entries.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut modes = Vec::new();
    let mut idx = 0;
    while idx < entries.len() {
        let first = entries[idx].0;
        let mut rep = first;
        let mut block = linalg::zeros(dim);
        while idx < entries.len() && entries[idx].0 - first <= tol.freq {
            let (f, i, j, z) = entries[idx];
            if f.abs() < rep.abs() {
                rep = f;
            }
            block[(i, j)] += z;
            idx += 1;
        }
        modes.push((rep, &vecs * block * &vecs_dag));
    }
    Ok(FourierOperator::from_modes_with(dim, tol, modes)?)
}

/// Summed effective Hamiltonian seen from the fast frame at `s₀`:
/// `U_fast(s₀) H_eff U_fast(s₀)†`.
pub fn magnus_gauge_transform(exp: &QatExpansion, s0: f64) -> Result<OperatorMatrix, PropagatorError> {
    let h = exp.effective_hamiltonian(exp.lambda)?;
    if !h.is_static() {
        return Err(PropagatorError::Unsupported("Magnus-gauge transform needs a time-independent effective Hamiltonian".into()));
    }
    let u = fast_propagator(exp, s0)?.u;
    Ok(&u * h.time_average() * u.adjoint())
}

/// Setup for a second expansion pass after removing the first-order effective dynamics.
#[derive(Debug, Clone)]
pub struct Renormalized {
    pub lambda: f64,
    /// `λ h_eff[1]`, generator of the removed frame `exp(−iλ h_eff[1] s)`.
    pub frame: OperatorMatrix,
    /// New interaction in slow time `τ = λs`: `orders[m−1]` multiplies `λᵐ`.
    pub orders: Vec<FourierOperator>,
    pub cutoff: f64,
}

impl Renormalized {
    /// True when the new interaction has no time dependence left.
    pub fn is_fixed_point(&self) -> bool {
        self.orders.iter().all(|o| o.is_static())
    }
}

pub fn renormalize_step(h_eff: &[FourierOperator], lambda: f64, cutoff: f64) -> Result<Renormalized, PropagatorError> {
    let first = h_eff.first().ok_or_else(|| PropagatorError::PlanMismatch("no effective orders".into()))?;
    if !first.is_static() {
        return Err(PropagatorError::NotRenormalizable);
    }
    if !(lambda > 0.0) {
        return Err(PropagatorError::Unsupported("renormalization needs lambda > 0".into()));
    }
    let frame = first.time_average().scale(lambda);
    let mut orders = Vec::with_capacity(h_eff.len().saturating_sub(1));
    for op in &h_eff[1..] {
        orders.push(interaction_picture(&frame, op)?.rescale_time(lambda));
    }
    if orders.is_empty() {
        orders.push(FourierOperator::zero_with(first.dim(), first.tolerances()));
    }
    Ok(Renormalized { lambda, frame, orders, cutoff })
}

/// Two-pass propagator `U_fast¹(s) e^{−iλh₁s} U_fast²(λs) U_eff²(λs)`.
pub fn assemble_two_pass(
    first: &QatExpansion,
    step: &Renormalized,
    second: &QatExpansion,
    grid: &[f64],
    plan: &EffectivePropagatorPlan,
) -> Result<Vec<PropagatorSample>, PropagatorError> {
    check_sorted(grid)?;
    let fast1 = FastTrack::new(first)?;
    let tau: Vec<f64> = grid.iter().map(|s| s * step.lambda).collect();
    let inner = assemble(second, &tau, plan)?;
    let (values, v) = linalg::eigh(&step.frame);
    Ok(grid
        .iter()
        .zip(inner)
        .map(|(&s, inner)| {
            let mut scaled = v.clone();
            for (c, e) in values.iter().enumerate() {
                let ph = Complex64::from_polar(1.0, -e * s);
                for r in 0..scaled.nrows() {
                    scaled[(r, c)] *= ph;
                }
            }
            let frame = scaled * v.adjoint();
            PropagatorSample { s, u: fast1.at(s).u * frame * inner.u, kind: SampleKind::Assembled }
        })
        .collect())
}

pub const MAX_RENORMALIZATION_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainTermination {
    /// Every requested pass ran.
    Completed,
    /// The new interaction after `step` steps carried no time dependence.
    FixedPoint { step: usize },
    /// `h_eff[1]` of pass `pass` was time dependent.
    NotRenormalizable { pass: usize },
    /// More passes were requested than the chain allows.
    CapReached,
}

#[derive(Debug, Clone)]
pub struct RenormalizationChain {
    pub expansions: Vec<QatExpansion>,
    pub steps: Vec<Renormalized>,
    pub termination: ChainTermination,
}

/// Repeated expand/renormalize passes; `passes[i] = (order, cutoff)` for pass `i`.
pub fn renormalization_chain(
    h_i: &[FourierOperator],
    lambda: f64,
    passes: &[(usize, f64)],
) -> Result<RenormalizationChain, PropagatorError> {
    let (&(order, cutoff), rest) = passes
        .split_first()
        .ok_or_else(|| PropagatorError::PlanMismatch("no passes requested".into()))?;
    let mut expansions = vec![qat_expand(h_i, &ExpansionConfig::new(order, cutoff, lambda))?];
    let mut steps = Vec::new();
    let mut termination = ChainTermination::Completed;
    for (idx, &(order, cutoff)) in rest.iter().enumerate() {
        if steps.len() == MAX_RENORMALIZATION_STEPS {
            termination = ChainTermination::CapReached;
            break;
        }
        let prev = expansions.last().expect("non-empty");
        let step = match renormalize_step(&prev.h_eff, lambda, cutoff) {
            Ok(s) => s,
            Err(PropagatorError::NotRenormalizable) => {
                termination = ChainTermination::NotRenormalizable { pass: idx };
                break;
            }
            Err(e) => return Err(e),
        };
        let fixed = step.is_fixed_point();
        expansions.push(qat_expand(&step.orders, &ExpansionConfig::new(order, cutoff, lambda))?);
        steps.push(step);
        if fixed {
            termination = ChainTermination::FixedPoint { step: steps.len() };
            break;
        }
    }
    Ok(RenormalizationChain { expansions, steps, termination })
}
