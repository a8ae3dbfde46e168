//! Reference solutions of `i ∂_s U = H(s) U` by direct time stepping.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::fourier::FourierOperator;
use crate::linalg::{self, OperatorMatrix};
use crate::propagator::{PropagatorSample, SampleKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("time grid must be non-empty and sorted ascending")]
    BadGrid,
    #[error("Hamiltonian is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("step size fell to {step:.3e} at s = {s} with error estimate {error:.3e} (tolerance {tol:.1e})")]
    StepFloor { s: f64, step: f64, error: f64, tol: f64 },
    #[error("step budget of {0} exhausted before reaching the end of the grid")]
    StepBudget(u64),
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegratorMethod {
    /// Classical RK4 with step doubling and local extrapolation.
    RkAdaptive,
    /// Exponential midpoint rule, step doubling plus Richardson extrapolation.
    MagnusMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    /// User cap on the step; the frequency bound 2π/(20·Λ_max) is always applied on top.
    pub max_step: Option<f64>,
    pub method: IntegratorMethod,
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-11, max_step: None, method: IntegratorMethod::RkAdaptive, max_steps: 50_000_000 }
    }
}

impl IntegratorConfig {
    pub fn with_method(method: IntegratorMethod) -> Self {
        Self { method, ..Self::default() }
    }

    /// Step cap actually used for `h`.
    pub fn effective_max_step(&self, h: &FourierOperator) -> f64 {
        let mut cap = self.max_step.unwrap_or(f64::INFINITY);
        let lmax = h.max_frequency();
        if lmax > 0.0 {
            cap = cap.min(2.0 * PI / (20.0 * lmax));
        }
        let norm = h.norm_bound();
        if norm > 0.0 {
            cap = cap.min(0.5 / norm);
        }
        cap
    }
}

fn rhs(h: &OperatorMatrix, u: &OperatorMatrix) -> OperatorMatrix {
    (h * u) * Complex64::new(0.0, -1.0)
}

fn rk4_step(h_op: &FourierOperator, s: f64, dt: f64, u: &OperatorMatrix) -> OperatorMatrix {
    let h0 = h_op.evaluate(s);
    let hm = h_op.evaluate(s + 0.5 * dt);
    let h1 = h_op.evaluate(s + dt);
    let k1 = rhs(&h0, u);
    let k2 = rhs(&hm, &(u + k1.scale(0.5 * dt)));
    let k3 = rhs(&hm, &(u + k2.scale(0.5 * dt)));
    let k4 = rhs(&h1, &(u + k3.scale(dt)));
    u + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0)
}

fn midpoint_step(h_op: &FourierOperator, s: f64, dt: f64, u: &OperatorMatrix) -> OperatorMatrix {
    linalg::expm_hermitian_unchecked(&h_op.evaluate(s + 0.5 * dt), dt) * u
}

/// One trial step: returns (accepted candidate, error estimate, order of the estimate).
fn trial(method: IntegratorMethod, h_op: &FourierOperator, s: f64, dt: f64, u: &OperatorMatrix) -> (OperatorMatrix, f64, f64) {
    match method {
        IntegratorMethod::RkAdaptive => {
            let full = rk4_step(h_op, s, dt, u);
            let half = rk4_step(h_op, s, 0.5 * dt, u);
            let two = rk4_step(h_op, s + 0.5 * dt, 0.5 * dt, &half);
            let diff = &two - &full;
            let err = linalg::max_abs(&diff) / 15.0;
            (two + diff.scale(1.0 / 15.0), err, 5.0)
        }
        IntegratorMethod::MagnusMidpoint => {
            let full = midpoint_step(h_op, s, dt, u);
            let half = midpoint_step(h_op, s, 0.5 * dt, u);
            let two = midpoint_step(h_op, s + 0.5 * dt, 0.5 * dt, &half);
            let diff = &two - &full;
            let err = linalg::max_abs(&diff) / 3.0;
            // the midpoint rule is symmetric, so this removes the h³ local term
            (two + diff.scale(1.0 / 3.0), err, 3.0)
        }
    }
}

/// Propagator `U(s, grid[0])` at every grid point.
pub fn integrate_exact(h: &FourierOperator, grid: &[f64], cfg: &IntegratorConfig) -> Result<Vec<PropagatorSample>, OracleError> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] <= w[1])) || grid.iter().any(|s| !s.is_finite()) {
        return Err(OracleError::BadGrid);
    }
    if !(cfg.rel_tol > 0.0) {
        return Err(OracleError::InvalidConfig(format!("rel_tol must be positive, got {}", cfg.rel_tol)));
    }
    let defect = h.hermitian_defect();
    if defect > 1e-10 {
        return Err(OracleError::NotHermitian(defect));
    }
    let dim = h.dim();
    let cap = cfg.effective_max_step(h);
    let total_span = grid[grid.len() - 1] - grid[0];
    let mut dt = if cap.is_finite() { cap } else { total_span.max(1.0) };
    let mut u = linalg::identity(dim);
    let mut s = grid[0];
    let mut out = Vec::with_capacity(grid.len());
    out.push(PropagatorSample { s, u: u.clone(), kind: SampleKind::Exact });
    if h.is_empty() {
        return Ok(grid.iter().map(|&s| PropagatorSample { s, u: linalg::identity(dim), kind: SampleKind::Exact }).collect());
    }
    let mut steps: u64 = 0;
    let mut since_projection = 0u32;
    for &target in &grid[1..] {
        while s < target {
            let remaining = target - s;
            let last = dt >= remaining;
            let step = if last { remaining } else { dt };
            let (cand, err, order) = trial(cfg.method, h, s, step, &u);
            let floor = 1e-13 * s.abs().max(1.0);
            if err <= cfg.rel_tol || step <= floor {
                if err > cfg.rel_tol {
                    return Err(OracleError::StepFloor { s, step, error: err, tol: cfg.rel_tol });
                }
                u = cand;
                s = if last { target } else { s + step };
                steps += 1;
                since_projection += 1;
                if since_projection >= 1000 {
                    u = linalg::polar_unitary(&u);
                    since_projection = 0;
                }
                if steps > cfg.max_steps {
                    return Err(OracleError::StepBudget(cfg.max_steps));
                }
            }
            let factor = if err == 0.0 { 2.0 } else { (0.9 * (cfg.rel_tol / err).powf(1.0 / order)).clamp(0.2, 2.0) };
            // a step shortened to land on the grid says little about the next one
            if !(last && err <= cfg.rel_tol) || factor < 1.0 {
                dt = (step * factor).min(cap);
            }
        }
        if linalg::unitarity_defect(&u) > 1e-14 {
            u = linalg::polar_unitary(&u);
            since_projection = 0;
        }
        out.push(PropagatorSample { s: target, u: u.clone(), kind: SampleKind::Exact });
    }
    Ok(out)
}

/// `∫_{s0}^{s1} ‖H(s)‖₂ ds` by composite Simpson quadrature.
pub fn magnus_convergence_bound(h: &FourierOperator, s0: f64, s1: f64) -> f64 {
    if h.is_empty() || s1 <= s0 {
        return 0.0;
    }
    let span = s1 - s0;
    let per_period = 40.0;
    let wanted = (span * h.max_frequency() / (2.0 * PI) * per_period).ceil() as usize;
    let n = (wanted.clamp(200, 2_000_000) + 1) & !1;
    let dh = span / n as f64;
    let mut acc = 0.0;
    for j in 0..=n {
        let w = if j == 0 || j == n { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * linalg::spectral_norm(&h.evaluate(s0 + j as f64 * dh));
    }
    acc * dh / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::*;

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let h = FourierOperator::zero(2);
        let out = integrate_exact(&h, &[0.0, 1.0, 5.0], &IntegratorConfig::default()).unwrap();
        for p in out {
            assert!(linalg::max_abs(&(p.u - linalg::identity(2))) < 1e-15);
        }
    }

    #[test]
    fn static_drive_matches_exponential() {
        let h = FourierOperator::constant(sigma_x().scale(0.3));
        for method in [IntegratorMethod::RkAdaptive, IntegratorMethod::MagnusMidpoint] {
            let out = integrate_exact(&h, &[0.0, 2.0], &IntegratorConfig::with_method(method)).unwrap();
            let exact = linalg::expm_hermitian_unchecked(&sigma_x().scale(0.3), 2.0);
            assert!(linalg::max_abs(&(&out[1].u - exact)) < 1e-10, "{method:?}");
        }
    }

    #[test]
    fn unsorted_grid_is_rejected() {
        let h = FourierOperator::constant(sigma_z());
        assert_eq!(integrate_exact(&h, &[1.0, 0.0], &IntegratorConfig::default()).unwrap_err(), OracleError::BadGrid);
    }

    #[test]
    fn bound_of_zero_is_zero() {
        assert_eq!(magnus_convergence_bound(&FourierOperator::zero(2), 0.0, 10.0), 0.0);
    }
}
