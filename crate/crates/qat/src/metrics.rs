//! Distances between propagator tracks, error-scaling fits and populations.

use nalgebra::DVector;
use num_complex::Complex64;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::linalg::{self, OperatorMatrix};
use crate::propagator::PropagatorSample;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("samples taken at different times ({0} vs {1})")]
    TimeMismatch(f64, f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("tracks have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("initial state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("target index {index} out of range for dimension {dim}")]
    TargetOutOfRange { index: usize, dim: usize },
    #[error("scaling fit needs at least 3 lambda values, got {0}")]
    TooFewPoints(usize),
    #[error("lambda values span only a factor {0:.3}; at least 4 is required")]
    NarrowRange(f64),
    #[error("lambda values and errors must be positive and finite")]
    NonPositive,
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn check_pair(a: &PropagatorSample, b: &PropagatorSample) -> Result<(), MetricsError> {
    if !same_time(a.s, b.s) {
        return Err(MetricsError::TimeMismatch(a.s, b.s));
    }
    if a.u.nrows() != b.u.nrows() {
        return Err(MetricsError::DimensionMismatch(a.u.nrows(), b.u.nrows()));
    }
    Ok(())
}

/// Spectral norm of `U_a − U_b`; a global phase difference counts.
pub fn propagator_distance(a: &PropagatorSample, b: &PropagatorSample) -> Result<f64, MetricsError> {
    check_pair(a, b)?;
    Ok(linalg::spectral_norm(&(&a.u - &b.u)))
}

/// `‖U_a − e^{iφ}U_b‖₂` with `φ = arg tr(U_b†U_a)`.
pub fn phase_insensitive_distance(a: &PropagatorSample, b: &PropagatorSample) -> Result<f64, MetricsError> {
    check_pair(a, b)?;
    let overlap = (b.u.adjoint() * &a.u).trace();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { linalg::ONE };
    Ok(linalg::spectral_norm(&(&a.u - &b.u * phase)))
}

/// `|tr(U_a†U_b)|²/d²`.
pub fn gate_fidelity(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    let d = a.nrows() as f64;
    (a.adjoint() * b).trace().norm_sqr() / (d * d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub lambda: f64,
    pub order: usize,
    pub s_grid: Vec<f64>,
    pub distances: Vec<f64>,
    pub sup: f64,
}

pub fn error_report(
    lambda: f64,
    order: usize,
    reference: &[PropagatorSample],
    approx: &[PropagatorSample],
) -> Result<ErrorReport, MetricsError> {
    if reference.len() != approx.len() {
        return Err(MetricsError::LengthMismatch(reference.len(), approx.len()));
    }
    let distances = reference
        .iter()
        .zip(approx)
        .map(|(r, a)| propagator_distance(r, a))
        .collect::<Result<Vec<_>, _>>()?;
    let sup = distances.iter().fold(0.0_f64, |m, &d| m.max(d));
    Ok(ErrorReport { lambda, order, s_grid: reference.iter().map(|p| p.s).collect(), distances, sup })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% two-sided Student-t half-width of the slope (NaN with exactly two points).
    pub half_width: f64,
    /// Errors shrink strictly as lambda decreases.
    pub monotone: bool,
}

/// Least-squares slope of `log(error)` against `log(λ)`. Returns `None` when
/// every error is at machine-precision level.
pub fn fit_scaling(lambdas: &[f64], errors: &[f64]) -> Result<Option<ScalingFit>, MetricsError> {
    if lambdas.len() != errors.len() {
        return Err(MetricsError::LengthMismatch(lambdas.len(), errors.len()));
    }
    if lambdas.len() < 3 {
        return Err(MetricsError::TooFewPoints(lambdas.len()));
    }
    if lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) || errors.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(MetricsError::NonPositive);
    }
    let lo = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 4.0 - 1e-12 {
        return Err(MetricsError::NarrowRange(hi / lo));
    }
    if errors.iter().all(|e| *e <= 1e-14) {
        return Ok(None);
    }
    if errors.iter().any(|e| *e <= 0.0) {
        return Err(MetricsError::NonPositive);
    }
    let xs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let dof = xs.len() - 2;
    let se = (rss / dof as f64 / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof as f64).map(|d| d.inverse_cdf(0.975)).unwrap_or(f64::NAN);
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| lambdas[a].total_cmp(&lambdas[b]));
    let monotone = order.windows(2).all(|w| errors[w[0]] < errors[w[1]]);
    Ok(Some(ScalingFit { slope, intercept, half_width: t * se, monotone }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub order: usize,
    /// Leading vanishing effective orders.
    pub k: usize,
    pub expected: f64,
    pub reports: Vec<ErrorReport>,
    pub fit: Option<ScalingFit>,
}

impl ScalingReport {
    pub fn sups(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.sup).collect()
    }
}

/// Sweeps `λ`, measuring the sup-distance between `approx` and `reference` on
/// `[0, T_λ]` with `T_λ = prefactor/λ^{k+1}`. `k` counts leading vanishing
/// effective-Hamiltonian orders and is supplied by the caller.
pub fn scaling_exponent<E, F, G>(
    order: usize,
    k: usize,
    lambdas: &[f64],
    prefactor: f64,
    points: usize,
    mut reference: F,
    mut approx: G,
) -> Result<ScalingReport, E>
where
    E: From<MetricsError>,
    F: FnMut(f64, &[f64]) -> Result<Vec<PropagatorSample>, E>,
    G: FnMut(f64, &[f64]) -> Result<Vec<PropagatorSample>, E>,
{
    let mut reports = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let window = prefactor / lambda.powi(k as i32 + 1);
        let grid = linalg::linspace(0.0, window, points);
        let r = reference(lambda, &grid)?;
        let a = approx(lambda, &grid)?;
        reports.push(error_report(lambda, order, &r, &a)?);
    }
    let sups: Vec<f64> = reports.iter().map(|r| r.sup).collect();
    let fit = fit_scaling(lambdas, &sups)?;
    Ok(ScalingReport { order, k, expected: order as f64 - k as f64, reports, fit })
}

/// `|⟨target|U(s)|ψ₀⟩|²` along a track.
pub fn population_series(track: &[PropagatorSample], psi0: &DVector<Complex64>, target: usize) -> Result<Vec<f64>, MetricsError> {
    let norm = psi0.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(MetricsError::NotNormalized(norm));
    }
    let dim = psi0.len();
    if target >= dim {
        return Err(MetricsError::TargetOutOfRange { index: target, dim });
    }
    track
        .iter()
        .map(|p| {
            if p.u.nrows() != dim {
                return Err(MetricsError::DimensionMismatch(p.u.nrows(), dim));
            }
            let amp: Complex64 = (0..dim).map(|j| p.u[(target, j)] * psi0[j]).sum();
            Ok(amp.norm_sqr())
        })
        .collect()
}

/// Largest pointwise gap between two equally sampled series.
pub fn sup_difference(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::SampleKind;

    fn sample(s: f64, u: OperatorMatrix) -> PropagatorSample {
        PropagatorSample { s, u, kind: SampleKind::Exact }
    }

    #[test]
    fn global_phase_counts() {
        let u = linalg::identity(2);
        let phi = 0.3;
        let v = u.clone() * Complex64::from_polar(1.0, phi);
        let d = propagator_distance(&sample(1.0, u.clone()), &sample(1.0, v.clone())).unwrap();
        assert!((d - (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, phi)).norm()).abs() < 1e-14);
        assert!(phase_insensitive_distance(&sample(1.0, u), &sample(1.0, v)).unwrap() < 1e-14);
    }

    #[test]
    fn time_mismatch_is_an_error() {
        let u = linalg::identity(2);
        assert!(matches!(propagator_distance(&sample(0.0, u.clone()), &sample(1.0, u)), Err(MetricsError::TimeMismatch(..))));
    }

    #[test]
    fn exact_power_law_fits_exactly() {
        let l = [4e-4, 2e-4, 1e-4];
        let e: Vec<f64> = l.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        let fit = fit_scaling(&l, &e).unwrap().unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.monotone);
    }

    #[test]
    fn zero_errors_skip_the_fit() {
        assert_eq!(fit_scaling(&[4e-4, 2e-4, 1e-4], &[0.0; 3]).unwrap(), None);
    }

    #[test]
    fn narrow_range_rejected() {
        assert!(matches!(fit_scaling(&[1.0, 0.9, 0.8], &[1.0, 0.5, 0.2]), Err(MetricsError::NarrowRange(_))));
    }

    #[test]
    fn unnormalized_state_rejected() {
        let psi = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(matches!(population_series(&[], &psi, 0), Err(MetricsError::NotNormalized(_))));
    }
}
