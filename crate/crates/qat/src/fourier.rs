//! Finite almost-periodic operator series.
//!
//! A [`FourierOperator`] stores `Σ_k A_k e^{−iΛ_k s}` as a list of modes sorted
//! by frequency. Every constructor merges frequencies closer than
//! `tol.freq`, drops coefficients whose largest entry is at most `tol.drop`,
//! and snaps clusters that reach `|Λ| ≤ tol.res` onto exactly zero.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, OperatorMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FourierError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("coefficient at frequency {frequency} has shape {rows}x{cols}, expected {dim}x{dim}")]
    BadShape { frequency: f64, rows: usize, cols: usize, dim: usize },
    #[error("non-finite frequency or coefficient near frequency {frequency}")]
    NonFinite { frequency: f64 },
    #[error("antiderivative of a secular (zero-frequency) mode; regularize first")]
    SecularInput,
    #[error("cutoff must be finite and non-negative, got {0}")]
    InvalidCutoff(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Frequencies closer than this are the same frequency.
    pub freq: f64,
    /// Modes whose largest coefficient entry is at most this are dropped.
    pub drop: f64,
    /// `|Λ| ≤ res` counts as DC.
    pub res: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { freq: 1e-9, drop: 1e-14, res: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierMode {
    pub frequency: f64,
    pub coeff: OperatorMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierOperator {
    dim: usize,
    modes: Vec<FourierMode>,
    tol: Tolerances,
}

impl FourierOperator {
    pub fn zero(dim: usize) -> Self {
        Self::zero_with(dim, Tolerances::default())
    }

    pub fn zero_with(dim: usize, tol: Tolerances) -> Self {
        Self { dim, modes: Vec::new(), tol }
    }

    /// Time-independent operator.
    pub fn constant(matrix: OperatorMatrix) -> Self {
        let dim = matrix.nrows();
        Self::normalized(dim, Tolerances::default(), vec![(0.0, matrix)])
    }

    pub fn from_modes<I>(dim: usize, modes: I) -> Result<Self, FourierError>
    where
        I: IntoIterator<Item = (f64, OperatorMatrix)>,
    {
        Self::from_modes_with(dim, Tolerances::default(), modes)
    }

    pub fn from_modes_with<I>(dim: usize, tol: Tolerances, modes: I) -> Result<Self, FourierError>
    where
        I: IntoIterator<Item = (f64, OperatorMatrix)>,
    {
        let raw: Vec<(f64, OperatorMatrix)> = modes.into_iter().collect();
        for (frequency, coeff) in &raw {
            if coeff.nrows() != dim || coeff.ncols() != dim {
                return Err(FourierError::BadShape {
                    frequency: *frequency,
                    rows: coeff.nrows(),
                    cols: coeff.ncols(),
                    dim,
                });
            }
            if !frequency.is_finite() || !linalg::is_finite(coeff) {
                return Err(FourierError::NonFinite { frequency: *frequency });
            }
        }
        Ok(Self::normalized(dim, tol, raw))
    }

    /// `A e^{−iΛs} + A† e^{iΛs}`, the usual way a drive term enters.
    pub fn hermitian_pair(frequency: f64, coeff: OperatorMatrix) -> Result<Self, FourierError> {
        let dim = coeff.nrows();
        let adj = coeff.adjoint();
        Self::from_modes(dim, [(frequency, coeff), (-frequency, adj)])
    }

    fn normalized(dim: usize, tol: Tolerances, mut raw: Vec<(f64, OperatorMatrix)>) -> Self {
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut modes: Vec<FourierMode> = Vec::with_capacity(raw.len());
        let mut iter = raw.into_iter().peekable();
        while let Some((first, mut coeff)) = iter.next() {
            let mut rep = first;
            while let Some((f, _)) = iter.peek() {
                if *f - first > tol.freq {
                    break;
                }
                let (f, c) = iter.next().expect("peeked");
                if f.abs() < rep.abs() {
                    rep = f;
                }
                coeff += c;
            }
            if rep.abs() <= tol.res {
                rep = 0.0;
            }
            if linalg::max_abs(&coeff) > tol.drop {
                modes.push(FourierMode { frequency: rep, coeff });
            }
        }
        Self { dim, modes, tol }
    }

    fn rebuilt(&self, raw: Vec<(f64, OperatorMatrix)>) -> Self {
        Self::normalized(self.dim, self.tol, raw)
    }

    fn check_dim(&self, other: &Self) -> Result<(), FourierError> {
        if self.dim != other.dim {
            return Err(FourierError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> &[FourierMode] {
        &self.modes
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.frequency).collect()
    }

    /// Coefficient stored at `frequency` (within `tol.freq`).
    pub fn coefficient(&self, frequency: f64) -> Option<&OperatorMatrix> {
        self.modes
            .iter()
            .find(|m| (m.frequency - frequency).abs() <= self.tol.freq)
            .map(|m| &m.coeff)
    }

    /// True when every mode sits at `|Λ| ≤ tol.res`.
    pub fn is_static(&self) -> bool {
        self.modes.iter().all(|m| m.frequency.abs() <= self.tol.res)
    }

    pub fn max_frequency(&self) -> f64 {
        self.modes.iter().fold(0.0_f64, |acc, m| acc.max(m.frequency.abs()))
    }

    /// Largest coefficient entry over all modes.
    pub fn max_coeff_norm(&self) -> f64 {
        self.modes.iter().fold(0.0_f64, |acc, m| acc.max(linalg::max_abs(&m.coeff)))
    }

    /// Sum of coefficient spectral norms, an upper bound on `‖A(s)‖₂`.
    pub fn norm_bound(&self) -> f64 {
        self.modes.iter().map(|m| linalg::spectral_norm(&m.coeff)).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self, FourierError> {
        self.check_dim(other)?;
        let raw = self
            .modes
            .iter()
            .chain(other.modes.iter())
            .map(|m| (m.frequency, m.coeff.clone()))
            .collect();
        Ok(self.rebuilt(raw))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FourierError> {
        self.add(&other.scale_real(-1.0))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let raw = self.modes.iter().map(|m| (m.frequency, m.coeff.clone() * factor)).collect();
        self.rebuilt(raw)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        let raw = self.modes.iter().map(|m| (m.frequency, m.coeff.scale(factor))).collect();
        self.rebuilt(raw)
    }

    /// Pointwise product; frequencies add.
    pub fn product(&self, other: &Self) -> Result<Self, FourierError> {
        self.check_dim(other)?;
        let mut raw = Vec::with_capacity(self.len() * other.len());
        for a in &self.modes {
            for b in &other.modes {
                raw.push((a.frequency + b.frequency, &a.coeff * &b.coeff));
            }
        }
        Ok(self.rebuilt(raw))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, FourierError> {
        self.check_dim(other)?;
        let mut raw = Vec::with_capacity(self.len() * other.len());
        for a in &self.modes {
            for b in &other.modes {
                raw.push((a.frequency + b.frequency, linalg::commutator(&a.coeff, &b.coeff)));
            }
        }
        Ok(self.rebuilt(raw))
    }

    /// `A(s)†`: the mode `(Λ, A)` becomes `(−Λ, A†)`.
    pub fn adjoint(&self) -> Self {
        let raw = self.modes.iter().map(|m| (-m.frequency, m.coeff.adjoint())).collect();
        self.rebuilt(raw)
    }

    /// Coefficient of the DC block, or the zero matrix.
    pub fn time_average(&self) -> OperatorMatrix {
        let mut acc = linalg::zeros(self.dim);
        for m in self.modes.iter().filter(|m| m.frequency.abs() <= self.tol.res) {
            acc += &m.coeff;
        }
        acc
    }

    /// Splits into `(slow, fast)` with slow holding `|Λ| ≤ cutoff` and the DC block.
    pub fn lowpass(&self, cutoff: f64) -> Result<(Self, Self), FourierError> {
        if !cutoff.is_finite() || cutoff < 0.0 {
            return Err(FourierError::InvalidCutoff(cutoff));
        }
        let edge = cutoff.max(self.tol.res);
        let (slow, fast): (Vec<&FourierMode>, Vec<&FourierMode>) =
            self.modes.iter().partition(|m| m.frequency.abs() <= edge);
        let pack = |modes: Vec<&FourierMode>| Self {
            dim: self.dim,
            modes: modes.into_iter().cloned().collect(),
            tol: self.tol,
        };
        Ok((pack(slow), pack(fast)))
    }

    /// Van Vleck antiderivative: `(Λ, A) ↦ (Λ, A/(−iΛ))`, no integration constant.
    pub fn antiderivative(&self) -> Result<Self, FourierError> {
        if self.modes.iter().any(|m| m.frequency.abs() <= self.tol.res) {
            return Err(FourierError::SecularInput);
        }
        let raw = self
            .modes
            .iter()
            .map(|m| (m.frequency, m.coeff.clone() * (Complex64::new(0.0, 1.0) / m.frequency)))
            .collect();
        Ok(self.rebuilt(raw))
    }

    /// `(Λ, A) ↦ (Λ, −iΛA)`; DC modes vanish.
    pub fn derivative(&self) -> Self {
        let raw = self
            .modes
            .iter()
            .filter(|m| m.frequency != 0.0)
            .map(|m| (m.frequency, m.coeff.clone() * Complex64::new(0.0, -m.frequency)))
            .collect();
        self.rebuilt(raw)
    }

    pub fn evaluate(&self, s: f64) -> OperatorMatrix {
        let mut acc = linalg::zeros(self.dim);
        for m in &self.modes {
            if m.frequency == 0.0 {
                acc += &m.coeff;
            } else {
                acc += m.coeff.clone() * Complex64::from_polar(1.0, -m.frequency * s);
            }
        }
        acc
    }

    /// Applies `f` to every coefficient, leaving frequencies fixed.
    pub fn map_coefficients<F>(&self, f: F) -> Self
    where
        F: Fn(&OperatorMatrix) -> OperatorMatrix,
    {
        let raw = self.modes.iter().map(|m| (m.frequency, f(&m.coeff))).collect();
        self.rebuilt(raw)
    }

    /// Rescales the time variable: `A(s) ↦ A(s/scale)`, so frequencies divide by `scale`.
    pub fn rescale_time(&self, scale: f64) -> Self {
        let raw = self.modes.iter().map(|m| (m.frequency / scale, m.coeff.clone())).collect();
        self.rebuilt(raw)
    }

    /// Largest deviation from `A(−Λ) = A(Λ)†` over all modes.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for m in &self.modes {
            let partner = self.coefficient(-m.frequency);
            let d = match partner {
                Some(p) => linalg::max_abs(&(p - m.coeff.adjoint())),
                None => linalg::max_abs(&m.coeff),
            };
            worst = worst.max(d);
        }
        worst
    }

    /// Largest mode-coefficient entry of `self − other`.
    pub fn distance(&self, other: &Self) -> Result<f64, FourierError> {
        Ok(self.sub(other)?.max_coeff_norm())
    }

    /// `Σ_n λⁿ orders[n−1]`.
    pub fn weighted_sum(orders: &[FourierOperator], lambda: f64) -> Result<Self, FourierError> {
        let dim = orders.first().map(|o| o.dim).unwrap_or(0);
        let tol = orders.first().map(|o| o.tol).unwrap_or_default();
        let mut raw = Vec::new();
        let mut weight = 1.0;
        for op in orders {
            if op.dim != dim {
                return Err(FourierError::DimensionMismatch { left: dim, right: op.dim });
            }
            weight *= lambda;
            raw.extend(op.modes.iter().map(|m| (m.frequency, m.coeff.scale(weight))));
        }
        Ok(Self::normalized(dim, tol, raw))
    }
}
