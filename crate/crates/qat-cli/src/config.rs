//! Run configuration: JSON with a required `schema_version`, unknown fields rejected.

use std::path::Path;

use num_complex::Complex64;
use qat::linalg::OperatorMatrix;
use qat::propagator::{interaction_picture, EffectivePropagatorPlan};
use qat::systems::{self, DoubleWellParams, RamanParams, SystemSpec};
use qat::{FourierOperator, IntegratorConfig, IntegratorMethod};
use serde::Deserialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub system: Option<SystemConfig>,
    #[serde(default = "default_order")]
    pub order: usize,
    pub cutoff: Option<f64>,
    pub grid: Option<GridConfig>,
    #[serde(default = "default_true")]
    pub oracle: bool,
    #[serde(default)]
    pub plan: PlanChoice,
    /// Initial state as `[re, im]` amplitudes; basis state 0 when absent.
    pub initial_state: Option<Vec<[f64; 2]>>,
    pub integrator: Option<IntegratorSettings>,
    pub sweep: Option<SweepConfig>,
    pub output: Option<OutputConfig>,
}

fn default_order() -> usize {
    2
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    Preset {
        name: String,
    },
    RabiComplex {
        lambda: f64,
        detuning: f64,
    },
    RabiReal {
        lambda: f64,
        detuning: f64,
    },
    Raman {
        lambda: f64,
        omega: [f64; 2],
        detuning: [f64; 2],
        #[serde(default)]
        phase: [f64; 2],
        #[serde(default = "default_excited")]
        excited_energy: f64,
    },
    DoubleWell {
        lambda: f64,
        dc_ratio: f64,
        g: f64,
        #[serde(default = "default_basis")]
        basis_dim: usize,
    },
    Custom {
        lambda: f64,
        h0: Vec<Vec<[f64; 2]>>,
        v: Vec<ModeConfig>,
        cutoff: Option<f64>,
    },
}

fn default_excited() -> f64 {
    10.0
}

fn default_basis() -> usize {
    60
}

/// One Schrödinger-picture mode `A e^{−iΛs}` of the order-`order` perturbation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    #[serde(default = "one")]
    pub order: usize,
    pub frequency: f64,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub start: f64,
    pub stop: Option<f64>,
    pub points: usize,
    /// `stop = start + prefactor/λ^{k+1}` when `stop` is absent.
    pub window: Option<WindowRule>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowRule {
    #[serde(default = "unit")]
    pub prefactor: f64,
    pub k: usize,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PlanChoice {
    #[default]
    Auto,
    Constant,
    SlowOde,
    ExpPt1,
    ExpPt2,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSettings {
    #[serde(default)]
    pub method: MethodChoice,
    pub rel_tol: Option<f64>,
    pub max_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    #[default]
    Rk,
    Midpoint,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceChoice {
    #[default]
    Oracle,
    ClosedForm,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub lambdas: Vec<f64>,
    pub orders: Vec<usize>,
    /// Leading vanishing effective orders; sets the window `prefactor/λ^{k+1}`.
    pub k: usize,
    #[serde(default = "unit")]
    pub prefactor: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub reference: ReferenceChoice,
}

fn default_points() -> usize {
    1001
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: Option<Format>,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "unsupported schema_version {} (this build reads {SCHEMA_VERSION})",
            cfg.schema_version
        )));
    }
    if cfg.order == 0 {
        return Err(CliError::Config("order must be at least 1".into()));
    }
    if let Some(c) = cfg.cutoff {
        if !(c.is_finite() && c >= 0.0) {
            return Err(CliError::Config(format!("cutoff must be finite and non-negative, got {c}")));
        }
    }
    Ok(cfg)
}

fn matrix(name: &str, rows: &[Vec<[f64; 2]>], dim: usize) -> Result<OperatorMatrix, CliError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::Config(format!("{name} must be a {dim}x{dim} matrix of [re, im] pairs")));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::Config(format!("{name} has non-finite entries")));
    }
    Ok(OperatorMatrix::from_fn(dim, dim, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

fn build_custom(lambda: f64, h0: &[Vec<[f64; 2]>], v: &[ModeConfig], cutoff: Option<f64>) -> Result<SystemSpec, CliError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(CliError::Config(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    let dim = h0.len();
    if dim == 0 {
        return Err(CliError::Config("h0 must be non-empty".into()));
    }
    let h0m = matrix("h0", h0, dim)?;
    if qat::linalg::hermiticity_defect(&h0m) > 1e-12 {
        return Err(CliError::Config("h0 is not Hermitian".into()));
    }
    let orders = v.iter().map(|m| m.order).max().unwrap_or(0);
    if orders == 0 || v.iter().any(|m| m.order == 0) {
        return Err(CliError::Config("v needs at least one mode, with orders starting at 1".into()));
    }
    let mut v_orders = Vec::with_capacity(orders);
    for n in 1..=orders {
        let mut modes = Vec::new();
        for (idx, m) in v.iter().enumerate().filter(|(_, m)| m.order == n) {
            modes.push((m.frequency, matrix(&format!("v[{idx}].matrix"), &m.matrix, dim)?));
        }
        let op = FourierOperator::from_modes(dim, modes).map_err(|e| CliError::Config(format!("v order {n}: {e}")))?;
        let defect = op.hermitian_defect();
        if defect > 1e-12 {
            return Err(CliError::Config(format!(
                "v order {n} is not Hermitian (defect {defect:.3e}); list each mode together with its conjugate partner"
            )));
        }
        v_orders.push(op);
    }
    let interaction = v_orders
        .iter()
        .map(|op| interaction_picture(&h0m, op))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(format!("interaction picture: {e}")))?;
    Ok(SystemSpec {
        name: "custom".into(),
        dim,
        h0: h0m,
        v_orders,
        interaction,
        lambda,
        base_freqs: Vec::new(),
        default_cutoff: cutoff.unwrap_or(lambda),
    })
}

impl SystemConfig {
    /// System with `lambda` substituted when given. Presets keep their other
    /// parameters fixed.
    pub fn build(&self, lambda: Option<f64>) -> Result<SystemSpec, CliError> {
        let pick = |own: f64| lambda.unwrap_or(own);
        let sys = match self {
            SystemConfig::Preset { name } => {
                let sys = systems::preset(name).ok_or_else(|| {
                    CliError::Config(format!("unknown preset {name:?}; known presets: {}", systems::PRESET_NAMES.join(", ")))
                })?;
                match lambda {
                    Some(l) if name.starts_with("double_well") => {
                        return Err(CliError::Config(format!(
                            "preset {name:?} ties its operators to lambda = {}; sweep it with kind \"double_well\" instead (asked for {l})",
                            sys.lambda
                        )))
                    }
                    Some(l) => sys.with_lambda(l),
                    None => sys,
                }
            }
            SystemConfig::RabiComplex { lambda: l, detuning } => systems::build_rabi_complex(pick(*l), *detuning)?,
            SystemConfig::RabiReal { lambda: l, detuning } => systems::build_rabi_real(pick(*l), *detuning)?,
            SystemConfig::Raman { lambda: l, omega, detuning, phase, excited_energy } => systems::build_raman(&RamanParams {
                lambda: pick(*l),
                omega: *omega,
                detuning: *detuning,
                phase: *phase,
                excited_energy: *excited_energy,
            })?,
            SystemConfig::DoubleWell { lambda: l, dc_ratio, g, basis_dim } => {
                systems::build_double_well(&DoubleWellParams { lambda: pick(*l), dc_ratio: *dc_ratio, g: *g, basis_dim: *basis_dim })?
            }
            SystemConfig::Custom { lambda: l, h0, v, cutoff } => build_custom(pick(*l), h0, v, *cutoff)?,
        };
        Ok(sys)
    }

    /// Exact reference available for sweeps with `reference = closed_form`.
    pub fn closed_form(&self, lambda: f64) -> Option<systems::RabiExact> {
        match self {
            SystemConfig::RabiComplex { detuning, .. } => Some(systems::RabiExact { lambda, detuning: *detuning }),
            _ => None,
        }
    }
}

impl GridConfig {
    pub fn resolve(&self, lambda: f64) -> Result<Vec<f64>, CliError> {
        if self.points < 2 {
            return Err(CliError::Config("grid.points must be at least 2".into()));
        }
        let stop = match (self.stop, self.window) {
            (Some(s), None) => s,
            (None, Some(w)) => self.start + w.prefactor / lambda.powi(w.k as i32 + 1),
            _ => return Err(CliError::Config("grid needs exactly one of stop or window".into())),
        };
        if !(self.start.is_finite() && stop.is_finite() && stop > self.start) {
            return Err(CliError::Config(format!("grid must satisfy start < stop, got [{}, {stop}]", self.start)));
        }
        Ok(qat::linalg::linspace(self.start, stop, self.points))
    }
}

impl PlanChoice {
    pub fn plan(self, exp: &qat::QatExpansion) -> Result<EffectivePropagatorPlan, qat::PropagatorError> {
        Ok(match self {
            PlanChoice::Auto => EffectivePropagatorPlan::auto(exp)?,
            PlanChoice::Constant => EffectivePropagatorPlan::constant(),
            PlanChoice::SlowOde => EffectivePropagatorPlan::slow_ode(),
            PlanChoice::ExpPt1 => EffectivePropagatorPlan::exponential_pt(1),
            PlanChoice::ExpPt2 => EffectivePropagatorPlan::exponential_pt(2),
        })
    }
}

impl RunConfig {
    pub fn integrator(&self) -> Result<IntegratorConfig, CliError> {
        let mut cfg = IntegratorConfig::default();
        if let Some(s) = self.integrator {
            cfg.method = match s.method {
                MethodChoice::Rk => IntegratorMethod::RkAdaptive,
                MethodChoice::Midpoint => IntegratorMethod::MagnusMidpoint,
            };
            if let Some(t) = s.rel_tol {
                if !(t > 0.0) {
                    return Err(CliError::Config(format!("integrator.rel_tol must be positive, got {t}")));
                }
                cfg.rel_tol = t;
            }
            cfg.max_step = s.max_step;
        }
        Ok(cfg)
    }

    pub fn system(&self) -> Result<&SystemConfig, CliError> {
        self.system.as_ref().ok_or_else(|| CliError::Config("config has no system".into()))
    }

    pub fn initial_state(&self, dim: usize) -> Result<nalgebra::DVector<Complex64>, CliError> {
        match &self.initial_state {
            None => Ok(nalgebra::DVector::from_fn(dim, |i, _| if i == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })),
            Some(v) if v.len() == dim => {
                let psi = nalgebra::DVector::from_fn(dim, |i, _| Complex64::new(v[i][0], v[i][1]));
                let norm = psi.norm();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(CliError::Config(format!("initial_state must be normalized, norm is {norm}")));
                }
                Ok(psi)
            }
            Some(v) => Err(CliError::Config(format!("initial_state has {} entries, system dimension is {dim}", v.len()))),
        }
    }
}
