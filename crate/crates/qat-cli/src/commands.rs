use std::path::{Path, PathBuf};

use qat::metrics::{self, ErrorReport, ScalingFit};
use qat::propagator::{assemble_from, effective_propagator, effective_track, referenced};
use qat::{integrate_exact, PropagatorSample, QatExpansion, SampleKind, SystemSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Format, ReferenceChoice, RunConfig, SystemConfig, SCHEMA_VERSION};
use crate::error::CliError;
use crate::output::{self, Table};

/// Settings shared by every subcommand after flags, environment and config are merged.
pub struct Context {
    pub config: RunConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub order: Option<usize>,
    pub cutoff: Option<f64>,
    pub pool: rayon::ThreadPool,
}

impl Context {
    fn order(&self) -> usize {
        self.order.unwrap_or(self.config.order)
    }

    fn cutoff(&self) -> Option<f64> {
        self.cutoff.or(self.config.cutoff)
    }

    fn out(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    fn expand(&self, sys: &SystemSpec, order: usize) -> Result<QatExpansion, CliError> {
        Ok(sys.expand(order, self.cutoff())?)
    }
}

fn interaction(sys: &SystemSpec) -> Result<qat::FourierOperator, CliError> {
    sys.interaction_hamiltonian().map_err(|e| CliError::Config(format!("cannot assemble H_I: {e}")))
}

pub fn expand(ctx: &Context) -> Result<(), CliError> {
    let sys = ctx.config.system()?.build(None)?;
    let exp = ctx.expand(&sys, ctx.order())?;
    let residual = exp.homological_residual()?;
    let body = match ctx.format {
        Format::Json => {
            let orders = |ops: &[qat::FourierOperator]| -> Value {
                Value::Array(ops.iter().enumerate().map(|(i, op)| json!({ "order": i + 1, "modes": output::modes(op) })).collect())
            };
            output::compact(&json!({
                "schema_version": SCHEMA_VERSION,
                "system": sys.name,
                "dim": sys.dim,
                "lambda": sys.lambda,
                "order": exp.order,
                "cutoff": exp.cutoff,
                "homological_residual": residual,
                "h_eff": orders(&exp.h_eff),
                "phi": orders(&exp.phi),
            }))
        }
        Format::Csv => {
            let mut s = String::from("quantity,order,frequency,row,col,re,im\n");
            for (name, ops) in [("h_eff", &exp.h_eff), ("phi", &exp.phi)] {
                for (i, op) in ops.iter().enumerate() {
                    for m in op.modes() {
                        for r in 0..m.coeff.nrows() {
                            for c in 0..m.coeff.ncols() {
                                let z = m.coeff[(r, c)];
                                s.push_str(&format!(
                                    "{name},{},{},{r},{c},{},{}\n",
                                    i + 1,
                                    output::number(m.frequency),
                                    output::number(z.re),
                                    output::number(z.im)
                                ));
                            }
                        }
                    }
                }
            }
            s
        }
    };
    let mut summary = format!(
        "system {} (dim {}), lambda {}, order {}, cutoff {}\n",
        sys.name, sys.dim, sys.lambda, exp.order, exp.cutoff
    );
    for (i, h) in exp.h_eff.iter().enumerate() {
        summary.push_str(&format!(
            "  h_eff[{}]: {} modes, max frequency {:.6e}, |dc| {:.6e}\n",
            i + 1,
            h.len(),
            h.max_frequency(),
            qat::linalg::spectral_norm(&h.time_average())
        ));
    }
    for (i, p) in exp.phi.iter().enumerate() {
        summary.push_str(&format!("  phi[{}]: {} modes, max |coeff| {:.6e}\n", i + 1, p.len(), p.max_coeff_norm()));
    }
    summary.push_str(&format!("  homological residual {residual:.3e}\n"));
    output::emit(ctx.out(), &body)?;
    if ctx.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

pub fn simulate(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let sys = cfg.system()?.build(None)?;
    let grid = cfg.grid.as_ref().ok_or_else(|| CliError::Config("simulate needs a grid".into()))?.resolve(sys.lambda)?;
    let psi0 = cfg.initial_state(sys.dim)?;
    let integrator = cfg.integrator()?;
    let h = interaction(&sys)?;
    let exp = ctx.expand(&sys, ctx.order())?;
    let plan = cfg.plan.plan(&exp)?;
    let s0 = grid[0];

    let (exact, approx) = ctx.pool.install(|| {
        rayon::join(
            || -> Result<Option<Vec<PropagatorSample>>, CliError> {
                if cfg.oracle {
                    Ok(Some(integrate_exact(&h, &grid, &integrator)?))
                } else {
                    Ok(None)
                }
            },
            || -> Result<_, CliError> {
                let qat = assemble_from(&exp, &grid, &plan, s0)?;
                let eff0 = effective_propagator(&exp, s0, &plan)?.u;
                let eff = referenced(&effective_track(&exp, &grid, &plan)?, &eff0);
                Ok((qat, eff))
            },
        )
    });
    let exact = exact?;
    let (qat, eff) = approx?;

    let mut columns = vec!["s".to_string()];
    let mut series: Vec<Vec<f64>> = Vec::new();
    let mut tracks: Vec<(&str, &[PropagatorSample])> = Vec::new();
    if let Some(e) = &exact {
        tracks.push(("exact", e));
    }
    tracks.push(("qat", &qat));
    tracks.push(("effective", &eff));
    for (name, track) in &tracks {
        for target in 0..sys.dim {
            columns.push(format!("{name}_p{target}"));
            series.push(metrics::population_series(track, &psi0, target)?);
        }
    }
    if let Some(e) = &exact {
        for (name, track) in [("qat", &qat), ("effective", &eff)] {
            columns.push(format!("dist_{name}"));
            series.push(e.iter().zip(track.iter()).map(|(a, b)| metrics::propagator_distance(a, b)).collect::<Result<_, _>>()?);
        }
    }
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, &s)| std::iter::once(s).chain(series.iter().map(|c| c[i])).collect())
        .collect();
    let table = Table { columns, rows };
    let body = match ctx.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut v = table.to_json();
            v["schema_version"] = json!(SCHEMA_VERSION);
            v["system"] = json!(sys.name);
            v["order"] = json!(exp.order);
            output::compact(&v)
        }
    };
    output::emit(ctx.out(), &body)
}

struct FitRow {
    order: usize,
    expected: f64,
    fit: Option<ScalingFit>,
}

fn sweep_cell(
    system: &SystemConfig,
    lambda: f64,
    order: usize,
    grid: &[f64],
    reference: &[PropagatorSample],
    ctx: &Context,
) -> Result<ErrorReport, CliError> {
    let sys = system.build(Some(lambda))?;
    let exp = ctx.expand(&sys, order)?;
    let plan = ctx.config.plan.plan(&exp)?;
    let track = assemble_from(&exp, grid, &plan, grid[0])?;
    Ok(metrics::error_report(lambda, order, reference, &track)?)
}

pub fn sweep(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let system = cfg.system()?;
    let sw = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("sweep needs a sweep section".into()))?;
    let orders: Vec<usize> = match ctx.order {
        Some(n) => vec![n],
        None => sw.orders.clone(),
    };
    if orders.is_empty() || orders.contains(&0) {
        return Err(CliError::Config("sweep.orders must be non-empty and at least 1".into()));
    }
    if sw.points < 2 || !(sw.prefactor > 0.0) {
        return Err(CliError::Config("sweep.points must be at least 2 and sweep.prefactor positive".into()));
    }
    // Validates the λ set up front so no work is wasted on an unfittable sweep.
    if let Err(e) = metrics::fit_scaling(&sw.lambdas, &vec![1.0; sw.lambdas.len()]) {
        return Err(CliError::Config(format!("sweep.lambdas: {e}")));
    }
    if sw.reference == ReferenceChoice::ClosedForm && system.closed_form(sw.lambdas[0]).is_none() {
        return Err(CliError::Config("reference \"closed_form\" is only available for kind \"rabi_complex\"".into()));
    }
    let integrator = cfg.integrator()?;
    let grids: Vec<Vec<f64>> =
        sw.lambdas.iter().map(|&l| qat::linalg::linspace(0.0, sw.prefactor / l.powi(sw.k as i32 + 1), sw.points)).collect();

    let (references, cells) = ctx.pool.install(|| -> Result<_, CliError> {
        let references: Vec<Vec<PropagatorSample>> = sw
            .lambdas
            .par_iter()
            .zip(grids.par_iter())
            .map(|(&lambda, grid)| -> Result<_, CliError> {
                match sw.reference {
                    ReferenceChoice::ClosedForm => {
                        let cf = system.closed_form(lambda).expect("checked above");
                        Ok(grid.iter().map(|&s| PropagatorSample { s, u: cf.propagator(s), kind: SampleKind::Exact }).collect())
                    }
                    ReferenceChoice::Oracle => {
                        let sys = system.build(Some(lambda))?;
                        Ok(integrate_exact(&interaction(&sys)?, grid, &integrator)?)
                    }
                }
            })
            .collect::<Result<_, _>>()?;
        let jobs: Vec<(usize, usize)> = (0..sw.lambdas.len()).flat_map(|i| orders.iter().map(move |&n| (i, n))).collect();
        let cells: Vec<ErrorReport> = jobs
            .par_iter()
            .map(|&(i, n)| sweep_cell(system, sw.lambdas[i], n, &grids[i], &references[i], ctx))
            .collect::<Result<_, _>>()?;
        Ok((references, cells))
    })?;
    drop(references);

    let mut fits = Vec::new();
    for &n in &orders {
        let sups: Vec<f64> = cells.iter().filter(|c| c.order == n).map(|c| c.sup).collect();
        let fit = metrics::fit_scaling(&sw.lambdas, &sups)?;
        fits.push(FitRow { order: n, expected: n as f64 - sw.k as f64, fit });
    }

    let body = match ctx.format {
        Format::Csv => {
            let mut s = String::from("row,lambda,order,window,sup_error,slope,half_width,monotone,expected\n");
            for c in &cells {
                let window = c.s_grid.last().copied().unwrap_or(0.0);
                s.push_str(&format!(
                    "cell,{},{},{},{},,,,\n",
                    output::number(c.lambda),
                    c.order,
                    output::number(window),
                    output::number(c.sup)
                ));
            }
            for f in &fits {
                match f.fit {
                    Some(fit) => s.push_str(&format!(
                        "fit,,{},,,{},{},{},{}\n",
                        f.order,
                        output::number(fit.slope),
                        output::number(fit.half_width),
                        fit.monotone,
                        output::number(f.expected)
                    )),
                    None => s.push_str(&format!("fit,,{},,,,,,{}\n", f.order, output::number(f.expected))),
                }
            }
            s
        }
        Format::Json => output::compact(&json!({
            "schema_version": SCHEMA_VERSION,
            "k": sw.k,
            "prefactor": sw.prefactor,
            "cells": cells.iter().map(|c| json!({
                "lambda": c.lambda,
                "order": c.order,
                "window": c.s_grid.last(),
                "sup": c.sup,
                "s_grid": c.s_grid,
                "distances": c.distances,
            })).collect::<Vec<_>>(),
            "fits": fits.iter().map(|f| json!({
                "order": f.order,
                "expected": f.expected,
                "slope": f.fit.map(|x| x.slope),
                "intercept": f.fit.map(|x| x.intercept),
                "half_width": f.fit.map(|x| x.half_width),
                "monotone": f.fit.map(|x| x.monotone),
            })).collect::<Vec<_>>(),
        })),
    };
    output::emit(ctx.out(), &body)
}

pub fn verify(out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let outcomes = qat::verify::run_all();
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    let total = outcomes.len();
    let body = match format {
        Format::Csv => {
            let mut s: String = outcomes.iter().map(|o| format!("{o}\n")).collect();
            s.push_str(&format!("{} of {total} criteria passed\n", total - failed));
            s
        }
        Format::Json => output::compact(&json!({
            "schema_version": SCHEMA_VERSION,
            "passed": total - failed,
            "total": total,
            "criteria": outcomes.iter().map(|o| json!({
                "id": o.id,
                "title": o.title,
                "passed": o.passed(),
                "error": o.error,
                "checks": o.checks.iter().map(|c| json!({
                    "label": c.label,
                    "value": c.value,
                    "limit": c.limit,
                    "passed": c.passed(),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })),
    };
    output::emit(out, &body)?;
    if failed > 0 {
        return Err(CliError::Verification { failed, total });
    }
    Ok(())
}
