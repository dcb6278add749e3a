use rayon::prelude::*;

use qcf_core::charfn::{cf_closed, CfEngine, CfSample, EngineRegistry, EngineTag};
use qcf_core::distributions::{density_for, LawDensity, LawTag};
use qcf_core::spectral::{
    approx_eigvec_p, approx_eigvec_x_plus_p, approx_eigvec_xp_plus_px, oscillator_eigenpair, unbounded_witness_x,
    vacuum_weights, ApproxEigenReport, Parity, VACUUM_LEVELS,
};
use qcf_core::Observable;

use crate::config::{EngineChoice, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const EXIT_OK: u8 = 0;
pub const EXIT_THRESHOLD: u8 = 1;
pub const EXIT_NON_CONVERGENCE: u8 = 3;

pub struct Outcome {
    pub table: Table,
    pub code: u8,
    /// Printed to stderr, never to the data file.
    pub summary: Option<String>,
}

/// Largest accepted engine-vs-closed-form deviation for `compare`.
pub fn threshold(observable: Observable) -> f64 {
    match observable {
        Observable::X => 1e-4,
        Observable::XPplusPX | Observable::Harmonic => 1e-3,
        Observable::P | Observable::XplusP => 5e-3,
    }
}

fn selected<'r>(registry: &'r EngineRegistry, cfg: &RunConfig) -> Result<Vec<&'r dyn CfEngine>, CliError> {
    let o = cfg.observable;
    match cfg.engine {
        EngineChoice::All => Ok(registry.iter().filter(|e| e.supports(o)).collect()),
        EngineChoice::One(tag) => {
            let engine = registry
                .get(tag.token())
                .ok_or_else(|| CliError::Config(format!("engine '{tag}' is not registered")))?;
            if !engine.supports(o) {
                return Err(CliError::Config(format!(
                    "engine '{tag}' does not support observable '{o}' (engines for it: {})",
                    registry
                        .iter()
                        .filter(|e| e.supports(o))
                        .map(|e| e.name())
                        .collect::<Vec<_>>()
                        .join(", ")
                )));
            }
            Ok(vec![engine])
        }
    }
}

pub fn cmd_cf(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let registry = EngineRegistry::standard(cfg.jump.clone());
    let engines = selected(&registry, cfg)?;
    let ts = cfg.t_range.points();
    let runs: Vec<Vec<CfSample>> = engines
        .iter()
        .map(|e| e.evaluate(cfg.observable, &ts))
        .collect::<Result<_, _>>()?;

    let all = cfg.engine == EngineChoice::All;
    let mut columns = vec!["t", "engine", "re", "im", "error_estimate", "converged"];
    if all {
        columns.push("deviation");
    }
    let mut table = Table::new(cfg.echo(), columns);
    let mut unconverged = 0;
    for (k, &t) in ts.iter().enumerate() {
        let reference = cf_closed(cfg.observable, t);
        for run in &runs {
            let s = &run[k];
            unconverged += usize::from(!s.converged);
            let mut row: Vec<Cell> = vec![
                t.into(),
                s.engine.token().into(),
                s.value.re.into(),
                s.value.im.into(),
                s.error_estimate.into(),
                s.converged.into(),
            ];
            if all {
                row.push((s.value - reference).norm().into());
            }
            table.push(row);
        }
    }
    Ok(Outcome {
        table,
        code: if unconverged > 0 { EXIT_NON_CONVERGENCE } else { EXIT_OK },
        summary: (unconverged > 0).then(|| format!("{unconverged} samples did not converge")),
    })
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.engine == EngineChoice::One(EngineTag::ClosedForm) {
        return Err(CliError::Config("compare needs an engine other than closed".into()));
    }
    let registry = EngineRegistry::standard(cfg.jump.clone());
    let engines: Vec<&dyn CfEngine> = selected(&registry, cfg)?
        .into_iter()
        .filter(|e| e.tag() != EngineTag::ClosedForm)
        .collect();
    let ts = cfg.t_range.points();
    let limit = threshold(cfg.observable);
    let mut table = Table::new(
        cfg.echo(),
        vec!["engine", "points", "max_deviation", "mean_deviation", "threshold", "unconverged", "pass"],
    );
    let (mut failed, mut unconverged) = (false, 0);
    let mut lines = Vec::new();
    for engine in engines {
        let samples = engine.evaluate(cfg.observable, &ts)?;
        let dev: Vec<f64> = samples
            .iter()
            .map(|s| (s.value - cf_closed(cfg.observable, s.t)).norm())
            .collect();
        let max = dev.iter().copied().fold(0.0, f64::max);
        let mean = dev.iter().sum::<f64>() / dev.len() as f64;
        let bad = samples.iter().filter(|s| !s.converged).count();
        let pass = max <= limit;
        failed |= !pass;
        unconverged += bad;
        lines.push(format!("{}: max {max:.3e}, mean {mean:.3e}, threshold {limit:e}", engine.name()));
        table.push(vec![
            engine.name().into(),
            ts.len().into(),
            max.into(),
            mean.into(),
            limit.into(),
            bad.into(),
            pass.into(),
        ]);
    }
    let code = if unconverged > 0 {
        EXIT_NON_CONVERGENCE
    } else if failed {
        EXIT_THRESHOLD
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        table,
        code,
        summary: Some(lines.join("\n")),
    })
}

fn report_row(r: &ApproxEigenReport) -> Vec<Cell> {
    vec![
        r.z.into(),
        r.parameter.into(),
        r.vector_norm.into(),
        r.residual_norm.into(),
        r.closed_form_residual.into(),
        r.discrepancy.into(),
    ]
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let z = cfg.z;
    let params = |default: &[f64]| {
        if cfg.params.is_empty() {
            default.to_vec()
        } else {
            cfg.params.clone()
        }
    };
    let table = match cfg.observable {
        Observable::X => {
            let ns = params(&[1.0, 2.0, 5.0, 100.0]);
            if ns.iter().any(|&n| !(n >= 1.0 && n.fract() == 0.0 && n <= u32::MAX as f64)) {
                return Err(CliError::Config(format!("witness indices must be positive integers: {ns:?}")));
            }
            let rows = ns
                .par_iter()
                .map(|&n| unbounded_witness_x(z, n as u32).map(|w| (n as u64, w)))
                .collect::<Result<Vec<_>, _>>()?;
            let mut t = Table::new(cfg.echo(), vec!["n", "z", "resolvent_image_norm_sq", "input_norm_sq"]);
            for (n, (big, small)) in rows {
                t.push(vec![n.into(), z.into(), big.into(), small.into()]);
            }
            t
        }
        Observable::P | Observable::XplusP | Observable::XPplusPX => {
            let (family, default): (fn(f64, f64) -> qcf_core::Result<ApproxEigenReport>, &[f64]) =
                match cfg.observable {
                    Observable::P => (approx_eigvec_p, &[1e-2, 1e-1, 1.0, 2.0]),
                    Observable::XplusP => (approx_eigvec_x_plus_p, &[1e-2, 1e-1, 1.0]),
                    _ => (approx_eigvec_xp_plus_px, &[0.25, 0.5, 1.0]),
                };
            let reports = params(default)
                .par_iter()
                .map(|&p| family(z, p))
                .collect::<Result<Vec<_>, _>>()?;
            let mut t = Table::new(
                cfg.echo(),
                vec!["z", "parameter", "vector_norm", "residual_norm", "closed_form_residual", "discrepancy"],
            );
            for r in &reports {
                t.push(report_row(r));
            }
            t
        }
        Observable::Harmonic => {
            if cfg.levels == 0 || cfg.levels > VACUUM_LEVELS {
                return Err(CliError::Config(format!("levels must lie in 1..={VACUUM_LEVELS}")));
            }
            let mut t = Table::new(
                cfg.echo(),
                vec!["index", "eigenvalue", "parity", "vacuum_weight", "weight_error"],
            );
            for w in vacuum_weights().iter().take(cfg.levels) {
                let parity = oscillator_eigenpair(w.index)?.parity;
                t.push(vec![
                    w.index.into(),
                    w.eigenvalue.into(),
                    match parity {
                        Parity::Even => "even",
                        Parity::Odd => "odd",
                    }
                    .into(),
                    w.weight.into(),
                    w.weight_error.into(),
                ]);
            }
            t
        }
    };
    Ok(Outcome {
        table,
        code: EXIT_OK,
        summary: None,
    })
}

fn law_echo(law: &LawTag) -> Vec<(String, String)> {
    let kv = |k: &str, v: f64| (k.to_string(), format!("{v}"));
    match *law {
        LawTag::Gaussian { variance } => vec![("law".into(), "gaussian".into()), kv("law-variance", variance)],
        LawTag::Ghs { alpha, rho } => vec![("law".into(), "ghs".into()), kv("law-alpha", alpha), kv("law-rho", rho)],
        LawTag::PointMass { location } => {
            vec![("law".into(), "point_mass".into()), kv("law-location", location)]
        }
    }
}

pub fn cmd_density(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let xs = cfg.x_range.points();
    let mut meta = cfg.echo();
    match density_for(cfg.observable, &xs)? {
        LawDensity::Table(d) => {
            if let Some(law) = &d.law_tag {
                meta.extend(law_echo(law));
            }
            let mut table = Table::new(meta, vec!["x", "density"]);
            for (&x, &p) in d.x_grid.iter().zip(&d.density) {
                table.push(vec![x.into(), p.into()]);
            }
            let summary = if xs.len() > 1 {
                format!(
                    "mass {:.6}, mean {:.3e}, variance {:.6}, error estimate {:.3e}",
                    d.mass(),
                    d.mean(),
                    d.variance(),
                    d.error_estimate
                )
            } else {
                format!("error estimate {:.3e}", d.error_estimate)
            };
            Ok(Outcome {
                table,
                code: EXIT_OK,
                summary: Some(summary),
            })
        }
        LawDensity::PointMass { location } => {
            let mut table = Table::new(meta, vec!["law", "location"]);
            table.push(vec!["point_mass".into(), location.into()]);
            Ok(Outcome {
                table,
                code: EXIT_OK,
                summary: Some(format!("point mass at {location}")),
            })
        }
    }
}
