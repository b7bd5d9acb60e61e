use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use defectlab_core::bethe::{bae_residual, solve_bae};
use defectlab_core::thermo::{amplitude_point, density, AmplitudePoint, PointStatus};
use defectlab_core::{AlgebraRank, BetheState, CheckReport, Complex64, Error, KernelTable, Sign, SolveOptions};

use crate::config::{Format, RunConfig};
use crate::output::{self, echo_config, num, real, SCHEMA};
use crate::Failure;

pub const AMPLITUDE_TOL: f64 = 1e-6;
pub const BAE_TOL: f64 = 1e-10;

#[derive(Serialize)]
struct CheckDocument<'a> {
    schema: u32,
    command: &'static str,
    suite: &'a str,
    config: RunConfig,
    passed: bool,
    reports: &'a [CheckReport],
}

pub fn check(suite: &str, cfg: &RunConfig) -> Result<bool, Failure> {
    let reports = crate::suites::run(suite, cfg)?;
    let passed = reports.iter().all(|r| r.passed);
    let bytes = match cfg.output.format.unwrap_or(Format::Json) {
        Format::Json => output::json(&CheckDocument {
            schema: SCHEMA,
            command: "check",
            suite,
            config: echo_config(cfg),
            passed,
            reports: &reports,
        }),
        Format::Csv => output::csv(
            &["name", "residual", "tolerance", "passed", "block", "parameters"],
            reports.iter().map(|r| {
                vec![
                    r.name.clone(),
                    real(r.residual),
                    real(r.tolerance),
                    r.passed.to_string(),
                    r.block.clone(),
                    serde_json::to_string(&r.parameters).expect("parameters serialize"),
                ]
            }),
        ),
    };
    output::emit(cfg, &bytes)?;
    for r in reports.iter().filter(|r| !r.passed) {
        eprintln!("FAILED {} residual {:e} > {:e}", r.name, r.residual, r.tolerance);
    }
    Ok(passed)
}

#[derive(Serialize)]
struct AmplitudeDocument<'a> {
    schema: u32,
    command: &'static str,
    config: RunConfig,
    tolerance: f64,
    max_residual: Option<f64>,
    passed: bool,
    points: &'a [AmplitudePoint],
}

pub fn amplitudes(signs: &[Sign], cfg: &RunConfig) -> Result<bool, Failure> {
    let table = KernelTable::new(AlgebraRank::new(cfg.rank)?);
    let tol = cfg.tolerance("amplitudes").unwrap_or(AMPLITUDE_TOL);
    let jobs: Vec<(Sign, f64)> = signs
        .iter()
        .flat_map(|&s| cfg.lambda_grid.points().into_iter().map(move |x| (s, x)))
        .collect();
    let points: Vec<AmplitudePoint> = jobs
        .par_iter()
        .map(|&(s, x)| amplitude_point(&table, s, Complex64::new(x, cfg.lambda_imag)))
        .collect::<Result<_, Error>>()?;
    let max_residual = points.iter().filter_map(AmplitudePoint::residual).reduce(f64::max);
    let passed = max_residual.is_none_or(|r| r <= tol);
    let bytes = match cfg.output.format.unwrap_or(Format::Csv) {
        Format::Csv => output::csv(
            &[
                "lambda",
                "closed_form_re",
                "closed_form_im",
                "integral_re",
                "integral_im",
                "logderiv_residual",
                "amplitude_residual",
                "sign",
                "lambda_imag",
                "status",
            ],
            points.iter().map(|p| {
                vec![
                    real(p.lambda.re),
                    num(p.closed_form.map(|z| z.re)),
                    num(p.closed_form.map(|z| z.im)),
                    num(p.integral.map(|z| z.re)),
                    num(p.integral.map(|z| z.im)),
                    num(p.logderiv_residual),
                    num(p.amplitude_residual),
                    sign_name(p.sign).to_string(),
                    real(p.lambda.im),
                    status_name(p.status).to_string(),
                ]
            }),
        ),
        Format::Json => output::json(&AmplitudeDocument {
            schema: SCHEMA,
            command: "amplitudes",
            config: echo_config(cfg),
            tolerance: tol,
            max_residual,
            passed,
            points: &points,
        }),
    };
    output::emit(cfg, &bytes)?;
    for p in points.iter().filter(|p| p.status != PointStatus::Computed) {
        eprintln!("flagged {} at lambda {} ({})", sign_name(p.sign), p.lambda, status_name(p.status));
    }
    if !passed {
        eprintln!("max residual {:e} above tolerance {:e}", max_residual.unwrap_or(f64::NAN), tol);
    }
    Ok(passed)
}

fn sign_name(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "plus",
        Sign::Minus => "minus",
    }
}

fn status_name(s: PointStatus) -> &'static str {
    match s {
        PointStatus::Computed => "ok",
        PointStatus::Pole => "pole",
        PointStatus::OutsideStrip => "outside-strip",
    }
}

#[derive(Serialize)]
struct BaeDocument {
    schema: u32,
    command: &'static str,
    config: RunConfig,
    converged: bool,
    residual: Option<f64>,
    tolerance: f64,
    iterations: Option<usize>,
    trace: Vec<f64>,
    error: Option<String>,
    state: Option<BetheState>,
}

pub fn bae(input: &Path, cfg: &RunConfig) -> Result<bool, Failure> {
    if cfg.output.format == Some(Format::Csv) {
        return Err(Failure::Config("bae writes JSON only".into()));
    }
    let text = std::fs::read_to_string(input).map_err(|e| Failure::Config(format!("{}: {e}", input.display())))?;
    let state: BetheState =
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", input.display())))?;
    // structural problems are input errors; near-coincident roots are left
    // for the solver's guard, which reports them as a run failure
    let mut state = state;
    state.roots.resize(state.levels(), Vec::new());
    state
        .validate(0.0)
        .map_err(|e| Failure::Config(format!("{}: {e}", input.display())))?;
    let tol = cfg.tolerance("bae").unwrap_or(BAE_TOL);
    let opts = SolveOptions {
        tol,
        ..SolveOptions::default()
    };
    let mut doc = BaeDocument {
        schema: SCHEMA,
        command: "bae",
        config: echo_config(cfg),
        converged: false,
        residual: None,
        tolerance: tol,
        iterations: None,
        trace: Vec::new(),
        error: None,
        state: None,
    };
    let outcome = solve_bae(&state, &opts);
    let converged = match outcome {
        Ok(out) => {
            // independent re-evaluation of what gets written
            let check = bae_residual(&out.state)?;
            doc.converged = check.max_abs <= tol;
            doc.residual = Some(check.max_abs);
            doc.iterations = Some(out.iterations);
            doc.trace = out.trace;
            doc.state = Some(out.state);
            doc.converged
        }
        Err(e @ (Error::NonConvergence { .. } | Error::CoalescedRoots { .. } | Error::Singular { .. } | Error::Pole { .. })) => {
            if let Error::NonConvergence {
                iterations,
                residual,
                ref trace,
            } = e
            {
                doc.iterations = Some(iterations);
                doc.residual = Some(residual);
                doc.trace = trace.clone();
                eprintln!("iteration trace: {trace:?}");
            }
            eprintln!("{e}");
            doc.error = Some(e.to_string());
            false
        }
        Err(e) => return Err(e.into()),
    };
    output::emit(cfg, &output::json(&doc))?;
    Ok(converged)
}

#[derive(Serialize)]
struct DensityDocument {
    schema: u32,
    command: &'static str,
    config: RunConfig,
    profile: defectlab_core::DensityProfile,
}

pub fn density_cmd(level: usize, sign: Sign, hole: f64, cfg: &RunConfig) -> Result<bool, Failure> {
    let table = KernelTable::new(AlgebraRank::new(cfg.rank)?);
    let grid = cfg.lambda_grid.points();
    let profile = match density(&table, level, sign, &grid, hole, cfg.theta[0], cfg.chain_sites) {
        Ok(p) => p,
        Err(e @ (Error::TailBound { .. } | Error::Quadrature { .. })) => {
            eprintln!("{e}");
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    let bytes = match cfg.output.format.unwrap_or(Format::Csv) {
        Format::Csv => output::csv(
            &["lambda", "bulk", "backflow", "transmission_re", "transmission_im", "total_re", "total_im"],
            (0..grid.len()).map(|i| {
                vec![
                    real(profile.lambda[i]),
                    real(profile.bulk[i]),
                    real(profile.backflow[i]),
                    real(profile.transmission[i].re),
                    real(profile.transmission[i].im),
                    real(profile.total[i].re),
                    real(profile.total[i].im),
                ]
            }),
        ),
        Format::Json => output::json(&DensityDocument {
            schema: SCHEMA,
            command: "density",
            config: echo_config(cfg),
            profile,
        }),
    };
    output::emit(cfg, &bytes)?;
    Ok(true)
}
