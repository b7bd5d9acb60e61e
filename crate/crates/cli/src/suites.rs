//! Named check suites run by `defectlab check`.

use rayon::prelude::*;

use defectlab_core::check::{
    calibrate_ordering, check_crossing, check_highest_weight, check_oscillator_algebra, check_rll,
    check_transfer_commute, check_transmission_algebra, check_transmission_crossing, check_ybe, TransmissionKind,
    CALIBRATION_TOL,
};
use defectlab_core::thermo::check_gamma_identity;
use defectlab_core::{
    AlgebraRank, ChainSpec, CheckReport, Complex64, Error, FockSpace, LaxSpec, LaxVariant, NumberOrdering, Result,
    SpectralSampler, TransmissionOptions,
};

use crate::config::RunConfig;

pub const SUITES: &[&str] = &[
    "ybe",
    "rll",
    "oscillator",
    "crossing",
    "transmission-algebra",
    "transmission-crossing",
    "transfer-commute",
    "highest-weight",
    "gamma-identity",
];

const YBE_PAIRS: usize = 20;
const RLL_PAIRS: usize = 5;
const CROSSING_POINTS: usize = 10;
const TRANSMISSION_PAIRS: usize = 5;
const CROSSING_GRID: usize = 20;
const COMMUTE_PAIRS: usize = 10;
const HIGHEST_WEIGHT_POINTS: usize = 3;
const GAMMA_MU: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 20.0];
const CALIBRATION_PAIRS: usize = 3;

struct Setup {
    rank: AlgebraRank,
    fock: FockSpace,
    theta: Complex64,
    seed: u64,
}

impl Setup {
    fn new(cfg: &RunConfig) -> Result<Setup> {
        let rank = AlgebraRank::new(cfg.rank)?;
        Ok(Setup {
            rank,
            fock: FockSpace::new(rank.species(), cfg.fock_cutoff)?,
            theta: Complex64::new(cfg.theta[0], cfg.theta[1]),
            seed: cfg.seed(),
        })
    }

    fn sampler(&self) -> SpectralSampler {
        SpectralSampler::new(self.seed)
    }

    fn chain(&self, cfg: &RunConfig) -> Result<ChainSpec> {
        let sites = cfg.chain_sites;
        ChainSpec::new(self.rank, sites, sites / 2 + 1, self.fock.clone(), self.theta)
    }
}

/// Draws spectral points until `run` succeeds off every pole.
fn off_poles<T>(sampler: &mut SpectralSampler, mut run: impl FnMut(&mut SpectralSampler) -> Result<T>) -> Result<T> {
    for _ in 0..1000 {
        match run(sampler) {
            Err(Error::Pole { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::InvalidArgument("could not sample a point away from the poles".into()))
}

fn ybe(s: &Setup) -> Result<Vec<CheckReport>> {
    let mut sampler = s.sampler();
    Ok((0..YBE_PAIRS).map(|_| check_ybe(s.rank, sampler.draw(), sampler.draw())).collect())
}

fn rll(s: &Setup, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let (ordering, shift) = if cfg.ordering.is_some() || cfg.shift.is_some() {
        (cfg.ordering.unwrap_or(NumberOrdering::Normal), cfg.shift.unwrap_or(1.0))
    } else {
        let cal = calibrate_ordering(s.rank, &s.fock, s.seed, CALIBRATION_PAIRS)?;
        let chosen = cal
            .candidates
            .iter()
            .find(|c| c.ordering == cal.selected.ordering && c.shift == cal.selected.shift)
            .expect("selected candidate is listed");
        let class: Vec<String> = cal.selected_class.iter().map(|(o, c)| format!("{}:{}", o.name(), c)).collect();
        out.push(
            CheckReport::new("rll-calibration", chosen.worst_residual, CALIBRATION_TOL, "total occupation <= D-1")
                .with_param("rank", s.rank.get())
                .with_param("cutoff", s.fock.cutoff())
                .with_param("candidates", cal.candidates.len())
                .with_param("passing", cal.candidates.iter().filter(|c| c.passed).count())
                .with_param("selected_ordering", cal.selected.ordering.name())
                .with_param("selected_shift", cal.selected.shift)
                .with_param("selected_class", class.join(" ")),
        );
        (cal.selected.ordering, cal.selected.shift)
    };
    let mut sampler = s.sampler();
    for variant in [LaxVariant::DefectL, LaxVariant::DefectLhat] {
        let spec = LaxSpec::new(s.rank, variant)
            .with_ordering(ordering, shift)
            .with_rapidity(s.theta);
        for _ in 0..RLL_PAIRS {
            out.push(check_rll(&spec, &s.fock, sampler.draw(), sampler.draw())?);
        }
    }
    Ok(out)
}

fn crossing(s: &Setup) -> Result<Vec<CheckReport>> {
    let mut sampler = s.sampler();
    (0..CROSSING_POINTS).map(|_| check_crossing(s.rank, &s.fock, sampler.draw())).collect()
}

fn transmission_algebra(s: &Setup) -> Result<Vec<CheckReport>> {
    let mut sampler = s.sampler();
    let opts = TransmissionOptions::default();
    let mut out = Vec::new();
    for kind in [TransmissionKind::Direct, TransmissionKind::Conjugate] {
        for i in 0..TRANSMISSION_PAIRS {
            out.push(off_poles(&mut sampler, |sm| {
                let (a, b) = (sm.draw(), sm.draw());
                check_transmission_algebra(s.rank, &s.fock, a, b, kind, &opts, s.seed.wrapping_add(i as u64))
            })?);
        }
    }
    Ok(out)
}

fn transmission_crossing(s: &Setup, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let g = &cfg.lambda_grid;
    let step = (g.max - g.min) / (CROSSING_GRID - 1) as f64;
    let grid: Vec<f64> = (0..CROSSING_GRID).map(|i| g.min + step * i as f64).collect();
    Ok(vec![check_transmission_crossing(s.rank, &s.fock, &grid, &TransmissionOptions::default())?])
}

fn transfer_commute(s: &Setup, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let chain = s.chain(cfg)?;
    let mut sampler = s.sampler();
    (0..COMMUTE_PAIRS)
        .map(|_| check_transfer_commute(&chain, sampler.draw(), sampler.draw()))
        .collect()
}

fn highest_weight(s: &Setup, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let chain = s.chain(cfg)?;
    let mut sampler = s.sampler();
    (0..HIGHEST_WEIGHT_POINTS).map(|_| check_highest_weight(&chain, sampler.draw())).collect()
}

fn gamma_identity() -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for mu in GAMMA_MU {
        out.extend(check_gamma_identity(Complex64::new(mu, 0.0))?);
    }
    Ok(out)
}

fn run_one(name: &str, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let s = Setup::new(cfg)?;
    match name {
        "ybe" => ybe(&s),
        "rll" => rll(&s, cfg),
        "oscillator" => Ok(vec![check_oscillator_algebra(&s.fock)?]),
        "crossing" => crossing(&s),
        "transmission-algebra" => transmission_algebra(&s),
        "transmission-crossing" => transmission_crossing(&s, cfg),
        "transfer-commute" => transfer_commute(&s, cfg),
        "highest-weight" => highest_weight(&s, cfg),
        "gamma-identity" => gamma_identity(),
        other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
    }
}

fn apply_tolerance(mut r: CheckReport, cfg: &RunConfig, suite: &str) -> CheckReport {
    if let Some(t) = cfg.tolerance(&r.name).or_else(|| cfg.tolerance(suite)) {
        r.tolerance = t;
        r.passed = r.residual <= t;
    }
    r
}

/// Runs `suite` (or every suite for `"all"`) concurrently; the result is
/// sorted by check name, then parameters.
pub fn run(suite: &str, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let results: Vec<Result<Vec<CheckReport>>> = names
        .par_iter()
        .map(|name| {
            run_one(name, cfg).map(|v| v.into_iter().map(|r| apply_tolerance(r, cfg, name)).collect())
        })
        .collect();
    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    reports.sort_by_cached_key(|r| r.sort_key());
    Ok(reports)
}
