//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances and time limits are fixed here, not configurable.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use defectlab_core::bethe::{bae_residual, counting_derivative, sea_state, solve_bae};
use defectlab_core::check::{
    calibrate_ordering, check_crossing, check_rll, check_transfer_commute, check_transmission_algebra,
    check_transmission_crossing, check_ybe, TransmissionKind,
};
use defectlab_core::thermo::{amplitude_point, bulk_density, bulk_normalization, check_gamma_identity, PointStatus};
use defectlab_core::{
    AlgebraRank, BetheState, BetheVariant, ChainSpec, CheckReport, Complex64, Error, FockSpace, KernelTable, LaxSpec,
    LaxVariant, NumberOrdering, ParamValue, Sign, SolveOptions, SpectralSampler, TransmissionOptions,
};

type Outcome = Result<String, String>;

fn rank(n: usize) -> AlgebraRank {
    AlgebraRank::new(n).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn param(r: &CheckReport, name: &str) -> f64 {
    match r.param(name) {
        Some(ParamValue::Real(x)) => *x,
        other => panic!("{name}: {other:?}"),
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    match limit {
        Some(l) if took > l => Err(format!("{out}; took {took:.2?} > {l:?}")),
        _ => Ok(format!("{out}; {took:.2?}")),
    }
}

fn yang_baxter() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        let mut s = SpectralSampler::new(2024);
        for _ in 0..20 {
            worst = worst.max(check_ybe(rank(n), s.draw(), s.draw()).residual);
        }
    }
    ensure(worst <= 1e-12, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:.2e}"))
}

fn rll() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2, 3] {
        let fock = FockSpace::new(n - 1, 5).map_err(|e| e.to_string())?;
        let cal = calibrate_ordering(rank(n), &fock, 7, 3).map_err(|e| e.to_string())?;
        let class_ok = cal.selected.ordering == NumberOrdering::Normal
            && cal.selected.shift == 1.0
            && cal.selected_class.contains(&(NumberOrdering::Normal, 1.0));
        ensure(class_ok, || format!("rank {n}: calibration picked {:?}", cal.selected))?;
        let mut s = SpectralSampler::new(7);
        for variant in [LaxVariant::DefectL, LaxVariant::DefectLhat] {
            let spec = LaxSpec::new(rank(n), variant).with_ordering(cal.selected.ordering, cal.selected.shift);
            for _ in 0..5 {
                let r = check_rll(&spec, &fock, s.draw(), s.draw()).map_err(|e| e.to_string())?;
                worst = worst.max(r.residual);
            }
        }
    }
    ensure(worst <= 1e-10, || format!("max residual {worst:e}"))?;
    Ok(format!("calibrated (normal, 1); max residual {worst:.2e}"))
}

fn crossing() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        let fock = FockSpace::new(n - 1, 4).map_err(|e| e.to_string())?;
        let mut s = SpectralSampler::new(3);
        for _ in 0..10 {
            worst = worst.max(check_crossing(rank(n), &fock, s.draw()).map_err(|e| e.to_string())?.residual);
        }
    }
    ensure(worst <= 1e-13, || format!("max entrywise deviation {worst:e}"))?;
    Ok(format!("max entrywise deviation {worst:.2e}"))
}

fn transmission_algebra() -> Outcome {
    let opts = TransmissionOptions::default();
    let (mut worst, mut drift): (f64, f64) = (0.0, 0.0);
    for n in [2, 3] {
        let fock = FockSpace::new(n - 1, 5).map_err(|e| e.to_string())?;
        let mut s = SpectralSampler::new(11);
        for kind in [TransmissionKind::Direct, TransmissionKind::Conjugate] {
            let mut done = 0;
            while done < 5 {
                match check_transmission_algebra(rank(n), &fock, s.draw(), s.draw(), kind, &opts, 100 + done) {
                    Ok(r) => {
                        worst = worst.max(r.residual);
                        drift = drift.max((param(&r, "rescaled_relative_residual") - param(&r, "relative_residual")).abs());
                        done += 1;
                    }
                    Err(Error::Pole { .. }) => continue,
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
    }
    ensure(worst <= 1e-10, || format!("max residual {worst:e}"))?;
    ensure(drift <= 1e-12, || format!("relative residual moved by {drift:e} under rescaling"))?;
    Ok(format!("max residual {worst:.2e}; rescaling drift {drift:.2e}"))
}

fn transmission_crossing() -> Outcome {
    let grid: Vec<f64> = (0..20).map(|i| -3.0 + 6.0 * i as f64 / 19.0).collect();
    let mut worst: f64 = 0.0;
    for n in [2, 3] {
        let fock = FockSpace::new(n - 1, 5).map_err(|e| e.to_string())?;
        let r = check_transmission_crossing(rank(n), &fock, &grid, &TransmissionOptions::default())
            .map_err(|e| e.to_string())?;
        worst = worst.max(r.residual);
    }
    ensure(worst <= 1e-8, || format!("relative spread {worst:e}"))?;
    Ok(format!("relative spread of the constant {worst:.2e}"))
}

fn amplitudes() -> Outcome {
    let (mut amp, mut deriv): (f64, f64) = (0.0, 0.0);
    let mut count = 0;
    for n in 2..=4 {
        let table = KernelTable::new(rank(n));
        for sign in [Sign::Plus, Sign::Minus] {
            for i in 0..=100 {
                let x = -5.0 + 0.1 * i as f64;
                let p = amplitude_point(&table, sign, c(x, 0.0)).map_err(|e| e.to_string())?;
                ensure(p.status == PointStatus::Computed, || format!("rank {n} {sign:?} λ={x}: {:?}", p.status))?;
                amp = amp.max(p.amplitude_residual.unwrap());
                deriv = deriv.max(p.logderiv_residual.unwrap());
                count += 1;
            }
        }
    }
    ensure(amp <= 1e-6, || format!("amplitude residual {amp:e}"))?;
    ensure(deriv <= 1e-6, || format!("log-derivative residual {deriv:e}"))?;
    Ok(format!("{count} points; amplitude {amp:.2e}, log-derivative {deriv:.2e}"))
}

fn gamma_identity() -> Outcome {
    let (mut d, mut r): (f64, f64) = (0.0, 0.0);
    for mu in [0.5, 1.0, 2.0, 5.0, 20.0] {
        let [a, b] = check_gamma_identity(c(mu, 0.0)).map_err(|e| e.to_string())?;
        d = d.max(a.residual);
        r = r.max(b.residual);
    }
    ensure(d <= 1e-9, || format!("derivative form {d:e}"))?;
    ensure(r <= 1e-8, || format!("regularized form {r:e}"))?;
    Ok(format!("derivative {d:.2e}, regularized {r:.2e}"))
}

fn densities() -> Outcome {
    let table = KernelTable::new(rank(2));
    let mut bulk: f64 = 0.0;
    for i in 0..=100 {
        let x = -5.0 + 0.1 * i as f64;
        let exact = 1.0 / (2.0 * (PI * x).cosh());
        bulk = bulk.max((bulk_density(&table, 1, x).map_err(|e| e.to_string())? - exact).abs());
    }
    ensure(bulk <= 1e-8, || format!("rank-2 bulk deviation {bulk:e}"))?;
    let mut norm: f64 = 0.0;
    for n in 2..=4 {
        let table = KernelTable::new(rank(n));
        for k in 1..n {
            let v = bulk_normalization(&table, k).map_err(|e| e.to_string())?;
            norm = norm.max((v - (n - k) as f64 / n as f64).abs());
        }
    }
    ensure(norm <= 1e-6, || format!("normalization deviation {norm:e}"))?;
    Ok(format!("bulk {bulk:.2e}, normalization {norm:.2e}"))
}

fn bethe() -> Outcome {
    // one site, rank 2: λ² + (i−1)λ + (i/2 − 1/4) = 0
    let b = c(-1.0, 1.0);
    let disc = (b * b - 4.0 * c(-0.25, 0.5)).sqrt();
    let oracle = [(-b + disc) / 2.0, (-b - disc) / 2.0];
    let mut one: f64 = 0.0;
    for seed in [c(0.3, -0.4), c(-0.5, 0.2), c(1.0, -1.0)] {
        let s = BetheState::new(rank(2), 1, c(0.0, 0.0), BetheVariant::LDefect, vec![vec![seed]]).map_err(|e| e.to_string())?;
        let z = solve_bae(&s, &SolveOptions::default()).map_err(|e| e.to_string())?.state.roots[0][0];
        one = one.max(oracle.iter().map(|r| (r - z).norm()).fold(f64::INFINITY, f64::min));
    }
    ensure(one <= 1e-10, || format!("one-magnon root off the quadratic by {one:e}"))?;

    let s = BetheState::new(rank(2), 4, c(0.0, 0.0), BetheVariant::LDefect, vec![vec![c(0.5, 0.0), c(-0.5, 0.0)]])
        .map_err(|e| e.to_string())?;
    let out = solve_bae(&s, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let recheck = bae_residual(&out.state).map_err(|e| e.to_string())?.max_abs;
    ensure(recheck <= 1e-10, || format!("4-site residual {recheck:e}"))?;

    let sites = 200;
    let sea = sea_state(rank(2), sites, sites / 2, c(0.0, 0.0), BetheVariant::LDefect, &SolveOptions::default())
        .map_err(|e| e.to_string())?;
    let mut dev: f64 = 0.0;
    for i in 0..=40 {
        let x = -2.0 + 0.1 * i as f64;
        let d = counting_derivative(&sea.state, 1, x).map_err(|e| e.to_string())? / sites as f64;
        dev = dev.max((d - 1.0 / (2.0 * (PI * x).cosh())).abs());
    }
    ensure(dev <= 2e-3, || format!("counting derivative off the bulk density by {dev:e}"))?;
    Ok(format!("one-magnon {one:.2e}; 4-site {recheck:.2e}; 200-site density {dev:.2e}"))
}

fn transfer_commute() -> Outcome {
    let fock = FockSpace::new(1, 3).map_err(|e| e.to_string())?;
    let chain = ChainSpec::new(rank(2), 2, 2, fock, c(0.0, 0.0)).map_err(|e| e.to_string())?;
    let mut s = SpectralSampler::new(5);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        worst = worst.max(check_transfer_commute(&chain, s.draw(), s.draw()).map_err(|e| e.to_string())?.residual);
    }
    ensure(worst <= 1e-10, || format!("max commutator {worst:e}"))?;
    Ok(format!("max commutator {worst:.2e}"))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_defectlab"))
            .args(["check", "all", "--seed", "7"])
            .env_remove("DEFECTLAB_SEED")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success() && b.status.success(), || {
        format!("check all failed: {}", String::from_utf8_lossy(&a.stderr))
    })?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "reports differ".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("yang-baxter", secs(5), yang_baxter),
        ("rll-calibrated", secs(30), rll),
        ("crossing", None, crossing),
        ("transmission-algebra", None, transmission_algebra),
        ("transmission-crossing", None, transmission_crossing),
        ("amplitudes", secs(60), amplitudes),
        ("gamma-identity", None, gamma_identity),
        ("densities", None, densities),
        ("bethe", None, bethe),
        ("transfer-commute", None, transfer_commute),
        ("determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        match timed(limit, f) {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
