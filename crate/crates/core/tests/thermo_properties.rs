use std::f64::consts::PI;

use defectlab_core::lax::transmission_amplitude;
use defectlab_core::quad::{integrate, integrate_real, QuadOptions};
use defectlab_core::thermo::*;
use defectlab_core::{AlgebraRank, Complex64, Sign};

fn table(n: usize) -> KernelTable {
    KernelTable::new(AlgebraRank::new(n).unwrap())
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Forward transform `∫dλ e^{iωλ} a_n(λ)` on `[−L, L]` plus the analytic
/// tail: the arctangent remainder at ω = 0, two integration-by-parts
/// terms otherwise.
fn forward_a_n(n: i32, omega: f64) -> f64 {
    let l = 400.0;
    let opts = QuadOptions {
        initial_pieces: ((omega.abs() * l / PI).ceil() as usize).max(16),
        max_intervals: 50_000,
        ..Default::default()
    };
    let body = integrate_real(|x| 2.0 * a_n_realspace(n, x) * (omega * x).cos(), 0.0, l, &opts).unwrap();
    let nf = n as f64;
    let tail = if omega == 0.0 {
        2.0 * (0.5 - (2.0 * l / nf).atan() / PI)
    } else {
        // ∫_L^∞ a cos(ωx) = −a(L) sin(ωL)/ω − a'(L) cos(ωL)/ω² + …
        let a = a_n_realspace(n, l);
        let da = -2.0 * l * nf / (2.0 * PI * (l * l + nf * nf / 4.0).powi(2));
        2.0 * (-a * (omega * l).sin() / omega - da * (omega * l).cos() / (omega * omega))
    };
    body + tail
}

#[test]
fn forward_transform_of_a_n_fixes_the_convention() {
    for n in [1, 2] {
        for k in -10..=10 {
            let w = 0.5 * k as f64;
            let got = forward_a_n(n, w);
            let want = (-(n as f64) * w.abs() / 2.0).exp();
            assert!((got - want).abs() < 1e-6, "n={n} ω={w}: {got} vs {want}");
        }
    }
}

#[test]
fn a_n_integrates_to_one() {
    for n in [1, 2, 3] {
        let opts = QuadOptions::default();
        // substitution x = (n/2) tan t maps ℝ to (−π/2, π/2)
        let v = integrate_real(
            |t| {
                let x = n as f64 / 2.0 * t.tan();
                a_n_realspace(n, x) * n as f64 / 2.0 / t.cos().powi(2)
            },
            -PI / 2.0 + 1e-12,
            PI / 2.0 - 1e-12,
            &opts,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-8, "n={n}: {v}");
    }
}

#[test]
fn rank_three_bulk_at_zero_agrees_across_schemes() {
    let t = table(3);
    let adaptive = bulk_density(&t, 1, 0.0).unwrap();
    // composite Simpson on [0, 80] of sinh(ω)/sinh(3ω/2), divided by π
    let steps = 80_000;
    let h = 80.0 / steps as f64;
    let f = |w: f64| if w == 0.0 { 2.0 / 3.0 } else { w.sinh() / (1.5 * w).sinh() };
    let mut s = f(0.0) + f(80.0);
    for i in 1..steps {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let simpson = s * h / 3.0 / PI;
    assert!((adaptive - simpson).abs() < 1e-9, "{adaptive} vs {simpson}");
}

#[test]
fn bulk_normalization_is_zero_mode() {
    for n in 2..=3 {
        let t = table(n);
        for k in 1..n {
            let v = bulk_normalization(&t, k).unwrap();
            let want = (n - k) as f64 / n as f64;
            assert!((v - want).abs() < 1e-7, "n={n} k={k}: {v}");
        }
    }
}

#[test]
fn momentum_range_and_parity() {
    for n in [2, 3] {
        let t = table(n);
        let (_, p_hi) = hole_dispersion(&t, 1, 30.0).unwrap();
        let (_, p_lo) = hole_dispersion(&t, 1, -30.0).unwrap();
        let want = 2.0 * PI * (n as f64 - 1.0) / n as f64;
        assert!((p_hi - p_lo - want).abs() < 1e-6, "n={n}: {}", p_hi - p_lo);
        for x in [0.2, 1.1, 2.7] {
            let (e1, p1) = hole_dispersion(&t, 1, x).unwrap();
            let (e2, p2) = hole_dispersion(&t, 1, -x).unwrap();
            assert!((e1 - e2).abs() < 1e-10);
            assert!((p1 + p2).abs() < 1e-10);
        }
    }
}

#[test]
fn energy_is_derivative_of_momentum() {
    let t = table(3);
    let h = 1e-4;
    for x in [-0.8, 0.4] {
        let (eps, _) = hole_dispersion(&t, 1, x).unwrap();
        let (_, pp) = hole_dispersion(&t, 1, x + h).unwrap();
        let (_, pm) = hole_dispersion(&t, 1, x - h).unwrap();
        assert!(((pp - pm) / (2.0 * h) / (2.0 * PI) - eps).abs() < 1e-7);
    }
}

#[test]
fn log_derivative_is_derivative_of_regularized_log() {
    for (n, sign) in [(2, Sign::Minus), (3, Sign::Plus), (4, Sign::Minus)] {
        let t = table(n);
        for x in [-1.5, 0.3, 2.0] {
            let h = 1e-4;
            let fp = amplitude_regularized(&t, sign, re(x + h)).unwrap();
            let fm = amplitude_regularized(&t, sign, re(x - h)).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            let d = amplitude_log_derivative(&t, sign, re(x)).unwrap();
            assert!((fd - d).norm() < 1e-6, "n={n} x={x}: {fd} vs {d}");
        }
    }
}

#[test]
fn log_derivative_decays_like_jump_over_lambda() {
    // the one-sided kernel jumps by c₀ at ω = 0, so |d log T| ~ c₀/λ
    for n in [2, 3] {
        let t = table(n);
        for sign in [Sign::Plus, Sign::Minus] {
            let c0 = t.zero_limit(Kernel::Transmission(sign, 1));
            let d50 = amplitude_log_derivative(&t, sign, re(50.0)).unwrap();
            let d200 = amplitude_log_derivative(&t, sign, re(200.0)).unwrap();
            assert!((d50.norm() * 50.0 / c0 - 1.0).abs() < 1e-2, "{n} {sign:?}: {d50}");
            assert!((d200.norm() * 200.0 / c0 - 1.0).abs() < 1e-3);
            let oracle = amplitude_closed_form_log_derivative(t.rank, sign, re(50.0)).unwrap();
            assert!((d50 - oracle).norm() < 1e-9);
        }
    }
}

#[test]
fn rank_four_minus_amplitude_off_zero() {
    let t = table(4);
    let z = re(1.3);
    let got = amplitude_regularized(&t, Sign::Minus, z).unwrap().exp();
    let want = transmission_amplitude(t.rank, Sign::Minus, z).unwrap();
    assert!((got - want).norm() <= 1e-6 * want.norm());
}

#[test]
fn amplitudes_in_the_complex_strip() {
    let t = table(3);
    for z in [Complex64::new(0.4, 0.3), Complex64::new(-1.0, -0.2)] {
        for sign in [Sign::Plus, Sign::Minus] {
            let got = amplitude_regularized(&t, sign, z).unwrap().exp();
            let want = transmission_amplitude(t.rank, sign, z).unwrap();
            assert!((got - want).norm() <= 1e-7 * want.norm(), "{z} {sign:?}");
        }
    }
}

#[test]
fn amplitude_product_matches_gamma_ratio() {
    // closed form against closed form: T⁺(0)T⁻(0) at each rank
    for n in 2..=4 {
        let r = AlgebraRank::new(n).unwrap();
        let prod = transmission_amplitude(r, Sign::Plus, re(0.0)).unwrap()
            * transmission_amplitude(r, Sign::Minus, re(0.0)).unwrap();
        let nf = n as f64;
        let g = |x: f64| statrs::function::gamma::gamma(x);
        let want = g(0.5 / nf) / g(1.0 - 0.5 / nf) * g(0.5 / nf + 0.5) / g(0.5 - 0.5 / nf);
        assert!((prod - want).norm() < 1e-12 * want);
        if n == 2 {
            assert!((prod - 1.0).norm() < 1e-14);
        }
    }
}

#[test]
fn gamma_identity_at_large_mu() {
    let [d, r] = check_gamma_identity(re(20.0)).unwrap();
    assert!(d.passed && r.passed);
    let [d, r] = check_gamma_identity(Complex64::new(1.5, 2.0)).unwrap();
    assert!(d.passed && r.passed, "{d:?} {r:?}");
}

#[test]
fn gamma_identity_regularized_value_at_two() {
    let [_, r] = check_gamma_identity(re(2.0)).unwrap();
    let want = (statrs::function::gamma::gamma(0.75) / statrs::function::gamma::gamma(1.25)).ln();
    match r.param("integral") {
        Some(defectlab_core::ParamValue::Complex([x, _])) => assert!((x - want).abs() < 1e-8),
        other => panic!("{other:?}"),
    }
}

#[test]
fn gamma_identity_derivative_sign() {
    // the derivative of ln Γ((μ+1)/4)/Γ((μ+3)/4) is (1/4)[ψ((μ+1)/4) − ψ((μ+3)/4)]
    let mu: f64 = 1.0;
    let h = 1e-5;
    let lr = |m: f64| statrs::function::gamma::ln_gamma((m + 1.0) / 4.0) - statrs::function::gamma::ln_gamma((m + 3.0) / 4.0);
    let fd = (lr(mu + h) - lr(mu - h)) / (2.0 * h);
    let psi = statrs::function::gamma::digamma;
    assert!((fd - 0.25 * (psi(0.5) - psi(1.0))).abs() < 1e-9);
    let direct = integrate(
        |x| re(-0.25 * (-mu * x / 2.0).exp() / (x / 2.0).cosh()),
        0.0,
        80.0,
        &QuadOptions::default(),
    )
    .unwrap()
    .value
    .re;
    assert!((direct - fd).abs() < 1e-9);
}

#[test]
fn density_components_sum_and_sign_dependence() {
    let t = table(2);
    let grid = [-1.0, 0.0, 0.5];
    let plus = density(&t, 1, Sign::Plus, &grid, 0.0, 0.0, 100).unwrap();
    let minus = density(&t, 1, Sign::Minus, &grid, 0.0, 0.0, 100).unwrap();
    for i in 0..grid.len() {
        let sum = plus.bulk[i] + (plus.backflow[i] + plus.transmission[i]) / 100.0;
        assert!((plus.total[i] - sum).norm() < 1e-15);
        assert_eq!(plus.bulk[i], minus.bulk[i]);
        assert_eq!(plus.backflow[i], minus.backflow[i]);
    }
    assert!((plus.bulk[1] - 0.5).abs() < 1e-10);
}

#[test]
fn rank_two_transmission_densities_match_closed_forms() {
    // 2πi r_t(λ) = d/dλ log T(λ), with the right side from digamma
    let t = table(2);
    for sign in [Sign::Plus, Sign::Minus] {
        for x in [-0.7, 0.0, 1.2] {
            let rt = inverse_fourier(&t, Kernel::Transmission(sign, 1), x).unwrap();
            let d = amplitude_closed_form_log_derivative(t.rank, sign, re(x)).unwrap();
            let want = d / (2.0 * PI * Complex64::new(0.0, 1.0));
            assert!((rt - want).norm() < 1e-9, "{sign:?} {x}: {rt} vs {want}");
        }
    }
}

#[test]
fn quantization_both_signs() {
    for n in [2, 3] {
        for sign in [Sign::Plus, Sign::Minus] {
            let r = check_quantization(&table(n), sign, -2.0, 1.0).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}
