use proptest::prelude::*;
use rydyn::estimation::*;
use rydyn::kinetics::DetectionGeometry;

fn truth(gamma: f64, gamma_s: f64) -> ScanTruth {
    ScanTruth {
        fixed: FixedParams::reference_28d(),
        gamma,
        gamma_s,
        dark_fraction: 0.0,
        geometry: DetectionGeometry::default(),
    }
}

/// Twelve probe rates spread over the saturation knee.
fn grid() -> Vec<f64> {
    (0..12).map(|i| 6e5 * (i as f64 / 11.0).powi(2)).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn noisy_gamma_errors(observable: Observable, relative: f64, seeds: u64) -> Vec<f64> {
    let t = truth(1.3e5, 265.0);
    (0..seeds)
        .map(|seed| {
            let d = synthesize_dataset(&t, observable, &grid(), NoiseModel::Gaussian { relative }, seed).unwrap();
            let f = fit_probe_scan(&d, FitMode::for_observable(observable), FitOptions::default()).unwrap();
            f.gamma() / t.gamma - 1.0
        })
        .collect()
}

#[test]
fn five_percent_noise_median_error() {
    for obs in [Observable::Loss, Observable::Counts] {
        let errs = noisy_gamma_errors(obs, 0.05, 100);
        let m = median(errs.iter().map(|e| e.abs()).collect());
        assert!(m <= 0.15, "{obs:?}: median |error| {m}");
    }
}

#[test]
fn bias_shrinks_with_noise() {
    let mut prev = f64::INFINITY;
    for sigma in [0.10, 0.05, 0.01] {
        let b = median(noisy_gamma_errors(Observable::Loss, sigma, 100)).abs();
        assert!(b < prev.max(0.01), "sigma {sigma}: bias {b} after {prev}");
        prev = b;
    }
    assert!(prev < 0.01);
}

#[test]
fn loss_and_count_fits_agree() {
    let t = truth(1.3e5, 265.0);
    let mut agree = 0;
    let trials = 200;
    for seed in 0..trials {
        let dl = synthesize_dataset(&t, Observable::Loss, &grid(), NoiseModel::Gaussian { relative: 0.05 }, 2 * seed).unwrap();
        let dc =
            synthesize_dataset(&t, Observable::Counts, &grid(), NoiseModel::Gaussian { relative: 0.05 }, 2 * seed + 1).unwrap();
        let fl = fit_loss_curve(&dl).unwrap();
        let fc = fit_count_curve(&dc).unwrap();
        if (fl.gamma() - fc.gamma()).abs() <= fl.std_error(0) + fc.std_error(0) {
            agree += 1;
        }
    }
    // two independent, equally precise estimates overlap at 1 sigma with probability
    // P(|z| < sqrt 2) = 0.843
    let share = agree as f64 / trials as f64;
    assert!((0.78..=0.91).contains(&share), "{agree} of {trials}");
}

#[test]
fn missing_uncertainties_warn() {
    let d = synthesize_dataset(&truth(1.3e5, 265.0), Observable::Loss, &grid(), NoiseModel::None, 0).unwrap();
    let f = fit_loss_curve(&d).unwrap();
    assert!(f.unit_weights);
    assert!(f.warnings.iter().any(|w| w.contains("unit weights")));
}

#[test]
fn degenerate_design_is_rejected() {
    let d = synthesize_dataset(&truth(1.3e5, 265.0), Observable::Loss, &[5e4; 6], NoiseModel::None, 0);
    assert!(d.is_err() || fit_loss_curve(&d.unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn noiseless_round_trip(gamma in 1e4..6e5f64, gamma_s in 50.0..800.0f64, counts in any::<bool>()) {
        let t = truth(gamma, gamma_s);
        let grid: Vec<f64> = (0..12).map(|i| 4.0 * (t.fixed.a_r + gamma) * (i as f64 / 11.0).powi(2)).collect();
        if counts {
            let d = synthesize_dataset(&t, Observable::Counts, &grid, NoiseModel::None, 0).unwrap();
            let f = fit_count_curve(&d).unwrap();
            prop_assert!(f.converged);
            prop_assert!((f.gamma() / gamma - 1.0).abs() < 1e-6, "{} vs {}", f.gamma(), gamma);
        } else {
            let d = synthesize_dataset(&t, Observable::Loss, &grid, NoiseModel::None, 0).unwrap();
            let f = fit_loss_curve(&d).unwrap();
            prop_assert!(f.converged);
            prop_assert!((f.gamma() / gamma - 1.0).abs() < 1e-6, "{} vs {}", f.gamma(), gamma);
            prop_assert!((f.second() / gamma_s - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn capture_rate_near_two_hundred() {
    let p = CaptureParams::rubidium(1e13, 540.0);
    let r = capture_rate(&p).unwrap();
    assert!((r / 200.0 - 1.0).abs() < 0.3, "{r}");
}

#[test]
fn capture_rate_temperature_scaling() {
    let base = CaptureParams::rubidium(1e13, 540.0);
    let r0 = capture_rate(&base).unwrap();
    for f in [0.1, 0.3, 3.0, 10.0] {
        let p = CaptureParams {
            temperature: base.temperature * f,
            ..base
        };
        let r = capture_rate(&p).unwrap();
        assert!((r / r0 / f64::powf(f, 1.0 / 6.0) - 1.0).abs() < 1e-12);
    }
    let dense = CaptureParams {
        density: 2e13,
        ..base
    };
    assert_eq!(capture_rate(&dense).unwrap(), 2.0 * r0);
}

#[test]
fn free_electrons() {
    assert_eq!(electron_steady(4e6, 1e4).unwrap(), 400.0);
    assert_eq!(electron_steady(0.0, 1e4).unwrap(), 0.0);
    assert!(electron_steady(1.0, 0.0).is_err());
}
