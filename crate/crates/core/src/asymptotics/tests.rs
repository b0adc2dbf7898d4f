use super::*;
use crate::numerics::norm_quantile;
use rand::Rng;

const Z95: f64 = 1.644_853_626_951_472_7;

fn qmc(points: u64, seed: u64) -> QmcSpec {
    QmcSpec::new(points, seed, true).unwrap()
}

fn frame(delta: f64, omega: f64) -> LocalFrameTwo {
    LocalFrameTwo::new(delta, omega, 1.0, 0.5).unwrap()
}

#[test]
fn frame_validation() {
    assert!(LocalFrameOne::new(-0.1, 1.0).is_err());
    assert!(LocalFrameOne::new(0.0, 0.0).is_err());
    assert!(LocalFrameTwo::new(-1.0, 0.5, 1.0, 0.5).is_err());
    assert!(LocalFrameTwo::new(1.0, 1.0, 1.0, 0.5).is_err());
    assert!(LocalFrameTwo::new(1.0, 0.5, -1.0, 0.5).is_err());
}

#[test]
fn normal_closed_form_examples() {
    assert_eq!(
        exact_normal_coverage(100, 0.0, 0.05, 0.05).unwrap().value(),
        0.95
    );
    assert_eq!(
        exact_normal_coverage(100, 1.0, 0.05, 0.05).unwrap().value(),
        0.90
    );
    assert!(exact_normal_coverage(100, -0.01, 0.05, 0.05).is_err());
    let step = 0.164_485_362_695_147_24;
    assert_eq!(
        exact_normal_coverage(100, step - 1e-9, 0.05, 0.05)
            .unwrap()
            .value(),
        0.95
    );
    assert_eq!(
        exact_normal_coverage(100, step + 1e-9, 0.05, 0.05)
            .unwrap()
            .value(),
        0.90
    );
}

#[test]
fn one_sample_limit_examples() {
    let c = |tau: f64, sigma0: f64| {
        asym_coverage_one_sample(&LocalFrameOne::new(tau, sigma0).unwrap(), 0.05, 0.05).unwrap()
    };
    for s in [0.5, 1.0, 3.0] {
        assert_eq!(c(0.0, s).coverage.value(), 0.95);
    }
    assert_eq!(c(10.0, 1.0).coverage.value(), 0.90);
    let sigma = 2f64.sqrt();
    let threshold = 2.326_174_307_353_348;
    assert_eq!(c(threshold - 1e-9, sigma).coverage.value(), 0.95);
    assert_eq!(c(threshold + 1e-9, sigma).coverage.value(), 0.90);
    let edge = c(norm_quantile(0.95) * sigma, sigma);
    assert!(edge.at_boundary);
    assert_eq!(edge.coverage.value(), 0.95);
    assert!(!c(1.0, sigma).at_boundary);
}

#[test]
fn normal_case_is_its_own_limit() {
    let mut rng = crate::rng::RngState::new(77).rng();
    for _ in 0..1000 {
        let n: u64 = rng.random_range(1..5000);
        let theta0: f64 = rng.random_range(0.0..0.5);
        let tau = (n as f64).sqrt() * theta0;
        if (tau - Z95).abs() <= 1e-9 {
            continue;
        }
        let limit =
            asym_coverage_one_sample(&LocalFrameOne::new(tau, 1.0).unwrap(), 0.05, 0.05).unwrap();
        assert_eq!(
            limit.coverage,
            exact_normal_coverage(n, theta0, 0.05, 0.05).unwrap()
        );
    }
}

#[test]
fn delta_threshold_examples() {
    let t = delta_threshold(0.25, 0.5, 0.05).unwrap();
    assert!((t - 1.899_313_368_595_929_6).abs() < 1e-12);
    let c = |delta| {
        asym_coverage_delta(
            &LocalFrameTwo::new(delta, 0.25, 0.5, 0.5).unwrap(),
            0.05,
            0.05,
        )
        .unwrap()
    };
    assert_eq!(c(0.0).coverage.value(), 0.95);
    assert_eq!(c(10.0).coverage.value(), 0.90);
    assert_eq!(c(t - 1e-9).coverage.value(), 0.95);
    assert_eq!(c(t + 1e-9).coverage.value(), 0.90);
    assert!(c(t).at_boundary);
}

#[test]
fn transform_examples() {
    assert_eq!(
        transform_f12(0.0, 0.0, &frame(0.0, 0.5)),
        F12Point { x: 0.0, y: 0.0 }
    );
    let p = transform_f12(1.0, -1.0, &frame(0.0, 0.5));
    assert!(p.x.abs() < 1e-15 && p.y.abs() < 1e-15);
    let (z1, z2) = (0.7, -1.3);
    let p = transform_f12(z1, z2, &frame(1e3, 0.3));
    assert_eq!(p.x, z1 / 0.3f64.sqrt());
    assert_eq!(p.y, z2 / 0.7f64.sqrt());
}

#[test]
fn g_limits() {
    let f = frame(0.7, 0.3);
    let pt = |x, y| F12Point { x, y };
    assert_eq!(g1(pt(-60.0, -60.0), &f).value(), 1.0);
    assert!(g1(pt(60.0, 60.0), &f).value() < 1e-200);
    assert!(g2(pt(0.0, 60.0), &f).value() < 1e-200);
    assert_eq!(g2(pt(-60.0, -60.0), &f).value(), 1.0);
    assert!((g2(pt(0.0, 0.0), &frame(0.0, 0.5)).value() - 0.375).abs() < 1e-15);
    let far = frame(1e3, 0.3);
    let mut rng = crate::rng::RngState::new(3).rng();
    for _ in 0..1000 {
        let (x, y) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let want = norm_cdf(-0.3f64.sqrt() * x);
        assert!((g1(pt(x, y), &far).value() - want).abs() < 1e-12);
    }
}

#[test]
fn g_bounded_and_nonincreasing() {
    let mut rng = crate::rng::RngState::new(4).rng();
    let h = 1e-3;
    for _ in 0..100_000 {
        let f = frame(rng.random_range(0.0..6.0), rng.random_range(0.05..0.95));
        let p = F12Point {
            x: rng.random_range(-6.0..6.0),
            y: rng.random_range(-6.0..6.0),
        };
        let (a, b) = (g1(p, &f).value(), g2(p, &f).value());
        assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        let px = F12Point { x: p.x + h, ..p };
        let py = F12Point { y: p.y + h, ..p };
        assert!(g1(px, &f).value() <= a + 1e-14 && g1(py, &f).value() <= a + 1e-14);
        assert!(g2(px, &f).value() <= b + 1e-14 && g2(py, &f).value() <= b + 1e-14);
    }
}

#[test]
fn slack_limit_is_nominal() {
    for omega in [0.1, 0.25, 0.5] {
        let f = frame(1e3, omega);
        let a = asym_coverage_theta1(&f, 0.05, 0.05, &qmc(1 << 14, 1), 8).unwrap();
        let b = asym_coverage_theta2(&f, 0.05, 0.05, &qmc(1 << 14, 1), 8).unwrap();
        assert!((a.coverage.value() - 0.90).abs() < 2e-3, "{a:?}");
        assert!((b.coverage.value() - 0.90).abs() < 2e-3, "{b:?}");
    }
}

#[test]
fn balanced_design_symmetry() {
    for delta in [0.0, 1.0, 2.5] {
        let f = frame(delta, 0.5);
        let a = asym_coverage_theta1(&f, 0.05, 0.05, &qmc(1 << 15, 5), 8).unwrap();
        let b = asym_coverage_theta2(&f, 0.05, 0.05, &qmc(1 << 15, 6), 8).unwrap();
        let diff = (a.coverage.value() - b.coverage.value()).abs();
        assert!(
            diff <= a.error_estimate + b.error_estimate,
            "delta {delta}: {a:?} {b:?}"
        );
    }
}

#[test]
fn qmc_is_deterministic_and_thread_invariant() {
    let f = frame(1.3, 0.2);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| asym_coverage_theta1(&f, 0.05, 0.05, &qmc(40_000, 9), 4).unwrap())
    };
    assert_eq!(run(1), run(3));
    let plain =
        asym_coverage_theta2(&f, 0.05, 0.05, &QmcSpec::new(1000, 0, false).unwrap(), 8).unwrap();
    assert_eq!(plain.replicate_means.len(), 1);
    assert_eq!(plain.error_estimate, 0.0);
}

#[test]
fn doubling_points_stays_within_error_estimate() {
    let mut rng = crate::rng::RngState::new(8).rng();
    let mut ok = 0;
    for trial in 0..100u64 {
        let f = frame(rng.random_range(0.0..5.0), rng.random_range(0.1..0.9));
        let g = if trial % 2 == 0 {
            asym_coverage_theta1
        } else {
            asym_coverage_theta2
        };
        let small = g(&f, 0.05, 0.05, &qmc(1 << 12, trial), 8).unwrap();
        let large = g(&f, 0.05, 0.05, &qmc(1 << 13, trial), 8).unwrap();
        if (small.coverage.value() - large.coverage.value()).abs() < small.error_estimate {
            ok += 1;
        }
    }
    assert!(ok >= 95, "{ok} of 100");
}

#[test]
fn agrees_with_plain_monte_carlo() {
    // (ω, δ, target, coverage, standard error) from 10⁷ pseudo-random pairs,
    // with the bivariate normal CDF integrated by Gauss–Legendre over ρ.
    let oracle: [(f64, f64, u8, f64, f64); 10] = [
        (0.1, 0.0, 1, 0.831_266_2, 1.18e-4),
        (0.1, 1.0, 1, 0.920_267_9, 8.57e-5),
        (0.25, 2.0, 1, 0.933_322_9, 7.89e-5),
        (0.5, 0.0, 1, 0.878_356_7, 1.03e-4),
        (0.3, 4.0, 1, 0.906_986_3, 9.18e-5),
        (0.1, 0.0, 2, 0.896_860_1, 9.62e-5),
        (0.1, 3.0, 2, 0.901_762_7, 9.41e-5),
        (0.25, 1.0, 2, 0.902_649_3, 9.37e-5),
        (0.5, 1.5, 2, 0.914_813_0, 8.83e-5),
        (0.2, 6.0, 2, 0.900_629_2, 9.46e-5),
    ];
    for (omega, delta, target, want, se) in oracle {
        let f = frame(delta, omega);
        let spec = qmc(1 << 17, 21);
        let got = if target == 1 {
            asym_coverage_theta1(&f, 0.05, 0.05, &spec, 8).unwrap()
        } else {
            asym_coverage_theta2(&f, 0.05, 0.05, &spec, 8).unwrap()
        };
        let combined = (se * se + got.error_estimate * got.error_estimate).sqrt();
        assert!(
            (got.coverage.value() - want).abs() <= 3.0 * combined,
            "{omega} {delta} {target}: {got:?} vs {want}"
        );
    }
}
