mod common;

use common::{adaptive_simpson, integrate_piecewise, mean, median, variance};
use proptest::prelude::*;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use tapaudit::distributions::{
    diff_pdf, fit_scale_mle, fit_scale_moments, laplace_cdf, laplace_pdf, laplace_sample,
    laplace_sf, DifferenceSample, NoiseScale,
};
use tapaudit::rng::seeded;

fn scale(b: f64) -> NoiseScale {
    NoiseScale::new(b).unwrap()
}

/// Rounded differences of independent Laplace pairs, as produced by a
/// rounded release of two equal raw counts.
fn simulated_differences(b: f64, n: usize, seed: u64) -> DifferenceSample {
    let s = scale(b);
    let mut rng = seeded(seed);
    (0..n)
        .map(|_| {
            let x = laplace_sample(s, &mut rng);
            let y = laplace_sample(s, &mut rng);
            (x - y).round() as i64
        })
        .collect()
}

#[test]
fn diff_pdf_integrates_to_one() {
    for b in [0.5, 1.0, 1.4, 3.0] {
        let s = scale(b);
        let f = |u: f64| diff_pdf(u, s);
        let total = integrate_piecewise(&f, &[-50.0 * b, 0.0, 50.0 * b], 1e-10);
        assert!((total - 1.0).abs() < 1e-6, "b={b}: {total}");
    }
}

#[test]
fn diff_pdf_matches_numerical_convolution() {
    // f_{X-Y}(u) = ∫ f(x) f(x - u) dx, with kinks at x = 0 and x = u.
    for b in [0.5, 1.0, 1.4, 3.0] {
        let s = scale(b);
        for i in 0..=40 {
            let u = -10.0 * b + f64::from(i) * 0.5 * b;
            let integrand = |x: f64| laplace_pdf(x, s).unwrap() * laplace_pdf(x - u, s).unwrap();
            let (lo, hi) = (u.min(0.0), u.max(0.0));
            let mut points = vec![lo - 60.0 * b, lo];
            if hi > lo {
                points.push(hi);
            }
            points.push(hi + 60.0 * b);
            let conv = integrate_piecewise(&integrand, &points, 1e-12);
            let closed = diff_pdf(u, s);
            assert!((conv - closed).abs() < 1e-6, "b={b} u={u}: {conv} vs {closed}");
        }
    }
}

#[test]
fn diff_pdf_closed_form_points() {
    assert!((diff_pdf(0.0, scale(1.4)) - 1.0 / 5.6).abs() < 1e-15);
    assert_eq!(diff_pdf(0.0, scale(1.0)), 0.25);
    let expected = 3.4 * (-2.0f64 / 1.4).exp() / 7.84;
    assert!((diff_pdf(2.0, scale(1.4)) - expected).abs() < 1e-15);
    assert!((expected - 0.10393).abs() < 1e-5);
}

#[test]
fn laplace_cdf_is_antiderivative_of_pdf() {
    let s = scale(1.4);
    let h = 1e-5;
    for i in 0..100 {
        // Offset keeps the grid off the kink at zero.
        let x = -10.0 + 0.2 * f64::from(i) + 0.0137;
        let fd = (laplace_cdf(x + h, s).unwrap() - laplace_cdf(x - h, s).unwrap()) / (2.0 * h);
        let pdf = laplace_pdf(x, s).unwrap();
        assert!((fd - pdf).abs() < 1e-6, "x={x}: {fd} vs {pdf}");
    }
}

#[test]
fn laplace_sf_closed_form() {
    let s = scale(1.4);
    let expected = 1.0 - 0.5 * (-17.0f64 / 1.4).exp();
    assert!((laplace_cdf(17.0, s).unwrap() - expected).abs() < 1e-15);
    assert!((laplace_sf(17.0, s).unwrap() - 0.5 * (-17.0f64 / 1.4).exp()).abs() < 1e-20);
}

#[test]
fn sample_mean_and_variance() {
    let s = scale(1.4);
    let mut rng = seeded(20160725);
    let xs: Vec<f64> = (0..1_000_000).map(|_| laplace_sample(s, &mut rng)).collect();
    assert!(mean(&xs).abs() < 0.01, "mean {}", mean(&xs));
    assert!((variance(&xs) - 3.92).abs() < 0.05, "variance {}", variance(&xs));
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let s = scale(1.4);
    let draw = |seed| {
        let mut rng = seeded(seed);
        (0..16).map(|_| laplace_sample(s, &mut rng)).collect::<Vec<_>>()
    };
    assert_eq!(draw(7), draw(7));
    assert_ne!(draw(7), draw(8));
}

#[test]
fn difference_histogram_matches_diff_pdf() {
    let b = 1.4;
    let s = scale(b);
    let width = 0.5;
    let edge = 8.0 * b;
    let inner = (2.0 * edge / width).round() as usize;
    let mut probs = Vec::with_capacity(inner + 2);
    let f = |u: f64| diff_pdf(u, s);
    let tail = adaptive_simpson(&f, edge, 60.0 * b, 1e-12);
    probs.push(tail);
    for k in 0..inner {
        let lo = -edge + k as f64 * width;
        probs.push(integrate_piecewise(&f, &[lo, (lo + width).min(0.0).max(lo), lo + width], 1e-12));
    }
    probs.push(tail);
    let n = 1_000_000usize;
    for seed in [1u64, 2, 3] {
        let mut rng = seeded(seed);
        let mut counts = vec![0u64; inner + 2];
        for _ in 0..n {
            let u = laplace_sample(s, &mut rng) - laplace_sample(s, &mut rng);
            let idx = if u < -edge {
                0
            } else if u >= edge {
                inner + 1
            } else {
                1 + (((u + edge) / width) as usize).min(inner - 1)
            };
            counts[idx] += 1;
        }
        let stat: f64 = counts
            .iter()
            .zip(&probs)
            .map(|(&o, &p)| {
                let e = p * n as f64;
                (o as f64 - e).powi(2) / e
            })
            .sum();
        let dist = ChiSquared::new((probs.len() - 1) as f64).unwrap();
        let p_value = dist.sf(stat);
        assert!(p_value > 0.01, "seed {seed}: chi2 {stat}, p {p_value}");
    }
}

#[test]
fn mle_recovers_scale_from_large_samples() {
    for (b, lo, hi) in [(1.4, 1.35, 1.45), (0.5, 0.48, 0.52)] {
        let est = fit_scale_mle(&simulated_differences(b, 100_000, 11)).unwrap();
        assert!(lo <= est.b_hat && est.b_hat <= hi, "b={b}: {}", est.b_hat);
        assert!(est.log_likelihood.is_some());
        assert!(est.stderr_approx.is_finite() && est.stderr_approx > 0.0);
    }
}

#[test]
fn moments_recovers_scale_from_large_samples() {
    let est = fit_scale_moments(&simulated_differences(1.4, 100_000, 12)).unwrap();
    assert!((1.35..=1.45).contains(&est.b_hat), "{}", est.b_hat);
}

#[test]
fn mle_error_shrinks_with_sample_size() {
    let b = 1.4;
    let median_error = |n: usize| {
        let errors: Vec<f64> = (0..20u64)
            .into_par_iter()
            .map(|seed| {
                let sample = simulated_differences(b, n, 1000 * n as u64 + seed);
                (fit_scale_mle(&sample).unwrap().b_hat - b).abs()
            })
            .collect();
        median(errors)
    };
    let e3 = median_error(1_000);
    let e4 = median_error(10_000);
    let e5 = median_error(100_000);
    assert!(e3 > e4 && e4 > e5, "{e3} {e4} {e5}");
}

#[test]
fn mle_and_moments_agree_on_laplace_differences() {
    let sample = simulated_differences(1.4, 50_000, 99);
    let mle = fit_scale_mle(&sample).unwrap().b_hat;
    let mom = fit_scale_moments(&sample).unwrap().b_hat;
    assert!((mle - mom).abs() / mom < 0.05, "{mle} vs {mom}");
}

#[test]
fn fit_errors() {
    assert!(fit_scale_mle(&DifferenceSample::new(vec![])).is_err());
    assert!(fit_scale_moments(&DifferenceSample::new(vec![3])).is_err());
    assert!(fit_scale_moments(&DifferenceSample::new(vec![2, 2, 2])).is_err());
    let zeros = fit_scale_mle(&DifferenceSample::new(vec![0; 10])).unwrap();
    assert!(zeros.degenerate);
    assert_eq!(zeros.stderr_approx, f64::INFINITY);
}

proptest! {
    #[test]
    fn diff_pdf_is_symmetric_and_positive(u in -100.0f64..100.0, b in 0.01f64..50.0) {
        let s = scale(b);
        prop_assert_eq!(diff_pdf(u, s), diff_pdf(-u, s));
        prop_assert!(diff_pdf(u, s) >= 0.0);
        prop_assert!(diff_pdf(u, s) <= diff_pdf(0.0, s));
    }

    #[test]
    fn cdf_and_sf_are_complementary(x in -60.0f64..60.0, b in 0.1f64..10.0) {
        let s = scale(b);
        let total = laplace_cdf(x, s).unwrap() + laplace_sf(x, s).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_is_monotone(x in -60.0f64..60.0, dx in 0.0f64..5.0, b in 0.1f64..10.0) {
        let s = scale(b);
        prop_assert!(laplace_cdf(x, s).unwrap() <= laplace_cdf(x + dx, s).unwrap());
    }

    #[test]
    fn mle_is_invariant_under_sign_flip(values in prop::collection::vec(-20i64..20, 5..60)) {
        prop_assume!(values.iter().any(|&v| v != 0));
        let flipped: Vec<i64> = values.iter().map(|v| -v).collect();
        let a = fit_scale_mle(&DifferenceSample::new(values)).unwrap().b_hat;
        let b = fit_scale_mle(&DifferenceSample::new(flipped)).unwrap().b_hat;
        prop_assert_eq!(a, b);
    }
}
