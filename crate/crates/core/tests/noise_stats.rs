//! Statistical checks of the noise generators against closed-form or
//! numerically integrated oracles.

use sa_lab::noise::{
    estimate_sigma, farima_coefficients, fgn_autocovariance, noise_stream, pareto_mean,
    sample_pareto_centered, sample_sym_alpha_stable, FarimaPlan, FgnPlan, NoiseModel,
};
use sa_lab::rng::SeedKey;
use sa_lab::stats::{autocovariance_zero_mean, linear_fit, mean, quantile_sorted, std_error};

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// CDF of the standard symmetric stable law by inverting `exp(−|t|^α)`.
fn stable_cdf(alpha: f64, x: f64) -> f64 {
    let integrand = |t: f64| {
        if t == 0.0 {
            x
        } else {
            (x * t).sin() / t * (-t.powf(alpha)).exp()
        }
    };
    0.5 + simpson(integrand, 0.0, 40.0, 80_000) / std::f64::consts::PI
}

#[test]
fn centered_pareto_has_zero_mean() {
    let mut rng = SeedKey::new(101).rng();
    let n = 10_000_000;
    let s: f64 = (0..n).map(|_| sample_pareto_centered(1.5, 1.0, &mut rng)).sum();
    let m = s / n as f64;
    assert!(m.abs() < 0.05, "{m}");
}

#[test]
fn pareto_moment_above_tail_index_diverges() {
    // A single running mean of |X|^1.8 is dominated by its largest jumps, so
    // compare medians over independent replicates at each sample size.
    let sizes = [10_000usize, 100_000, 1_000_000, 10_000_000];
    let reps = 15;
    let key = SeedKey::new(102);
    let medians: Vec<f64> = sizes
        .iter()
        .enumerate()
        .map(|(si, &n)| {
            let mut means: Vec<f64> = (0..reps)
                .map(|r| {
                    let mut rng = key.child(si as u64).child(r).rng();
                    (0..n)
                        .map(|_| sample_pareto_centered(1.5, 1.0, &mut rng).abs().powf(1.8))
                        .sum::<f64>()
                        / n as f64
                })
                .collect();
            means.sort_by(f64::total_cmp);
            quantile_sorted(&means, 0.5)
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[1] > w[0]), "{medians:?}");
}

/// `(E|X|^p)^{1/p}` for centered Pareto(α, 1) by quadrature. With
/// `u = y^{−α} = v^20` the endpoint singularity disappears.
fn pareto_abs_moment_root(alpha: f64, p: f64) -> f64 {
    let m = 20.0;
    let integrand = |v: f64| {
        if v == 0.0 {
            return 0.0;
        }
        let u = v.powf(m);
        (u.powf(-1.0 / alpha) - pareto_mean(alpha, 1.0)).abs().powf(p) * m * v.powf(m - 1.0)
    };
    simpson(integrand, 0.0, 1.0, 2_000_000).powf(1.0 / p)
}

#[test]
fn pareto_sigma_matches_quadrature() {
    // |X|^0.7 has tail index above 2, so the sample mean converges at the
    // usual rate.
    let (alpha, p) = (1.5, 0.7);
    let exact = pareto_abs_moment_root(alpha, p);
    let model = NoiseModel::ParetoCentered { alpha, scale: 1.0 };
    let est = estimate_sigma(&model, 1, p, 1_000_000, SeedKey::new(103)).unwrap();
    assert!((est / exact - 1.0).abs() < 0.05, "{est} vs {exact}");
}

#[test]
#[ignore = "|X|^1.4 has tail index 1.07: 1e6 draws miss most of the mass above 1e4"]
fn pareto_sigma_near_tail_index_matches_quadrature() {
    let (alpha, p) = (1.5, 1.4);
    let exact = pareto_abs_moment_root(alpha, p);
    let model = NoiseModel::ParetoCentered { alpha, scale: 1.0 };
    let est = estimate_sigma(&model, 1, p, 1_000_000, SeedKey::new(103)).unwrap();
    assert!((est / exact - 1.0).abs() < 0.05, "{est} vs {exact}");
}

#[test]
fn pareto_vector_moment_stabilizes() {
    let model = NoiseModel::ParetoCentered { alpha: 1.5, scale: 1.0 };
    let small = estimate_sigma(&model, 30, 1.0, 10_000, SeedKey::new(104)).unwrap();
    let large = estimate_sigma(&model, 30, 1.0, 1_000_000, SeedKey::new(105)).unwrap();
    let ratio = large / small;
    assert!((0.9..=1.1).contains(&ratio), "{small} -> {large}");
}

#[test]
#[ignore = "at p = 1.4 the truncated-sample moment still grows like n^(p/alpha - 1)"]
fn pareto_vector_moment_near_tail_index_stabilizes() {
    let model = NoiseModel::ParetoCentered { alpha: 1.5, scale: 1.0 };
    let small = estimate_sigma(&model, 30, 1.4, 10_000, SeedKey::new(104)).unwrap();
    let large = estimate_sigma(&model, 30, 1.4, 1_000_000, SeedKey::new(105)).unwrap();
    let ratio = large / small;
    assert!((0.9..=1.1).contains(&ratio), "{small} -> {large}");
}

#[test]
fn stable_gaussian_limit() {
    let mut rng = SeedKey::new(106).rng();
    let xs: Vec<f64> = (0..1_000_000)
        .map(|_| sample_sym_alpha_stable(2.0, 0.2, &mut rng))
        .collect();
    let m = mean(&xs);
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / xs.len() as f64;
    assert!((m2 / 0.08 - 1.0).abs() < 0.03, "variance {m2}");
    let kurt = m4 / (m2 * m2);
    assert!((2.95..3.05).contains(&kurt), "kurtosis {kurt}");
}

#[test]
fn stable_medians_vanish() {
    for (i, alpha) in [0.6, 1.0, 1.5, 1.9].into_iter().enumerate() {
        let scale = 0.5;
        let mut rng = SeedKey::new(107).child(i as u64).rng();
        let mut xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_sym_alpha_stable(alpha, scale, &mut rng))
            .collect();
        xs.sort_by(f64::total_cmp);
        let med = quantile_sorted(&xs, 0.5);
        assert!(med.abs() < 0.1 * scale, "alpha {alpha}: median {med}");
    }
}

#[test]
fn stable_cdf_matches_characteristic_function() {
    let alpha = 1.5;
    let mut rng = SeedKey::new(108).rng();
    let mut xs: Vec<f64> = (0..1_000_000)
        .map(|_| sample_sym_alpha_stable(alpha, 1.0, &mut rng))
        .collect();
    xs.sort_by(f64::total_cmp);
    let mut ks: f64 = 0.0;
    for i in 1..100 {
        let x = quantile_sorted(&xs, i as f64 / 100.0);
        let empirical = xs.partition_point(|&v| v <= x) as f64 / xs.len() as f64;
        ks = ks.max((empirical - stable_cdf(alpha, x)).abs());
    }
    assert!(ks < 0.01, "Kolmogorov distance {ks}");
}

#[test]
fn heavy_and_light_streams_have_zero_mean() {
    let n = 1_000_000;
    let cases = [
        NoiseModel::MdsGaussian { std: 1.0 },
        NoiseModel::SymAlphaStable { alpha: 2.0, scale: 1.0 },
        NoiseModel::Farima { c: 0.0, scale: 1.0, trunc: 0 },
        NoiseModel::Fgn { hurst: 0.5, scale: 1.0 },
    ];
    for (i, model) in cases.into_iter().enumerate() {
        let mut s = noise_stream(model, 1, n, SeedKey::new(109).child(i as u64)).unwrap();
        let xs: Vec<f64> = std::iter::from_fn(|| s.next_vec().map(|v| v[0])).collect();
        let m = mean(&xs);
        assert!(m.abs() < 4.0 * std_error(&xs), "{model}: mean {m}");
    }
    // Pareto: fluctuations of the mean scale like n^{1/α − 1}.
    let alpha = 1.5;
    let mut s = noise_stream(
        NoiseModel::ParetoCentered { alpha, scale: 1.0 },
        1,
        n,
        SeedKey::new(110),
    )
    .unwrap();
    let m = std::iter::from_fn(|| s.next_vec().map(|v| v[0])).sum::<f64>() / n as f64;
    assert!(m.abs() < 4.0 * (n as f64).powf(1.0 / alpha - 1.0), "pareto mean {m}");
}

#[test]
fn white_limits_have_no_autocorrelation() {
    let n = 1_000_000;
    let fgn = FgnPlan::new(0.5, n).unwrap().generate(1.0, &mut SeedKey::new(111).rng());
    let far = FarimaPlan::new(0.0, 500, n)
        .unwrap()
        .generate(1.0, &mut SeedKey::new(112).rng());
    for (name, xs) in [("fgn", fgn), ("farima", far)] {
        let g = autocovariance_zero_mean(&xs, 8);
        for h in 1..=8 {
            let r = g[h] / g[0];
            assert!(r.abs() < 0.005, "{name} lag {h}: {r}");
        }
    }
}

#[test]
fn fgn_autocovariance_is_exact() {
    let lags = [0usize, 1, 2, 4, 8, 16];
    let n = 1 << 16;
    let paths = 200;
    for (hi, hurst) in [0.55, 0.7, 0.9].into_iter().enumerate() {
        let plan = FgnPlan::new(hurst, n).unwrap();
        let key = SeedKey::new(113).child(hi as u64);
        let mut per_lag = vec![Vec::with_capacity(paths); lags.len()];
        for p in 0..paths {
            let x = plan.generate(1.0, &mut key.child(p as u64).rng());
            let g = autocovariance_zero_mean(&x, 16);
            for (slot, &h) in per_lag.iter_mut().zip(&lags) {
                slot.push(g[h]);
            }
        }
        for (vals, &h) in per_lag.iter().zip(&lags) {
            let est = mean(vals);
            let se = std_error(vals);
            let exact = fgn_autocovariance(hurst, h);
            assert!(
                (est - exact).abs() < 3.0 * se,
                "H={hurst} lag {h}: {est} vs {exact} (se {se})"
            );
        }
    }
}

#[test]
fn fgn_coordinates_are_independent() {
    let mut s = noise_stream(NoiseModel::Fgn { hurst: 0.7, scale: 1.0 }, 2, 100_000, SeedKey::new(114))
        .unwrap();
    let (mut xy, mut xx, mut yy) = (0.0, 0.0, 0.0);
    while let Some(v) = s.next_vec() {
        xy += v[0] * v[1];
        xx += v[0] * v[0];
        yy += v[1] * v[1];
    }
    let r = xy / (xx * yy).sqrt();
    assert!(r.abs() < 0.01, "{r}");
}

#[test]
fn fgn_envelope_includes_lag_zero() {
    let model = NoiseModel::Fgn { hurst: 0.7, scale: 20.0 };
    let n = 1 << 18;
    let sigma = estimate_sigma(&model, 1, 2.0, n, SeedKey::new(115)).unwrap();
    // Same stream the estimator saw: its lag-0 term is a lower bound.
    let mut s = noise_stream(model, 1, n, SeedKey::new(115)).unwrap();
    let xs: Vec<f64> = std::iter::from_fn(|| s.next_vec().map(|v| v[0])).collect();
    let g0 = autocovariance_zero_mean(&xs, 0)[0];
    assert!(sigma * sigma >= g0);
    assert!((sigma * sigma / 400.0 - 1.0).abs() < 0.05, "{}", sigma * sigma);
}

#[test]
fn farima_variance_matches_coefficient_sum() {
    let (c, trunc, n) = (0.3, 500, 1_000_000);
    let xs = FarimaPlan::new(c, trunc, n)
        .unwrap()
        .generate(1.0, &mut SeedKey::new(116).rng());
    let exact: f64 = farima_coefficients(c, trunc).iter().map(|p| p * p).sum();
    let var = autocovariance_zero_mean(&xs, 0)[0];
    assert!((var / exact - 1.0).abs() < 0.02, "{var} vs {exact}");
}

#[test]
fn farima_autocovariance_slope() {
    // The asymptotic slope 2c − 1 only shows at lags far below the
    // truncation, so this uses a window much longer than the default.
    let (c, n) = (0.45, 1 << 17);
    let trunc = n;
    let plan = FarimaPlan::new(c, trunc, n).unwrap();
    let key = SeedKey::new(117);
    let paths = 20;
    let mut acc = vec![0.0; 129];
    for p in 0..paths {
        let x = plan.generate(1.0, &mut key.child(p).rng());
        for (a, g) in acc.iter_mut().zip(autocovariance_zero_mean(&x, 128)) {
            *a += g / paths as f64;
        }
    }
    let lags = [8usize, 16, 32, 64, 128];
    let lx: Vec<f64> = lags.iter().map(|&h| (h as f64).ln()).collect();
    let ly: Vec<f64> = lags.iter().map(|&h| acc[h].ln()).collect();
    let (slope, _, _) = linear_fit(&lx, &ly);
    assert!((slope - (2.0 * c - 1.0)).abs() < 0.15, "{slope}");
}
