//! Cross-module estimator checks against generators with known exponents:
//! diffusive scaling of white noise, fGn with prescribed H, the binomial
//! cascade's closed-form tau(q), and Levy-stable self-similarity.

use multifract::dea::{collect_fluctuations, delta_spectrum, BinRule};
use multifract::fit::fit_loglog;
use multifract::ingest::{to_increments, IncrementMode};
use multifract::mfdfa::{
    fluctuation_function, h_spectrum, profile, rescaled_range, rolling_hurst, tau_from_h,
    DfaConfig, RollingEstimator,
};
use multifract::partition::partition_function;
use multifract::spectrum::{compare_spectra, legendre_tau_to_f};
use multifract::synth::{
    analytic_tau_cascade, fgn_autocovariance, generate, GeneratorModel, GeneratorSpec,
};
use multifract::{QGrid, ScaleGrid, TimeSeries};

fn white(n: usize, seed: u64) -> TimeSeries {
    generate(&GeneratorSpec {
        model: GeneratorModel::GaussianWhite,
        length: n,
        seed,
    })
    .unwrap()
    .series
}

fn fgn(hurst: f64, n: usize, seed: u64) -> TimeSeries {
    generate(&GeneratorSpec {
        model: GeneratorModel::Fgn { hurst },
        length: n,
        seed,
    })
    .unwrap()
    .series
}

fn cascade_tau_exact(a: f64, q: f64) -> f64 {
    -(a.powf(q) + (1.0 - a).powf(q)).log2()
}

#[test]
fn white_noise_walk_has_diffusive_f2() {
    // Oracle: uncorrelated increments diffuse, so F(2,s) ~ s^0.5.
    let n = 1 << 16;
    let grid = ScaleGrid::log_spaced(16, 4096, 16).unwrap();
    let q = QGrid::new(vec![2.0]).unwrap();
    let mut slopes = Vec::new();
    for seed in 0..10 {
        let cfg = DfaConfig::new(1, q.clone(), grid.clone());
        let surf = fluctuation_function(&white(n, seed), &cfg).unwrap().value;
        let fit = fit_loglog(&surf.points_for(0), None).unwrap();
        slopes.push(fit.slope);
    }
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    assert!((mean - 0.5).abs() < 0.05, "F(2,s) slope {mean}");
}

#[test]
fn white_noise_profile_variance_grows_linearly() {
    // Var(Y_{k+s} - Y_k) = s sigma^2 for a random-walk profile.
    let series = white(1 << 16, 14);
    let prof = profile(&series);
    let y = prof.values();
    let points: Vec<(f64, f64)> = [4usize, 8, 16, 32, 64, 128, 256, 512]
        .iter()
        .map(|&s| {
            let diffs: Vec<f64> = (0..y.len() - s).map(|k| y[k + s] - y[k]).collect();
            let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
            let var =
                diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / diffs.len() as f64;
            (s as f64, var)
        })
        .collect();
    let fit = fit_loglog(&points, None).unwrap();
    assert!(
        (fit.slope - 1.0).abs() < 0.05,
        "variance slope {}",
        fit.slope
    );
}

#[test]
fn fgn_long_memory_is_recovered() {
    // Generator with known H = 0.7 as oracle for both estimators.
    let n = 1 << 16;
    let grid = ScaleGrid::log_spaced(16, 4096, 16).unwrap();
    let q = QGrid::new(vec![2.0]).unwrap();
    let mut h2 = Vec::new();
    for seed in [1, 2] {
        let series = fgn(0.7, n, seed);
        let cfg = DfaConfig::new(1, q.clone(), grid.clone());
        let surf = fluctuation_function(&series, &cfg).unwrap().value;
        let h = h_spectrum(&surf, None).unwrap().value;
        h2.push(h.ordinate()[0]);
    }
    let mean = h2.iter().sum::<f64>() / h2.len() as f64;
    assert!((0.65..=0.75).contains(&mean), "h(2) for H=0.7 fGn: {mean}");
}

#[test]
fn rescaled_range_tracks_hurst() {
    let n = 1 << 16;
    // Large minimum scale keeps the classical small-sample R/S bias down.
    let grid = ScaleGrid::log_spaced(128, 16384, 10).unwrap();

    let mut white_slopes = Vec::new();
    for seed in 0..10 {
        white_slopes.push(rescaled_range(&white(n, seed), &grid).unwrap().value.slope);
    }
    let mean = white_slopes.iter().sum::<f64>() / white_slopes.len() as f64;
    assert!((mean - 0.5).abs() < 0.07, "white-noise R/S slope {mean}");

    let mut fgn_slopes = Vec::new();
    for seed in [3, 4] {
        fgn_slopes.push(
            rescaled_range(&fgn(0.8, n, seed), &grid)
                .unwrap()
                .value
                .slope,
        );
    }
    let mean = fgn_slopes.iter().sum::<f64>() / fgn_slopes.len() as f64;
    assert!((0.72..=0.88).contains(&mean), "H=0.8 R/S slope {mean}");
}

#[test]
fn cascade_mfdfa_recovers_the_closed_form() {
    let a = 0.6;
    let depth = 14;
    let g = generate(&GeneratorSpec {
        model: GeneratorModel::BinomialCascade { a, depth },
        length: 1 << depth,
        seed: 5,
    })
    .unwrap();

    let q = QGrid::range(1.0, 4.0, 0.5).unwrap();
    let grid = ScaleGrid::log_spaced(16, 1 << (depth - 3), 14).unwrap();
    let cfg = DfaConfig::new(1, q, grid);
    let surf = fluctuation_function(&g.series, &cfg).unwrap().value;
    let h = h_spectrum(&surf, None).unwrap().value;

    // h(q) strictly decreasing for a genuine multifractal.
    for w in h.ordinate().windows(2) {
        assert!(
            w[1] < w[0],
            "h(q) not strictly decreasing: {:?}",
            h.ordinate()
        );
    }

    let tau = tau_from_h(&h).unwrap();
    for (i, &qv) in tau.abscissa().iter().enumerate() {
        let expected = cascade_tau_exact(a, qv);
        assert!(
            (tau.ordinate()[i] - expected).abs() < 0.1,
            "tau({qv}) = {} vs closed form {expected}",
            tau.ordinate()[i]
        );
    }
}

#[test]
fn estimated_cascade_spectrum_is_concave_with_unit_max() {
    let a = 0.65;
    let depth = 14;
    let g = generate(&GeneratorSpec {
        model: GeneratorModel::BinomialCascade { a, depth },
        length: 1 << depth,
        seed: 9,
    })
    .unwrap();
    let q = QGrid::range(-2.0, 4.0, 0.25).unwrap();
    let grid = ScaleGrid::log_spaced(16, 1 << (depth - 3), 14).unwrap();
    let cfg = DfaConfig::new(1, q, grid);
    let surf = fluctuation_function(&g.series, &cfg).unwrap().value;
    let h = h_spectrum(&surf, None).unwrap().value;
    let tau = tau_from_h(&h).unwrap();
    let f = legendre_tau_to_f(&tau).unwrap().value;

    let fmax = f
        .ordinate()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((fmax - 1.0).abs() < 0.05, "spectrum max {fmax}");
}

#[test]
fn mfdfa_and_partition_function_agree_on_a_cascade() {
    let a = 0.6;
    let depth = 16;
    let g = generate(&GeneratorSpec {
        model: GeneratorModel::BinomialCascade { a, depth },
        length: 1 << depth,
        seed: 2,
    })
    .unwrap();

    let q = QGrid::range(1.0, 4.0, 0.5).unwrap();

    // Route 1: MF-DFA on the leaf-mass series.
    let grid = ScaleGrid::log_spaced(16, 1 << (depth - 3), 14).unwrap();
    let cfg = DfaConfig::new(1, q.clone(), grid);
    let surf = fluctuation_function(&g.series, &cfg).unwrap().value;
    let tau_dfa = tau_from_h(&h_spectrum(&surf, None).unwrap().value).unwrap();

    // Route 2: partition function on the emitted exact box masses.
    let measures = &g.cascade_measures.unwrap()[5..=11]; // levels 6..=12
    let tau_box = partition_function(measures, &q).unwrap().value;

    let report = compare_spectra(&tau_dfa, &tau_box).unwrap();
    assert!(
        report.max_abs_deviation <= 0.1,
        "deviation {}",
        report.max_abs_deviation
    );

    // And both against the closed form.
    let exact = analytic_tau_cascade(a, &q).unwrap();
    let vs_exact = compare_spectra(&tau_box, &exact).unwrap();
    assert!(
        vs_exact.max_abs_deviation <= 1e-3,
        "partition vs closed form {}",
        vs_exact.max_abs_deviation
    );
}

#[test]
fn fgn_sample_autocovariance_matches_analytic() {
    // Bartlett's formula gives the sampling standard error of the
    // autocovariance estimate; the sample value must sit within 3 SEs.
    let n = 1 << 17;
    for (hurst, seed) in [(0.3, 6), (0.7, 7)] {
        let series = fgn(hurst, n, seed);
        let x = series.values();
        let mean = x.iter().sum::<f64>() / n as f64;

        for lag in 1..=8usize {
            let sample: f64 = (0..n - lag)
                .map(|i| (x[i] - mean) * (x[i + lag] - mean))
                .sum::<f64>()
                / (n - lag) as f64;
            let expected = fgn_autocovariance(hurst, lag);

            // Var(gamma_hat(k)) ~ (1/n) sum_j [gamma(j)^2 + gamma(j+k)gamma(j-k)].
            let mut var = 0.0;
            let cutoff = 5000i64;
            for j in -cutoff..=cutoff {
                let g = |l: i64| fgn_autocovariance(hurst, l.unsigned_abs() as usize);
                var += g(j) * g(j) + g(j + lag as i64) * g(j - lag as i64);
            }
            var /= n as f64;
            let se = var.sqrt();
            assert!(
                (sample - expected).abs() <= 3.0 * se,
                "H={hurst} lag {lag}: sample {sample} vs {expected} (3se = {})",
                3.0 * se
            );
        }
    }
}

#[test]
fn levy_survival_tail_has_stable_slope() {
    // Pool two seeds; fit the empirical survival function in the rank band
    // where the asymptotic tail dominates but order statistics are stable.
    let mu = 1.5;
    let mut magnitudes: Vec<f64> = Vec::new();
    for seed in [10, 11] {
        let g = generate(&GeneratorSpec {
            model: GeneratorModel::Levy { mu },
            length: 1 << 17,
            seed,
        })
        .unwrap();
        magnitudes.extend(g.series.values().iter().map(|v| v.abs()));
    }
    magnitudes.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let n = magnitudes.len() as f64;

    let lo_rank = magnitudes.len() / 1000;
    let hi_rank = magnitudes.len() / 100;
    let points: Vec<(f64, f64)> = (lo_rank..hi_rank)
        .step_by(5)
        .map(|i| (magnitudes[i], (i + 1) as f64 / n))
        .collect();
    let fit = fit_loglog(&points, None).unwrap();
    assert!(
        (fit.slope + mu).abs() < 0.2,
        "tail slope {} vs -{mu}",
        fit.slope
    );
}

#[test]
fn levy_walk_self_similarity_and_dea() {
    // Rescaling-collapse oracle: quantiles of X(t) / t^(1/mu) must agree
    // across window lengths if the walk is self-similar with delta = 1/mu.
    let mu = 1.5;
    let g = generate(&GeneratorSpec {
        model: GeneratorModel::Levy { mu },
        length: 1 << 16,
        seed: 12,
    })
    .unwrap();
    let grid = ScaleGrid::new(vec![8, 16, 32, 64, 128, 256, 512, 1024]).unwrap();
    let ens = collect_fluctuations(&g.series, &grid).unwrap();

    let rescaled_quantiles = |idx: usize, t: f64| -> Vec<f64> {
        let mut xs: Vec<f64> = ens
            .displacements(idx)
            .iter()
            .map(|x| x / t.powf(1.0 / mu))
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        [0.2, 0.35, 0.5, 0.65, 0.8]
            .iter()
            .map(|p| xs[(p * (xs.len() - 1) as f64) as usize])
            .collect()
    };
    let q_small = rescaled_quantiles(1, 16.0);
    let q_large = rescaled_quantiles(6, 512.0);
    let iqr = q_small[4] - q_small[0];
    for (a, b) in q_small.iter().zip(&q_large) {
        assert!(
            (a - b).abs() < 0.1 * iqr,
            "rescaled quantiles diverge: {a} vs {b} (iqr {iqr})"
        );
    }

    // With self-similarity established, DEA must find delta(1) = 1/mu.
    let q = QGrid::new(vec![1.0]).unwrap();
    let out = delta_spectrum(&ens, &q, &BinRule::FreedmanDiaconis, false)
        .unwrap()
        .value;
    let delta1 = out.curve.ordinate()[0];
    assert!(
        (delta1 - 1.0 / mu).abs() < 0.07,
        "delta(1) = {delta1} vs {}",
        1.0 / mu
    );
}

#[test]
fn dea_on_log_returns_of_geometric_walk() {
    // End-to-end ingest -> increments -> DEA: exponentiated Brownian levels,
    // log returns recover the Gaussian diffusion with delta = 0.5.
    let g = generate(&GeneratorSpec {
        model: GeneratorModel::Brownian,
        length: 1 << 14,
        seed: 18,
    })
    .unwrap();
    let levels: Vec<f64> = g
        .series
        .values()
        .iter()
        .map(|v| (0.05 * v).exp() * 100.0)
        .collect();
    let series = TimeSeries::new(levels, g.series.tick_lag.clone(), "geometric").unwrap();
    let inc = to_increments(&series, IncrementMode::LogReturn).unwrap();

    let grid = ScaleGrid::log_spaced(8, 1024, 10).unwrap();
    let ens = collect_fluctuations(&inc, &grid).unwrap();
    let q = QGrid::new(vec![0.5, 1.0, 2.0]).unwrap();
    let out = delta_spectrum(&ens, &q, &BinRule::FreedmanDiaconis, false)
        .unwrap()
        .value;
    for (i, &qv) in out.curve.abscissa().iter().enumerate() {
        let d = out.curve.ordinate()[i];
        assert!((d - 0.5).abs() < 0.05, "delta({qv}) = {d}");
    }
}

#[test]
fn spliced_fgn_shifts_the_rolling_trace() {
    // Estimates move from below 0.5 to above 0.5 across an H=0.3 || H=0.8
    // splice; the acceptance suite runs the 10-seed majority version.
    let half = 4096;
    let mut crossings_ok = 0;
    for seed in [21, 22, 23] {
        let mut values = fgn(0.3, half, seed).values().to_vec();
        values.extend_from_slice(fgn(0.8, half, seed + 100).values());
        let series = TimeSeries::new(values, multifract::TickLag::ticks(), "splice").unwrap();
        let trace = rolling_hurst(&series, 1024, 128, RollingEstimator::DfaH2).unwrap();

        let crossings: Vec<usize> = trace
            .windows(2)
            .filter_map(|w| {
                let (_, a) = w[0];
                let (end, b) = w[1];
                match (a, b) {
                    (Some(a), Some(b)) if (a - 0.5) * (b - 0.5) < 0.0 => Some(end),
                    _ => None,
                }
            })
            .collect();
        if crossings.len() == 1 && (crossings[0] as i64 - half as i64).unsigned_abs() <= 2048 {
            crossings_ok += 1;
        }
    }
    assert!(
        crossings_ok >= 2,
        "only {crossings_ok}/3 seeds show a clean crossing"
    );
}
