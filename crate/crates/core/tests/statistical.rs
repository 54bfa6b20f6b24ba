use std::f64::consts::{PI, TAU};

use roguewave_core::experiment::detrended_oscillation;
use roguewave_core::rng::substream;
use roguewave_core::stats::{ks_one_sample, pearson};
use roguewave_core::*;

const SEED: u64 = 42;

fn within_3se(res: &SweepResult, a: f64, b: f64) -> Vec<(f64, f64, f64, f64)> {
    let cfg = &res.config;
    let r = &res.per_rho[0];
    res.betas
        .iter()
        .zip(r.mean_curve.iter().zip(&r.std_error))
        .filter_map(|(&beta, (&m, &se))| {
            let expect = expected_intensity(beta, cfg.n_waves, a, b, cfg.e0);
            let slack = 3.0 * se + 1e-12 * cfg.n_waves as f64;
            ((m - expect).abs() > slack).then_some((beta, m, expect, se))
        })
        .collect()
}

#[test]
fn uniform_source_moments() {
    let mut rng = substream(SEED, 0, 0);
    let dist = PhaseDistribution::ContinuousUniform;
    let mut m = RunningMoments::new();
    for _ in 0..1_000_000 {
        m.push(dist.sample(&mut rng)).unwrap();
    }
    let var = m.variance().unwrap();
    assert!(m.mean.abs() < 0.01, "mean {}", m.mean);
    assert!((var / (PI * PI / 3.0) - 1.0).abs() < 0.01, "variance {var}");
    assert!(m.min >= -PI && m.max <= PI);
}

#[test]
fn pair_correlation_matches_rho() {
    let dist = PhaseDistribution::ContinuousUniform;
    for (i, rho) in [0.0, 0.25, 0.5, 0.7, 0.75, 1.0].into_iter().enumerate() {
        let spec = CorrelationSpec::new(rho).unwrap();
        let mut rng = substream(SEED, 10 + i, 0);
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for _ in 0..100_000 {
            let (p, q) = correlate_pair(dist.sample(&mut rng), dist.sample(&mut rng), &spec);
            x.push(p);
            y.push(q);
        }
        let r = pearson(&x, &y).unwrap();
        assert!((r - rho).abs() < 0.02, "rho {rho}: measured {r}");
    }
}

#[test]
fn pooled_variance_preserved_for_every_rho_and_law() {
    let laws = [
        PhaseDistribution::ContinuousUniform,
        PhaseDistribution::DiscreteQ { q: 3 },
        PhaseDistribution::DiscreteQ { q: 5 },
        PhaseDistribution::DiscreteQ { q: 9 },
    ];
    for (li, dist) in laws.iter().enumerate() {
        let (_, target) = theoretical_moments(dist);
        for (ri, rho) in [0.0, 0.25, 0.5, 0.75, 0.8, 1.0].into_iter().enumerate() {
            let mut m = RunningMoments::new();
            for r in 0..1000 {
                let mut rng = substream(SEED, 100 * li + ri, r);
                let v = make_correlated_phases(dist, rho, 1024, true, &mut rng).unwrap();
                for x in v.values {
                    m.push(x).unwrap();
                }
            }
            let ratio = m.variance().unwrap() / target;
            assert!((ratio - 1.0).abs() < 0.02, "{dist:?} rho {rho}: ratio {ratio}");
        }
    }
}

#[test]
fn single_pass_variance_agrees_with_two_pass() {
    let mut rng = substream(SEED, 1, 0);
    let dist = PhaseDistribution::ContinuousUniform;
    for exp in [-3i32, -1, 0, 1, 3] {
        let scale = 10f64.powi(exp);
        let offset = 1e3 * scale;
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| offset + scale * dist.sample(&mut rng))
            .collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let two_pass = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let one_pass = RunningMoments::from_slice(&xs).unwrap().variance().unwrap();
        assert!((one_pass - two_pass).abs() <= 1e-8 * two_pass, "scale {scale}: {one_pass} vs {two_pass}");
    }
}

#[test]
fn merge_of_random_split_equals_single_pass() {
    let mut rng = substream(SEED, 2, 0);
    let dist = PhaseDistribution::ContinuousUniform;
    let xs: Vec<f64> = (0..100_000).map(|_| 5.0 + dist.sample(&mut rng)).collect();
    let whole = RunningMoments::from_slice(&xs).unwrap();
    for cut in [1, 17, 50_000, 99_999] {
        let a = RunningMoments::from_slice(&xs[..cut]).unwrap();
        let b = RunningMoments::from_slice(&xs[cut..]).unwrap();
        let m = merge_moments(&a, &b);
        assert_eq!(m.count, whole.count);
        assert!((m.mean - whole.mean).abs() <= 1e-10 * whole.mean.abs());
        assert!((m.variance().unwrap() - whole.variance().unwrap()).abs() <= 1e-10 * whole.variance().unwrap());
        assert_eq!((m.max, m.min), (whole.max, whole.min));
    }
}

#[test]
fn direct_sum_matches_expanded_double_sum() {
    let dist = PhaseDistribution::ContinuousUniform;
    for (i, n) in [1usize, 2, 3, 8, 64, 256].into_iter().enumerate() {
        let mut rng = substream(SEED, 20 + i, 0);
        for _ in 0..100 {
            let phases: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
            let beta = dist.sample(&mut rng) + PI;
            let p = FieldParams::new(beta, n, 1.0).unwrap();
            let direct = field_intensity(&phases, &p).unwrap().intensity;
            let expanded = intensity_expanded(&phases, &p).unwrap();
            let scale = direct.max(envelope(beta, 1.0).powi(2));
            assert!((direct - expanded).abs() <= 1e-9 * scale, "n={n} beta={beta}: {direct} vs {expanded}");
        }
    }
}

#[test]
fn ensemble_mean_matches_analytic_at_every_grid_point() {
    let cfg = ExperimentConfig {
        n_waves: 64,
        n_runs: 10_000,
        n_beta: 24,
        rho_list: vec![0.0],
        master_seed: SEED,
        ..Default::default()
    };
    let res = run_sweep(&cfg).unwrap();
    let misses = within_3se(&res, 0.0, 0.0);
    assert!(misses.is_empty(), "points outside 3 SE: {misses:?}");
}

#[test]
fn ensemble_mean_at_beta_pi() {
    // a grid of 3 points on [0, 2π] puts the middle one at exactly π
    let cfg = ExperimentConfig {
        n_waves: 1024,
        n_runs: 10_000,
        n_beta: 3,
        rho_list: vec![0.0],
        master_seed: SEED,
        ..Default::default()
    };
    let res = run_sweep(&cfg).unwrap();
    assert_eq!(res.betas[1], PI);
    let r = &res.per_rho[0];
    let expect = 1024.0 * (2.0 / PI).powi(2);
    assert!((r.mean_curve[1] - expect).abs() <= 3.0 * r.std_error[1], "{} vs {expect}", r.mean_curve[1]);
}

#[test]
fn discrete_law_mean_follows_its_fourier_coefficient() {
    for q in [3u32, 5] {
        let dist = PhaseDistribution::DiscreteQ { q };
        let cfg = ExperimentConfig {
            n_waves: 64,
            n_runs: 5000,
            n_beta: 24,
            rho_list: vec![0.0],
            dist,
            master_seed: SEED,
            ..Default::default()
        };
        let (a, b) = fourier_coeffs(&dist);
        let misses = within_3se(&run_sweep(&cfg).unwrap(), a, b);
        assert!(misses.len() <= 1, "q={q}: {misses:?}");
    }
}

#[test]
fn uncorrelated_speckle_is_exponential() {
    let cfg = ExperimentConfig {
        n_waves: 1024,
        n_runs: 25_000,
        n_beta: 51,
        rho_list: vec![0.0],
        master_seed: SEED,
        ..Default::default()
    };
    let opts = SweepOptions {
        keep_samples: true,
        workers: None,
    };
    let res = run_sweep_with(&cfg, &opts).unwrap();
    let samples = res.per_rho[0].samples.as_ref().unwrap();
    let norms: Vec<f64> = res
        .betas
        .iter()
        .map(|&b| cfg.n_waves as f64 * envelope(b, cfg.e0).powi(2))
        .collect();
    let u: Vec<f64> = samples
        .chunks(cfg.n_beta)
        .flat_map(|row| {
            row.iter()
                .zip(&norms)
                .filter(|(_, &n)| n >= 0.01 * cfg.n_waves as f64)
                .map(|(&x, &n)| x / n)
                .collect::<Vec<_>>()
        })
        .collect();
    assert!(u.len() >= 1_000_000);
    let d = ks_one_sample(&u, |x| 1.0 - (-x).exp()).unwrap();
    assert!(d < 0.01, "KS distance {d}");
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let cfg = ExperimentConfig {
        n_waves: 128,
        n_runs: 300,
        n_beta: 40,
        master_seed: SEED,
        ..Default::default()
    };
    let run = |w| {
        run_sweep_with(&cfg, &SweepOptions { keep_samples: true, workers: Some(w) }).unwrap()
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
    for (i, r) in one.per_rho.iter().enumerate() {
        let direct = run_realization(&cfg, i, 123).unwrap();
        let kept = &r.samples.as_ref().unwrap()[123 * cfg.n_beta..124 * cfg.n_beta];
        assert_eq!(direct.as_slice(), kept);
    }
}

#[test]
fn unshuffled_pairs_oscillate_more_than_shuffled() {
    let base = ExperimentConfig {
        n_waves: 1024,
        n_runs: 500,
        n_beta: 300,
        rho_list: vec![1.0],
        master_seed: SEED,
        ..Default::default()
    };
    let osc = |shuffle| {
        let cfg = ExperimentConfig { shuffle, ..base.clone() };
        let res = run_sweep(&cfg).unwrap();
        detrended_oscillation(&res.per_rho[0].mean_curve, &res.betas, cfg.n_waves, cfg.e0)
    };
    let (shuffled, plain) = (osc(true), osc(false));
    assert!(plain > shuffled, "unshuffled {plain} vs shuffled {shuffled}");
}

#[test]
fn pooled_mean_is_stable_under_halving_runs() {
    let cfg = ExperimentConfig {
        n_waves: 256,
        n_runs: 2000,
        n_beta: 100,
        rho_list: vec![0.0],
        master_seed: SEED,
        ..Default::default()
    };
    let full = run_sweep(&cfg).unwrap().per_rho[0].pooled;
    let half_cfg = ExperimentConfig { n_runs: 1000, master_seed: SEED + 1, ..cfg };
    let half = run_sweep(&half_cfg).unwrap().per_rho[0].pooled;
    // pooled samples share realizations across β, so the standard error
    // is taken over realizations rather than over every pooled sample
    let se = |m: &RunningMoments, runs: usize| m.std_dev().unwrap() / (runs as f64).sqrt();
    let combined = (se(&full, 2000).powi(2) + se(&half, 1000).powi(2)).sqrt();
    assert!((full.mean - half.mean).abs() < 3.0 * combined, "{} vs {}", full.mean, half.mean);
}

#[test]
fn beta_grid_is_inclusive() {
    let g = beta_grid(300).unwrap();
    assert_eq!(g.values.len(), 300);
    assert_eq!(g.values[0], 0.0);
    assert_eq!(g.values[299], TAU);
    assert!(g.values.windows(2).all(|w| w[1] > w[0]));
}
