use harmonic_lift::lifting::hankel_basis;
use harmonic_lift::scores::{leverage_scores, subspace_of, DEFAULT_RANK_TOL};
use harmonic_lift::signal::{project, rng_from_seed, sample_uniform_m, synthesize, Mixture, SampleSet};
use harmonic_lift::solver::{complete, relative_error, Mode, SolverConfig};
use harmonic_lift::weights::{tune_diagonal_weights, two_stage_pipeline, TuneConfig, WeightPair};

#[test]
fn oracle_tuning_beats_identity_on_most_instances() {
    let basis = hankel_basis(59, 30).unwrap();
    let config = TuneConfig::default();
    let mut improved = 0;
    for seed in 0..50u64 {
        let x = synthesize(&Mixture::random(59, 3, 0.0, &mut rng_from_seed(seed)).unwrap());
        let omega = sample_uniform_m(59, 25, seed + 1000).unwrap();
        let pilot = subspace_of(&basis, &x, DEFAULT_RANK_TOL).unwrap();
        let out = tune_diagonal_weights(&basis, &omega, &pilot, &config).unwrap();

        let mu = leverage_scores(&basis, &pilot).unwrap();
        let plain: f64 = omega.missing().iter().map(|&n| mu.values[n]).sum();
        assert!((out.baseline - plain).abs() <= 1e-9 * plain);
        assert!(out.objective <= plain + 1e-9);
        assert!(out.history.windows(2).all(|h| h[1] <= h[0]));
        if out.objective < plain {
            improved += 1;
            let (wl, wr) = out.weights.squared_diagonals().unwrap();
            for w in [wl, wr] {
                assert!(w.iter().all(|&v| v >= config.epsilon * (1.0 - 1e-12)));
                assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            assert!((out.weights.left().norm() - 1.0).abs() < 1e-12);
        }
    }
    assert!(improved >= 40, "improved on {improved}/50");
}

#[test]
fn scaled_identity_solves_like_identity() {
    let basis = hankel_basis(59, 30).unwrap();
    let y = synthesize(&Mixture::random(59, 2, 0.0, &mut rng_from_seed(3)).unwrap());
    let omega = sample_uniform_m(59, 40, 4).unwrap();
    let observed = project(&y, &omega).unwrap();
    let config = SolverConfig::default();
    let plain = complete(&basis, &WeightPair::identity((30, 30)), &omega, &observed, Mode::Noiseless, &config).unwrap();
    let scaled = WeightPair::diagonal(vec![0.25; 30], vec![3.0; 30]).unwrap();
    let other = complete(&basis, &scaled, &omega, &observed, Mode::Noiseless, &config).unwrap();
    assert!(relative_error(&plain.estimate, &other.estimate).unwrap() < 1e-5);
    assert!(relative_error(&y, &plain.estimate).unwrap() < 1e-3);
}

#[test]
fn pipeline_with_full_observation_returns_data() {
    let basis = hankel_basis(59, 30).unwrap();
    let y = synthesize(&Mixture::random(59, 4, 0.0, &mut rng_from_seed(5)).unwrap());
    let omega = SampleSet::full(59);
    let out = two_stage_pipeline(
        &basis,
        &omega,
        &y,
        Mode::Noiseless,
        &SolverConfig::default(),
        &TuneConfig::default(),
    )
    .unwrap();
    assert_eq!(out.result.estimate, y);
    assert_eq!(out.stage_one.estimate, y);
    assert!(!out.stage_two_kept);
    assert_eq!(out.weights, WeightPair::identity((30, 30)));
}

#[test]
fn pipeline_does_not_degrade_exact_recoveries() {
    let basis = hankel_basis(59, 30).unwrap();
    let solver = SolverConfig::default();
    let mut exact = 0;
    for seed in 0..8u64 {
        let y = synthesize(&Mixture::random(59, 2, 0.0, &mut rng_from_seed(100 + seed)).unwrap());
        let omega = sample_uniform_m(59, 40, 200 + seed).unwrap();
        let observed = project(&y, &omega).unwrap();
        let out = two_stage_pipeline(&basis, &omega, &observed, Mode::Noiseless, &solver, &TuneConfig::default()).unwrap();
        let e1 = relative_error(&y, &out.stage_one.estimate).unwrap();
        let e2 = relative_error(&y, &out.result.estimate).unwrap();
        if e1 <= solver.success_threshold {
            exact += 1;
            assert!(e2 <= e1 + 1e-9, "seed {seed}: stage two {e2} vs stage one {e1}");
        }
        for &i in omega.indices() {
            assert_eq!(out.result.estimate[i], y[i]);
        }
    }
    assert!(exact >= 6);
}
