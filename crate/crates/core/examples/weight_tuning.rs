//! Tune diagonal weights on a pilot estimate and run the two-stage pipeline.
//!
//! cargo run --release --example weight_tuning

use harmonic_lift::lifting::hankel_basis;
use harmonic_lift::scores::subspace_of;
use harmonic_lift::signal::{project, rng_from_seed, sample_uniform_m, synthesize, Mixture};
use harmonic_lift::solver::{relative_error, Mode, SolverConfig};
use harmonic_lift::weights::{tune_diagonal_weights, two_stage_pipeline, TuneConfig};

fn main() -> harmonic_lift::Result<()> {
    let basis = hankel_basis(59, 30)?;
    let y = synthesize(&Mixture::random(59, 3, 0.0, &mut rng_from_seed(21))?);
    let omega = sample_uniform_m(59, 25, 22)?;
    let tune = TuneConfig::default();

    let oracle = subspace_of(&basis, &y, tune.pilot_rank_tol)?;
    let outcome = tune_diagonal_weights(&basis, &omega, &oracle, &tune)?;
    println!(
        "oracle subspace: objective {:.6} -> {:.6} in {} sweeps",
        outcome.baseline,
        outcome.objective,
        outcome.history.len()
    );
    if let Some((l, _)) = outcome.weights.diagonals() {
        println!("left weights {:.3?}", &l[..6]);
    }

    let out = two_stage_pipeline(
        &basis,
        &omega,
        &project(&y, &omega)?,
        Mode::Noiseless,
        &SolverConfig::default(),
        &tune,
    )?;
    println!(
        "stage one rel error {:.3e}; returned {:.3e}; weighted estimate kept: {}",
        relative_error(&y, &out.stage_one.estimate)?,
        relative_error(&y, &out.result.estimate)?,
        out.stage_two_kept
    );
    Ok(())
}
