//! Recover a mixture from 40 of 59 samples, noiseless and noisy.
//!
//! cargo run --release --example complete_signal

use harmonic_lift::lifting::hankel_basis;
use harmonic_lift::signal::{add_noise, project, rng_from_seed, sample_uniform_m, synthesize, Mixture, NoiseSpec};
use harmonic_lift::solver::{complete, lifted_error, relative_error, Mode, SolverConfig};
use harmonic_lift::weights::WeightPair;

fn main() -> harmonic_lift::Result<()> {
    let basis = hankel_basis(59, 30)?;
    let weights = WeightPair::identity(basis.dims());
    let y = synthesize(&Mixture::random(59, 2, 0.0, &mut rng_from_seed(7))?);
    let omega = sample_uniform_m(59, 40, 8)?;
    let config = SolverConfig::default();

    let res = complete(&basis, &weights, &omega, &project(&y, &omega)?, Mode::Noiseless, &config)?;
    println!(
        "noiseless: rel error {:.3e} after {} iterations (converged {})",
        relative_error(&y, &res.estimate)?,
        res.iterations,
        res.converged
    );

    for eta in [1e-3, 1e-2] {
        let noisy = add_noise(&y, &NoiseSpec { amplitude_bound: eta, seed: 9 })?;
        let res = complete(&basis, &weights, &omega, &project(&noisy, &omega)?, Mode::Noisy { eta }, &config)?;
        println!(
            "eta {eta:.0e}: lifted error {:.6}, rel error {:.3e}",
            lifted_error(&basis, &weights, &res.estimate, &y)?,
            relative_error(&y, &res.estimate)?
        );
    }
    Ok(())
}
