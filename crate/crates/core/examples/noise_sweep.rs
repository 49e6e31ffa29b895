//! Lifted-domain error against the noise bound, with its log-log slope.
//!
//! cargo run --release --example noise_sweep

use harmonic_lift::experiments::{noise_sweep, NoiseSweepSpec};
use harmonic_lift::lifting::Structure;
use harmonic_lift::solver::SolverConfig;

fn main() -> harmonic_lift::Result<()> {
    let table = noise_sweep(&NoiseSweepSpec {
        n: 59,
        structure: Structure::Hankel,
        d: 30,
        k: 2,
        m: 40,
        etas: vec![0.0, 1e-4, 1e-3, 1e-2],
        trials: 5,
        base_seed: 1,
        min_separation: 0.0,
        solver: SolverConfig {
            rel_tol: 1e-9,
            max_iters: 5000,
            ..SolverConfig::default()
        },
    })?;
    print!("{}", table.to_text());
    Ok(())
}
