//! Draw a random exponential mixture, add bounded noise and observe a subset.
//!
//! cargo run --example synthesize_and_sample

use harmonic_lift::signal::{
    add_noise, project, rng_from_seed, sample_bernoulli, sample_uniform_m, synthesize, Mixture, NoiseSpec,
};

fn main() -> harmonic_lift::Result<()> {
    let n = 59;
    let mut rng = rng_from_seed(11);
    let mixture = Mixture::random(n, 3, 0.05, &mut rng)?;
    print!("mixture record:\n{}", mixture.to_text());

    let y = synthesize(&mixture);
    let noisy = add_noise(
        &y,
        &NoiseSpec {
            amplitude_bound: 1e-2,
            seed: 12,
        },
    )?;
    let worst = y.iter().zip(&noisy).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("max noise amplitude {worst:.6}");

    let omega = sample_uniform_m(n, 20, 13)?;
    let observed = project(&noisy, &omega)?;
    println!("uniform draw, {} samples: {:?}", omega.len(), omega.indices());
    println!("first observed value {:.6}", observed[0]);

    let probabilities: Vec<f64> = (0..n).map(|i| if i < 10 || i >= n - 10 { 0.9 } else { 0.3 }).collect();
    let bern = sample_bernoulli(&probabilities, 14)?;
    println!("bernoulli draw kept {} of {n}", bern.len());
    Ok(())
}
