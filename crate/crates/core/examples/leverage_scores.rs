//! Leverage scores of a lifted mixture and the diagnostics built on them.
//!
//! cargo run --example leverage_scores

use harmonic_lift::lifting::hankel_basis;
use harmonic_lift::scores::{
    a_norm_2, a_norm_inf, corollary_beta, incoherence_check, leverage_scores, lifting_coefficient, probability_floor,
    subspace_of, weighted_leverage_scores, DEFAULT_RANK_TOL,
};
use harmonic_lift::signal::{rng_from_seed, synthesize, Mixture};
use harmonic_lift::weights::WeightPair;

fn main() -> harmonic_lift::Result<()> {
    let basis = hankel_basis(59, 30)?;
    let y = synthesize(&Mixture::random(59, 3, 0.0, &mut rng_from_seed(5))?);
    let sub = subspace_of(&basis, &y, DEFAULT_RANK_TOL)?;
    let mu = leverage_scores(&basis, &sub)?;
    let max = mu.values.iter().cloned().fold(0.0, f64::max);
    println!("rank {}, max score {max:.6}, sum {:.6}", sub.rank(), mu.sum());

    let r_l = lifting_coefficient(&basis);
    let floor = probability_floor(&mu, r_l, 59, sub.rank(), 3.0)?;
    println!("R_L = {r_l:.6}; smallest sampling floor {:.6}", floor.iter().cloned().fold(1.0, f64::min));

    let identity = WeightPair::identity(basis.dims());
    let check = incoherence_check(&basis, &identity, &sub)?;
    println!("incoherence: {:.6} vs {:.6} -> {}", check.lhs, check.rhs, check.pass);
    println!("corollary beta {:.6}", corollary_beta(59, &sub));

    let f0 = &sub.left * sub.right.adjoint();
    println!(
        "F0 norms: inf {:.6}, squared 2 {:.6}",
        a_norm_inf(&basis, &mu, &f0)?,
        a_norm_2(&basis, &mu, &f0)?.powi(2)
    );

    let taper: Vec<f64> = (0..30).map(|i| 1.0 + 0.5 * (i as f64 / 29.0)).collect();
    let weights = WeightPair::diagonal(taper.clone(), taper)?;
    let weighted = weighted_leverage_scores(&basis, &weights, &sub.reweighted(&weights)?)?;
    println!("tapered-weight score sum {:.6}", weighted.sum());
    for line in mu.to_text().lines().take(6) {
        println!("{line}");
    }
    Ok(())
}
