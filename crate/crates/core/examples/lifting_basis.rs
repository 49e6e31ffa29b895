//! Build Hankel and double-Hankel lifts, check the basis conditions and the
//! round trip through the back projection.
//!
//! cargo run --example lifting_basis

use harmonic_lift::lifting::{double_hankel_basis, hankel_basis, validate_basis};
use harmonic_lift::C64;

fn main() -> harmonic_lift::Result<()> {
    let x: Vec<C64> = (1..=3).map(|v| C64::new(v as f64, 0.0)).collect();
    println!("H_2([1,2,3]) = {}", hankel_basis(3, 2)?.lift(&x)?);
    println!("double-Hankel = {}", double_hankel_basis(3, 2)?.lift(&x)?);

    for basis in [hankel_basis(59, 30)?, double_hankel_basis(59, 40)?] {
        let (d1, d2) = basis.dims();
        println!("{d1}x{d2} lift, support counts {:?}..", &basis.support_counts()[..5]);
        print!("{}", validate_basis(&basis));

        let x: Vec<C64> = (0..basis.len()).map(|i| C64::new((i as f64).sin(), (i as f64).cos())).collect();
        let back = basis.adjoint(&basis.lift(&x)?)?;
        let err = x.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        println!("round-trip error {err:.3e}");
    }
    Ok(())
}
