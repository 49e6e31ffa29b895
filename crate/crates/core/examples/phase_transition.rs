//! A small phase-transition grid written as a `.dat` mesh.
//!
//! cargo run --release --example phase_transition [out.dat]

use harmonic_lift::experiments::{emit_dat, format_dat, phase_transition, PhaseGrid};
use harmonic_lift::lifting::Structure;

fn main() -> harmonic_lift::Result<()> {
    let mut grid = PhaseGrid::desk_default(Structure::Hankel, 30);
    grid.sample_counts = vec![10, 20, 30, 40];
    grid.sparsity_levels = vec![1, 3, 5, 7];
    grid.trials = 5;

    let surface = phase_transition(&grid)?;
    match std::env::args().nth(1) {
        Some(path) => {
            emit_dat(&surface, &grid, path.as_ref())?;
            println!("wrote {path}");
        }
        None => print!("{}", format_dat(&surface)),
    }
    Ok(())
}
