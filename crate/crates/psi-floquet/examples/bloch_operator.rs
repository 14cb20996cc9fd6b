//! Assemble a truncated Bloch operator, inspect its band structure and dump
//! it as CSV.
//!
//! ```text
//! cargo run --example bloch_operator > operator.csv
//! ```

use psi_floquet::bloch::{assemble, band_project};
use psi_floquet::resonance::solve_at;
use psi_floquet::spectral::{count_off_axis, eig_all, mirror_defect, AXIS_TOL};
use psi_floquet::PrimaryWave;

fn main() -> psi_floquet::Result<()> {
    let pw = PrimaryWave::new(1, 1, 1.0, 0.02)?;
    let mu = solve_at(&pw, 1.0)?.mu;
    let t = assemble(&pw, &mu, 4)?;

    eprintln!("dimension {}, bands {:?}", t.dim(), t.occupied_bands());
    eprintln!("max |Re| = {:e}, max |entry| = {:.4}", t.max_abs_real(), t.max_abs());
    for b in -1..=1 {
        eprintln!("band {b:+}: max |entry| = {:.6}", band_project(&t, b)?.max_abs());
    }

    let eigs = eig_all(&t)?;
    eprintln!("off-axis eigenvalues: {}, mirror defect {:e}", count_off_axis(&eigs, AXIS_TOL), mirror_defect(&eigs));
    print!("{}", t.to_csv());
    Ok(())
}
