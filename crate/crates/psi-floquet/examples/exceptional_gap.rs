//! Spectral gap around the double eigenvalue along both branches. Samples
//! below the threshold are flagged and refused by the eigen-pipeline.
//!
//! ```text
//! cargo run --example exceptional_gap
//! ```

use psi_floquet::resonance::{gap_alpha, solve_at};
use psi_floquet::spectral::unstable_pair;
use psi_floquet::PrimaryWave;

fn main() -> psi_floquet::Result<()> {
    let pw = PrimaryWave::new(2, 2, 1.0, 0.0)?;
    println!("{:>8} {:>12} {:>12} {:>5} {:>5} {:>8}", "y", "alpha+", "alpha-", "l+", "l-", "flag");
    for y in [-20.0, -4.5, -1.0, -0.05, 0.05, 0.5, 2.0, 20.0] {
        let p = solve_at(&pw, y)?;
        let g = gap_alpha(&pw, &p.mu);
        println!(
            "{y:>8} {:>12.4e} {:>12.4e} {:>5} {:>5} {:>8}",
            g.alpha_plus, g.alpha_minus, g.worst_ell_plus, g.worst_ell_minus, g.near_exceptional
        );
        if g.near_exceptional {
            let refused = unstable_pair(&pw, &p.mu, 1e-2, 8).unwrap_err();
            println!("         refused: {refused}");
        }
    }
    println!("l0 from the tail bound: {}", gap_alpha(&pw, &solve_at(&pw, 1.0)?.mu).ell_cutoff);
    Ok(())
}
