//! Mode frequencies and eigenvectors of the flat fluid.
//!
//! ```text
//! cargo run --example dispersion
//! ```

use psi_floquet::wavefield::{eigvec_coeff, omega, symplectic_pair, w_freq};
use psi_floquet::{FloquetPoint, Mode, PrimaryWave, Sign};

fn main() -> psi_floquet::Result<()> {
    let pw = PrimaryWave::new(1, 1, 1.0, 0.0)?;
    let mu = FloquetPoint::new(0.2, 1.0);
    println!("Omega(k) = {:.12}", omega(pw.k(), pw.buoyancy_n));

    println!("{:>3} {:>2} {:>16} {:>30}", "n", "s", "w", "eigenvector (b, omega)");
    for n in -2..=2 {
        for s in Sign::BOTH {
            let mode = Mode::new(n, s);
            let f = eigvec_coeff(&pw, &mu, mode);
            println!("{n:>3} {:>2} {:>16.12} {:>14.6} {:>14.6}", s.value(), w_freq(&pw, &mu, mode), f[0], f[1]);
        }
    }

    // the pairing is diagonal in the mode basis
    let a = Mode::new(0, Sign::Plus);
    let b = Mode::new(-1, Sign::Minus);
    println!("<J f0+, f0+>   = {:.6}", symplectic_pair(&pw, &mu, a, a));
    println!("<J f0+, f-1->  = {:.2e}", symplectic_pair(&pw, &mu, a, b).norm());
    Ok(())
}
