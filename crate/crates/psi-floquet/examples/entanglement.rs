//! The eight entanglement coefficients: closed form against brute-force band
//! evaluation, at a few resonant points. Coefficients of the first jet
//! scale with the wave amplitude, so eps is taken nonzero here.
//!
//! ```text
//! cargo run --example entanglement
//! ```

use psi_floquet::entanglement::{closed_form, KeyCoefficient};
use psi_floquet::resonance::solve_at;
use psi_floquet::PrimaryWave;

fn main() -> psi_floquet::Result<()> {
    let pw = PrimaryWave::new(1, 2, 1.0, 0.05)?;
    for y in [0.4, -1.3, 6.0] {
        let mu = solve_at(&pw, y)?.mu;
        println!("mu = ({:.6}, {:.6})", mu.mu1, mu.mu2);
        for which in KeyCoefficient::ALL {
            let cf = closed_form(&pw, &mu, which)?;
            let bf = which.bruteforce(&pw, &mu)?;
            let err = (cf - bf).norm() / cf.norm().max(bf.norm()).max(f64::MIN_POSITIVE);
            println!("  {:<16} {:>22.14e} {:>22.14e}i {err:>9.1e}", format!("{which:?}"), cf.re, cf.im);
        }
    }
    Ok(())
}
