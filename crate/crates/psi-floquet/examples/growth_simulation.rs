//! Integrate h' = L h from seeded random data and fit the growth rate.
//!
//! ```text
//! cargo run --release --example growth_simulation -- 7
//! ```

use psi_floquet::resonance::solve_at;
use psi_floquet::spectral::{growth_sim, unstable_pair};
use psi_floquet::PrimaryWave;

fn main() -> psi_floquet::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let pw = PrimaryWave::new(1, 1, 1.0, 0.0)?;
    let (m, dt) = (8, 0.02);
    for (y, eps) in [(1.0, 4e-2), (3.0, 2e-2), (1.0, 0.0)] {
        let mu = solve_at(&pw, y)?.mu;
        let target = unstable_pair(&pw, &mu, eps, m)?.max_re;
        let t_end = if target > 0.0 { 20.0 / target } else { 200.0 };
        let fit = growth_sim(&pw, &mu, eps, m, t_end, dt, seed)?;
        println!(
            "y = {y}, eps = {eps}: rate {:.6e}, max_re {target:.6e}, window [{:.0}, {:.0}], rms {:.1e}{}",
            fit.rate,
            fit.fit_window.0,
            fit.fit_window.1,
            fit.residual_rms,
            if fit.degenerate { " (degenerate)" } else { "" }
        );
    }
    Ok(())
}
