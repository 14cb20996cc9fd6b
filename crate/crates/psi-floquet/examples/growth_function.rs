//! The reduced 2x2 matrix and the growth function e(mu) along the upper
//! branch, with three independent routes to the same number.
//!
//! ```text
//! cargo run --example growth_function
//! ```

use psi_floquet::reduced::{
    b_coeffs, beta_gamma_combos, beta_gamma_combos_residue, e_from_physics, e_mu, iota0, lambda_pm, large_y_limit,
    small_tau_slope,
};
use psi_floquet::resonance::{gap_alpha, mu_of_tau, solve_at};
use psi_floquet::PrimaryWave;

fn main() -> psi_floquet::Result<()> {
    let pw = PrimaryWave::new(1, 1, 1.0, 0.0)?;
    println!("{:>8} {:>14} {:>14} {:>14} {:>12}", "y", "e", "-b1*b0", "residue route", "identity");
    for y in [0.1, 0.3, 1.0, 3.0, 10.0, 100.0] {
        let mu = solve_at(&pw, y)?.mu;
        let e = e_mu(&pw, &mu)?;
        let (b1, b0) = b_coeffs(&pw, &mu)?;
        let residue = if gap_alpha(&pw, &mu).near_exceptional {
            "flagged".to_string()
        } else {
            let (c1, c0) = beta_gamma_combos_residue(&pw, &mu)?;
            let (i11, i00) = iota0(&pw, &mu);
            format!("{:.10}", -(c1 / i00) * (c0 / i11))
        };
        let di = e_from_physics(&pw, &mu)?.map_or("n/a".into(), |d| format!("{:.3e}", (d - e).abs()));
        println!("{y:>8} {e:>14.10} {:>14.10} {residue:>14} {di:>12}", -b1 * b0);
        debug_assert!(beta_gamma_combos(&pw, &mu).is_ok());
    }

    let tau = 1e-3;
    let e = e_mu(&pw, &mu_of_tau(&pw, tau)?)?;
    println!("e/tau at tau = {tau}: {:.6} (limit {:.6})", e / tau, small_tau_slope(&pw));
    let e = e_mu(&pw, &solve_at(&pw, 1e4)?.mu)?;
    println!("e at y = 1e4: {e:.6} (limit {:.6})", large_y_limit(&pw));

    let p = lambda_pm(&pw, &solve_at(&pw, 1.0)?.mu, 1e-2)?;
    println!("eps = 1e-2, y = 1: lambda+ = {:.6e}, stable {}", p.lambda_plus_pred, p.stable_flag);
    Ok(())
}
