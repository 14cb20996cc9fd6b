//! Headline check: the numerically computed unstable pair against the
//! reduced-matrix prediction, with truncation convergence and the
//! behaviour of the remainder under eps-halving.
//!
//! ```text
//! cargo run --release --example unstable_pair
//! ```

use psi_floquet::resonance::solve_at;
use psi_floquet::spectral::{convergence_study, unstable_pair};
use psi_floquet::PrimaryWave;

fn main() -> psi_floquet::Result<()> {
    let pw = PrimaryWave::new(1, 1, 1.0, 0.0)?;
    println!("{:>6} {:>8} {:>14} {:>14} {:>11} {:>8} {:>10}", "y", "eps", "max_re", "eps*sqrt(e)", "residual", "ratio", "conv_gap");
    for y in [0.3, 1.0, 3.0, 30.0] {
        let mu = solve_at(&pw, y)?.mu;
        let mut prev: Option<f64> = None;
        for eps in [4e-2, 2e-2, 1e-2, 5e-3] {
            let r = unstable_pair(&pw, &mu, eps, 32)?;
            let ratio = prev.map_or(String::new(), |p| format!("{:.2}", p / r.residual));
            println!(
                "{y:>6} {eps:>8} {:>14.8e} {:>14.8e} {:>11.3e} {ratio:>8} {:>10.1e}",
                r.max_re, r.pred_max_re, r.residual, r.conv_gap
            );
            prev = Some(r.residual);
        }
    }

    let mu = solve_at(&pw, 1.0)?.mu;
    for row in convergence_study(&pw, &mu, 1e-2, &[2, 4, 8, 16, 32])? {
        println!("M = {:>2}: max_re {:.15e}, delta {}", row.m, row.max_re, row.delta.map_or("-".into(), |d| format!("{d:.1e}")));
    }
    Ok(())
}
