//! Trace both branches of the resonant curve and compare with the
//! asymptotic laws. Prints CSV `branch,y,x,residual` on stdout.
//!
//! ```text
//! cargo run --example resonant_curve -- 1 3 > curve.csv
//! ```

use psi_floquet::resonance::{
    kink_slope, large_y_intercept, large_y_slope, residual_f, small_y_coefficient, solve_branch,
};
use psi_floquet::{Branch, Error, PrimaryWave};

fn main() -> psi_floquet::Result<()> {
    let args: Vec<i64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (m, n) = match args[..] {
        [m, n] => (m, n),
        _ => (1, 3),
    };
    let pw = PrimaryWave::new(m, n, 1.0, 0.0)?;

    println!("branch,y,x,residual");
    for branch in [Branch::Plus, Branch::Minus] {
        let s = branch.sign();
        for i in 0..=240 {
            let y = s * 0.01 * 1e3f64.powf(i as f64 / 240.0);
            match solve_branch(&pw, y, branch) {
                Ok(p) => println!("{branch:?},{y:.16e},{:.16e},{:.3e}", p.mu.mu1, residual_f(&pw, p.mu.mu1, y)?.abs()),
                Err(Error::NoRoot { .. }) => eprintln!("gap in the curve at y = {y}"),
                Err(e) => return Err(e),
            }
        }
    }

    let y = 0.025;
    let x = solve_branch(&pw, y, Branch::Plus)?.mu.mu1;
    eprintln!("x/y^2 at y = {y}: {:.6} (limit {:.6})", x / (y * y), small_y_coefficient(&pw));
    let y = 1e3;
    let x = solve_branch(&pw, y, Branch::Plus)?.mu.mu1;
    eprintln!(
        "asymptote at y = {y}: slope {:.6}, intercept {:.6} (x - slope*y = {:.6})",
        large_y_slope(&pw),
        large_y_intercept(&pw),
        x - large_y_slope(&pw) * y
    );
    if let Ok(a) = kink_slope(&pw) {
        let dy = 1e-4;
        let x = solve_branch(&pw, -(n as f64) + dy, Branch::Minus)?.mu.mu1;
        eprintln!("kink at y = -{n}: slope {:.6} (a* = {a:.6})", (x + m as f64) / dy);
    }
    Ok(())
}
