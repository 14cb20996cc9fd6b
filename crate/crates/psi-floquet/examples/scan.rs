//! Drive the scan command from a config string, as the `psi` binary would
//! from a file.
//!
//! ```text
//! cargo run --release --example scan
//! ```

use psi_floquet::cli::{cmd_scan, linspace, RunConfig};
use psi_floquet::Branch;

fn main() {
    let mut cfg = RunConfig::default();
    cfg.apply_file("# upper branch of k = (1, 1)\nk = 1 1\neps = 0.01\nM = 32\n").expect("valid config");
    let mut ys = linspace(0.2, 5.0, 13);
    ys.push(1e3);
    let out = cmd_scan(&cfg, Branch::Plus, &ys);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
