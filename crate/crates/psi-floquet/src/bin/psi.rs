use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use psi_floquet::cli::{self, CmdOutput, Format, GrowthTarget, RunConfig, EXIT_USAGE};
use psi_floquet::{Branch, FloquetPoint};

#[derive(Parser)]
#[command(name = "psi", about = "Subharmonic instability of internal gravity waves")]
#[command(allow_negative_numbers = true)]
struct Args {
    /// Wave vector integers m n.
    #[arg(long, global = true, num_args = 2, value_names = ["M_HAT", "N_HAT"], allow_negative_numbers = true)]
    k: Option<Vec<i64>>,
    /// Buoyancy frequency.
    #[arg(long = "N", global = true)]
    buoyancy: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Harmonic truncation.
    #[arg(long = "M", global = true)]
    truncation: Option<usize>,
    #[arg(long, global = true)]
    format: Option<FormatArg>,
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "gap-threshold", global = true)]
    gap_threshold: Option<f64>,
    /// `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Trace a branch of the resonant curve.
    Resonance {
        #[arg(long)]
        branch: BranchArg,
        #[arg(long = "y-range", num_args = 3, value_names = ["A", "B", "S"], allow_negative_numbers = true, required = true)]
        y_range: Vec<String>,
    },
    /// Predicted and numerical growth at one Floquet parameter.
    Growth {
        #[arg(long)]
        branch: Option<BranchArg>,
        #[arg(long, allow_negative_numbers = true, conflicts_with = "mu")]
        y: Option<f64>,
        /// Explicit Floquet parameter, resonant or not.
        #[arg(long, num_args = 2, value_names = ["MU1", "MU2"], allow_negative_numbers = true)]
        mu: Option<Vec<f64>>,
    },
    /// Growth function against the spectral solver over many y.
    Scan {
        #[arg(long)]
        branch: Option<BranchArg>,
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        y: Vec<f64>,
        #[arg(long = "y-range", num_args = 3, value_names = ["A", "B", "S"], allow_negative_numbers = true)]
        y_range: Option<Vec<String>>,
    },
    /// Run every internal cross-check.
    Validate,
}

fn config(args: &Args) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        cfg.apply_file(&text)?;
    }
    if let Some(k) = &args.k {
        cfg.m_hat = k[0];
        cfg.n_hat = k[1];
    }
    if let Some(v) = args.buoyancy {
        cfg.buoyancy_n = v;
    }
    if let Some(v) = args.eps {
        cfg.eps = v;
    }
    if let Some(v) = args.truncation {
        cfg.m = v;
    }
    if let Some(f) = args.format {
        cfg.format = Some(match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        });
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.gap_threshold {
        cfg.set("gap_threshold", &v.to_string())?;
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    Ok(cfg)
}

fn parse_range(r: &[String]) -> Result<(f64, f64, usize), String> {
    let f = |s: &String| s.parse::<f64>().map_err(|_| format!("bad number '{s}'"));
    let s = r[2].parse::<usize>().map_err(|_| format!("bad sample count '{}'", r[2]))?;
    Ok((f(&r[0])?, f(&r[1])?, s))
}

fn branch_for(explicit: Option<BranchArg>, y: f64) -> Result<Branch, String> {
    match explicit {
        Some(b) => Ok(b.into()),
        None => Branch::of_y(y).ok_or_else(|| format!("cannot infer a branch from y = {y}")),
    }
}

fn dispatch(args: &Args) -> Result<(RunConfig, CmdOutput), String> {
    let cfg = config(args)?;
    let out = match &args.cmd {
        Cmd::Resonance { branch, y_range } => {
            let (a, b, s) = parse_range(y_range)?;
            cli::cmd_resonance(&cfg, (*branch).into(), a, b, s)
        }
        Cmd::Growth { branch, y, mu } => {
            let target = match (y, mu) {
                (Some(y), None) => GrowthTarget::OnBranch { y: *y, branch: branch_for(*branch, *y)? },
                (None, Some(m)) => GrowthTarget::Explicit(FloquetPoint::new(m[0], m[1])),
                _ => return Err("growth needs --y or --mu".into()),
            };
            cli::cmd_growth(&cfg, target)
        }
        Cmd::Scan { branch, y, y_range } => {
            let mut ys = y.clone();
            if let Some(r) = y_range {
                let (a, b, s) = parse_range(r)?;
                ys.extend(cli::linspace(a, b, s));
            }
            let first = *ys.first().ok_or("scan needs --y or --y-range")?;
            cli::cmd_scan(&cfg, branch_for(*branch, first)?, &ys)
        }
        Cmd::Validate => cli::cmd_validate(&cfg),
    };
    Ok((cfg, out))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (cfg, res) = match dispatch(&args) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    eprint!("{}", res.stderr);
    if !res.stdout.is_empty() {
        let written = match &cfg.out {
            Some(path) => std::fs::write(path, &res.stdout),
            None => std::io::stdout().write_all(res.stdout.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    ExitCode::from(res.code as u8)
}
