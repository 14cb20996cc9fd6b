//! Configuration and the subcommands behind the `psi` binary.
//!
//! Commands are plain functions returning a [`CmdOutput`] so they can be
//! driven from tests without a process boundary. The binary only parses
//! flags, calls into here and writes the result.
//!
//! Config files hold `key = value` lines; `#` starts a comment. Recognised
//! keys: `k` (two integers), `N`, `eps`, `M`, `format`, `seed`,
//! `gap_threshold`, `out`. Flags override file values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::json;

use crate::bloch::{assemble_with, Jets};
use crate::entanglement::{closed_form, KeyCoefficient};
use crate::error::Error;
use crate::reduced::{
    b_coeffs, beta_gamma_combos, beta_gamma_combos_residue_with, e_from_physics, e_mu, iota0, lambda_pm,
    lambda_pm_unchecked, large_y_limit, small_tau_slope,
};
use crate::resonance::{gap_alpha_with, residual_f, solve_at, solve_branch, Branch, GAP_THRESHOLD, RESIDUAL_TOL};
use crate::spectral::{eig_all, mirror_defect, unstable_pair_with, PairOptions, EPS_MAX};
use crate::wavefield::{FloquetPoint, PrimaryWave};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_NEAR_EXCEPTIONAL: i32 = 3;
/// Validation exit codes start here: `3 + failures`, capped at 125.
pub const EXIT_VALIDATION_BASE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (csv|json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m_hat: i64,
    pub n_hat: i64,
    pub buoyancy_n: f64,
    pub eps: f64,
    pub m: usize,
    pub tolerances: BTreeMap<String, f64>,
    /// `None` selects the command default: JSON for growth, CSV elsewhere.
    pub format: Option<Format>,
    pub seed: u64,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut tolerances = BTreeMap::new();
        tolerances.insert("gap_threshold".to_string(), GAP_THRESHOLD);
        tolerances.insert("resonance".to_string(), RESIDUAL_TOL);
        Self {
            m_hat: 1,
            n_hat: 1,
            buoyancy_n: 1.0,
            eps: 1e-2,
            m: 32,
            tolerances,
            format: None,
            seed: 0,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn wave(&self) -> Result<PrimaryWave, String> {
        PrimaryWave::new(self.m_hat, self.n_hat, self.buoyancy_n, self.eps).map_err(|e| e.to_string())
    }

    pub fn gap_threshold(&self) -> f64 {
        self.tolerances["gap_threshold"]
    }

    pub fn resonance_tol(&self) -> f64 {
        self.tolerances["resonance"]
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
            self.set(key.trim(), value.trim()).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("bad value '{v}' for {k}"))
        }
        match key {
            "k" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(format!("k needs two integers, got '{value}'"));
                }
                self.m_hat = num("k", parts[0])?;
                self.n_hat = num("k", parts[1])?;
            }
            "N" => self.buoyancy_n = num(key, value)?,
            "eps" => self.eps = num(key, value)?,
            "M" => self.m = num(key, value)?,
            "format" => self.format = Some(value.parse()?),
            "seed" => self.seed = num(key, value)?,
            "out" => self.out = Some(value.to_string()),
            "gap_threshold" | "resonance" => {
                let v: f64 = num(key, value)?;
                if !(v > 0.0) {
                    return Err(format!("{key} must be positive"));
                }
                self.tolerances.insert(key.to_string(), v);
            }
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmdOutput {
    pub code: i32,
    /// Payload for `--out` or stdout. Empty on usage errors.
    pub stdout: String,
    pub stderr: String,
}

impl CmdOutput {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, stdout: String::new(), stderr: msg.into() + "\n" }
    }
}

fn f17(x: f64) -> String {
    // no negative zero in output
    format!("{:.16e}", x + 0.0)
}

/// `samples` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => vec![],
        1 => vec![a],
        s => (0..s).map(|i| a + (b - a) * i as f64 / (s - 1) as f64).collect(),
    }
}

pub fn cmd_resonance(cfg: &RunConfig, branch: Branch, y_from: f64, y_to: f64, samples: usize) -> CmdOutput {
    let pw = match cfg.wave() {
        Ok(p) => p,
        Err(e) => return CmdOutput::usage(e),
    };
    if samples == 0 || y_from == y_to && samples > 1 {
        return CmdOutput::usage("empty y range");
    }
    let ok = |y: f64| Branch::of_y(y) == Some(branch);
    if !ok(y_from) || !ok(y_to) {
        return CmdOutput::usage(format!("range [{y_from}, {y_to}] does not lie on the {branch:?} branch"));
    }
    let ys = linspace(y_from, y_to, samples);
    let results: Vec<_> = ys.par_iter().map(|&y| (y, solve_branch(&pw, y, branch))).collect();

    let mut out = String::new();
    let mut err = String::new();
    let mut rows = Vec::new();
    for (y, r) in results {
        match r {
            Ok(p) => {
                // re-check before writing
                let f = residual_f(&pw, p.mu.mu1, y).map(f64::abs).unwrap_or(f64::INFINITY);
                if f > cfg.resonance_tol() {
                    let _ = writeln!(err, "solver failure at y = {y}: |F| = {f:e}");
                    return CmdOutput { code: EXIT_SOLVER, stdout: String::new(), stderr: err };
                }
                rows.push((y, p.mu.mu1, f));
            }
            Err(Error::NoRoot { y }) => {
                let _ = writeln!(err, "no resonant point at y = {y} (curve gap)");
            }
            Err(e) => {
                let _ = writeln!(err, "solver failure at y = {y}: {e}");
                return CmdOutput { code: EXIT_SOLVER, stdout: String::new(), stderr: err };
            }
        }
    }
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            out.push_str("y,x,residual\n");
            for (y, x, f) in rows {
                let _ = writeln!(out, "{},{},{}", f17(y), f17(x), f17(f));
            }
        }
        Format::Json => {
            let v: Vec<_> = rows.iter().map(|(y, x, f)| json!({"y": y, "x": x, "residual": f})).collect();
            out = serde_json::to_string_pretty(&v).unwrap() + "\n";
        }
    }
    CmdOutput { code: EXIT_OK, stdout: out, stderr: err }
}

/// Where to evaluate a growth prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthTarget {
    /// Resonant point at ordinate `y` on the given branch.
    OnBranch { y: f64, branch: Branch },
    /// An explicit Floquet parameter, resonant or not.
    Explicit(FloquetPoint),
}

pub fn cmd_growth(cfg: &RunConfig, target: GrowthTarget) -> CmdOutput {
    let pw = match cfg.wave() {
        Ok(p) => p,
        Err(e) => return CmdOutput::usage(e),
    };
    if cfg.eps > EPS_MAX {
        return CmdOutput::usage(format!("eps = {} exceeds {EPS_MAX}", cfg.eps));
    }
    let (mu, resonant) = match target {
        GrowthTarget::OnBranch { y, branch } => match solve_branch(&pw, y, branch) {
            Ok(p) => (p.mu, true),
            Err(Error::WrongBranch { .. }) => return CmdOutput::usage(format!("y = {y} is not on the {branch:?} branch")),
            Err(e) => {
                return CmdOutput { code: EXIT_SOLVER, stdout: String::new(), stderr: format!("y = {y}: {e}\n") }
            }
        },
        GrowthTarget::Explicit(mu) => {
            let f = residual_f(&pw, mu.mu1, mu.mu2).map(f64::abs).unwrap_or(f64::INFINITY);
            (mu, f <= 1e-10)
        }
    };
    let opts = PairOptions {
        gap_threshold: cfg.gap_threshold(),
        allow_near_exceptional: true,
        require_resonance: resonant,
        ..PairOptions::default()
    };
    let pred = if resonant { lambda_pm(&pw, &mu, cfg.eps) } else { lambda_pm_unchecked(&pw, &mu, cfg.eps) };
    let (pred, report) = match (pred, unstable_pair_with(&pw, &mu, cfg.eps, cfg.m, &opts)) {
        (Ok(p), Ok(r)) => (p, r),
        (Err(e), _) | (_, Err(e)) => {
            return CmdOutput { code: EXIT_SOLVER, stdout: String::new(), stderr: format!("{e}\n") }
        }
    };
    let g = report.gap;
    let c = |z: num_complex::Complex64| json!([z.re, z.im]);
    let doc = json!({
        "report": report.to_json(),
        "resonant": resonant,
        "w_underline": report.w_underline,
        "e_mu": pred.e_value,
        "stable_flag": pred.stable_flag,
        "lambda_plus_pred": c(pred.lambda_plus_pred),
        "lambda_minus_pred": c(pred.lambda_minus_pred),
        "unstable_pair": [c(report.unstable_pair[0]), c(report.unstable_pair[1])],
        "gap_alpha": {
            "alpha_plus": g.alpha_plus,
            "alpha_minus": g.alpha_minus,
            "ell_cutoff": g.ell_cutoff,
            "worst_ell_plus": g.worst_ell_plus,
            "worst_ell_minus": g.worst_ell_minus,
            "near_exceptional": g.near_exceptional,
            "threshold": g.threshold,
        },
    });
    let stdout = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&doc).unwrap() + "\n",
        Format::Csv => {
            let mut s = String::from("key,value\n");
            flatten_csv(&mut s, "", &doc);
            s
        }
    };
    let mut stderr = String::new();
    let code = if g.near_exceptional {
        let _ = writeln!(stderr, "warning: gap {:e} below threshold {:e}", g.gap(), g.threshold);
        EXIT_NEAR_EXCEPTIONAL
    } else {
        EXIT_OK
    };
    CmdOutput { code, stdout, stderr }
}

fn flatten_csv(out: &mut String, prefix: &str, v: &serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_csv(out, &p, x);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten_csv(out, &format!("{prefix}.{i}"), x);
            }
        }
        Value::Number(n) => {
            let s = n.as_f64().map(f17).unwrap_or_else(|| n.to_string());
            let s = if n.is_i64() || n.is_u64() { n.to_string() } else { s };
            let _ = writeln!(out, "{prefix},{s}");
        }
        other => {
            let _ = writeln!(out, "{prefix},{other}");
        }
    }
}

/// Order-preserving removal of repeated values.
pub fn dedup_stable(ys: &[f64]) -> Vec<f64> {
    let mut seen: Vec<u64> = Vec::new();
    let mut out = Vec::new();
    for &y in ys {
        let key = y.to_bits();
        if !seen.contains(&key) {
            seen.push(key);
            out.push(y);
        }
    }
    out
}

enum Numeric {
    Ok { max_re: f64, residual: f64 },
    /// Refused near the exceptional set; analytic columns still valid.
    Flagged(String),
}

struct ScanRow {
    y: f64,
    /// `(e_mu, pred, numeric)`.
    row: Result<(f64, f64, Numeric), String>,
}

fn scan_row(pw: &PrimaryWave, cfg: &RunConfig, opts: &PairOptions, branch: Branch, y: f64) -> ScanRow {
    let row = (|| {
        let mu = solve_branch(pw, y, branch).map_err(|e| e.to_string())?.mu;
        let pred = lambda_pm(pw, &mu, cfg.eps).map_err(|e| e.to_string())?;
        let numeric = match unstable_pair_with(pw, &mu, cfg.eps, cfg.m, opts) {
            Ok(r) => Numeric::Ok { max_re: r.max_re, residual: r.residual },
            Err(e @ Error::NearExceptional { .. }) => Numeric::Flagged(e.to_string()),
            Err(e) => return Err(e.to_string()),
        };
        Ok((pred.e_value, pred.lambda_plus_pred.re, numeric))
    })();
    ScanRow { y, row }
}

pub fn cmd_scan(cfg: &RunConfig, branch: Branch, y_list: &[f64]) -> CmdOutput {
    let pw = match cfg.wave() {
        Ok(p) => p,
        Err(e) => return CmdOutput::usage(e),
    };
    let ys = dedup_stable(y_list);
    if ys.is_empty() {
        return CmdOutput::usage("empty y list");
    }
    if let Some(y) = ys.iter().find(|&&y| Branch::of_y(y) != Some(branch)) {
        return CmdOutput::usage(format!("y = {y} is not on the {branch:?} branch"));
    }
    if cfg.eps > EPS_MAX {
        return CmdOutput::usage(format!("eps = {} exceeds {EPS_MAX}", cfg.eps));
    }
    let opts = PairOptions { gap_threshold: cfg.gap_threshold(), convergence_check: false, ..PairOptions::default() };
    // collect() keeps input order regardless of scheduling
    let rows: Vec<ScanRow> = ys.par_iter().map(|&y| scan_row(&pw, cfg, &opts, branch, y)).collect();

    let mut out = String::new();
    let mut err = String::new();
    let (mut failed, mut flagged) = (0, 0);
    let mut json_rows = Vec::new();
    let csv = cfg.format.unwrap_or(Format::Csv) == Format::Csv;
    if csv {
        out.push_str("y,e_mu,max_re_numeric,pred,residual\n");
    }
    for r in &rows {
        match &r.row {
            Ok((e, p, Numeric::Ok { max_re, residual })) => {
                if csv {
                    let _ = writeln!(out, "{},{},{},{},{}", f17(r.y), f17(*e), f17(*max_re), f17(*p), f17(*residual));
                }
                json_rows.push(json!({"y": r.y, "e_mu": e, "max_re_numeric": max_re, "pred": p, "residual": residual}));
            }
            Ok((e, p, Numeric::Flagged(msg))) => {
                flagged += 1;
                let _ = writeln!(err, "row y = {} flagged: {msg}", r.y);
                if csv {
                    let _ = writeln!(out, "{},{},nan,{},nan", f17(r.y), f17(*e), f17(*p));
                }
                json_rows.push(json!({"y": r.y, "e_mu": e, "pred": p, "flagged": msg}));
            }
            Err(msg) => {
                failed += 1;
                let _ = writeln!(err, "row y = {} failed: {msg}", r.y);
                if csv {
                    let _ = writeln!(out, "{},nan,nan,nan,nan", f17(r.y));
                }
                json_rows.push(json!({"y": r.y, "error": msg}));
            }
        }
    }
    if !csv {
        out = serde_json::to_string_pretty(&json_rows).unwrap() + "\n";
    }

    // compare the extreme rows against the asymptotic constants
    let by_abs = |a: &&ScanRow, b: &&ScanRow| a.y.abs().total_cmp(&b.y.abs());
    let ok_rows = || rows.iter().filter(|r| r.row.is_ok());
    if let (Some(lo), Some(hi)) = (ok_rows().min_by(by_abs), ok_rows().max_by(by_abs)) {
        let e_lo = lo.row.as_ref().unwrap().0;
        let tau = lo.y / pw.n_hat as f64;
        let _ = writeln!(err, "small-y: e/tau = {:.6e} at y = {} (limit {:.6e})", e_lo / tau, lo.y, small_tau_slope(&pw));
        let e_hi = hi.row.as_ref().unwrap().0;
        let _ = writeln!(err, "large-y: e = {:.6e} at y = {} (limit {:.6e})", e_hi, hi.y, large_y_limit(&pw));
    }
    let code = if failed > 0 {
        EXIT_SOLVER
    } else if flagged > 0 {
        EXIT_NEAR_EXCEPTIONAL
    } else {
        EXIT_OK
    };
    CmdOutput { code, stdout: out, stderr: err }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs()).max(1e-300)
    }
}

/// The self-validation suite. `jets` selects the operator blocks used by the
/// brute-force paths; pass [`Jets::EXACT`] for a normal run.
pub fn run_validation(cfg: &RunConfig, jets: &Jets) -> Result<Vec<CheckResult>, String> {
    let pw = cfg.wave()?;
    let n = pw.n_hat as f64;
    let mut out = Vec::new();
    let mut check = |name: &'static str, passed: bool, detail: String| out.push(CheckResult { name, passed, detail });

    let ys: Vec<f64> = [0.05, 0.3, 0.8, 1.7, 4.0, 12.0].iter().flat_map(|&y| [y, -y - 0.013]).collect();
    let solved: Vec<FloquetPoint> = ys.iter().filter_map(|&y| solve_at(&pw, y).ok().map(|p| p.mu)).collect();
    // flagged samples are reported, never fed to the residue route
    let (pts, flagged): (Vec<_>, Vec<_>) =
        solved.into_iter().partition(|mu| !gap_alpha_with(&pw, mu, cfg.gap_threshold()).near_exceptional);

    let worst_f = ys
        .iter()
        .map(|&y| solve_at(&pw, y).map(|p| p.residual).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    check("resonance residual", worst_f <= RESIDUAL_TOL, format!("max |F| = {worst_f:.2e}"));

    let anchor = solve_at(&pw, -2.0 * n).map(|p| p.mu.mu1.abs()).unwrap_or(f64::INFINITY);
    check("anchor phi_-(-2n) = 0", anchor <= 1e-12, format!("|x| = {anchor:.2e}"));

    let mut worst = 0.0f64;
    for mu in &pts {
        for which in KeyCoefficient::ALL {
            let cf = closed_form(&pw, mu, which).map_err(|e| e.to_string())?;
            let bf = which.bruteforce_with(jets, &pw, mu).map_err(|e| e.to_string())?;
            worst = worst.max((cf - bf).norm() / bf.norm().max(cf.norm()).max(1e-300));
        }
    }
    check("entanglement closed forms", worst <= 1e-12, format!("max rel err = {worst:.2e}"));

    let mut worst_c = 0.0f64;
    let mut worst_di = 0.0f64;
    let mut worst_fac = 0.0f64;
    for mu in &pts {
        let cf = beta_gamma_combos(&pw, mu).map_err(|e| e.to_string())?;
        let rr = beta_gamma_combos_residue_with(jets, &pw, mu).map_err(|e| e.to_string())?;
        worst_c = worst_c.max(rel(rr.0, cf.0)).max(rel(rr.1, cf.1));
        let (b1, b0) = b_coeffs(&pw, mu).map_err(|e| e.to_string())?;
        let e = e_mu(&pw, mu).map_err(|e| e.to_string())?;
        worst_fac = worst_fac.max((e + b1 * b0).abs() / e.abs().max(1.0));
        // growth function rebuilt from the residue route
        let (i11, i00) = iota0(&pw, mu);
        let e_res = -(rr.0 / i00) * (rr.1 / i11);
        if let Some(e_di) = e_from_physics(&pw, mu).map_err(|e| e.to_string())? {
            worst_di = worst_di.max(rel(e_res, e_di));
        }
    }
    check("combos vs residue route", worst_c <= 1e-10, format!("max rel err = {worst_c:.2e}"));
    check("e = -b1 b0", worst_fac <= 1e-13, format!("max err = {worst_fac:.2e}"));
    check("growth-function identity", worst_di <= 1e-12, format!("max rel err = {worst_di:.2e}"));

    let mu = solve_at(&pw, 1.0).map_err(|e| e.to_string())?.mu;
    let m_small = cfg.m.min(8);
    let t = assemble_with(jets, &pw.with_epsilon(0.03), &mu, m_small).map_err(|e| e.to_string())?;
    let t0 = assemble_with(jets, &pw.with_epsilon(0.0), &mu, m_small).map_err(|e| e.to_string())?;
    let t2 = assemble_with(jets, &pw.with_epsilon(0.06), &mu, m_small).map_err(|e| e.to_string())?;
    let affine = ((&t2.entries - &t0.entries) - (&t.entries - &t0.entries) * num_complex::Complex64::new(2.0, 0.0)).norm();
    let imag = t.max_abs_real() <= 1e-15 * t.max_abs();
    let bands = t.occupied_bands().iter().all(|b| b.abs() <= 1);
    check(
        "operator structure",
        imag && bands && affine <= 1e-14 * t.max_abs(),
        format!("imaginary {imag}, bands {bands}, affine defect {affine:.2e}"),
    );
    let eigs = eig_all(&t).map_err(|e| e.to_string())?;
    let md = mirror_defect(&eigs);
    check("spectral mirror", md <= 1e-8, format!("defect = {md:.2e}"));

    if cfg.eps == 0.0 {
        check("spectral prediction", true, "eps = 0, skipped".into());
    } else {
        let opts = PairOptions { gap_threshold: cfg.gap_threshold(), ..PairOptions::default() };
        match unstable_pair_with(&pw, &mu, cfg.eps.min(EPS_MAX), cfg.m, &opts) {
            Ok(r) => {
                let eps = r.eps;
                let ok = r.residual <= eps * eps && (eps > 1e-2 || r.conv_gap <= 1e-10);
                check(
                    "spectral prediction",
                    ok,
                    format!("residual = {:.2e}, eps^2 = {:.2e}, conv_gap = {:.2e}", r.residual, eps * eps, r.conv_gap),
                );
            }
            Err(e) => check("spectral prediction", false, e.to_string()),
        }
    }

    let min_gap = pts.iter().map(|mu| gap_alpha_with(&pw, mu, cfg.gap_threshold()).gap()).fold(f64::INFINITY, f64::min);
    check(
        "gap positivity",
        min_gap > 0.0 && !pts.is_empty(),
        format!("min alpha = {min_gap:.3e}, {} flagged samples excluded", flagged.len()),
    );
    Ok(out)
}

pub fn cmd_validate(cfg: &RunConfig) -> CmdOutput {
    cmd_validate_with(cfg, &Jets::EXACT)
}

pub fn cmd_validate_with(cfg: &RunConfig, jets: &Jets) -> CmdOutput {
    let checks = match run_validation(cfg, jets) {
        Ok(c) => c,
        Err(e) => return CmdOutput::usage(e),
    };
    let mut out = String::new();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let _ = writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len());
    let code = if failed == 0 { EXIT_OK } else { (EXIT_VALIDATION_BASE + failed as i32).min(125) };
    CmdOutput { code, stdout: out, stderr: String::new() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round_trip() {
        let mut c = RunConfig::default();
        c.apply_file("# test\nk = 1 3\nN = 2.5  # trailing\n\neps=0.02\nM = 16\nformat = json\nseed = 9\ngap_threshold = 1e-4\n")
            .unwrap();
        assert_eq!((c.m_hat, c.n_hat, c.m, c.seed), (1, 3, 16, 9));
        assert_eq!((c.buoyancy_n, c.eps, c.gap_threshold()), (2.5, 0.02, 1e-4));
        assert_eq!(c.format, Some(Format::Json));
        assert!(c.clone().apply_file("bogus = 1").is_err());
        assert!(c.clone().apply_file("k = 1").is_err());
        assert!(c.apply_file("no equals sign").is_err());
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(1.0, 2.0, 3), vec![1.0, 1.5, 2.0]);
        assert!(linspace(1.0, 2.0, 0).is_empty());
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        assert_eq!(dedup_stable(&[0.3, 0.1, 0.3, 2.0, 0.1]), vec![0.3, 0.1, 2.0]);
    }
}
