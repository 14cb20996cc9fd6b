//! The resonant set `R_k` and the spectral gap around it.
//!
//! A Floquet parameter `μ = (x, y)` is resonant when `w⁻_k(μ) = w⁺_0(μ)`,
//! equivalently when
//!
//! ```text
//! F(x, y) = (m̂+x)/|k+μ| + x/|μ| - m̂/|k| = 0.
//! ```
//!
//! `F` is strictly increasing in `x`, with limits `±2 - m̂/|k|`, so every
//! ordinate `y ≠ 0` carries exactly one root `x = φ±(y)` (plus branch for
//! `y > 0`, minus branch for `y < 0`). The one exception is the ordinate
//! `y = -n̂` when `n̂² > 3m̂²`: there `F(·, -n̂)` jumps across zero at
//! `x = -m̂` and no root exists. The solver reports that as [`Error::NoRoot`].
//!
//! Roots are found by bracketed bisection followed by a short Newton polish.
//! The asymptotic expansions of `φ±` seed the bracket and double as oracles.

use crate::error::{Error, Result};
use crate::wavefield::{omega, w_freq, FloquetPoint, Mode, PrimaryWave, Sign};

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_WIDTH: f64 = 1e-12;
/// Accepted `|F|` at a solved point.
pub const RESIDUAL_TOL: f64 = 1e-12;
/// Newton polish steps after bisection.
pub const NEWTON_STEPS: usize = 3;
pub const TAU0: f64 = 0.5;
pub const Y_MIN: f64 = 10.0;
pub const GAP_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn of_y(y: f64) -> Option<Self> {
        if y > 0.0 {
            Some(Branch::Plus)
        } else if y < 0.0 {
            Some(Branch::Minus)
        } else {
            None
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantPoint {
    pub mu: FloquetPoint,
    pub branch: Branch,
    pub y_param: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub ell_cutoff: i64,
    pub worst_ell_plus: i64,
    pub worst_ell_minus: i64,
    pub near_exceptional: bool,
    pub threshold: f64,
    /// `|F(μ)|` at the queried point.
    pub resonance_residual: f64,
}

impl GapReport {
    pub fn gap(&self) -> f64 {
        self.alpha_plus.min(self.alpha_minus)
    }
}

fn f_terms(pw: &PrimaryWave, x: f64, y: f64) -> (f64, f64, f64) {
    let (m, n) = (pw.m_hat as f64, pw.n_hat as f64);
    let (xa, ya) = (m + x, n + y);
    let r1 = xa.hypot(ya);
    let r0 = x.hypot(y);
    let t1 = if r1 == 0.0 { 0.0 } else { xa / r1 };
    let t0 = if r0 == 0.0 { 0.0 } else { x / r0 };
    // ∂ₓF, used only by the Newton polish
    let d1 = if r1 == 0.0 { 0.0 } else { ya * ya / (r1 * r1 * r1) };
    let d0 = if r0 == 0.0 { 0.0 } else { y * y / (r0 * r0 * r0) };
    (t1 + t0 - m / pw.k_norm(), d1 + d0, r1.min(r0))
}

/// `F(x, y)`; singular at `μ = 0` and `μ = -k`.
pub fn residual_f(pw: &PrimaryWave, x: f64, y: f64) -> Result<f64> {
    let (f, _, rmin) = f_terms(pw, x, y);
    if rmin == 0.0 {
        return Err(Error::SingularPoint { x, y });
    }
    Ok(f)
}

/// `∂ₓF(x, y)`; strictly positive away from the singular points.
pub fn residual_f_dx(pw: &PrimaryWave, x: f64, y: f64) -> Result<f64> {
    let (_, d, rmin) = f_terms(pw, x, y);
    if rmin == 0.0 {
        return Err(Error::SingularPoint { x, y });
    }
    Ok(d)
}

/// `Ω(k) - Ω(k+μ) - Ω(μ)`, which vanishes on the resonant set.
pub fn resonance_defect(pw: &PrimaryWave, mu: &FloquetPoint) -> f64 {
    let nn = pw.buoyancy_n;
    omega(pw.k(), nn) - omega(mu.shifted(pw, 1), nn) - omega(mu.as_vec(), nn)
}

/// `m̂n̂/|k|³`, the coefficient of `y²` in `φ±(y)` near zero.
pub fn small_y_coefficient(pw: &PrimaryWave) -> f64 {
    (pw.m_hat * pw.n_hat) as f64 / pw.k_norm().powi(3)
}

/// `m̂/√(3m̂²+4n̂²)`, the asymptotic slope of `φ₊`.
pub fn large_y_slope(pw: &PrimaryWave) -> f64 {
    let (m, n) = (pw.m_hat as f64, pw.n_hat as f64);
    m / (3.0 * m * m + 4.0 * n * n).sqrt()
}

/// `m̂n̂/(2√(3m̂²+4n̂²)) - m̂/2`, the intercept of the large-y asymptote.
pub fn large_y_intercept(pw: &PrimaryWave) -> f64 {
    let (m, n) = (pw.m_hat as f64, pw.n_hat as f64);
    n * large_y_slope(pw) / 2.0 - m / 2.0
}

fn kink_regime(pw: &PrimaryWave) -> bool {
    pw.n_hat * pw.n_hat > 3 * pw.m_hat * pw.m_hat
}

/// `a* = √(4m̂²/(n̂²-3m̂²))`; defined only when `n̂² > 3m̂²`.
pub fn kink_slope(pw: &PrimaryWave) -> Result<f64> {
    if !kink_regime(pw) {
        return Err(Error::Domain(format!(
            "no kink for k = ({}, {}): needs n^2 > 3 m^2",
            pw.m_hat, pw.n_hat
        )));
    }
    let (m, n) = (pw.m_hat as f64, pw.n_hat as f64);
    Ok((4.0 * m * m / (n * n - 3.0 * m * m)).sqrt())
}

/// `φ₋(-n̂ + dy) ≈ -m̂ + a*|dy|`.
pub fn kink_expansion(pw: &PrimaryWave, dy: f64) -> Result<f64> {
    Ok(-(pw.m_hat as f64) + kink_slope(pw)? * dy.abs())
}

fn predictor(pw: &PrimaryWave, y: f64, branch: Branch) -> f64 {
    let s = branch.sign();
    let n = pw.n_hat as f64;
    if branch == Branch::Minus && kink_regime(pw) && (y + n).abs() < 0.5 {
        return kink_expansion(pw, y + n).unwrap_or(0.0);
    }
    if y.abs() < 1.0 {
        s * small_y_coefficient(pw) * y * y
    } else {
        s * large_y_slope(pw) * (n / 2.0 + y) - pw.m_hat as f64 / 2.0
    }
}

/// Solves `F(x, y) = 0` for `x = φ±(y)`.
pub fn solve_branch(pw: &PrimaryWave, y: f64, branch: Branch) -> Result<ResonantPoint> {
    if !y.is_finite() || Branch::of_y(y) != Some(branch) {
        return Err(Error::WrongBranch { y });
    }
    let n = pw.n_hat as f64;
    if branch == Branch::Minus && kink_regime(pw) && y == -n {
        return Err(Error::NoRoot { y });
    }
    let f = |x: f64| f_terms(pw, x, y).0;

    let xp = predictor(pw, y, branch);
    let mut h = 0.25 * xp.abs().max(y.abs()).max(f64::MIN_POSITIVE);
    let (mut lo, mut hi) = (xp - h, xp + h);
    let mut tries = 0;
    while f(lo) >= 0.0 || f(hi) <= 0.0 {
        if f(lo) >= 0.0 {
            lo -= h;
        }
        if f(hi) <= 0.0 {
            hi += h;
        }
        h *= 2.0;
        tries += 1;
        if tries > 1100 || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::BracketFailure { y, lo, hi });
        }
    }

    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut x = 0.5 * (lo + hi);
    let mut fx = f(x);
    for _ in 0..NEWTON_STEPS {
        let (_, d, _) = f_terms(pw, x, y);
        if d <= 0.0 || fx == 0.0 {
            break;
        }
        let xn = x - fx / d;
        let fxn = f(xn);
        if !(xn >= lo && xn <= hi) || fxn.abs() > fx.abs() {
            break;
        }
        x = xn;
        fx = fxn;
    }

    // A jump of F across zero (rather than a root) leaves |F| of order one.
    if fx.abs() > 1e-6 {
        return Err(Error::NoRoot { y });
    }
    Ok(ResonantPoint { mu: FloquetPoint::new(x, y), branch, y_param: y, residual: fx.abs() })
}

/// Solves on whichever branch the sign of `y` selects.
pub fn solve_at(pw: &PrimaryWave, y: f64) -> Result<ResonantPoint> {
    let branch = Branch::of_y(y).ok_or(Error::WrongBranch { y })?;
    solve_branch(pw, y, branch)
}

/// `μ0(τ) = (φ±(τ), τ)` for `|τ| ≤ τ0`, with `μ0(0) = 0`.
pub fn param_mu_small(pw: &PrimaryWave, tau: f64) -> Result<FloquetPoint> {
    if !(tau.abs() <= TAU0) {
        return Err(Error::Precondition(format!("|tau| = {} exceeds tau0 = {TAU0}", tau.abs())));
    }
    if tau == 0.0 {
        return Ok(FloquetPoint::ZERO);
    }
    Ok(solve_at(pw, tau)?.mu)
}

/// `μ(τ) = (φ±(n̂τ), n̂τ)`, the parametrization along which the small-μ
/// limits of the growth function are stated.
pub fn mu_of_tau(pw: &PrimaryWave, tau: f64) -> Result<FloquetPoint> {
    if tau == 0.0 {
        return Ok(FloquetPoint::ZERO);
    }
    Ok(solve_at(pw, pw.n_hat as f64 * tau)?.mu)
}

/// Resonant point far from the origin, `|y| ≥ y_min`.
pub fn param_mu_large(pw: &PrimaryWave, y: f64) -> Result<FloquetPoint> {
    if !(y.abs() >= Y_MIN) {
        return Err(Error::Precondition(format!("|y| = {} below y_min = {Y_MIN}", y.abs())));
    }
    Ok(solve_at(pw, y)?.mu)
}

/// Smallest `ℓ0` with `(ℓ0-1)Ω(k) > 2N + 1`. Beyond it every frequency
/// gap is at least `|ℓ-1|Ω(k) - 2N ≥ 1`.
pub fn ell_cutoff(pw: &PrimaryWave) -> i64 {
    let nn = pw.buoyancy_n;
    let wk = omega(pw.k(), nn);
    let mut l0 = 2;
    while (l0 - 1) as f64 * wk <= 2.0 * nn + 1.0 {
        l0 += 1;
    }
    l0
}

pub fn gap_alpha(pw: &PrimaryWave, mu: &FloquetPoint) -> GapReport {
    gap_alpha_with(pw, mu, GAP_THRESHOLD)
}

/// Distance from the double eigenvalue `i w̲` to the rest of the unperturbed
/// spectrum, scanned over `|ℓ| < ℓ0` and bounded below by 1 past the cutoff.
pub fn gap_alpha_with(pw: &PrimaryWave, mu: &FloquetPoint, threshold: f64) -> GapReport {
    let l0 = ell_cutoff(pw);
    let w_plus0 = w_freq(pw, mu, Mode::new(0, Sign::Plus));
    let w_minus1 = w_freq(pw, mu, Mode::new(1, Sign::Minus));
    let (mut ap, mut am) = (1.0f64, 1.0f64);
    let (mut worst_p, mut worst_m) = (l0, l0);
    for l in (1 - l0)..l0 {
        if l != 0 {
            let d = (w_freq(pw, mu, Mode::new(l, Sign::Plus)) - w_plus0).abs();
            if d < ap {
                ap = d;
                worst_p = l;
            }
        }
        if l != 1 {
            let d = (w_freq(pw, mu, Mode::new(l, Sign::Minus)) - w_minus1).abs();
            if d < am {
                am = d;
                worst_m = l;
            }
        }
    }
    let resonance_residual = f_terms(pw, mu.mu1, mu.mu2).0.abs();
    GapReport {
        alpha_plus: ap,
        alpha_minus: am,
        ell_cutoff: l0,
        worst_ell_plus: worst_p,
        worst_ell_minus: worst_m,
        near_exceptional: ap.min(am) < threshold,
        threshold,
        resonance_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pw(m: i64, n: i64) -> PrimaryWave {
        PrimaryWave::new(m, n, 1.0, 0.0).unwrap()
    }

    #[test]
    fn anchor_root_at_minus_two_n() {
        for (m, n) in [(1, 1), (2, 2), (1, 3), (3, 1)] {
            let p = pw(m, n);
            assert!(residual_f(&p, 0.0, -2.0 * n as f64).unwrap().abs() < 1e-15);
            let r = solve_branch(&p, -2.0 * n as f64, Branch::Minus).unwrap();
            assert!(r.mu.mu1.abs() < 1e-12, "{m} {n}: {}", r.mu.mu1);
        }
    }

    #[test]
    fn limits_in_x() {
        let p = pw(1, 1);
        let lim = 2.0 - 1.0 / 2f64.sqrt();
        assert!((residual_f(&p, 1e9, 1.0).unwrap() - lim).abs() < 1e-8);
        assert!((residual_f(&p, -1e9, 1.0).unwrap() + 2.0 + 1.0 / 2f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn singular_points_are_errors() {
        let p = pw(1, 2);
        assert!(residual_f(&p, 0.0, 0.0).is_err());
        assert!(residual_f(&p, -1.0, -2.0).is_err());
    }

    #[test]
    fn reference_root() {
        let p = pw(1, 1);
        assert!(residual_f(&p, 0.1972, 1.0).unwrap().abs() < 5e-4);
        let r = solve_branch(&p, 1.0, Branch::Plus).unwrap();
        assert!((r.mu.mu1 - 0.19721632351026586).abs() < 1e-10);
        assert!(r.residual <= RESIDUAL_TOL);
    }

    #[test]
    fn small_y_root_near_predictor() {
        let r = solve_branch(&pw(1, 1), 0.1, Branch::Plus).unwrap();
        assert!((r.mu.mu1 / 0.0035355339 - 1.0).abs() < 0.2);
    }

    #[test]
    fn wrong_branch_rejected() {
        assert!(matches!(solve_branch(&pw(1, 1), -1.0, Branch::Plus), Err(Error::WrongBranch { .. })));
        assert!(matches!(solve_branch(&pw(1, 1), 0.0, Branch::Minus), Err(Error::WrongBranch { .. })));
    }

    #[test]
    fn kink_gap_and_domain() {
        let p = pw(1, 3);
        assert!(matches!(solve_branch(&p, -3.0, Branch::Minus), Err(Error::NoRoot { .. })));
        assert!((kink_slope(&p).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(matches!(kink_expansion(&pw(2, 2), 0.01), Err(Error::Domain(_))));
        for dy in [0.01, -0.01] {
            let r = solve_branch(&p, -3.0 + dy, Branch::Minus).unwrap();
            let pred = kink_expansion(&p, dy).unwrap();
            assert!(((r.mu.mu1 + 1.0) / (pred + 1.0) - 1.0).abs() < 0.1);
        }
        // without a kink the ordinate -n̂ is an ordinary point
        let r = solve_branch(&pw(2, 2), -2.0, Branch::Minus).unwrap();
        assert!(r.residual <= RESIDUAL_TOL);
    }

    #[test]
    fn small_param_sign_and_zero() {
        let p = pw(2, 1);
        assert_eq!(param_mu_small(&p, 0.0).unwrap(), FloquetPoint::ZERO);
        assert!(param_mu_small(&p, 0.05).unwrap().mu1 > 0.0);
        assert!(param_mu_small(&p, -0.05).unwrap().mu1 < 0.0);
        assert!(param_mu_small(&p, 0.7).is_err());
        assert!(param_mu_large(&p, 5.0).is_err());
    }

    #[test]
    fn large_y_intercept_approaches() {
        let p = pw(1, 1);
        let y = 1e4;
        let x = param_mu_large(&p, y).unwrap().mu1;
        let icpt = x - y * large_y_slope(&p);
        assert!((icpt - large_y_intercept(&p)).abs() < 1e-3);
        let xm = param_mu_large(&p, -y).unwrap().mu1;
        assert!((xm / -y + large_y_slope(&p)).abs() < 1e-3);
    }

    #[test]
    fn lattice_points_are_not_resonant() {
        for (m, n) in [(1, 1), (2, 2), (1, 3)] {
            let p = pw(m, n);
            for l in [-3i64, -2, 1, 2, 3] {
                let f = residual_f(&p, (l * m) as f64, (l * n) as f64).unwrap();
                assert!(f.abs() > 0.1);
            }
        }
    }

    #[test]
    fn cutoff_matches_tail_rule_at_unit_n() {
        for (m, n) in [(1, 1), (2, 2), (1, 3)] {
            let p = pw(m, n);
            let l0 = ell_cutoff(&p);
            let wk = omega(p.k(), 1.0);
            assert!((l0 - 1) as f64 * wk > 3.0);
            assert!((l0 - 2) as f64 * wk <= 3.0);
        }
    }

    #[test]
    fn gap_positive_at_reference_point() {
        let p = pw(1, 1);
        let mu = solve_branch(&p, 1.0, Branch::Plus).unwrap().mu;
        let g = gap_alpha(&p, &mu);
        assert!(g.alpha_plus > 0.0 && g.alpha_minus > 0.0 && !g.near_exceptional);
        assert!(g.resonance_residual <= RESIDUAL_TOL);
    }
}
