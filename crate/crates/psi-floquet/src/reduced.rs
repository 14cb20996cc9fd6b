//! Leading-order 2×2 reduction on the resonant pair and the growth function.
//!
//! Near a resonant `μ` the double eigenvalue `i w̲` splits as
//!
//! ```text
//! [[ i w̲      , i ε b0 ],
//!  [ i ε b1   , i w̲    ]]   ⇒   λ± = i w̲ ± ε √e,   e = -b1 b0
//! ```
//!
//! `b0`, `b1` have explicit closed forms. They are also obtainable as
//! `(β - γ1 w̲)/ι`, where `β`, `γ1` come out of the residue calculus on
//! brute-force entanglement coefficients. Both routes are exposed so they can
//! be checked against each other.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::bloch::Jets;
use crate::entanglement::{ent_coeff_bruteforce_with, residue_coeff, Kind};
use crate::error::{Error, Result};
use crate::resonance::{residual_f, RESIDUAL_TOL};
use crate::wavefield::{
    d_harmonic, dot, eigvec_coeff, inner, norm, omega, phase_speed, FloquetPoint, Mode, PrimaryWave, Sign,
};

type C = Complex64;

/// `|F(μ)|` accepted by the checked entry points.
pub const RESONANCE_CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedMatrix {
    pub lambda_plus: C,
    pub b0: f64,
    pub b1: f64,
    pub epsilon: f64,
}

impl ReducedMatrix {
    pub fn matrix(&self) -> Matrix2<C> {
        let e = self.epsilon;
        Matrix2::new(self.lambda_plus, C::new(0.0, e * self.b0), C::new(0.0, e * self.b1), self.lambda_plus)
    }

    pub fn e(&self) -> f64 {
        -self.b1 * self.b0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstabilityPrediction {
    pub lambda_minus_pred: C,
    pub lambda_plus_pred: C,
    pub e_value: f64,
    pub stable_flag: bool,
}

struct Geometry {
    a: f64,
    b: f64,
    kn: f64,
    kp: f64,
    nn: f64,
}

fn geometry(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<Geometry> {
    let a = norm(mu.shifted(pw, 1));
    let b = mu.norm();
    if b == 0.0 {
        return Err(Error::LatticeCollision { n: 0 });
    }
    if a == 0.0 {
        return Err(Error::LatticeCollision { n: 1 });
    }
    Ok(Geometry { a, b, kn: pw.k_norm(), kp: dot(pw.k_perp(), mu.as_vec()), nn: pw.buoyancy_n })
}

pub fn check_resonant(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<()> {
    let residual = residual_f(pw, mu.mu1, mu.mu2)?.abs();
    if residual > RESONANCE_CHECK_TOL {
        return Err(Error::NotResonant { mu1: mu.mu1, mu2: mu.mu2, residual });
    }
    Ok(())
}

/// `w̲ = c·μ + Ω(μ)`, checked against `c·(k+μ) - Ω(k+μ)`.
pub fn w_underline(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<f64> {
    let w = w_underline_unchecked(pw, mu);
    let c = phase_speed(pw);
    let v = mu.shifted(pw, 1);
    let w2 = dot(c, v) - omega(v, pw.buoyancy_n);
    let tol = 10.0 * RESIDUAL_TOL * w.abs().max(pw.buoyancy_n).max(1.0);
    if (w - w2).abs() > tol {
        return Err(Error::NotResonant { mu1: mu.mu1, mu2: mu.mu2, residual: (w - w2).abs() });
    }
    Ok(w)
}

pub fn w_underline_unchecked(pw: &PrimaryWave, mu: &FloquetPoint) -> f64 {
    dot(phase_speed(pw), mu.as_vec()) + omega(mu.as_vec(), pw.buoyancy_n)
}

/// `(ι11, ι00) = ((N²+|k+μ|²)/2, (N²+|μ|²)/2)`.
pub fn iota0(pw: &PrimaryWave, mu: &FloquetPoint) -> (f64, f64) {
    let nn2 = pw.buoyancy_n * pw.buoyancy_n;
    let v = mu.shifted(pw, 1);
    (0.5 * (nn2 + dot(v, v)), 0.5 * (nn2 + mu.norm().powi(2)))
}

/// `(β1 - γ1 w̲, β0 - γ1 w̲)` per unit `ε`, closed form, no resonance check.
pub fn beta_gamma_combos_formula(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<(f64, f64)> {
    let Geometry { a, b, kn, kp, nn } = geometry(pw, mu)?;
    let s = a + kn - b;
    let c1 = 0.125 * kp * (a - kn) * s * (nn * nn + b * b) / (nn * kn * b * a);
    let c0 = -0.125 * kp * (kn + b) * s * (a * a + nn * nn) / (nn * kn * b * a);
    Ok((c1, c0))
}

pub fn beta_gamma_combos(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<(f64, f64)> {
    check_resonant(pw, mu)?;
    beta_gamma_combos_formula(pw, mu)
}

/// The same combinations assembled from brute-force entanglement
/// coefficients, residues and scalar products.
pub fn beta_gamma_combos_residue(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<(f64, f64)> {
    beta_gamma_combos_residue_with(&Jets::EXACT, pw, mu)
}

pub fn beta_gamma_combos_residue_with(jets: &Jets, pw: &PrimaryWave, mu: &FloquetPoint) -> Result<(f64, f64)> {
    use Sign::{Minus as M, Plus as P};
    let wu = w_underline(pw, mu)?;
    let p1 = pw.with_epsilon(1.0);
    let ent = |kind, ell, band, jd, js, sd, ss| -> Result<C> {
        Ok(ent_coeff_bruteforce_with(jets, &p1, mu, kind, ell, band, jd, js, sd, ss)?.value)
    };
    let f = |n, s| eigvec_coeff(pw, mu, Mode::new(n, s));

    let e_mk = ent(Kind::E, 1, -1, 0, 1, M, M)?.re;
    let e_pk = ent(Kind::E, 1, 1, 1, 0, P, P)?.re;
    let d0 = d_harmonic(pw, mu, 0)?;
    let dk = d_harmonic(pw, mu, 1)?;
    let r0 = residue_coeff(pw, mu, 1, 0, M, M)?;
    let rk = residue_coeff(pw, mu, 0, 1, P, P)?;
    let s0 = inner(&f(0, M), &f(0, P)).re;
    let sk = inner(&f(1, M), &f(1, P)).re;

    let t0 = d0 * e_mk * r0;
    let tk = dk * e_pk * rk;
    let gamma1 = t0 * s0 - tk * sk;
    let ib1 = ent(Kind::L, 1, -1, 0, 1, P, M)? + ent(Kind::L, 0, 0, 0, 0, P, M)? * t0
        - ent(Kind::L, 0, 0, 1, 1, P, M)? * tk;
    let ib0 = ent(Kind::L, 1, 1, 1, 0, M, P)? - ent(Kind::L, 0, 0, 1, 1, M, P)? * tk
        + ent(Kind::L, 0, 0, 0, 0, M, P)? * t0;
    let beta1 = ib1.im;
    let beta0 = ib0.im;
    Ok((beta1 - gamma1 * wu, beta0 - gamma1 * wu))
}

/// Closed forms of `(b1, b0)`, no resonance check.
pub fn b_coeffs_formula(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<(f64, f64)> {
    let Geometry { a, b, kn, kp, nn } = geometry(pw, mu)?;
    let s = a + kn - b;
    let den = 4.0 * nn * kn * b * a;
    Ok((kp * (a - kn) * s / den, -kp * (kn + b) * s / den))
}

pub fn b_coeffs(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<(f64, f64)> {
    check_resonant(pw, mu)?;
    b_coeffs_formula(pw, mu)
}

/// `(b1, b0) = ((β1-γ1w̲)/ι00, (β0-γ1w̲)/ι11)`.
pub fn b_coeffs_quotient(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<(f64, f64)> {
    let (c1, c0) = beta_gamma_combos(pw, mu)?;
    let (i11, i00) = iota0(pw, mu);
    Ok((c1 / i00, c0 / i11))
}

/// The growth function in its expanded form, no resonance check.
pub fn e_mu_formula(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<f64> {
    let Geometry { a, b, kn, kp, nn } = geometry(pw, mu)?;
    let s = a + kn - b;
    Ok(kp * kp * (a - kn) * (kn + b) * s * s / (16.0 * nn * nn * b * b * a * a * kn * kn))
}

pub fn e_mu(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<f64> {
    check_resonant(pw, mu)?;
    e_mu_formula(pw, mu)
}

pub fn reduced_matrix(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<ReducedMatrix> {
    let w = w_underline(pw, mu)?;
    let (b1, b0) = b_coeffs(pw, mu)?;
    Ok(ReducedMatrix { lambda_plus: C::new(0.0, w), b0, b1, epsilon: pw.epsilon })
}

fn prediction(w: f64, e: f64, eps: f64) -> InstabilityPrediction {
    let base = C::new(0.0, w);
    let (lp, lm) = if e > 0.0 {
        let r = eps * e.sqrt();
        (base + r, base - r)
    } else {
        let r = eps * (-e).sqrt();
        (C::new(0.0, w + r), C::new(0.0, w - r))
    };
    InstabilityPrediction { lambda_minus_pred: lm, lambda_plus_pred: lp, e_value: e, stable_flag: e <= 0.0 }
}

/// `λ± = i w̲ ± ε√e` (or `i(w̲ ± ε√-e)` when `e ≤ 0`).
pub fn lambda_pm(pw: &PrimaryWave, mu: &FloquetPoint, eps: f64) -> Result<InstabilityPrediction> {
    Ok(prediction(w_underline(pw, mu)?, e_mu(pw, mu)?, eps))
}

/// Prediction without resonance checks, for off-curve diagnostics.
pub fn lambda_pm_unchecked(pw: &PrimaryWave, mu: &FloquetPoint, eps: f64) -> Result<InstabilityPrediction> {
    Ok(prediction(w_underline_unchecked(pw, mu), e_mu_formula(pw, mu)?, eps))
}

/// Interaction coefficients `(I₊, I₋)` of the classical triad analysis.
pub fn physics_i(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<(f64, f64)> {
    let Geometry { a, b, kn, kp, nn } = geometry(pw, mu)?;
    let v = mu.shifted(pw, 1);
    let om_p = omega(v, nn);
    let om_m = omega(mu.as_vec(), nn);
    if om_p == 0.0 {
        return Err(Error::SingularFrequency(v[0]));
    }
    if om_m == 0.0 {
        return Err(Error::SingularFrequency(mu.mu1));
    }
    let ip = kp * (om_p * (kn * kn - b * b) + v[0] * nn * (kn - b)) / (2.0 * om_p * a * a);
    let im = -kp * (om_m * (kn * kn - a * a) + mu.mu1 * nn * (kn - a)) / (2.0 * om_m * b * b);
    Ok((ip, im))
}

/// Right-hand side of the growth-function identity in terms of `I±`.
/// `None` within `1e-6` of `|μ| = |k|`, where it is singular.
pub fn e_from_physics(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<Option<f64>> {
    let Geometry { a, b, kn, nn, .. } = geometry(pw, mu)?;
    if (b - kn).abs() < 1e-6 {
        return Ok(None);
    }
    let (ip, im) = physics_i(pw, mu)?;
    let r = (a + kn - b) / (a + kn + b);
    Ok(Some(ip * im / (4.0 * nn * nn * kn * kn) * r * r * (kn + b) / (kn - b)))
}

/// `m̂²n̂²/(4N²|k|²)`, the limit of `e(μ(τ))/τ` as `τ → 0`.
pub fn small_tau_slope(pw: &PrimaryWave) -> f64 {
    let (m, n, nn) = (pw.m_hat as f64, pw.n_hat as f64, pw.buoyancy_n);
    m * m * n * n / (4.0 * nn * nn * pw.k_norm().powi(2))
}

/// Limit of `e` along the plus branch as `y → ∞`.
pub fn large_y_limit(pw: &PrimaryWave) -> f64 {
    let (m, n, nn) = (pw.m_hat as f64, pw.n_hat as f64, pw.buoyancy_n);
    let q = (3.0 * m * m + 4.0 * n * n).sqrt();
    let t1 = n - q;
    let t2 = 3.0 * m * m + 2.0 * n * n + n * q;
    m * m * t1 * t1 * t2 * t2 / (256.0 * nn * nn * pw.k_norm().powi(6))
}

/// Vector route to the same combinations: project the first jets with
/// [`crate::entanglement::projected_jet`], resynthesise, and take plain inner
/// products. Used as a third opinion in the tests.
pub fn beta_gamma_combos_vector(pw: &PrimaryWave, mu: &FloquetPoint) -> Result<(f64, f64)> {
    use crate::bloch::{l0_block, l1_block};
    use crate::entanglement::{projected_jet, synthesize};
    let wu = w_underline(pw, mu)?;
    let p1 = pw.with_epsilon(1.0);
    let fkm = eigvec_coeff(pw, mu, Mode::new(1, Sign::Minus));
    let f0p = eigvec_coeff(pw, mu, Mode::new(0, Sign::Plus));
    let pr1: Vector2<C> = synthesize(pw, mu, &projected_jet(&p1, mu, 1, -1, Mode::new(1, Sign::Minus))?);
    let pr2: Vector2<C> = synthesize(pw, mu, &projected_jet(&p1, mu, 1, 1, Mode::new(0, Sign::Plus))?);
    let gamma1 = (inner(&pr1, &f0p) + inner(&fkm, &pr2)).re;
    let l00 = l0_block(pw, mu, 0)?;
    let l0k = l0_block(pw, mu, 1)?;
    let ib1 = inner(&(l1_block(&p1, mu, 1)? * fkm), &f0p) + inner(&(l00 * pr1), &f0p) + inner(&(l0k * fkm), &pr2);
    let ib0 = inner(&(l1_block(&p1, mu, 0)? * f0p), &fkm) + inner(&(l0k * pr2), &fkm) + inner(&(l00 * f0p), &pr1);
    Ok((ib1.im - gamma1 * wu, ib0.im - gamma1 * wu))
}
