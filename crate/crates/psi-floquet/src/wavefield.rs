//! Primary wave, dispersion relation and the unperturbed eigenbasis.
//!
//! The background is the plane wave with wavevector `k = (m̂, n̂)` in a fluid
//! with buoyancy frequency `N`. Perturbations live on the lattice `n k + μ`,
//! so a mode is labelled by the harmonic `n` and the branch sign `σ`.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryWave {
    pub m_hat: i64,
    pub n_hat: i64,
    pub buoyancy_n: f64,
    pub epsilon: f64,
}

impl PrimaryWave {
    pub fn new(m_hat: i64, n_hat: i64, buoyancy_n: f64, epsilon: f64) -> Result<Self> {
        if m_hat < 1 || n_hat < 1 {
            return Err(Error::InvalidWave(format!(
                "wavevector components must be >= 1, got ({m_hat}, {n_hat})"
            )));
        }
        if !(buoyancy_n > 0.0 && buoyancy_n.is_finite()) {
            return Err(Error::InvalidWave(format!("N must be positive, got {buoyancy_n}")));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidWave(format!("epsilon must be >= 0, got {epsilon}")));
        }
        Ok(Self { m_hat, n_hat, buoyancy_n, epsilon })
    }

    /// Same wave with a different amplitude.
    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    pub fn k(&self) -> Vec2 {
        [self.m_hat as f64, self.n_hat as f64]
    }

    pub fn k_norm(&self) -> f64 {
        norm(self.k())
    }

    /// `k⊥ = (k2, -k1)`.
    pub fn k_perp(&self) -> Vec2 {
        [self.n_hat as f64, -(self.m_hat as f64)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FloquetPoint {
    pub mu1: f64,
    pub mu2: f64,
}

impl FloquetPoint {
    pub const ZERO: Self = Self { mu1: 0.0, mu2: 0.0 };

    pub fn new(mu1: f64, mu2: f64) -> Self {
        Self { mu1, mu2 }
    }

    pub fn as_vec(&self) -> Vec2 {
        [self.mu1, self.mu2]
    }

    pub fn norm(&self) -> f64 {
        norm(self.as_vec())
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.mu1, -self.mu2)
    }

    /// `n k + μ`.
    pub fn shifted(&self, pw: &PrimaryWave, n: i64) -> Vec2 {
        let k = pw.k();
        [n as f64 * k[0] + self.mu1, n as f64 * k[1] + self.mu2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mode {
    pub n: i64,
    pub sigma: Sign,
}

impl Mode {
    pub fn new(n: i64, sigma: Sign) -> Self {
        Self { n, sigma }
    }
}

/// `c = N m̂ |k|⁻³ k`.
pub fn phase_speed(pw: &PrimaryWave) -> Vec2 {
    let k = pw.k();
    let s = pw.buoyancy_n * pw.m_hat as f64 / pw.k_norm().powi(3);
    [s * k[0], s * k[1]]
}

/// `Ω(v) = N v1 / |v|`, with `Ω(0) = 0`.
pub fn omega(v: Vec2, n: f64) -> f64 {
    let r = norm(v);
    if r == 0.0 {
        0.0
    } else {
        n * v[0] / r
    }
}

/// `w^σ_n(μ) = c·(nk+μ) + σ Ω(nk+μ)`; the unperturbed eigenvalue is `i w`.
pub fn w_freq(pw: &PrimaryWave, mu: &FloquetPoint, mode: Mode) -> f64 {
    let v = mu.shifted(pw, mode.n);
    dot(phase_speed(pw), v) + mode.sigma.value() * omega(v, pw.buoyancy_n)
}

/// `(1/√2)(N, -σ|nk+μ|)`, the `(b, ω)` coefficients of `f^σ_n`.
pub fn eigvec_coeff(pw: &PrimaryWave, mu: &FloquetPoint, mode: Mode) -> Vector2<Complex64> {
    let r = norm(mu.shifted(pw, mode.n));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Vector2::new(
        Complex64::new(s * pw.buoyancy_n, 0.0),
        Complex64::new(-s * mode.sigma.value() * r, 0.0),
    )
}

/// The symplectic structure on harmonic `n`: `i (n m̂ + μ1)` times the swap.
pub fn j_block(pw: &PrimaryWave, mu: &FloquetPoint, n: i64) -> Matrix2<Complex64> {
    let a = Complex64::new(0.0, mu.shifted(pw, n)[0]);
    let z = Complex64::new(0.0, 0.0);
    Matrix2::new(z, a, a, z)
}

/// `⟨a, b⟩ = Σ a · conj(b)`.
pub fn inner(a: &Vector2<Complex64>, b: &Vector2<Complex64>) -> Complex64 {
    a[0] * b[0].conj() + a[1] * b[1].conj()
}

/// `⟨J f_a, f_b⟩`: `-iσ|nk+μ|²Ω(nk+μ)` on the diagonal, zero elsewhere.
pub fn symplectic_pair(pw: &PrimaryWave, mu: &FloquetPoint, a: Mode, b: Mode) -> Complex64 {
    if a != b {
        return Complex64::new(0.0, 0.0);
    }
    let v = mu.shifted(pw, a.n);
    let r2 = dot(v, v);
    Complex64::new(0.0, -a.sigma.value() * r2 * omega(v, pw.buoyancy_n))
}

/// `d = (|j+μ|² Ω(j+μ))⁻¹` for an arbitrary vector `j`.
pub fn d_coeff(pw: &PrimaryWave, mu: &FloquetPoint, j: Vec2) -> Result<f64> {
    let v = [j[0] + mu.mu1, j[1] + mu.mu2];
    if v[0] == 0.0 {
        return Err(Error::SingularFrequency(v[0]));
    }
    Ok(1.0 / (dot(v, v) * omega(v, pw.buoyancy_n)))
}

/// `d` at the lattice vector `n k`.
pub fn d_harmonic(pw: &PrimaryWave, mu: &FloquetPoint, n: i64) -> Result<f64> {
    let k = pw.k();
    d_coeff(pw, mu, [n as f64 * k[0], n as f64 * k[1]])
}
