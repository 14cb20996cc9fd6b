//! Entanglement coefficients: matrix elements of the jets between the
//! unperturbed eigenvectors.
//!
//! For jet order `ℓ ∈ {0, 1}`, band `κ = band·k` and harmonics `j → j'`,
//!
//! ```text
//! E_ℓ^[κ](j'←j; σ',σ) = ⟨J ℒ_ℓ^[κ] f_j^σ, f_j'^σ'⟩    (real)
//! L_ℓ^[κ](j'←j; σ',σ) = ⟨  ℒ_ℓ^[κ] f_j^σ, f_j'^σ'⟩    (purely imaginary)
//! ```
//!
//! The brute-force path applies the assembled blocks directly. The eight
//! closed forms needed for the reduced matrix are evaluated independently and
//! compared against it in the tests.
//!
//! `ℓ = 1` values carry the factor `ε` of the wave. Evaluate with
//! `pw.with_epsilon(1.0)` for the per-`ε` (normalized) coefficient.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::bloch::Jets;
use crate::error::{Error, Result};
use crate::resonance::{gap_alpha, GAP_THRESHOLD};
use crate::wavefield::{
    d_harmonic, dot, eigvec_coeff, inner, j_block, norm, w_freq, FloquetPoint, Mode, PrimaryWave, Sign,
};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// With the symplectic factor `J`.
    E,
    /// Without it.
    L,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntCoefficient {
    pub kind: Kind,
    pub ell: u32,
    pub band: i64,
    pub j_src: i64,
    pub j_dst: i64,
    pub sigma_src: Sign,
    pub sigma_dst: Sign,
    pub value: C,
}

fn jet_block(jets: &Jets, pw: &PrimaryWave, mu: &FloquetPoint, ell: u32, band: i64, j_src: i64) -> Result<Option<Matrix2<C>>> {
    match (ell, band) {
        (0, 0) => Ok(Some((jets.l0)(pw, mu, j_src)?)),
        (1, 1) | (1, -1) => Ok(Some((jets.l1)(pw, mu, j_src)?)),
        _ => Ok(None),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn ent_coeff_bruteforce(
    pw: &PrimaryWave,
    mu: &FloquetPoint,
    kind: Kind,
    ell: u32,
    band: i64,
    j_dst: i64,
    j_src: i64,
    sigma_dst: Sign,
    sigma_src: Sign,
) -> Result<EntCoefficient> {
    ent_coeff_bruteforce_with(&Jets::EXACT, pw, mu, kind, ell, band, j_dst, j_src, sigma_dst, sigma_src)
}

#[allow(clippy::too_many_arguments)]
pub fn ent_coeff_bruteforce_with(
    jets: &Jets,
    pw: &PrimaryWave,
    mu: &FloquetPoint,
    kind: Kind,
    ell: u32,
    band: i64,
    j_dst: i64,
    j_src: i64,
    sigma_dst: Sign,
    sigma_src: Sign,
) -> Result<EntCoefficient> {
    let mut value = C::new(0.0, 0.0);
    if j_dst - j_src == band {
        if let Some(a) = jet_block(jets, pw, mu, ell, band, j_src)? {
            let mut u = a * eigvec_coeff(pw, mu, Mode::new(j_src, sigma_src));
            if kind == Kind::E {
                u = j_block(pw, mu, j_dst) * u;
            }
            value = inner(&u, &eigvec_coeff(pw, mu, Mode::new(j_dst, sigma_dst)));
        }
    }
    Ok(EntCoefficient { kind, ell, band, j_src, j_dst, sigma_src, sigma_dst, value })
}

/// The eight coefficients entering the reduced matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeyCoefficient {
    /// `E_1^[-k](0←k; -,-)`
    B1MinusK,
    /// `E_1^[k](k←0; +,+)`
    B1PlusK,
    /// `L_0^[0](0←0; +,-)`
    L0ZeroPlusMinus,
    /// `L_0^[0](0←0; -,+)`
    L0ZeroMinusPlus,
    /// `L_0^[0](k←k; +,-)`
    L0KPlusMinus,
    /// `L_0^[0](k←k; -,+)`
    L0KMinusPlus,
    /// `L_1^[k](k←0; -,+)`
    L1KFromZero,
    /// `L_1^[-k](0←k; +,-)`
    L1ZeroFromK,
}

impl KeyCoefficient {
    pub const ALL: [KeyCoefficient; 8] = [
        KeyCoefficient::B1MinusK,
        KeyCoefficient::B1PlusK,
        KeyCoefficient::L0ZeroPlusMinus,
        KeyCoefficient::L0ZeroMinusPlus,
        KeyCoefficient::L0KPlusMinus,
        KeyCoefficient::L0KMinusPlus,
        KeyCoefficient::L1KFromZero,
        KeyCoefficient::L1ZeroFromK,
    ];

    /// `(kind, ell, band, j_dst, j_src, σ_dst, σ_src)`.
    pub fn indices(self) -> (Kind, u32, i64, i64, i64, Sign, Sign) {
        use Sign::{Minus as M, Plus as P};
        match self {
            KeyCoefficient::B1MinusK => (Kind::E, 1, -1, 0, 1, M, M),
            KeyCoefficient::B1PlusK => (Kind::E, 1, 1, 1, 0, P, P),
            KeyCoefficient::L0ZeroPlusMinus => (Kind::L, 0, 0, 0, 0, P, M),
            KeyCoefficient::L0ZeroMinusPlus => (Kind::L, 0, 0, 0, 0, M, P),
            KeyCoefficient::L0KPlusMinus => (Kind::L, 0, 0, 1, 1, P, M),
            KeyCoefficient::L0KMinusPlus => (Kind::L, 0, 0, 1, 1, M, P),
            KeyCoefficient::L1KFromZero => (Kind::L, 1, 1, 1, 0, M, P),
            KeyCoefficient::L1ZeroFromK => (Kind::L, 1, -1, 0, 1, P, M),
        }
    }

    pub fn bruteforce(self, pw: &PrimaryWave, mu: &FloquetPoint) -> Result<C> {
        self.bruteforce_with(&Jets::EXACT, pw, mu)
    }

    pub fn bruteforce_with(self, jets: &Jets, pw: &PrimaryWave, mu: &FloquetPoint) -> Result<C> {
        let (kind, ell, band, jd, js, sd, ss) = self.indices();
        Ok(ent_coeff_bruteforce_with(jets, pw, mu, kind, ell, band, jd, js, sd, ss)?.value)
    }
}

/// `(f_j^-, f_j^+) = (N² - |jk+μ|²)/2`.
pub fn cross_product_f(pw: &PrimaryWave, mu: &FloquetPoint, j: i64) -> f64 {
    let v = mu.shifted(pw, j);
    0.5 * (pw.buoyancy_n * pw.buoyancy_n - dot(v, v))
}

pub fn closed_form(pw: &PrimaryWave, mu: &FloquetPoint, which: KeyCoefficient) -> Result<C> {
    let eps = pw.epsilon;
    let kn = pw.k_norm();
    let nn = pw.buoyancy_n;
    let a = norm(mu.shifted(pw, 1));
    let b = mu.norm();
    if b == 0.0 {
        return Err(Error::LatticeCollision { n: 0 });
    }
    if a == 0.0 {
        return Err(Error::LatticeCollision { n: 1 });
    }
    let kp = dot(pw.k_perp(), mu.as_vec());
    let m1 = pw.m_hat as f64 + mu.mu1;
    let w = |n, s| w_freq(pw, mu, Mode::new(n, s));
    let v = match which {
        KeyCoefficient::B1MinusK => C::new(eps / 4.0 * kp * mu.mu1 * (a - kn) * (a + kn + b) / (kn * a), 0.0),
        KeyCoefficient::B1PlusK => C::new(eps / 4.0 * kp * m1 * (b + kn) * (kn - b - a) / (kn * b), 0.0),
        KeyCoefficient::L0ZeroPlusMinus => C::new(0.0, w(0, Sign::Minus) * cross_product_f(pw, mu, 0)),
        KeyCoefficient::L0ZeroMinusPlus => C::new(0.0, w(0, Sign::Plus) * cross_product_f(pw, mu, 0)),
        KeyCoefficient::L0KPlusMinus => C::new(0.0, w(1, Sign::Minus) * cross_product_f(pw, mu, 1)),
        KeyCoefficient::L0KMinusPlus => C::new(0.0, w(1, Sign::Plus) * cross_product_f(pw, mu, 1)),
        KeyCoefficient::L1KFromZero => {
            C::new(0.0, -eps / 4.0 * kp * (kn + b) * ((kn - b) * a + nn * nn) / (kn * b * nn))
        }
        KeyCoefficient::L1ZeroFromK => {
            C::new(0.0, eps / 4.0 * kp * (a - kn) * ((a + kn) * b - nn * nn) / (kn * a * nn))
        }
    };
    Ok(v)
}

/// The contour residue attached to the pair of poles `i w_j^σ`, `i w_j1^σ1`
/// for a contour that encloses only the double eigenvalue `i w̲`:
/// zero when both or neither pole is enclosed, `1/(w_outside - w̲)` otherwise.
pub fn residue_coeff(pw: &PrimaryWave, mu: &FloquetPoint, j: i64, j1: i64, sigma: Sign, sigma1: Sign) -> Result<f64> {
    let gap = gap_alpha(pw, mu).gap();
    if gap < GAP_THRESHOLD {
        return Err(Error::Ambiguous { gap, threshold: GAP_THRESHOLD });
    }
    let wu = w_freq(pw, mu, Mode::new(0, Sign::Plus));
    let wa = w_freq(pw, mu, Mode::new(j, sigma));
    let wb = w_freq(pw, mu, Mode::new(j1, sigma1));
    let inside = |w: f64| (w - wu).abs() < 0.5 * gap;
    Ok(match (inside(wa), inside(wb)) {
        (true, false) => 1.0 / (wb - wu),
        (false, true) => 1.0 / (wa - wu),
        _ => 0.0,
    })
}

fn drop_negligible(v: Vec<(Mode, C)>) -> Vec<(Mode, C)> {
    let scale = v.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max).max(1.0);
    v.into_iter().filter(|(_, c)| c.norm() > 1e-14 * scale).collect()
}

/// `ℒ_ℓ^[κ] f_j^σ` expanded in `f_{j+κ}^±`:
/// coefficient `i σ1 d_{j+κ} E_ℓ^[κ](j+κ←j; σ1,σ)`.
pub fn jet_action(pw: &PrimaryWave, mu: &FloquetPoint, ell: u32, band: i64, mode: Mode) -> Result<Vec<(Mode, C)>> {
    let jt = mode.n + band;
    let mut out = Vec::with_capacity(2);
    for s1 in Sign::BOTH {
        let e = ent_coeff_bruteforce(pw, mu, Kind::E, ell, band, jt, mode.n, s1, mode.sigma)?.value;
        if e == C::new(0.0, 0.0) {
            continue;
        }
        let d = d_harmonic(pw, mu, jt)?;
        out.push((Mode::new(jt, s1), C::new(0.0, s1.value() * d) * e));
    }
    Ok(drop_negligible(out))
}

/// `P[ℒ_ℓ^[κ]] f_j^σ`: coefficient `-σ1 d_{j+κ} E_ℓ^[κ](j+κ←j; σ1,σ) Res(j, j+κ; σ, σ1)`.
pub fn projected_jet(pw: &PrimaryWave, mu: &FloquetPoint, ell: u32, band: i64, mode: Mode) -> Result<Vec<(Mode, C)>> {
    let jt = mode.n + band;
    let mut out = Vec::with_capacity(2);
    for s1 in Sign::BOTH {
        let e = ent_coeff_bruteforce(pw, mu, Kind::E, ell, band, jt, mode.n, s1, mode.sigma)?.value;
        if e == C::new(0.0, 0.0) {
            continue;
        }
        let d = d_harmonic(pw, mu, jt)?;
        let r = residue_coeff(pw, mu, mode.n, jt, mode.sigma, s1)?;
        out.push((Mode::new(jt, s1), e * (-s1.value() * d * r)));
    }
    Ok(drop_negligible(out))
}

/// Resynthesises a modal expansion on one harmonic into `(b, ω)` coefficients.
pub fn synthesize(pw: &PrimaryWave, mu: &FloquetPoint, terms: &[(Mode, C)]) -> Vector2<C> {
    terms
        .iter()
        .fold(Vector2::zeros(), |acc, (m, c)| acc + eigvec_coeff(pw, mu, *m) * *c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{l0_block, l1_block};
    use crate::resonance::solve_at;

    fn setup(y: f64) -> (PrimaryWave, FloquetPoint) {
        let pw = PrimaryWave::new(1, 2, 1.0, 0.02).unwrap();
        let mu = solve_at(&pw, y).unwrap().mu;
        (pw, mu)
    }

    #[test]
    fn band_mismatch_is_zero() {
        let (pw, mu) = setup(0.9);
        for (ell, band, jd, js) in [(1u32, 1i64, 2i64, 0i64), (0, 0, 1, 0), (1, 0, 0, 0), (0, 1, 1, 0), (2, 1, 1, 0)] {
            let c = ent_coeff_bruteforce(&pw, &mu, Kind::E, ell, band, jd, js, Sign::Plus, Sign::Minus).unwrap();
            assert_eq!(c.value, C::new(0.0, 0.0));
        }
    }

    #[test]
    fn parallel_mu_kills_first_jet() {
        let pw = PrimaryWave::new(1, 2, 1.0, 0.1).unwrap();
        let mu = FloquetPoint::new(0.3, 0.6);
        for s in Sign::BOTH {
            let c = ent_coeff_bruteforce(&pw, &mu, Kind::L, 1, 1, 1, 0, s, Sign::Plus).unwrap();
            assert_eq!(c.value, C::new(0.0, 0.0));
            assert!(jet_action(&pw, &mu, 1, -1, Mode::new(0, s)).unwrap().is_empty());
        }
    }

    #[test]
    fn closed_forms_match_bruteforce() {
        for y in [0.3, 1.7, -0.6, -3.1] {
            let (pw, mu) = setup(y);
            for which in KeyCoefficient::ALL {
                let cf = closed_form(&pw, &mu, which).unwrap();
                let bf = which.bruteforce(&pw, &mu).unwrap();
                assert!((cf - bf).norm() <= 1e-12 * bf.norm(), "{which:?} at y={y}: {cf} vs {bf}");
            }
        }
    }

    #[test]
    fn e_real_l_imaginary() {
        let (pw, mu) = setup(1.3);
        for which in KeyCoefficient::ALL {
            let v = which.bruteforce(&pw, &mu).unwrap();
            match which.indices().0 {
                Kind::E => assert!(v.im.abs() <= 1e-14 * v.norm().max(1.0)),
                Kind::L => assert!(v.re.abs() <= 1e-14 * v.norm().max(1.0)),
            }
        }
    }

    #[test]
    fn scalar_product_sign() {
        let (pw, mu) = setup(0.8);
        let fm = eigvec_coeff(&pw, &mu, Mode::new(0, Sign::Minus));
        let fp = eigvec_coeff(&pw, &mu, Mode::new(0, Sign::Plus));
        assert!((inner(&fm, &fp).re - cross_product_f(&pw, &mu, 0)).abs() < 1e-15);
        let b = mu.norm();
        assert!((cross_product_f(&pw, &mu, 0) - (1.0 - b * b) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn residue_cases() {
        let (pw, mu) = setup(1.1);
        let b = mu.norm();
        let om_mu = pw.buoyancy_n * mu.mu1 / b;
        let v = mu.shifted(&pw, 1);
        let om_k = pw.buoyancy_n * v[0] / norm(v);
        assert_eq!(residue_coeff(&pw, &mu, 1, 0, Sign::Minus, Sign::Plus).unwrap(), 0.0);
        let r = residue_coeff(&pw, &mu, 1, 0, Sign::Minus, Sign::Minus).unwrap();
        assert!((r + 1.0 / (2.0 * om_mu)).abs() < 1e-12 * r.abs());
        let r = residue_coeff(&pw, &mu, 0, 1, Sign::Plus, Sign::Plus).unwrap();
        assert!((r - 1.0 / (2.0 * om_k)).abs() < 1e-12 * r.abs());
        // neither pole enclosed
        assert_eq!(residue_coeff(&pw, &mu, 3, 4, Sign::Plus, Sign::Minus).unwrap(), 0.0);
    }

    #[test]
    fn jet_action_zero_order_is_multiplier() {
        let (pw, mu) = setup(0.7);
        let mode = Mode::new(2, Sign::Minus);
        let out = jet_action(&pw, &mu, 0, 0, mode).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, mode);
        let w = w_freq(&pw, &mu, mode);
        assert!((out[0].1 - C::new(0.0, w)).norm() < 1e-13 * w.abs().max(1.0));
    }

    #[test]
    fn jet_action_resynthesizes_block_application() {
        let (pw, mu) = setup(-1.4);
        for (ell, band) in [(0u32, 0i64), (1, 1), (1, -1)] {
            for n in -2..=2 {
                for s in Sign::BOTH {
                    let mode = Mode::new(n, s);
                    let terms = jet_action(&pw, &mu, ell, band, mode).unwrap();
                    let a = if ell == 0 { l0_block(&pw, &mu, n) } else { l1_block(&pw, &mu, n) }.unwrap();
                    let direct = a * eigvec_coeff(&pw, &mu, mode);
                    let got = synthesize(&pw, &mu, &terms);
                    assert!((got - direct).norm() <= 1e-13 * direct.norm().max(1e-300), "{ell} {band} {mode:?}");
                }
            }
        }
        let (pw, mu) = setup(0.9);
        assert_eq!(jet_action(&pw, &mu, 1, 1, Mode::new(0, Sign::Plus)).unwrap().len(), 2);
    }

    /// `P[A] f_j^σ` without the symplectic machinery: expand `A f` in the
    /// target eigenbasis by a 2×2 solve and weight each term by `i·Res`.
    fn projected_direct(pw: &PrimaryWave, mu: &FloquetPoint, band: i64, mode: Mode) -> Vector2<C> {
        let jt = mode.n + band;
        let u = l1_block(pw, mu, mode.n).unwrap() * eigvec_coeff(pw, mu, mode);
        let fp = eigvec_coeff(pw, mu, Mode::new(jt, Sign::Plus));
        let fm = eigvec_coeff(pw, mu, Mode::new(jt, Sign::Minus));
        let basis = Matrix2::from_columns(&[fp, fm]);
        let coef = basis.try_inverse().unwrap() * u;
        let mut out = Vector2::zeros();
        for (i, s1) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
            let r = residue_coeff(pw, mu, mode.n, jt, mode.sigma, s1).unwrap();
            out += basis.column(i) * (coef[i] * C::new(0.0, r));
        }
        out
    }

    #[test]
    fn projected_jet_matches_direct_expansion() {
        let (pw, mu) = setup(1.2);
        for (band, mode) in [
            (1, Mode::new(0, Sign::Plus)),
            (-1, Mode::new(1, Sign::Minus)),
            (1, Mode::new(0, Sign::Minus)),
            (-1, Mode::new(1, Sign::Plus)),
        ] {
            let got = synthesize(&pw, &mu, &projected_jet(&pw, &mu, 1, band, mode).unwrap());
            let want = projected_direct(&pw, &mu, band, mode);
            assert!((got - want).norm() <= 1e-12 * want.norm().max(1e-12), "{band} {mode:?}");
        }
    }

    #[test]
    fn composition_identities() {
        let (pw, mu) = setup(2.3);
        let (j, s) = (0, Sign::Plus);
        let (jp, sp) = (1, Sign::Minus);
        // ⟨ℒ_0^[0] P[ℒ_1^[k]] f_0^+, f_k^-⟩
        let j1 = j + 1;
        let mut lhs = C::new(0.0, 0.0);
        for s1 in Sign::BOTH {
            let e = ent_coeff_bruteforce(&pw, &mu, Kind::E, 1, 1, j1, j, s1, s).unwrap().value;
            let l = ent_coeff_bruteforce(&pw, &mu, Kind::L, 0, 0, jp, j1, sp, s1).unwrap().value;
            let r = residue_coeff(&pw, &mu, j, j1, s, s1).unwrap();
            lhs += e * l * (-s1.value() * d_harmonic(&pw, &mu, j1).unwrap() * r);
        }
        let direct = inner(
            &(l0_block(&pw, &mu, j1).unwrap() * projected_direct(&pw, &mu, 1, Mode::new(j, s))),
            &eigvec_coeff(&pw, &mu, Mode::new(jp, sp)),
        );
        assert!((lhs - direct).norm() <= 1e-12 * direct.norm().max(1e-12));

        // ⟨ℒ_0^[0] f_k^-, P[ℒ_1^[-k]] f_k^-⟩ pairs the first jet on the right
        let (ja, sa) = (1, Sign::Minus);
        let (jb, sb) = (1, Sign::Minus);
        let xi = jb - 1;
        let mut rhs = C::new(0.0, 0.0);
        for s1 in Sign::BOTH {
            let e = ent_coeff_bruteforce(&pw, &mu, Kind::E, 1, -1, xi, jb, s1, sb).unwrap().value;
            let l = ent_coeff_bruteforce(&pw, &mu, Kind::L, 1, -1, xi, ja, s1, sa).unwrap().value;
            let r = residue_coeff(&pw, &mu, jb, xi, sb, s1).unwrap();
            rhs += e * l * (-s1.value() * d_harmonic(&pw, &mu, xi).unwrap() * r);
        }
        let direct = inner(
            &(l1_block(&pw, &mu, ja).unwrap() * eigvec_coeff(&pw, &mu, Mode::new(ja, sa))),
            &projected_direct(&pw, &mu, -1, Mode::new(jb, sb)),
        );
        assert!((rhs - direct).norm() <= 1e-12 * direct.norm().max(1e-12));
    }
}
