//! Numerical validation against the truncated operator.
//!
//! Eigenvalues come from a dense Schur decomposition. Assembled operators
//! are purely imaginary, `A = iB` with `B` real, so the solver works on `B`
//! and maps back. That keeps the mirror symmetry `λ ↦ -conj(λ)` exact: real
//! Schur emits complex eigenvalues of `B` in conjugate pairs.
//!
//! Growth simulations integrate `dh/dt = T h` with classical RK4 and fit the
//! slope of `log‖h‖`, where `‖·‖` is the modal norm of
//! [`crate::bloch::modal_norm`]. It is conserved at `ε = 0` (up to the RK4
//! dissipation `~ w⁶dt⁵`), so the fitted rate is not polluted by the beating
//! of non-orthogonal eigenvectors.

use nalgebra::linalg::Schur;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::bloch::{apply_into, assemble, modal_norm, TruncatedOperator};
use crate::error::{Error, Result};
use crate::reduced::{check_resonant, e_mu, e_mu_formula, w_underline, w_underline_unchecked};
use crate::resonance::{gap_alpha_with, GapReport, GAP_THRESHOLD};
use crate::wavefield::{FloquetPoint, PrimaryWave};

type C = Complex64;

pub const EPS_MAX: f64 = 0.05;
pub const DEFAULT_M: usize = 32;
/// Real parts below this count as on the imaginary axis.
pub const AXIS_TOL: f64 = 1e-8;
/// RK4 is stable on the imaginary axis up to `|z| = 2√2`.
pub const RK4_BOUND: f64 = 2.8;
/// Fits with a larger rms deviation are flagged degenerate.
pub const DEGENERATE_RMS: f64 = 0.25;

pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
pub const LCG_INCREMENT: u64 = 1442695040888963407;

fn lex(a: &C, b: &C) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All eigenvalues, sorted by `(Re, Im)`.
pub fn eig_all(t: &TruncatedOperator) -> Result<Vec<C>> {
    let n = t.dim();
    let max_iter = 10_000 * n.max(1);
    let mut eigs: Vec<C> = if t.max_abs_real() == 0.0 {
        let schur = Schur::try_new(t.imag_part(), f64::EPSILON, max_iter).ok_or(Error::Eigen(n))?;
        schur.complex_eigenvalues().iter().map(|z| C::new(-z.im, z.re)).collect()
    } else {
        let schur = Schur::try_new(t.entries.clone(), f64::EPSILON, max_iter).ok_or(Error::Eigen(n))?;
        schur.eigenvalues().ok_or(Error::Eigen(n))?.iter().copied().collect()
    };
    if eigs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen(n));
    }
    eigs.sort_by(lex);
    Ok(eigs)
}

pub fn count_off_axis(eigs: &[C], tol: f64) -> usize {
    eigs.iter().filter(|z| z.re.abs() > tol).count()
}

/// Greedy multiset match of `a` against `b`; returns the largest pairing
/// distance, or infinity when the sizes differ.
pub fn multiset_distance(a: &[C], b: &[C]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, y) in b.iter().enumerate() {
            if !used[j] {
                let d = (x - y).norm();
                if d < best.0 {
                    best = (d, j);
                }
            }
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

/// Distance between the spectrum and its mirror image `-conj(λ)`.
pub fn mirror_defect(eigs: &[C]) -> f64 {
    let mirrored: Vec<C> = eigs.iter().map(|z| -z.conj()).collect();
    multiset_distance(eigs, &mirrored)
}

/// `re,im` lines, lexicographically sorted.
pub fn spectrum_csv(eigs: &[C]) -> String {
    let mut v = eigs.to_vec();
    v.sort_by(lex);
    let mut s = String::from("re,im\n");
    for z in v {
        s.push_str(&format!("{:.16e},{:.16e}\n", z.re, z.im));
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub pw: PrimaryWave,
    pub mu: FloquetPoint,
    pub m: usize,
    pub eps: f64,
    pub eigenvalues: Vec<C>,
    pub unstable_pair: [C; 2],
    pub max_re: f64,
    pub pred_max_re: f64,
    pub residual: f64,
    pub conv_gap: f64,
    pub w_underline: f64,
    pub e_value: f64,
    /// Radius around `i w̲` inside which only the pair may lie.
    pub isolation_radius: f64,
    pub gap: GapReport,
}

#[derive(Serialize)]
struct PwJson {
    m_hat: i64,
    n_hat: i64,
    #[serde(rename = "N")]
    n: f64,
}

#[derive(Serialize)]
struct ReportJson {
    pw: PwJson,
    mu: [f64; 2],
    #[serde(rename = "M")]
    m: usize,
    eps: f64,
    max_re: f64,
    pred_max_re: f64,
    residual: f64,
    conv_gap: f64,
}

impl SpectrumReport {
    /// JSON with the fixed key order `pw, mu, M, eps, max_re, pred_max_re,
    /// residual, conv_gap`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ReportJson {
            pw: PwJson { m_hat: self.pw.m_hat, n_hat: self.pw.n_hat, n: self.pw.buoyancy_n },
            mu: [self.mu.mu1, self.mu.mu2],
            m: self.m,
            eps: self.eps,
            max_re: self.max_re,
            pred_max_re: self.pred_max_re,
            residual: self.residual,
            conv_gap: self.conv_gap,
        })
        .expect("plain data serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOptions {
    pub gap_threshold: f64,
    pub eps_max: f64,
    /// Compute and report even when the gap is below the threshold.
    pub allow_near_exceptional: bool,
    /// Reject points off the resonant curve.
    pub require_resonance: bool,
    /// Re-solve at `2M` for `conv_gap`.
    pub convergence_check: bool,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self {
            gap_threshold: GAP_THRESHOLD,
            eps_max: EPS_MAX,
            allow_near_exceptional: false,
            require_resonance: true,
            convergence_check: true,
        }
    }
}

pub fn unstable_pair(pw: &PrimaryWave, mu: &FloquetPoint, eps: f64, m: usize) -> Result<SpectrumReport> {
    unstable_pair_with(pw, mu, eps, m, &PairOptions::default())
}

fn select_pair(eigs: &[C], wu: f64, radius: f64) -> Result<[C; 2]> {
    let target = C::new(0.0, wu);
    if eigs.len() < 2 {
        return Err(Error::Isolation { count: eigs.len(), radius });
    }
    let count = eigs.iter().filter(|z| (*z - target).norm() < radius).count();
    if count > 2 {
        return Err(Error::Isolation { count, radius });
    }
    let mut idx: Vec<usize> = (0..eigs.len()).collect();
    idx.sort_by(|&i, &j| (eigs[i] - target).norm().total_cmp(&(eigs[j] - target).norm()));
    let mut pair = [eigs[idx[0]], eigs[idx[1]]];
    pair.sort_by(lex);
    Ok(pair)
}

fn pair_max_re(pw: &PrimaryWave, mu: &FloquetPoint, eps: f64, m: usize, wu: f64, radius: f64) -> Result<(Vec<C>, [C; 2])> {
    let t = assemble(&pw.with_epsilon(eps), mu, m)?;
    let eigs = eig_all(&t)?;
    let pair = select_pair(&eigs, wu, radius)?;
    Ok((eigs, pair))
}

pub fn unstable_pair_with(pw: &PrimaryWave, mu: &FloquetPoint, eps: f64, m: usize, opts: &PairOptions) -> Result<SpectrumReport> {
    if !(eps >= 0.0 && eps <= opts.eps_max) {
        return Err(Error::Precondition(format!("eps = {eps} outside [0, {}]", opts.eps_max)));
    }
    let (wu, e) = if opts.require_resonance {
        check_resonant(pw, mu)?;
        (w_underline(pw, mu)?, e_mu(pw, mu)?)
    } else {
        (w_underline_unchecked(pw, mu), e_mu_formula(pw, mu)?)
    };
    let gap = gap_alpha_with(pw, mu, opts.gap_threshold);
    if gap.near_exceptional && !opts.allow_near_exceptional {
        return Err(Error::NearExceptional { gap: gap.gap(), threshold: opts.gap_threshold });
    }
    let radius = 0.5 * gap.gap();
    let (eigs, pair) = pair_max_re(pw, mu, eps, m, wu, radius)?;
    let max_re = pair[0].re.max(pair[1].re);
    let pred = if e > 0.0 { eps * e.sqrt() } else { 0.0 };
    let conv_gap = if opts.convergence_check {
        let (_, p2) = pair_max_re(pw, mu, eps, 2 * m, wu, radius)?;
        (p2[0].re.max(p2[1].re) - max_re).abs()
    } else {
        f64::NAN
    };
    Ok(SpectrumReport {
        pw: pw.with_epsilon(eps),
        mu: *mu,
        m,
        eps,
        eigenvalues: eigs,
        unstable_pair: pair,
        max_re,
        pred_max_re: pred,
        residual: (max_re - pred).abs(),
        conv_gap,
        w_underline: wu,
        e_value: e,
        isolation_radius: radius,
        gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub m: usize,
    pub max_re: f64,
    /// `|max_re(M) - max_re(previous M)|`.
    pub delta: Option<f64>,
}

pub fn convergence_study(pw: &PrimaryWave, mu: &FloquetPoint, eps: f64, m_list: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("M list must be strictly increasing".into()));
    }
    let opts = PairOptions { convergence_check: false, ..PairOptions::default() };
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let r = unstable_pair_with(pw, mu, eps, m, &opts)?;
        let delta = rows.last().map(|p| (r.max_re - p.max_re).abs());
        rows.push(ConvergenceRow { m, max_re: r.max_re, delta });
    }
    Ok(rows)
}

/// 64-bit linear congruential generator; each draw advances the state and
/// then reads its top 32 bits.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT);
        (self.state >> 32) as u32
    }

    /// Uniform on `[-1, 1]`.
    pub fn next_unit(&mut self) -> f64 {
        2.0 * (self.next_u32() as f64 / u32::MAX as f64) - 1.0
    }
}

/// Initial data: real then imaginary part of each entry in index order.
pub fn random_state(dim: usize, seed: u64) -> DVector<C> {
    let mut g = Lcg::new(seed);
    DVector::from_fn(dim, |_, _| {
        let re = g.next_unit();
        C::new(re, g.next_unit())
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub rate: f64,
    pub fit_window: (f64, f64),
    pub residual_rms: f64,
    pub seed: u64,
    pub degenerate: bool,
    /// `(t, log‖h‖)` samples.
    pub samples: Vec<(f64, f64)>,
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let (mt, ml) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let (mut stt, mut stl) = (0.0, 0.0);
    for &(t, l) in pts {
        stt += (t - mt) * (t - mt);
        stl += (t - mt) * (l - ml);
    }
    let slope = stl / stt;
    let rms = (pts.iter().map(|&(t, l)| (l - ml - slope * (t - mt)).powi(2)).sum::<f64>() / n).sqrt();
    (slope, rms)
}

pub fn growth_sim(
    pw: &PrimaryWave,
    mu: &FloquetPoint,
    eps: f64,
    m: usize,
    t_end: f64,
    dt: f64,
    seed: u64,
) -> Result<GrowthFit> {
    if !(t_end > 0.0 && dt > 0.0 && dt < t_end) {
        return Err(Error::Precondition(format!("need 0 < dt < t_end, got dt = {dt}, t_end = {t_end}")));
    }
    let t = assemble(&pw.with_epsilon(eps), mu, m)?;
    let bound = dt * t.inf_norm();
    if bound > RK4_BOUND {
        return Err(Error::Stability(bound));
    }
    let steps = (t_end / dt).round().max(4.0) as usize;
    let h_step = t_end / steps as f64;
    let d = t.dim();
    let mut h: Vec<C> = random_state(d, seed).as_slice().to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![C::default(); d], vec![C::default(); d], vec![C::default(); d], vec![C::default(); d], vec![C::default(); d]);

    let mut log_offset = 0.0;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push((0.0, modal_norm(&t, &h).ln()));
    for step in 1..=steps {
        apply_into(&t, &h, &mut k1);
        for i in 0..d {
            tmp[i] = h[i] + k1[i] * (0.5 * h_step);
        }
        apply_into(&t, &tmp, &mut k2);
        for i in 0..d {
            tmp[i] = h[i] + k2[i] * (0.5 * h_step);
        }
        apply_into(&t, &tmp, &mut k3);
        for i in 0..d {
            tmp[i] = h[i] + k3[i] * h_step;
        }
        apply_into(&t, &tmp, &mut k4);
        for i in 0..d {
            h[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h_step / 6.0);
        }
        let nrm = modal_norm(&t, &h);
        if nrm > 1e100 {
            for z in h.iter_mut() {
                *z /= nrm;
            }
            log_offset += nrm.ln();
        }
        samples.push((step as f64 * h_step, log_offset + modal_norm(&t, &h).ln()));
    }

    let start = samples.len() / 2;
    let (rate, rms) = least_squares(&samples[start..]);
    Ok(GrowthFit {
        rate,
        fit_window: (samples[start].0, t_end),
        residual_rms: rms,
        seed,
        degenerate: !(rms <= DEGENERATE_RMS),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonance::solve_at;
    use crate::wavefield::{w_freq, Mode, Sign};

    #[test]
    fn flat_spectrum_is_the_frequency_table() {
        let pw = PrimaryWave::new(1, 2, 1.0, 0.0).unwrap();
        let mu = FloquetPoint::new(0.31, 0.52);
        let m = 4;
        let eigs = eig_all(&assemble(&pw, &mu, m).unwrap()).unwrap();
        let mut expect = Vec::new();
        for n in -(m as i64)..=m as i64 {
            for s in Sign::BOTH {
                expect.push(C::new(0.0, w_freq(&pw, &mu, Mode::new(n, s))));
            }
        }
        assert!(multiset_distance(&eigs, &expect) < 1e-12);
    }

    #[test]
    fn two_by_two_matches_quadratic_roots() {
        let pw = PrimaryWave::new(1, 1, 1.0, 0.0).unwrap();
        let mu = FloquetPoint::new(0.2, 0.9);
        let t = assemble(&pw, &mu, 0).unwrap();
        let a = t.entries.clone();
        let tr = a[(0, 0)] + a[(1, 1)];
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        let disc = (tr * tr - det * 4.0).sqrt();
        let roots = [(tr + disc) / 2.0, (tr - disc) / 2.0];
        assert!(multiset_distance(&eig_all(&t).unwrap(), &roots) < 1e-14);
    }

    #[test]
    fn random_imaginary_matrices_mirror() {
        let mut g = Lcg::new(7);
        for _ in 0..20 {
            let b = nalgebra::DMatrix::from_fn(6, 6, |_, _| g.next_unit());
            let pw = PrimaryWave::new(1, 1, 1.0, 0.0).unwrap();
            let t = TruncatedOperator {
                pw,
                mu: FloquetPoint::ZERO,
                m: 1,
                entries: b.map(|x| C::new(0.0, x)),
            };
            let eigs = eig_all(&t).unwrap();
            assert!(mirror_defect(&eigs) < 1e-12);
        }
    }

    #[test]
    fn general_complex_path() {
        let pw = PrimaryWave::new(1, 1, 1.0, 0.0).unwrap();
        let mut t = assemble(&pw, &FloquetPoint::new(0.3, 0.4), 1).unwrap();
        t.entries[(0, 0)] += C::new(0.5, 0.0);
        let eigs = eig_all(&t).unwrap();
        let tr: C = eigs.iter().sum();
        assert!((tr - t.entries.trace()).norm() < 1e-12);
    }

    #[test]
    fn flat_pair_is_double() {
        let pw = PrimaryWave::new(1, 1, 1.0, 0.0).unwrap();
        let mu = solve_at(&pw, 1.0).unwrap().mu;
        let r = unstable_pair(&pw, &mu, 0.0, 8).unwrap();
        for z in r.unstable_pair {
            assert!((z - C::new(0.0, r.w_underline)).norm() < 1e-12);
        }
        assert_eq!(r.max_re, 0.0);
    }

    #[test]
    fn pair_rejects_large_eps_and_off_curve_points() {
        let pw = PrimaryWave::new(1, 1, 1.0, 0.0).unwrap();
        let mu = solve_at(&pw, 1.0).unwrap().mu;
        assert!(unstable_pair(&pw, &mu, 0.1, 8).is_err());
        assert!(unstable_pair(&pw, &FloquetPoint::new(0.5, 1.0), 0.01, 8).is_err());
    }

    #[test]
    fn halving_shrinks_residual() {
        let pw = PrimaryWave::new(1, 1, 1.0, 0.0).unwrap();
        let mu = solve_at(&pw, 1.0).unwrap().mu;
        let res: Vec<f64> = [4e-2, 2e-2, 1e-2]
            .iter()
            .map(|&e| unstable_pair(&pw, &mu, e, 16).unwrap().residual)
            .collect();
        assert!(res[1] <= 0.35 * res[0] && res[2] <= 0.35 * res[1], "{res:?}");
    }

    #[test]
    fn convergence_rows() {
        let pw = PrimaryWave::new(1, 1, 1.0, 0.0).unwrap();
        let mu = solve_at(&pw, 1.0).unwrap().mu;
        let rows = convergence_study(&pw, &mu, 1e-2, &[4, 8, 16]).unwrap();
        assert!(rows[0].delta.is_none());
        assert!(rows[2].delta.unwrap() <= rows[1].delta.unwrap());
        let flat = convergence_study(&pw, &mu, 0.0, &[4, 8]).unwrap();
        assert!(flat.iter().all(|r| r.max_re == 0.0));
        assert!(convergence_study(&pw, &mu, 1e-2, &[8, 4]).is_err());
    }

    #[test]
    fn lcg_reference_stream() {
        let mut g = Lcg::new(0);
        assert_eq!(g.next_u32(), (LCG_INCREMENT >> 32) as u32);
        let mut a = Lcg::new(42);
        let mut b = Lcg::new(42);
        for _ in 0..100 {
            let x = a.next_unit();
            assert_eq!(x, b.next_unit());
            assert!((-1.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn growth_flat_is_neutral() {
        let pw = PrimaryWave::new(1, 1, 1.0, 0.0).unwrap();
        let mu = solve_at(&pw, 1.0).unwrap().mu;
        let fit = growth_sim(&pw, &mu, 0.0, 4, 50.0, 0.02, 3).unwrap();
        assert!(fit.rate.abs() < 1e-6, "{}", fit.rate);
        assert!(!fit.degenerate);
    }

    #[test]
    fn growth_rejects_unstable_step() {
        let pw = PrimaryWave::new(1, 1, 1.0, 0.0).unwrap();
        let mu = solve_at(&pw, 1.0).unwrap().mu;
        assert!(matches!(growth_sim(&pw, &mu, 0.0, 8, 100.0, 1.0, 1), Err(Error::Stability(_))));
    }
}
