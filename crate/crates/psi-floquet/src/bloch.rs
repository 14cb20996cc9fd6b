//! The Bloch operator `L_{μ,ε}` restricted to the harmonics `n k + μ`,
//! `|n| ≤ M`, as a dense block-tridiagonal matrix.
//!
//! Unknowns are ordered harmonic-major, component-minor: index `2(n+M)` is
//! the buoyancy coefficient of harmonic `n`, `2(n+M)+1` the vorticity one.
//! Because the traveling wave is linear in `ε`, the operator is exactly
//! `L0 + L1` with `L0` block diagonal and `L1` coupling `n → n±1`.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::wavefield::{dot, norm, phase_speed, FloquetPoint, PrimaryWave};

type C = Complex64;

const fn ci(x: f64) -> C {
    C::new(0.0, x)
}

/// Signature of a 2×2 jet block builder.
pub type BlockFn = fn(&PrimaryWave, &FloquetPoint, i64) -> Result<Matrix2<C>>;

/// The pair of block builders used for assembly and for the brute-force
/// entanglement path. Swapping one out is how mutation tests corrupt the
/// operator without touching the closed forms.
#[derive(Clone, Copy)]
pub struct Jets {
    pub l0: BlockFn,
    pub l1: BlockFn,
}

impl Jets {
    pub const EXACT: Jets = Jets { l0: l0_block, l1: l1_block };
}

fn shifted_checked(pw: &PrimaryWave, mu: &FloquetPoint, n: i64) -> Result<([f64; 2], f64)> {
    let v = mu.shifted(pw, n);
    let r2 = dot(v, v);
    if r2 == 0.0 {
        return Err(Error::LatticeCollision { n });
    }
    Ok((v, r2))
}

/// Zeroth jet on harmonic `n`: `i [[c·v, -N² v1/|v|²], [-v1, c·v]]`, `v = nk+μ`.
pub fn l0_block(pw: &PrimaryWave, mu: &FloquetPoint, n: i64) -> Result<Matrix2<C>> {
    let (v, r2) = shifted_checked(pw, mu, n)?;
    let cv = dot(phase_speed(pw), v);
    let nn = pw.buoyancy_n;
    Ok(Matrix2::new(ci(cv), ci(-nn * nn * v[0] / r2), ci(-v[0]), ci(cv)))
}

/// First jet leaving harmonic `q1`, identical for both targets `q1 ± 1`.
pub fn l1_block(pw: &PrimaryWave, mu: &FloquetPoint, q1: i64) -> Result<Matrix2<C>> {
    let (_, r2) = shifted_checked(pw, mu, q1)?;
    let kp = dot(pw.k_perp(), mu.as_vec());
    let (nn, kn) = (pw.buoyancy_n, pw.k_norm());
    let h = 0.5 * pw.epsilon;
    let diag = -kp / (nn * kn);
    Ok(Matrix2::new(
        ci(h * diag),
        ci(h * kp / r2),
        C::new(0.0, 0.0),
        ci(h * (diag + kn * kp / (nn * r2))),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub pw: PrimaryWave,
    pub mu: FloquetPoint,
    pub m: usize,
    pub entries: DMatrix<C>,
}

/// Row/column offset of harmonic `n` in a truncation of size `M`.
#[inline]
pub fn harmonic_offset(m: usize, n: i64) -> usize {
    2 * (n + m as i64) as usize
}

pub fn dim(m: usize) -> usize {
    2 * (2 * m + 1)
}

pub fn assemble(pw: &PrimaryWave, mu: &FloquetPoint, m: usize) -> Result<TruncatedOperator> {
    assemble_with(&Jets::EXACT, pw, mu, m)
}

pub fn assemble_with(jets: &Jets, pw: &PrimaryWave, mu: &FloquetPoint, m: usize) -> Result<TruncatedOperator> {
    let d = dim(m);
    let mut a = DMatrix::<C>::zeros(d, d);
    let mi = m as i64;
    for n in -mi..=mi {
        let src = harmonic_offset(m, n);
        let b0 = (jets.l0)(pw, mu, n)?;
        a.fixed_view_mut::<2, 2>(src, src).copy_from(&b0);
        let b1 = (jets.l1)(pw, mu, n)?;
        for dst in [n - 1, n + 1] {
            if dst.abs() <= mi {
                a.fixed_view_mut::<2, 2>(harmonic_offset(m, dst), src).copy_from(&b1);
            }
        }
    }
    Ok(TruncatedOperator { pw: *pw, mu: *mu, m, entries: a })
}

impl TruncatedOperator {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Block `(dst, src)`.
    pub fn block(&self, dst: i64, src: i64) -> Matrix2<C> {
        self.entries
            .fixed_view::<2, 2>(harmonic_offset(self.m, dst), harmonic_offset(self.m, src))
            .into_owned()
    }

    pub fn max_abs_real(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, z| acc.max(z.re.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.entries.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// The imaginary part `B` of `A = iB`; only meaningful when the real
    /// part vanishes.
    pub fn imag_part(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.im)
    }

    /// Harmonic offsets `dst - src` of all nonzero blocks.
    pub fn occupied_bands(&self) -> Vec<i64> {
        let mi = self.m as i64;
        let mut out = Vec::new();
        for dst in -mi..=mi {
            for src in -mi..=mi {
                if self.block(dst, src).iter().any(|z| *z != C::new(0.0, 0.0)) {
                    let b = dst - src;
                    if !out.contains(&b) {
                        out.push(b);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Matrix dump with header `row,col,re,im`, row-major.
    pub fn to_csv(&self) -> String {
        let d = self.dim();
        let mut s = String::from("row,col,re,im\n");
        for i in 0..d {
            for j in 0..d {
                let z = self.entries[(i, j)];
                s.push_str(&format!("{i},{j},{},{}\n", fmt17(z.re), fmt17(z.im)));
            }
        }
        s
    }

    pub fn adjoint(&self) -> TruncatedOperator {
        TruncatedOperator { entries: self.entries.adjoint(), ..self.clone() }
    }
}

/// 17 significant digits, round-trip safe.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Keeps only blocks with `dst - src = band`.
pub fn band_project(t: &TruncatedOperator, band: i64) -> Result<TruncatedOperator> {
    let mi = t.m as i64;
    if band.abs() > 2 * mi {
        return Err(Error::Precondition(format!("band {band} outside |n| <= {}", 2 * mi)));
    }
    let mut out = DMatrix::<C>::zeros(t.dim(), t.dim());
    for src in -mi..=mi {
        let dst = src + band;
        if dst.abs() <= mi {
            let (r, c) = (harmonic_offset(t.m, dst), harmonic_offset(t.m, src));
            out.fixed_view_mut::<2, 2>(r, c).copy_from(&t.entries.fixed_view::<2, 2>(r, c));
        }
    }
    Ok(TruncatedOperator { entries: out, ..t.clone() })
}

/// `T h`, exploiting the block-tridiagonal layout.
pub fn apply(t: &TruncatedOperator, h: &DVector<C>) -> Result<DVector<C>> {
    let d = t.dim();
    if h.len() != d {
        return Err(Error::Dimension { expected: d, got: h.len() });
    }
    let mut out = DVector::<C>::zeros(d);
    apply_into(t, h.as_slice(), out.as_mut_slice());
    Ok(out)
}

pub(crate) fn apply_into(t: &TruncatedOperator, h: &[C], out: &mut [C]) {
    let d = t.dim();
    let a = &t.entries;
    for row in 0..d {
        let blk = row / 2;
        let c0 = blk.saturating_sub(1) * 2;
        let c1 = ((blk + 2) * 2).min(d);
        let mut acc = C::new(0.0, 0.0);
        for col in c0..c1 {
            acc += a[(row, col)] * h[col];
        }
        out[row] = acc;
    }
}

/// Norm of `h` in the unperturbed eigenbasis: per harmonic
/// `|b|²/N² + |ω|²/|nk+μ|²`, which equals `Σσ |coefficient of f^σ_n|²`.
/// At `ε = 0` it is an exact invariant of the flow.
pub fn modal_norm(t: &TruncatedOperator, h: &[C]) -> f64 {
    let mi = t.m as i64;
    let nn2 = t.pw.buoyancy_n * t.pw.buoyancy_n;
    let mut s = 0.0;
    for n in -mi..=mi {
        let o = harmonic_offset(t.m, n);
        let v = t.mu.shifted(&t.pw, n);
        let r = norm(v);
        s += h[o].norm_sqr() / nn2 + h[o + 1].norm_sqr() / (r * r);
    }
    s.sqrt()
}
