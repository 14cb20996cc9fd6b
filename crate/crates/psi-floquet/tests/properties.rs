use num_complex::Complex64 as C;
use proptest::prelude::*;

use psi_floquet::bloch::{assemble, l0_block};
use psi_floquet::entanglement::{closed_form, KeyCoefficient};
use psi_floquet::reduced::{b_coeffs, e_mu, iota0};
use psi_floquet::resonance::{residual_f, small_y_coefficient, solve_branch, RESIDUAL_TOL};
use psi_floquet::spectral::{eig_all, mirror_defect, multiset_distance};
use psi_floquet::wavefield::{eigvec_coeff, omega, w_freq};
use psi_floquet::{Branch, FloquetPoint, Mode, PrimaryWave, Sign};

fn wave_strategy() -> impl Strategy<Value = PrimaryWave> {
    (1i64..=3, 1i64..=4, 0.5f64..2.0).prop_map(|(m, n, nn)| PrimaryWave::new(m, n, nn, 0.0).unwrap())
}

/// Either branch, `|y|` log-uniform over `[10^lo, 100]`.
fn branch_y(lo: f64) -> impl Strategy<Value = (Branch, f64)> {
    (any::<bool>(), lo..2.0).prop_map(|(plus, e)| {
        let y = 10f64.powf(e);
        if plus {
            (Branch::Plus, y)
        } else {
            (Branch::Minus, -y)
        }
    })
}

fn vec2() -> impl Strategy<Value = [f64; 2]> {
    [-5.0f64..5.0, -5.0f64..5.0].prop_filter("nonzero", |v| v[0].hypot(v[1]) > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn omega_is_odd_and_zero_homogeneous(v in vec2(), nn in 0.1f64..4.0, s in 1e-3f64..1e3) {
        let w = omega(v, nn);
        prop_assert_eq!(omega([-v[0], -v[1]], nn), -w);
        prop_assert!((omega([s * v[0], s * v[1]], nn) - w).abs() <= 1e-15 * nn);
        prop_assert!(w.abs() <= nn);
    }

    #[test]
    fn flat_frequencies_are_antisymmetric_in_n(pw in wave_strategy(), n in 1i64..6) {
        for s in Sign::BOTH {
            let a = w_freq(&pw, &FloquetPoint::ZERO, Mode::new(n, s));
            let b = w_freq(&pw, &FloquetPoint::ZERO, Mode::new(-n, s));
            prop_assert!((a + b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn eigenvectors_diagonalize_l0(pw in wave_strategy(), mu in vec2(), n in -6i64..=6) {
        let mu = FloquetPoint::new(mu[0] * 0.3, mu[1] * 0.3);
        prop_assume!(norm_shift(&pw, &mu, n) > 1e-3);
        let b = l0_block(&pw, &mu, n).unwrap();
        for s in Sign::BOTH {
            let mode = Mode::new(n, s);
            let f = eigvec_coeff(&pw, &mu, mode);
            let w = w_freq(&pw, &mu, mode);
            let r = b * f - f * C::new(0.0, w);
            prop_assert!(r.norm() <= 1e-13 * f.norm() * b.norm().max(1.0));
        }
    }

    #[test]
    fn solved_points_are_resonant((branch, y) in branch_y(-3.0), pw in wave_strategy()) {
        match solve_branch(&pw, y, branch) {
            Ok(p) => prop_assert!(residual_f(&pw, p.mu.mu1, y).unwrap().abs() <= 10.0 * RESIDUAL_TOL),
            Err(e) => prop_assert!(matches!(e, psi_floquet::Error::NoRoot { .. }), "{e}"),
        }
    }

    #[test]
    fn plus_branch_is_increasing(pw in wave_strategy(), a in 1e-3f64..50.0, d in 1e-3f64..10.0) {
        let x1 = solve_branch(&pw, a, Branch::Plus).unwrap().mu.mu1;
        let x2 = solve_branch(&pw, a + d, Branch::Plus).unwrap().mu.mu1;
        prop_assert!(x1 < x2);
    }

    #[test]
    fn growth_function_factorizes((branch, y) in branch_y(-3.0), pw in wave_strategy()) {
        let Ok(p) = solve_branch(&pw, y, branch) else { return Ok(()) };
        let e = e_mu(&pw, &p.mu).unwrap();
        let (b1, b0) = b_coeffs(&pw, &p.mu).unwrap();
        prop_assert!((e + b1 * b0).abs() <= 1e-13 * e.abs().max(1.0));
    }

    #[test]
    fn closed_forms_match_brute_force((branch, y) in branch_y(-2.0), pw in wave_strategy()) {
        let Ok(p) = solve_branch(&pw, y, branch) else { return Ok(()) };
        for which in KeyCoefficient::ALL {
            let a = closed_form(&pw, &p.mu, which).unwrap();
            let b = which.bruteforce(&pw, &p.mu).unwrap();
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(b.norm()), "{which:?}: {a} vs {b}");
        }
    }

    #[test]
    fn operator_invariants(pw in wave_strategy(), mu in vec2(), eps in 0.0f64..0.05) {
        let mu = FloquetPoint::new(mu[0] * 0.37, mu[1] * 0.37);
        let m = 4;
        prop_assume!((-(m as i64)..=m as i64).all(|n| norm_shift(&pw, &mu, n) > 1e-3));
        let t = assemble(&pw.with_epsilon(eps), &mu, m).unwrap();
        let t0 = assemble(&pw.with_epsilon(0.0), &mu, m).unwrap();
        let t1 = assemble(&pw.with_epsilon(0.05), &mu, m).unwrap();
        let scale = t1.max_abs();
        prop_assert!(t.max_abs_real() <= 1e-15 * scale);
        let bands = t.occupied_bands();
        prop_assert!(bands.iter().all(|b| b.abs() <= 1));
        let lhs = &t.entries - &t0.entries;
        let rhs = (&t1.entries - &t0.entries) * C::new(eps / 0.05, 0.0);
        prop_assert!((lhs - rhs).iter().all(|z| z.norm() <= 1e-15 * scale));
        let eigs = eig_all(&t).unwrap();
        prop_assert!(mirror_defect(&eigs) <= 1e-8);
        let neg = eig_all(&assemble(&pw.with_epsilon(eps), &mu.neg(), m).unwrap()).unwrap();
        let conj: Vec<C> = eigs.iter().map(|z| z.conj()).collect();
        prop_assert!(multiset_distance(&neg, &conj) <= 1e-8);
    }

    #[test]
    fn iota_grows_along_rays(pw in wave_strategy(), mu in vec2(), s in 1.01f64..3.0) {
        let a = FloquetPoint::new(mu[0] * 0.2, mu[1] * 0.2);
        let b = FloquetPoint::new(a.mu1 * s, a.mu2 * s);
        let (p11, p00) = iota0(&pw, &a);
        let (q11, q00) = iota0(&pw, &b);
        prop_assert!(p11 > 0.0 && p00 > 0.0);
        prop_assert!(q00 > p00);
        prop_assert!(q11.is_finite());
    }
}

fn norm_shift(pw: &PrimaryWave, mu: &FloquetPoint, n: i64) -> f64 {
    let v = mu.shifted(pw, n);
    v[0].hypot(v[1])
}

#[test]
fn growth_function_is_positive_in_both_asymptotic_regimes() {
    for (m, n) in [(1, 1), (2, 2), (1, 3), (2, 1)] {
        let pw = PrimaryWave::new(m, n, 1.0, 0.0).unwrap();
        let ys = (1..=20).map(|i| 0.5 * i as f64 / 20.0).chain((0..=20).map(|i| 10.0 * 100f64.powf(i as f64 / 20.0)));
        for y in ys {
            let mu = solve_branch(&pw, y, Branch::Plus).unwrap().mu;
            assert!(e_mu(&pw, &mu).unwrap() > 0.0, "k = ({m},{n}), y = {y}");
        }
    }
}

#[test]
fn small_y_law_converges() {
    for (m, n) in [(1, 1), (2, 2), (1, 3)] {
        let pw = PrimaryWave::new(m, n, 1.0, 0.0).unwrap();
        let c = small_y_coefficient(&pw);
        for branch in [Branch::Plus, Branch::Minus] {
            let s = branch.sign();
            let r: Vec<f64> = [0.1, 0.05, 0.025]
                .iter()
                .map(|&a| {
                    let y = s * a;
                    solve_branch(&pw, y, branch).unwrap().mu.mu1 / (y * y)
                })
                .collect();
            let raw = (r[2] - s * c).abs();
            let extrapolated = (2.0 * r[2] - r[1] - s * c).abs();
            assert!(raw <= 0.02 * c, "k = ({m},{n}) {branch:?}: {r:?}");
            // where the linear remainder cancels both sit at the floor
            assert!(extrapolated < raw || raw <= 1e-4 * c, "k = ({m},{n}) {branch:?}: {r:?}");
            assert!(extrapolated <= 1e-3 * c, "k = ({m},{n}) {branch:?}: {r:?}");
        }
    }
}

#[test]
fn lattice_points_are_not_resonant() {
    for (m, n) in [(1, 1), (2, 2), (1, 3), (3, 1)] {
        let pw = PrimaryWave::new(m, n, 1.0, 0.0).unwrap();
        for l in [-3i64, -2, 1, 2, 3] {
            let f = residual_f(&pw, (l * m) as f64, (l * n) as f64).unwrap();
            assert!(f.abs() > 0.1, "k = ({m},{n}), l = {l}: F = {f}");
        }
    }
}
