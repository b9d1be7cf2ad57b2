//! Randomized invariants across modules.

use gaptlz::asymptotics::{fisher_hartwig_expansion, szego_expansion, widom_expansion, x_critical};
use gaptlz::cue::{count_distribution, ln_mgf, ln_tail_bound};
use gaptlz::equilibrium::{eq_density, log_potential, support_integral, theta1_solve, EquilibriumData};
use gaptlz::numerics::linalg::{lu_logdet, Mat};
use gaptlz::numerics::{gauss_legendre, Complex, Real};
use gaptlz::parametrix::{bessel_model_psi, psi_hat};
use gaptlz::sine_kernel::{fredholm_logdet, FredholmSpec};
use gaptlz::symbol::{ds_fourier_coeff, fourier_coeff, GapRate, SymbolSpec};
use gaptlz::toeplitz::{auto_precision, log_det, log_det_at, y_matrix};
use proptest::prelude::*;

const P: u32 = 128;

fn spec(theta0: f64, s: f64, w1: f64) -> SymbolSpec {
    let sp = SymbolSpec::gap(Real::new(P, theta0), Real::new(P, s)).unwrap();
    if w1 == 0.0 {
        sp
    } else {
        sp.with_w1(w1).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(24) })]

    #[test]
    fn gauss_legendre_exact_on_monomials(m in 2usize..40, frac in 0.0f64..1.0) {
        let k = ((2 * m - 1) as f64 * frac) as i32;
        let rule = gauss_legendre(m, P).unwrap();
        let got = rule.integrate(&Real::new(P, -1.0), &Real::one(P), |x| x.powi(k));
        let want = if k % 2 == 0 { Real::new(P, 2.0) / (k as f64 + 1.0) } else { Real::zero(P) };
        prop_assert!((got - want).abs() < 1e-30);
    }

    #[test]
    fn fourier_coefficients_affine_in_s(theta0 in 0.2f64..2.9, s in 0.0f64..1.0, w1 in -0.5f64..0.5, k in -12i64..12) {
        let fs = fourier_coeff(&spec(theta0, s, w1), k, P).unwrap();
        let f0 = fourier_coeff(&spec(theta0, 0.0, w1), k, P).unwrap();
        let ds = ds_fourier_coeff(&spec(theta0, s, w1), k, P).unwrap();
        let affine = &f0 + &ds.scale(&Real::new(P, s));
        prop_assert!((&fs - &affine).abs() < 1e-30);
    }

    #[test]
    fn fourier_coefficients_hermitian(theta0 in 0.2f64..2.9, s in 0.0f64..1.0, w1 in -0.5f64..0.5, k in 1i64..12) {
        let sp = spec(theta0, s, w1);
        let a = fourier_coeff(&sp, k, P).unwrap();
        let b = fourier_coeff(&sp, -k, P).unwrap();
        prop_assert!((&a - &b.conj()).abs() < 1e-30);
        prop_assert!(a.im.abs() < 1e-30);
    }

    #[test]
    fn pivot_product_matches_dense_lu(theta0 in 0.5f64..2.6, s in 0.05f64..1.0, w1 in -0.4f64..0.4, n in 2usize..24) {
        let prec = auto_precision(n, &Real::new(P, theta0));
        let sp = spec(theta0, s, w1);
        let r = log_det_at(&sp, n, prec).unwrap();
        let coeffs: Vec<Complex> = (-(n as i64)..=(n as i64)).map(|k| fourier_coeff(&sp, k, prec).unwrap()).collect();
        let t = Mat::from_fn(n, |i, j| coeffs[(i as i64 - j as i64 + n as i64) as usize].clone());
        let dense = lu_logdet(&t).unwrap();
        // Row swaps and negative pivots put the dense sum on another branch.
        let tol = 1e-15 * dense.re.abs().to_f64().max(1.0);
        prop_assert!((&r.ln_d.re - &dense.re).abs() < tol);
        let turns = (dense.im.to_f64() / std::f64::consts::TAU).round();
        prop_assert!((&dense.im - Real::pi(prec) * (2.0 * turns)).abs() < tol);
        prop_assert!(r.ln_d.im.abs() < 1e-25);
        prop_assert!(r.pivot_logs.iter().all(|l| l.im.abs() < 1e-25));
    }

    #[test]
    fn y_matrix_unimodular(theta0 in 0.5f64..2.6, s in 0.1f64..1.0, n in 1usize..10, r in 0.3f64..2.5, a in 0.0f64..6.28) {
        prop_assume!((r - 1.0).abs() > 0.05);
        let z = Complex::from_polar(&Real::new(P, r), &Real::new(P, a));
        let y = y_matrix(&spec(theta0, s, 0.0), n, &z, None, P).unwrap();
        prop_assert!((y.det() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_det_is_deterministic(theta0 in 0.5f64..2.6, s in 0.0f64..1.0, n in 1usize..16) {
        let sp = spec(theta0, s, 0.2);
        let a = log_det(&sp, n, P).unwrap();
        let b = log_det(&sp, n, P).unwrap();
        prop_assert_eq!(format!("{:?}", a.ln_d), format!("{:?}", b.ln_d));
        prop_assert!(a.validated);
    }

    #[test]
    fn expansion_terms_sum_to_value(theta0 in 0.3f64..2.8, s in 0.05f64..0.95, n in 2usize..100) {
        for e in [
            widom_expansion(&spec(theta0, 0.0, 0.2), n, 16, P).unwrap(),
            szego_expansion(&spec(theta0, 1.0, 0.2), n, P),
            fisher_hartwig_expansion(&spec(theta0, s, 0.2), n, P).unwrap(),
        ] {
            let mut acc = Complex::zero(P);
            for (_, t) in &e.terms {
                acc += t;
            }
            prop_assert!((&acc - &e.value).abs().is_zero());
        }
    }

    #[test]
    fn psi_unimodular(re in -20.0f64..20.0, im in -20.0f64..20.0, nx in 0.5f64..40.0) {
        prop_assume!(im.abs() > 1e-3);
        let zeta = Complex::from_f64(P, re, im);
        prop_assert!((bessel_model_psi(&zeta).unwrap().det() - 1.0).abs() < 1e-10);
        prop_assert!((psi_hat(&zeta, &Real::new(P, nx)).unwrap().det() - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(12) })]

    #[test]
    fn equilibrium_normalized_and_gap_drop(theta0 in 0.4f64..2.6, x in 0.2f64..4.0) {
        let t0 = Real::new(P, theta0);
        let d = EquilibriumData::new(GapRate::Finite(Real::new(P, x)), &t0, P).unwrap();
        let mass = support_integral(&d, &[], |_| Real::one(P)).unwrap();
        prop_assert!((mass - 1.0).abs() < 1e-12);
        prop_assert!(!eq_density(&d, &Real::new(P, theta0 * 0.5)).unwrap().is_negative());
        let drop = log_potential(&d, &Real::pi(P)).unwrap() - log_potential(&d, &Real::zero(P)).unwrap();
        let want = x.min(d.x_c.to_f64());
        prop_assert!((drop.to_f64() - want).abs() < 1e-9, "{} vs {}", drop.to_f64(), want);
    }

    #[test]
    fn theta1_decreasing(theta0 in 0.4f64..2.6, a in 0.05f64..0.95, b in 0.05f64..0.95) {
        prop_assume!((a - b).abs() > 1e-3);
        let t0 = Real::new(P, theta0);
        let xc = x_critical(&t0).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let t_lo = theta1_solve(&(&xc * lo), &t0, P).unwrap();
        let t_hi = theta1_solve(&(&xc * hi), &t0, P).unwrap();
        prop_assert!(t_lo > t_hi);
        prop_assert!(t_lo.to_f64() < std::f64::consts::PI - theta0);
    }

    #[test]
    fn fredholm_monotone_in_s(y in 0.1f64..2.5, s1 in 0.0f64..1.0, s2 in 0.0f64..1.0) {
        prop_assume!((s1 - s2).abs() > 1e-3);
        let m = FredholmSpec::default_order(y);
        let f = |s: f64| fredholm_logdet(&FredholmSpec::new(Real::new(P, y), Real::new(P, s), m).unwrap(), P).unwrap();
        let (lo, hi) = if s1 < s2 { (s1, s2) } else { (s2, s1) };
        prop_assert!(f(lo) < f(hi));
        prop_assert!(!f(lo).is_positive());
    }

    #[test]
    fn count_distribution_axioms(theta0 in 0.2f64..2.9, n in 1usize..10) {
        let t0 = Real::new(P, theta0);
        let d = count_distribution(&t0, n, P).unwrap();
        prop_assert!(d.probs.iter().all(|p| !p.is_negative()));
        prop_assert!((d.total() - 1.0).abs() < 1e-12);
        let mean = Real::new(P, n as f64) * &t0 / Real::pi(P);
        prop_assert!((d.mean() - mean).abs() < 1e-10);
    }

    #[test]
    fn chernoff_and_mgf(theta0 in 0.3f64..2.8, n in 1usize..9, lambda in 0.0f64..6.0) {
        let t0 = Real::new(P, theta0);
        let lam = Real::new(P, lambda);
        let d = count_distribution(&t0, n, P).unwrap();
        let direct = ln_mgf(&t0, n, &lam, P).unwrap();
        prop_assert!(((direct.exp() - d.mgf(&lam)) / d.mgf(&lam)).abs() < 1e-10);
        for p in 0..=n {
            let bound = ln_tail_bound(&t0, n, p, Some(&lam), P).unwrap().exp();
            prop_assert!(bound >= d.tail(p) * (1.0 - 1e-20));
        }
    }
}
