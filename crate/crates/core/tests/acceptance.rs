//! Acceptance suite: one PASS/FAIL line per criterion, with the measured
//! numbers. Exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use gaptlz::asymptotics::{fisher_hartwig_expansion, widom_expansion, x_critical};
use gaptlz::cue::{count_distribution, ln_tail_bound, tail_bound};
use gaptlz::equilibrium::{
    log_potential, support_integral, variational_residuals, x_of_theta1_gap_form, EquilibriumData,
};
use gaptlz::numerics::Real;
use gaptlz::parametrix::{matching_residual, standard_checks, Disk, ParametrixContext};
use gaptlz::sine_kernel::{fredholm_logdet, large_gap_expansion, toeplitz_fredholm_gap, FredholmSpec};
use gaptlz::symbol::{GapRate, SymbolSpec};
use gaptlz::toeplitz::{auto_precision, diff_identity_general, diff_identity_w0, ds_log_det, log_det};

type Outcome = Result<(bool, String), String>;

fn half_pi(prec: u32) -> Real {
    Real::pi(prec) * 0.5
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fmt(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn ln_d(spec: &SymbolSpec, n: usize, prec: u32) -> Result<Real, String> {
    let r = log_det(spec, n, prec).map_err(|e| e.to_string())?;
    if !r.validated {
        return Err(format!("ln D_{n} not validated at {prec} bits"));
    }
    Ok(r.ln_d.re)
}

fn theorem_envelope() -> Outcome {
    let ns = [10usize, 20, 40, 80];
    let mut ok = true;
    let mut detail = Vec::new();
    for w1 in [0.0, 0.3] {
        let mut deltas = Vec::new();
        let mut scaled = Vec::new();
        for &n in &ns {
            let theta0 = half_pi(256);
            let prec = auto_precision(n, &theta0) + 64;
            let theta0 = half_pi(prec);
            let s = (-(x_critical(&theta0).unwrap() * (n as f64))).exp();
            let mk = |s: Real| {
                let sp = SymbolSpec::gap(theta0.clone(), s).unwrap();
                if w1 == 0.0 {
                    sp
                } else {
                    sp.with_w1(w1).unwrap()
                }
            };
            let d = (ln_d(&mk(s), n, prec)? - ln_d(&mk(Real::zero(prec)), n, prec)?).abs().to_f64();
            deltas.push(d);
            scaled.push(d * (n as f64).sqrt());
        }
        let bounded = scaled[3] <= 1.5 * scaled[0];
        ok &= strictly_decreasing(&deltas) && bounded;
        detail.push(format!("W1={w1}: delta={} delta*sqrt(n)={}", fmt(&deltas), fmt(&scaled)));
    }
    Ok((ok, detail.join("; ")))
}

fn widom_regime() -> Outcome {
    let mut r = Vec::new();
    for n in [10usize, 20, 40, 80] {
        let prec = auto_precision(n, &half_pi(128));
        let spec = SymbolSpec::gap(half_pi(prec), Real::zero(prec)).unwrap();
        let e = widom_expansion(&spec, n, 8, prec).map_err(|e| e.to_string())?;
        r.push((ln_d(&spec, n, prec)? - e.value.re).abs().to_f64());
    }
    let ok = strictly_decreasing(&r) && r[3] < r[0] / 4.0;
    Ok((ok, format!("|r_n| for n=10,20,40,80: {}", fmt(&r))))
}

fn szego_regime() -> Outcome {
    let prec = 128;
    let spec = SymbolSpec::gap(half_pi(prec), Real::one(prec)).unwrap().with_w1(0.3).unwrap();
    let err = (ln_d(&spec, 40, prec)? - 0.09).abs().to_f64();
    Ok((err < 1e-6, format!("|ln D_40 - 0.09| = {err:.3e}")))
}

fn fisher_hartwig_regime() -> Outcome {
    let mut r = Vec::new();
    for n in [20usize, 40, 80] {
        let prec = 192;
        let spec = SymbolSpec::gap(half_pi(prec), Real::new(prec, 0.5)).unwrap();
        let e = fisher_hartwig_expansion(&spec, n, prec).map_err(|e| e.to_string())?;
        r.push((ln_d(&spec, n, prec)? - e.value.re).abs().to_f64());
    }
    Ok((strictly_decreasing(&r), format!("|r_n| for n=20,40,80: {}", fmt(&r))))
}

fn differential_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [5usize, 8, 12] {
        let prec = auto_precision(n, &half_pi(128)) + 64;
        let theta0 = half_pi(prec);
        let xs = (-(x_critical(&theta0).unwrap() * (n as f64))).exp();
        for s in [Real::new(prec, 0.3), Real::new(prec, 0.05), xs] {
            let spec = SymbolSpec::gap(theta0.clone(), s).unwrap();
            let a = ds_log_det(&spec, n, prec).map_err(|e| e.to_string())?.re;
            let b = diff_identity_general(&spec, n, prec).map_err(|e| e.to_string())?.re;
            let c = diff_identity_w0(&spec, n, 1e-6, prec).map_err(|e| e.to_string())?;
            for (u, v) in [(&a, &b), (&a, &c), (&b, &c)] {
                worst = worst.max(((u - v) / u).abs().to_f64());
            }
        }
    }
    Ok((worst < 1e-8, format!("max pairwise relative difference {worst:.3e}")))
}

fn equilibrium_checks() -> Outcome {
    let prec = 128;
    let mut worst_exact: f64 = 0.0;
    let mut worst_quad: f64 = 0.0;
    let mut margins_ok = true;
    for th in [1.0, std::f64::consts::FRAC_PI_2] {
        let theta0 = Real::new(prec, th);
        let xc = x_critical(&theta0).unwrap();
        let ell_inf = (&theta0 * 0.5).sin().ln() * -2.0;
        let rates = [
            GapRate::Infinite,
            GapRate::Finite(&xc * 1.5),
            GapRate::Finite(xc.clone()),
            GapRate::Finite(&xc * 0.5),
        ];
        for rate in rates {
            let d = EquilibriumData::new(rate.clone(), &theta0, prec).map_err(|e| e.to_string())?;
            let mass = support_integral(&d, &[], |_| Real::one(prec)).map_err(|e| e.to_string())?;
            worst_exact = worst_exact.max((mass - 1.0).abs().to_f64());
            let rep = variational_residuals(&d, 64).map_err(|e| e.to_string())?;
            worst_exact = worst_exact.max(rep.equality_residual);
            let margin = rep.min_margin_away_from_minus_one.or(rep.min_margin);
            margins_ok &= margin.is_none_or(|m| m > 0.0);
            let drop = log_potential(&d, &Real::pi(prec)).map_err(|e| e.to_string())?
                - log_potential(&d, &Real::zero(prec)).map_err(|e| e.to_string())?;
            let want = match &rate {
                GapRate::Finite(x) => x.clone().min(xc.clone()),
                GapRate::Infinite => xc.clone(),
            };
            worst_exact = worst_exact.max((drop - want).abs().to_f64());
            if !matches!(&rate, GapRate::Finite(x) if *x < xc) {
                worst_exact = worst_exact.max((&d.ell - &ell_inf).abs().to_f64());
            }
        }
        // ℓ is continuous across x_c; the two-arc side is a quadrature.
        let near = EquilibriumData::new(GapRate::Finite(&xc * (1.0 - 1e-9)), &theta0, prec).map_err(|e| e.to_string())?;
        worst_quad = worst_quad.max((&near.ell - &ell_inf).abs().to_f64());
        // θ1 ↦ x runs from x_c at θ1 = 0 down to 0 at θ1 = π − θ0.
        let at0 = x_of_theta1_gap_form(&theta0, &Real::zero(prec), prec).map_err(|e| e.to_string())?;
        worst_exact = worst_exact.max((at0 - &xc).abs().to_f64());
        let end = Real::pi(prec) - &theta0 - 1e-12;
        let at_end = x_of_theta1_gap_form(&theta0, &end, prec).map_err(|e| e.to_string())?;
        worst_quad = worst_quad.max(at_end.abs().to_f64());
    }
    let ok = worst_exact < 1e-9 && worst_quad < 1e-6 && margins_ok;
    Ok((ok, format!("max error {worst_exact:.3e} (1e-9 items), {worst_quad:.3e} (1e-6 items), margins positive: {margins_ok}")))
}

fn parametrix_checks() -> Outcome {
    let prec = 160;
    let theta0 = half_pi(prec);
    let xc = x_critical(&theta0).unwrap();
    let spec = SymbolSpec::gap(theta0.clone(), Real::zero(prec)).unwrap();
    let ctx = |n: usize| ParametrixContext::new(&spec, n, &xc, prec).map_err(|e| e.to_string());
    let rows = standard_checks(&ctx(8)?).map_err(|e| e.to_string())?;
    let det = rows.iter().filter(|r| r.object.starts_with("det")).map(|r| r.residual).fold(0.0, f64::max);
    let jump = rows
        .iter()
        .filter(|r| r.object.ends_with("-jump") && r.offset.is_none())
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    let ns = [8usize, 16, 32];
    let mut z0 = Vec::new();
    let mut m1 = Vec::new();
    for &n in &ns {
        let c = ctx(n)?;
        z0.push(matching_residual(&c, Disk::Z0, 12).map_err(|e| e.to_string())?.to_f64());
        m1.push(matching_residual(&c, Disk::MinusOne, 12).map_err(|e| e.to_string())?.to_f64());
    }
    let z0_ratios: Vec<f64> = z0.windows(2).map(|w| w[1] / w[0]).collect();
    let m1_ratios: Vec<f64> = m1.windows(2).map(|w| w[1] / w[0]).collect();
    let z0_ok = z0_ratios.iter().all(|r| (r / 0.5 - 1.0).abs() <= 0.25);
    let target = 0.5f64.sqrt();
    let m1_ok = m1_ratios.iter().all(|r| (r / target - 1.0).abs() <= 0.3);
    let ok = det < 1e-10 && jump < 1e-8 && z0_ok && m1_ok;
    Ok((
        ok,
        format!(
            "det {det:.2e}, jumps {jump:.2e}, z0 ratios {} (0.5±25%), -1 ratios {} ({target:.3}±30%)",
            fmt(&z0_ratios),
            fmt(&m1_ratios)
        ),
    ))
}

fn sine_kernel_checks() -> Outcome {
    let prec = 128;
    let mut res = Vec::new();
    for y in [1.0, 2.0, 3.0] {
        let spec = FredholmSpec::new(Real::new(prec, y), Real::zero(prec), FredholmSpec::default_order(y)).unwrap();
        let v = fredholm_logdet(&spec, prec).map_err(|e| e.to_string())?;
        let e = large_gap_expansion(&spec.y, prec).map_err(|e| e.to_string())?;
        res.push((v - e).abs().to_f64());
    }
    let mut gaps = Vec::new();
    for n in [50usize, 100, 200] {
        gaps.push(toeplitz_fredholm_gap(&Real::one(prec), &Real::zero(prec), n, prec).map_err(|e| e.to_string())?.to_f64());
    }
    let ok = strictly_decreasing(&res) && strictly_decreasing(&gaps);
    Ok((ok, format!("expansion residual y=1,2,3: {}; Toeplitz gap n=50,100,200: {}", fmt(&res), fmt(&gaps))))
}

fn cue_checks() -> Outcome {
    let prec = 128;
    let mut axioms = true;
    let mut dominance = true;
    let mut worst_mean: f64 = 0.0;
    let cases = [(6usize, Real::pi(prec) / 3.0), (8, half_pi(prec))];
    for (n, theta0) in &cases {
        let d = count_distribution(theta0, *n, prec).map_err(|e| e.to_string())?;
        axioms &= d.probs.iter().all(|p| !p.is_negative()) && (d.total() - 1.0).abs() < 1e-12;
        let mean = Real::new(prec, *n as f64) * theta0 / Real::pi(prec);
        worst_mean = worst_mean.max((d.mean() - mean).abs().to_f64());
        let xc = x_critical(theta0).unwrap();
        for p in 0..=*n {
            for lam in [None, Some(Real::new(prec, 0.5)), Some(Real::new(prec, 3.0))] {
                let lam = lam.unwrap_or_else(|| &xc * (*n as f64));
                let b = tail_bound(theta0, *n, p, Some(&lam), prec).map_err(|e| e.to_string())?;
                dominance &= b >= d.tail(p);
            }
        }
    }
    let theta0 = half_pi(prec);
    let phi = (&theta0 * 0.5).sin().ln().to_f64();
    let mut diffs = Vec::new();
    for n in [8usize, 16, 32] {
        let lb = ln_tail_bound(&theta0, n, n, None, prec).map_err(|e| e.to_string())?.to_f64();
        diffs.push((lb / (n * n) as f64 - phi).abs());
    }
    let ok = axioms && worst_mean < 1e-10 && dominance && strictly_decreasing(&diffs);
    Ok((
        ok,
        format!(
            "axioms {axioms}, mean error {worst_mean:.2e}, dominance {dominance}, |rate - ln sin(theta0/2)| n=8,16,32: {}",
            fmt(&diffs)
        ),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("error envelope at s = exp(-x_c n)", theorem_envelope),
        ("Widom regime residual", widom_regime),
        ("Szego regime", szego_regime),
        ("Fisher-Hartwig regime residual", fisher_hartwig_regime),
        ("differential identities", differential_identities),
        ("equilibrium measure", equilibrium_checks),
        ("parametrix residuals", parametrix_checks),
        ("sine kernel", sine_kernel_checks),
        ("CUE counting statistics", cue_checks),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(o) => o,
            Err(_) => Err("panicked".into()),
        };
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        println!("{} {}. {name} ({secs:.1}s): {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
