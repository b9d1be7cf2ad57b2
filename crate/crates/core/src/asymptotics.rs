//! Closed-form large-n expansions of ln D_n in the Widom (s = 0), Szegő
//! (s = 1) and Fisher–Hartwig (fixed 0 < s < 1) regimes, and the error
//! envelope of the s ≤ e^{−x_c n} extension.

use crate::error::{Error, Result};
use crate::numerics::special::{ln_barnes_g, widom_dyson_constant};
use crate::numerics::{Complex, Real};
use crate::symbol::SymbolSpec;

/// Value with a named breakdown; `value` is the sum of `terms`.
#[derive(Clone, Debug)]
pub struct ExpansionValue {
    pub value: Complex,
    pub terms: Vec<(String, Complex)>,
    /// Bound on the discarded tail of an infinite series (zero when all sums
    /// are finite).
    pub truncation_bound: Real,
}

impl ExpansionValue {
    fn from_terms(terms: Vec<(String, Complex)>, truncation_bound: Real) -> ExpansionValue {
        let prec = terms.first().map(|t| t.1.prec()).unwrap_or(128);
        let mut value = Complex::zero(prec);
        for (_, t) in &terms {
            value += t;
        }
        ExpansionValue { value, terms, truncation_bound }
    }

    pub fn term(&self, name: &str) -> Option<&Complex> {
        self.terms.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

/// x_c = −2 ln tan(θ0/4).
pub fn x_critical(theta0: &Real) -> Result<Real> {
    let pi = Real::pi(theta0.prec());
    if !theta0.is_positive() || *theta0 >= pi {
        return Err(Error::DomainError("x_critical needs 0 < theta0 < pi".into()));
    }
    Ok((theta0 * 0.25).tan().ln() * -2.0)
}

/// Fourier coefficients W̃_k, k = 0..=kmax, of
/// W̃(e^{iθ}) = W(e^{2i arcsin(sin(θ0/2) sin(θ/2))}).
///
/// W̃ is periodic and analytic, so the trapezoidal rule converges
/// geometrically; the node count doubles until two successive counts agree.
pub fn w_tilde_coefficients(spec: &SymbolSpec, kmax: usize, prec: u32) -> Result<Vec<Real>> {
    if !spec.w_is_symmetric_real() {
        return Err(Error::SymmetryViolation);
    }
    let work = prec + 16;
    let st = (spec.theta0.with_prec(work) * 0.5).sin();
    let pi = Real::pi(work);
    let trapezoid = |m: usize| -> Vec<Real> {
        let mut out = vec![Real::zero(work); kmax + 1];
        for j in 0..m {
            let theta = &pi * (2 * j) as f64 / m as f64;
            let psi = (&st * (&theta * 0.5).sin()).asin() * 2.0;
            // W real symmetric ⇒ W(e^{iψ}) = W_0 + 2Σ W_k cos kψ
            let v = spec.eval_w(&Complex::cis(&psi)).re;
            for (k, o) in out.iter_mut().enumerate() {
                *o += &v * (&theta * (k as f64)).cos();
            }
        }
        out.into_iter().map(|x| x / (m as f64)).collect()
    };
    let mut m = 4 * (kmax + 8);
    let mut prev = trapezoid(m);
    let tol = Real::exp2i(work, -(prec as i32) + 4);
    for _ in 0..12 {
        m *= 2;
        let next = trapezoid(m);
        let diff = prev.iter().zip(&next).fold(Real::zero(work), |acc, (a, b)| acc.max((a - b).abs()));
        if diff < tol {
            return Ok(next.into_iter().map(|x| x.with_prec(prec)).collect());
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged("W-tilde Fourier coefficients".into()))
}

/// Tail bound for Σ_{k>kmax} k c_k² given |c_k| ≤ C r^k fitted on the last
/// two computed coefficients.
fn geometric_tail(c: &[Real], prec: u32) -> Real {
    let k = c.len() - 1;
    if k < 2 {
        return Real::zero(prec);
    }
    let a = c[k - 1].abs().to_f64();
    let b = c[k].abs().to_f64();
    if b == 0.0 && a == 0.0 {
        return Real::zero(prec);
    }
    let r = if a > 0.0 { (b / a).clamp(1e-300, 0.9) } else { 0.9 };
    let cst = b / r.powi(k as i32).max(1e-300);
    // Σ_{j>k} j C² r^{2j}
    let q = r * r;
    let qk = q.powi(k as i32 + 1);
    let sum = cst * cst * qk * ((k as f64 + 1.0) - k as f64 * q) / ((1.0 - q) * (1.0 - q));
    Real::new(prec, sum.abs())
}

/// Widom's expansion of ln D_n(0, θ0, W) without the o(1) term.
pub fn widom_expansion(spec: &SymbolSpec, n: usize, k_max: usize, prec: u32) -> Result<ExpansionValue> {
    if k_max == 0 {
        return Err(Error::DomainError("k_max must be at least 1".into()));
    }
    let theta0 = spec.theta0.with_prec(prec);
    let nf = n as f64;
    let half = &theta0 * 0.5;
    let wt = if spec.w_is_zero() {
        vec![Real::zero(prec); k_max + 1]
    } else {
        w_tilde_coefficients(spec, k_max, prec)?
    };
    let mut series = Real::zero(prec);
    for (k, c) in wt.iter().enumerate().skip(1) {
        series += c.square() * (k as f64);
    }
    let c = |r: Real| r.to_complex();
    let terms = vec![
        ("leading".to_string(), c(half.sin().ln() * (nf * nf))),
        ("linear".to_string(), c(&wt[0] * nf)),
        ("log".to_string(), c(Real::new(prec, nf).ln() * -0.25)),
        ("series".to_string(), c(series)),
        ("cos".to_string(), c(half.cos().ln() * -0.25)),
        ("constant".to_string(), c(widom_dyson_constant(prec))),
    ];
    Ok(ExpansionValue::from_terms(terms, geometric_tail(&wt, prec)))
}

fn w_sums(spec: &SymbolSpec, prec: u32) -> (Complex, Complex) {
    let w0 = spec.w_coeff(0).map(|c| c.with_prec(prec)).unwrap_or_else(|| Complex::zero(prec));
    let mut cross = Complex::zero(prec);
    for (k, c) in &spec.w {
        if *k > 0 {
            if let Some(d) = spec.w_coeff(-k) {
                cross += c.with_prec(prec) * d.with_prec(prec) * (*k as f64);
            }
        }
    }
    (w0, cross)
}

/// Szegő: n W_0 + Σ_{k≥1} k W_k W_{−k}.
pub fn szego_expansion(spec: &SymbolSpec, n: usize, prec: u32) -> ExpansionValue {
    let (w0, cross) = w_sums(spec, prec);
    let terms = vec![("linear".to_string(), w0 * (n as f64)), ("series".to_string(), cross)];
    ExpansionValue::from_terms(terms, Real::zero(prec))
}

/// Fisher–Hartwig expansion for fixed s ∈ (0, 1), with β = ∓ ln s/(2πi) at
/// e^{±iθ0}.
///
/// Besides nW_0 the linear term carries the gap mean n(1 − θ0/π) ln s. The
/// jump constant is (ln s)² ln(2 sin θ0)/(2π²), i.e. |z0 − z̄0|^{2β1β2}, and
/// the W cross term is −(ln s/π)Σ(W_k + W_{−k}) sin kθ0, which is
/// Σ k(V_k W_{−k} + W_k V_{−k}) for V = ln s on the gap.
pub fn fisher_hartwig_expansion(spec: &SymbolSpec, n: usize, prec: u32) -> Result<ExpansionValue> {
    let s = spec.s().ok_or_else(|| Error::InvalidSymbol("need a = 1 and real b = s".into()))?;
    if !s.is_positive() || s > 1.0 {
        return Err(Error::DomainError("fisher_hartwig_expansion needs 0 < s <= 1".into()));
    }
    let s = s.with_prec(prec);
    let theta0 = spec.theta0.with_prec(prec);
    let pi = Real::pi(prec);
    let ln_s = s.ln();
    let pi2 = pi.square();
    let (w0, cross) = w_sums(spec, prec);
    let mut sine_sum = Complex::zero(prec);
    for (k, c) in &spec.w {
        if *k != 0 {
            sine_sum += c.with_prec(prec) * (&theta0 * (k.abs() as f64)).sin();
        }
    }
    // β = ln s / (2πi) = −i ln s/(2π)
    let beta = Complex::new(Real::zero(prec), -(&ln_s / (&pi * 2.0)));
    let g = (ln_barnes_g(&beta)? + ln_barnes_g(&(-&beta))?) * 2.0;
    let c = |r: Real| r.to_complex();
    let terms = vec![
        ("linear".to_string(), w0 * (n as f64)),
        ("gap_mean".to_string(), c((Real::one(prec) - &theta0 / &pi) * &ln_s * (n as f64))),
        ("log".to_string(), c(ln_s.square() / (&pi2 * 2.0) * Real::new(prec, n as f64).ln())),
        ("jump".to_string(), c(ln_s.square() * (theta0.sin() * 2.0).ln() / (&pi2 * 2.0))),
        ("cross".to_string(), -(sine_sum * (&ln_s / &pi))),
        ("series".to_string(), cross),
        ("barnes".to_string(), g),
    ];
    Ok(ExpansionValue::from_terms(terms, Real::zero(prec)))
}

/// n^{−1/2} e^{x_c n} s, or (π − θ0)^{1/2} times that when `near_pi`.
pub fn theorem_error_envelope(n: usize, theta0: &Real, s: &Real, near_pi: bool) -> Result<Real> {
    let prec = theta0.prec().max(s.prec());
    let xc = x_critical(&theta0.with_prec(prec))?;
    let threshold = (-(&xc * (n as f64))).exp();
    if *s > threshold * (1.0 + 1e-12) {
        return Err(Error::DomainError("s exceeds exp(-x_c n)".into()));
    }
    let mut env = (xc * (n as f64)).exp() * s / (n as f64).sqrt();
    if near_pi {
        env *= (Real::pi(prec) - theta0).sqrt();
    }
    Ok(env)
}
