//! Gamma, Barnes G, Bernoulli numbers and ζ′(−1).

use super::scalar::{Complex, Real};
use crate::error::{Error, Result};

/// B_{2k} for k = 1..=count, via B_{2k} = (−1)^{k+1} 2 (2k)! ζ(2k) / (2π)^{2k}.
pub fn bernoulli_even(count: usize, prec: u32) -> Vec<Real> {
    let work = prec + 32;
    let two_pi = Real::pi(work) * 2.0;
    let mut fact = Real::one(work);
    let mut pow = Real::one(work);
    let mut out = Vec::with_capacity(count);
    for k in 1..=count {
        let m = 2 * k;
        fact *= ((m - 1) * m) as f64;
        pow = &pow * &two_pi * &two_pi;
        let z = Real::new(work, m as f64).zeta();
        let mut b = &fact * &z * 2.0 / &pow;
        if k % 2 == 0 {
            b = -b;
        }
        out.push(b.with_prec(prec));
    }
    out
}

/// Radius above which Stirling-type series reach 2^-prec.
fn stirling_radius(prec: u32) -> f64 {
    (prec as f64 + 16.0) * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI) + 4.0
}

/// Shift so that |z + shift| is above the Stirling radius.
fn shift_for(z: &Complex, prec: u32) -> u64 {
    let r = stirling_radius(prec);
    let re = z.re.to_f64();
    let im = z.im.to_f64();
    if re * re + im * im >= r * r && re > 0.0 {
        return 0;
    }
    let need = (r * r - im * im).max(0.0).sqrt();
    (need - re).max(1.0).ceil() as u64
}

/// ln Γ(z) on Re z > 0: the branch analytic there and real on ℝ⁺.
pub fn ln_gamma(z: &Complex) -> Result<Complex> {
    if !z.re.is_positive() {
        return Err(Error::DomainError("ln_gamma requires Re z > 0".into()));
    }
    let prec = z.prec();
    let work = prec + 24;
    let z = z.with_prec(work);
    let shift = shift_for(&z, work);
    let w = &z + Real::from_i64(work, shift as i64);
    let mut acc = stirling_ln_gamma(&w, work);
    for j in 0..shift {
        acc -= (&z + Real::from_i64(work, j as i64)).ln();
    }
    Ok(acc.with_prec(prec))
}

fn stirling_ln_gamma(w: &Complex, prec: u32) -> Complex {
    let ln_w = w.ln();
    let half_ln_2pi = (Real::pi(prec) * 2.0).ln() * 0.5;
    let mut acc = (w - 0.5) * &ln_w - w + Complex::from(half_ln_2pi);
    let tol = Real::exp2i(prec, -(prec as i32) - 4);
    let winv = w.recip();
    let winv2 = &winv * &winv;
    let max_k = (std::f64::consts::PI * w.abs().to_f64()) as usize + 8;
    let b = bernoulli_even(max_k, prec);
    let mut pw = winv.clone();
    for (idx, bk) in b.iter().enumerate() {
        let k = (idx + 1) as f64;
        let t = pw.scale(bk) / (2.0 * k * (2.0 * k - 1.0));
        acc += &t;
        if t.abs() < tol {
            break;
        }
        pw = &pw * &winv2;
    }
    acc
}

/// Large-|w| expansion of ln G(1 + w).
fn asymptotic_ln_g(w: &Complex, prec: u32, zeta_p: &Real) -> Complex {
    let ln_w = w.ln();
    let w2 = w * w;
    let ln_2pi = (Real::pi(prec) * 2.0).ln();
    let mut acc = &w2 * &ln_w * 0.5 - &w2 * 0.75 + w.scale(&ln_2pi) * 0.5 - &ln_w / 12.0
        + Complex::from(zeta_p.clone());
    let tol = Real::exp2i(prec, -(prec as i32) - 4);
    let winv2 = (&w2).recip();
    let max_k = (std::f64::consts::PI * w.abs().to_f64()) as usize + 8;
    let b = bernoulli_even(max_k + 1, prec);
    let mut pw = winv2.clone();
    for k in 1..=max_k {
        // B_{2k+2} / (4k(k+1) w^{2k})
        let kf = k as f64;
        let t = pw.scale(&b[k]) / (4.0 * kf * (kf + 1.0));
        acc += &t;
        if t.abs() < tol {
            break;
        }
        pw = &pw * &winv2;
    }
    acc
}

/// ln G(1 + z), the branch analytic on Re z > −1 with ln G(1) = 0, by upward
/// recurrence G(1 + z + N) = G(1 + z) Π_{j=1}^{N} Γ(z + j) and the large-argument
/// expansion.
pub fn ln_barnes_g(z: &Complex) -> Result<Complex> {
    let prec = z.prec();
    let re = z.re.to_f64();
    let im = z.im.to_f64();
    if im == 0.0 && re <= -1.0 && re == re.floor() {
        return Err(Error::PoleError(format!("G(1 + ({re}))")));
    }
    if re <= -1.0 {
        return Err(Error::DomainError("ln_barnes_g is implemented for Re z > -1".into()));
    }
    let work = prec + 32;
    let z = z.with_prec(work);
    let zp = zeta_prime_at_minus_one(work);
    let mut shift = shift_for(&z, work);
    if shift == 0 {
        shift = 1;
    }
    let w = &z + Real::from_i64(work, shift as i64);
    let mut acc = asymptotic_ln_g(&w, work, &zp);
    for j in 1..=shift {
        acc -= ln_gamma(&(&z + Real::from_i64(work, j as i64)))?;
    }
    Ok(acc.with_prec(prec))
}

/// Taylor series of ln G(1 + z) about 0, valid for |z| < 1:
/// z(ln 2π − 1)/2 − (1 + γ)z²/2 + Σ_{k≥3} (−1)^{k−1} ζ(k−1) z^k / k.
pub fn ln_barnes_g_taylor(z: &Complex) -> Result<Complex> {
    let prec = z.prec();
    let r = z.abs().to_f64();
    if r >= 1.0 {
        return Err(Error::DomainError("Taylor series of ln G(1+z) needs |z| < 1".into()));
    }
    let work = prec + 16;
    let z = z.with_prec(work);
    let ln_2pi = (Real::pi(work) * 2.0).ln();
    let gamma = Real::euler_gamma(work);
    let mut acc = z.scale(&(&ln_2pi - 1.0)) * 0.5 - (&z * &z).scale(&(&gamma + 1.0)) * 0.5;
    let tol = Real::exp2i(work, -(work as i32));
    let mut pw = &z * &z;
    for k in 3..100_000u64 {
        pw = &pw * &z;
        let zeta = Real::from_i64(work, (k - 1) as i64).zeta();
        let mut t = pw.scale(&zeta) / (k as f64);
        if k % 2 == 0 {
            t = -t;
        }
        acc += &t;
        if t.abs() < tol {
            return Ok(acc.with_prec(prec));
        }
    }
    Err(Error::NonConvergence("ln G Taylor series".into()))
}

/// ζ′(−1) by Euler–Maclaurin summation of ζ′(s) at s = −1.
pub fn zeta_prime_at_minus_one(prec: u32) -> Real {
    let work = prec + 32;
    let n = ((work as f64) * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI)).ceil() as i64 + 8;
    let nr = Real::from_i64(work, n);
    let ln_n = nr.ln();
    let mut acc = Real::zero(work);
    for k in 2..n {
        let kr = Real::from_i64(work, k);
        acc -= &kr * kr.ln();
    }
    let n2 = nr.square();
    acc += &n2 * &ln_n * 0.5 - &n2 * 0.25 - &nr * &ln_n * 0.5 + (&ln_n + 1.0) / 12.0;
    // −Σ_{j≥2} B_{2j} (2j−3)! / (2j)! N^{2−2j}
    let jmax = (std::f64::consts::PI * n as f64) as usize + 4;
    let b = bernoulli_even(jmax, work);
    let tol = Real::exp2i(work, -(work as i32));
    let ninv2 = n2.recip();
    let mut pw = Real::one(work);
    for j in 2..=jmax {
        pw = &pw * &ninv2;
        let jj = j as f64;
        // (2j−3)!/(2j)! = 1/((2j−2)(2j−1)(2j))
        let t = &b[j - 1] * &pw / ((2.0 * jj - 2.0) * (2.0 * jj - 1.0) * (2.0 * jj));
        acc -= &t;
        if t.abs() < tol {
            break;
        }
    }
    acc.with_prec(prec)
}

/// The large-gap constant (1/12) ln 2 + 3ζ′(−1).
pub fn widom_dyson_constant(prec: u32) -> Real {
    Real::ln2(prec) / 12.0 + zeta_prime_at_minus_one(prec) * 3.0
}
