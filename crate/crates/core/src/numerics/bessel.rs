//! Order-zero (and internally order-one) modified Bessel and Hankel
//! functions of complex argument.
//!
//! Small |z| uses the power series evaluated with extra guard bits to absorb
//! cancellation; large |z| uses the Hankel asymptotic expansion of K. The
//! crossover radius is chosen so that the smallest asymptotic term is below
//! the working tolerance. I is obtained from K by the connection formula
//! K_n(z e^{∓πi}) = (−1)^n K_n(z) ± πi I_n(z), and the Hankel functions from K
//! by rotating the argument by ±π/2.

use super::scalar::{Complex, Real};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselKind {
    I,
    K,
    H1,
    H2,
    IPrime,
    KPrime,
    H1Prime,
    H2Prime,
}

/// Radius beyond which the asymptotic expansion reaches 2^-(prec+16).
pub fn crossover_radius(prec: u32) -> f64 {
    (prec as f64 + 16.0) * std::f64::consts::LN_2 / 2.0 + 2.0
}

/// Value of the requested order-zero function or its derivative.
pub fn bessel0(kind: BesselKind, z: &Complex) -> Result<Complex> {
    use BesselKind::*;
    match kind {
        I => bessel_i(0, z),
        IPrime => bessel_i(1, z),
        K => bessel_k(0, z),
        KPrime => Ok(-bessel_k(1, z)?),
        H1 => hankel(1, 0, z),
        H2 => hankel(2, 0, z),
        H1Prime => Ok(-hankel(1, 1, z)?),
        H2Prime => Ok(-hankel(2, 1, z)?),
    }
}

/// I_n(z) for n ∈ {0, 1}.
pub fn bessel_i(n: u32, z: &Complex) -> Result<Complex> {
    let prec = z.prec();
    let r = z.abs().to_f64();
    if r < crossover_radius(prec) {
        return Ok(series_i(n, z).with_prec(prec));
    }
    // Rotate by −π when arg z ≥ 0 and by +π otherwise, keeping the rotated
    // angle in [−π, π].
    let angle = z.arg();
    let modulus = z.abs();
    let pi = Real::pi(prec);
    let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
    let k_z = asymptotic_k(n, &modulus, &angle)?;
    let ipi = Complex::new(Real::zero(prec), pi.clone());
    if !angle.is_negative() {
        let k_rot = asymptotic_k(n, &modulus, &(&angle - &pi))?;
        Ok((k_rot - k_z * sign_n) / ipi)
    } else {
        let k_rot = asymptotic_k(n, &modulus, &(&angle + &pi))?;
        Ok((k_z * sign_n - k_rot) / ipi)
    }
}

/// K_n(z) for n ∈ {0, 1}, principal branch (cut on ℝ⁻).
pub fn bessel_k(n: u32, z: &Complex) -> Result<Complex> {
    if z.is_zero() {
        return Err(Error::DomainError("K is singular at 0".into()));
    }
    let prec = z.prec();
    let r = z.abs().to_f64();
    if r < crossover_radius(prec) {
        Ok(series_k(n, z).with_prec(prec))
    } else {
        asymptotic_k(n, &z.abs(), &z.arg())
    }
}

/// H^(kind)_n(z), n ∈ {0, 1}; requires −π/2 < arg z ≤ π/2.
fn hankel(kind: u32, n: u32, z: &Complex) -> Result<Complex> {
    if z.is_zero() {
        return Err(Error::DomainError("Hankel functions are singular at 0".into()));
    }
    let prec = z.prec();
    let angle = z.arg().to_f64();
    let half_pi = std::f64::consts::FRAC_PI_2;
    if angle <= -half_pi || angle > half_pi {
        return Err(Error::DomainError(format!("Hankel argument phase {angle} outside (-pi/2, pi/2]")));
    }
    let pi = Real::pi(prec);
    let two_over_pi = Real::new(prec, 2.0) / &pi;
    if kind == 1 {
        // H^(1)_n(w) = (2/π) i^{−n−1} K_n(−i w)
        let k = bessel_k(n, &(-z.mul_i()))?;
        let factor = if n == 0 { Complex::new(Real::zero(prec), -&two_over_pi) } else { (-&two_over_pi).to_complex() };
        Ok(factor * k)
    } else {
        // H^(2)_n(w) = (2/π) i^{n+1} K_n(i w)
        let k = bessel_k(n, &z.mul_i())?;
        let factor = if n == 0 { Complex::new(Real::zero(prec), two_over_pi) } else { (-&two_over_pi).to_complex() };
        Ok(factor * k)
    }
}

fn guard_bits(z: &Complex) -> u32 {
    let r = z.abs().to_f64();
    (2.0 * r / std::f64::consts::LN_2).ceil() as u32 + 24
}

fn series_i(n: u32, z: &Complex) -> Complex {
    let prec = z.prec() + guard_bits(z);
    let z = z.with_prec(prec);
    let q = (&z * &z) * 0.25;
    let tol = Real::exp2i(prec, -(prec as i32));
    let mut term = if n == 0 { Complex::one(prec) } else { &z * 0.5 };
    let mut sum = term.clone();
    let mut k = 0u64;
    loop {
        k += 1;
        term = &term * &q / ((k * (k + n as u64)) as f64);
        sum += &term;
        if term.abs() <= &tol * sum.abs() && k > 2 {
            break;
        }
    }
    sum
}

fn series_k(n: u32, z: &Complex) -> Complex {
    let prec = z.prec() + guard_bits(z);
    let z = z.with_prec(prec);
    let gamma = Real::euler_gamma(prec);
    let q = (&z * &z) * 0.25;
    let log_half = (&z * 0.5).ln();
    let tol = Real::exp2i(prec, -(prec as i32));
    let i_n = series_i(n, &z);
    if n == 0 {
        // K0 = −(ln(z/2) + γ) I0 + Σ_{k≥1} H_k (z²/4)^k / (k!)²
        let mut acc = -((&log_half + &gamma) * &i_n);
        let mut term = Complex::one(prec);
        let mut h = Real::zero(prec);
        let mut k = 0u64;
        loop {
            k += 1;
            term = &term * &q / ((k * k) as f64);
            h += Real::one(prec) / (k as f64);
            let t = &term * &h;
            acc += &t;
            if t.abs() <= &tol * acc.abs() && k > 2 {
                break;
            }
        }
        acc
    } else {
        // K1 = 1/z + ln(z/2) I1 − (z/4) Σ_{k≥0} (ψ(k+1) + ψ(k+2)) (z²/4)^k / (k!(k+1)!)
        let mut sum = Complex::zero(prec);
        let mut term = Complex::one(prec);
        let mut hk = Real::zero(prec);
        let mut k = 0u64;
        loop {
            let hk1 = &hk + Real::one(prec) / ((k + 1) as f64);
            let psi_sum = &hk + &hk1 - &gamma * 2.0;
            let t = &term * &psi_sum;
            sum += &t;
            if t.abs() <= &tol * sum.abs() && k > 2 {
                break;
            }
            k += 1;
            term = &term * &q / ((k * (k + 1)) as f64);
            hk = hk1;
        }
        z.recip() + &log_half * &i_n - &z * &sum * 0.25
    }
}

/// Hankel expansion of K_n at z = r e^{iθ}, |θ| ≤ π.
fn asymptotic_k(n: u32, r: &Real, theta: &Real) -> Result<Complex> {
    let prec = r.prec().max(theta.prec());
    let work = prec + 16;
    let r = r.with_prec(work);
    let theta = theta.with_prec(work);
    let mu = 4.0 * (n * n) as f64;
    let z = Complex::from_polar(&r, &theta);
    let zinv = Complex::from_polar(&r.recip(), &(-&theta));
    let tol = Real::exp2i(work, -(prec as i32) - 8);
    let mut term = Complex::one(work);
    let mut sum = term.clone();
    let mut last = Real::one(work);
    let mut converged = false;
    for k in 1..10_000u64 {
        let odd = (2 * k - 1) as f64;
        term = &term * &zinv * (mu - odd * odd) / (8.0 * k as f64);
        let a = term.abs();
        if a > last {
            break;
        }
        sum += &term;
        if a <= tol {
            converged = true;
            break;
        }
        last = a;
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "asymptotic K_{n} at |z| = {} did not reach tolerance",
            r.to_f64()
        )));
    }
    // sqrt(π / (2z)) e^{−z} with the square root taken along θ.
    let pi = Real::pi(work);
    let pref = Complex::from_polar(&(&pi / (&r * 2.0)).sqrt(), &(-&theta * 0.5));
    Ok((pref * (-z).exp() * sum).with_prec(prec))
}
