//! Counting statistics of CUE eigenvalues on an arc: the moment generating
//! function, the exact distribution of the count, and Chernoff tail bounds.

use crate::asymptotics::x_critical;
use crate::error::{Error, Result};
use crate::numerics::{Complex, Real};
use crate::symbol::SymbolSpec;
use crate::toeplitz::{auto_precision, log_det};

/// Largest n accepted by [`count_distribution`].
pub const MAX_COUNT_N: usize = 64;

/// Law of the number X of eigenvalues with |θ| < θ0.
#[derive(Clone, Debug)]
pub struct CountDistribution {
    pub n: usize,
    pub theta0: Real,
    /// p_0, …, p_n.
    pub probs: Vec<Real>,
}

impl CountDistribution {
    pub fn total(&self) -> Real {
        let mut acc = Real::zero(self.theta0.prec());
        for p in &self.probs {
            acc += p;
        }
        acc
    }

    pub fn mean(&self) -> Real {
        let mut acc = Real::zero(self.theta0.prec());
        for (k, p) in self.probs.iter().enumerate() {
            acc += p * (k as f64);
        }
        acc
    }

    /// P(X ≥ p).
    pub fn tail(&self, p: usize) -> Real {
        let mut acc = Real::zero(self.theta0.prec());
        for q in self.probs.iter().skip(p) {
            acc += q;
        }
        acc
    }

    /// E[e^{λX}].
    pub fn mgf(&self, lambda: &Real) -> Real {
        let mut acc = Real::zero(self.theta0.prec());
        for (k, p) in self.probs.iter().enumerate() {
            acc += p * (lambda * (k as f64)).exp();
        }
        acc
    }
}

fn working_precision(n: usize, theta0: &Real, prec: u32) -> u32 {
    prec.max(auto_precision(n, theta0))
}

/// ln D_n(s = e^{−λ}, θ0, W = 0).
fn ln_gap_det(theta0: &Real, n: usize, lambda: &Real, prec: u32) -> Result<Real> {
    let work = working_precision(n, theta0, prec);
    let s = (-lambda.with_prec(work)).exp();
    let spec = SymbolSpec::gap(theta0.with_prec(work), s)?;
    Ok(log_det(&spec, n, work)?.ln_d.re.with_prec(prec))
}

/// ln F_n(λ) = nλ + ln D_n(e^{−λ}).
pub fn ln_mgf(theta0: &Real, n: usize, lambda: &Real, prec: u32) -> Result<Real> {
    if lambda.is_negative() {
        return Err(Error::DomainError("lambda must be nonnegative".into()));
    }
    if lambda.is_zero() {
        return Ok(Real::zero(prec));
    }
    Ok(lambda.with_prec(prec) * (n as f64) + ln_gap_det(theta0, n, lambda, prec)?)
}

/// F_n(λ) = E[e^{λX}].
pub fn mgf(theta0: &Real, n: usize, lambda: &Real, prec: u32) -> Result<Real> {
    Ok(ln_mgf(theta0, n, lambda, prec)?.exp())
}

/// E[t^X] at t = e^{iφ}(n+1)-st roots of unity, as D_n with arc value t.
fn generating_values(theta0: &Real, n: usize, shift: &Real, prec: u32) -> Result<Vec<Complex>> {
    let two_pi = Real::pi(prec) * 2.0;
    (0..=n)
        .map(|k| {
            let t = Complex::cis(&((&two_pi * (k as f64) + shift) / ((n + 1) as f64)));
            let spec = SymbolSpec::new(theta0.with_prec(prec), t, Complex::one(prec), Vec::new())?;
            let ln_d = log_det(&spec, n, prec)?.ln_d;
            if !ln_d.is_finite() {
                return Err(Error::SingularMinor(n));
            }
            Ok(ln_d.exp())
        })
        .collect()
}

/// Exact law of the arc count, by inverting the generating polynomial.
pub fn count_distribution(theta0: &Real, n: usize, prec: u32) -> Result<CountDistribution> {
    if n == 0 || n > MAX_COUNT_N {
        return Err(Error::DomainError(format!("n must lie in 1..={MAX_COUNT_N}")));
    }
    let work = prec.max(128);
    let mut shift = Real::zero(work);
    let values = match generating_values(theta0, n, &shift, work) {
        Ok(v) => v,
        Err(Error::SingularMinor(_)) | Err(Error::DomainError(_)) => {
            // Rotate every node by half a step; D_n cannot vanish at both sets
            // unless the polynomial vanishes identically.
            shift = Real::pi(work);
            generating_values(theta0, n, &shift, work)?
        }
        Err(e) => return Err(e),
    };
    // t_k = e^{i(2πk + shift)/(n+1)}, so p_j = (n+1)⁻¹ Σ_k G(t_k) t_k^{−j}.
    let two_pi = Real::pi(work) * 2.0;
    let floor = Real::new(work, -1e-20);
    let mut probs = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut acc = Complex::zero(work);
        for (k, g) in values.iter().enumerate() {
            let angle = -((&two_pi * (k as f64) + &shift) * (j as f64)) / ((n + 1) as f64);
            acc += g * &Complex::cis(&angle);
        }
        let p = acc.re / ((n + 1) as f64);
        if p < floor {
            return Err(Error::NotConverged(format!("p_{j} = {:e} is negative", p.to_f64())));
        }
        probs.push(p.max(Real::zero(work)).with_prec(prec));
    }
    Ok(CountDistribution { n, theta0: theta0.with_prec(prec), probs })
}

/// ln of the Chernoff bound e^{(n−p)λ} D_n(e^{−λ}) for P(X ≥ p).
pub fn ln_tail_bound(theta0: &Real, n: usize, p: usize, lambda: Option<&Real>, prec: u32) -> Result<Real> {
    if p > n {
        return Err(Error::DomainError(format!("p = {p} exceeds n = {n}")));
    }
    let lambda = match lambda {
        Some(l) => l.with_prec(prec),
        None => x_critical(&theta0.with_prec(prec))? * (n as f64),
    };
    Ok(ln_mgf(theta0, n, &lambda, prec)? - &lambda * (p as f64))
}

/// e^{−pλ} F_n(λ), with λ = n·x_c unless given.
pub fn tail_bound(theta0: &Real, n: usize, p: usize, lambda: Option<&Real>, prec: u32) -> Result<Real> {
    Ok(ln_tail_bound(theta0, n, p, lambda, prec)?.exp())
}
