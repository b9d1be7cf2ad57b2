//! Fredholm determinants of the sine kernel on (−y, y), their large-gap
//! expansion, and the Toeplitz determinants that converge to them as the
//! gap shrinks like 2πy/n.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::linalg::{ldl_pivots, Mat, RMat};
use crate::numerics::special::widom_dyson_constant;
use crate::numerics::{gauss_legendre, Real};
use crate::symbol::SymbolSpec;
use crate::toeplitz::{auto_precision, log_det};

#[derive(Clone, Debug)]
pub struct FredholmSpec {
    pub y: Real,
    pub s: Real,
    /// Base Gauss–Legendre order; results are checked against order 2m.
    pub m: usize,
}

impl FredholmSpec {
    pub fn new(y: Real, s: Real, m: usize) -> Result<FredholmSpec> {
        if !y.is_positive() {
            return Err(Error::DomainError("y must be positive".into()));
        }
        if s.is_negative() || s > 1.0 {
            return Err(Error::DomainError("s must lie in [0, 1]".into()));
        }
        if m < 4 {
            return Err(Error::DomainError("quadrature order must be at least 4".into()));
        }
        Ok(FredholmSpec { y, s, m })
    }

    /// Order sufficient for 10⁻¹⁰ agreement at moderate y.
    pub fn default_order(y: f64) -> usize {
        16 + (8.0 * y).ceil() as usize
    }
}

/// sin(π(x−t))/(π(x−t)), equal to 1 on the diagonal.
fn sinc_kernel(x: &Real, t: &Real) -> Real {
    if x == t {
        return Real::one(x.prec());
    }
    let d = (x - t) * Real::pi(x.prec());
    d.sin() / d
}

/// √w_i K(x_i, x_j) √w_j on m Gauss–Legendre nodes mapped to (−y, y).
pub fn nystrom_kernel(y: &Real, m: usize, prec: u32) -> Result<RMat> {
    let rule = gauss_legendre(m, prec)?;
    let y = y.with_prec(prec);
    let x: Vec<Real> = rule.nodes.iter().map(|t| t * &y).collect();
    let sw: Vec<Real> = rule.weights.iter().map(|w| (w * &y).sqrt()).collect();
    Ok(Mat::from_fn(m, |i, j| &sw[i] * sinc_kernel(&x[i], &x[j]) * &sw[j]))
}

fn logdet_at(spec: &FredholmSpec, m: usize, prec: u32) -> Result<Real> {
    let k = nystrom_kernel(&spec.y, m, prec)?;
    let c = 1.0 - spec.s.with_prec(prec);
    let a = Mat::from_fn(m, |i, j| {
        let v = -(k.get(i, j) * &c);
        if i == j {
            v + 1.0
        } else {
            v
        }
    });
    // The matrix is symmetric positive definite, so LDLᵀ needs no pivoting.
    let d = ldl_pivots(&a)?;
    let mut acc = Real::zero(prec);
    for p in d {
        if !p.is_positive() {
            return Err(Error::DomainError("Nystrom matrix is not positive definite".into()));
        }
        acc += p.ln();
    }
    Ok(acc)
}

/// ln det(1 − (1−s)K_y), checked between orders m and 2m.
pub fn fredholm_logdet(spec: &FredholmSpec, prec: u32) -> Result<Real> {
    if spec.s == 1.0 {
        return Ok(Real::zero(prec));
    }
    let lo = logdet_at(spec, spec.m, prec)?;
    let hi = logdet_at(spec, 2 * spec.m, prec)?;
    let diff = (&lo - &hi).abs();
    if diff > hi.abs().max(Real::one(prec)) * 1e-10 {
        return Err(Error::NotConverged(format!(
            "Nystrom orders {} and {} differ by {:e}",
            spec.m,
            2 * spec.m,
            diff.to_f64()
        )));
    }
    Ok(hi)
}

/// −π²y²/2 − (1/4) ln(πy) + (1/12) ln 2 + 3ζ′(−1).
pub fn large_gap_expansion(y: &Real, prec: u32) -> Result<Real> {
    if !y.is_positive() {
        return Err(Error::DomainError("y must be positive".into()));
    }
    let py = Real::pi(prec) * y.with_prec(prec);
    Ok(-(py.square() * 0.5) - py.ln() * 0.25 + widom_dyson_constant(prec))
}

/// ln D_n(s) for the arc half-width θ0 = π(1 − 2y/n).
pub fn toeplitz_log_det_scaled(y: &Real, s: &Real, n: usize, prec: u32) -> Result<Real> {
    if y.to_f64() * 20.0 >= n as f64 {
        return Err(Error::DomainError(format!("need n > 20y, got n = {n}")));
    }
    let theta0 = Real::pi(prec) * (1.0 - y.with_prec(prec) * 2.0 / n as f64);
    let work = prec.max(auto_precision(n, &theta0));
    let spec = SymbolSpec::gap(theta0.with_prec(work), s.with_prec(work))?;
    Ok(log_det(&spec, n, work)?.ln_d.re.with_prec(prec))
}

/// |ln D_n(s, π(1 − 2y/n), 0) − ln det(1 − (1−s)K_y)|.
pub fn toeplitz_fredholm_gap(y: &Real, s: &Real, n: usize, prec: u32) -> Result<Real> {
    let spec = FredholmSpec::new(y.clone(), s.clone(), FredholmSpec::default_order(y.to_f64()))?;
    let fred = fredholm_logdet(&spec, prec)?;
    let toep = toeplitz_log_det_scaled(y, s, n, prec)?;
    Ok((toep - fred).abs())
}

/// One output row: y, s, m, ln det, expansion (s = 0 only), residual.
#[derive(Clone, Debug, Serialize)]
pub struct FredholmRow {
    pub y: f64,
    pub s: f64,
    pub m: usize,
    pub ln_det: f64,
    pub expansion: Option<f64>,
    pub residual: Option<f64>,
}

pub fn fredholm_row(spec: &FredholmSpec, prec: u32) -> Result<FredholmRow> {
    let v = fredholm_logdet(spec, prec)?;
    let (expansion, residual) = if spec.s.is_zero() {
        let e = large_gap_expansion(&spec.y, prec)?;
        (Some(e.to_f64()), Some((&v - &e).to_f64()))
    } else {
        (None, None)
    };
    Ok(FredholmRow {
        y: spec.y.to_f64(),
        s: spec.s.to_f64(),
        m: spec.m,
        ln_det: v.to_f64(),
        expansion,
        residual,
    })
}
