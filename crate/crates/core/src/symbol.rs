//! The gap symbol f(e^{iθ}) = e^{W(e^{iθ})}·(a on the arc |θ| < θ0, b on the
//! gap) and its Fourier coefficients.
//!
//! W is a trigonometric polynomial, so e^W has a rapidly decaying Laurent
//! series E_j and every Fourier coefficient of f is an exact convolution of
//! E with the coefficients of the two arc indicators. Panel quadrature is
//! kept as an independent check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quad::{gauss_legendre, uniform_edges};
use crate::numerics::{Complex, Real};

/// Symbol data. Values are stored at whatever precision they were built
/// with and extended on use.
#[derive(Clone, Debug)]
pub struct SymbolSpec {
    pub theta0: Real,
    pub a: Complex,
    pub b: Complex,
    /// Nonzero coefficients W_k, sorted by k.
    pub w: Vec<(i64, Complex)>,
}

impl SymbolSpec {
    pub fn new(theta0: Real, a: Complex, b: Complex, w: Vec<(i64, Complex)>) -> Result<SymbolSpec> {
        let pi = Real::pi(theta0.prec());
        if !theta0.is_positive() || theta0 >= pi {
            return Err(Error::InvalidSymbol(format!("theta0 = {} outside (0, pi)", theta0.to_f64())));
        }
        let mut w: Vec<(i64, Complex)> = w.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        w.sort_by_key(|(k, _)| *k);
        if w.windows(2).any(|p| p[0].0 == p[1].0) {
            return Err(Error::InvalidSymbol("repeated W coefficient index".into()));
        }
        Ok(SymbolSpec { theta0, a, b, w })
    }

    /// a = 1, b = s, W = 0.
    pub fn gap(theta0: Real, s: Real) -> Result<SymbolSpec> {
        let p = theta0.prec().max(s.prec());
        SymbolSpec::new(theta0, Complex::one(p), s.to_complex(), Vec::new())
    }

    pub fn gap_f64(theta0: f64, s: f64) -> Result<SymbolSpec> {
        SymbolSpec::gap(Real::new(64, theta0), Real::new(64, s))
    }

    pub fn with_w(mut self, w: Vec<(i64, Complex)>) -> Result<SymbolSpec> {
        self.w = w;
        SymbolSpec::new(self.theta0, self.a, self.b, self.w)
    }

    /// W_{±1} = c, a convenient real symmetric perturbation.
    pub fn with_w1(self, c: f64) -> Result<SymbolSpec> {
        let v = Complex::from_f64(64, c, 0.0);
        self.with_w(vec![(-1, v.clone()), (1, v)])
    }

    /// Same symbol with a = 1 and b = s.
    pub fn with_s(&self, s: &Real) -> SymbolSpec {
        SymbolSpec {
            theta0: self.theta0.clone(),
            a: Complex::one(s.prec()),
            b: s.to_complex(),
            w: self.w.clone(),
        }
    }

    /// s when the symbol is in the a = 1, b = s ∈ ℝ form.
    pub fn s(&self) -> Option<Real> {
        let one = self.a.re == 1.0 && self.a.im.is_zero();
        (one && self.b.im.is_zero()).then(|| self.b.re.clone())
    }

    pub fn w_coeff(&self, k: i64) -> Option<&Complex> {
        self.w.iter().find(|(j, _)| *j == k).map(|(_, c)| c)
    }

    pub fn w_is_zero(&self) -> bool {
        self.w.is_empty()
    }

    /// W_{−k} = W_k with every W_k real.
    pub fn w_is_symmetric_real(&self) -> bool {
        self.w.iter().all(|(k, c)| {
            c.im.is_zero() && self.w_coeff(-k).map_or(false, |d| d.re == c.re && d.im.is_zero())
        })
    }

    /// True when every f_k is real and f_{−k} = f_k, so the moment matrix is
    /// real symmetric.
    pub fn is_real_symmetric(&self) -> bool {
        self.a.im.is_zero() && self.b.im.is_zero() && self.w_is_symmetric_real()
    }

    /// W(z) = Σ W_k z^k.
    pub fn eval_w(&self, z: &Complex) -> Complex {
        let prec = z.prec();
        let mut acc = Complex::zero(prec);
        for (k, c) in &self.w {
            acc += z.powi(*k) * c.with_prec(prec);
        }
        acc
    }

    fn max_w_degree(&self) -> i64 {
        self.w.iter().map(|(k, _)| k.abs()).max().unwrap_or(0)
    }
}

/// Decay rate x of s = e^{−xn}; x = +∞ means s = 0.
#[derive(Clone, Debug)]
pub enum GapRate {
    Finite(Real),
    Infinite,
}

impl GapRate {
    pub fn s(&self, n: usize, prec: u32) -> Real {
        match self {
            GapRate::Finite(x) => (-(x.with_prec(prec) * (n as f64))).exp(),
            GapRate::Infinite => Real::zero(prec),
        }
    }
}

/// Laurent coefficients of e^{W(z)}: returns (lowest index, coefficients).
/// Terms below 2^{−prec−40} relative to the largest are dropped.
pub fn exp_w_laurent(w: &[(i64, Complex)], prec: u32) -> (i64, Vec<Complex>) {
    let work = prec + 32;
    let mut lo = 0i64;
    let mut coeffs = vec![Complex::one(work)];
    let tiny = Real::exp2i(work, -(prec as i32) - 40);
    for (k, c) in w {
        let c = c.with_prec(work);
        let mag = c.abs().to_f64();
        // exp(c z^k) = Σ_p c^p/p! z^{kp}
        let mut series = vec![Complex::one(work)];
        let mut term = Complex::one(work);
        let mut p = 0u64;
        loop {
            p += 1;
            term = &term * &c / (p as f64);
            if (p as f64) > mag && term.abs() < tiny {
                break;
            }
            series.push(term.clone());
        }
        let (slo, step) = if *k >= 0 { (0, *k) } else { ((series.len() as i64 - 1) * k, -k) };
        let span = (series.len() as i64 - 1) * k.abs();
        let mut out = vec![Complex::zero(work); coeffs.len() + span as usize];
        for (i, e) in coeffs.iter().enumerate() {
            for (q, t) in series.iter().enumerate() {
                // index of z^{k q} relative to slo
                let off = if *k >= 0 { q as i64 * step } else { span - q as i64 * step };
                out[i + off as usize] += e * t;
            }
        }
        lo += slo;
        coeffs = out;
    }
    let max = coeffs.iter().fold(Real::zero(work), |m, c| m.max(c.abs()));
    let cut = &max * &tiny;
    let first = coeffs.iter().position(|c| c.abs() > cut).unwrap_or(0);
    let last = coeffs.iter().rposition(|c| c.abs() > cut).unwrap_or(0);
    let kept = coeffs[first..=last].to_vec();
    (lo + first as i64, kept)
}

/// Fourier coefficients f_k and ∂_b f_k for |k| ≤ kmax.
#[derive(Clone, Debug)]
pub struct Coefficients {
    pub kmax: usize,
    f: Vec<Complex>,
    db: Vec<Complex>,
}

impl Coefficients {
    pub fn f(&self, k: i64) -> &Complex {
        &self.f[(k + self.kmax as i64) as usize]
    }

    /// ∂f_k/∂b, which is ∂_s f_k in the a = 1, b = s form.
    pub fn ds(&self, k: i64) -> &Complex {
        &self.db[(k + self.kmax as i64) as usize]
    }
}

/// Arc-indicator coefficients A_m = sin(mθ0)/(πm), A_0 = θ0/π, for |m| ≤ mmax.
fn arc_coefficients(theta0: &Real, mmax: i64, prec: u32) -> Vec<Real> {
    let theta0 = theta0.with_prec(prec);
    let pi = Real::pi(prec);
    (0..=mmax)
        .map(|m| {
            if m == 0 {
                &theta0 / &pi
            } else {
                (&theta0 * (m as f64)).sin() / (&pi * (m as f64))
            }
        })
        .collect()
}

pub fn coefficients(spec: &SymbolSpec, kmax: usize, prec: u32) -> Result<Coefficients> {
    let work = prec + 16;
    let (elo, e) = exp_w_laurent(&spec.w, work);
    let ehi = elo + e.len() as i64 - 1;
    let km = kmax as i64;
    let mmax = km + elo.abs().max(ehi.abs());
    let arc = arc_coefficients(&spec.theta0, mmax, work);
    let arc_at = |m: i64| &arc[m.unsigned_abs() as usize];
    let a = spec.a.with_prec(work);
    let b = spec.b.with_prec(work);
    let mut f = Vec::with_capacity(2 * kmax + 1);
    let mut db = Vec::with_capacity(2 * kmax + 1);
    for k in -km..=km {
        let mut on_arc = Complex::zero(work);
        let mut on_gap = Complex::zero(work);
        for (i, ej) in e.iter().enumerate() {
            let m = k - (elo + i as i64);
            let am = arc_at(m);
            on_arc += ej.scale(am);
            let gm = if m == 0 { 1.0 - am } else { -am };
            on_gap += ej.scale(&gm);
        }
        f.push((&a * &on_arc + &b * &on_gap).with_prec(prec));
        db.push(on_gap.with_prec(prec));
    }
    Ok(Coefficients { kmax, f, db })
}

pub fn fourier_coeff(spec: &SymbolSpec, k: i64, prec: u32) -> Result<Complex> {
    let c = coefficients(spec, k.unsigned_abs() as usize, prec)?;
    Ok(c.f(k).clone())
}

/// ∂_s f_k = (1/2π)∫_gap e^W e^{−ikθ} dθ.
pub fn ds_fourier_coeff(spec: &SymbolSpec, k: i64, prec: u32) -> Result<Complex> {
    let c = coefficients(spec, k.unsigned_abs() as usize, prec)?;
    Ok(c.ds(k).clone())
}

/// Pointwise value of the symbol.
pub fn symbol_eval(spec: &SymbolSpec, theta: &Real, prec: u32) -> Result<Complex> {
    let pi = Real::pi(prec);
    let two_pi = &pi * 2.0;
    let mut t = theta.with_prec(prec);
    t = &t - (&(&t + &pi) / &two_pi).floor() * &two_pi;
    let theta0 = spec.theta0.with_prec(prec);
    let eps = Real::exp2i(prec, -(prec as i32) + 8);
    if (t.abs() - &theta0).abs() <= eps {
        return Err(Error::JumpPointError(theta.to_f64()));
    }
    let z = Complex::cis(&t);
    let ew = spec.eval_w(&z).exp();
    let level = if t.abs() < theta0 { spec.a.with_prec(prec) } else { spec.b.with_prec(prec) };
    Ok(ew * level)
}

/// f_k by Gauss–Legendre panels split at ±θ0, accepted when two orders
/// agree. Independent of the convolution used by [`coefficients`].
pub fn fourier_coeff_quadrature(spec: &SymbolSpec, k: i64, prec: u32) -> Result<Complex> {
    let work = prec + 16;
    let theta0 = spec.theta0.with_prec(work);
    let pi = Real::pi(work);
    let a = spec.a.with_prec(work);
    let b = spec.b.with_prec(work);
    let panels = 4 + (k.unsigned_abs() as usize + spec.max_w_degree() as usize) / 2;
    let arc_edges = uniform_edges(&(-&theta0), &theta0, panels);
    let gap_edges = uniform_edges(&theta0, &(&pi * 2.0 - &theta0), panels);
    let integrand = |t: &Real| -> Complex {
        let z = Complex::cis(t);
        spec.eval_w(&z).exp() * Complex::cis(&(-(t * (k as f64))))
    };
    let run = |m: usize| -> Result<Complex> {
        let rule = gauss_legendre(m, work)?;
        let on_arc: Complex = rule.integrate_panels(&arc_edges, integrand);
        let on_gap: Complex = rule.integrate_panels(&gap_edges, integrand);
        Ok((a.clone() * on_arc + b.clone() * on_gap) / (&pi * 2.0))
    };
    let m = ((prec as f64) * 0.3) as usize + 8;
    let lo = run(m)?;
    let hi = run(m + m / 2)?;
    let tol = Real::exp2i(work, -(prec as i32) + 8) * hi.abs().max(Real::one(work));
    if (&lo - &hi).abs() > tol {
        return Err(Error::QuadratureNotConverged(format!("f_{k}: orders {m} and {}", m + m / 2)));
    }
    Ok(hi.with_prec(prec))
}

/// JSON form of a symbol: {"theta0": .., "s": ..} or {"theta0": .., "a": [re, im],
/// "b": [re, im]}, plus "W": [{"k": .., "re": .., "im": ..}].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SymbolJson {
    pub theta0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<[f64; 2]>,
    #[serde(default, rename = "W")]
    pub w: Vec<WTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct WTerm {
    pub k: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl SymbolJson {
    pub fn to_spec(&self) -> Result<SymbolSpec> {
        let w = self.w.iter().map(|t| (t.k, Complex::from_f64(64, t.re, t.im))).collect();
        let (a, b) = match (self.s, self.a, self.b) {
            (Some(s), None, None) => (Complex::one(64), Complex::from_f64(64, s, 0.0)),
            (None, a, b) => {
                let a = a.unwrap_or([1.0, 0.0]);
                let b = b.ok_or_else(|| Error::InvalidSymbol("need s or b".into()))?;
                (Complex::from_f64(64, a[0], a[1]), Complex::from_f64(64, b[0], b[1]))
            }
            _ => return Err(Error::InvalidSymbol("give either s or (a, b)".into())),
        };
        SymbolSpec::new(Real::new(64, self.theta0), a, b, w)
    }
}
