//! Equilibrium measure on the unit circle for the two-level external field
//! V = 0 on the arc |θ| < θ0 and V = x on the gap.
//!
//! For x ≥ x_c the support is the arc itself; below x_c a second arc
//! [π − θ1, π + θ1] opens around −1. In both cases
//! u(θ) = (1/2π) sqrt((cos θ + cos θ1)/(cos θ − cos θ0)) with θ1 = 0 in the
//! one-arc case.
//!
//! Integrals against u are split into pieces running from an arc endpoint
//! inward with θ = endpoint ∓ t², which removes the square-root behaviour
//! at the endpoint. Log singularities are handled by geometric grading.

use serde::Serialize;

use crate::asymptotics::x_critical;
use crate::error::{Error, Result};
use crate::numerics::quad::{gauss_legendre, graded_edges, refine_edges, Focus, Integrand};
use crate::numerics::Real;
use crate::symbol::GapRate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    OneArc,
    Critical,
    TwoArc,
}

#[derive(Clone, Debug)]
pub struct EquilibriumData {
    pub x: GapRate,
    pub theta0: Real,
    pub regime: Regime,
    /// Half-width of the arc around −1; zero unless `regime` is `TwoArc`.
    pub theta1: Real,
    pub ell: Real,
    pub x_c: Real,
}

impl EquilibriumData {
    pub fn new(x: GapRate, theta0: &Real, prec: u32) -> Result<EquilibriumData> {
        let theta0 = theta0.with_prec(prec);
        let x_c = x_critical(&theta0)?;
        let regime = match &x {
            GapRate::Infinite => Regime::OneArc,
            GapRate::Finite(v) => {
                if !v.is_positive() {
                    return Err(Error::DomainError("x must be positive".into()));
                }
                let tol = Real::exp2i(prec, -(prec as i32) + 8) * &x_c;
                if (v - &x_c).abs() <= tol {
                    Regime::Critical
                } else if *v > x_c {
                    Regime::OneArc
                } else {
                    Regime::TwoArc
                }
            }
        };
        let theta1 = match (&x, regime) {
            (GapRate::Finite(v), Regime::TwoArc) => theta1_solve(v, &theta0, prec)?,
            _ => Real::zero(prec),
        };
        let mut data = EquilibriumData { x, theta0, regime, theta1, ell: Real::zero(prec), x_c };
        data.ell = eq_ell(&data, prec)?;
        Ok(data)
    }

    pub fn prec(&self) -> u32 {
        self.theta0.prec()
    }

    /// V on the gap, or None for x = +∞.
    fn gap_level(&self) -> Option<Real> {
        match &self.x {
            GapRate::Finite(v) => Some(v.with_prec(self.prec())),
            GapRate::Infinite => None,
        }
    }

    /// Whether e^{iθ} lies in the closed support.
    pub fn in_support(&self, theta: &Real) -> bool {
        let t = reduce_pm_pi(theta);
        let pi = Real::pi(self.prec());
        t.abs() <= self.theta0 || (self.regime == Regime::TwoArc && (&pi - t.abs()) <= self.theta1)
    }
}

/// θ reduced to (−π, π].
fn reduce_pm_pi(theta: &Real) -> Real {
    let prec = theta.prec();
    let two_pi = Real::pi(prec) * 2.0;
    let k = ((theta + Real::pi(prec)) / &two_pi).floor();
    let mut t = theta - &two_pi * &k;
    if t <= -Real::pi(prec) {
        t += &two_pi;
    }
    t
}

/// One piece of the support in the t-variable.
struct Piece {
    /// Arc around 1 (true) or around −1 (false).
    main: bool,
    /// +1 for the piece at positive θ (or above π), −1 otherwise.
    sign: f64,
    t_max: Real,
}

impl Piece {
    fn theta(&self, t: &Real, d: &EquilibriumData) -> Real {
        if self.main {
            (&d.theta0 - t.square()) * self.sign
        } else {
            Real::pi(t.prec()) + (&d.theta1 - t.square()) * self.sign
        }
    }

    /// 2t·u(θ(t)), smooth in t.
    fn weight(&self, t: &Real, d: &EquilibriumData) -> Real {
        let prec = t.prec();
        let pi = Real::pi(prec);
        let half_t2 = t.square() * 0.5;
        let theta = self.theta(t, d);
        let ratio = if self.main {
            let den = (&d.theta0 - &half_t2).sin() * half_t2.sin() * 2.0;
            (theta.cos() + d.theta1.cos()) / den
        } else {
            let num = (&d.theta1 - &half_t2).sin() * half_t2.sin() * 2.0;
            num / (d.theta0.cos() - theta.cos())
        };
        t * ratio.sqrt() / &pi
    }

    /// t for a support point θ lying in this piece.
    fn locate(&self, theta: &Real, d: &EquilibriumData) -> Option<Real> {
        let t = reduce_pm_pi(theta);
        let pi = Real::pi(theta.prec());
        let slack = Real::exp2i(theta.prec(), -(theta.prec() as i32) + 8);
        if self.main {
            let raw = &t * self.sign;
            if raw < -&slack || raw > d.theta0 {
                return None;
            }
            Some((&d.theta0 - raw.max(Real::zero(t.prec()))).sqrt())
        } else {
            // offset from π on this piece's side
            let off = if t.is_negative() { (&t + &pi * 2.0) - &pi } else { &t - &pi };
            let raw = off * self.sign;
            if raw < -&slack || raw > d.theta1 {
                return None;
            }
            let so = raw.max(Real::zero(t.prec()));
            Some((&d.theta1 - so).sqrt())
        }
    }

    /// Angular distance from θ to the outer (t = 0) or inner (t = t_max) end.
    fn endpoint_distance(&self, theta: &Real, d: &EquilibriumData, inner: bool) -> f64 {
        let t = if inner { self.t_max.with_prec(theta.prec()) } else { Real::zero(theta.prec()) };
        let end = self.theta(&t, d);
        reduce_pm_pi(&(theta - end)).abs().to_f64()
    }
}

fn pieces(d: &EquilibriumData) -> Vec<Piece> {
    let mut out = vec![
        Piece { main: true, sign: 1.0, t_max: d.theta0.sqrt() },
        Piece { main: true, sign: -1.0, t_max: d.theta0.sqrt() },
    ];
    if d.theta1.is_positive() {
        for sign in [1.0, -1.0] {
            out.push(Piece { main: false, sign, t_max: d.theta1.sqrt() });
        }
    }
    out
}

/// ∫_J g(θ) u(θ) dθ, with log-type singularities of g at `foci` (angles).
pub fn support_integral(d: &EquilibriumData, foci: &[Real], g: impl Fn(&Real) -> Real) -> Result<Real> {
    support_integral_of(d, foci, g)
}

/// Generic form of [`support_integral`], e.g. for complex integrands.
pub fn support_integral_of<T: Integrand>(d: &EquilibriumData, foci: &[Real], g: impl Fn(&Real) -> T) -> Result<T> {
    let prec = d.prec();
    let work = prec + 16;
    let min_width = 2f64.powf(-(prec as f64) * 0.75);
    let run = |m: usize| -> Result<T> {
        let rule = gauss_legendre(m, work)?;
        let mut acc = T::zero_like(work);
        let one = Real::one(work);
        for p in pieces(d) {
            let mut marks = Vec::new();
            for f in foci {
                let f = f.with_prec(prec);
                if let Some(t) = p.locate(&f, d) {
                    marks.push(Focus::new(t.with_prec(work), min_width));
                } else {
                    // nearby singularity off this piece: grade to its scale
                    let t_max = p.t_max.to_f64();
                    let outer = 0.25 * p.endpoint_distance(&f, d, false).sqrt();
                    if outer < t_max * 0.5 {
                        marks.push(Focus::new(Real::zero(work), outer));
                    }
                    let inner = 0.25 * p.endpoint_distance(&f, d, true) / (2.0 * t_max);
                    if inner < t_max * 0.5 {
                        marks.push(Focus::new(p.t_max.with_prec(work), inner));
                    }
                }
            }
            let t_max = p.t_max.with_prec(work);
            let edges = refine_edges(&graded_edges(&Real::zero(work), &t_max, &marks, 0.5), 0.25);
            let v: T = rule.integrate_panels(&edges, |t| {
                let t = t.with_prec(prec);
                g(&p.theta(&t, d)).scaled(&p.weight(&t, d))
            });
            acc.add_scaled(&one, &v);
        }
        Ok(acc)
    };
    let lo = run(20)?;
    let hi = run(30)?;
    let mut diff = hi.scaled(&Real::one(work));
    diff.add_scaled(&Real::new(work, -1.0), &lo);
    let tol = Real::exp2i(work, -(prec as i32) / 2) * hi.magnitude().max(Real::one(work));
    if diff.magnitude() > tol {
        return Err(Error::QuadratureNotConverged(format!(
            "support integral: orders differ by {:e}",
            diff.magnitude().to_f64()
        )));
    }
    Ok(hi.at_prec(prec))
}

/// Equilibrium density at θ.
pub fn eq_density(d: &EquilibriumData, theta: &Real) -> Result<Real> {
    let prec = d.prec();
    let t = reduce_pm_pi(&theta.with_prec(prec));
    if t.abs() == d.theta0 {
        return Err(Error::EndpointSingular);
    }
    if !d.in_support(&t) {
        return Err(Error::OutsideSupport);
    }
    let ratio = (t.cos() + d.theta1.cos()) / (t.cos() - d.theta0.cos());
    Ok(ratio.max(Real::zero(prec)).sqrt() / (Real::pi(prec) * 2.0))
}

/// 2∫_J ln|cot(θ/2)| u dθ for the two-arc density with parameter θ1.
pub fn x_of_theta1(theta0: &Real, theta1: &Real, prec: u32) -> Result<Real> {
    let d = EquilibriumData {
        x: GapRate::Infinite,
        theta0: theta0.with_prec(prec),
        regime: Regime::TwoArc,
        theta1: theta1.with_prec(prec),
        ell: Real::zero(prec),
        x_c: x_critical(theta0)?,
    };
    let foci = [Real::zero(prec), Real::pi(prec)];
    let v = support_integral(&d, &foci, |th| {
        let h = th * 0.5;
        (h.cos() / h.sin()).abs().ln()
    })?;
    Ok(v * 2.0)
}

/// f(−1) − f(1) = ∫_{θ0}^{π−θ1} sqrt((cos θ1 + cos θ)/(cos θ0 − cos θ)) dθ,
/// which equals x_of_theta1. Only square-root endpoint behaviour occurs, so
/// after θ = θ0 + t² and θ = π − θ1 − t² the integrand is smooth.
pub fn x_of_theta1_gap_form(theta0: &Real, theta1: &Real, prec: u32) -> Result<Real> {
    let work = prec + 16;
    let t0 = theta0.with_prec(work);
    let t1 = theta1.with_prec(work);
    let pi = Real::pi(work);
    let c0 = t0.cos();
    let c1 = t1.cos();
    let mid = (&t0 + &pi - &t1) * 0.5;
    let left_len = (&mid - &t0).sqrt();
    let right_len = (&pi - &t1 - &mid).sqrt();
    let left = |t: &Real| -> Real {
        let h = t.square() * 0.5;
        let th = &t0 + t.square();
        let den = (&t0 + &h).sin() * h.sin() * 2.0;
        t * ((&c1 + th.cos()) / den).sqrt() * 2.0
    };
    let right = |t: &Real| -> Real {
        let h = t.square() * 0.5;
        let th = &pi - &t1 - t.square();
        let num = (&t1 + &h).sin() * h.sin() * 2.0;
        t * (num / (&c0 - th.cos())).sqrt() * 2.0
    };
    let edges = |len: &Real, near: &Real| {
        let w = 0.25 * (near.to_f64() * 2.0).sqrt();
        let foci = [Focus::new(Real::zero(work), w)];
        // The opposite endpoint sits about 0.4·len past the end of a short piece.
        refine_edges(&graded_edges(&Real::zero(work), len, &foci, 0.5), (len.to_f64() / 8.0).min(0.25))
    };
    let le = edges(&left_len, &t0);
    let re = edges(&right_len, &t1);
    let run = |m: usize| -> Result<Real> {
        let rule = gauss_legendre(m, work)?;
        let a: Real = rule.integrate_panels(&le, left);
        let b: Real = rule.integrate_panels(&re, right);
        Ok(a + b)
    };
    let lo = run(24)?;
    let hi = run(36)?;
    let tol = Real::exp2i(work, -(prec as i32) + 24) * hi.abs().max(Real::one(work));
    if (&lo - &hi).abs() > tol {
        return Err(Error::QuadratureNotConverged(format!(
            "gap-form x integral: orders differ by {:e}",
            (&lo - &hi).abs().to_f64()
        )));
    }
    Ok(hi.with_prec(prec))
}

/// θ1 ∈ (0, π − θ0) with x_of_theta1(θ1) = x, by bisection on the gap form.
/// The root is then checked against the defining integral.
pub fn theta1_solve(x: &Real, theta0: &Real, prec: u32) -> Result<Real> {
    let xc = x_critical(theta0)?;
    if !x.is_positive() || *x >= xc {
        return Err(Error::DomainError("theta1 exists only for 0 < x < x_c".into()));
    }
    let x = x.with_prec(prec);
    // x_of_theta1 decreases from x_c at θ1 = 0 to 0 at π − θ0
    let mut lo = Real::zero(prec);
    let mut hi = Real::pi(prec) - theta0.with_prec(prec);
    let bits = (prec as i32 - 24).min(100);
    let tol = Real::exp2i(prec, -bits);
    while (&hi - &lo) > tol {
        let mid = (&lo + &hi) * 0.5;
        if x_of_theta1_gap_form(theta0, &mid, prec)? > x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta1 = (lo + hi) * 0.5;
    let check = x_of_theta1(theta0, &theta1, prec)?;
    if (check - &x).abs().to_f64() > 1e-15 * xc.to_f64().max(1.0) {
        return Err(Error::NotConverged("theta1 disagrees with the defining integral".into()));
    }
    Ok(theta1)
}

/// The Lagrange constant ℓ.
pub fn eq_ell(d: &EquilibriumData, prec: u32) -> Result<Real> {
    if d.regime != Regime::TwoArc {
        return Ok((d.theta0.with_prec(prec) * 0.5).sin().ln() * -2.0);
    }
    let work = prec + 16;
    let c0 = d.theta0.with_prec(work).cos();
    let c1 = d.theta1.with_prec(work).cos();
    let one = Real::one(work);
    let integrand = |s: &Real| -> Real {
        let num = s.square() + s * &c1 * 2.0 + 1.0;
        let den = s.square() - s * &c0 * 2.0 + 1.0;
        // 1 − sqrt(num/den) = (den − num)/(den (1 + sqrt(num/den)))
        let r = (&num / &den).sqrt();
        let diff = -(&c0 + &c1) * 2.0 / (&den * (&r + 1.0));
        diff
    };
    let edges = crate::numerics::quad::uniform_edges(&Real::zero(work), &one, 4);
    let lo: Real = gauss_legendre(24, work)?.integrate_panels(&edges, integrand);
    let hi: Real = gauss_legendre(36, work)?.integrate_panels(&edges, integrand);
    let tol = Real::exp2i(work, -(prec as i32) / 2);
    if (&lo - &hi).abs() > tol {
        return Err(Error::QuadratureNotConverged("ell integral".into()));
    }
    Ok(-hi.with_prec(prec))
}

/// f(e^{iα}) = 2∫ ln|e^{iα} − e^{iθ}| dμ(θ).
pub fn log_potential(d: &EquilibriumData, alpha: &Real) -> Result<Real> {
    let prec = d.prec();
    let alpha = alpha.with_prec(prec);
    let foci = [alpha.clone()];
    let v = support_integral(d, &foci, |th| (((&alpha - th) * 0.5).sin() * 2.0).abs().ln())?;
    Ok(v * 2.0)
}

/// d/dα f(e^{iα}) on a gap component.
pub fn gap_potential_derivative(d: &EquilibriumData, alpha: &Real) -> Result<Real> {
    let prec = d.prec();
    let pi = Real::pi(prec);
    let two_pi = &pi * 2.0;
    let mut a = reduce_pm_pi(&alpha.with_prec(prec));
    if a.is_negative() {
        a += &two_pi;
    }
    let upper = &pi - &d.theta1;
    let lower = &pi + &d.theta1;
    let value = || ((d.theta1.cos() + a.cos()) / (d.theta0.cos() - a.cos())).max(Real::zero(prec)).sqrt();
    if a > d.theta0 && a < upper {
        Ok(value())
    } else if a > lower && a < &two_pi - &d.theta0 {
        Ok(-value())
    } else if d.regime != Regime::TwoArc && a == pi {
        Ok(Real::zero(prec))
    } else {
        Err(Error::OutsideGap)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridPoint {
    pub alpha: f64,
    pub in_support: bool,
    /// |f − V + ℓ| on the support, V − ℓ − f on the gap.
    pub value: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationalReport {
    pub regime: Regime,
    pub theta1: f64,
    pub ell: f64,
    pub equality_residual: f64,
    /// None when V = +∞ on the gap.
    pub min_margin: Option<f64>,
    pub argmin_alpha: Option<f64>,
    /// Margin with a neighbourhood of −1 excluded.
    pub min_margin_away_from_minus_one: Option<f64>,
    pub strict: bool,
    pub grid: Vec<GridPoint>,
}

/// Checks the Euler–Lagrange conditions on a grid: equality on the support
/// and inequality on the gap.
pub fn variational_residuals(d: &EquilibriumData, grid_size: usize) -> Result<VariationalReport> {
    if grid_size < 8 {
        return Err(Error::DomainError("grid_size must be at least 8".into()));
    }
    let prec = d.prec();
    let pi = Real::pi(prec);
    let v_gap = d.gap_level();
    let mut grid = Vec::new();
    let mut eq_res = Real::zero(prec);
    let mut min_margin: Option<(Real, f64)> = None;
    let mut min_away: Option<Real> = None;
    let mut record_gap = |alpha: Real, grid: &mut Vec<GridPoint>| -> Result<()> {
        let af = alpha.to_f64();
        let value = match &v_gap {
            Some(v) => {
                let f = log_potential(d, &alpha)?;
                let m = v - &d.ell - f;
                let mf = m.to_f64();
                if min_margin.as_ref().map_or(true, |(b, _)| m < *b) {
                    min_margin = Some((m.clone(), af));
                }
                if (af - pi.to_f64()).abs() > 0.05 && min_away.as_ref().map_or(true, |b| m < *b) {
                    min_away = Some(m);
                }
                Some(mf)
            }
            None => None,
        };
        grid.push(GridPoint { alpha: af, in_support: false, value });
        Ok(())
    };
    // gap (θ0, π − θ1) and its mirror; −1 itself when it is a gap point
    let k = grid_size;
    let upper = &pi - &d.theta1;
    for j in 0..k {
        let a = &d.theta0 + (&upper - &d.theta0) * (2 * j + 1) as f64 / (2 * k) as f64;
        record_gap(a.clone(), &mut grid)?;
        record_gap(&pi * 2.0 - a, &mut grid)?;
    }
    if d.regime != Regime::TwoArc {
        record_gap(pi.clone(), &mut grid)?;
    }
    // support interiors
    let mut record_support = |alpha: Real, level: Real, grid: &mut Vec<GridPoint>| -> Result<()> {
        let f = log_potential(d, &alpha)?;
        let r = (f - level + &d.ell).abs();
        grid.push(GridPoint { alpha: alpha.to_f64(), in_support: true, value: Some(r.to_f64()) });
        eq_res = eq_res.clone().max(r);
        Ok(())
    };
    for j in 0..k {
        let a = -&d.theta0 + &d.theta0 * 2.0 * (2 * j + 1) as f64 / (2 * k) as f64;
        record_support(a, Real::zero(prec), &mut grid)?;
    }
    if let (Regime::TwoArc, Some(v)) = (d.regime, &v_gap) {
        for j in 0..k {
            let a = &pi - &d.theta1 + &d.theta1 * 2.0 * (2 * j + 1) as f64 / (2 * k) as f64;
            record_support(a, v.clone(), &mut grid)?;
        }
    }
    let strict = match &min_margin {
        None => true,
        Some((m, _)) => {
            let eps = 1e-9;
            match d.regime {
                Regime::Critical => min_away.as_ref().map_or(true, |x| x.to_f64() > eps),
                _ => m.to_f64() > eps,
            }
        }
    };
    Ok(VariationalReport {
        regime: d.regime,
        theta1: d.theta1.to_f64(),
        ell: d.ell.to_f64(),
        equality_residual: eq_res.to_f64(),
        min_margin: min_margin.as_ref().map(|(m, _)| m.to_f64()),
        argmin_alpha: min_margin.as_ref().map(|(_, a)| *a),
        min_margin_away_from_minus_one: min_away.map(|m| m.to_f64()),
        strict,
        grid,
    })
}
