//! Riemann–Hilbert objects for the gap problem with x ≥ x_c: the g-function
//! and φ, the global parametrix, the Bessel model and its modification, the
//! local parametrices at z0, z̄0 and −1, and residual checks of their jump and
//! matching conditions.
//!
//! Conventions. γ is the arc |θ| < θ0 of the unit circle. S1 is oriented
//! counterclockwise, so the + side of every arc of S1 is the inside of the
//! disk. The three half-lines of the Bessel model are oriented toward 0.
//! R(z) = ((z−z0)(z−z̄0))^{1/2} is analytic off γ with R(z) ~ z at infinity,
//! and β(z)⁴ = (z−z̄0)/(z−z0) with β → 1 at infinity.
//!
//! Near z0 the map ζ = φ²/16 sends γ to ℝ⁻, the gap to ℝ⁺ and the inside of
//! the disk to the upper half plane. Inside D(z0, r) the lenses are the
//! preimages of the rays arg ζ = ±2π/3; outside the disks they are circular
//! arcs through z0 and z̄0.

use serde::Serialize;

use crate::asymptotics::x_critical;
use crate::equilibrium::{support_integral_of, EquilibriumData};
use crate::error::{Error, Result};
use crate::numerics::bessel::{bessel_i, bessel_k};
use crate::numerics::quad::{gauss_legendre, graded_edges, refine_edges, Focus, QuadratureRule};
use crate::numerics::{Complex, Matrix2C, Real};
use crate::symbol::{GapRate, SymbolSpec};

pub const DEFAULT_DISK_DELTA: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Disk {
    Z0,
    ZBar0,
    MinusOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lens {
    /// γ₊, inside the unit disk.
    Inner,
    /// γ₋, outside the unit disk.
    Outer,
}

/// Objects whose jump relations can be checked.
#[derive(Clone, Debug)]
pub enum JumpObject {
    /// Jump matrix of S; the defect reported is J_S − I.
    S,
    P(Disk),
    Psi,
    PsiHat { nx: Real },
    PInf,
}

impl JumpObject {
    pub fn name(&self) -> &'static str {
        match self {
            JumpObject::S => "S-jump",
            JumpObject::P(_) => "P-jump",
            JumpObject::Psi => "Psi-jump",
            JumpObject::PsiHat { .. } => "PsiHat-jump",
            JumpObject::PInf => "Pinf-jump",
        }
    }
}

pub struct ParametrixContext {
    pub theta0: Real,
    pub symbol: SymbolSpec,
    pub n: usize,
    pub x: Real,
    pub disk_radius: Real,
    /// Bulge of the circular lens arcs at θ = 0.
    pub lens_offset: Real,
    pub prec: u32,
    pub x_c: Real,
    /// ℓ of the one-arc (x = ∞) equilibrium measure.
    pub ell: Real,
    eq: EquilibriumData,
    /// P_k(cos θ0).
    legendre: Vec<Real>,
    h_inf: Complex,
    low: QuadratureRule,
    high: QuadratureRule,
}

impl ParametrixContext {
    pub fn new(symbol: &SymbolSpec, n: usize, x: &Real, prec: u32) -> Result<ParametrixContext> {
        ParametrixContext::with_options(symbol, n, x, DEFAULT_DISK_DELTA, None, prec)
    }

    /// `delta` scales the default disk radius δ(π−θ0)min(1, θ0); the radius
    /// is capped so that the three disks stay disjoint.
    pub fn with_options(
        symbol: &SymbolSpec,
        n: usize,
        x: &Real,
        delta: f64,
        lens_offset: Option<f64>,
        prec: u32,
    ) -> Result<ParametrixContext> {
        if !symbol.w_is_symmetric_real() {
            return Err(Error::SymmetryViolation);
        }
        if n == 0 {
            return Err(Error::DomainError("n must be positive".into()));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::DomainError(format!("disk scale {delta} must be positive")));
        }
        let theta0 = symbol.theta0.with_prec(prec);
        let x_c = x_critical(&theta0)?;
        let x = x.with_prec(prec);
        let slack = Real::exp2i(prec, -(prec as i32) + 8) * &x_c;
        if x < &x_c - &slack {
            return Err(Error::DomainError(format!(
                "x = {} is below x_c = {}",
                x.to_f64(),
                x_c.to_f64()
            )));
        }
        let pi = Real::pi(prec);
        let t0 = theta0.to_f64();
        let nominal = Real::new(prec, delta) * (&pi - &theta0) * Real::new(prec, t0.min(1.0));
        let cap = Real::new(prec, 0.45) * (theta0.sin() * 2.0).min((&theta0 * 0.5).cos() * 2.0);
        let disk_radius = nominal.min(cap);
        let b = lens_offset.unwrap_or(0.25 * t0.min(1.0));
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::DomainError(format!("lens offset {b} outside (0, 1)")));
        }
        let eq = EquilibriumData::new(GapRate::Infinite, &theta0, prec)?;
        let ell = eq.ell.clone();
        let symbol = symbol.clone();
        let degree = symbol.w.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let c = theta0.cos();
        let mut legendre = vec![Real::one(prec), c.clone()];
        for k in 1..degree.max(1) {
            let kf = k as f64;
            let next = (&c * &legendre[k] * (2.0 * kf + 1.0) - &legendre[k - 1] * kf) / (kf + 1.0);
            legendre.push(next);
        }
        let mut h_inf = Complex::zero(prec);
        for (m, wm) in &symbol.w {
            let idx = if *m >= 0 { *m as usize } else { (-m - 1) as usize };
            h_inf += wm.with_prec(prec) * &legendre[idx] * 0.5;
        }
        Ok(ParametrixContext {
            theta0,
            symbol,
            n,
            x,
            disk_radius,
            lens_offset: Real::new(prec, b),
            prec,
            x_c,
            ell,
            eq,
            legendre,
            h_inf,
            low: gauss_legendre(24, prec)?,
            high: gauss_legendre(36, prec)?,
        })
    }

    pub fn z0(&self) -> Complex {
        Complex::cis(&self.theta0)
    }

    pub fn center(&self, disk: Disk) -> Complex {
        match disk {
            Disk::Z0 => self.z0(),
            Disk::ZBar0 => self.z0().conj(),
            Disk::MinusOne => Complex::from_f64(self.prec, -1.0, 0.0),
        }
    }

    /// h(∞).
    pub fn h_infinity(&self) -> &Complex {
        &self.h_inf
    }

    fn w_at(&self, z: &Complex) -> Complex {
        self.symbol.eval_w(z)
    }

    fn on_gamma(&self, z: &Complex, tol: &Real) -> bool {
        (z.abs() - 1.0).abs() < *tol && z.arg().abs() < self.theta0
    }

    fn integrate(&self, edges: &[Real], f: impl Fn(&Real) -> Complex, what: &str) -> Result<Complex> {
        let lo: Complex = self.low.integrate_panels(edges, &f);
        let hi: Complex = self.high.integrate_panels(edges, &f);
        let scale = hi.abs().max(Real::one(self.prec));
        let tol = Real::exp2i(self.prec, -(self.prec as i32) / 2) * scale;
        let diff = (&lo - &hi).abs();
        if diff > tol {
            return Err(Error::QuadratureNotConverged(format!("{what}: orders differ by {:e}", diff.to_f64())));
        }
        Ok(hi)
    }
}

fn m2(a11: Complex, a12: Complex, a21: Complex, a22: Complex) -> Matrix2C {
    Matrix2C::new(a11, a12, a21, a22)
}

fn unit_edges(prec: u32, foci: &[Focus]) -> Vec<Real> {
    let edges = graded_edges(&Real::zero(prec), &Real::one(prec), foci, 0.5);
    refine_edges(&edges, 0.125)
}

/// v(z) = e^{iθ0}(z − z̄0)/(z − z0): maps γ to ℝ⁻ and the inside of the unit
/// disk to the lower half plane.
fn v_map(ctx: &ParametrixContext, z: &Complex, z_minus_z0: &Complex) -> Complex {
    let z0 = ctx.z0();
    Complex::cis(&ctx.theta0) * (z - &z0.conj()) / z_minus_z0
}

/// R(z), given z − z0 computed accurately by the caller.
fn r_with(ctx: &ParametrixContext, z: &Complex, z_minus_z0: &Complex) -> Complex {
    let v = v_map(ctx, z, z_minus_z0);
    z_minus_z0 * &Complex::cis(&(-(&ctx.theta0 * 0.5))) * v.sqrt()
}

/// ((z − z0)(z − z̄0))^{1/2}, analytic off γ, ~ z at infinity.
pub fn r_function(ctx: &ParametrixContext, z: &Complex) -> Complex {
    let z = z.with_prec(ctx.prec);
    let d = &z - &ctx.z0();
    r_with(ctx, &z, &d)
}

/// φ'(ξ) = (ξ + 1)/(R(ξ) ξ).
fn dphi(ctx: &ParametrixContext, xi: &Complex, xi_minus_z0: &Complex) -> Complex {
    (xi + 1.0) / (r_with(ctx, xi, xi_minus_z0) * xi)
}

/// β(z) = ((z − z̄0)/(z − z0))^{1/4}, analytic off γ, β(∞) = 1.
pub fn beta(ctx: &ParametrixContext, z: &Complex) -> Complex {
    let z = z.with_prec(ctx.prec);
    let d = &z - &ctx.z0();
    let v = v_map(ctx, &z, &d);
    Complex::cis(&(-(&ctx.theta0 * 0.25))) * v.sqrt().sqrt()
}

/// g(z) = ∫ log(z − e^{iθ}) dμ^{(∞)}, with g(0) = iπ and g(z) ~ log z.
pub fn g_function(ctx: &ParametrixContext, z: &Complex) -> Result<Complex> {
    let prec = ctx.prec;
    let z = z.with_prec(prec);
    if ctx.on_gamma(&z, &Real::new(prec, 1e-8)) {
        return Err(Error::OnContour("g is ambiguous within 1e-8 of gamma".into()));
    }
    let rho = z.abs();
    let foci = if (&rho - 1.0).abs() < 0.5 { vec![z.arg()] } else { Vec::new() };
    if rho > 1.0 {
        let zi = z.recip();
        let integral = support_integral_of(&ctx.eq, &foci, |t| (Complex::one(prec) - Complex::cis(t) * &zi).ln())?;
        Ok(z.ln() + integral)
    } else {
        let integral = support_integral_of(&ctx.eq, &foci, |t| (Complex::one(prec) - &z * &Complex::cis(&-t)).ln())?;
        Ok(Complex::new(Real::zero(prec), Real::pi(prec)) + integral)
    }
}

/// 2g(z) − log z − iπ + ℓ.
pub fn phi_via_g(ctx: &ParametrixContext, z: &Complex) -> Result<Complex> {
    let prec = ctx.prec;
    let z = z.with_prec(prec);
    let g = g_function(ctx, &z)?;
    Ok(g * 2.0 - z.ln() - Complex::new(Real::zero(prec), Real::pi(prec)) + &ctx.ell)
}

/// φ(z) = ∫_{z0}^{z} (ξ+1)/(R(ξ)ξ) dξ along the path that runs radially from
/// z0 to |z|z0 and then along the circle of radius |z|. Points whose
/// argument lies in the gap are reached through the gap side, so the path
/// never meets γ.
pub fn phi_function(ctx: &ParametrixContext, z: &Complex) -> Result<Complex> {
    let prec = ctx.prec;
    let z = z.with_prec(prec);
    let rho = z.abs();
    if rho.is_zero() {
        return Err(Error::DomainError("phi is singular at 0".into()));
    }
    let alpha = z.arg();
    let dr = &rho - 1.0;
    let on_circle = dr.abs() < Real::exp2i(prec, -(prec as i32) + 16);
    if on_circle && alpha.abs() <= ctx.theta0 {
        return Err(Error::PathCrossesCut);
    }
    let z0 = ctx.z0();
    let zb = z0.conj();
    let mut total = Complex::zero(prec);
    if !on_circle {
        let mut foci = Vec::new();
        if rho < 0.5 {
            let w = (rho.to_f64() / (2.0 * dr.abs().to_f64())).max(1e-30) * 0.1;
            foci.push(Focus::new(Real::one(prec), w));
        }
        let edges = unit_edges(prec, &foci);
        let scale = &z0 * &(&dr * 2.0);
        total += ctx.integrate(
            &edges,
            |tau| {
                let diff = &z0 * &(&dr * tau.square());
                let xi = &z0 + &diff;
                dphi(ctx, &xi, &diff) * &scale * tau
            },
            "phi radial segment",
        )?;
    }
    let two_pi = Real::pi(prec) * 2.0;
    let target = if alpha.abs() <= ctx.theta0 || alpha.is_positive() { alpha.clone() } else { &alpha + &two_pi };
    let delta = &target - &ctx.theta0;
    if !delta.is_zero() {
        let mut foci = Vec::new();
        let dl = delta.abs().to_f64();
        if !on_circle {
            let w = (0.1 * (dr.abs().to_f64() / dl).sqrt()).max(2f64.powi(-(prec as i32) / 3));
            foci.push(Focus::new(Real::zero(prec), w));
        }
        let dist_end = (&z - &zb).abs().to_f64();
        if dist_end < 0.5 {
            foci.push(Focus::new(Real::one(prec), (0.1 * dist_end / (2.0 * dl)).max(1e-300)));
        }
        let edges = unit_edges(prec, &foci);
        let rot = Complex::cis(&ctx.theta0);
        total += ctx.integrate(
            &edges,
            |s| {
                let ang = &delta * s.square();
                let e = Complex::cis(&ang);
                let half = &ang * 0.5;
                let em1 = Complex::cis(&half) * Complex::new(Real::zero(prec), half.sin() * 2.0);
                let diff = &rot * &(&e * &dr + em1);
                let xi = &rot * &e * &rho;
                let dxi = xi.mul_i() * &(&delta * s * 2.0);
                dphi(ctx, &xi, &diff) * dxi
            },
            "phi arc segment",
        )?;
    }
    Ok(total)
}

/// φ on the gap: 2 arccosh(|sin(α/2)| / sin(θ0/2)), real, equal to x_c at −1.
pub fn phi_on_gap(ctx: &ParametrixContext, alpha: &Real) -> Result<Real> {
    let prec = ctx.prec;
    let alpha = alpha.with_prec(prec);
    let y = (&alpha * 0.5).sin().abs() / (&ctx.theta0 * 0.5).sin();
    if y < 1.0 {
        return Err(Error::OutsideGap);
    }
    Ok(((&y + (y.square() - 1.0).sqrt()).ln()) * 2.0)
}

/// ζ(z) = φ(z)²/16.
pub fn zeta_map(ctx: &ParametrixContext, z: &Complex) -> Result<Complex> {
    let phi = phi_function(ctx, z)?;
    Ok(phi.square() / 16.0)
}

fn zeta_derivative_with(ctx: &ParametrixContext, z: &Complex, phi: &Complex) -> Complex {
    let z = z.with_prec(ctx.prec);
    let d = &z - &ctx.z0();
    phi * &dphi(ctx, &z, &d) / 8.0
}

/// ζ'(z) = φ(z)φ'(z)/8.
pub fn zeta_derivative(ctx: &ParametrixContext, z: &Complex) -> Result<Complex> {
    let phi = phi_function(ctx, z)?;
    Ok(zeta_derivative_with(ctx, z, &phi))
}

/// Solves ζ(z) = target by Newton's method from `guess`.
pub fn zeta_inverse(ctx: &ParametrixContext, target: &Complex, guess: &Complex) -> Result<Complex> {
    let prec = ctx.prec;
    let tol = Real::exp2i(prec, -(prec as i32) / 2 - 8);
    let mut z = guess.with_prec(prec);
    for _ in 0..60 {
        let phi = phi_function(ctx, &z)?;
        let f = phi.square() / 16.0 - target;
        let step = f / zeta_derivative_with(ctx, &z, &phi);
        z -= &step;
        if step.abs() < tol {
            return Ok(z);
        }
    }
    Err(Error::NotConverged("inverse of the zeta map".into()))
}

/// Point of the lens preimage ζ⁻¹(ρ e^{±2πi/3}) in D(z0, r); `upper` selects
/// the ray arg ζ = 2π/3, which lies inside the unit disk.
pub fn lens_preimage(ctx: &ParametrixContext, upper: bool, rho: &Real) -> Result<Complex> {
    let prec = ctx.prec;
    let ang = Real::pi(prec) * (if upper { 2.0 } else { -2.0 }) / 3.0;
    let target = Complex::from_polar(&rho.with_prec(prec), &ang);
    let z0 = ctx.z0();
    // ζ ≈ c(z − z0) near z0, with c from a central difference.
    let h = Real::new(prec, 1e-6);
    let zp = &z0 * &(1.0 + &h);
    let zm = &z0 * &(1.0 - &h);
    let c = (zeta_map(ctx, &zp)? - zeta_map(ctx, &zm)?) / (&z0 * &(&h * 2.0));
    let mut guess = &z0 + &(&target / &c);
    // Walk out along the ray so each Newton solve starts close.
    let steps = 4;
    for k in 1..=steps {
        let t = Complex::from_polar(&(rho.with_prec(prec) * (k as f64) / (steps as f64)), &ang);
        guess = zeta_inverse(ctx, &t, &guess)?;
    }
    Ok(guess)
}

/// Point on a circular lens arc through z0, 1 ∓ lens_offset and z̄0; t ∈ (0, 1)
/// runs from z0 to z̄0.
pub fn lens_point(ctx: &ParametrixContext, lens: Lens, t: &Real) -> Complex {
    let prec = ctx.prec;
    let t = t.with_prec(prec);
    let c = match lens {
        Lens::Inner => 1.0 - &ctx.lens_offset,
        Lens::Outer => 1.0 + &ctx.lens_offset,
    };
    let cos0 = ctx.theta0.cos();
    let m = (c.square() - 1.0) / ((&c - &cos0) * 2.0);
    let radius = (&c - &m).abs();
    let a0 = ctx.theta0.sin().atan2(&(&cos0 - &m));
    let ang = if c > m {
        &a0 * (1.0 - &t * 2.0)
    } else {
        &a0 + (Real::pi(prec) * 2.0 - &a0 * 2.0) * &t
    };
    Complex::from_polar(&radius, &ang) + &m
}

/// h(z) in closed form, for W a Laurent polynomial:
/// h = W/2 − R(z)(P_∞(z) + P_0(z)), where P_∞ and P_0 are the polynomial
/// parts of W/(2R) at infinity and at 0.
pub fn szego_h_closed(ctx: &ParametrixContext, z: &Complex) -> Complex {
    let prec = ctx.prec;
    let z = z.with_prec(prec);
    if ctx.symbol.w.is_empty() {
        return Complex::zero(prec);
    }
    let mut poly = Complex::zero(prec);
    for (m, wm) in &ctx.symbol.w {
        let wm = wm.with_prec(prec) * 0.5;
        if *m >= 1 {
            for k in 0..*m {
                poly += &wm * &ctx.legendre[k as usize] * z.powi(m - k - 1);
            }
        } else if *m <= -1 {
            for k in 0..(-m) {
                poly -= &wm * &ctx.legendre[k as usize] * z.powi(m + k);
            }
        }
    }
    ctx.w_at(&z) * 0.5 - r_function(ctx, &z) * poly
}

/// h(z) by quadrature of its Cauchy integral over γ, with θ = ±(θ0 − t²)
/// near each endpoint.
pub fn szego_h(ctx: &ParametrixContext, z: &Complex) -> Result<Complex> {
    let prec = ctx.prec;
    let z = z.with_prec(prec);
    if ctx.symbol.w.is_empty() {
        return Ok(Complex::zero(prec));
    }
    if ctx.on_gamma(&z, &Real::exp2i(prec, -(prec as i32) / 2)) {
        return Err(Error::OnContour("h on gamma".into()));
    }
    let theta0 = &ctx.theta0;
    let tmax = theta0.sqrt();
    let tm = tmax.to_f64();
    let z0 = ctx.z0();
    let alpha = z.arg();
    let near_circle = (z.abs() - 1.0).abs().to_f64();
    let end_dist = (&z - &z0).abs().min((&z - &z0.conj()).abs()).to_f64();
    let mut total = Complex::zero(prec);
    for upper in [true, false] {
        let mut foci = Vec::new();
        if end_dist < 0.5 {
            foci.push(Focus::new(Real::zero(prec), 0.1 * end_dist.sqrt() / tm));
        }
        let on_side = if upper { !alpha.is_negative() } else { !alpha.is_positive() };
        if near_circle < 0.5 && on_side && alpha.abs() < *theta0 {
            let tf = (theta0 - &alpha.abs()).sqrt();
            let w = 0.1 * near_circle / (2.0 * tf.to_f64() + near_circle.sqrt()) / tm;
            foci.push(Focus::new(&tf / &tmax, w.max(1e-300)));
        }
        let edges = unit_edges(prec, &foci);
        total += ctx.integrate(
            &edges,
            |u| {
                let t = u * &tmax;
                let t2 = t.square();
                let (theta, a, b) = if upper {
                    (theta0 - &t2, &t2 * 0.5, theta0 - &t2 * 0.5)
                } else {
                    (&t2 - theta0, theta0 - &t2 * 0.5, &t2 * 0.5)
                };
                // cos θ − cos θ0 = 2 sin((θ0−θ)/2) sin((θ0+θ)/2)
                let gap = a.sin() * b.sin() * 4.0;
                let xi = Complex::cis(&theta);
                let r_plus = -(Complex::cis(&(&theta * 0.5)) * gap.sqrt());
                let integrand = ctx.w_at(&xi) / (r_plus * (&xi - &z));
                integrand * xi.mul_i() * &(&t * 2.0 * &tmax)
            },
            "Szego h",
        )?;
    }
    let two_pi_i = Complex::new(Real::zero(prec), Real::pi(prec) * 2.0);
    Ok(r_function(ctx, &z) * total / two_pi_i)
}

/// P^(∞)(z) = e^{h∞σ3} M(β(z)) e^{−h(z)σ3}.
pub fn global_parametrix(ctx: &ParametrixContext, z: &Complex) -> Result<Matrix2C> {
    let prec = ctx.prec;
    let z = z.with_prec(prec);
    if ctx.on_gamma(&z, &Real::exp2i(prec, -(prec as i32) + 16)) {
        return Err(Error::OnContour("P^(inf) on gamma".into()));
    }
    let b = beta(ctx, &z);
    let bi = b.recip();
    let plus = (&b + &bi) * 0.5;
    let minus = (&b - &bi) / Complex::new(Real::zero(prec), Real::new(prec, 2.0));
    let m = m2(plus.clone(), -&minus, minus, plus);
    if ctx.symbol.w.is_empty() {
        return Ok(m);
    }
    let h = szego_h_closed(ctx, &z);
    let left = Matrix2C::sigma3_power(&ctx.h_inf.exp());
    let right = Matrix2C::sigma3_power(&(-h).exp());
    Ok(&(&left * &m) * &right)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sector {
    I,
    II,
    III,
}

fn sector(zeta: &Complex) -> Result<Sector> {
    if zeta.is_zero() {
        return Err(Error::OnContour("zeta = 0".into()));
    }
    if zeta.im.is_zero() && zeta.re.is_negative() {
        return Err(Error::OnContour("zeta on the negative axis".into()));
    }
    let a = zeta.arg();
    let bound = Real::pi(zeta.prec()) * 2.0 / 3.0;
    Ok(if a.abs() < bound {
        Sector::I
    } else if a.is_positive() {
        Sector::II
    } else {
        Sector::III
    })
}

/// The |arg ζ| < 2π/3 formula with principal ζ^{1/2}, valid on ℂ \ ℝ⁻.
fn psi_principal(zeta: &Complex) -> Result<Matrix2C> {
    let prec = zeta.prec();
    let sq = zeta.sqrt();
    let w = &sq * 2.0;
    let pi = Real::pi(prec);
    let i0 = bessel_i(0, &w)?;
    let i1 = bessel_i(1, &w)?;
    let k0 = bessel_k(0, &w)?;
    let k1 = bessel_k(1, &w)?;
    Ok(m2(
        i0,
        k0.mul_i() / &pi,
        (&sq * &i1).mul_i() * &(&pi * 2.0),
        &sq * &k1 * 2.0,
    ))
}

fn lower(prec: u32, c: f64) -> Matrix2C {
    Matrix2C::from_f64(prec, [[1.0, 0.0], [c, 1.0]])
}

/// Bessel model solution Ψ(ζ). Sectors II and III are obtained from the
/// sector I formula by the ray jumps.
pub fn bessel_model_psi(zeta: &Complex) -> Result<Matrix2C> {
    let s = sector(zeta)?;
    let m = psi_principal(zeta)?;
    let prec = zeta.prec();
    Ok(match s {
        Sector::I => m,
        Sector::II => m * lower(prec, -1.0),
        Sector::III => m * lower(prec, 1.0),
    })
}

/// ‖(1/√2)[[1,i],[i,1]]⁻¹ (2πζ^{1/2})^{σ3/2} Ψ(ζ) e^{−2ζ^{1/2}σ3} − I‖.
pub fn psi_asymptotic_defect(zeta: &Complex) -> Result<Real> {
    let prec = zeta.prec();
    let psi = bessel_model_psi(zeta)?;
    let sq = zeta.sqrt();
    let pi = Real::pi(prec);
    let pre = Matrix2C::sigma3_power(&(&sq * &(&pi * 2.0)).sqrt());
    let r2 = Real::new(prec, 0.5).sqrt();
    let i = Complex::i(prec);
    let u_inv = m2(Complex::one(prec), -&i, -&i, Complex::one(prec)).scale(&r2.to_complex());
    let post = Matrix2C::sigma3_power(&(-(&sq * 2.0)).exp());
    let m = &(&(&u_inv * &pre) * &psi) * &post;
    Ok((&m - &Matrix2C::identity(prec)).max_abs())
}

/// F(ζ), the entire matrix function used in the modification of Ψ.
pub fn f_matrix(zeta: &Complex) -> Result<Matrix2C> {
    let prec = zeta.prec();
    let s = sector(zeta)?;
    let psi = bessel_model_psi(zeta)?;
    let two_pi_i = Complex::new(Real::zero(prec), Real::pi(prec) * 2.0);
    let l = -(zeta.ln() / &two_pi_i);
    let upper = m2(Complex::one(prec), l, Complex::zero(prec), Complex::one(prec));
    let left = match s {
        Sector::I => psi,
        Sector::II => psi * lower(prec, 1.0),
        Sector::III => psi * lower(prec, -1.0),
    };
    Ok(left * upper)
}

/// Ψ̂(ζ) = (I + A(ζ))Ψ(ζ) with A = e^{−nx} F [[0, −ln(−ζ)/(2πi)], [0, 0]] F⁻¹.
pub fn psi_hat(zeta: &Complex, nx: &Real) -> Result<Matrix2C> {
    let prec = zeta.prec();
    if zeta.im.is_zero() && zeta.re.is_positive() {
        return Err(Error::OnContour("zeta on the positive axis".into()));
    }
    if nx.is_negative() {
        return Err(Error::DomainError("nx must be nonnegative".into()));
    }
    let psi = bessel_model_psi(zeta)?;
    let f = f_matrix(zeta)?;
    let two_pi_i = Complex::new(Real::zero(prec), Real::pi(prec) * 2.0);
    let l = -((-zeta).ln() / &two_pi_i);
    let n = m2(Complex::zero(prec), l, Complex::zero(prec), Complex::zero(prec));
    let a = (&(&f * &n) * &f.inverse()).scale(&(-nx.with_prec(prec)).exp().to_complex());
    Ok(&(&Matrix2C::identity(prec) + &a) * &psi)
}

fn e_with(ctx: &ParametrixContext, z: &Complex, zeta: &Complex) -> Result<Matrix2C> {
    let prec = ctx.prec;
    let pinf = global_parametrix(ctx, z)?;
    let w = ctx.w_at(z);
    let ew = Matrix2C::sigma3_power(&(&w * 0.5).exp());
    let r2 = Real::new(prec, 0.5).sqrt().to_complex();
    let i = Complex::i(prec);
    let u = m2(Complex::one(prec), -&i, -&i, Complex::one(prec)).scale(&r2);
    let scale = (Real::pi(prec) * (2 * ctx.n) as f64).sqrt();
    let q = zeta.sqrt().sqrt() * &scale;
    Ok(&(&(&pinf * &ew) * &u) * &Matrix2C::sigma3_power(&q))
}

/// E(z) = P^(∞)(z) e^{Wσ3/2} (1/√2)[[1,−i],[−i,1]] (nπφ(z)/2)^{σ3/2}, with
/// (nπφ/2)^{1/2} = (2nπ)^{1/2} ζ^{1/4}.
pub fn e_matrix(ctx: &ParametrixContext, z: &Complex) -> Result<Matrix2C> {
    let z = z.with_prec(ctx.prec);
    let zeta = zeta_map(ctx, &z)?;
    e_with(ctx, &z, &zeta)
}

fn check_disk(ctx: &ParametrixContext, z: &Complex, disk: Disk) -> Result<()> {
    let d = (z - &ctx.center(disk)).abs();
    if d > &ctx.disk_radius * (1.0 + 1e-12) {
        return Err(Error::OutsideDisk);
    }
    Ok(())
}

fn p_z0(ctx: &ParametrixContext, z: &Complex) -> Result<Matrix2C> {
    let prec = ctx.prec;
    let phi = phi_function(ctx, z)?;
    let zeta = phi.square() / 16.0;
    let e = e_with(ctx, z, &zeta)?;
    let n = ctx.n as f64;
    let nz = &zeta * (n * n);
    let hat = psi_hat(&nz, &(&ctx.x * n))?;
    let w = ctx.w_at(z);
    let d = Matrix2C::sigma3_power(&(-(&phi * (n * 0.5)) - &w * 0.5).exp());
    let _ = prec;
    Ok(&(&e * &hat) * &d)
}

/// h̃(z) = (1/2πi) ∫_{S1 ∩ D(−1,r)} e^{n(φ(s)−x)} e^{W(s)} /(s − z) ds.
pub fn h_tilde(ctx: &ParametrixContext, z: &Complex) -> Result<Complex> {
    let prec = ctx.prec;
    let z = z.with_prec(prec);
    let pi = Real::pi(prec);
    let a = (&ctx.disk_radius * 0.5).asin() * 2.0;
    let lo = &pi - &a;
    let width = &a * 2.0;
    let n = ctx.n as f64;
    let mut foci = Vec::new();
    let near = (z.abs() - 1.0).abs().to_f64();
    if near < 0.25 {
        let mut alpha = z.arg();
        if alpha.is_negative() {
            alpha += &pi * 2.0;
        }
        let u = ((&alpha - &lo) / &width).max(Real::zero(prec)).min(Real::one(prec));
        let nearest = Complex::cis(&(&lo + &width * &u));
        let dist = (&nearest - &z).abs().to_f64();
        foci.push(Focus::new(u, (0.1 * dist / width.to_f64()).max(1e-300)));
    }
    let edges = unit_edges(prec, &foci);
    let integral = ctx.integrate(
        &edges,
        |u| {
            let alpha = &lo + &width * u;
            let s = Complex::cis(&alpha);
            let phi = phi_on_gap(ctx, &alpha).unwrap_or_else(|_| Real::zero(prec));
            let amp = ((phi - &ctx.x) * n).exp();
            (ctx.w_at(&s).exp() * &amp) / (&s - &z) * s.mul_i() * &width
        },
        "h tilde",
    )?;
    Ok(integral / Complex::new(Real::zero(prec), &pi * 2.0))
}

/// Local parametrix P(z) in the given disk.
pub fn local_parametrix(ctx: &ParametrixContext, z: &Complex, disk: Disk) -> Result<Matrix2C> {
    let z = z.with_prec(ctx.prec);
    check_disk(ctx, &z, disk)?;
    match disk {
        Disk::Z0 => p_z0(ctx, &z),
        Disk::ZBar0 => Ok(p_z0(ctx, &z.conj())?.conj()),
        Disk::MinusOne => {
            let pinf = global_parametrix(ctx, &z)?;
            let ht = h_tilde(ctx, &z)?;
            let prec = ctx.prec;
            Ok(pinf * m2(Complex::one(prec), ht, Complex::zero(prec), Complex::one(prec)))
        }
    }
}

/// max over `points` equally spaced points of ∂D(c, r) of ‖P P^(∞)⁻¹ − I‖.
pub fn matching_residual(ctx: &ParametrixContext, disk: Disk, points: usize) -> Result<Real> {
    let prec = ctx.prec;
    let c = ctx.center(disk);
    let two_pi = Real::pi(prec) * 2.0;
    let mut worst = Real::zero(prec);
    for k in 0..points {
        let ang = &two_pi * (2 * k + 1) as f64 / (2 * points) as f64;
        let z = &c + &Complex::from_polar(&ctx.disk_radius, &ang);
        let p = local_parametrix(ctx, &z, disk)?;
        let pinf = global_parametrix(ctx, &z)?;
        let m = &(&p * &pinf.inverse()) - &Matrix2C::identity(prec);
        worst = worst.max(m.max_abs());
    }
    Ok(worst)
}

fn gamma_jump(w: &Complex) -> Matrix2C {
    let prec = w.prec();
    m2(Complex::zero(prec), w.exp(), -(-w).exp(), Complex::zero(prec))
}

fn upper_jump(c: Complex) -> Matrix2C {
    let prec = c.prec();
    m2(Complex::one(prec), c, Complex::zero(prec), Complex::one(prec))
}

fn lower_jump(c: Complex) -> Matrix2C {
    let prec = c.prec();
    m2(Complex::one(prec), Complex::zero(prec), c, Complex::one(prec))
}

/// Where a point sits on the ζ-plane contour: the + side normal and the jump.
fn zeta_contour(zeta: &Complex, tol: &Real, allow_positive: bool) -> Result<(Complex, u8)> {
    let prec = zeta.prec();
    let pi = Real::pi(prec);
    let a = zeta.arg();
    let ray = &pi * 2.0 / 3.0;
    if (&a.abs() - &pi).abs() < *tol || (zeta.im.abs() < *tol && zeta.re.is_negative()) {
        return Ok((Complex::i(prec), 0));
    }
    if allow_positive && a.abs() < *tol {
        return Ok((Complex::i(prec), 1));
    }
    for sign in [1.0, -1.0] {
        if (&a - &ray * sign).abs() < *tol {
            // Left normal of the direction −e^{±2πi/3}.
            let dir = -Complex::cis(&(&ray * sign));
            return Ok((dir.mul_i(), 2));
        }
    }
    Err(Error::DomainError("point is not on the zeta contour".into()))
}

/// L₊ − L₋J at one normal offset. For `JumpObject::S` the result is J_S − I.
pub fn jump_defect(ctx: &ParametrixContext, object: &JumpObject, point: &Complex, offset: &Real) -> Result<Matrix2C> {
    let prec = ctx.prec;
    let p = point.with_prec(prec);
    let d = offset.with_prec(prec);
    if !d.is_positive() {
        return Err(Error::DomainError("offset must be positive".into()));
    }
    let ctol = Real::new(prec, 1e-12);
    let on_circle = (p.abs() - 1.0).abs() < ctol;
    let n = ctx.n as f64;
    match object {
        JumpObject::PInf => {
            if !(on_circle && p.arg().abs() < ctx.theta0) {
                return Err(Error::DomainError("Pinf jump point must lie on gamma".into()));
            }
            let plus = global_parametrix(ctx, &(&p * &(1.0 - &d)))?;
            let minus = global_parametrix(ctx, &(&p * &(1.0 + &d)))?;
            Ok(&plus - &(&minus * &gamma_jump(&ctx.w_at(&p))))
        }
        JumpObject::Psi | JumpObject::PsiHat { .. } => {
            let hat = matches!(object, JumpObject::PsiHat { .. });
            let (normal, kind) = zeta_contour(&p, &ctol, hat)?;
            let zp = &p + &normal.scale(&d);
            let zm = &p - &normal.scale(&d);
            let eval = |q: &Complex| match object {
                JumpObject::PsiHat { nx } => psi_hat(q, nx),
                _ => bessel_model_psi(q),
            };
            let j = match (kind, object) {
                (0, _) => Matrix2C::from_f64(prec, [[0.0, 1.0], [-1.0, 0.0]]),
                (1, JumpObject::PsiHat { nx }) => upper_jump((-nx.with_prec(prec)).exp().to_complex()),
                _ => lower(prec, 1.0),
            };
            Ok(&eval(&zp)? - &(&eval(&zm)? * &j))
        }
        JumpObject::P(disk) => {
            check_disk(ctx, &p, *disk)?;
            if on_circle {
                let j = if p.arg().abs() < ctx.theta0 {
                    gamma_jump(&ctx.w_at(&p))
                } else {
                    let phi = phi_on_gap(ctx, &p.arg())?;
                    upper_jump((ctx.w_at(&p) + ((phi - &ctx.x) * n)).exp())
                };
                let plus = local_parametrix(ctx, &(&p * &(1.0 - &d)), *disk)?;
                let minus = local_parametrix(ctx, &(&p * &(1.0 + &d)), *disk)?;
                return Ok(&plus - &(&minus * &j));
            }
            if *disk != Disk::Z0 {
                return Err(Error::DomainError("lens jumps are checked in the z0 disk".into()));
            }
            let phi = phi_function(ctx, &p)?;
            let zeta = phi.square() / 16.0;
            let (normal, kind) = zeta_contour(&zeta, &Real::new(prec, 1e-10), false)?;
            if kind != 2 {
                return Err(Error::DomainError("point is not on a lens".into()));
            }
            let step = normal.scale(&(&d * zeta_derivative_with(ctx, &p, &phi).abs()));
            let zp = zeta_inverse(ctx, &(&zeta + &step), &p)?;
            let zm = zeta_inverse(ctx, &(&zeta - &step), &p)?;
            let j = lower_jump((-(&phi * n) - ctx.w_at(&p)).exp());
            let plus = local_parametrix(ctx, &zp, *disk)?;
            let minus = local_parametrix(ctx, &zm, *disk)?;
            Ok(&plus - &(&minus * &j))
        }
        JumpObject::S => {
            let id = Matrix2C::identity(prec);
            if on_circle {
                if p.arg().abs() < ctx.theta0 {
                    return Ok(&gamma_jump(&ctx.w_at(&p)) - &id);
                }
                let phi = phi_on_gap(ctx, &p.arg())?;
                return Ok(&upper_jump((ctx.w_at(&p) + ((phi - &ctx.x) * n)).exp()) - &id);
            }
            let phi = phi_function(ctx, &p)?;
            Ok(&lower_jump((-(&phi * n) - ctx.w_at(&p)).exp()) - &id)
        }
    }
}

/// ‖L₊ − L₋J‖ at one offset.
pub fn jump_residual(ctx: &ParametrixContext, object: &JumpObject, point: &Complex, offset: &Real) -> Result<Real> {
    Ok(jump_defect(ctx, object, point, offset)?.max_abs())
}

/// Neville extrapolation of matrix samples to offset 0.
pub fn extrapolate_to_zero(offsets: &[Real], values: &[Matrix2C]) -> Matrix2C {
    let mut p: Vec<[Complex; 4]> = values.iter().map(|m| m.entries().map(|c| c.clone())).collect();
    let m = p.len();
    for k in 1..m {
        for i in 0..m - k {
            let hi = &offsets[i + k];
            let lo = &offsets[i];
            let den = hi - lo;
            let next: [Complex; 4] =
                std::array::from_fn(|e| (&p[i][e] * hi - &p[i + 1][e] * lo) / &den);
            p[i] = next;
        }
    }
    Matrix2C::from_entries(p.swap_remove(0))
}

/// Jump defect extrapolated to zero offset, as a norm.
pub fn extrapolated_jump_residual(
    ctx: &ParametrixContext,
    object: &JumpObject,
    point: &Complex,
    offsets: &[Real],
) -> Result<Real> {
    let vals = offsets
        .iter()
        .map(|d| jump_defect(ctx, object, point, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(extrapolate_to_zero(offsets, &vals).max_abs())
}

/// Offsets 10⁻⁴ … 10⁻⁷.
pub fn standard_offsets(prec: u32) -> Vec<Real> {
    (4..=7).map(|k| Real::new(prec, 10f64.powi(-k))).collect()
}

/// One row of a residual report.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualRow {
    pub object: String,
    pub point_re: f64,
    pub point_im: f64,
    /// None for extrapolated values and for checks without an offset.
    pub offset: Option<f64>,
    pub residual: f64,
}

impl ResidualRow {
    fn new(object: &str, point: &Complex, offset: Option<f64>, residual: &Real) -> ResidualRow {
        let (re, im) = point.to_f64();
        ResidualRow { object: object.into(), point_re: re, point_im: im, offset, residual: residual.to_f64() }
    }
}

fn det_defect(m: &Matrix2C) -> Real {
    (m.det() - 1.0).abs()
}

/// Determinant, jump and matching checks for one context.
pub fn standard_checks(ctx: &ParametrixContext) -> Result<Vec<ResidualRow>> {
    let prec = ctx.prec;
    let mut rows = Vec::new();
    let offsets = standard_offsets(prec);
    let z0 = ctx.z0();
    let r = &ctx.disk_radius;

    let c = |re: f64, im: f64| Complex::from_f64(prec, re, im);
    for z in [c(0.0, 2.0), c(0.3, -0.2), c(-1.5, 0.5)] {
        rows.push(ResidualRow::new("det Pinf", &z, None, &det_defect(&global_parametrix(ctx, &z)?)));
    }
    // Ψ̂ jumps on R⁺, so every sample stays off the real axis.
    for zeta in [c(1.0, 0.5), Complex::cis(&Real::new(prec, 2.5)), c(10.0, 3.0)] {
        rows.push(ResidualRow::new("det Psi", &zeta, None, &det_defect(&bessel_model_psi(&zeta)?)));
        let nx = &ctx.x * ctx.n as f64;
        rows.push(ResidualRow::new("det PsiHat", &zeta, None, &det_defect(&psi_hat(&zeta, &nx)?)));
    }
    let inside = &z0 + &Complex::from_polar(&(r * 0.5), &(&ctx.theta0 + 2.0));
    rows.push(ResidualRow::new("det P", &inside, None, &det_defect(&local_parametrix(ctx, &inside, Disk::Z0)?)));

    let mut jump = |object: JumpObject, point: Complex| -> Result<()> {
        for d in &offsets {
            let v = jump_residual(ctx, &object, &point, d)?;
            rows.push(ResidualRow::new(object.name(), &point, Some(d.to_f64()), &v));
        }
        let v = extrapolated_jump_residual(ctx, &object, &point, &offsets)?;
        rows.push(ResidualRow::new(object.name(), &point, None, &v));
        Ok(())
    };
    jump(JumpObject::PInf, Complex::cis(&(&ctx.theta0 * 0.4)))?;
    jump(JumpObject::Psi, c(-4.0, 0.0))?;
    jump(JumpObject::Psi, Complex::cis(&(Real::pi(prec) * 2.0 / 3.0)))?;
    jump(JumpObject::PsiHat { nx: Real::new(prec, 3.0) }, c(2.0, 0.0))?;
    let small = r * 0.5;
    jump(JumpObject::P(Disk::Z0), Complex::cis(&(&ctx.theta0 - &small)))?;
    jump(JumpObject::P(Disk::Z0), Complex::cis(&(&ctx.theta0 + &small)))?;
    let rho = zeta_map(ctx, &(&z0 + &Complex::from_polar(&small, &ctx.theta0)))?.abs();
    jump(JumpObject::P(Disk::Z0), lens_preimage(ctx, true, &rho)?)?;
    jump(JumpObject::P(Disk::Z0), lens_preimage(ctx, false, &rho)?)?;
    let pi = Real::pi(prec);
    jump(JumpObject::P(Disk::MinusOne), Complex::cis(&(&pi - &(r * 0.3))))?;

    for disk in [Disk::Z0, Disk::ZBar0, Disk::MinusOne] {
        let v = matching_residual(ctx, disk, 12)?;
        let name = match disk {
            Disk::Z0 => "matching z0",
            Disk::ZBar0 => "matching zbar0",
            Disk::MinusOne => "matching -1",
        };
        rows.push(ResidualRow::new(name, &ctx.center(disk), None, &v));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bessel::{bessel0, BesselKind};
    use std::f64::consts::PI;

    const P: u32 = 160;

    fn ctx_w(theta0: f64, w1: f64, n: usize, x: Option<f64>) -> ParametrixContext {
        let mut spec = SymbolSpec::gap(Real::new(P, theta0), Real::new(P, 0.5)).unwrap();
        if w1 != 0.0 {
            spec = spec.with_w1(w1).unwrap();
        }
        let t0 = Real::new(P, theta0);
        let x = match x {
            Some(v) => Real::new(P, v),
            None => x_critical(&t0).unwrap(),
        };
        ParametrixContext::new(&spec, n, &x, P).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex {
        Complex::from_f64(P, re, im)
    }

    #[test]
    fn g_at_zero_and_infinity() {
        let ctx = ctx_w(PI / 2.0, 0.0, 8, None);
        let g0 = g_function(&ctx, &c(0.0, 0.0)).unwrap();
        assert!(g0.re.abs().to_f64() < 1e-30);
        assert!((g0.im.to_f64() - PI).abs() < 1e-15);
        let big = c(1e3, 0.0);
        let d = g_function(&ctx, &big).unwrap() - big.ln();
        assert!(d.abs().to_f64() < 2e-3);
        assert!(matches!(g_function(&ctx, &c(1.0, 1e-9)), Err(Error::OnContour(_))));
    }

    #[test]
    fn phi_basic_values() {
        let ctx = ctx_w(PI / 2.0, 0.0, 8, None);
        let z0 = ctx.z0();
        // φ(z0) = 0 from both sides and through g.
        assert!(phi_function(&ctx, &z0.clone()).is_err());
        let near = &z0 * &Real::new(P, 1.0 + 1e-12);
        assert!(phi_function(&ctx, &near).unwrap().abs().to_f64() < 1e-5);
        let minus_one = c(-1.0, 0.0);
        let p = phi_function(&ctx, &minus_one).unwrap();
        assert!((p.re.to_f64() - 1.762747174039086).abs() < 1e-10);
        assert!((&p.re - &ctx.x_c).abs().to_f64() < 1e-30);
        assert!(p.im.abs().to_f64() < 1e-30);
        let z = Complex::from_polar(&Real::new(P, 1.3), &Real::new(P, 0.2));
        let a = phi_function(&ctx, &z).unwrap();
        let b = phi_via_g(&ctx, &z).unwrap();
        assert!((&a - &b).abs().to_f64() < 1e-10, "{:?} vs {:?}", a.to_f64(), b.to_f64());
        assert!(matches!(phi_function(&ctx, &c(1.0, 0.0)), Err(Error::PathCrossesCut)));
    }

    #[test]
    fn phi_closed_form_on_gap() {
        let ctx = ctx_w(1.1, 0.0, 8, None);
        for a in [1.3, 2.0, 2.9, -2.5] {
            let alpha = Real::new(P, a);
            let path = phi_function(&ctx, &Complex::cis(&alpha)).unwrap();
            let closed = phi_on_gap(&ctx, &alpha).unwrap();
            assert!((&path.re - &closed).abs().to_f64() < 1e-25, "alpha {a}");
        }
    }

    #[test]
    fn phi_inside_agrees_with_g() {
        let ctx = ctx_w(2.0, 0.0, 8, None);
        for z in [c(0.4, 0.3), c(0.2, -0.5), c(-1.5, 0.8)] {
            let a = phi_function(&ctx, &z).unwrap();
            let b = phi_via_g(&ctx, &z).unwrap();
            // The two can differ by the 2πi period of log.
            let d = &a - &b;
            let k = (d.im.to_f64() / (2.0 * PI)).round();
            assert!(d.re.abs().to_f64() < 1e-20 && (d.im.to_f64() - 2.0 * PI * k).abs() < 1e-20);
        }
    }

    #[test]
    fn re_phi_on_gap_and_lenses() {
        let ctx = ctx_w(1.0, 0.0, 8, None);
        let mut last = 0.0;
        for k in 1..=20 {
            let a = 1.0 + (PI - 1.0) * k as f64 / 20.0;
            let v = phi_on_gap(&ctx, &Real::new(P, a)).unwrap().to_f64();
            assert!(v <= ctx.x_c.to_f64() + 1e-15);
            assert!(v > last);
            last = v;
        }
        assert!((last - ctx.x_c.to_f64()).abs() < 1e-14);
        for lens in [Lens::Inner, Lens::Outer] {
            for k in 1..10 {
                let z = lens_point(&ctx, lens, &Real::new(P, k as f64 / 10.0));
                let v = phi_function(&ctx, &z).unwrap();
                assert!(v.re.is_positive(), "{lens:?} {k}");
            }
        }
    }

    #[test]
    fn szego_h_closed_form_and_quadrature() {
        let ctx = ctx_w(PI / 2.0, 0.3, 8, None);
        for z in [c(0.0, 2.0), c(0.2, 0.1), c(-1.2, -0.4), c(0.9, 0.9)] {
            let a = szego_h(&ctx, &z).unwrap();
            let b = szego_h_closed(&ctx, &z);
            assert!((&a - &b).abs().to_f64() < 1e-25, "{:?}", z.to_f64());
        }
        // h₊ + h₋ = W on γ.
        let pt = Complex::cis(&(&ctx.theta0 * 0.4));
        let sum = |d: f64| {
            let d = Real::new(P, d);
            szego_h(&ctx, &(&pt * &(1.0 - &d))).unwrap() + szego_h(&ctx, &(&pt * &(1.0 + &d))).unwrap()
                - ctx.w_at(&pt)
        };
        assert!(sum(1e-6).abs().to_f64() < 1e-4);
        // h bounded near z0.
        let z0 = ctx.z0();
        let ring = |r: f64| szego_h(&ctx, &(&z0 + &Complex::from_polar(&Real::new(P, r), &Real::new(P, 2.0)))).unwrap();
        assert!((ring(1e-2) - ring(1e-3)).abs().to_f64() < 0.1);
        // h(∞) matches the large-z value.
        let far = szego_h_closed(&ctx, &c(1e8, 1e8));
        assert!((&far - ctx.h_infinity()).abs().to_f64() < 1e-6);
    }

    #[test]
    fn global_parametrix_checks() {
        let ctx = ctx_w(PI / 2.0, 0.3, 8, None);
        let p = global_parametrix(&ctx, &c(0.0, 2.0)).unwrap();
        assert!((p.det() - 1.0).abs().to_f64() < 1e-30);
        let far = global_parametrix(&ctx, &c(1e6, 0.0)).unwrap();
        assert!((&far - &Matrix2C::identity(P)).max_abs().to_f64() < 1e-5);
        let pt = Complex::cis(&(&ctx.theta0 * 0.0));
        let offsets = standard_offsets(P);
        let one = jump_residual(&ctx, &JumpObject::PInf, &pt, &offsets[2]).unwrap();
        assert!(one.to_f64() < 1e-4);
        let r = extrapolated_jump_residual(&ctx, &JumpObject::PInf, &pt, &offsets).unwrap();
        assert!(r.to_f64() < 1e-8, "{}", r.to_f64());
    }

    #[test]
    fn psi_determinant_and_jumps() {
        for z in [c(1.0, 0.0), Complex::cis(&Real::new(P, 2.5)), c(10.0, 3.0), c(-3.0, -1.0)] {
            let d = bessel_model_psi(&z).unwrap().det();
            assert!((d - 1.0).abs().to_f64() < 1e-30);
        }
        let d = Real::new(P, 1e-8);
        let r = jump_residual(&ctx_w(1.0, 0.0, 4, None), &JumpObject::Psi, &c(-4.0, 0.0), &d).unwrap();
        assert!(r.to_f64() < 1e-6);
        let ctx = ctx_w(1.0, 0.0, 4, None);
        let ray = Complex::cis(&(Real::pi(P) * 2.0 / 3.0));
        let r = extrapolated_jump_residual(&ctx, &JumpObject::Psi, &ray, &standard_offsets(P)).unwrap();
        assert!(r.to_f64() < 1e-8);
        let ray = Complex::cis(&(Real::pi(P) * -2.0 / 3.0));
        let r = extrapolated_jump_residual(&ctx, &JumpObject::Psi, &ray, &standard_offsets(P)).unwrap();
        assert!(r.to_f64() < 1e-8);
        let r = extrapolated_jump_residual(&ctx, &JumpObject::Psi, &c(-4.0, 0.0), &standard_offsets(P)).unwrap();
        assert!(r.to_f64() < 1e-8);
    }

    #[test]
    fn psi_matches_hankel_form() {
        // Sector II and III against the Hankel representation.
        for (zeta, upper) in [(Complex::cis(&Real::new(P, 2.4)) * 3.0, true), (Complex::cis(&Real::new(P, -2.6)) * 0.7, false)] {
            let psi = bessel_model_psi(&zeta).unwrap();
            let w = (-&zeta).sqrt() * 2.0;
            let pi = Real::pi(P);
            let h1 = bessel0(BesselKind::H1, &w).unwrap();
            let h2 = bessel0(BesselKind::H2, &w).unwrap();
            let h1p = bessel0(BesselKind::H1Prime, &w).unwrap();
            let h2p = bessel0(BesselKind::H2Prime, &w).unwrap();
            let sq = zeta.sqrt() * &pi;
            let m = if upper {
                m2(&h1 * 0.5, &h2 * 0.5, &sq * &h1p, &sq * &h2p)
            } else {
                m2(&h2 * 0.5, -(&h1 * 0.5), -(&sq * &h2p), &sq * &h1p)
            };
            assert!((&psi - &m).max_abs().to_f64() < 1e-30, "upper = {upper}");
        }
    }

    #[test]
    fn psi_asymptotics_improve() {
        let a = psi_asymptotic_defect(&c(1e2, 1.0)).unwrap().to_f64();
        let b = psi_asymptotic_defect(&c(1e4, 1.0)).unwrap().to_f64();
        assert!(b < 1e-1 && b < a);
    }

    #[test]
    fn psi_hat_properties() {
        let z = c(1.0, 1.0);
        let a = psi_hat(&z, &Real::new(P, 100.0)).unwrap();
        let b = bessel_model_psi(&z).unwrap();
        assert!((&a - &b).max_abs().to_f64() < 1e-30);
        assert!((psi_hat(&z, &Real::new(P, 2.0)).unwrap().det() - 1.0).abs().to_f64() < 1e-30);
        // F is entire across the ray.
        let ray = Complex::cis(&(Real::pi(P) * 2.0 / 3.0)) * 1.5;
        let normal = Complex::cis(&(Real::pi(P) * 2.0 / 3.0)).mul_i();
        let offsets: Vec<Real> = (6..=9).map(|k| Real::new(P, 10f64.powi(-k))).collect();
        let jumps: Vec<Matrix2C> = offsets
            .iter()
            .map(|d| {
                let step = normal.scale(d);
                &f_matrix(&(&ray + &step)).unwrap() - &f_matrix(&(&ray - &step)).unwrap()
            })
            .collect();
        assert!(jumps[0].max_abs().to_f64() < 1e-4);
        assert!(extrapolate_to_zero(&offsets, &jumps).max_abs().to_f64() < 1e-10);
        let above = f_matrix(&c(-2.0, 1e-30)).unwrap();
        let below = f_matrix(&c(-2.0, -1e-30)).unwrap();
        assert!((&above - &below).max_abs().to_f64() < 1e-20);
        let ctx = ctx_w(1.0, 0.0, 4, None);
        let obj = JumpObject::PsiHat { nx: Real::new(P, 3.0) };
        let r = extrapolated_jump_residual(&ctx, &obj, &c(2.0, 0.0), &standard_offsets(P)).unwrap();
        assert!(r.to_f64() < 1e-8);
    }

    #[test]
    fn zeta_is_conformal_near_z0() {
        let ctx = ctx_w(PI / 2.0, 0.0, 8, None);
        let z0 = ctx.z0();
        let h = Real::new(P, 1e-6);
        let zp = zeta_map(&ctx, &(&z0 * &(1.0 + &h))).unwrap();
        let zm = zeta_map(&ctx, &(&z0 * &(1.0 - &h))).unwrap();
        let deriv = (zp - zm) / (&z0 * &(&h * 2.0));
        assert!(deriv.abs().to_f64() > 0.1);
        let r = ctx.disk_radius.to_f64() / 2.0;
        let mut pts = Vec::new();
        for i in 1..=3 {
            for k in 0..8 {
                let off = Complex::from_polar(&Real::new(P, r * i as f64 / 3.0), &Real::new(P, 0.3 + k as f64 * PI / 4.0));
                let z = &z0 + &off;
                pts.push((z.clone(), zeta_map(&ctx, &z).unwrap()));
            }
        }
        for i in 0..pts.len() {
            for j in 0..i {
                let dz = (&pts[i].0 - &pts[j].0).abs();
                let dzeta = (&pts[i].1 - &pts[j].1).abs();
                assert!((dzeta / dz).to_f64() > 0.05 * deriv.abs().to_f64());
            }
        }
    }

    #[test]
    fn e_is_analytic_at_z0() {
        let ctx = ctx_w(PI / 2.0, 0.3, 8, None);
        let z0 = ctx.z0();
        let mean = |r: f64| {
            let m = 16;
            let mut acc = Matrix2C::from_f64(P, [[0.0; 2]; 2]);
            for k in 0..m {
                let ang = Real::new(P, 0.1) + Real::pi(P) * (2 * k) as f64 / m as f64;
                let z = &z0 + &Complex::from_polar(&Real::new(P, r), &ang);
                acc = &acc + &e_matrix(&ctx, &z).unwrap();
            }
            acc.scale(&Complex::from_f64(P, 1.0 / m as f64, 0.0))
        };
        let a = mean(1e-2);
        let b = mean(1e-3);
        assert!((&a - &b).max_abs().to_f64() < 1e-12);
    }

    #[test]
    fn local_parametrix_z0_jumps() {
        let ctx = ctx_w(PI / 2.0, 0.3, 8, None);
        let offsets = standard_offsets(P);
        let r = &ctx.disk_radius * 0.5;
        let gamma_pt = Complex::cis(&(&ctx.theta0 - &r));
        let gap_pt = Complex::cis(&(&ctx.theta0 + &r));
        for pt in [gamma_pt, gap_pt] {
            let v = extrapolated_jump_residual(&ctx, &JumpObject::P(Disk::Z0), &pt, &offsets).unwrap();
            assert!(v.to_f64() < 1e-8, "{}", v.to_f64());
        }
        let rho = Real::new(P, 0.05);
        for upper in [true, false] {
            let pt = lens_preimage(&ctx, upper, &rho).unwrap();
            let v = extrapolated_jump_residual(&ctx, &JumpObject::P(Disk::Z0), &pt, &offsets).unwrap();
            assert!(v.to_f64() < 1e-8, "lens {upper}: {}", v.to_f64());
        }
        let inside = &ctx.z0() + &Complex::from_polar(&r, &Real::new(P, 0.7));
        let p = local_parametrix(&ctx, &inside, Disk::Z0).unwrap();
        assert!((p.det() - 1.0).abs().to_f64() < 1e-10);
        assert!(matches!(local_parametrix(&ctx, &c(0.0, 0.0), Disk::Z0), Err(Error::OutsideDisk)));
    }

    #[test]
    fn local_parametrix_minus_one_jump() {
        let ctx = ctx_w(PI / 2.0, 0.3, 8, None);
        let pt = Complex::cis(&(Real::pi(P) - &ctx.disk_radius * 0.3));
        let v = extrapolated_jump_residual(&ctx, &JumpObject::P(Disk::MinusOne), &pt, &standard_offsets(P)).unwrap();
        assert!(v.to_f64() < 1e-8);
    }

    #[test]
    fn s_jump_on_gap() {
        let ctx = ctx_w(PI / 2.0, 0.0, 20, None);
        let d = Real::new(P, 1e-6);
        let at = |a: f64| {
            jump_defect(&ctx, &JumpObject::S, &Complex::cis(&Real::new(P, a)), &d).unwrap().a12.abs().to_f64()
        };
        let a = at(0.9 * PI);
        let b = at(0.8 * PI);
        assert!(a < 1.0 && b < a);
        let expect = ((phi_on_gap(&ctx, &Real::new(P, 0.9 * PI)).unwrap() - &ctx.x_c) * 20.0).exp().to_f64();
        assert!((a - expect).abs() < 1e-15);
    }

    #[test]
    fn matching_at_z0_decays() {
        let vals: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&n| matching_residual(&ctx_w(PI / 2.0, 0.0, n, None), Disk::Z0, 12).unwrap().to_f64())
            .collect();
        for w in vals.windows(2) {
            let ratio = w[1] / w[0];
            assert!(ratio > 0.375 && ratio < 0.625, "{vals:?}");
        }
    }

    #[test]
    fn matching_at_minus_one_scaling() {
        let a = matching_residual(&ctx_w(PI / 2.0, 0.0, 8, None), Disk::MinusOne, 12).unwrap().to_f64();
        let b = matching_residual(&ctx_w(PI / 2.0, 0.0, 32, None), Disk::MinusOne, 12).unwrap().to_f64();
        let ratio = b / a;
        assert!((ratio / 0.5 - 1.0).abs() < 0.3, "{a} {b}");
        let xc = x_critical(&Real::new(P, PI / 2.0)).unwrap().to_f64();
        let c1 = matching_residual(&ctx_w(PI / 2.0, 0.0, 8, Some(xc + 0.1)), Disk::MinusOne, 12).unwrap().to_f64();
        let c2 = matching_residual(&ctx_w(PI / 2.0, 0.0, 32, Some(xc + 0.1)), Disk::MinusOne, 12).unwrap().to_f64();
        assert!(c2 / c1 < 0.5 * (-0.1f64 * 24.0).exp() * 1.3);
    }

    #[test]
    fn reflection_disk() {
        let ctx = ctx_w(PI / 2.0, 0.3, 8, None);
        let z = &ctx.z0().conj() + &Complex::from_polar(&(&ctx.disk_radius * 0.5), &Real::new(P, -0.4));
        let p = local_parametrix(&ctx, &z, Disk::ZBar0).unwrap();
        assert!((p.det() - 1.0).abs().to_f64() < 1e-10);
        let pt = Complex::cis(&-(&ctx.theta0 - &ctx.disk_radius * 0.5));
        let v = extrapolated_jump_residual(&ctx, &JumpObject::P(Disk::ZBar0), &pt, &standard_offsets(P)).unwrap();
        assert!(v.to_f64() < 1e-8, "{}", v.to_f64());
    }

    #[test]
    fn disks_are_disjoint() {
        for t in [0.05, 0.3, 1.0, 2.0, 3.0] {
            let ctx = ctx_w(t, 0.0, 4, None);
            let r = ctx.disk_radius.to_f64();
            let z0 = ctx.z0();
            assert!(2.0 * r < (&z0 - &z0.conj()).abs().to_f64());
            assert!(2.0 * r < (&z0 + 1.0).abs().to_f64());
        }
        let spec = SymbolSpec::gap_f64(1.0, 0.5).unwrap();
        assert!(ParametrixContext::new(&spec, 4, &Real::new(P, 0.1), P).is_err());
    }

    #[test]
    fn standard_report() {
        let rows = standard_checks(&ctx_w(PI / 2.0, 0.0, 8, None)).unwrap();
        for row in &rows {
            if row.object.starts_with("det") {
                assert!(row.residual < 1e-10, "{row:?}");
            } else if row.offset.is_none() && !row.object.starts_with("matching") {
                assert!(row.residual < 1e-8, "{row:?}");
            }
        }
        assert_eq!(rows.iter().filter(|r| r.object.starts_with("matching")).count(), 3);
    }
}
