//! Finite-n Toeplitz computations: log-determinants, orthogonal polynomials
//! on the unit circle, the Y matrix, and the s-derivative identities.

use crate::error::{Error, Result};
use crate::numerics::linalg::{ldl_pivots, lu_leading_pivots, lu_partial_logs, solve, solve_many, CMat, Mat, RMat};
use crate::numerics::quad::{gauss_legendre, graded_edges, refine_edges, uniform_edges, Focus};
use crate::numerics::{Complex, Matrix2C, Real};
use crate::symbol::{coefficients, symbol_eval, Coefficients, SymbolSpec};

/// Default working precision for size n. The smallest pivot of the s = 0
/// moment matrix is about sin(θ0/2)^{2n}, so take twice that many bits; the
/// smallest eigenvalue is about tan(θ0/4)^{2n} = e^{−n x_c}, which costs
/// n·x_c/ln 2 bits in elimination and dominates near θ0 = π/2. Guard bits
/// are added to the larger of the two.
pub fn auto_precision(n: usize, theta0: &Real) -> u32 {
    let t = theta0.to_f64();
    let nf = n as f64;
    let pivots = 4.0 * nf * (t / 2.0).sin().ln().abs();
    let spectrum = -2.0 * nf * (t / 4.0).tan().ln();
    let bits = (pivots.max(spectrum) / std::f64::consts::LN_2).ceil() as u32 + 64;
    bits.max(128)
}

#[derive(Clone, Debug)]
pub struct LogDetResult {
    pub n: usize,
    pub ln_d: Complex,
    /// ln(D_{j+1}/D_j) for j < n when every leading minor is nonzero;
    /// otherwise logs of the pivots of a partial-pivoting LU.
    pub pivot_logs: Vec<Complex>,
    pub precision_bits: u32,
    pub validated: bool,
}

fn toeplitz_complex(c: &Coefficients, n: usize, prec: u32) -> CMat {
    Mat::from_fn(n, |r, j| c.f(r as i64 - j as i64).with_prec(prec))
}

fn pivot_logs(spec: &SymbolSpec, n: usize, prec: u32) -> Result<Vec<Complex>> {
    let c = coefficients(spec, n, prec)?;
    if spec.is_real_symmetric() {
        let t: RMat = Mat::from_fn(n, |r, j| c.f(r as i64 - j as i64).re.clone());
        Ok(ldl_pivots(&t)?.iter().map(|d| d.to_complex().ln()).collect())
    } else {
        let t = toeplitz_complex(&c, n, prec);
        match lu_leading_pivots(&t) {
            Ok(p) => Ok(p.iter().map(|d| d.ln()).collect()),
            Err(Error::SingularMinor(_)) => lu_partial_logs(&t),
            Err(e) => Err(e),
        }
    }
}

/// ln D_n at a single precision.
pub fn log_det_at(spec: &SymbolSpec, n: usize, prec: u32) -> Result<LogDetResult> {
    if n == 0 {
        return Err(Error::DomainError("log_det needs n >= 1".into()));
    }
    let logs = pivot_logs(spec, n, prec)?;
    let mut ln_d = Complex::zero(prec);
    for l in &logs {
        ln_d += l;
    }
    Ok(LogDetResult { n, ln_d, pivot_logs: logs, precision_bits: prec, validated: false })
}

/// ln D_n at `prec`, re-run at `prec + 64`; `validated` records agreement
/// within 10⁻¹²·max(1, |ln D_n|).
pub fn log_det(spec: &SymbolSpec, n: usize, prec: u32) -> Result<LogDetResult> {
    let mut lo = log_det_at(spec, n, prec)?;
    let hi = log_det_at(spec, n, prec + 64)?;
    let scale = lo.ln_d.abs().to_f64().max(1.0);
    let diff = (&lo.ln_d - &hi.ln_d.with_prec(prec)).abs().to_f64();
    lo.validated = diff <= 1e-12 * scale;
    Ok(lo)
}

/// Horner evaluation of Σ c_j z^j.
pub fn poly_eval(c: &[Complex], z: &Complex) -> Complex {
    let mut acc = Complex::zero(z.prec());
    for cj in c.iter().rev() {
        acc = acc * z + cj;
    }
    acc
}

/// Value and derivative of Σ c_j z^j.
pub fn poly_eval_d(c: &[Complex], z: &Complex) -> (Complex, Complex) {
    let mut p = Complex::zero(z.prec());
    let mut d = Complex::zero(z.prec());
    for cj in c.iter().rev() {
        d = d * z + &p;
        p = p * z + cj;
    }
    (p, d)
}

/// Monic p_n (orthogonal to z^r, r < n) and monic p̂_n, with D_{n+1}/D_n.
#[derive(Clone, Debug)]
struct Monic {
    p: Vec<Complex>,
    hat: Vec<Complex>,
    ratio: Complex,
}

fn monic(c: &Coefficients, n: usize, prec: u32) -> Result<Monic> {
    let f = |k: i64| c.f(k).with_prec(prec);
    let mut p = Vec::with_capacity(n + 1);
    let mut hat = Vec::with_capacity(n + 1);
    if n > 0 {
        let t = toeplitz_complex(c, n, prec);
        let tt: CMat = Mat::from_fn(n, |j, r| f(r as i64 - j as i64));
        let rhs: Vec<Complex> = (0..n).map(|r| -f(r as i64 - n as i64)).collect();
        let rhs_hat: Vec<Complex> = (0..n).map(|j| -f(n as i64 - j as i64)).collect();
        let as_minor = |e: Error| match e {
            Error::SingularMinor(_) => Error::SingularMinor(n),
            e => e,
        };
        p = solve(&t, &rhs).map_err(as_minor)?;
        hat = solve(&tt, &rhs_hat).map_err(as_minor)?;
    }
    p.push(Complex::one(prec));
    hat.push(Complex::one(prec));
    let mut ratio = f(0);
    for (j, cj) in p.iter().enumerate().take(n) {
        ratio += cj * &f(n as i64 - j as i64);
    }
    let scale = (0..=n as i64).fold(Real::zero(prec), |m, k| m.max(f(k).abs()));
    if ratio.abs() <= Real::exp2i(prec, -(prec as i32) + 16) * scale {
        return Err(Error::SingularMinor(n + 1));
    }
    Ok(Monic { p, hat, ratio })
}

#[derive(Clone, Debug)]
pub struct OPUCData {
    pub n: usize,
    pub chi_nm1: Complex,
    pub chi_n: Complex,
    /// Coefficients of φ_n, constant term first.
    pub phi_n_coeffs: Vec<Complex>,
    /// Coefficients of φ̂_{n−1}.
    pub hat_phi_nm1_coeffs: Vec<Complex>,
    pub y12_at_0: Complex,
    /// Y_11 at z0 = e^{iθ0}.
    pub y11_at_z0: Complex,
    /// Monic p_n = φ_n/χ_n.
    pub monic_n: Vec<Complex>,
    /// Monic p̂_{n−1} = φ̂_{n−1}/χ_{n−1}.
    pub monic_hat_nm1: Vec<Complex>,
    /// D_{n+1}/D_n and D_n/D_{n−1}.
    pub ratio_n: Complex,
    pub ratio_nm1: Complex,
}

impl OPUCData {
    pub fn phi_n(&self, z: &Complex) -> Complex {
        poly_eval(&self.phi_n_coeffs, z)
    }

    /// Y_11(z) = p_n(z) and Y_21(z) = −χ_{n−1}² z^{n−1} p̂_{n−1}(1/z), both
    /// polynomials; returns their coefficient vectors.
    pub fn y_polynomials(&self) -> (Vec<Complex>, Vec<Complex>) {
        let k = self.ratio_nm1.recip();
        let y21: Vec<Complex> = self.monic_hat_nm1.iter().rev().map(|c| -(c * &k)).collect();
        (self.monic_n.clone(), y21)
    }
}

pub fn opuc(spec: &SymbolSpec, n: usize, prec: u32) -> Result<OPUCData> {
    if n == 0 {
        return Err(Error::DomainError("opuc needs n >= 1".into()));
    }
    let c = coefficients(spec, n + 1, prec)?;
    let mn = monic(&c, n, prec)?;
    let mnm1 = monic(&c, n - 1, prec)?;
    let chi_n = mn.ratio.recip().sqrt();
    let chi_nm1 = mnm1.ratio.recip().sqrt();
    let phi_n_coeffs: Vec<Complex> = mn.p.iter().map(|x| x * &chi_n).collect();
    let hat_phi_nm1_coeffs: Vec<Complex> = mnm1.hat.iter().map(|x| x * &chi_nm1).collect();
    let z0 = Complex::cis(&spec.theta0.with_prec(prec));
    let y11_at_z0 = poly_eval(&mn.p, &z0);
    Ok(OPUCData {
        n,
        chi_nm1,
        chi_n,
        phi_n_coeffs,
        hat_phi_nm1_coeffs,
        y12_at_0: mn.ratio.clone(),
        y11_at_z0,
        monic_n: mn.p,
        monic_hat_nm1: mnm1.hat,
        ratio_n: mn.ratio,
        ratio_nm1: mnm1.ratio,
    })
}

/// Which arc of the circle a quadrature runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Arc,
    Gap,
    Circle,
}

fn order_for(prec: u32) -> usize {
    (prec as usize) / 5 + 16
}

/// (1/2π)∫ g(e^{iθ}) f(e^{iθ}) dθ over `part`, where f is the symbol with
/// its level replaced by 1 on the arc and gap when `unit_levels` is set (so
/// the integrand is g·e^W). `freq` bounds the Laurent degree of g.
fn circle_integral(
    spec: &SymbolSpec,
    part: Part,
    unit_levels: bool,
    freq: usize,
    prec: u32,
    g: impl Fn(&Complex) -> Complex,
) -> Result<Complex> {
    let work = prec + 16;
    let theta0 = spec.theta0.with_prec(work);
    let pi = Real::pi(work);
    let (a, b) = if unit_levels {
        (Complex::one(work), Complex::one(work))
    } else {
        (spec.a.with_prec(work), spec.b.with_prec(work))
    };
    let panels = |len: &Real| 2 + ((freq as f64 + 8.0) * len.to_f64() / 6.0).ceil() as usize;
    let arc_len = &theta0 * 2.0;
    let gap_len = &pi * 2.0 - &arc_len;
    let arc_edges = uniform_edges(&(-&theta0), &theta0, panels(&arc_len));
    let gap_edges = uniform_edges(&theta0, &(&pi * 2.0 - &theta0), panels(&gap_len));
    let integrand = |t: &Real| -> Complex {
        let z = Complex::cis(t);
        g(&z) * spec.eval_w(&z).exp()
    };
    let run = |m: usize| -> Result<Complex> {
        let rule = gauss_legendre(m, work)?;
        let mut acc = Complex::zero(work);
        if part != Part::Gap {
            let v: Complex = rule.integrate_panels(&arc_edges, integrand);
            acc += &a * &v;
        }
        if part != Part::Arc {
            let v: Complex = rule.integrate_panels(&gap_edges, integrand);
            acc += &b * &v;
        }
        Ok(acc / (&pi * 2.0))
    };
    let m = order_for(prec);
    cross_check(run(m)?, run(m + m / 2)?, prec, "circle integral")
}

fn cross_check(lo: Complex, hi: Complex, prec: u32, what: &str) -> Result<Complex> {
    let work = hi.prec();
    let tol = Real::exp2i(work, -(prec as i32) + 16) * hi.abs().max(Real::one(work));
    if (&lo - &hi).abs() > tol {
        return Err(Error::QuadratureNotConverged(format!(
            "{what}: two orders differ by {:e}",
            (&lo - &hi).abs().to_f64()
        )));
    }
    Ok(hi.with_prec(prec))
}

/// Boundary side of the circle for one-sided limits: `Plus` is the inside
/// (left of the counterclockwise orientation).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// C[G](z) = (1/2πi)∮ G(w)/(w−z) dw with G = g·f.
fn cauchy(
    spec: &SymbolSpec,
    z: &Complex,
    side: Option<Side>,
    freq: usize,
    prec: u32,
    g: impl Fn(&Complex) -> Complex,
) -> Result<Complex> {
    let work = prec + 24;
    let z = z.with_prec(work);
    let theta0 = spec.theta0.with_prec(work);
    let pi = Real::pi(work);
    let two_pi = &pi * 2.0;
    let a = spec.a.with_prec(work);
    let b = spec.b.with_prec(work);
    let dist = (z.abs() - 1.0).abs();
    let on_circle = dist < Real::exp2i(work, -(prec as i32) / 2);
    let alpha = z.arg();
    // α moved into [−θ0, 2π − θ0)
    let alpha = if alpha < -&theta0 { &alpha + &two_pi } else { alpha };
    let gz = if on_circle {
        if side.is_none() {
            return Err(Error::OnContour("Cauchy transform on the unit circle needs a side".into()));
        }
        let zc = Complex::cis(&alpha);
        Some(g(&zc) * symbol_eval(spec, &alpha, work)?)
    } else {
        None
    };
    let max_width = 6.0 / (freq as f64 + 8.0);
    let build = |lo: &Real, hi: &Real| -> Vec<Real> {
        let mut foci = Vec::new();
        if !on_circle {
            let w = dist.to_f64() / 2.0;
            if alpha >= *lo && alpha <= *hi {
                foci.push(Focus::new(alpha.clone(), w));
            }
            // A pole just past an endpoint, possibly across the 2π wrap.
            for end in [lo, hi] {
                let d = (&alpha - end).to_f64().rem_euclid(std::f64::consts::TAU);
                if d.min(std::f64::consts::TAU - d) < 4.0 * dist.to_f64() {
                    foci.push(Focus::new(end.clone(), w));
                }
            }
        }
        refine_edges(&graded_edges(lo, hi, &foci, 0.5), max_width)
    };
    let arc_edges = build(&(-&theta0), &theta0);
    let gap_edges = build(&theta0, &(&two_pi - &theta0));
    let integrand = |t: &Real, level: &Complex| -> Complex {
        let w = Complex::cis(t);
        let gw = g(&w) * spec.eval_w(&w).exp() * level;
        let num = match &gz {
            Some(v) => gw - v,
            None => gw,
        };
        num * &w / (&w - &z)
    };
    let run = |m: usize| -> Result<Complex> {
        let rule = gauss_legendre(m, work)?;
        let v1: Complex = rule.integrate_panels(&arc_edges, |t| integrand(t, &a));
        let v2: Complex = rule.integrate_panels(&gap_edges, |t| integrand(t, &b));
        Ok((v1 + v2) / &two_pi)
    };
    let m = order_for(prec);
    let mut out = cross_check(run(m)?, run(m + m / 2)?, prec + 8, "Cauchy transform")?;
    if let (Some(v), Some(Side::Plus)) = (&gz, side) {
        out += v;
    }
    Ok(out.with_prec(prec))
}

/// The 2×2 matrix Y(z) built from the degree n and n−1 polynomials and
/// their Cauchy transforms. On the circle, `side` picks the boundary value.
pub fn y_matrix(spec: &SymbolSpec, n: usize, z: &Complex, side: Option<Side>, prec: u32) -> Result<Matrix2C> {
    let d = opuc(spec, n, prec)?;
    let z = z.with_prec(prec);
    let (p11, p21) = d.y_polynomials();
    let y11 = poly_eval(&p11, &z);
    let y21 = poly_eval(&p21, &z);
    let nn = n as i64;
    let pn = d.monic_n.clone();
    let y12 = cauchy(spec, &z, side, 2 * n, prec, |w| poly_eval(&pn, w) * w.powi(-nn))?;
    let hat = d.monic_hat_nm1.clone();
    let k = d.ratio_nm1.recip();
    let y22 = cauchy(spec, &z, side, 2 * n, prec, |w| {
        -(poly_eval(&hat, &w.recip()) * w.recip() * &k)
    })?;
    Ok(Matrix2C::new(y11, y12, y21, y22))
}

/// ∂_s ln D_n = tr(T⁻¹ ∂_s T), the exact derivative in the a = 1, b = s form.
pub fn ds_log_det(spec: &SymbolSpec, n: usize, prec: u32) -> Result<Complex> {
    let c = coefficients(spec, n, prec)?;
    let t = toeplitz_complex(&c, n, prec);
    let cols: Vec<Vec<Complex>> =
        (0..n).map(|k| (0..n).map(|r| c.ds(r as i64 - k as i64).with_prec(prec)).collect()).collect();
    let x = solve_many(&t, &cols)?;
    let mut tr = Complex::zero(prec);
    for (k, col) in x.iter().enumerate() {
        tr += &col[k];
    }
    Ok(tr)
}

/// ∂_s ln D_n as the gap integral of z^{−n}[Y⁻¹Y′]_21 e^W against dz/(2πi).
pub fn diff_identity_general(spec: &SymbolSpec, n: usize, prec: u32) -> Result<Complex> {
    let work = prec + 16;
    let d = opuc(spec, n, work)?;
    let (p11, p21) = d.y_polynomials();
    let nn = n as i64;
    let v = circle_integral(spec, Part::Gap, true, 2 * n + 2, work, |z| {
        let (y11, dy11) = poly_eval_d(&p11, z);
        let (y21, dy21) = poly_eval_d(&p21, z);
        (y11 * dy21 - y21 * dy11) * z.powi(1 - nn)
    })?;
    Ok(v.with_prec(prec))
}

fn require_w0_gap(spec: &SymbolSpec) -> Result<Real> {
    if !spec.w_is_zero() {
        return Err(Error::InvalidSymbol("this identity needs W = 0".into()));
    }
    spec.s().ok_or_else(|| Error::InvalidSymbol("symbol must have a = 1 and real b = s".into()))
}

/// Right-hand side of the W = 0 identity
/// −2n ∂_sχ_n/χ_n + (2(1−s)/π) Im(conj(φ_n(z0)) ∂_sφ_n(z0)),
/// with s-derivatives by a fourth-order central difference of relative step
/// `fd_step` (absolute step fd_step·min(s, 1−s)).
pub fn diff_identity_w0(spec: &SymbolSpec, n: usize, fd_step: f64, prec: u32) -> Result<Real> {
    let s = require_w0_gap(spec)?;
    let sf = s.to_f64();
    if !(sf > 0.0 && sf < 1.0) {
        return Err(Error::DomainError("diff_identity_w0 needs 0 < s < 1".into()));
    }
    let h_abs = fd_step * sf.min(1.0 - sf);
    let work = prec + 32 + (1.0 / h_abs).log2().ceil().max(0.0) as u32;
    let s = s.with_prec(work);
    let h = Real::new(work, fd_step) * (&s).clone().min(1.0 - &s);
    // (ln χ_n, φ_n(z0)) at s + j h
    let sample = |j: f64| -> Result<(Real, Complex)> {
        let sj = &s + &h * j;
        let d = opuc(&spec.with_s(&sj), n, work)?;
        Ok((d.chi_n.abs().ln(), poly_eval(&d.phi_n_coeffs, &Complex::cis(&spec.theta0.with_prec(work)))))
    };
    let (l_m2, u_m2) = sample(-2.0)?;
    let (l_m1, u_m1) = sample(-1.0)?;
    let (l_p1, u_p1) = sample(1.0)?;
    let (l_p2, u_p2) = sample(2.0)?;
    let d_l = (&l_m2 - &l_p2 + (&l_p1 - &l_m1) * 8.0) / (&h * 12.0);
    let d_u = (&u_m2 - &u_p2 + (&u_p1 - &u_m1) * 8.0) / (&h * 12.0);
    let d0 = opuc(spec, n, work)?;
    let u = poly_eval(&d0.phi_n_coeffs, &Complex::cis(&spec.theta0.with_prec(work)));
    let pi = Real::pi(work);
    let im = (u.conj() * d_u).im;
    let out = -(d_l * (2.0 * n as f64)) + (1.0 - &s) * 2.0 / &pi * im;
    Ok(out.with_prec(prec))
}

/// |LHS − RHS| of the Christoffel–Darboux identity
/// Σ_{j<n} φ_j(z) φ̄_j(1/z) = −n φ_n(z) φ̄_n(1/z) + z(φ̄_n(1/z) φ_n′(z) − (φ̄_n(1/z))′ φ_n(z)).
pub fn cd_residual(spec: &SymbolSpec, n: usize, z: &Complex, prec: u32) -> Result<Real> {
    if !spec.w_is_zero() {
        return Err(Error::InvalidSymbol("Christoffel-Darboux check needs W = 0".into()));
    }
    if n == 0 {
        return Err(Error::DomainError("cd_residual needs n >= 1".into()));
    }
    let c = coefficients(spec, n + 1, prec)?;
    let z = z.with_prec(prec);
    let zi = z.recip();
    let phi = |j: usize| -> Result<Vec<Complex>> {
        let m = monic(&c, j, prec)?;
        let chi = m.ratio.recip().sqrt();
        Ok(m.p.iter().map(|x| x * &chi).collect())
    };
    let bar = |v: &[Complex]| -> Vec<Complex> { v.iter().map(|x| x.conj()).collect() };
    let mut lhs = Complex::zero(prec);
    for j in 0..n {
        let pj = phi(j)?;
        lhs += poly_eval(&pj, &z) * poly_eval(&bar(&pj), &zi);
    }
    let pn = phi(n)?;
    let (v, dv) = poly_eval_d(&pn, &z);
    let (vb, dvb) = poly_eval_d(&bar(&pn), &zi);
    // d/dz φ̄_n(1/z) = −z^{−2} φ̄_n′(1/z)
    let dvb_z = -(dvb * &zi * &zi);
    let rhs = -(&v * &vb * (n as f64)) + &z * (&vb * &dv - dvb_z * &v);
    Ok((lhs - rhs).abs())
}

/// max |(1/2π)∫ φ_k φ̂_m(1/z) f dθ − δ_km| over k, m ∈ {n−1, n}.
pub fn orthonormality_residual(spec: &SymbolSpec, n: usize, prec: u32) -> Result<Real> {
    if n == 0 {
        return Err(Error::DomainError("orthonormality_residual needs n >= 1".into()));
    }
    let c = coefficients(spec, n + 1, prec)?;
    let mut phis = Vec::new();
    for j in [n - 1, n] {
        let m = monic(&c, j, prec)?;
        let chi = m.ratio.recip().sqrt();
        let p: Vec<Complex> = m.p.iter().map(|x| x * &chi).collect();
        let h: Vec<Complex> = m.hat.iter().map(|x| x * &chi).collect();
        phis.push((p, h));
    }
    let mut worst = Real::zero(prec);
    for (i, (pk, _)) in phis.iter().enumerate() {
        for (j, (_, hm)) in phis.iter().enumerate() {
            let v = circle_integral(spec, Part::Circle, false, 2 * n + 2, prec, |z| {
                poly_eval(pk, z) * poly_eval(hm, &z.recip())
            })?;
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    Ok(worst)
}
