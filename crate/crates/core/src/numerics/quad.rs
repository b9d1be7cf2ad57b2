//! Gauss–Legendre rules and composite panel quadrature.

use super::scalar::{Complex, Real};
use crate::error::{Error, Result};

/// Largest Gauss–Legendre order the crate will build.
pub const MAX_GL_ORDER: usize = 4096;

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    /// Nodes in (−1, 1), strictly increasing.
    pub nodes: Vec<Real>,
    pub weights: Vec<Real>,
    pub order: usize,
}

/// Legendre P_m(x) and P_m'(x) by the three-term recurrence.
fn legendre(m: usize, x: &Real) -> (Real, Real) {
    let prec = x.prec();
    let mut p0 = Real::one(prec);
    let mut p1 = x.clone();
    if m == 0 {
        return (p0, Real::zero(prec));
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = (x * &p1 * (2.0 * kf - 1.0) - &p0 * (kf - 1.0)) / kf;
        p0 = p1;
        p1 = p2;
    }
    // (1 − x²) P_m' = m (P_{m−1} − x P_m)
    let dp = (&p0 - x * &p1) * (m as f64) / (1.0 - x.square());
    (p1, dp)
}

/// Gauss–Legendre nodes and weights of order `m` at `prec` bits.
pub fn gauss_legendre(m: usize, prec: u32) -> Result<QuadratureRule> {
    if m == 0 || m > MAX_GL_ORDER {
        return Err(Error::DomainError(format!("Gauss-Legendre order {m} outside 1..={MAX_GL_ORDER}")));
    }
    let work = prec + 32;
    let tol = Real::exp2i(work, -(prec as i32) - 8);
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    let half = m / 2;
    let mf = m as f64;
    for i in 0..half {
        // i-th largest root; the initial guess is accurate to O(m^-2).
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut x = Real::new(work, guess);
        let mut dp = Real::zero(work);
        for _ in 0..200 {
            let (p, d) = legendre(m, &x);
            let dx = &p / &d;
            x -= &dx;
            dp = d;
            if dx.abs() < tol {
                let (_, d) = legendre(m, &x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x.square()) * dp.square());
        nodes.push(x);
        weights.push(w);
    }
    let mut all_nodes: Vec<Real> = Vec::with_capacity(m);
    let mut all_weights: Vec<Real> = Vec::with_capacity(m);
    for i in 0..half {
        all_nodes.push(-&nodes[i]);
        all_weights.push(weights[i].clone());
    }
    if m % 2 == 1 {
        let x = Real::zero(work);
        let (_, d) = legendre(m, &x);
        all_nodes.push(x);
        all_weights.push(2.0 / d.square());
    }
    for i in (0..half).rev() {
        all_nodes.push(nodes[i].clone());
        all_weights.push(weights[i].clone());
    }
    Ok(QuadratureRule {
        nodes: all_nodes.iter().map(|x| x.with_prec(prec)).collect(),
        weights: all_weights.iter().map(|w| w.with_prec(prec)).collect(),
        order: m,
    })
}

/// Values that can be accumulated by a quadrature rule.
pub trait Integrand: Sized {
    fn zero_like(prec: u32) -> Self;
    fn add_scaled(&mut self, w: &Real, v: &Self);
    fn scaled(&self, w: &Real) -> Self;
    fn magnitude(&self) -> Real;
    fn at_prec(&self, prec: u32) -> Self;
}

impl Integrand for Real {
    fn zero_like(prec: u32) -> Real {
        Real::zero(prec)
    }
    fn add_scaled(&mut self, w: &Real, v: &Real) {
        *self += w * v;
    }
    fn scaled(&self, w: &Real) -> Real {
        self * w
    }
    fn magnitude(&self) -> Real {
        self.abs()
    }
    fn at_prec(&self, prec: u32) -> Real {
        self.with_prec(prec)
    }
}

impl Integrand for Complex {
    fn zero_like(prec: u32) -> Complex {
        Complex::zero(prec)
    }
    fn add_scaled(&mut self, w: &Real, v: &Complex) {
        self.re += w * &v.re;
        self.im += w * &v.im;
    }
    fn scaled(&self, w: &Real) -> Complex {
        self.scale(w)
    }
    fn magnitude(&self) -> Real {
        self.abs()
    }
    fn at_prec(&self, prec: u32) -> Complex {
        self.with_prec(prec)
    }
}

impl QuadratureRule {
    pub fn prec(&self) -> u32 {
        self.nodes.first().map(|x| x.prec()).unwrap_or(64)
    }

    /// ∫_a^b f(t) dt on a single panel.
    pub fn integrate<T: Integrand>(&self, a: &Real, b: &Real, mut f: impl FnMut(&Real) -> T) -> T {
        let half = (b - a) * 0.5;
        let mid = (a + b) * 0.5;
        let mut acc = T::zero_like(half.prec());
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = &mid + &half * x;
            let v = f(&t);
            acc.add_scaled(w, &v);
        }
        let mut out = T::zero_like(half.prec());
        out.add_scaled(&half, &acc);
        out
    }

    /// Composite rule over consecutive edges.
    pub fn integrate_panels<T: Integrand>(&self, edges: &[Real], mut f: impl FnMut(&Real) -> T) -> T {
        let prec = edges.first().map(|e| e.prec()).unwrap_or(64);
        let mut acc = T::zero_like(prec);
        let one = Real::one(prec);
        for win in edges.windows(2) {
            if win[0] == win[1] {
                continue;
            }
            let v = self.integrate(&win[0], &win[1], &mut f);
            acc.add_scaled(&one, &v);
        }
        acc
    }
}

/// A point of [a, b] toward which panels are graded geometrically, stopping
/// once the adjacent panel is narrower than `min_width`.
#[derive(Clone, Debug)]
pub struct Focus {
    pub at: Real,
    pub min_width: f64,
}

impl Focus {
    pub fn new(at: Real, min_width: f64) -> Focus {
        Focus { at, min_width }
    }
}

/// Panel edges on [a, b], graded with ratio `sigma` toward each focus.
pub fn graded_edges(a: &Real, b: &Real, foci: &[Focus], sigma: f64) -> Vec<Real> {
    let mut marks: Vec<(Real, Option<f64>)> = vec![(a.clone(), None), (b.clone(), None)];
    for f in foci {
        if f.at >= *a && f.at <= *b {
            marks.push((f.at.clone(), Some(f.min_width)));
        }
    }
    marks.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    // Merge coincident marks, keeping the strongest refinement.
    let mut merged: Vec<(Real, Option<f64>)> = Vec::new();
    for (x, w) in marks {
        if let Some(last) = merged.last_mut() {
            if last.0 == x {
                last.1 = match (last.1, w) {
                    (Some(p), Some(q)) => Some(p.min(q)),
                    (p, q) => p.or(q),
                };
                continue;
            }
        }
        merged.push((x, w));
    }
    let mut edges = vec![merged[0].0.clone()];
    for win in merged.windows(2) {
        let (l, wl) = (&win[0].0, win[0].1);
        let (r, wr) = (&win[1].0, win[1].1);
        let mid = (l + r) * 0.5;
        let left_end = if wr.is_some() { &mid } else { r };
        let right_start = if wl.is_some() { &mid } else { l };
        if let Some(w) = wl {
            let mut d = (left_end - l).to_f64() * sigma;
            let mut pts = Vec::new();
            while d > w && d > 0.0 {
                pts.push(l + d);
                d *= sigma;
            }
            pts.reverse();
            edges.extend(pts);
        }
        if wl.is_some() && wr.is_some() {
            edges.push(mid.clone());
        }
        if let Some(w) = wr {
            let mut d = (r - right_start).to_f64() * sigma;
            while d > w && d > 0.0 {
                edges.push(r - d);
                d *= sigma;
            }
        }
        edges.push(r.clone());
    }
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup_by(|x, y| x == y);
    edges
}

/// Uniformly spaced edges, `k` panels.
pub fn uniform_edges(a: &Real, b: &Real, k: usize) -> Vec<Real> {
    let h = (b - a) / (k as f64);
    (0..=k).map(|j| if j == k { b.clone() } else { a + &h * (j as f64) }).collect()
}

/// Splits every panel wider than `max_width` into equal pieces.
pub fn refine_edges(edges: &[Real], max_width: f64) -> Vec<Real> {
    let mut out = vec![edges[0].clone()];
    for win in edges.windows(2) {
        let w = (&win[1] - &win[0]).to_f64();
        let k = (w / max_width).ceil().max(1.0) as usize;
        let h = (&win[1] - &win[0]) / (k as f64);
        for j in 1..k {
            out.push(&win[0] + &h * (j as f64));
        }
        out.push(win[1].clone());
    }
    out
}

/// Runs `integrate` at two rule orders and accepts when they agree to `tol`
/// (relative to max(1, |I|)).
pub fn cross_validated<T: Integrand + Clone>(
    low: &QuadratureRule,
    high: &QuadratureRule,
    tol: f64,
    mut magnitude: impl FnMut(&T) -> f64,
    mut integrate: impl FnMut(&QuadratureRule) -> T,
    mut diff: impl FnMut(&T, &T) -> f64,
) -> Result<T> {
    let a = integrate(low);
    let b = integrate(high);
    let d = diff(&a, &b);
    let scale = magnitude(&b).max(1.0);
    if d <= tol * scale {
        Ok(b)
    } else {
        Err(Error::QuadratureNotConverged(format!(
            "orders {} and {} differ by {d:e}",
            low.order, high.order
        )))
    }
}
