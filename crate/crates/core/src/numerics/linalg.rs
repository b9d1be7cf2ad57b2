//! Dense factorizations at arbitrary precision.

use super::scalar::{Complex, Real};
use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Clone, Debug)]
pub struct Mat<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Clone> Mat<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Mat<T> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }
}

pub type RMat = Mat<Real>;
pub type CMat = Mat<Complex>;

fn singular_threshold(prec: u32, scale: &Real) -> Real {
    Real::exp2i(prec, -(prec as i32) + 8) * scale
}

/// Symmetric LDLᵀ without pivoting. Returns the diagonal `d`, where
/// d_k = D_{k+1} / D_k is the ratio of consecutive leading minors.
pub fn ldl_pivots(a: &RMat) -> Result<Vec<Real>> {
    let n = a.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = a.get(0, 0).prec();
    let scale = a.data.iter().fold(Real::zero(prec), |m, x| m.max(x.abs()));
    let thresh = singular_threshold(prec, &scale);
    // w[i][k] = l_ik d_k and l[i][k] = l_ik for k < i.
    let mut w: Vec<Vec<Real>> = vec![Vec::new(); n];
    let mut l: Vec<Vec<Real>> = vec![Vec::new(); n];
    let mut d: Vec<Real> = Vec::with_capacity(n);
    for j in 0..n {
        let mut djj = a.get(j, j).clone();
        for k in 0..j {
            djj -= &w[j][k] * &l[j][k];
        }
        if djj.abs() <= thresh {
            return Err(Error::SingularMinor(j + 1));
        }
        let dinv = djj.recip();
        for i in (j + 1)..n {
            let mut v = a.get(i, j).clone();
            for k in 0..j {
                v -= &w[i][k] * &l[j][k];
            }
            l[i].push(&v * &dinv);
            w[i].push(v);
        }
        d.push(djj);
    }
    Ok(d)
}

/// LU without pivoting; the pivots are the ratios of leading minors.
pub fn lu_leading_pivots(a: &CMat) -> Result<Vec<Complex>> {
    let n = a.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = a.get(0, 0).prec();
    let scale = a.data.iter().fold(Real::zero(prec), |m, x| m.max(x.abs()));
    let thresh = singular_threshold(prec, &scale);
    let mut m = a.data.clone();
    let mut piv = Vec::with_capacity(n);
    for k in 0..n {
        let p = m[k * n + k].clone();
        if p.abs() <= thresh {
            return Err(Error::SingularMinor(k + 1));
        }
        let pinv = p.recip();
        for i in (k + 1)..n {
            let f = &m[i * n + k] * &pinv;
            if f.is_zero() {
                continue;
            }
            for j in (k + 1)..n {
                let t = &f * &m[k * n + j];
                m[i * n + j] -= t;
            }
        }
        piv.push(p);
    }
    Ok(piv)
}

/// In-place LU with partial pivoting. Returns the packed factors, the row
/// permutation, and the number of row swaps.
fn lu_partial(a: &CMat) -> Result<(Vec<Complex>, Vec<usize>, usize)> {
    let n = a.n;
    let prec = a.data.first().map(|x| x.prec()).unwrap_or(64);
    let scale = a.data.iter().fold(Real::zero(prec), |m, x| m.max(x.abs()));
    let thresh = singular_threshold(prec, &scale);
    let mut m = a.data.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    for k in 0..n {
        let mut best = k;
        let mut best_abs = m[k * n + k].abs();
        for i in (k + 1)..n {
            let v = m[i * n + k].abs();
            if v > best_abs {
                best = i;
                best_abs = v;
            }
        }
        if best_abs <= thresh {
            return Err(Error::SingularMinor(k + 1));
        }
        if best != k {
            for j in 0..n {
                m.swap(k * n + j, best * n + j);
            }
            perm.swap(k, best);
            swaps += 1;
        }
        let pinv = m[k * n + k].recip();
        for i in (k + 1)..n {
            let f = &m[i * n + k] * &pinv;
            for j in (k + 1)..n {
                let t = &f * &m[k * n + j];
                m[i * n + j] -= t;
            }
            m[i * n + k] = f;
        }
    }
    Ok((m, perm, swaps))
}

/// ln det by partial-pivoting LU: Σ ln u_kk + iπ·(swaps). The imaginary
/// part is a valid logarithm but not reduced to (−π, π].
pub fn lu_logdet(a: &CMat) -> Result<Complex> {
    let n = a.n;
    let prec = a.data.first().map(|x| x.prec()).unwrap_or(64);
    let (m, _, swaps) = lu_partial(a)?;
    let mut acc = Complex::zero(prec);
    for k in 0..n {
        acc += m[k * n + k].ln();
    }
    if swaps % 2 == 1 {
        acc.im += Real::pi(prec);
    }
    Ok(acc)
}

/// Logs of the diagonal of U from partial-pivoting LU, with iπ added to the
/// first entry for an odd permutation; they sum to a logarithm of det A.
pub fn lu_partial_logs(a: &CMat) -> Result<Vec<Complex>> {
    let n = a.n;
    let (m, _, swaps) = lu_partial(a)?;
    let mut out: Vec<Complex> = (0..n).map(|k| m[k * n + k].ln()).collect();
    if swaps % 2 == 1 {
        if let Some(first) = out.first_mut() {
            first.im += Real::pi(first.prec());
        }
    }
    Ok(out)
}

/// Solves A X = B for several right-hand sides (columns of `b`).
pub fn solve_many(a: &CMat, b: &[Vec<Complex>]) -> Result<Vec<Vec<Complex>>> {
    let n = a.n;
    let (m, perm, _) = lu_partial(a)?;
    let mut out = Vec::with_capacity(b.len());
    for rhs in b {
        let mut y: Vec<Complex> = perm.iter().map(|&p| rhs[p].clone()).collect();
        for i in 0..n {
            for k in 0..i {
                let t = &m[i * n + k] * &y[k];
                y[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let t = &m[i * n + k] * &y[k];
                y[i] -= t;
            }
            y[i] = &y[i] / &m[i * n + i];
        }
        out.push(y);
    }
    Ok(out)
}

pub fn solve(a: &CMat, b: &[Complex]) -> Result<Vec<Complex>> {
    Ok(solve_many(a, &[b.to_vec()])?.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert_like(n: usize, prec: u32) -> RMat {
        Mat::from_fn(n, |i, j| Real::new(prec, 1.0) / ((i + j + 1) as f64))
    }

    #[test]
    fn ldl_pivots_multiply_to_determinant() {
        // det of the 3×3 Hilbert matrix is 1/2160.
        let h = hilbert_like(3, 128);
        let d = ldl_pivots(&h).unwrap();
        let det = d.iter().fold(Real::one(128), |a, x| a * x);
        assert!((det * 2160.0 - 1.0).abs().to_f64() < 1e-30);
    }

    #[test]
    fn singular_minor_is_reported() {
        let prec = 128;
        let a = Mat::from_fn(2, |_, _| Real::one(prec));
        assert_eq!(ldl_pivots(&a), Err(Error::SingularMinor(2)));
    }

    #[test]
    fn partial_pivot_logdet_and_solve() {
        let prec = 128;
        let a: CMat = Mat::from_fn(3, |i, j| {
            Complex::from_f64(prec, [[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]][i][j], (i as f64) - (j as f64))
        });
        let b = vec![Complex::one(prec), Complex::i(prec), Complex::from_f64(prec, 2.0, -1.0)];
        let x = solve(&a, &b).unwrap();
        for i in 0..3 {
            let mut r = -b[i].clone();
            for j in 0..3 {
                r += a.get(i, j) * &x[j];
            }
            assert!(r.abs().to_f64() < 1e-33);
        }
        let ld = lu_logdet(&a).unwrap();
        let det = ld.exp();
        // cofactor expansion oracle
        let g = |i: usize, j: usize| a.get(i, j).clone();
        let direct = &g(0, 0) * &(&g(1, 1) * &g(2, 2) - &g(1, 2) * &g(2, 1))
            - &g(0, 1) * &(&g(1, 0) * &g(2, 2) - &g(1, 2) * &g(2, 0))
            + &g(0, 2) * &(&g(1, 0) * &g(2, 1) - &g(1, 1) * &g(2, 0));
        assert!((&det - &direct).abs().to_f64() < 1e-30);
    }
}
