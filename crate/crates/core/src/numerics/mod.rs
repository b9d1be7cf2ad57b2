//! Scalar arithmetic, special functions, quadrature, dense linear algebra
//! and root-finding shared by every other module.

pub mod bessel;
pub mod linalg;
pub mod matrix2;
pub mod quad;
pub mod scalar;
pub mod special;

pub use bessel::{bessel0, BesselKind};
pub use matrix2::Matrix2C;
pub use quad::{gauss_legendre, QuadratureRule};
pub use scalar::{Complex, Real, MIN_PREC};
pub use special::{ln_barnes_g, zeta_prime_at_minus_one};

pub type PrecReal = Real;
pub type PrecComplex = Complex;

/// Bisection for a sign change of `f` on [lo, hi]. The bracket is kept at
/// every step; stops when the width falls below `tol`.
pub fn bisect(
    mut f: impl FnMut(&Real) -> crate::Result<Real>,
    lo: &Real,
    hi: &Real,
    tol: &Real,
    max_iter: usize,
) -> crate::Result<Real> {
    let mut a = lo.clone();
    let mut b = hi.clone();
    let fa = f(&a)?;
    let fb = f(&b)?;
    if fa.is_negative() == fb.is_negative() {
        return Err(crate::Error::DomainError("bisection bracket has no sign change".into()));
    }
    let a_neg = fa.is_negative();
    for _ in 0..max_iter {
        if (&b - &a).abs() <= *tol {
            break;
        }
        let m = (&a + &b) * 0.5;
        let fm = f(&m)?;
        if fm.is_zero() {
            return Ok(m);
        }
        if fm.is_negative() == a_neg {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((a + b) * 0.5)
}
