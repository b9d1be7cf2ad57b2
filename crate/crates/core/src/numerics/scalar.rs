//! Arbitrary-precision real and complex scalars backed by MPFR.
//!
//! Every value carries its own precision. Binary operations produce a result
//! at the larger of the two operand precisions; operations with an `f64`
//! keep the precision of the arbitrary-precision operand.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

/// Smallest precision accepted anywhere in the crate.
pub const MIN_PREC: u32 = 64;

#[derive(Clone)]
pub struct Real(Float);

impl Real {
    pub fn new(prec: u32, v: f64) -> Real {
        Real(Float::with_val(prec.max(MIN_PREC), v))
    }

    pub fn from_float(f: Float) -> Real {
        if f.prec() < MIN_PREC {
            let mut f = f;
            f.set_prec(MIN_PREC);
            Real(f)
        } else {
            Real(f)
        }
    }

    /// Parses a decimal string at the given precision.
    pub fn parse(prec: u32, s: &str) -> Option<Real> {
        Float::parse(s).ok().map(|p| Real(Float::with_val(prec.max(MIN_PREC), p)))
    }

    pub fn zero(prec: u32) -> Real {
        Real::new(prec, 0.0)
    }

    pub fn one(prec: u32) -> Real {
        Real::new(prec, 1.0)
    }

    pub fn from_i64(prec: u32, v: i64) -> Real {
        Real(Float::with_val(prec.max(MIN_PREC), v))
    }

    pub fn pi(prec: u32) -> Real {
        Real(Float::with_val(prec.max(MIN_PREC), Constant::Pi))
    }

    pub fn ln2(prec: u32) -> Real {
        Real(Float::with_val(prec.max(MIN_PREC), Constant::Log2))
    }

    pub fn euler_gamma(prec: u32) -> Real {
        Real(Float::with_val(prec.max(MIN_PREC), Constant::Euler))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    /// Rounds (or extends) to another precision.
    pub fn with_prec(&self, prec: u32) -> Real {
        Real(Float::with_val(prec.max(MIN_PREC), &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_sign_positive() && !self.0.is_zero()
    }

    fn un(&self, f: impl FnOnce(Float) -> Float) -> Real {
        Real(f(self.0.clone()))
    }

    pub fn abs(&self) -> Real {
        self.un(|x| x.abs())
    }
    pub fn sqrt(&self) -> Real {
        self.un(|x| x.sqrt())
    }
    pub fn exp(&self) -> Real {
        self.un(|x| x.exp())
    }
    pub fn ln(&self) -> Real {
        self.un(|x| x.ln())
    }
    pub fn sin(&self) -> Real {
        self.un(|x| x.sin())
    }
    pub fn cos(&self) -> Real {
        self.un(|x| x.cos())
    }
    pub fn tan(&self) -> Real {
        self.un(|x| x.tan())
    }
    pub fn asin(&self) -> Real {
        self.un(|x| x.asin())
    }
    pub fn acos(&self) -> Real {
        self.un(|x| x.acos())
    }
    pub fn atan(&self) -> Real {
        self.un(|x| x.atan())
    }
    pub fn sinh(&self) -> Real {
        self.un(|x| x.sinh())
    }
    pub fn cosh(&self) -> Real {
        self.un(|x| x.cosh())
    }
    pub fn ln_1p(&self) -> Real {
        self.un(|x| x.ln_1p())
    }
    pub fn recip(&self) -> Real {
        self.un(|x| x.recip())
    }
    pub fn square(&self) -> Real {
        self.un(|x| x.square())
    }
    pub fn floor(&self) -> Real {
        self.un(|x| x.floor())
    }
    /// Riemann zeta at a real argument (MPFR).
    pub fn zeta(&self) -> Real {
        self.un(|x| x.zeta())
    }
    /// ln |Γ(x)| (MPFR).
    pub fn ln_abs_gamma(&self) -> Real {
        Real(self.0.clone().ln_abs_gamma().0)
    }

    pub fn atan2(&self, x: &Real) -> Real {
        let p = self.prec().max(x.prec());
        Real(Float::with_val(p, &self.0).atan2(&x.0))
    }

    pub fn powi(&self, k: i32) -> Real {
        Real(Float::with_val(self.prec(), (&self.0).pow(k)))
    }

    pub fn powf(&self, e: &Real) -> Real {
        let p = self.prec().max(e.prec());
        Real(Float::with_val(p, (&self.0).pow(&e.0)))
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Real) -> Real {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Power of two `2^e` at the given precision.
    pub fn exp2i(prec: u32, e: i32) -> Real {
        Real(Float::with_val(prec.max(MIN_PREC), Float::i_exp(1, e)))
    }

    pub fn to_complex(&self) -> Complex {
        Complex::new(self.clone(), Real::zero(self.prec()))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(24)))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0.clone())
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                let p = self.prec().max(rhs.prec());
                let mut out = Float::with_val(p, &self.0);
                out.$am(&rhs.0);
                Real(out)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(mut self, rhs: &Real) -> Real {
                if rhs.prec() > self.prec() {
                    self.0.set_prec(rhs.prec());
                }
                self.0.$am(&rhs.0);
                self
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                self.$m(&rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                self.$m(&rhs)
            }
        }
        impl $tr<f64> for Real {
            type Output = Real;
            fn $m(mut self, rhs: f64) -> Real {
                self.0.$am(rhs);
                self
            }
        }
        impl $tr<f64> for &Real {
            type Output = Real;
            fn $m(self, rhs: f64) -> Real {
                self.clone().$m(rhs)
            }
        }
        impl $atr<&Real> for Real {
            fn $am(&mut self, rhs: &Real) {
                if rhs.prec() > self.prec() {
                    self.0.set_prec(rhs.prec());
                }
                self.0.$am(&rhs.0);
            }
        }
        impl $atr<Real> for Real {
            fn $am(&mut self, rhs: Real) {
                self.$am(&rhs);
            }
        }
        impl $atr<f64> for Real {
            fn $am(&mut self, rhs: f64) {
                self.0.$am(rhs);
            }
        }
    };
}

real_binop!(Add, add, AddAssign, add_assign);
real_binop!(Sub, sub, SubAssign, sub_assign);
real_binop!(Mul, mul, MulAssign, mul_assign);
real_binop!(Div, div, DivAssign, div_assign);

impl Add<&Real> for f64 {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        rhs + self
    }
}
impl Add<Real> for f64 {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        rhs + self
    }
}
impl Mul<&Real> for f64 {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        rhs * self
    }
}
impl Mul<Real> for f64 {
    type Output = Real;
    fn mul(self, rhs: Real) -> Real {
        rhs * self
    }
}
impl Sub<&Real> for f64 {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        -(rhs - self)
    }
}
impl Sub<Real> for f64 {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        -(rhs - self)
    }
}
impl Div<&Real> for f64 {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        rhs.recip() * self
    }
}
impl Div<Real> for f64 {
    type Output = Real;
    fn div(self, rhs: Real) -> Real {
        rhs.recip() * self
    }
}

/// Complex scalar as a pair of [`Real`]s. Branches of multivalued functions
/// are principal: arguments lie in (−π, π].
#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Complex {
        Complex { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Complex {
        Complex::new(Real::new(prec, re), Real::new(prec, im))
    }

    pub fn zero(prec: u32) -> Complex {
        Complex::from_f64(prec, 0.0, 0.0)
    }

    pub fn one(prec: u32) -> Complex {
        Complex::from_f64(prec, 1.0, 0.0)
    }

    pub fn i(prec: u32) -> Complex {
        Complex::from_f64(prec, 0.0, 1.0)
    }

    /// e^{iθ}.
    pub fn cis(theta: &Real) -> Complex {
        Complex::new(theta.cos(), theta.sin())
    }

    pub fn from_polar(r: &Real, theta: &Real) -> Complex {
        Complex::new(r * theta.cos(), r * theta.sin())
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Complex {
        Complex::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Complex {
        Complex::new(self.re.clone(), -&self.im)
    }

    pub fn square(&self) -> Complex {
        self * self
    }

    pub fn norm_sqr(&self) -> Real {
        self.re.square() + self.im.square()
    }

    pub fn abs(&self) -> Real {
        let p = self.prec();
        Real(Float::with_val(p, self.re.0.hypot_ref(&self.im.0)))
    }

    pub fn arg(&self) -> Real {
        self.im.atan2(&self.re)
    }

    /// Multiplication by i.
    pub fn mul_i(&self) -> Complex {
        Complex::new(-&self.im, self.re.clone())
    }

    pub fn scale(&self, r: &Real) -> Complex {
        Complex::new(&self.re * r, &self.im * r)
    }

    pub fn recip(&self) -> Complex {
        let d = self.norm_sqr();
        Complex::new(&self.re / &d, -(&self.im / &d))
    }

    pub fn exp(&self) -> Complex {
        let m = self.re.exp();
        Complex::new(&m * self.im.cos(), &m * self.im.sin())
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Complex {
        Complex::new(self.abs().ln(), self.arg())
    }

    /// Principal square root (Re ≥ 0, cut on ℝ⁻ with the upper-side value on it).
    pub fn sqrt(&self) -> Complex {
        let p = self.prec();
        if self.is_zero() {
            return Complex::zero(p);
        }
        let r = self.abs();
        if !self.re.is_negative() {
            let t = ((&r + &self.re) * 0.5).sqrt();
            let u = &self.im / (&t * 2.0);
            Complex::new(t, u)
        } else {
            let t = ((&r - &self.re) * 0.5).sqrt();
            let u = &self.im.abs() / (&t * 2.0);
            let t = if self.im.is_negative() { -t } else { t };
            Complex::new(u, t)
        }
    }

    /// Principal power z^e = exp(e·ln z).
    pub fn powc(&self, e: &Complex) -> Complex {
        if self.is_zero() {
            return Complex::zero(self.prec());
        }
        (e * self.ln()).exp()
    }

    pub fn powr(&self, e: &Real) -> Complex {
        if self.is_zero() {
            return Complex::zero(self.prec());
        }
        self.ln().scale(e).exp()
    }

    pub fn powi(&self, k: i64) -> Complex {
        let p = self.prec();
        let mut base = if k < 0 { self.recip() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Complex::one(p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn sin(&self) -> Complex {
        Complex::new(self.re.sin() * self.im.cosh(), self.re.cos() * self.im.sinh())
    }

    pub fn cos(&self) -> Complex {
        Complex::new(self.re.cos() * self.im.cosh(), -(self.re.sin() * self.im.sinh()))
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl From<Real> for Complex {
    fn from(r: Real) -> Complex {
        let p = r.prec();
        Complex::new(r, Real::zero(p))
    }
}

impl From<&Real> for Complex {
    fn from(r: &Real) -> Complex {
        r.to_complex()
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-&self.re, -&self.im)
    }
}

fn cadd(a: &Complex, b: &Complex) -> Complex {
    Complex::new(&a.re + &b.re, &a.im + &b.im)
}
fn csub(a: &Complex, b: &Complex) -> Complex {
    Complex::new(&a.re - &b.re, &a.im - &b.im)
}
fn cmul(a: &Complex, b: &Complex) -> Complex {
    Complex::new(&a.re * &b.re - &a.im * &b.im, &a.re * &b.im + &a.im * &b.re)
}
fn cdiv(a: &Complex, b: &Complex) -> Complex {
    // Smith's algorithm keeps the intermediate magnitudes bounded.
    if b.re.abs() >= b.im.abs() {
        let r = &b.im / &b.re;
        let d = &b.re + &r * &b.im;
        Complex::new((&a.re + &a.im * &r) / &d, (&a.im - &a.re * &r) / &d)
    } else {
        let r = &b.re / &b.im;
        let d = &b.im + &r * &b.re;
        Complex::new((&a.re * &r + &a.im) / &d, (&a.im * &r - &a.re) / &d)
    }
}

macro_rules! complex_binop {
    ($tr:ident, $m:ident, $f:ident, $atr:ident, $am:ident) => {
        impl $tr<&Complex> for &Complex {
            type Output = Complex;
            fn $m(self, rhs: &Complex) -> Complex {
                $f(self, rhs)
            }
        }
        impl $tr<&Complex> for Complex {
            type Output = Complex;
            fn $m(self, rhs: &Complex) -> Complex {
                $f(&self, rhs)
            }
        }
        impl $tr<Complex> for Complex {
            type Output = Complex;
            fn $m(self, rhs: Complex) -> Complex {
                $f(&self, &rhs)
            }
        }
        impl $tr<Complex> for &Complex {
            type Output = Complex;
            fn $m(self, rhs: Complex) -> Complex {
                $f(self, &rhs)
            }
        }
        impl $tr<&Real> for &Complex {
            type Output = Complex;
            fn $m(self, rhs: &Real) -> Complex {
                $f(self, &rhs.to_complex())
            }
        }
        impl $tr<&Real> for Complex {
            type Output = Complex;
            fn $m(self, rhs: &Real) -> Complex {
                $f(&self, &rhs.to_complex())
            }
        }
        impl $tr<Real> for Complex {
            type Output = Complex;
            fn $m(self, rhs: Real) -> Complex {
                $f(&self, &rhs.to_complex())
            }
        }
        impl $tr<Real> for &Complex {
            type Output = Complex;
            fn $m(self, rhs: Real) -> Complex {
                $f(self, &rhs.to_complex())
            }
        }
        impl $tr<f64> for &Complex {
            type Output = Complex;
            fn $m(self, rhs: f64) -> Complex {
                $f(self, &Complex::from_f64(self.prec(), rhs, 0.0))
            }
        }
        impl $tr<f64> for Complex {
            type Output = Complex;
            fn $m(self, rhs: f64) -> Complex {
                $f(&self, &Complex::from_f64(self.prec(), rhs, 0.0))
            }
        }
        impl $atr<&Complex> for Complex {
            fn $am(&mut self, rhs: &Complex) {
                *self = $f(self, rhs);
            }
        }
        impl $atr<Complex> for Complex {
            fn $am(&mut self, rhs: Complex) {
                *self = $f(self, &rhs);
            }
        }
    };
}

complex_binop!(Add, add, cadd, AddAssign, add_assign);
complex_binop!(Sub, sub, csub, SubAssign, sub_assign);
complex_binop!(Mul, mul, cmul, MulAssign, mul_assign);
complex_binop!(Div, div, cdiv, DivAssign, div_assign);

impl Mul<&Complex> for &Real {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        rhs.scale(self)
    }
}

impl Mul<Complex> for &Real {
    type Output = Complex;
    fn mul(self, rhs: Complex) -> Complex {
        rhs.scale(self)
    }
}

impl Mul<&Complex> for f64 {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        rhs * self
    }
}

impl Mul<Complex> for f64 {
    type Output = Complex;
    fn mul(self, rhs: Complex) -> Complex {
        rhs * self
    }
}

impl Sub<&Complex> for f64 {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        -(rhs - self)
    }
}

impl Add<&Complex> for f64 {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        rhs + self
    }
}
