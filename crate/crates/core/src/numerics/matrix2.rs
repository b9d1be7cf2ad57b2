//! 2×2 complex matrices.

use std::ops::{Add, Mul, Sub};

use super::scalar::{Complex, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix2C {
    pub a11: Complex,
    pub a12: Complex,
    pub a21: Complex,
    pub a22: Complex,
}

impl Matrix2C {
    pub fn new(a11: Complex, a12: Complex, a21: Complex, a22: Complex) -> Matrix2C {
        Matrix2C { a11, a12, a21, a22 }
    }

    pub fn identity(prec: u32) -> Matrix2C {
        Matrix2C::new(Complex::one(prec), Complex::zero(prec), Complex::zero(prec), Complex::one(prec))
    }

    pub fn diag(d1: Complex, d2: Complex) -> Matrix2C {
        let p = d1.prec();
        Matrix2C::new(d1, Complex::zero(p), Complex::zero(p), d2)
    }

    /// c^{σ3} = diag(c, 1/c).
    pub fn sigma3_power(c: &Complex) -> Matrix2C {
        Matrix2C::diag(c.clone(), c.recip())
    }

    /// Real-entry constructor.
    pub fn from_f64(prec: u32, m: [[f64; 2]; 2]) -> Matrix2C {
        Matrix2C::new(
            Complex::from_f64(prec, m[0][0], 0.0),
            Complex::from_f64(prec, m[0][1], 0.0),
            Complex::from_f64(prec, m[1][0], 0.0),
            Complex::from_f64(prec, m[1][1], 0.0),
        )
    }

    pub fn prec(&self) -> u32 {
        self.a11.prec()
    }

    pub fn det(&self) -> Complex {
        &self.a11 * &self.a22 - &self.a12 * &self.a21
    }

    pub fn inverse(&self) -> Matrix2C {
        let d = self.det();
        Matrix2C::new(&self.a22 / &d, -(&self.a12 / &d), -(&self.a21 / &d), &self.a11 / &d)
    }

    pub fn scale(&self, c: &Complex) -> Matrix2C {
        Matrix2C::new(&self.a11 * c, &self.a12 * c, &self.a21 * c, &self.a22 * c)
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Matrix2C {
        Matrix2C::new(self.a11.conj(), self.a12.conj(), self.a21.conj(), self.a22.conj())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> Real {
        [&self.a11, &self.a12, &self.a21, &self.a22]
            .iter()
            .map(|c| c.abs())
            .fold(Real::zero(self.prec()), |m, x| m.max(x))
    }

    pub fn entries(&self) -> [&Complex; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }

    pub fn from_entries(e: [Complex; 4]) -> Matrix2C {
        let [a11, a12, a21, a22] = e;
        Matrix2C::new(a11, a12, a21, a22)
    }
}

impl Mul<&Matrix2C> for &Matrix2C {
    type Output = Matrix2C;
    fn mul(self, b: &Matrix2C) -> Matrix2C {
        Matrix2C::new(
            &self.a11 * &b.a11 + &self.a12 * &b.a21,
            &self.a11 * &b.a12 + &self.a12 * &b.a22,
            &self.a21 * &b.a11 + &self.a22 * &b.a21,
            &self.a21 * &b.a12 + &self.a22 * &b.a22,
        )
    }
}

impl Mul<Matrix2C> for Matrix2C {
    type Output = Matrix2C;
    fn mul(self, b: Matrix2C) -> Matrix2C {
        &self * &b
    }
}

impl Mul<&Matrix2C> for Matrix2C {
    type Output = Matrix2C;
    fn mul(self, b: &Matrix2C) -> Matrix2C {
        &self * b
    }
}

impl Add<&Matrix2C> for &Matrix2C {
    type Output = Matrix2C;
    fn add(self, b: &Matrix2C) -> Matrix2C {
        Matrix2C::new(&self.a11 + &b.a11, &self.a12 + &b.a12, &self.a21 + &b.a21, &self.a22 + &b.a22)
    }
}

impl Sub<&Matrix2C> for &Matrix2C {
    type Output = Matrix2C;
    fn sub(self, b: &Matrix2C) -> Matrix2C {
        Matrix2C::new(&self.a11 - &b.a11, &self.a12 - &b.a12, &self.a21 - &b.a21, &self.a22 - &b.a22)
    }
}
