//! Minimal complex arithmetic over [`Real`].

use std::fmt;

use crate::field::Real;

/// A complex number with high-precision real and imaginary parts.
#[derive(Clone, PartialEq, Eq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Complex {
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Complex {
        Complex::new(Real::zero(prec), Real::zero(prec))
    }

    pub fn real(re: Real) -> Complex {
        let p = re.prec();
        Complex::new(re, Real::zero(p))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Complex {
        Complex::new(Real::from_f64(re, prec), Real::from_f64(im, prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn add(&self, o: &Complex) -> Complex {
        Complex::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        Complex::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        Complex::new(&(&self.re * &o.re) - &(&self.im * &o.im), &(&self.re * &o.im) + &(&self.im * &o.re))
    }

    pub fn scale(&self, k: &Real) -> Complex {
        Complex::new(&self.re * k, &self.im * k)
    }

    /// |z|².
    pub fn norm_sqr(&self) -> Real {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt().expect("nonnegative")
    }

    /// Quotient; `None` when dividing by zero.
    pub fn div(&self, o: &Complex) -> Option<Complex> {
        let n = o.norm_sqr();
        let inv = n.recip()?;
        let conj = Complex::new(o.re.clone(), -&o.im);
        Some(self.mul(&conj).scale(&inv))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        write!(f, "{} {}", self.re.to_sci(digits), self.im.to_sci(digits))
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}
