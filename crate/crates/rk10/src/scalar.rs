//! The scalar abstraction shared by exact and high-precision numeric modes.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::field::{prec_to_digits, FieldElement, Real};

/// Arithmetic needed by tableau algorithms, implemented by exact types
/// ([`FieldElement`], [`BigRational`]) and by [`Real`].
///
/// Numeric types carry a context (the binary precision for [`Real`]) used to
/// build constants; exact types use `()`.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + Send + Sync + 'static {
    type Ctx: Clone + fmt::Debug + Send + Sync + 'static;

    /// Whether equality and zero tests are exact.
    const EXACT: bool;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_rational(r: &BigRational, ctx: &Self::Ctx) -> Self;

    fn from_i64(n: i64, ctx: &Self::Ctx) -> Self {
        Self::from_rational(&BigRational::from_integer(n.into()), ctx)
    }

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for (exact) zero.
    fn inv(&self) -> Option<Self>;

    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    /// Exact zero test.
    fn is_zero(&self) -> bool;

    /// log10 |x|; `None` for exact zero.
    fn log10_abs(&self) -> Option<f64>;

    /// Conversion to a high-precision real.
    fn to_real(&self, prec: u32) -> Real;

    fn to_f64(&self) -> f64;

    /// Decimal digits carried by the context (`None` for exact types).
    fn ctx_digits(ctx: &Self::Ctx) -> Option<u32>;

    /// Zero test under a tolerance: exact types ignore `tol` and test exact
    /// zero; numeric types test |x| ≤ 10^tol_log10.
    fn is_negligible(&self, tol: Tol) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.log10_abs().is_none_or(|l| l <= tol.0)
        }
    }

    /// Equality under a tolerance (exact equality for exact types).
    fn approx_eq(&self, o: &Self, tol: Tol) -> bool {
        self.sub(o).is_negligible(tol)
    }

    fn pow(&self, n: u32) -> Self {
        let mut r = Self::one(&self.ctx());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }
}

/// Absolute tolerance given as a base-10 exponent: |x| ≤ 10^0 counts as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol(pub f64);

impl Tol {
    /// Default zero tolerance for a context: 10^(−digits+10) for numeric
    /// types, irrelevant for exact ones.
    pub fn default_for<S: Scalar>(ctx: &S::Ctx) -> Tol {
        match S::ctx_digits(ctx) {
            Some(d) => Tol(-(d as f64) + 10.0),
            None => Tol(f64::NEG_INFINITY),
        }
    }

    /// Relative rank threshold 10^(−digits/2).
    pub fn rank_for<S: Scalar>(ctx: &S::Ctx) -> Tol {
        match S::ctx_digits(ctx) {
            Some(d) => Tol(-(d as f64) / 2.0),
            None => Tol(f64::NEG_INFINITY),
        }
    }
}

impl Scalar for FieldElement {
    type Ctx = ();
    const EXACT: bool = true;

    fn ctx(&self) {}
    fn zero(_: &()) -> Self {
        FieldElement::zero()
    }
    fn one(_: &()) -> Self {
        FieldElement::one()
    }
    fn from_rational(r: &BigRational, _: &()) -> Self {
        FieldElement::from_rational(r)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        FieldElement::inv(self).ok()
    }
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
    fn log10_abs(&self) -> Option<f64> {
        FieldElement::log10_abs(self)
    }
    fn to_real(&self, prec: u32) -> Real {
        FieldElement::to_real(self, prec)
    }
    fn to_f64(&self) -> f64 {
        FieldElement::to_real(self, 80).to_f64()
    }
    fn ctx_digits(_: &()) -> Option<u32> {
        None
    }
}

impl Scalar for BigRational {
    type Ctx = ();
    const EXACT: bool = true;

    fn ctx(&self) {}
    fn zero(_: &()) -> Self {
        <BigRational as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <BigRational as One>::one()
    }
    fn from_rational(r: &BigRational, _: &()) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn log10_abs(&self) -> Option<f64> {
        Real::from_rational(self, 80).log10_abs()
    }
    fn to_real(&self, prec: u32) -> Real {
        Real::from_rational(self, prec)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| Real::from_rational(self, 80).to_f64())
    }
    fn ctx_digits(_: &()) -> Option<u32> {
        None
    }
}

impl Scalar for Real {
    type Ctx = u32;
    const EXACT: bool = false;

    fn ctx(&self) -> u32 {
        self.prec()
    }
    fn zero(p: &u32) -> Self {
        Real::zero(*p)
    }
    fn one(p: &u32) -> Self {
        Real::from_int(1, *p)
    }
    fn from_rational(r: &BigRational, p: &u32) -> Self {
        Real::from_rational(r, *p)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        self.recip()
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn is_zero(&self) -> bool {
        Real::is_zero(self)
    }
    fn log10_abs(&self) -> Option<f64> {
        Real::log10_abs(self)
    }
    fn to_real(&self, prec: u32) -> Real {
        self.with_prec(prec)
    }
    fn to_f64(&self) -> f64 {
        Real::to_f64(self)
    }
    fn ctx_digits(p: &u32) -> Option<u32> {
        Some(prec_to_digits(*p))
    }
    fn pow(&self, n: u32) -> Self {
        self.powi(n)
    }
}

/// |x| comparison key used for sorting residuals (−∞ for zero).
pub fn magnitude<S: Scalar>(x: &S) -> f64 {
    x.log10_abs().unwrap_or(f64::NEG_INFINITY)
}
