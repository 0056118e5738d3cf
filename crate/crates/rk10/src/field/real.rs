//! Arbitrary-precision binary floating point.
//!
//! A [`Real`] is `mantissa · 2^exponent` with the mantissa rounded to a
//! fixed number of bits (round-half-even). Every value carries its own
//! precision; binary operations round to the larger of the two operand
//! precisions.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Guard bits added when converting a decimal digit count to a binary precision.
pub const GUARD_BITS: u32 = 24;

/// Binary precision that comfortably carries `digits` significant decimal digits.
pub fn digits_to_prec(digits: u32) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
}

/// Number of trustworthy decimal digits carried by a binary precision.
pub fn prec_to_digits(prec: u32) -> u32 {
    (prec.saturating_sub(GUARD_BITS) as f64 / std::f64::consts::LOG2_10).floor() as u32
}

/// High-precision real number.
#[derive(Clone)]
pub struct Real {
    man: BigInt,
    exp: i64,
    prec: u32,
}

/// Error from parsing a decimal literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed decimal number `{0}`")]
pub struct ParseRealError(pub String);

impl Real {
    /// Zero at the given precision.
    pub fn zero(prec: u32) -> Real {
        Real { man: BigInt::zero(), exp: 0, prec }
    }

    /// An integer value, rounded to `prec` bits.
    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Real {
        Real::normalize(n.into(), 0, prec)
    }

    /// Nearest `f64`-representable value promoted to `prec` bits (exact).
    pub fn from_f64(x: f64, prec: u32) -> Real {
        if x == 0.0 || !x.is_finite() {
            return Real::zero(prec);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if e == 0 { (frac, -1074) } else { (frac | (1u64 << 52), e - 1075) };
        Real::normalize(BigInt::from(m) * sign, e, prec)
    }

    /// Correctly rounded quotient `n / d`.
    pub fn from_ratio(n: &BigInt, d: &BigInt, prec: u32) -> Real {
        assert!(!d.is_zero(), "division by zero");
        if n.is_zero() {
            return Real::zero(prec);
        }
        Real::div_ints(n, d, 0, prec)
    }

    /// Correctly rounded value of a rational.
    pub fn from_rational(r: &BigRational, prec: u32) -> Real {
        Real::from_ratio(r.numer(), r.denom(), prec)
    }

    /// `n/d · 2^exp` rounded to `prec` bits, with a sticky bit for the remainder.
    fn div_ints(n: &BigInt, d: &BigInt, exp: i64, prec: u32) -> Real {
        let shift = (prec as i64 + 3 + d.bits() as i64 - n.bits() as i64).max(0);
        let (q, r) = (n << shift as usize).div_rem(d);
        let mut q = q << 1usize;
        if !r.is_zero() {
            // Sticky bit: any nonzero remainder breaks rounding ties correctly.
            if (n.sign() == Sign::Minus) != (d.sign() == Sign::Minus) {
                q -= 1;
            } else {
                q += 1;
            }
        }
        Real::normalize(q, exp - shift - 1, prec)
    }

    fn normalize(man: BigInt, exp: i64, prec: u32) -> Real {
        if man.is_zero() {
            return Real::zero(prec);
        }
        let bits = man.bits();
        if bits <= prec as u64 {
            return Real { man, exp, prec };
        }
        let shift = (bits - prec as u64) as usize;
        let neg = man.is_negative();
        let mag = man.abs();
        let mut q: BigInt = &mag >> shift;
        let rem = &mag - (&q << shift);
        let half = BigInt::one() << (shift - 1);
        match rem.cmp(&half) {
            Ordering::Greater => q += 1,
            Ordering::Equal if q.is_odd() => q += 1,
            _ => {}
        }
        let q = if neg { -q } else { q };
        Real { man: q, exp: exp + shift as i64, prec }
    }

    /// Precision in bits.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// The same value rounded to a new precision.
    pub fn with_prec(&self, prec: u32) -> Real {
        Real::normalize(self.man.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    /// −1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Real {
        Real { man: self.man.abs(), exp: self.exp, prec: self.prec }
    }

    /// Position just above the leading bit: |x| ∈ [2^(top−1), 2^top).
    fn top(&self) -> i64 {
        self.exp + self.man.bits() as i64
    }

    /// Multiplication by 2^k (exact).
    pub fn mul_pow2(&self, k: i64) -> Real {
        if self.is_zero() {
            return self.clone();
        }
        Real { man: self.man.clone(), exp: self.exp + k, prec: self.prec }
    }

    fn add_impl(&self, other: &Real, negate_other: bool) -> Real {
        let prec = self.prec.max(other.prec);
        let om = if negate_other { -&other.man } else { other.man.clone() };
        if other.is_zero() {
            return self.with_prec(prec);
        }
        if self.is_zero() {
            return Real::normalize(om, other.exp, prec);
        }
        let gap = prec as i64 + 8;
        if self.top() - other.top() > gap {
            // `other` sits below the rounding position; nudge by a sticky unit.
            let sticky = om.signum();
            let man = (&self.man << (gap as usize + 2)) + sticky;
            return Real::normalize(man, self.exp - gap - 2, prec);
        }
        if other.top() - self.top() > gap {
            let sticky = self.man.signum();
            let man = (&om << (gap as usize + 2)) + sticky;
            return Real::normalize(man, other.exp - gap - 2, prec);
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = om << (other.exp - e) as usize;
        Real::normalize(a + b, e, prec)
    }

    fn mul_impl(&self, other: &Real) -> Real {
        let prec = self.prec.max(other.prec);
        Real::normalize(&self.man * &other.man, self.exp + other.exp, prec)
    }

    /// Quotient; `None` on division by zero.
    pub fn checked_div(&self, other: &Real) -> Option<Real> {
        if other.is_zero() {
            return None;
        }
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return Some(Real::zero(prec));
        }
        Some(Real::div_ints(&self.man, &other.man, self.exp - other.exp, prec))
    }

    /// Reciprocal; `None` for zero.
    pub fn recip(&self) -> Option<Real> {
        Real::from_int(1, self.prec).checked_div(self)
    }

    /// Square root; `None` for negative input.
    pub fn sqrt(&self) -> Option<Real> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let prec = self.prec;
        let want = 2 * prec as i64 + 6;
        let mut k = (want - self.man.bits() as i64).max(0);
        if (self.exp - k).rem_euclid(2) != 0 {
            k += 1;
        }
        let m = self.man.magnitude() << k as usize;
        let r = m.sqrt();
        let exact = &r * &r == m;
        let mut r = BigInt::from(r) << 1usize;
        if !exact {
            r += 1;
        }
        Some(Real::normalize(r, (self.exp - k) / 2 - 1, prec))
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: u32) -> Real {
        let mut result = Real::from_int(1, self.prec);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        result
    }

    /// Larger of two values.
    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Nearest `f64`.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let shift = bits - 60;
        let (m, e) = if shift > 0 {
            ((&self.man >> shift as usize), self.exp + shift)
        } else {
            (self.man.clone(), self.exp)
        };
        let m = m.to_f64().unwrap_or(0.0);
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        m * 2f64.powi(e.clamp(-1100, 1100) as i32) * 2f64.powi((e - e.clamp(-1100, 1100)) as i32)
    }

    /// log10 |x|, or `None` for zero. Accurate to f64 precision even when
    /// |x| is far outside the f64 range.
    pub fn log10_abs(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        let bits = self.man.bits() as i64;
        let shift = (bits - 60).max(0);
        let m = (self.man.abs() >> shift as usize).to_f64().unwrap_or(1.0);
        Some(m.log10() + ((self.exp + shift) as f64) * std::f64::consts::LOG10_2)
    }

    /// Exact rational value of this binary float.
    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// `round(x · 10^digits)` with ties to even.
    fn scaled_integer(&self, digits: usize) -> BigInt {
        let n = &self.man * BigInt::from(10u32).pow(digits as u32);
        if self.exp >= 0 {
            return n << self.exp as usize;
        }
        let sh = (-self.exp) as usize;
        let neg = n.is_negative();
        let mag = n.abs();
        let mut q: BigInt = &mag >> sh;
        let rem = &mag - (&q << sh);
        let half = BigInt::one() << (sh - 1);
        match rem.cmp(&half) {
            Ordering::Greater => q += 1,
            Ordering::Equal if q.is_odd() => q += 1,
            _ => {}
        }
        if neg {
            -q
        } else {
            q
        }
    }

    /// Fixed-point text: sign, integer part, `.`, exactly `digits` fractional
    /// digits. Zero is always printed with a `+` sign.
    pub fn to_fixed(&self, digits: usize) -> String {
        let q = self.scaled_integer(digits);
        let sign = if q.is_negative() { '-' } else { '+' };
        let s = q.abs().to_string();
        let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
        let (int, frac) = s.split_at(s.len() - digits);
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// Scientific notation with `sig` significant digits, e.g. `3.4912e-6`.
    pub fn to_sci(&self, sig: usize) -> String {
        let sig = sig.max(1);
        let Some(l) = self.log10_abs() else {
            return format!("0.{}e0", "0".repeat(sig - 1));
        };
        let mut e = l.floor() as i64;
        let mut q = self.scaled_by_pow10(sig as i64 - 1 - e);
        if q.abs().to_string().len() > sig {
            e += 1;
            q = self.scaled_by_pow10(sig as i64 - 1 - e);
        }
        let sign = if q.is_negative() { "-" } else { "" };
        let s = q.abs().to_string();
        let (a, b) = s.split_at(1);
        if b.is_empty() {
            format!("{sign}{a}e{e}")
        } else {
            format!("{sign}{a}.{b}e{e}")
        }
    }

    fn scaled_by_pow10(&self, k: i64) -> BigInt {
        if k >= 0 {
            self.scaled_integer(k as usize)
        } else {
            let r = self.to_rational() / BigRational::from_integer(BigInt::from(10u32).pow((-k) as u32));
            Real::from_rational(&r, self.prec + 8).scaled_integer(0)
        }
    }

    /// Parses `[+-]digits[.digits][e[+-]digits]` (also `p/q` rationals).
    pub fn parse(s: &str, prec: u32) -> Result<Real, ParseRealError> {
        parse_decimal_rational(s).map(|r| Real::from_rational(&r, prec))
    }

    /// π to the given precision (cached per precision).
    pub fn pi(prec: u32) -> Real {
        static CACHE: OnceLock<Mutex<HashMap<u32, Real>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(p) = cache.lock().unwrap().get(&prec) {
            return p.clone();
        }
        // Machin: π = 16 atan(1/5) − 4 atan(1/239), in fixed point.
        let w = prec as usize + 32;
        let one = BigInt::one() << w;
        let atan_inv = |x: u32| -> BigInt {
            let x2 = BigInt::from(x) * x;
            let mut term = &one / x;
            let mut sum = term.clone();
            let mut k = 1u32;
            while !term.is_zero() {
                term = &term / &x2;
                let t = &term / (2 * k + 1);
                if k % 2 == 1 {
                    sum -= t;
                } else {
                    sum += t;
                }
                k += 1;
            }
            sum
        };
        let pi = atan_inv(5) * 16 - atan_inv(239) * 4;
        let r = Real::normalize(pi, -(w as i64), prec);
        cache.lock().unwrap().insert(prec, r.clone());
        r
    }

    /// (sin x, cos x).
    pub fn sin_cos(&self) -> (Real, Real) {
        let prec = self.prec;
        let extra = (self.top().max(0) as u32) + 32;
        let wp = prec + extra;
        let x = self.with_prec(wp);
        let half_pi = Real::pi(wp).mul_pow2(-1);
        let k = (&x / &half_pi).round_to_int();
        let r = &x - &(&half_pi * &Real::from_int(k.clone(), wp));
        let (mut s, mut c) = (r.clone(), Real::from_int(1, wp));
        // Taylor series on |r| ≤ π/4.
        let r2 = &r * &r;
        let mut ts = r.clone();
        let mut tc = Real::from_int(1, wp);
        let eps_top = -(wp as i64) - 4;
        let mut n = 1u32;
        loop {
            ts = &(&ts * &r2) / &Real::from_int(-((2 * n) as i64) * (2 * n as i64 + 1), wp);
            tc = &(&tc * &r2) / &Real::from_int(-((2 * n - 1) as i64) * (2 * n as i64), wp);
            s = &s + &ts;
            c = &c + &tc;
            if (ts.is_zero() || ts.top() < eps_top) && (tc.is_zero() || tc.top() < eps_top) {
                break;
            }
            n += 1;
        }
        let q = k.mod_floor(&BigInt::from(4)).to_u8().unwrap_or(0);
        let (s, c) = match q {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        };
        (s.with_prec(prec), c.with_prec(prec))
    }

    /// Nearest integer (ties to even).
    pub fn round_to_int(&self) -> BigInt {
        self.scaled_integer(0)
    }
}

/// Parses a decimal literal (optional sign, fraction, exponent) or `p/q`
/// into an exact rational.
pub fn parse_decimal_rational(s: &str) -> Result<BigRational, ParseRealError> {
    let err = || ParseRealError(s.to_string());
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().map_err(|_| err())?),
        None => (body, 0),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(err());
    }
    if !ip.bytes().all(|b| b.is_ascii_digit()) || !fp.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| err())? };
    let e10 = exp - fp.len() as i64;
    let ten = BigInt::from(10u32);
    let mut r = if e10 >= 0 {
        BigRational::from_integer(n * ten.pow(e10 as u32))
    } else {
        BigRational::new(n, ten.pow((-e10) as u32))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Real) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let mag = if self.top() != other.top() {
            self.top().cmp(&other.top())
        } else {
            let e = self.exp.min(other.exp);
            let a = self.man.abs() << (self.exp - e) as usize;
            let b = other.man.abs() << (other.exp - e) as usize;
            a.cmp(&b)
        };
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                $body(self, rhs)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                $body(&self, &rhs)
            }
        }
    };
}
binop!(Add, add, |a: &Real, b: &Real| a.add_impl(b, false));
binop!(Sub, sub, |a: &Real, b: &Real| a.add_impl(b, true));
binop!(Mul, mul, |a: &Real, b: &Real| a.mul_impl(b));
binop!(Div, div, |a: &Real, b: &Real| a.checked_div(b).expect("division by zero"));

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { man: -self.man, exp: self.exp, prec: self.prec }
    }
}
impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { man: -&self.man, exp: self.exp, prec: self.prec }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(20);
        write!(f, "{}", self.to_sci(sig))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_sci(25))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_digits() {
        let p = digits_to_prec(60);
        let r = Real::from_int(2, p).sqrt().unwrap();
        assert_eq!(r.to_fixed(50), "+1.41421356237309504880168872420969807856967187537695");
    }

    #[test]
    fn pi_digits() {
        let p = digits_to_prec(60);
        assert_eq!(Real::pi(p).to_fixed(40), "+3.1415926535897932384626433832795028841972");
    }

    #[test]
    fn sin_cos_values() {
        let p = digits_to_prec(50);
        let (s, c) = Real::from_int(1, p).sin_cos();
        assert_eq!(s.to_fixed(30), "+0.841470984807896506652502321630");
        assert_eq!(c.to_fixed(30), "+0.540302305868139717400936607443");
        let (s, c) = Real::from_int(-7, p).sin_cos();
        assert_eq!(s.to_fixed(20), "-0.65698659871878909040");
        assert_eq!(c.to_fixed(20), "+0.75390225434330463814");
    }

    #[test]
    fn fixed_and_parse_roundtrip() {
        let p = digits_to_prec(90);
        for s in ["+0.133333333333333333333333333333333333333333333333333333333333333333333333333333333333333333",
                  "-1.813340450902764402851969633637645578401662879405552525500029323314042291416407578145425752",
                  "+0.000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000"] {
            assert_eq!(Real::parse(s, p).unwrap().to_fixed(90), s);
        }
        assert_eq!(Real::parse("-0", p).unwrap().to_fixed(2), "+0.00");
        assert_eq!(Real::parse("2/3", p).unwrap().to_fixed(3), "+0.667");
        assert_eq!(Real::parse("1.5e-3", p).unwrap().to_fixed(4), "+0.0015");
        assert!(Real::parse("1.2.3", p).is_err());
    }

    #[test]
    fn sci_format() {
        let p = digits_to_prec(30);
        assert_eq!(Real::parse("0.0000034912", p).unwrap().to_sci(3), "3.49e-6");
        assert_eq!(Real::parse("-9.999", p).unwrap().to_sci(2), "-1.0e1");
        assert_eq!(Real::from_f64(0.5, p).to_f64(), 0.5);
    }

    #[test]
    fn far_apart_addition_keeps_larger() {
        let p = 100;
        let a = Real::from_int(1, p);
        let b = Real::from_int(1, p).mul_pow2(-500);
        assert_eq!(&a + &b, a);
        assert_eq!(&a - &b, a);
        assert_eq!((&b + &b).mul_pow2(499), a);
    }
}
