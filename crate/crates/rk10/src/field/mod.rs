//! Exact arithmetic in ℚ(α, β) and high-precision real evaluation.
//!
//! Elements of ℚ(α, β), with α = √((7+2√7)/21) and β = √((7−2√7)/21), are
//! stored as coordinates over the fixed ordered basis
//! `{1, √3, √7, √21, α, β, √7α, √7β}` with a common denominator.

mod real;

pub use real::{digits_to_prec, parse_decimal_rational, prec_to_digits, ParseRealError, Real, GUARD_BITS};

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number (always in lowest terms, positive denominator).
pub type Rational = BigRational;

/// Display names of the basis elements, in coordinate order.
pub const BASIS_NAMES: [&str; 8] = ["1", "√3", "√7", "√21", "α", "β", "√7α", "√7β"];

/// Errors from field arithmetic and number parsing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero in ℚ(α,β)")]
    DivisionByZero,
    #[error("nine-integer list needs a nonzero ninth entry")]
    ZeroDenominator,
    #[error("malformed field literal `{0}`")]
    Malformed(String),
}

/// Structure constants, scaled by [`TABLE_SCALE`]: `e_i · e_j = Σ (coef/21) e_k`.
///
/// Derivation: √3·α = 2β + √7β (square both sides: 3α² = 1 + (2/7)√7 =
/// (2+√7)²β²) and √3·β = −2α + √7α likewise, with signs fixed by α, β > 0.
/// Products inside the α-part follow from α² = 1/3 + (2/21)√7,
/// β² = 1/3 − (2/21)√7 and αβ = √21/21.
const TABLE_SCALE: i64 = 21;

fn table() -> &'static [[Vec<(usize, i64)>; 8]; 8] {
    static T: OnceLock<[[Vec<(usize, i64)>; 8]; 8]> = OnceLock::new();
    T.get_or_init(|| {
        // Upper triangle (i ≤ j); the table is symmetric.
        let upper: &[(usize, usize, &[(usize, i64)])] = &[
            (1, 1, &[(0, 63)]),
            (1, 2, &[(3, 21)]),
            (1, 3, &[(2, 63)]),
            (2, 2, &[(0, 147)]),
            (2, 3, &[(1, 147)]),
            (3, 3, &[(0, 441)]),
            (1, 4, &[(5, 42), (7, 21)]),
            (1, 5, &[(4, -42), (6, 21)]),
            (1, 6, &[(5, 147), (7, 42)]),
            (1, 7, &[(4, 147), (6, -42)]),
            (2, 4, &[(6, 21)]),
            (2, 5, &[(7, 21)]),
            (2, 6, &[(4, 147)]),
            (2, 7, &[(5, 147)]),
            (3, 4, &[(5, 147), (7, 42)]),
            (3, 5, &[(4, 147), (6, -42)]),
            (3, 6, &[(5, 294), (7, 147)]),
            (3, 7, &[(4, -294), (6, 147)]),
            (4, 4, &[(0, 7), (2, 2)]),
            (4, 5, &[(3, 1)]),
            (4, 6, &[(0, 14), (2, 7)]),
            (4, 7, &[(1, 7)]),
            (5, 5, &[(0, 7), (2, -2)]),
            (5, 6, &[(1, 7)]),
            (5, 7, &[(0, -14), (2, 7)]),
            (6, 6, &[(0, 49), (2, 14)]),
            (6, 7, &[(3, 7)]),
            (7, 7, &[(0, 49), (2, -14)]),
        ];
        let mut t: [[Vec<(usize, i64)>; 8]; 8] = Default::default();
        for j in 0..8 {
            t[0][j] = vec![(j, TABLE_SCALE)];
            t[j][0] = vec![(j, TABLE_SCALE)];
        }
        for &(i, j, e) in upper {
            t[i][j] = e.to_vec();
            t[j][i] = e.to_vec();
        }
        t
    })
}

/// Structure-constant expansion of `e_i · e_j` as exact rational coordinates.
pub fn basis_product(i: usize, j: usize) -> [Rational; 8] {
    let mut out: [Rational; 8] = Default::default();
    for &(k, c) in &table()[i][j] {
        out[k] = Rational::new(c.into(), TABLE_SCALE.into());
    }
    out
}

/// Element of ℚ(α, β): `(Σ num_k e_k) / den`, in lowest terms, `den > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    num: [BigInt; 8],
    den: BigInt,
}

impl Default for FieldElement {
    fn default() -> Self {
        FieldElement::zero()
    }
}

impl FieldElement {
    fn from_parts(num: [BigInt; 8], den: BigInt) -> FieldElement {
        let mut e = FieldElement { num, den };
        e.reduce();
        e
    }

    fn reduce(&mut self) {
        if self.den.is_negative() {
            for n in &mut self.num {
                *n = -&*n;
            }
            self.den = -&self.den;
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        let mut g = self.den.clone();
        for n in &self.num {
            if g.is_one() {
                return;
            }
            if !n.is_zero() {
                g = g.gcd(n);
            }
        }
        if !g.is_one() {
            for n in &mut self.num {
                *n = &*n / &g;
            }
            self.den = &self.den / &g;
        }
    }

    pub fn zero() -> FieldElement {
        FieldElement { num: Default::default(), den: BigInt::one() }
    }

    pub fn one() -> FieldElement {
        FieldElement::basis(0)
    }

    /// The k-th basis element.
    pub fn basis(k: usize) -> FieldElement {
        let mut num: [BigInt; 8] = Default::default();
        num[k] = BigInt::one();
        FieldElement { num, den: BigInt::one() }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> FieldElement {
        let mut num: [BigInt; 8] = Default::default();
        num[0] = n.into();
        FieldElement { num, den: BigInt::one() }
    }

    pub fn from_rational(r: &Rational) -> FieldElement {
        let mut num: [BigInt; 8] = Default::default();
        num[0] = r.numer().clone();
        FieldElement { num, den: r.denom().clone() }
    }

    /// `p / q` as a field element.
    pub fn ratio(p: i64, q: i64) -> FieldElement {
        FieldElement::from_rational(&Rational::new(p.into(), q.into()))
    }

    /// Builds an element from its 8 rational coordinates ξ₁…ξ₈.
    pub fn from_coords(xi: &[Rational; 8]) -> FieldElement {
        let den = xi.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let num = std::array::from_fn(|k| xi[k].numer() * (&den / xi[k].denom()));
        FieldElement::from_parts(num, den)
    }

    /// Coordinate ξ_{k+1} (0-based index `k`).
    pub fn coord(&self, k: usize) -> Rational {
        Rational::new(self.num[k].clone(), self.den.clone())
    }

    /// All eight coordinates.
    pub fn coords(&self) -> [Rational; 8] {
        std::array::from_fn(|k| self.coord(k))
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// True when only the rational coordinate is nonzero.
    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational, if it is one.
    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coord(0))
    }

    pub fn sqrt3() -> FieldElement {
        FieldElement::basis(1)
    }
    pub fn sqrt7() -> FieldElement {
        FieldElement::basis(2)
    }
    pub fn sqrt21() -> FieldElement {
        FieldElement::basis(3)
    }
    pub fn alpha() -> FieldElement {
        FieldElement::basis(4)
    }
    pub fn beta() -> FieldElement {
        FieldElement::basis(5)
    }

    fn mul_impl(&self, other: &FieldElement) -> FieldElement {
        if self.is_zero() || other.is_zero() {
            return FieldElement::zero();
        }
        if other.is_rational() {
            return self.scale_int(&other.num[0], &other.den);
        }
        if self.is_rational() {
            return other.scale_int(&self.num[0], &self.den);
        }
        let t = table();
        let mut acc: [BigInt; 8] = Default::default();
        for i in 0..8 {
            if self.num[i].is_zero() {
                continue;
            }
            for j in 0..8 {
                if other.num[j].is_zero() {
                    continue;
                }
                let p = &self.num[i] * &other.num[j];
                for &(k, c) in &t[i][j] {
                    acc[k] += &p * c;
                }
            }
        }
        FieldElement::from_parts(acc, &self.den * &other.den * TABLE_SCALE)
    }

    fn scale_int(&self, n: &BigInt, d: &BigInt) -> FieldElement {
        let num = std::array::from_fn(|k| &self.num[k] * n);
        FieldElement::from_parts(num, &self.den * d)
    }

    fn add_impl(&self, other: &FieldElement, sign: i32) -> FieldElement {
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = std::array::from_fn(|k| {
                if sign > 0 {
                    &self.num[k] + &other.num[k]
                } else {
                    &self.num[k] - &other.num[k]
                }
            });
            return FieldElement::from_parts(num, self.den.clone());
        }
        let g = self.den.gcd(&other.den);
        let fa = &other.den / &g;
        let fb = &self.den / &g;
        let num = std::array::from_fn(|k| {
            let a = &self.num[k] * &fa;
            let b = &other.num[k] * &fb;
            if sign > 0 {
                a + b
            } else {
                a - b
            }
        });
        FieldElement::from_parts(num, &self.den * fa)
    }

    /// Matrix of multiplication by `self`: column j holds `self · e_j`,
    /// scaled to integers; returns (matrix, common denominator).
    fn mul_matrix(&self) -> ([[BigInt; 8]; 8], BigInt) {
        let t = table();
        let mut m: [[BigInt; 8]; 8] = Default::default();
        for i in 0..8 {
            if self.num[i].is_zero() {
                continue;
            }
            for j in 0..8 {
                for &(k, c) in &t[i][j] {
                    m[k][j] += &self.num[i] * c;
                }
            }
        }
        (m, &self.den * TABLE_SCALE)
    }

    /// Multiplicative inverse via a fraction-free 8×8 solve of `M_a x = e₁`.
    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.is_rational() {
            let mut num: [BigInt; 8] = Default::default();
            num[0] = self.den.clone();
            return Ok(FieldElement::from_parts(num, self.num[0].clone()));
        }
        // (M/s) x = e1  ⇔  M x = s e1.
        let (m, s) = self.mul_matrix();
        let mut rows: Vec<Vec<BigInt>> = (0..8)
            .map(|i| {
                let mut r: Vec<BigInt> = m[i].to_vec();
                r.push(if i == 0 { s.clone() } else { BigInt::zero() });
                r
            })
            .collect();
        let x = bareiss_solve(&mut rows).ok_or(FieldError::DivisionByZero)?;
        let x: [Rational; 8] = x.try_into().expect("8 coordinates");
        Ok(FieldElement::from_coords(&x))
    }

    /// Evaluates to a high-precision real with `prec` bits.
    pub fn to_real(&self, prec: u32) -> Real {
        if self.is_rational() {
            return Real::from_ratio(&self.num[0], &self.den, prec);
        }
        let wp = prec + 32;
        let basis = basis_reals(wp);
        let mut acc = Real::zero(wp);
        for k in 0..8 {
            if !self.num[k].is_zero() {
                acc = &acc + &(&basis[k] * &Real::from_int(self.num[k].clone(), wp));
            }
        }
        (&acc / &Real::from_int(self.den.clone(), wp)).with_prec(prec)
    }

    /// log10 |x| (`None` for zero), with the evaluation precision raised until
    /// cancellation between basis terms no longer affects the result.
    pub fn log10_abs(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        let mut p = 128;
        let mut prev = self.to_real(p);
        loop {
            p *= 2;
            let cur = self.to_real(p);
            let diff = (&cur - &prev).abs();
            if !cur.is_zero() && (diff.is_zero() || diff.log10_abs()? < cur.log10_abs()? - 6.0) {
                return cur.log10_abs();
            }
            if p > 1 << 20 {
                return cur.log10_abs();
            }
            prev = cur;
        }
    }

    /// Nine-integer form `(n₁, …, n₈, n₉)` with ξ_k = n_k / n₉ and n₉ > 0 minimal.
    pub fn to_nine_integers(&self) -> [BigInt; 9] {
        std::array::from_fn(|k| if k < 8 { self.num[k].clone() } else { self.den.clone() })
    }

    /// Decodes a nine-integer list: ξ_k = n_k / n₉.
    pub fn from_nine_integers(ns: &[BigInt]) -> Result<FieldElement, FieldError> {
        if ns.len() != 9 {
            return Err(FieldError::Malformed(format!("expected 9 integers, found {}", ns.len())));
        }
        if ns[8].is_zero() {
            return Err(FieldError::ZeroDenominator);
        }
        let num = std::array::from_fn(|k| ns[k].clone());
        Ok(FieldElement::from_parts(num, ns[8].clone()))
    }

    /// Structured text form `xi: n/d n/d n/d n/d n/d n/d n/d n/d`.
    pub fn to_xi_string(&self) -> String {
        let parts: Vec<String> = (0..8)
            .map(|k| {
                let c = self.coord(k);
                format!("{}/{}", c.numer(), c.denom())
            })
            .collect();
        format!("xi: {}", parts.join(" "))
    }

    /// Human-readable expression such as `1/2 - 1/2·α`.
    pub fn to_expression(&self) -> String {
        let mut out = String::new();
        for k in 0..8 {
            let c = self.coord(k);
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if k == 0 {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(BASIS_NAMES[k]);
            } else {
                out.push_str(&format!("{}·{}", a, BASIS_NAMES[k]));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Parses a field literal: `p/q`, an integer, a decimal, nine whitespace
    /// separated integers, or an `xi:` coordinate block.
    pub fn parse(s: &str) -> Result<FieldElement, FieldError> {
        let t = s.trim();
        let bad = || FieldError::Malformed(t.to_string());
        if let Some(rest) = t.strip_prefix("xi:") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 8 {
                return Err(bad());
            }
            let mut xi: [Rational; 8] = Default::default();
            for (k, p) in parts.iter().enumerate() {
                xi[k] = parse_decimal_rational(p).map_err(|_| bad())?;
            }
            return Ok(FieldElement::from_coords(&xi));
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() == 9 {
            let ns: Result<Vec<BigInt>, _> = parts.iter().map(|p| p.parse::<BigInt>()).collect();
            return FieldElement::from_nine_integers(&ns.map_err(|_| bad())?);
        }
        if parts.len() == 1 {
            return parse_decimal_rational(t).map(|r| FieldElement::from_rational(&r)).map_err(|_| bad());
        }
        Err(bad())
    }

    /// Integer power.
    pub fn pow(&self, n: u32) -> FieldElement {
        let mut r = FieldElement::one();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }
}

/// Numerical values of the eight basis elements at `prec` bits (cached).
pub fn basis_reals(prec: u32) -> Arc<[Real; 8]> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<[Real; 8]>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&prec) {
        return b.clone();
    }
    let wp = prec + 16;
    let int = |n: i64| Real::from_int(n, wp);
    let s3 = int(3).sqrt().unwrap();
    let s7 = int(7).sqrt().unwrap();
    let s21 = int(21).sqrt().unwrap();
    let alpha = (&(&int(7) + &(&int(2) * &s7)) / &int(21)).sqrt().unwrap();
    let beta = (&(&int(7) - &(&int(2) * &s7)) / &int(21)).sqrt().unwrap();
    let s7a = &s7 * &alpha;
    let s7b = &s7 * &beta;
    let b = [int(1), s3, s7, s21, alpha, beta, s7a, s7b].map(|x| x.with_prec(prec));
    let b = Arc::new(b);
    cache.lock().unwrap().insert(prec, b.clone());
    b
}

/// Solves an n×(n+1) augmented integer system by Bareiss elimination;
/// returns the rational solution or `None` if singular.
fn bareiss_solve(m: &mut [Vec<BigInt>]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x: Vec<Rational> = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= Rational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Some(x)
}

impl FromStr for FieldElement {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FieldElement::parse(s)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expression())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({})", self.to_expression())
    }
}

macro_rules! field_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                $body(self, rhs)
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                $body(&self, &rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                $body(&self, rhs)
            }
        }
    };
}
field_binop!(Add, add, |a: &FieldElement, b: &FieldElement| a.add_impl(b, 1));
field_binop!(Sub, sub, |a: &FieldElement, b: &FieldElement| a.add_impl(b, -1));
field_binop!(Mul, mul, |a: &FieldElement, b: &FieldElement| a.mul_impl(b));
field_binop!(Div, div, |a: &FieldElement, b: &FieldElement| a
    .mul_impl(&b.inv().expect("division by zero in ℚ(α,β)")));

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { num: self.num.map(|n| -n), den: self.den }
    }
}
impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -(self.clone())
    }
}
