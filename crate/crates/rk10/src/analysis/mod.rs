//! Error coefficients, stability polynomial, interval and region of absolute
//! stability, zeros of the stability function and the Szegő curve.

mod complex;
mod region;
mod roots;

use std::ops::RangeInclusive;

use crate::field::digits_to_prec;
use crate::field::Real;
use crate::scalar::Scalar;
use crate::tableau::{ButcherTableau, PhiTable};
use crate::trees::RootedTree;

pub use complex::Complex;
pub use region::{
    distance_to_polyline, region_samples, szego_curve, szego_leftmost, write_region, RegionData, Window,
};
pub use roots::polynomial_zeros;

/// Failures of the analysis routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("stability polynomial requires an explicit tableau")]
    NotExplicit,
    #[error("interval extends beyond scan range")]
    BeyondScanRange,
    #[error("root finding did not converge (best relative residual 1e{best_log10:.1})")]
    NonConvergence { best_log10: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// R(z) = Σ r_k z^k with r₀ = 1 and r_{n+1} = b·Aⁿ·1.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityPolynomial<S: Scalar> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> StabilityPolynomial<S> {
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|x| !x.is_zero()).unwrap_or(0)
    }

    /// Coefficients as reals at the given binary precision.
    pub fn to_real(&self, prec: u32) -> Vec<Real> {
        self.coeffs.iter().map(|x| x.to_real(prec)).collect()
    }

    /// Coefficients rounded to f64.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(Scalar::to_f64).collect()
    }
}

/// The stability polynomial of an explicit tableau.
pub fn stability_polynomial<S: Scalar>(tab: &ButcherTableau<S>) -> Result<StabilityPolynomial<S>, AnalysisError> {
    if !tab.is_explicit() {
        return Err(AnalysisError::NotExplicit);
    }
    let ctx = tab.ctx();
    let s = tab.stages();
    let mut coeffs = vec![S::one(ctx)];
    let mut v = vec![S::one(ctx); s];
    for _ in 0..s {
        coeffs.push(tab.b().iter().zip(&v).fold(S::zero(ctx), |acc, (b, x)| acc.add(&b.mul(x))));
        v = tab.apply(&v);
    }
    Ok(StabilityPolynomial { coeffs })
}

/// Horner evaluation of a real polynomial (coefficients lowest first).
pub fn eval_real(coeffs: &[Real], z: &Real) -> Real {
    let prec = z.prec();
    coeffs.iter().rev().fold(Real::zero(prec), |acc, k| &(&acc * z) + k)
}

/// Horner evaluation at a complex point.
pub fn eval_complex(coeffs: &[Real], z: &Complex) -> Complex {
    coeffs.iter().rev().fold(Complex::zero(z.prec()), |acc, k| acc.mul(z).add(&Complex::real(k.clone())))
}

/// One tree's share of T_p.
#[derive(Debug, Clone)]
pub struct TreeContribution {
    pub tree: RootedTree,
    /// bΦ(t) − 1/t!.
    pub residual: Real,
    /// (bΦ(t) − 1/t!)²/σ(t)².
    pub weighted_square: Real,
}

/// T_p computed two ways.
#[derive(Debug, Clone)]
pub struct ErrorCoefficientReport {
    pub p: usize,
    /// √Σ (bΦ(t) − 1/t!)²/σ(t)².
    pub tp: Real,
    /// (1/p!)·√Σ α(t)²(t!·bΦ(t) − 1)².
    pub tp_labelings: Real,
    pub contributions: Vec<TreeContribution>,
}

impl ErrorCoefficientReport {
    /// Relative disagreement between the two formulas (0 when both vanish).
    pub fn relative_disagreement(&self) -> f64 {
        let diff = (&self.tp - &self.tp_labelings).abs();
        match self.tp.log10_abs() {
            None => diff.to_f64(),
            Some(l) => diff.log10_abs().map_or(0.0, |d| 10f64.powf(d - l)),
        }
    }
}

/// T_p for every p in `orders`, working at `digits` decimal digits.
pub fn error_coefficient_table<S: Scalar>(
    tab: &ButcherTableau<S>,
    orders: RangeInclusive<usize>,
    digits: u32,
) -> Vec<ErrorCoefficientReport> {
    let prec = digits_to_prec(digits);
    let rt = tab.to_real(prec);
    let max = *orders.end();
    let table = PhiTable::new(&rt, max.max(1));
    let forest = table.forest().clone();
    let one = Real::from_int(1, prec);
    orders
        .filter(|&p| p >= 1)
        .map(|p| {
            let mut sum = Real::zero(prec);
            let mut sum_alpha = Real::zero(prec);
            let mut contributions = Vec::new();
            for i in forest.order_range(p) {
                let bphi = rt.b().iter().zip(table.phi(i)).fold(Real::zero(prec), |acc, (b, x)| &acc + &(b * x));
                let dens = Real::from_int(forest.density(i), prec);
                let sigma = Real::from_int(forest.symmetry(i), prec);
                let residual = &bphi - &(&one / &dens);
                let w = &residual / &sigma;
                let weighted_square = &w * &w;
                sum = &sum + &weighted_square;
                let alpha = Real::from_int(forest.labelings(i), prec);
                let e = &alpha * &(&(&dens * &bphi) - &one);
                sum_alpha = &sum_alpha + &(&e * &e);
                contributions.push(TreeContribution { tree: forest.tree(i).clone(), residual, weighted_square });
            }
            let pf = Real::from_int(crate::trees::factorial(p), prec);
            let tp = sum.sqrt().expect("sum of squares");
            let tp_labelings = &sum_alpha.sqrt().expect("sum of squares") / &pf;
            ErrorCoefficientReport { p, tp, tp_labelings, contributions }
        })
        .collect()
}

/// T_p at `digits` decimal digits.
pub fn error_coefficients<S: Scalar>(tab: &ButcherTableau<S>, p: usize, digits: u32) -> ErrorCoefficientReport {
    assert!(p >= 1, "order must be at least 1");
    error_coefficient_table(tab, p..=p, digits).pop().expect("one report")
}

/// Left end z_R of the real interval [z_R, 0] of absolute stability: the
/// connected component of {z ≤ 0 : |R(z)| ≤ 1} containing 0.
///
/// Scans leftward in steps of 1/64 over [−64, 0], refines the first
/// crossing twice with 16-fold smaller steps, then bisects.
pub fn stability_interval<S: Scalar>(tab: &ButcherTableau<S>, digits: u32) -> Result<Real, AnalysisError> {
    let prec = digits_to_prec(digits + 10);
    let coeffs = stability_polynomial(tab)?.to_real(prec);
    let one = Real::from_int(1, prec);
    let outside = |z: &Real| eval_real(&coeffs, z).abs() > one;
    let mut step = Real::from_int(1, prec).mul_pow2(-6);
    // Bracket: `right` stays inside the stable set, `left` is outside.
    let mut right = Real::zero(prec);
    let mut left = None;
    for _ in 0..64 * 64 {
        let z = &right - &step;
        if outside(&z) {
            left = Some(z);
            break;
        }
        right = z;
    }
    let mut left = left.ok_or(AnalysisError::BeyondScanRange)?;
    for _ in 0..2 {
        step = step.mul_pow2(-4);
        let mut z = right.clone();
        loop {
            let next = &z - &step;
            if next <= left || outside(&next) {
                left = next.max(left);
                right = z;
                break;
            }
            z = next;
        }
    }
    let target = Real::from_int(1, prec).mul_pow2(-((digits as f64 + 8.0) * std::f64::consts::LOG2_10) as i64);
    while &right - &left > target {
        let mid = (&left + &right).mul_pow2(-1);
        if outside(&mid) {
            left = mid;
        } else {
            right = mid;
        }
    }
    Ok((&left + &right).mul_pow2(-1).with_prec(digits_to_prec(digits)))
}
