//! The dual method M* of a tableau with nonzero weights satisfying D(1):
//! c*_i = 1 − c_{s+1−i}, b*_j = b_{s+1−j},
//! a*_ij = b_{s+1−j} a_{s+1−j, s+1−i} / b_{s+1−i}.
//!
//! Duality is an involution, preserves explicitness, and turns
//! B(l), C(m), D(n) into B(l), C(n), D(m).

use crate::scalar::Scalar;
use crate::tableau::{check_bcd, d_n, Bcd, ButcherTableau};

/// Why a dual could not be formed or a theorem check could not run.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DualityError {
    #[error("dual undefined: zero weight at stage {0}")]
    ZeroWeight(usize),
    #[error("dual undefined: D(1) violated")]
    NotD1,
    #[error("precondition failed: the method does not satisfy {0}")]
    Precondition(String),
}

/// A dual tableau and whether it coincides with the original.
#[derive(Debug, Clone)]
pub struct DualityOutcome<S: Scalar> {
    pub dual: ButcherTableau<S>,
    pub self_dual: bool,
}

/// Forms the dual method, checking admissibility first.
pub fn dualize<S: Scalar>(tab: &ButcherTableau<S>) -> Result<DualityOutcome<S>, DualityError> {
    let tol = tab.tol();
    if let Some(j) = tab.b().iter().position(|x| x.is_negligible(tol)) {
        return Err(DualityError::ZeroWeight(j + 1));
    }
    if !d_n(tab, 0).iter().all(|x| x.is_negligible(tol)) {
        return Err(DualityError::NotD1);
    }
    let s = tab.stages();
    let ctx = tab.ctx().clone();
    let (a, b, c) = (tab.a(), tab.b(), tab.c());
    let r = |i: usize| s - 1 - i;
    let one = S::one(&ctx);
    let inv_b: Vec<S> = b.iter().map(|x| x.inv().expect("nonzero weight")).collect();
    let a_star = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| {
                    let x = &a[r(j)][r(i)];
                    if x.is_zero() {
                        S::zero(&ctx)
                    } else {
                        b[r(j)].mul(x).mul(&inv_b[r(i)])
                    }
                })
                .collect()
        })
        .collect();
    let b_star = (0..s).map(|j| b[r(j)].clone()).collect();
    let c_star = (0..s).map(|i| one.sub(&c[r(i)])).collect();
    let dual = ButcherTableau::new(a_star, b_star, c_star, ctx).expect("shape preserved");
    let self_dual = dual == *tab;
    Ok(DualityOutcome { dual, self_dual })
}

/// Result of checking the B/C/D swap on one method.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityTheoremReport {
    /// Levels measured on the method.
    pub original: Bcd,
    /// Levels measured on its dual.
    pub dual: Bcd,
    /// Whether the dual satisfies B(l), C(n), D(m).
    pub holds: bool,
}

/// Given that the method satisfies B(l), C(m), D(n), confirms that its dual
/// satisfies B(l), C(n), D(m).
pub fn check_duality_theorem<S: Scalar>(
    tab: &ButcherTableau<S>,
    l: usize,
    m: usize,
    n: usize,
) -> Result<DualityTheoremReport, DualityError> {
    let original = check_bcd(tab);
    for (name, level, k) in [("B", original.b, l), ("C", original.c, m), ("D", original.d, n)] {
        if !level.at_least(k) {
            return Err(DualityError::Precondition(format!("{name}({k})")));
        }
    }
    let out = dualize(tab)?;
    let dual = check_bcd(&out.dual);
    let holds = dual.b.at_least(l) && dual.c.at_least(n) && dual.d.at_least(m);
    Ok(DualityTheoremReport { original, dual, holds })
}

/// Checks the theorem using the levels measured on the method itself.
pub fn check_duality_measured<S: Scalar>(tab: &ButcherTableau<S>) -> Result<DualityTheoremReport, DualityError> {
    let bcd = check_bcd(tab);
    let lb = |x: crate::tableau::Level| x.lower_bound().min(64);
    check_duality_theorem(tab, lb(bcd.b), lb(bcd.c), lb(bcd.d))
}
