//! Weight-renormalized view of the closing block and matching of derived
//! constants against the published constants block.
//!
//! With A_ij = b_i a_ij / b_j (the coefficients the dual method would have),
//! the condition d₀ = 0 reads A₁₅,ⱼ = 1 − cⱼ − Σ_{i<15} A_ij, and the
//! renormalized rows Δ_nj = d_nj / b_j equal 𝒟_n(cⱼ) − Σ_i (1 − c_iⁿ) A_ij
//! with 𝒟_n(θ) = 1 − θ − (1 − θ^{n+1})/(n+1).

use crate::field::FieldElement as FE;
use crate::scalar::Scalar;
use crate::tableau::ButcherTableau;

use super::derive::{c6_constants, c6_simplified, closing_ratio};
use super::{Construction, FamilyError};

/// 𝒟_n(θ) = 1 − θ − (1 − θ^{n+1})/(n+1).
pub fn adjoint_defect<S: Scalar>(n: u32, theta: &S) -> S {
    let ctx = theta.ctx();
    let one = S::one(&ctx);
    let tail = one.sub(&theta.pow(n + 1)).mul(&S::from_i64(n as i64 + 1, &ctx).inv().expect("n + 1 > 0"));
    one.sub(theta).sub(&tail)
}

/// Renormalized closing-block coefficients and Δ rows (0-based stages).
/// Entries whose renormalization would divide by a zero weight are `None`.
#[derive(Debug, Clone)]
pub struct RenormalizedClosing<S: Scalar> {
    /// First stage of the closing block (0-based).
    pub first: usize,
    /// A_ij for first ≤ j < i.
    pub a: Vec<Vec<Option<S>>>,
    /// Δ_nj for n = 0..=max_n, computed from the renormalized coefficients.
    pub delta: Vec<Vec<Option<S>>>,
}

/// Builds the renormalized closing block from stage `first` (0-based) on,
/// with Δ rows up to `max_n`.
pub fn renormalized_closing<S: Scalar>(tab: &ButcherTableau<S>, first: usize, max_n: u32) -> RenormalizedClosing<S> {
    let s = tab.stages();
    let (a, b, c) = (tab.a(), tab.b(), tab.c());
    let ctx = tab.ctx().clone();
    let inv_b: Vec<Option<S>> = b.iter().map(|x| if x.is_negligible(tab.tol()) { None } else { x.inv() }).collect();
    let big_a: Vec<Vec<Option<S>>> = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| {
                    if j < first || j >= i {
                        return Some(S::zero(&ctx));
                    }
                    inv_b[j].as_ref().map(|ib| b[i].mul(&a[i][j]).mul(ib))
                })
                .collect()
        })
        .collect();
    let delta = (0..=max_n)
        .map(|n| {
            (0..s)
                .map(|j| {
                    if j < first {
                        return None;
                    }
                    let mut acc = adjoint_defect(n, &c[j]);
                    for i in j + 1..s {
                        let aij = big_a[i][j].as_ref()?;
                        let w = S::one(&ctx).sub(&c[i].pow(n));
                        acc = acc.sub(&w.mul(aij));
                    }
                    Some(acc)
                })
                .collect()
        })
        .collect();
    RenormalizedClosing { first, a: big_a, delta }
}

/// How a published row relates to a derived constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchKind {
    Equal,
    Negated,
}

/// One published row with the derived constants it equals.
#[derive(Debug, Clone)]
pub struct ConstantMatch {
    /// 1-based row in print order.
    pub row: usize,
    pub value: FE,
    pub matches: Vec<(String, MatchKind)>,
}

/// For each published value, lists the derived constants equal to it (or to
/// its negative).
pub fn match_constants(published: &[FE], derived: &[(String, FE)]) -> Vec<ConstantMatch> {
    published
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let neg = -v;
            let matches = derived
                .iter()
                .filter_map(|(name, x)| {
                    if v.is_zero() {
                        None
                    } else if x == v {
                        Some((name.clone(), MatchKind::Equal))
                    } else if *x == neg {
                        Some((name.clone(), MatchKind::Negated))
                    } else {
                        None
                    }
                })
                .collect();
            ConstantMatch { row: k + 1, value: v.clone(), matches }
        })
        .collect()
}

/// Named exact quantities of a construction that may appear in the
/// published constants block.
pub fn named_constants(cons: &Construction) -> Result<Vec<(String, FE)>, FamilyError> {
    let mut out: Vec<(String, FE)> = Vec::new();
    out.push(("Â".into(), closing_ratio()?.clone()));
    out.push(("a14,13".into(), cons.a14_13.clone()));
    out.push(("a8,7".into(), cons.a87.clone()));
    out.push(("a6,5".into(), cons.a65.clone()));
    out.push(("c6".into(), cons.c6.clone()));
    for (n, v) in cons.gamma.named() {
        out.push((n.to_string(), v.clone()));
    }
    let k = c6_constants()?;
    for (n, v) in ["U", "U′", "U″", "V", "V′", "V″"].iter().zip(k.as_array()) {
        out.push((n.to_string(), v.clone()));
    }
    let simple = c6_simplified(k)?;
    out.push(("U₁".into(), simple.u1));
    out.push(("U₂".into(), simple.u2));
    let tab = &cons.tableau;
    let ren = renormalized_closing(tab, 6, 4);
    for i in 7..15 {
        for j in 6..i {
            if let Some(x) = &ren.a[i][j] {
                out.push((format!("A{},{}", i + 1, j + 1), x.clone()));
            }
            if !tab.a()[i][j].is_zero() {
                out.push((format!("a{},{}", i + 1, j + 1), tab.a()[i][j].clone()));
            }
        }
    }
    for (n, row) in ren.delta.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if let Some(x) = x {
                out.push((format!("Δ{},{}", n, j + 1), x.clone()));
            }
        }
    }
    for (j, x) in crate::tableau::d_n(tab, 1).iter().enumerate() {
        out.push((format!("d1,{}", j + 1), x.clone()));
    }
    Ok(out)
}
