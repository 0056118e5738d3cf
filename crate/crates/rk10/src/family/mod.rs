//! The seven-parameter family of explicit 15-stage methods of order 10,
//! built exactly over ℚ(α, β) on the six-point Lobatto quadrature.
//!
//! Stages 7–15 reuse the Lobatto nodes in the pattern
//! θ₄ θ₅ θ₂ θ₂ θ₃ θ₃ θ₄ θ₅ 1, so that each interior node carries a pair of
//! stages whose d₁ entries cancel. The opening stages take c₃ = ⅔c₄ and
//! a₅₂ = a₆₂ = 0, which makes column 3 vanish below row 6; the node c₆ is
//! then fixed by the last remaining order condition.

mod closure;
mod derive;
mod renormalized;
mod opening;

use std::sync::OnceLock;

use crate::field::FieldElement as FE;
use crate::tableau::{verify_order, ButcherTableau};

pub use closure::ClosureConstants;
pub use derive::{c6_constants, c6_of, c6_simplified, closing_ratio, C6Constants, SimplifiedC6};
pub use renormalized::{
    adjoint_defect, match_constants, named_constants, renormalized_closing, ConstantMatch, MatchKind,
    RenormalizedClosing,
};

use closure::{Closing, S};
use opening::Opening;

/// Why a family member could not be built.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{0}")]
    Singular(String),
    #[error("internal construction error: {0}")]
    Internal(String),
}

/// Six-point Lobatto quadrature on [0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LobattoQuadrature {
    /// Nodes θ₁ … θ₆ in increasing order.
    pub theta: [FE; 6],
    /// Weights w₁ … w₆.
    pub w: [FE; 6],
}

impl LobattoQuadrature {
    /// Node θ_k (1-based).
    pub fn node(&self, k: usize) -> &FE {
        &self.theta[k - 1]
    }

    /// Weight w_k (1-based).
    pub fn weight(&self, k: usize) -> &FE {
        &self.w[k - 1]
    }
}

/// The exact six-point Lobatto rule.
pub fn lobatto6() -> LobattoQuadrature {
    let half = FE::ratio(1, 2);
    let (a, b) = (FE::alpha(), FE::beta());
    let theta = [
        FE::zero(),
        &half - &(&a * &half),
        &half - &(&b * &half),
        &half + &(&b * &half),
        &half + &(&a * &half),
        FE::one(),
    ];
    let s7 = FE::sqrt7();
    let w_outer = FE::ratio(1, 30);
    let w_a = &(&FE::from_integer(14) - &s7) / &FE::from_integer(60);
    let w_b = &(&FE::from_integer(14) + &s7) / &FE::from_integer(60);
    let w = [w_outer.clone(), w_a.clone(), w_b.clone(), w_b, w_a, w_outer];
    LobattoQuadrature { theta, w }
}

/// The free parameters of the family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyParams {
    pub c2: FE,
    pub c4: FE,
    pub c5: FE,
    pub b10: FE,
    pub b12: FE,
    pub b13: FE,
    pub b14: FE,
}

impl FamilyParams {
    /// The low-magnitude reference choice: c₂ = 2/15, c₄ = 2/5, c₅ = 4/7,
    /// b₁₀ = 2w₂/7, b₁₂ = 2w₃/9, b₁₃ = w₄, b₁₄ = w₅.
    pub fn reference() -> FamilyParams {
        let l = lobatto6();
        FamilyParams {
            c2: FE::ratio(2, 15),
            c4: FE::ratio(2, 5),
            c5: FE::ratio(4, 7),
            b10: &l.w[1] * &FE::ratio(2, 7),
            b12: &l.w[2] * &FE::ratio(2, 9),
            b13: l.w[3].clone(),
            b14: l.w[4].clone(),
        }
    }

    /// Checks the parameter invariants that can be seen before solving.
    pub fn validate(&self) -> Result<(), FamilyError> {
        let bad = |m: &str| Err(FamilyError::InvalidParams(m.to_string()));
        if self.c2.is_zero() {
            return bad("c2 must be nonzero");
        }
        if self.c4.is_zero() || self.c5.is_zero() {
            return bad("c4 and c5 must be nonzero");
        }
        if self.c4 == self.c5 {
            return bad("c4 and c5 must be distinct");
        }
        if self.c5 == self.c3() {
            return bad("c5 must differ from c3 = 2c4/3");
        }
        if self.b10.is_zero() || self.b12.is_zero() {
            return bad("b10 and b12 must be nonzero");
        }
        if self.b14.is_zero() {
            return bad("b14 must be nonzero");
        }
        Ok(())
    }

    /// The derived node c₃ = ⅔c₄.
    pub fn c3(&self) -> FE {
        &self.c4 * &FE::ratio(2, 3)
    }

    /// Nodes and weights, 1-based (index 0 unused).
    pub(crate) fn layout(&self, c6: &FE) -> (Vec<FE>, Vec<FE>) {
        let l = lobatto6();
        let th = |k: usize| l.node(k).clone();
        let c = vec![
            FE::zero(),
            FE::zero(),
            self.c2.clone(),
            self.c3(),
            self.c4.clone(),
            self.c5.clone(),
            c6.clone(),
            th(4),
            th(5),
            th(2),
            th(2),
            th(3),
            th(3),
            th(4),
            th(5),
            FE::one(),
        ];
        let w = |k: usize| l.weight(k).clone();
        let mut b = vec![FE::zero(); S + 1];
        b[1] = w(1);
        b[7] = &w(4) - &self.b13;
        b[8] = &w(5) - &self.b14;
        b[9] = &w(2) - &self.b10;
        b[10] = self.b10.clone();
        b[11] = &w(3) - &self.b12;
        b[12] = self.b12.clone();
        b[13] = self.b13.clone();
        b[14] = self.b14.clone();
        b[15] = w(6);
        (c, b)
    }
}

/// A family member together with the intermediate quantities of its
/// construction.
#[derive(Debug, Clone)]
pub struct Construction {
    pub params: FamilyParams,
    pub tableau: ButcherTableau<FE>,
    pub c6: FE,
    /// a₁₄,₁₃, the root of the closing block.
    pub a14_13: FE,
    pub a87: FE,
    pub a65: FE,
    pub gamma: ClosureConstants,
}

/// Builds the tableau for the given parameters.
///
/// The result is checked against every order condition up to order 10 in
/// exact arithmetic before it is returned.
pub fn construct(params: &FamilyParams) -> Result<ButcherTableau<FE>, FamilyError> {
    construct_detailed(params).map(|c| c.tableau)
}

/// As [`construct`], keeping the intermediate quantities.
pub fn construct_detailed(params: &FamilyParams) -> Result<Construction, FamilyError> {
    let built = construct_unverified(params)?;
    let report = verify_order(&built.tableau, 10, None);
    if report.achieved_order < 10 {
        return Err(FamilyError::Internal(format!(
            "constructed tableau fails exact order-10 verification ({} conditions violated)",
            report.failures(crate::scalar::Tol(f64::NEG_INFINITY))
        )));
    }
    Ok(built)
}

/// Runs the construction pipeline without the final order-10 check.
pub fn construct_unverified(params: &FamilyParams) -> Result<Construction, FamilyError> {
    params.validate()?;
    let k = c6_constants()?;
    let c6 = c6_of(&params.c4, &params.c5, k)?;
    let (c, b) = params.layout(&c6);
    for (name, v) in [("0", FE::zero()), ("c3", params.c3()), ("c4", params.c4.clone()), ("c5", params.c5.clone())] {
        if c6 == v {
            return Err(FamilyError::InvalidParams(format!("derived c6 coincides with {name}")));
        }
    }
    let x = &(closing_ratio()? * &params.b13) / &params.b14;
    let closure = Closing::new(&c, &b).run(&x)?;
    let opening = Opening::new(&c, &b, &closure)?;
    let asm = opening.assemble()?;
    if !asm.c6_residual.is_zero() {
        return Err(FamilyError::Internal("closed-form c6 leaves d4·q3 ≠ 0".into()));
    }
    let a: Vec<Vec<FE>> = (1..=S).map(|i| (1..i).map(|j| asm.a[i][j].clone()).collect()).collect();
    let tableau = ButcherTableau::explicit(a, b[1..].to_vec(), c[1..].to_vec(), ())
        .map_err(|e| FamilyError::Internal(e.to_string()))?;
    Ok(Construction { params: params.clone(), tableau, c6, a14_13: x, a87: asm.a87, a65: asm.a65, gamma: closure.gamma })
}

/// The reference member (see [`FamilyParams::reference`]), built once.
pub fn reference_method() -> &'static Construction {
    static CELL: OnceLock<Construction> = OnceLock::new();
    CELL.get_or_init(|| construct_detailed(&FamilyParams::reference()).expect("reference parameters are valid"))
}
