//! The opening block (rows 2–6), columns 1–6 of rows 7–15, and the scalar
//! conditions that fix a₈₇, a₆₅ and c₆.
//!
//! Rows 7–15 satisfy q₁ = q₂ = q₃ = 0 through their entries in columns 4–6
//! (column 3 vanishes there because c₃ = ⅔c₄ and a₅₂ = a₆₂ = 0), and the
//! first column closes every row sum. Indices are 1-based.

use crate::field::FieldElement as FE;
use crate::linalg::solve;

use super::closure::{ClosureSolution, S};
use super::FamilyError;

/// A complete coefficient matrix with the three scalar unknowns it used.
#[derive(Clone)]
pub(crate) struct Assembled {
    pub a: Vec<Vec<FE>>,
    pub a87: FE,
    pub a65: FE,
    /// d₄·q₃, which vanishes exactly when c₆ is the right node.
    pub c6_residual: FE,
}

pub(crate) struct Opening<'a> {
    pub c: &'a [FE],
    pub b: &'a [FE],
    pub closure: &'a ClosureSolution,
    /// Inverse of [c_j^k] for k = 1..3, j = 4, 5, 6.
    vinv: Vec<Vec<FE>>,
}

fn singular(what: &str) -> FamilyError {
    FamilyError::Singular(what.to_string())
}

impl<'a> Opening<'a> {
    pub(crate) fn new(c: &'a [FE], b: &'a [FE], closure: &'a ClosureSolution) -> Result<Self, FamilyError> {
        let m: Vec<Vec<FE>> = (1..=3).map(|k| (4..=6).map(|j| c[j].pow(k)).collect()).collect();
        let mut cols = Vec::new();
        for e in 0..3 {
            let rhs: Vec<FE> = (0..3).map(|r| if r == e { FE::one() } else { FE::zero() }).collect();
            cols.push(solve(&m, &rhs).map_err(|_| {
                singular("solve for columns 4–6 of rows 7–15 is singular: nodes c4, c5, c6 must be distinct and nonzero")
            })?);
        }
        let vinv = (0..3).map(|r| (0..3).map(|e| cols[e][r].clone()).collect()).collect();
        Ok(Opening { c, b, closure, vinv })
    }

    fn rows_2_to_5(&self, a: &mut [Vec<FE>]) -> Result<(), FamilyError> {
        let c = self.c;
        let two = FE::from_integer(2);
        a[2][1] = c[2].clone();
        a[3][2] = &c[3].pow(2) / &(&two * &c[2]);
        a[3][1] = &c[3] - &a[3][2];
        a[4][3] = &c[4].pow(2) / &(&two * &c[3]);
        a[4][1] = &c[4] - &a[4][3];
        let m = vec![vec![c[3].clone(), c[4].clone()], vec![c[3].pow(2), c[4].pow(2)]];
        let rhs = vec![&c[5].pow(2) / &two, &c[5].pow(3) / &FE::from_integer(3)];
        let x = solve(&m, &rhs).map_err(|_| singular("row 5 opening solve is singular: c3 and c4 must differ"))?;
        a[5][3] = x[0].clone();
        a[5][4] = x[1].clone();
        a[5][1] = &(&c[5] - &a[5][3]) - &a[5][4];
        Ok(())
    }

    fn row_6(&self, a: &mut [Vec<FE>], a65: &FE) -> Result<(), FamilyError> {
        let c = self.c;
        a[6][5] = a65.clone();
        let m = vec![vec![c[3].clone(), c[4].clone()], vec![c[3].pow(2), c[4].pow(2)]];
        let rhs = vec![
            &(&c[6].pow(2) / &FE::from_integer(2)) - &(a65 * &c[5]),
            &(&c[6].pow(3) / &FE::from_integer(3)) - &(a65 * &c[5].pow(2)),
        ];
        let x = solve(&m, &rhs).map_err(|_| singular("row 6 opening solve is singular: c3 and c4 must differ"))?;
        a[6][3] = x[0].clone();
        a[6][4] = x[1].clone();
        a[6][1] = &(&(&c[6] - &a[6][3]) - &a[6][4]) - a65;
        Ok(())
    }

    /// Rows 7–15: closing columns (column 7 at the given a₈₇), then
    /// columns 4–6 from q₁ = q₂ = q₃ = 0, then the first column.
    fn rows_7_to_15(&self, a: &mut [Vec<FE>], a87: &FE) {
        let c = self.c;
        let cl = &self.closure.a;
        for i in 8..=S {
            for j in 7..i {
                a[i][j] = cl[i][j].clone();
            }
            let at_zero = &cl[i][7];
            a[i][7] = at_zero + &(a87 * &(&self.closure.col7_at_one[i] - at_zero));
        }
        for i in 7..=S {
            let rhs: Vec<FE> = (1..=3u32)
                .map(|k| {
                    let target = &c[i].pow(k + 1) / &FE::from_integer(k as i64 + 1);
                    (7..i).fold(target, |acc, j| {
                        if a[i][j].is_zero() {
                            acc
                        } else {
                            &acc - &(&a[i][j] * &c[j].pow(k))
                        }
                    })
                })
                .collect();
            for (t, j) in (4..=6).enumerate() {
                a[i][j] = (0..3).fold(FE::zero(), |acc, e| &acc + &(&self.vinv[t][e] * &rhs[e]));
            }
            let rest = (2..i).fold(FE::zero(), |acc, j| &acc + &a[i][j]);
            a[i][1] = &c[i] - &rest;
        }
    }

    /// Row vector d_n (1-based).
    pub(crate) fn d_row(&self, a: &[Vec<FE>], n: u32) -> Vec<FE> {
        let (b, c) = (self.b, self.c);
        let k = FE::ratio(1, n as i64 + 1);
        (0..=S)
            .map(|j| {
                if j == 0 {
                    return FE::zero();
                }
                let sum = (j + 1..=S).fold(FE::zero(), |acc, i| {
                    if b[i].is_zero() || a[i][j].is_zero() {
                        acc
                    } else {
                        &acc + &(&(&b[i] * &c[i].pow(n)) * &a[i][j])
                    }
                });
                &sum - &(&(&b[j] * &(&FE::one() - &c[j].pow(n + 1))) * &k)
            })
            .collect()
    }

    fn dot(x: &[FE], y: &[FE]) -> FE {
        x.iter().zip(y).fold(FE::zero(), |acc, (p, q)| if p.is_zero() || q.is_zero() { acc } else { &acc + &(p * q) })
    }

    fn with_a87(&self, a87: &FE) -> Result<Vec<Vec<FE>>, FamilyError> {
        let mut a = vec![vec![FE::zero(); S + 1]; S + 1];
        self.rows_2_to_5(&mut a)?;
        self.rows_7_to_15(&mut a, a87);
        Ok(a)
    }

    /// Fixes a₈₇ from d₄·c⁴ = 0 and a₆₅ from d₄·A·a_{*2} = 0 (both affine),
    /// and reports d₄·q₃.
    pub(crate) fn assemble(&self) -> Result<Assembled, FamilyError> {
        let c4pow: Vec<FE> = self.c.iter().map(|x| x.pow(4)).collect();
        let f = |y: &FE| -> Result<FE, FamilyError> {
            let a = self.with_a87(y)?;
            Ok(Self::dot(&self.d_row(&a, 4), &c4pow))
        };
        let f0 = f(&FE::zero())?;
        let f1 = f(&FE::one())?;
        let slope = &f1 - &f0;
        if slope.is_zero() {
            return Err(singular("condition d4·c⁴ = 0 does not determine a87"));
        }
        let a87 = -&(&f0 / &slope);
        let mut a = self.with_a87(&a87)?;
        let d4 = self.d_row(&a, 4);

        // d₄·A·a_{*2} = a₃₂ Σ_{j=4..6} d₄,ⱼ a_j3; only a₆₃ depends on a₆₅.
        let g = |a: &mut Vec<Vec<FE>>, a65: &FE| -> Result<FE, FamilyError> {
            self.row_6(a, a65)?;
            Ok((4..=6).fold(FE::zero(), |acc, j| &acc + &(&d4[j] * &a[j][3])))
        };
        let g0 = g(&mut a, &FE::zero())?;
        let g1 = g(&mut a, &FE::one())?;
        let slope = &g1 - &g0;
        if slope.is_zero() {
            return Err(singular("condition d4·A·a*2 = 0 does not determine a65"));
        }
        let a65 = -&(&g0 / &slope);
        self.row_6(&mut a, &a65)?;

        let q3: Vec<FE> = (0..=S)
            .map(|i| {
                if i == 0 {
                    return FE::zero();
                }
                let s = (1..i).fold(FE::zero(), |acc, j| &acc + &(&a[i][j] * &self.c[j].pow(3)));
                &s - &(&self.c[i].pow(4) / &FE::from_integer(4))
            })
            .collect();
        let c6_residual = Self::dot(&d4, &q3);
        Ok(Assembled { a, a87, a65, c6_residual })
    }
}
