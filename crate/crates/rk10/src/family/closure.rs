//! The closing block: columns 7–14 of rows 8–15, solved column by column
//! from the right together with the fifteen γ constants.
//!
//! Every equation is affine in the column being solved:
//!
//! * d₀ = 0;
//! * d₁ cancels within each node cluster: d₁,ⱼ + d₁,ⱼ′ = 0;
//! * d₂ = (γ₂₀ + γ₂₁c)d₁ and (d₁A) = (γ_a0 + γ_a1c)d₁;
//! * d₃ = (γ₃₀ + γ₃₁c + γ₃₂c²)d₁ and ((d₁.c)A) = (γ_c0 + γ_c1c + γ_c2c²)d₁;
//! * d₄ = (γ₄₀ + γ₄₁c + γ₄₂c² + γ₄₃c³)d₁ + γ_4c((d₁.c²)A),
//!
//! all multiplications element-wise over the columns. Stage indices are
//! 1-based here to match the tableau layout.

use crate::field::FieldElement as FE;
use crate::linalg::solve;

use super::FamilyError;

pub(crate) const S: usize = 15;

/// The fifteen closure constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureConstants {
    pub gamma20: FE,
    pub gamma21: FE,
    pub gamma_a0: FE,
    pub gamma_a1: FE,
    pub gamma30: FE,
    pub gamma31: FE,
    pub gamma32: FE,
    pub gamma_c0: FE,
    pub gamma_c1: FE,
    pub gamma_c2: FE,
    pub gamma40: FE,
    pub gamma41: FE,
    pub gamma42: FE,
    pub gamma43: FE,
    pub gamma4c: FE,
}

impl ClosureConstants {
    /// (name, value) pairs in the conventional print order.
    pub fn named(&self) -> Vec<(&'static str, &FE)> {
        vec![
            ("γ20", &self.gamma20),
            ("γ21", &self.gamma21),
            ("γa0", &self.gamma_a0),
            ("γa1", &self.gamma_a1),
            ("γ30", &self.gamma30),
            ("γ31", &self.gamma31),
            ("γ32", &self.gamma32),
            ("γc0", &self.gamma_c0),
            ("γc1", &self.gamma_c1),
            ("γc2", &self.gamma_c2),
            ("γ40", &self.gamma40),
            ("γ41", &self.gamma41),
            ("γ42", &self.gamma42),
            ("γ43", &self.gamma43),
            ("γ4c", &self.gamma4c),
        ]
    }
}

/// Affine form Σ_i coef[i]·a_ij + cst in column j (coef indexed by row).
#[derive(Clone)]
struct Form {
    coef: Vec<FE>,
    cst: FE,
}

impl Form {
    fn zero() -> Form {
        Form { coef: vec![FE::zero(); S + 1], cst: FE::zero() }
    }

    fn minus_scaled(&self, k: &FE, o: &Form) -> Form {
        if k.is_zero() {
            return self.clone();
        }
        Form {
            coef: self.coef.iter().zip(&o.coef).map(|(x, y)| if y.is_zero() { x.clone() } else { x - &(k * y) }).collect(),
            cst: &self.cst - &(k * &o.cst),
        }
    }
}

/// Working state for the closing solve.
pub(crate) struct Closing<'a> {
    c: &'a [FE],
    b: &'a [FE],
    /// c_i^n for n ≤ 5.
    cp: Vec<Vec<FE>>,
    pub(crate) a: Vec<Vec<FE>>,
    /// d₁,ⱼ for already solved columns.
    d1: Vec<FE>,
    gamma: Vec<FE>,
}

/// Result of the closing solve.
#[derive(Clone)]
pub(crate) struct ClosureSolution {
    /// 16×16 (1-based) with columns 8–14 final and column 7 at a₈₇ = 0.
    pub a: Vec<Vec<FE>>,
    /// Column 7 at a₈₇ = 1 (rows 8–15).
    pub col7_at_one: Vec<FE>,
    pub gamma: ClosureConstants,
}

impl<'a> Closing<'a> {
    pub(crate) fn new(c: &'a [FE], b: &'a [FE]) -> Self {
        let cp = c.iter().map(|x| (0..=5).map(|n| x.pow(n)).collect()).collect();
        Closing { c, b, cp, a: vec![vec![FE::zero(); S + 1]; S + 1], d1: vec![FE::zero(); S + 1], gamma: Vec::new() }
    }

    /// d_n,ⱼ as a form in column j.
    fn d_form(&self, n: usize, j: usize) -> Form {
        let mut f = Form::zero();
        for i in j + 1..=S {
            f.coef[i] = &self.b[i] * &self.cp[i][n];
        }
        let k = FE::ratio(1, n as i64 + 1);
        f.cst = -(&(&self.b[j] * &(&FE::one() - &self.cp[j][n + 1])) * &k);
        f
    }

    /// ((d₁.cᵖ)A)ⱼ as a form in column j (needs d₁ of later columns).
    fn dca_form(&self, p: usize, j: usize) -> Form {
        let mut f = Form::zero();
        for i in j + 1..=S {
            f.coef[i] = &self.d1[i] * &self.cp[i][p];
        }
        f
    }

    fn eval(&self, f: &Form, j: usize) -> FE {
        let mut v = f.cst.clone();
        for i in j + 1..=S {
            if !f.coef[i].is_zero() && !self.a[i][j].is_zero() {
                v = &v + &(&f.coef[i] * &self.a[i][j]);
            }
        }
        v
    }

    fn poly_c(&self, j: usize, ks: &[FE]) -> FE {
        ks.iter().enumerate().fold(FE::zero(), |acc, (n, k)| &acc + &(k * &self.cp[j][n]))
    }

    fn e0(&self, j: usize) -> Form {
        self.d_form(0, j)
    }

    fn e1(&self, j: usize, partner: usize) -> Form {
        let mut f = self.d_form(1, j);
        f.cst = &f.cst + &self.d1[partner];
        f
    }

    fn e2(&self, j: usize) -> Form {
        self.d_form(2, j).minus_scaled(&self.poly_c(j, &self.gamma[0..2]), &self.d_form(1, j))
    }

    fn e3(&self, j: usize) -> Form {
        self.dca_form(0, j).minus_scaled(&self.poly_c(j, &self.gamma[2..4]), &self.d_form(1, j))
    }

    fn e4(&self, j: usize) -> Form {
        self.d_form(3, j).minus_scaled(&self.poly_c(j, &self.gamma[4..7]), &self.d_form(1, j))
    }

    fn e5(&self, j: usize) -> Form {
        self.dca_form(1, j).minus_scaled(&self.poly_c(j, &self.gamma[7..10]), &self.d_form(1, j))
    }

    fn e6(&self, j: usize) -> Form {
        self.d_form(4, j)
            .minus_scaled(&self.poly_c(j, &self.gamma[10..14]), &self.d_form(1, j))
            .minus_scaled(&self.gamma[14], &self.dca_form(2, j))
    }

    /// Solves column j from `forms`, with some entries fixed beforehand.
    fn solve_col(&mut self, j: usize, forms: &[Form], fixed: &[(usize, FE)]) -> Result<(), FamilyError> {
        for (i, v) in fixed {
            self.a[*i][j] = v.clone();
        }
        let unknowns: Vec<usize> = (j + 1..=S).filter(|i| !fixed.iter().any(|(k, _)| k == i)).collect();
        assert_eq!(unknowns.len(), forms.len(), "column {j}: equation count");
        let m: Vec<Vec<FE>> = forms.iter().map(|f| unknowns.iter().map(|&i| f.coef[i].clone()).collect()).collect();
        let rhs: Vec<FE> = forms
            .iter()
            .map(|f| {
                let fixed_part = fixed.iter().fold(f.cst.clone(), |acc, (i, v)| &acc + &(&f.coef[*i] * v));
                -fixed_part
            })
            .collect();
        let x = solve(&m, &rhs).map_err(|_| {
            FamilyError::Singular(format!("closing-block solve for column {j} is singular"))
        })?;
        for (k, &i) in unknowns.iter().enumerate() {
            self.a[i][j] = x[k].clone();
        }
        self.d1[j] = self.eval(&self.d_form(1, j), j);
        Ok(())
    }

    /// Fits γ's from `rows` of (coefficients, right-hand side).
    fn fit(&mut self, rows: Vec<(Vec<FE>, FE)>, what: &str) -> Result<Vec<FE>, FamilyError> {
        let (m, rhs): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        solve(&m, &rhs).map_err(|_| FamilyError::Singular(format!("closure constants {what}: singular system")))
    }

    fn d_val(&self, n: usize, j: usize) -> FE {
        self.eval(&self.d_form(n, j), j)
    }

    fn dca_val(&self, p: usize, j: usize) -> FE {
        self.eval(&self.dca_form(p, j), j)
    }

    /// Runs columns 14 down to 11 with a₁₄,₁₃ = x and returns the two
    /// residuals at column 11 that must vanish for the d₃ and (d₁.c)A
    /// relations: these determine x.
    pub(crate) fn run_to_col11(&mut self, x: &FE) -> Result<(FE, FE), FamilyError> {
        self.solve_col(14, &[self.e0(14)], &[])?;
        self.solve_col(13, &[self.e0(13)], &[(14, x.clone())])?;

        let (d13, d14) = (self.d1[13].clone(), self.d1[14].clone());
        let lin = |d: &FE, j: usize, this: &Self| vec![d.clone(), &this.c[j] * d];
        let g2 = self.fit(
            vec![(lin(&d13, 13, self), self.d_val(2, 13)), (lin(&d14, 14, self), self.d_val(2, 14))],
            "γ20, γ21",
        )?;
        let ga = self.fit(
            vec![(lin(&d13, 13, self), self.dca_val(0, 13)), (lin(&d14, 14, self), self.dca_val(0, 14))],
            "γa0, γa1",
        )?;
        self.gamma = [g2, ga].concat();

        self.solve_col(12, &[self.e0(12), self.e2(12), self.e3(12)], &[])?;
        let quad = |j: usize, this: &Self| {
            let d = &this.d1[j];
            vec![d.clone(), &this.c[j] * d, &this.cp[j][2] * d]
        };
        let rows3: Vec<_> = [12, 13, 14].iter().map(|&j| (quad(j, self), self.d_val(3, j))).collect();
        let g3 = self.fit(rows3, "γ30, γ31, γ32")?;
        let rowsc: Vec<_> = [12, 13, 14].iter().map(|&j| (quad(j, self), self.dca_val(1, j))).collect();
        let gc = self.fit(rowsc, "γc0, γc1, γc2")?;
        self.gamma.extend(g3);
        self.gamma.extend(gc);

        self.solve_col(11, &[self.e0(11), self.e1(11, 12), self.e2(11), self.e3(11)], &[])?;
        Ok((self.eval(&self.e4(11), 11), self.eval(&self.e5(11), 11)))
    }

    /// Full closing solve. Fails if the column-11 residuals do not vanish
    /// (x is not the closing root) or the redundant d₄ relation at column 9
    /// does not hold.
    pub(crate) fn run(mut self, x: &FE) -> Result<ClosureSolution, FamilyError> {
        let (r4, r5) = self.run_to_col11(x)?;
        if !r4.is_zero() || !r5.is_zero() {
            return Err(FamilyError::Internal(
                "closing block: d₃ and (d₁.c)A relations fail at column 11 for the given a₁₄,₁₃".into(),
            ));
        }
        self.solve_col(10, &[self.e0(10), self.e2(10), self.e3(10), self.e4(10), self.e5(10)], &[])?;

        let rows4: Vec<_> = (10..=14)
            .map(|j| {
                let d = &self.d1[j];
                let row = vec![d.clone(), &self.c[j] * d, &self.cp[j][2] * d, &self.cp[j][3] * d, self.dca_val(2, j)];
                (row, self.d_val(4, j))
            })
            .collect();
        let g4 = self.fit(rows4, "γ40 … γ4c")?;
        self.gamma.extend(g4);

        let forms9 = [self.e0(9), self.e1(9, 10), self.e2(9), self.e3(9), self.e4(9), self.e5(9)];
        self.solve_col(9, &forms9, &[])?;
        if !self.eval(&self.e6(9), 9).is_zero() {
            return Err(FamilyError::Internal("closing block: d₄ relation fails at column 9".into()));
        }
        let forms8 = [self.e0(8), self.e1(8, 14), self.e2(8), self.e3(8), self.e4(8), self.e5(8), self.e6(8)];
        self.solve_col(8, &forms8, &[])?;

        let forms7 = [self.e0(7), self.e1(7, 13), self.e2(7), self.e3(7), self.e4(7), self.e5(7), self.e6(7)];
        self.solve_col(7, &forms7, &[(8, FE::one())])?;
        let col7_at_one: Vec<FE> = (0..=S).map(|i| self.a[i][7].clone()).collect();
        self.solve_col(7, &forms7, &[(8, FE::zero())])?;

        let g = &self.gamma;
        let gamma = ClosureConstants {
            gamma20: g[0].clone(),
            gamma21: g[1].clone(),
            gamma_a0: g[2].clone(),
            gamma_a1: g[3].clone(),
            gamma30: g[4].clone(),
            gamma31: g[5].clone(),
            gamma32: g[6].clone(),
            gamma_c0: g[7].clone(),
            gamma_c1: g[8].clone(),
            gamma_c2: g[9].clone(),
            gamma40: g[10].clone(),
            gamma41: g[11].clone(),
            gamma42: g[12].clone(),
            gamma43: g[13].clone(),
            gamma4c: g[14].clone(),
        };
        Ok(ClosureSolution { a: self.a, col7_at_one, gamma })
    }
}
