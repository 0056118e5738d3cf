//! Butcher tableaus: derivative weights Φ(t), order verification, the Q/D
//! condition vectors and the B/C/D simplifying properties.
//!
//! Stage-level and cluster-level diagnostics live in [`structure`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use rayon::prelude::*;

use crate::field::{FieldElement, Real};
use crate::scalar::{magnitude, Scalar, Tol};
use crate::trees::{shared_forest, Forest, RootedTree, TreeCombination};

pub mod known;
pub mod structure;

pub use structure::{
    cluster_analysis, filtration, stage_orders, Cluster, ClusterReport, FiltrationFamily, StageOrders,
    SubspaceBasis,
};

/// Malformed tableau input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableauError {
    #[error("tableau has no stages")]
    Empty,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("explicit stepping requires strictly lower-triangular A")]
    NotExplicit,
}

/// Runge–Kutta method (A, b, c) with entries of one scalar type.
///
/// Immutable after construction. The row-sum condition Σ_j a_ij = c_i is
/// recorded as a flag rather than enforced.
#[derive(Clone)]
pub struct ButcherTableau<S: Scalar> {
    a: Vec<Vec<S>>,
    b: Vec<S>,
    c: Vec<S>,
    ctx: S::Ctx,
    row_sum: bool,
    explicit: bool,
}

impl<S: Scalar> ButcherTableau<S> {
    /// Builds a tableau from a full s×s matrix, weights and nodes.
    pub fn new(a: Vec<Vec<S>>, b: Vec<S>, c: Vec<S>, ctx: S::Ctx) -> Result<Self, TableauError> {
        let s = b.len();
        if s == 0 {
            return Err(TableauError::Empty);
        }
        if c.len() != s || a.len() != s || a.iter().any(|r| r.len() != s) {
            return Err(TableauError::Dimension(format!(
                "expected {s} nodes and a {s}×{s} matrix, got {} nodes and {} rows",
                c.len(),
                a.len()
            )));
        }
        let tol = Tol::default_for::<S>(&ctx);
        let explicit = (0..s).all(|i| (i..s).all(|j| a[i][j].is_negligible(tol)));
        let row_sum = (0..s).all(|i| {
            let sum = a[i].iter().fold(S::zero(&ctx), |acc, x| acc.add(x));
            sum.approx_eq(&c[i], tol)
        });
        Ok(ButcherTableau { a, b, c, ctx, row_sum, explicit })
    }

    /// Builds an explicit tableau from its strict lower triangle given row by
    /// row (row i has i entries, i = 0..s).
    pub fn explicit(lower: Vec<Vec<S>>, b: Vec<S>, c: Vec<S>, ctx: S::Ctx) -> Result<Self, TableauError> {
        let s = b.len();
        if lower.len() != s || lower.iter().enumerate().any(|(i, r)| r.len() != i) {
            return Err(TableauError::Dimension(format!("expected {s} lower-triangular rows of lengths 0..{s}")));
        }
        let a = lower
            .into_iter()
            .map(|mut r| {
                r.resize(s, S::zero(&ctx));
                r
            })
            .collect();
        Self::new(a, b, c, ctx)
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &[Vec<S>] {
        &self.a
    }

    pub fn b(&self) -> &[S] {
        &self.b
    }

    pub fn c(&self) -> &[S] {
        &self.c
    }

    pub fn ctx(&self) -> &S::Ctx {
        &self.ctx
    }

    /// Whether a_ij = 0 for all j ≥ i.
    pub fn is_explicit(&self) -> bool {
        self.explicit
    }

    /// Whether Σ_j a_ij = c_i for every stage.
    pub fn row_sum_holds(&self) -> bool {
        self.row_sum
    }

    /// Default zero tolerance: exact zero for exact scalars, 10^(−digits+10)
    /// for numeric ones.
    pub fn tol(&self) -> Tol {
        Tol::default_for::<S>(&self.ctx)
    }

    /// Whether two nodes coincide (exactly, or within [`Self::tol`]).
    pub fn nodes_equal(&self, i: usize, j: usize) -> bool {
        self.c[i].approx_eq(&self.c[j], self.tol())
    }

    /// Converts every entry with `f`.
    pub fn map_entries<T: Scalar>(&self, ctx: T::Ctx, f: impl Fn(&S) -> T) -> ButcherTableau<T> {
        let a = self.a.iter().map(|r| r.iter().map(&f).collect()).collect();
        let b = self.b.iter().map(&f).collect();
        let c = self.c.iter().map(&f).collect();
        ButcherTableau::new(a, b, c, ctx).expect("shape preserved")
    }

    /// High-precision numeric copy with `prec` bits.
    pub fn to_real(&self, prec: u32) -> ButcherTableau<Real> {
        self.map_entries(prec, |x| x.to_real(prec))
    }

    /// A·v.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.a.iter().map(|row| dot(row, v, &self.ctx)).collect()
    }

    /// w·A (row vector times matrix).
    pub fn apply_left(&self, w: &[S]) -> Vec<S> {
        let s = self.stages();
        (0..s)
            .map(|j| {
                (0..s).fold(S::zero(&self.ctx), |acc, i| {
                    if w[i].is_zero() || self.a[i][j].is_zero() {
                        acc
                    } else {
                        acc.add(&w[i].mul(&self.a[i][j]))
                    }
                })
            })
            .collect()
    }

    /// Element-wise power c^n.
    pub fn c_pow(&self, n: u32) -> Vec<S> {
        self.c.iter().map(|x| x.pow(n)).collect()
    }

    fn rational(&self, r: &BigRational) -> S {
        S::from_rational(r, &self.ctx)
    }

    fn inv_density(&self, t: &RootedTree) -> S {
        self.rational(&BigRational::new(1.into(), t.density().into()))
    }
}

impl ButcherTableau<BigRational> {
    /// Lifts a rational tableau into ℚ(α, β).
    pub fn to_field(&self) -> ButcherTableau<FieldElement> {
        self.map_entries((), FieldElement::from_rational)
    }
}

impl<S: Scalar> PartialEq for ButcherTableau<S> {
    /// Entry-wise equality (exact, or within the default tolerance).
    fn eq(&self, o: &Self) -> bool {
        let tol = self.tol();
        let eqv = |x: &[S], y: &[S]| x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p.approx_eq(q, tol));
        eqv(&self.b, &o.b) && eqv(&self.c, &o.c) && self.a.len() == o.a.len() && self.a.iter().zip(&o.a).all(|(r, q)| eqv(r, q))
    }
}

impl<S: Scalar> fmt::Debug for ButcherTableau<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ButcherTableau(s = {})", self.stages())?;
        for i in 0..self.stages() {
            let row: Vec<String> = self.a[i].iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {} | {}", self.c[i], row.join("  "))?;
        }
        let b: Vec<String> = self.b.iter().map(|x| x.to_string()).collect();
        write!(f, "    | {}", b.join("  "))
    }
}

pub(crate) fn dot<S: Scalar>(x: &[S], y: &[S], ctx: &S::Ctx) -> S {
    x.iter().zip(y).fold(S::zero(ctx), |acc, (p, q)| {
        if p.is_zero() || q.is_zero() {
            acc
        } else {
            acc.add(&p.mul(q))
        }
    })
}

pub(crate) fn hadamard<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(p, q)| p.mul(q)).collect()
}

pub(crate) fn axpy<S: Scalar>(y: &[S], a: &S, x: &[S]) -> Vec<S> {
    y.iter().zip(x).map(|(p, q)| p.add(&a.mul(q))).collect()
}

/// Φ(t) computed directly by the recursion Φ([t₁…tₙ]) = Π AΦ(t_m), memoized
/// within the call.
pub fn phi<S: Scalar>(tab: &ButcherTableau<S>, t: &RootedTree) -> Vec<S> {
    fn go<S: Scalar>(tab: &ButcherTableau<S>, t: &RootedTree, memo: &mut HashMap<RootedTree, Vec<S>>) -> Vec<S> {
        if let Some(v) = memo.get(t) {
            return v.clone();
        }
        let mut v = vec![S::one(&tab.ctx); tab.stages()];
        for child in t.children() {
            let a_phi = tab.apply(&go(tab, child, memo));
            v = hadamard(&v, &a_phi);
        }
        memo.insert(t.clone(), v.clone());
        v
    }
    go(tab, t, &mut HashMap::new())
}

/// Elementary weight bΦ(t).
pub fn elementary_weight<S: Scalar>(tab: &ButcherTableau<S>, t: &RootedTree) -> S {
    dot(&tab.b, &phi(tab, t), &tab.ctx)
}

/// Φ extended linearly to tree combinations.
pub fn phi_combination<S: Scalar>(tab: &ButcherTableau<S>, ts: &TreeCombination) -> Vec<S> {
    let mut out = vec![S::zero(&tab.ctx); tab.stages()];
    for (t, k) in ts.iter() {
        out = axpy(&out, &tab.rational(k), &phi(tab, t));
    }
    out
}

/// Φ(t) and AΦ(t) for every tree up to a given order, computed level by
/// level in parallel from the decomposition t = t′·[u].
pub struct PhiTable<S: Scalar> {
    forest: Arc<Forest>,
    max_order: usize,
    phi: Vec<Vec<S>>,
    a_phi: Vec<Vec<S>>,
}

impl<S: Scalar> PhiTable<S> {
    pub fn new(tab: &ButcherTableau<S>, max_order: usize) -> PhiTable<S> {
        let forest = shared_forest(max_order.max(1));
        let n = forest.up_to(max_order).len();
        let mut phi: Vec<Vec<S>> = Vec::with_capacity(n);
        let mut a_phi: Vec<Vec<S>> = Vec::with_capacity(n);
        let ones = vec![S::one(&tab.ctx); tab.stages()];
        a_phi.push(tab.apply(&ones));
        phi.push(ones);
        for order in 2..=max_order {
            let level: Vec<(Vec<S>, Vec<S>)> = forest
                .order_range(order)
                .into_par_iter()
                .map(|i| {
                    let (stem, last) = forest.split(i).expect("non-leaf");
                    let p = hadamard(&phi[stem], &a_phi[last]);
                    let ap = tab.apply(&p);
                    (p, ap)
                })
                .collect();
            for (p, ap) in level {
                phi.push(p);
                a_phi.push(ap);
            }
        }
        PhiTable { forest, max_order, phi, a_phi }
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of tabulated trees.
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn phi(&self, i: usize) -> &[S] {
        &self.phi[i]
    }

    pub fn a_phi(&self, i: usize) -> &[S] {
        &self.a_phi[i]
    }

    /// Q(t) = AΦ(t) − c^{|t|}/t! for tree index `i`.
    pub fn q(&self, tab: &ButcherTableau<S>, i: usize) -> Vec<S> {
        let t = self.forest.tree(i);
        let k = tab.inv_density(t);
        let n = t.order() as u32;
        self.a_phi[i].iter().zip(&tab.c).map(|(x, c)| x.sub(&c.pow(n).mul(&k))).collect()
    }

    /// D(t) = (b.Φ(t)ᵀ)A − b.(1 − c^{|t|})ᵀ/t! for tree index `i`.
    pub fn d(&self, tab: &ButcherTableau<S>, i: usize) -> Vec<S> {
        let t = self.forest.tree(i);
        d_from_phi(tab, t, &self.phi[i])
    }
}

fn d_from_phi<S: Scalar>(tab: &ButcherTableau<S>, t: &RootedTree, phi: &[S]) -> Vec<S> {
    let k = tab.inv_density(t);
    let n = t.order() as u32;
    let one = S::one(&tab.ctx);
    let w = hadamard(&tab.b, phi);
    tab.apply_left(&w)
        .into_iter()
        .zip(tab.b.iter().zip(&tab.c))
        .map(|(x, (b, c))| x.sub(&b.mul(&one.sub(&c.pow(n))).mul(&k)))
        .collect()
}

/// Outcome of checking bΦ(t) = 1/t! for all trees up to an order.
#[derive(Clone)]
pub struct VerificationReport<S: Scalar> {
    pub order_checked: usize,
    /// (tree, bΦ(t) − 1/t!) sorted by |residual| descending, ties in
    /// canonical tree order.
    pub residuals: Vec<(RootedTree, S)>,
    /// log10 of the largest |residual| (`None` when all vanish exactly).
    pub max_abs_log10: Option<f64>,
    /// Largest p ≤ `order_checked` with all residuals for |t| ≤ p negligible.
    pub achieved_order: usize,
}

impl<S: Scalar> VerificationReport<S> {
    /// Number of residuals that are not negligible.
    pub fn failures(&self, tol: Tol) -> usize {
        self.residuals.iter().filter(|(_, r)| !r.is_negligible(tol)).count()
    }

    /// Whether every residual is exactly zero.
    pub fn all_exactly_zero(&self) -> bool {
        self.residuals.iter().all(|(_, r)| r.is_zero())
    }
}

/// Checks all order conditions with |t| ≤ p. `tol` defaults to the
/// tableau's tolerance and is ignored for exact scalars.
pub fn verify_order<S: Scalar>(tab: &ButcherTableau<S>, p: usize, tol: Option<Tol>) -> VerificationReport<S> {
    assert!(p >= 1, "order must be at least 1");
    let tol = tol.unwrap_or_else(|| tab.tol());
    let table = PhiTable::new(tab, p);
    verify_with_table(tab, &table, p, tol)
}

/// [`verify_order`] reusing a precomputed table (which must cover order p).
pub fn verify_with_table<S: Scalar>(
    tab: &ButcherTableau<S>,
    table: &PhiTable<S>,
    p: usize,
    tol: Tol,
) -> VerificationReport<S> {
    assert!(table.max_order() >= p);
    let forest = table.forest();
    let mut rows: Vec<(usize, S, f64)> = forest
        .up_to(p)
        .into_par_iter()
        .map(|i| {
            let t = forest.tree(i);
            let r = dot(&tab.b, table.phi(i), &tab.ctx).sub(&tab.inv_density(t));
            let m = magnitude(&r);
            (i, r, m)
        })
        .collect();
    let first_bad = rows
        .iter()
        .filter(|(_, r, _)| !r.is_negligible(tol))
        .map(|(i, _, _)| forest.tree(*i).order())
        .min();
    let achieved_order = first_bad.map_or(p, |o| o - 1);
    rows.sort_by(|x, y| y.2.total_cmp(&x.2).then(x.0.cmp(&y.0)));
    let max_abs_log10 = rows.first().map(|r| r.2).filter(|m| m.is_finite());
    VerificationReport {
        order_checked: p,
        residuals: rows.into_iter().map(|(i, r, _)| (forest.tree(i).clone(), r)).collect(),
        max_abs_log10,
        achieved_order,
    }
}

/// Which condition a [`ConditionVector`] stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// Column vector Q(t) = AΦ(t) − c^{|t|}/t!.
    QColumn,
    /// Row vector D(t) = (b.Φ(t)ᵀ)A − b.(1 − c^{|t|})ᵀ/t!.
    DRow,
}

/// A Q- or D-type condition vector for one tree.
#[derive(Debug, Clone)]
pub struct ConditionVector<S: Scalar> {
    pub kind: ConditionKind,
    pub tree: RootedTree,
    pub values: Vec<S>,
}

/// Q(t) = AΦ(t) − c^{|t|}/t!.
pub fn q_vector<S: Scalar>(tab: &ButcherTableau<S>, t: &RootedTree) -> ConditionVector<S> {
    let a_phi = tab.apply(&phi(tab, t));
    let k = tab.inv_density(t);
    let n = t.order() as u32;
    let values = a_phi.iter().zip(&tab.c).map(|(x, c)| x.sub(&c.pow(n).mul(&k))).collect();
    ConditionVector { kind: ConditionKind::QColumn, tree: t.clone(), values }
}

/// D(t) = (b.Φ(t)ᵀ)A − b.(1 − c^{|t|})ᵀ/t!.
pub fn d_vector<S: Scalar>(tab: &ButcherTableau<S>, t: &RootedTree) -> ConditionVector<S> {
    let values = d_from_phi(tab, t, &phi(tab, t));
    ConditionVector { kind: ConditionKind::DRow, tree: t.clone(), values }
}

/// Q extended linearly to tree combinations.
pub fn q_combination<S: Scalar>(tab: &ButcherTableau<S>, ts: &TreeCombination) -> Vec<S> {
    let mut out = vec![S::zero(&tab.ctx); tab.stages()];
    for (t, k) in ts.iter() {
        out = axpy(&out, &tab.rational(k), &q_vector(tab, t).values);
    }
    out
}

/// Subquadrature vector q_n = Acⁿ − c^{n+1}/(n+1).
pub fn q_n<S: Scalar>(tab: &ButcherTableau<S>, n: u32) -> Vec<S> {
    let k = tab.rational(&BigRational::new(1.into(), (n + 1).into()));
    let ac = tab.apply(&tab.c_pow(n));
    ac.iter().zip(&tab.c).map(|(x, c)| x.sub(&c.pow(n + 1).mul(&k))).collect()
}

/// Row vector d_n = (b.cⁿ)A − b.(1 − c^{n+1})/(n+1).
pub fn d_n<S: Scalar>(tab: &ButcherTableau<S>, n: u32) -> Vec<S> {
    d_from_phi(tab, &RootedTree::bushy(n as usize + 1), &tab.c_pow(n))
}

/// How far a simplifying property or stage order holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Holds for exactly this value and fails at the next.
    Finite(usize),
    /// Holds for every value checked, up to this cap.
    AtLeast(usize),
    /// Holds for every value by structure (e.g. a zero row with zero node).
    Infinite,
}

impl Level {
    /// Whether the level is at least `n`.
    pub fn at_least(self, n: usize) -> bool {
        match self {
            Level::Finite(k) | Level::AtLeast(k) => k >= n,
            Level::Infinite => true,
        }
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<usize> {
        match self {
            Level::Finite(k) => Some(k),
            _ => None,
        }
    }

    /// Lower bound on the level.
    pub fn lower_bound(self) -> usize {
        match self {
            Level::Finite(k) | Level::AtLeast(k) => k,
            Level::Infinite => usize::MAX,
        }
    }

    pub(crate) fn from_count(holds: usize, cap: usize) -> Level {
        if holds >= cap {
            Level::AtLeast(cap)
        } else {
            Level::Finite(holds)
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(k) => write!(f, "{k}"),
            Level::AtLeast(k) => write!(f, "≥{k}"),
            Level::Infinite => f.write_str("∞"),
        }
    }
}

/// Largest n for which B(n), C(n) and D(n) hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bcd {
    pub b: Level,
    pub c: Level,
    pub d: Level,
}

impl fmt::Display for Bcd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({}) C({}) D({})", self.b, self.c, self.d)
    }
}

/// Checks B(n): bc^k = 1/(k+1); C(n): q_k = 0; D(n): d_k = 0 for k < n.
///
/// Values are searched up to max(2s + 1, 10). C is reported infinite when
/// every stage has a zero row and zero node; D when every stage has a zero
/// column and unit node.
pub fn check_bcd<S: Scalar>(tab: &ButcherTableau<S>) -> Bcd {
    let cap = (2 * tab.stages() + 1).max(10);
    let tol = tab.tol();
    let count = |ok: &dyn Fn(u32) -> bool| (0..cap as u32).take_while(|&k| ok(k)).count();
    let b = count(&|k| {
        let lhs = dot(&tab.b, &tab.c_pow(k), &tab.ctx);
        lhs.approx_eq(&tab.rational(&BigRational::new(1.into(), (k + 1).into())), tol)
    });
    let c = count(&|k| q_n(tab, k).iter().all(|x| x.is_negligible(tol)));
    let d = count(&|k| d_n(tab, k).iter().all(|x| x.is_negligible(tol)));
    let s = tab.stages();
    let c_level = if (0..s).all(|i| structure::trivial_row(tab, i)) {
        Level::Infinite
    } else {
        Level::from_count(c, cap)
    };
    let d_level = if (0..s).all(|j| structure::trivial_column(tab, j)) {
        Level::Infinite
    } else {
        Level::from_count(d, cap)
    };
    Bcd { b: Level::from_count(b, cap), c: c_level, d: d_level }
}
