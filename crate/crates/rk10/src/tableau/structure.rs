//! Stage-level and cluster-level structure: stage orders, the Φ_p / Q_p / D_p
//! filtrations, and node clusters with their subspaces Q and D.

use std::fmt;

use crate::linalg::{nullspace, Span};
use crate::scalar::Scalar;

use super::{d_n, dot, hadamard, q_n, ButcherTableau, Level, PhiTable};

/// Default search cap for stage and cluster orders.
pub const DEFAULT_CAP: usize = 10;

/// Stage i has c_i = 0 and a zero row, so Q_i(t) = 0 for every tree.
pub(crate) fn trivial_row<S: Scalar>(tab: &ButcherTableau<S>, i: usize) -> bool {
    let tol = tab.tol();
    tab.c[i].is_negligible(tol) && tab.a[i].iter().all(|x| x.is_negligible(tol))
}

/// Stage j has c_j = 1 and a zero column, so D_j(t) = 0 for every tree.
pub(crate) fn trivial_column<S: Scalar>(tab: &ButcherTableau<S>, j: usize) -> bool {
    let tol = tab.tol();
    let one = S::one(&tab.ctx);
    tab.c[j].approx_eq(&one, tol) && tab.a.iter().all(|r| r[j].is_negligible(tol))
}

/// Q(t) and D(t) for every tree with |t| ≤ cap.
struct ConditionTable<S: Scalar> {
    orders: Vec<usize>,
    q: Vec<Vec<S>>,
    d: Vec<Vec<S>>,
}

impl<S: Scalar> ConditionTable<S> {
    fn new(tab: &ButcherTableau<S>, cap: usize) -> Self {
        use rayon::prelude::*;
        let table = PhiTable::new(tab, cap);
        let n = table.len();
        let (q, d): (Vec<_>, Vec<_>) = (0..n).into_par_iter().map(|i| (table.q(tab, i), table.d(tab, i))).unzip();
        let orders = (0..n).map(|i| table.forest().tree(i).order()).collect();
        ConditionTable { orders, q, d }
    }

    /// Indices of trees with |t| = p.
    fn of_order(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.orders.len()).filter(move |&i| self.orders[i] == p)
    }

    /// Smallest |t| whose entry `k` of the selected vectors is non-negligible.
    fn first_nonzero(&self, vecs: &[Vec<S>], k: usize, tab: &ButcherTableau<S>) -> Option<usize> {
        let tol = tab.tol();
        (0..vecs.len()).filter(|&i| !vecs[i][k].is_negligible(tol)).map(|i| self.orders[i]).min()
    }
}

/// Per-stage orders: stage order (row reading of Q_i(t)), strong stage
/// order, and weak stage co-order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageOrders {
    pub stage_order: Vec<Level>,
    pub strong_stage_order: Vec<Level>,
    pub weak_stage_coorder: Vec<Level>,
    pub cap: usize,
}

/// Stage orders searched up to [`DEFAULT_CAP`].
pub fn stage_orders<S: Scalar>(tab: &ButcherTableau<S>) -> StageOrders {
    stage_orders_with_cap(tab, DEFAULT_CAP)
}

/// Stage orders searched up to `cap`.
///
/// * stage order ≥ p: Q_i(t) = a_{i*}Φ(t) − c_i^{|t|}/t! = 0 for |t| ≤ p;
/// * strong stage order ≥ p: q_{n,i} = 0 for n < p, and every stage j with
///   a_ij ≠ 0 has strong stage order ≥ p − 1;
/// * weak stage co-order ≥ p: D_j(t) = 0 for |t| ≤ p.
pub fn stage_orders_with_cap<S: Scalar>(tab: &ButcherTableau<S>, cap: usize) -> StageOrders {
    let table = ConditionTable::new(tab, cap);
    stage_orders_from(tab, &table, cap)
}

fn stage_orders_from<S: Scalar>(tab: &ButcherTableau<S>, table: &ConditionTable<S>, cap: usize) -> StageOrders {
    let s = tab.stages();
    let tol = tab.tol();
    let from_first_bad = |bad: Option<usize>| match bad {
        Some(o) => Level::Finite(o - 1),
        None => Level::AtLeast(cap),
    };
    let stage_order = (0..s)
        .map(|i| if trivial_row(tab, i) { Level::Infinite } else { from_first_bad(table.first_nonzero(&table.q, i, tab)) })
        .collect();
    let weak_stage_coorder = (0..s)
        .map(|j| if trivial_column(tab, j) { Level::Infinite } else { from_first_bad(table.first_nonzero(&table.d, j, tab)) })
        .collect();

    // ok[p][i]: strong stage order of i is at least p.
    let qs: Vec<Vec<S>> = (0..cap as u32).map(|n| q_n(tab, n)).collect();
    let mut ok = vec![vec![true; s]];
    for p in 1..=cap {
        let prev = &ok[p - 1];
        let row: Vec<bool> = (0..s)
            .map(|i| {
                prev[i]
                    && qs[p - 1][i].is_negligible(tol)
                    && (0..s).all(|j| tab.a[i][j].is_negligible(tol) || ok[p - 1][j])
            })
            .collect();
        ok.push(row);
    }
    let strong_stage_order = (0..s)
        .map(|i| {
            if trivial_row(tab, i) {
                Level::Infinite
            } else {
                Level::from_count((1..=cap).take_while(|&p| ok[p][i]).count(), cap)
            }
        })
        .collect();
    StageOrders { stage_order, strong_stage_order, weak_stage_coorder, cap }
}

/// Which filtration a [`SubspaceBasis`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiltrationFamily {
    /// Φ_p = span{Φ(t) : |t| ≤ p + 1} (column vectors).
    Phi,
    /// Q_p (column vectors).
    Q,
    /// D_p (row vectors).
    D,
}

/// Basis of one filtration member.
#[derive(Debug, Clone)]
pub struct SubspaceBasis<S: Scalar> {
    pub family: FiltrationFamily,
    pub p: usize,
    pub basis: Vec<Vec<S>>,
}

impl<S: Scalar> SubspaceBasis<S> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// All three filtrations for levels 0..=p.
struct Filtrations<S: Scalar> {
    phi: Vec<Span<S>>,
    q: Vec<Span<S>>,
    d: Vec<Span<S>>,
}

impl<S: Scalar> Filtrations<S> {
    fn new(tab: &ButcherTableau<S>, p: usize, table: Option<&ConditionTable<S>>) -> Self {
        let s = tab.stages();
        let ctx = &tab.ctx;
        let empty = || Span::for_ctx(s, ctx);

        let mut phi: Vec<Span<S>> = Vec::new();
        let mut zero_level = empty();
        zero_level.insert(&vec![S::one(ctx); s]);
        phi.push(zero_level);
        for k in 1..=p {
            let mut sp = phi[k - 1].clone();
            for v in phi[k - 1].basis().to_vec() {
                sp.insert(&tab.apply(&v));
            }
            for q in 1..k {
                for x in phi[q].basis() {
                    for y in phi[k - q].basis() {
                        sp.insert(&hadamard(x, y));
                    }
                }
            }
            phi.push(sp);
        }

        let mut q: Vec<Span<S>> = vec![empty(), empty()];
        for k in 2..=p {
            let mut sp = empty();
            sp.insert(&q_n(tab, k as u32 - 1));
            for v in q[k - 1].basis() {
                sp.insert(&tab.apply(v));
            }
            for j in 2..k {
                for x in q[j].basis() {
                    for y in phi[k - j].basis() {
                        sp.insert(&hadamard(x, y));
                    }
                }
            }
            q.push(sp);
        }
        q.truncate(p + 1);

        let owned;
        let table = match table {
            Some(t) => t,
            None => {
                owned = ConditionTable::new(tab, p.max(1));
                &owned
            }
        };
        let mut d: Vec<Span<S>> = vec![empty()];
        if p >= 1 {
            let mut d1 = empty();
            d1.insert(&d_n(tab, 0));
            d.push(d1);
        }
        for k in 2..=p {
            let mut sp = d[k - 1].clone();
            for v in d[k - 1].basis().to_vec() {
                sp.insert(&hadamard(&v, &tab.c));
                sp.insert(&tab.apply_left(&v));
            }
            for i in table.of_order(k) {
                sp.insert(&table.d[i]);
            }
            d.push(sp);
        }
        Filtrations { phi, q, d }
    }
}

/// Basis of Φ_p, Q_p or D_p, built from the recursive generator sets:
///
/// * Φ_0 = span(1); Φ_p from Φ_{p−1}, AΦ_{p−1}, Φ_q.Φ_{p−q} (0 < q < p);
/// * Q_0 = Q_1 = {0}; Q_p from q_{p−1}, AQ_{p−1}, Q_q.Φ_{p−q} (1 < q < p);
/// * D_0 = {0}, D_1 = span(d_0); D_p from D_{p−1}, D_{p−1}.cᵀ, D_{p−1}A and
///   D(t) for |t| = p.
pub fn filtration<S: Scalar>(tab: &ButcherTableau<S>, family: FiltrationFamily, p: usize) -> SubspaceBasis<S> {
    let f = Filtrations::new(tab, p, None);
    let span = match family {
        FiltrationFamily::Phi => &f.phi[p],
        FiltrationFamily::Q => &f.q[p],
        FiltrationFamily::D => &f.d[p],
    };
    SubspaceBasis { family, p, basis: span.basis().to_vec() }
}

/// One node cluster (S, Q, D) with its measured order and co-order.
#[derive(Debug, Clone)]
pub struct Cluster<S: Scalar> {
    /// Stage indices (0-based) sharing one node.
    pub stages: Vec<usize>,
    /// Σ_{i∈S} b_i ≠ 0.
    pub quadrature: bool,
    /// Basis of Q ⊆ ℝ^|S|.
    pub q_basis: Vec<Vec<S>>,
    /// Basis of D ⊆ (ℝ^|S|)*.
    pub d_basis: Vec<Vec<S>>,
    pub order: Level,
    pub co_order: Level,
}

impl<S: Scalar> Cluster<S> {
    pub fn dim_q(&self) -> usize {
        self.q_basis.len()
    }

    pub fn dim_d(&self) -> usize {
        self.d_basis.len()
    }

    /// dim Q + dim D = |S| − 1 for quadrature clusters and |S| otherwise.
    pub fn dimension_identity_holds(&self) -> bool {
        let expect = if self.quadrature { self.stages.len() - 1 } else { self.stages.len() };
        self.dim_q() + self.dim_d() == expect
    }

    /// 1-based stage list such as "{7,13}".
    pub fn stage_label(&self) -> String {
        let parts: Vec<String> = self.stages.iter().map(|i| (i + 1).to_string()).collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl<S: Scalar> fmt::Display for Cluster<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} dimQ={} dimD={} order={} co-order={}",
            self.stage_label(),
            if self.quadrature { "quadrature" } else { "non-quadrature" },
            self.dim_q(),
            self.dim_d(),
            self.order,
            self.co_order
        )
    }
}

/// Node clusters plus per-stage orders.
#[derive(Debug, Clone)]
pub struct ClusterReport<S: Scalar> {
    pub clusters: Vec<Cluster<S>>,
    pub stages: StageOrders,
}

impl<S: Scalar> ClusterReport<S> {
    /// Whether every cluster satisfies the dimension identity.
    pub fn dimension_identity_holds(&self) -> bool {
        self.clusters.iter().all(Cluster::dimension_identity_holds)
    }

    /// The cluster containing a stage (0-based).
    pub fn cluster_of(&self, stage: usize) -> Option<&Cluster<S>> {
        self.clusters.iter().find(|c| c.stages.contains(&stage))
    }
}

/// Node-cluster analysis with the default cap.
pub fn cluster_analysis<S: Scalar>(tab: &ButcherTableau<S>) -> ClusterReport<S> {
    cluster_analysis_with_cap(tab, DEFAULT_CAP)
}

/// Partitions the stages by equal nodes and, per cluster, chooses the pair
/// (Q, D) that maximizes first the common order/co-order, then the order,
/// then the co-order; Q and D are then the mutual orthogonal complements
/// D = (Q_p|_S + span 1)^⊥ and Q = (D + span b|_S)^⊥.
pub fn cluster_analysis_with_cap<S: Scalar>(tab: &ButcherTableau<S>, cap: usize) -> ClusterReport<S> {
    let s = tab.stages();
    let table = ConditionTable::new(tab, cap);
    let filt = Filtrations::new(tab, cap, Some(&table));
    let stages = stage_orders_from(tab, &table, cap);

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..s {
        match groups.iter_mut().find(|g| tab.nodes_equal(g[0], i)) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let clusters = groups.into_iter().map(|g| analyze_cluster(tab, &table, &filt, g, cap)).collect();
    ClusterReport { clusters, stages }
}

fn restrict<S: Scalar>(v: &[S], set: &[usize]) -> Vec<S> {
    set.iter().map(|&i| v[i].clone()).collect()
}

fn analyze_cluster<S: Scalar>(
    tab: &ButcherTableau<S>,
    table: &ConditionTable<S>,
    filt: &Filtrations<S>,
    set: Vec<usize>,
    cap: usize,
) -> Cluster<S> {
    let n = set.len();
    let ctx = &tab.ctx;
    let tol = tab.tol();
    let ones = vec![S::one(ctx); n];
    let b_s = restrict(&tab.b, &set);
    let quadrature = !b_s.iter().fold(S::zero(ctx), |a, x| a.add(x)).is_negligible(tol);

    // Restricted filtrations QS_p (trees |t| ≤ p) and DS_p.
    let mut qs: Vec<Span<S>> = vec![Span::for_ctx(n, ctx)];
    for p in 1..=cap {
        let mut sp = qs[p - 1].clone();
        for i in table.of_order(p) {
            sp.insert(&restrict(&table.q[i], &set));
        }
        qs.push(sp);
    }
    let ds: Vec<Span<S>> = (0..=cap)
        .map(|p| {
            let mut sp = Span::for_ctx(n, ctx);
            for v in filt.d[p].basis() {
                sp.insert(&restrict(v, &set));
            }
            sp
        })
        .collect();

    let orthogonal = |x: &[S], y: &[S]| dot(x, y, ctx).is_negligible(tol);
    let compatible = |p: usize, pd: usize| {
        qs[p].basis().iter().all(|q| orthogonal(q, &b_s) && ds[pd].basis().iter().all(|d| orthogonal(q, d)))
            && ds[pd].basis().iter().all(|d| orthogonal(d, &ones))
    };
    let p0 = (0..=cap).take_while(|&p| compatible(p, p)).last().unwrap_or(0);
    let p1 = (p0..=cap).take_while(|&p| compatible(p, p0)).last().unwrap_or(p0);

    // D = (QS_{p1} + span 1)^⊥, Q = (D + span b)^⊥.
    let mut rows: Vec<Vec<S>> = qs[p1].basis().to_vec();
    rows.push(ones.clone());
    let d_basis = nullspace(&rows, n, ctx);
    let mut rows = d_basis.clone();
    rows.push(b_s.clone());
    let q_basis = nullspace(&rows, n, ctx);

    let q_span = span_of(&q_basis, n, ctx);
    let d_span = span_of(&d_basis, n, ctx);
    let order = if set.iter().all(|&i| trivial_row(tab, i)) {
        Level::Infinite
    } else {
        Level::from_count((1..=cap).take_while(|&p| q_span.contains_span(&qs[p])).count(), cap)
    };
    let co_order = if set.iter().all(|&j| trivial_column(tab, j)) {
        Level::Infinite
    } else {
        Level::from_count((1..=cap).take_while(|&p| d_span.contains_span(&ds[p])).count(), cap)
    };
    Cluster { stages: set, quadrature, q_basis, d_basis, order, co_order }
}

fn span_of<S: Scalar>(vs: &[Vec<S>], n: usize, ctx: &S::Ctx) -> Span<S> {
    let mut sp = Span::for_ctx(n, ctx);
    for v in vs {
        sp.insert(v);
    }
    sp
}
