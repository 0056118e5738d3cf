//! Tree enumeration against an independent leaf-attachment oracle, plus
//! algebraic invariants of the tree products and statistics.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rk10::trees::{d_map, factorial, q_map, Forest, RootedTree, TreeCombination};

/// Plain adjacency form: children lists indexed by vertex, root 0.
type Adj = Vec<Vec<usize>>;

/// Canonical AHU string of the subtree at `v`.
fn ahu(adj: &Adj, v: usize) -> String {
    let mut parts: Vec<String> = adj[v].iter().map(|&c| ahu(adj, c)).collect();
    parts.sort();
    format!("({})", parts.concat())
}

/// All unlabeled rooted trees with `n` vertices, as AHU strings, grown by
/// attaching a leaf to every vertex of every tree with n − 1 vertices.
fn oracle_levels(max: usize) -> Vec<BTreeSet<String>> {
    let mut levels: Vec<Vec<Adj>> = vec![vec![], vec![vec![vec![]]]];
    let mut out = vec![BTreeSet::new(), ["()".to_string()].into_iter().collect()];
    for _n in 2..=max {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for t in levels.last().unwrap() {
            for v in 0..t.len() {
                let mut u = t.clone();
                let new = u.len();
                u.push(vec![]);
                u[v].push(new);
                let key = ahu(&u, 0);
                if seen.insert(key) {
                    next.push(u);
                }
            }
        }
        out.push(seen);
        levels.push(next);
    }
    out
}

fn ahu_of(t: &RootedTree) -> String {
    let mut parts: Vec<String> = t.children().iter().map(ahu_of).collect();
    parts.sort();
    format!("({})", parts.concat())
}

#[test]
fn enumeration_matches_oracle_through_order_nine() {
    let oracle = oracle_levels(9);
    let forest = Forest::new(9);
    for n in 1..=9 {
        let ours: BTreeSet<String> = forest.order_range(n).map(|i| ahu_of(forest.tree(i))).collect();
        assert_eq!(ours.len(), forest.order_range(n).len(), "duplicates at order {n}");
        assert_eq!(ours, oracle[n], "order {n}");
    }
}

#[test]
fn counts_through_order_twelve() {
    let forest = Forest::new(12);
    assert_eq!(forest.counts(), vec![1, 1, 2, 4, 9, 20, 48, 115, 286, 719, 1842, 4766]);
    assert_eq!(forest.up_to(10).len(), 1205);
}

#[test]
fn labelings_sum_to_tree_counts() {
    // Σ_{|t|=n} α(t) = (n−1)! (monotone labelings of all labeled rooted trees
    // with increasing labels away from the root).
    let forest = Forest::new(10);
    for n in 1..=10 {
        let s: u128 = forest.order_range(n).map(|i| forest.labelings(i)).sum();
        assert_eq!(s, factorial(n - 1), "order {n}");
    }
}

#[test]
fn enumeration_is_sorted_and_indexed() {
    let forest = Forest::new(8);
    for w in forest.trees().windows(2) {
        assert!(w[0] < w[1]);
    }
    for (i, t) in forest.trees().iter().enumerate() {
        assert_eq!(forest.index_of(t), Some(i));
        assert_eq!(RootedTree::parse(&t.to_bracket()).unwrap(), *t);
    }
}

#[test]
fn q_map_coefficient_sum() {
    // Coefficient sum of 𝒬(t) is 1 − 1/t!, so it vanishes only at •.
    let forest = Forest::new(5);
    for t in forest.trees() {
        let q = q_map(t);
        let expect = num_rational::BigRational::new(1.into(), 1.into())
            - num_rational::BigRational::new(1.into(), t.density().into());
        assert_eq!(q.coefficient_sum(), expect);
    }
}

#[test]
fn d_map_of_leaf_on_leaf() {
    // 𝒟(•, •) = [•] + [•]·• − • = [•] + [•] − • (root merge of [•] with • is [•]).
    let leaf = RootedTree::leaf();
    let d = d_map(&leaf, &TreeCombination::single(leaf.clone()));
    let two = num_rational::BigRational::from_integer(2.into());
    assert_eq!(d.coeff(&RootedTree::tall(2)), two);
    assert_eq!(d.coeff(&leaf), -num_rational::BigRational::from_integer(1.into()));
    assert_eq!(d.len(), 2);
}

fn arb_tree() -> impl Strategy<Value = RootedTree> {
    let leaf = Just(RootedTree::leaf());
    leaf.prop_recursive(4, 12, 3, |inner| prop::collection::vec(inner, 0..3).prop_map(RootedTree::graft))
}

proptest! {
    #[test]
    fn merge_is_commutative_and_associative(a in arb_tree(), b in arb_tree(), c in arb_tree()) {
        prop_assert_eq!(RootedTree::merge([&a, &b]), RootedTree::merge([&b, &a]));
        let ab = RootedTree::merge([&a, &b]);
        let bc = RootedTree::merge([&b, &c]);
        prop_assert_eq!(RootedTree::merge([&ab, &c]), RootedTree::merge([&a, &bc]));
        prop_assert_eq!(ab.order(), a.order() + b.order() - 1);
    }

    #[test]
    fn labeling_identity(t in arb_tree()) {
        prop_assert_eq!(t.labelings() * t.density() * t.symmetry(), factorial(t.order()));
    }

    #[test]
    fn beta_product_order_and_density(a in arb_tree(), b in arb_tree()) {
        let p = RootedTree::beta_product(&a, &b);
        prop_assert_eq!(p.order(), a.order() + b.order());
        // t! = |t| Π child!, so (a*b)! = |a*b|/|a| · a! · b!.
        prop_assert_eq!(p.density() * a.order() as u128, p.order() as u128 * a.density() * b.density());
    }

    #[test]
    fn bracket_roundtrip(t in arb_tree()) {
        prop_assert_eq!(t.to_bracket().parse::<RootedTree>().unwrap(), t);
    }
}
