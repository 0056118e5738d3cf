//! Derivative weights, verification, condition vectors, simplifying
//! properties and structural diagnostics on small tableaus.

mod common;

use common::{q, random_explicit, random_tableau};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rk10::field::digits_to_prec;
use rk10::tableau::known::{classic_rk4, forward_euler, heun2, implicit_midpoint, three_eighths};
use rk10::tableau::structure::stage_orders_with_cap;
use rk10::tableau::*;
use rk10::trees::{d_map, enumerate_trees, q_map, q_map_linear, RootedTree, TreeCombination};
use rk10::Scalar;

fn t(s: &str) -> RootedTree {
    s.parse().unwrap()
}

#[test]
fn phi_small_trees() {
    let tab = classic_rk4();
    let c = tab.c().to_vec();
    assert_eq!(phi(&tab, &RootedTree::leaf()), vec![q(1, 1); 4]);
    assert_eq!(phi(&tab, &t("[[]]")), c);
    let c2: Vec<BigRational> = c.iter().map(|x| x * x).collect();
    assert_eq!(phi(&tab, &t("[[][]]")), c2);
}

#[test]
fn classic_rk4_has_order_exactly_four() {
    let tab = classic_rk4();
    let rep = verify_order(&tab, 5, None);
    assert_eq!(rep.achieved_order, 4);
    assert_eq!(rep.residuals.len(), 17);
    let tall = RootedTree::tall(5);
    assert_ne!(elementary_weight(&tab, &tall), q(1, 120));
    // Sorted by |residual| descending; zeros at the end in canonical order.
    let zeros: Vec<&RootedTree> = rep.residuals.iter().filter(|(_, r)| Scalar::is_zero(r)).map(|(t, _)| t).collect();
    assert_eq!(zeros.len(), 8);
    assert!(zeros.windows(2).all(|w| w[0] < w[1]));
    assert!(!Scalar::is_zero(&rep.residuals[0].1));
}

#[test]
fn forward_euler_order_and_properties() {
    let tab = forward_euler();
    assert_eq!(verify_order(&tab, 2, None).achieved_order, 1);
    let bcd = check_bcd(&tab);
    assert_eq!(bcd.b, Level::Finite(1));
    // Every q_k vanishes because A = 0 and c = 0.
    assert_eq!(bcd.c, Level::Infinite);
    assert_eq!(bcd.d, Level::Finite(0));
    assert_eq!(d_n(&tab, 0), vec![q(-1, 1)]);
}

#[test]
fn implicit_midpoint_properties() {
    let tab = implicit_midpoint();
    assert!(!tab.is_explicit());
    let bcd = check_bcd(&tab);
    assert_eq!((bcd.b, bcd.c, bcd.d), (Level::Finite(2), Level::Finite(1), Level::Finite(1)));
}

#[test]
fn rk4_bcd() {
    let bcd = check_bcd(&classic_rk4());
    assert_eq!(bcd.b, Level::Finite(4));
    assert_eq!(bcd.c, Level::Finite(1));
    assert_eq!(bcd.d, Level::Finite(1));
}

#[test]
fn q_of_leaf_vanishes_with_row_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tab = random_tableau(&mut rng, 4);
    assert!(tab.row_sum_holds());
    assert!(q_vector(&tab, &RootedTree::leaf()).values.iter().all(Scalar::is_zero));
}

#[test]
fn row_sum_flag_records_violation() {
    let tab = ButcherTableau::new(vec![vec![q(1, 1)]], vec![q(1, 1)], vec![q(0, 1)], ()).unwrap();
    assert!(!tab.row_sum_holds());
}

#[test]
fn bushy_condition_vectors_match_subquadrature_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tab = random_tableau(&mut rng, 4);
    for n in 0..5u32 {
        let bushy = RootedTree::bushy(n as usize + 1);
        assert_eq!(q_vector(&tab, &bushy).values, q_n(&tab, n));
        assert_eq!(d_vector(&tab, &bushy).values, d_n(&tab, n));
    }
}

#[test]
fn commutative_diagram_identities() {
    // Q(T) = Φ(𝒬(T)) and D(t)Φ(T) = bΦ(𝒟(t, T)) for |t| + |T| ≤ 7.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tab = random_tableau(&mut rng, 5);
    let trees = enumerate_trees(6);
    for big in &trees {
        let lhs = q_vector(&tab, big).values;
        let rhs = phi_combination(&tab, &q_map(big));
        assert_eq!(lhs, rhs, "Q vs Φ∘𝒬 at {big}");
    }
    for small in &trees {
        let dt = d_vector(&tab, small).values;
        for big in trees.iter().filter(|u| small.order() + u.order() <= 7) {
            let lhs: BigRational = dt.iter().zip(phi(&tab, big)).map(|(x, y)| x * y).sum();
            let comb = d_map(small, &TreeCombination::single(big.clone()));
            let rhs: BigRational = tab.b().iter().zip(phi_combination(&tab, &comb)).map(|(x, y)| x * y).sum();
            assert_eq!(lhs, rhs, "D({small})Φ({big})");
        }
    }
}

#[test]
fn commutative_diagram_on_combinations() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tab = random_tableau(&mut rng, 5);
    let mut comb = TreeCombination::single(t("[[][]]"));
    comb.add_term(t("[[[]]]"), q(-3, 4));
    comb.add_term(t("[[][[]]]"), q(5, 2));
    assert_eq!(q_combination(&tab, &comb), phi_combination(&tab, &q_map_linear(&comb)));
}

/// General four-stage method of order four with free nodes c₂, c₃ (c₄ = 1).
fn kutta_family(c2: BigRational, c3: BigRational) -> ButcherTableau<BigRational> {
    let one = q(1, 1);
    let c = [q(0, 1), c2.clone(), c3.clone(), one.clone()];
    // b from the Vandermonde system b·c^k = 1/(k+1), k < 4.
    let m: Vec<Vec<BigRational>> = (0..4).map(|k| c.iter().map(|x| pow(x, k)).collect()).collect();
    let rhs: Vec<BigRational> = (0..4).map(|k| q(1, k as i64 + 1)).collect();
    let b = rk10::linalg::solve(&m, &rhs).unwrap();
    let a43 = &b[2] * (&one - &c3) / &b[3];
    let a32 = q(1, 24) / (&b[3] * &a43 * &c2);
    let a42 = (&b[1] * (&one - &c2) - &b[2] * &a32) / &b[3];
    let lower = vec![
        vec![],
        vec![c2.clone()],
        vec![&c3 - &a32, a32],
        vec![&one - &a42 - &a43, a42, a43],
    ];
    ButcherTableau::explicit(lower, b, c.to_vec(), ()).unwrap()
}

fn pow(x: &BigRational, k: usize) -> BigRational {
    (0..k).fold(q(1, 1), |acc, _| acc * x)
}

/// Order ≥ p via the split forms: quadrature B(p) together with either
/// b·Q_{p−1} = {0} or D_{p−1}·1 = {0}.
fn split_forms(tab: &ButcherTableau<BigRational>, p: usize) -> (bool, bool) {
    let quad = check_bcd(tab).b.at_least(p);
    let qf = filtration(tab, FiltrationFamily::Q, p - 1);
    let q_ok = qf.basis.iter().all(|v| tab.b().iter().zip(v).map(|(x, y)| x * y).sum::<BigRational>() == q(0, 1));
    let df = filtration(tab, FiltrationFamily::D, p - 1);
    let d_ok = df.basis.iter().all(|v| v.iter().sum::<BigRational>() == q(0, 1));
    (quad && q_ok, quad && d_ok)
}

#[test]
fn split_forms_agree_with_tree_residuals() {
    let mut cases = vec![classic_rk4(), three_eighths(), heun2(), kutta_family(q(1, 3), q(3, 4)), kutta_family(q(2, 5), q(3, 5))];
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..10 {
        cases.push(random_explicit(&mut rng, 4));
    }
    assert_eq!(verify_order(&cases[3], 4, None).achieved_order, 4);
    assert_eq!(verify_order(&cases[4], 4, None).achieved_order, 4);
    for tab in &cases {
        let achieved = verify_order(tab, 5, None).achieved_order;
        for p in 1..=5 {
            let (via_q, via_d) = split_forms(tab, p);
            assert_eq!(achieved >= p, via_q, "Q split form at p = {p}");
            assert_eq!(achieved >= p, via_d, "D split form at p = {p}");
        }
    }
}

#[test]
fn filtration_small_levels() {
    let tab = classic_rk4();
    assert_eq!(filtration(&tab, FiltrationFamily::Phi, 0).dim(), 1);
    assert_eq!(filtration(&tab, FiltrationFamily::Phi, 1).dim(), 2);
    assert_eq!(filtration(&tab, FiltrationFamily::Q, 0).dim(), 0);
    assert_eq!(filtration(&tab, FiltrationFamily::Q, 1).dim(), 0);
    // Q₂ = span(q₁), and q₁ ≠ 0 for the classic method.
    assert_eq!(filtration(&tab, FiltrationFamily::Q, 2).dim(), 1);
    // d₀ = 0 for the classic method, so D₁ = {0}.
    assert_eq!(filtration(&tab, FiltrationFamily::D, 1).dim(), 0);
}

#[test]
fn phi_filtration_matches_tree_span() {
    // Φ_p is spanned by Φ(t) for |t| ≤ p + 1.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let tab = random_tableau(&mut rng, 5);
    let trees = enumerate_trees(5);
    for p in 0..=4 {
        let f = filtration(&tab, FiltrationFamily::Phi, p);
        let mut sp = rk10::linalg::Span::new(5, rk10::Tol(0.0));
        for tr in trees.iter().filter(|u| u.order() <= p + 1) {
            sp.insert(&phi(&tab, tr));
        }
        assert_eq!(sp.dim(), f.dim(), "p = {p}");
        assert!(f.basis.iter().all(|v| sp.contains(v)));
    }
}

#[test]
fn explicit_first_stage_has_infinite_stage_order() {
    let so = stage_orders(&classic_rk4());
    assert_eq!(so.stage_order[0], Level::Infinite);
    assert_eq!(so.strong_stage_order[0], Level::Infinite);
    // Stage 2 of the classic method: a₂₁ = c₂, q₁ ≠ 0.
    assert_eq!(so.stage_order[1], Level::Finite(1));
    assert_eq!(so.strong_stage_order[1], Level::Finite(1));
}

#[test]
fn strong_stage_order_bounds_stage_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let tab = random_explicit(&mut rng, 4);
        let so = stage_orders_with_cap(&tab, 6);
        for i in 0..4 {
            assert!(so.stage_order[i].at_least(so.strong_stage_order[i].lower_bound().min(6)));
        }
    }
}

#[test]
fn clusters_of_distinct_nodes_are_singletons() {
    let tab = three_eighths();
    let rep = cluster_analysis(&tab);
    assert_eq!(rep.clusters.len(), 4);
    for cl in &rep.clusters {
        assert_eq!(cl.stages.len(), 1);
        assert!(cl.quadrature);
        assert_eq!((cl.dim_q(), cl.dim_d()), (0, 0));
    }
    assert!(rep.dimension_identity_holds());
}

#[test]
fn non_quadrature_singleton() {
    // Heun-like method with an unused extra stage (b₃ = 0).
    let lower = vec![vec![], vec![q(1, 1)], vec![q(1, 4), q(1, 4)]];
    let tab = ButcherTableau::explicit(lower, vec![q(1, 2), q(1, 2), q(0, 1)], vec![q(0, 1), q(1, 1), q(1, 2)], ()).unwrap();
    let rep = cluster_analysis(&tab);
    let cl = rep.cluster_of(2).unwrap();
    assert!(!cl.quadrature);
    assert_eq!((cl.dim_q(), cl.dim_d()), (1, 0));
    assert!(rep.dimension_identity_holds());
}

#[test]
fn repeated_nodes_form_a_cluster() {
    // The classic method repeats c = ½ at stages 2 and 3.
    let rep = cluster_analysis(&classic_rk4());
    assert_eq!(rep.clusters.len(), 3);
    let cl = rep.cluster_of(1).unwrap();
    assert_eq!(cl.stages, vec![1, 2]);
    assert!(cl.quadrature);
    assert!(cl.dimension_identity_holds());
}

#[test]
fn numeric_mode_agrees_with_exact() {
    let tab = classic_rk4();
    let num = tab.to_real(digits_to_prec(40));
    assert_eq!(verify_order(&num, 5, None).achieved_order, 4);
    assert_eq!(check_bcd(&num), check_bcd(&tab));
    assert_eq!(stage_orders(&num), stage_orders(&tab));
    let ex = cluster_analysis(&tab);
    let nu = cluster_analysis(&num);
    for (a, b) in ex.clusters.iter().zip(&nu.clusters) {
        assert_eq!(a.stages, b.stages);
        assert_eq!((a.dim_q(), a.dim_d(), a.order, a.co_order), (b.dim_q(), b.dim_d(), b.order, b.co_order));
    }
}
