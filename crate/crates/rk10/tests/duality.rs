//! Dual methods: self-duality of classical methods, involution, explicitness
//! and the B/C/D swap on random admissible tableaus.

mod common;

use common::{q, random_admissible};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rk10::duality::{check_duality_measured, check_duality_theorem, dualize, DualityError};
use rk10::tableau::known::{classic_rk4, forward_euler, implicit_midpoint, three_eighths};
use rk10::tableau::{check_bcd, ButcherTableau, Level};

#[test]
fn classical_methods_are_self_dual() {
    assert!(dualize(&classic_rk4()).unwrap().self_dual);
    assert!(dualize(&three_eighths()).unwrap().self_dual);
    assert!(dualize(&implicit_midpoint()).unwrap().self_dual);
}

#[test]
fn midpoint_theorem_instance() {
    let rep = check_duality_theorem(&implicit_midpoint(), 2, 1, 1).unwrap();
    assert!(rep.holds);
    assert_eq!(rep.dual, rep.original);
}

#[test]
fn inadmissible_methods_are_rejected() {
    // Forward Euler violates D(1): d₀ = −1.
    assert_eq!(dualize(&forward_euler()).unwrap_err(), DualityError::NotD1);
    let lower = vec![vec![], vec![q(1, 1)]];
    let tab = ButcherTableau::explicit(lower, vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)], ()).unwrap();
    assert_eq!(dualize(&tab).unwrap_err(), DualityError::ZeroWeight(2));
    assert_eq!(dualize(&tab).unwrap_err().to_string(), "dual undefined: zero weight at stage 2");
}

#[test]
fn precondition_failure_is_reported() {
    let err = check_duality_theorem(&classic_rk4(), 5, 1, 1).unwrap_err();
    assert_eq!(err, DualityError::Precondition("B(5)".into()));
}

#[test]
fn double_dual_and_explicitness_on_random_explicit() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let s = 2 + (rand::Rng::gen_range(&mut rng, 0..4));
        let tab = random_admissible(&mut rng, s, true);
        assert!(tab.is_explicit());
        let d = dualize(&tab).unwrap().dual;
        assert!(d.is_explicit(), "dual of an explicit method must be explicit");
        assert!(dualize(&d).unwrap().dual == tab);
    }
}

#[test]
fn double_dual_on_random_implicit() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..100 {
        let tab = random_admissible(&mut rng, 3, false);
        let d = dualize(&tab).unwrap().dual;
        assert!(dualize(&d).unwrap().dual == tab);
    }
}

#[test]
fn bcd_swap_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..100 {
        let tab = random_admissible(&mut rng, 3, false);
        let rep = check_duality_measured(&tab).unwrap();
        assert!(rep.holds);
        // Measured levels swap exactly: (l, m, n) → (l, n, m).
        assert_eq!(rep.dual.b, rep.original.b);
        assert_eq!(rep.dual.c, rep.original.d);
        assert_eq!(rep.dual.d, rep.original.c);
        assert!(rep.original.d.at_least(1));
    }
}

#[test]
fn bcd_swap_on_methods_with_richer_structure() {
    // The classic method has B(4), C(1), D(1); its own dual keeps them.
    let rep = check_duality_measured(&classic_rk4()).unwrap();
    assert!(rep.holds);
    assert_eq!(rep.original.b, Level::Finite(4));
    assert_eq!(check_bcd(&dualize(&classic_rk4()).unwrap().dual), rep.original);
}
