//! One-step circle tests, trajectories, observed order and the expression
//! language for user right-hand sides.

mod common;

use common::q;
use rk10::family::reference_method;
use rk10::field::{digits_to_prec, Real};
use rk10::integrator::*;
use rk10::tableau::known::{classic_rk4, forward_euler, implicit_midpoint};

fn half_pi(prec: u32) -> Real {
    Real::pi(prec).mul_pow2(-1)
}

#[test]
fn reference_circle_steps_match_published_values() {
    let prec = digits_to_prec(60);
    let tab = reference_method().tableau.to_real(prec);
    let (t0, x0) = OdeProblem::linear_circle().initial(prec);
    let x = rk_step(&tab, &OdeProblem::linear_circle(), &t0, &x0, &half_pi(prec)).unwrap();
    assert!(x[0].to_fixed(10).starts_with("-0.00000074"), "{}", x[0].to_fixed(12));
    assert!(x[1].to_fixed(9).starts_with("+1.0000335"), "{}", x[1].to_fixed(12));
    let y = rk_step(&tab, &OdeProblem::nonlinear_circle(), &t0, &x0, &half_pi(prec)).unwrap();
    assert!(y[0].to_fixed(8).starts_with("+0.000203"), "{}", y[0].to_fixed(12));
    assert!(y[1].to_fixed(8).starts_with("+1.000054"), "{}", y[1].to_fixed(12));
}

#[test]
fn linear_step_equals_stability_function() {
    let prec = digits_to_prec(50);
    let tab = reference_method().tableau.to_real(prec);
    assert!(linear_step_identity_check(&tab, &half_pi(prec)).unwrap());
    assert!(linear_step_identity_check(&tab, &Real::zero(prec)).unwrap());
    let euler = forward_euler().to_real(prec);
    assert!(linear_step_identity_check(&euler, &half_pi(prec)).unwrap());
    let rk4 = classic_rk4().to_real(prec);
    assert!(linear_step_identity_check(&rk4, &Real::from_rational(&q(3, 7), prec)).unwrap());
}

#[test]
fn zero_step_and_implicit_rejection() {
    let prec = digits_to_prec(30);
    let tab = classic_rk4().to_real(prec);
    let p = OdeProblem::nonlinear_circle();
    let (t0, x0) = p.initial(prec);
    assert_eq!(rk_step(&tab, &p, &t0, &x0, &Real::zero(prec)).unwrap(), x0);
    let mid = implicit_midpoint().to_real(prec);
    let err = rk_step(&mid, &p, &t0, &x0, &Real::zero(prec)).unwrap_err();
    assert_eq!(err.to_string(), "explicit stepping requires strictly lower-triangular A");
}

#[test]
fn trajectory_around_the_circle() {
    let prec = digits_to_prec(40);
    let tab = reference_method().tableau.to_real(prec);
    let p = OdeProblem::linear_circle();
    let two_pi = Real::pi(prec).mul_pow2(1);
    let traj = integrate(&tab, &p, &two_pi, 4).unwrap();
    assert_eq!(traj.len(), 5);
    let (_, end) = traj.last().unwrap();
    // On the linear circle each step multiplies x + iy by R(iπ/2), so after
    // four steps the endpoint is R(iπ/2)⁴ and its distance from (1, 0) is at
    // most 4·max(1, |R|)³·|R(iπ/2) − i|.
    let coeffs = rk10::analysis::stability_polynomial(&tab).unwrap().to_real(prec);
    let r = rk10::analysis::eval_complex(&coeffs, &rk10::analysis::Complex::new(Real::zero(prec), half_pi(prec)));
    let r4 = r.mul(&r).mul(&r).mul(&r);
    assert!((&end[0] - &r4.re).log10_abs().is_none_or(|l| l < -35.0));
    assert!((&end[1] - &r4.im).log10_abs().is_none_or(|l| l < -35.0));
    let one_step = (&r.re * &r.re + (&r.im - &Real::from_int(1, prec)) * (&r.im - &Real::from_int(1, prec))).sqrt().unwrap();
    let one = Real::from_int(1, prec);
    let dist = ((&end[0] - &one) * (&end[0] - &one) + &end[1] * &end[1]).sqrt().unwrap();
    let growth = r.abs().max(one.clone()).powi(3);
    assert!(dist <= &(&one_step * &growth) * &Real::from_int(4, prec));
    assert!(dist.to_f64() < 2e-4);
    // Frozen regression value.
    assert_eq!(end[0].to_fixed(20), "+1.00013439458476036981");
    assert_eq!(end[1].to_fixed(20), "+0.00000297439802173546");
    let one = integrate(&tab, &p, &half_pi(prec), 1).unwrap();
    let (t0, x0) = p.initial(prec);
    assert_eq!(one[1].1, rk_step(&tab, &p, &t0, &x0, &half_pi(prec)).unwrap());
}

#[test]
fn observed_local_orders() {
    let prec = digits_to_prec(60);
    let h0 = Real::from_rational(&q(1, 2), prec);
    let p = OdeProblem::linear_circle();
    let m = measure_order(&reference_method().tableau.to_real(prec), &p, &h0, 7).unwrap();
    assert!((10.7..=11.3).contains(&m.slope), "slope {}", m.slope);
    let m = measure_order(&reference_method().tableau.to_real(prec), &OdeProblem::nonlinear_circle(), &h0, 7).unwrap();
    assert!(m.slope >= 10.5, "slope {}", m.slope);
    let m = measure_order(&forward_euler().to_real(prec), &p, &h0, 7).unwrap();
    assert!((1.8..=2.2).contains(&m.slope), "slope {}", m.slope);
    let m = measure_order(&classic_rk4().to_real(prec), &p, &h0, 7).unwrap();
    assert!((4.7..=5.3).contains(&m.slope), "slope {}", m.slope);
}

#[test]
fn underflow_is_reported() {
    let prec = digits_to_prec(15);
    let h0 = Real::from_rational(&q(1, 64), prec);
    let err = measure_order(&reference_method().tableau.to_real(prec), &OdeProblem::linear_circle(), &h0, 4).unwrap_err();
    assert!(matches!(err, IntegratorError::Underflow { .. }));
}

#[test]
fn expression_problems() {
    let prec = digits_to_prec(40);
    let p = OdeProblem::from_expressions(&["x", "y"], &["-y", "x"], vec![q(1, 1), q(0, 1)]).unwrap();
    let tab = classic_rk4().to_real(prec);
    let (t0, x0) = p.initial(prec);
    let h = Real::from_rational(&q(1, 10), prec);
    let builtin = OdeProblem::linear_circle();
    assert_eq!(rk_step(&tab, &p, &t0, &x0, &h).unwrap(), rk_step(&tab, &builtin, &t0, &x0, &h).unwrap());

    let nl = OdeProblem::from_expressions(&["x", "y"], &["-y/(x^2+y^2)", "x/(x^2 + y^2)"], vec![q(1, 1), q(0, 1)]).unwrap();
    let a = rk_step(&tab, &nl, &t0, &x0, &h).unwrap();
    let b = rk_step(&tab, &OdeProblem::nonlinear_circle(), &t0, &x0, &h).unwrap();
    for (u, v) in a.iter().zip(&b) {
        assert!((u - v).log10_abs().is_none_or(|l| l < -38.0));
    }

    let vars: Vec<String> = ["t", "x"].iter().map(|s| s.to_string()).collect();
    let e = Expr::parse("2*t^2 - x^-1 + 1.5e1/3", &vars).unwrap();
    let v = e.eval(&[Real::from_int(3, prec), Real::from_int(4, prec)]).unwrap();
    assert_eq!(v.to_fixed(6), "+22.750000");
    assert!(Expr::parse("x +", &vars).is_err());
    assert!(matches!(Expr::parse("z", &vars), Err(ExprError::Parse { pos: 0, .. })));
    assert!(Expr::parse("x^y", &vars).is_err());
    let d = Expr::parse("1/(x-x)", &vars).unwrap();
    assert_eq!(d.eval(&[Real::zero(prec), Real::from_int(1, prec)]), Err(ExprError::DivisionByZero));
}
