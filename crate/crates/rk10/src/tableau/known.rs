//! A few classical tableaus with rational entries, used in examples and tests.

use num_rational::BigRational;

use super::ButcherTableau;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn build(lower: &[&[(i64, i64)]], b: &[(i64, i64)], c: &[(i64, i64)]) -> ButcherTableau<BigRational> {
    let conv = |xs: &[(i64, i64)]| xs.iter().map(|&(p, d)| q(p, d)).collect::<Vec<_>>();
    ButcherTableau::explicit(lower.iter().map(|r| conv(r)).collect(), conv(b), conv(c), ()).expect("well-formed")
}

/// Forward Euler: s = 1, b = 1, c = 0.
pub fn forward_euler() -> ButcherTableau<BigRational> {
    build(&[&[]], &[(1, 1)], &[(0, 1)])
}

/// Implicit midpoint rule (one-stage Gauss–Legendre): a₁₁ = ½, b = 1, c = ½.
pub fn implicit_midpoint() -> ButcherTableau<BigRational> {
    ButcherTableau::new(vec![vec![q(1, 2)]], vec![q(1, 1)], vec![q(1, 2)], ()).expect("well-formed")
}

/// The classic four-stage method of order 4.
pub fn classic_rk4() -> ButcherTableau<BigRational> {
    build(
        &[&[], &[(1, 2)], &[(0, 1), (1, 2)], &[(0, 1), (0, 1), (1, 1)]],
        &[(1, 6), (1, 3), (1, 3), (1, 6)],
        &[(0, 1), (1, 2), (1, 2), (1, 1)],
    )
}

/// Kutta's 3/8 rule.
pub fn three_eighths() -> ButcherTableau<BigRational> {
    build(
        &[&[], &[(1, 3)], &[(-1, 3), (1, 1)], &[(1, 1), (-1, 1), (1, 1)]],
        &[(1, 8), (3, 8), (3, 8), (1, 8)],
        &[(0, 1), (1, 3), (2, 3), (1, 1)],
    )
}

/// Heun's second-order method.
pub fn heun2() -> ButcherTableau<BigRational> {
    build(&[&[], &[(1, 1)]], &[(1, 2), (1, 2)], &[(0, 1), (1, 1)])
}
