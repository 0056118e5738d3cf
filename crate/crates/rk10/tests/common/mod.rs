//! Shared generators for integration tests.
#![allow(dead_code)]

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rk10::tableau::ButcherTableau;

pub fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

/// Small random rational p/d with d ∈ 1..=9.
pub fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    q(rng.gen_range(-9..=9), rng.gen_range(1..=9))
}

/// Nonzero small random rational.
pub fn nonzero_rational(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let x = small_rational(rng);
        if x != q(0, 1) {
            return x;
        }
    }
}

/// Random full (implicit) tableau with the row-sum condition.
pub fn random_tableau(rng: &mut ChaCha8Rng, s: usize) -> ButcherTableau<BigRational> {
    let a: Vec<Vec<BigRational>> = (0..s).map(|_| (0..s).map(|_| small_rational(rng)).collect()).collect();
    let c = a.iter().map(|r| r.iter().sum()).collect();
    let b = (0..s).map(|_| small_rational(rng)).collect();
    ButcherTableau::new(a, b, c, ()).unwrap()
}

/// Random explicit tableau with the row-sum condition.
pub fn random_explicit(rng: &mut ChaCha8Rng, s: usize) -> ButcherTableau<BigRational> {
    let lower: Vec<Vec<BigRational>> = (0..s).map(|i| (0..i).map(|_| small_rational(rng)).collect()).collect();
    let c = lower.iter().map(|r| r.iter().sum()).collect();
    let b = (0..s).map(|_| small_rational(rng)).collect();
    ButcherTableau::explicit(lower, b, c, ()).unwrap()
}

/// Random tableau with nonzero weights satisfying D(1):
/// Σ_i b_i a_ij = b_j (1 − c_j) for every j, with c the row sums of A.
///
/// The last row of A is solved for. In the explicit case column s is zero,
/// which forces c_s = 1; choosing b_s = Σ_{j<s} b_j (1 − 2c_j) makes the
/// solved last row sum to one.
pub fn random_admissible(rng: &mut ChaCha8Rng, s: usize, explicit: bool) -> ButcherTableau<BigRational> {
    let zero = q(0, 1);
    let one = q(1, 1);
    let two = q(2, 1);
    loop {
        let mut b: Vec<BigRational> = (0..s).map(|_| nonzero_rational(rng)).collect();
        let mut a: Vec<Vec<BigRational>> = (0..s)
            .map(|i| (0..s).map(|j| if explicit && j >= i { zero.clone() } else { small_rational(rng) }).collect())
            .collect();
        let c: Vec<BigRational> = a.iter().map(|r| r.iter().sum()).collect();
        let column = |a: &Vec<Vec<BigRational>>, b: &[BigRational], j: usize| -> BigRational {
            (0..s - 1).map(|i| &b[i] * &a[i][j]).sum()
        };
        if explicit {
            b[s - 1] = (0..s - 1).map(|j| &b[j] * (&one - &two * &c[j])).sum();
            if b[s - 1] == zero {
                continue;
            }
            for j in 0..s - 1 {
                a[s - 1][j] = (&b[j] * (&one - &c[j]) - column(&a, &b, j)) / &b[s - 1];
            }
        } else {
            for j in 0..s - 1 {
                a[s - 1][j] = (&b[j] * (&one - &c[j]) - column(&a, &b, j)) / &b[s - 1];
            }
            let partial: BigRational = a[s - 1][..s - 1].iter().sum();
            a[s - 1][s - 1] = ((&one - &partial) - column(&a, &b, s - 1) / &b[s - 1]) / &two;
        }
        let c: Vec<BigRational> = a.iter().map(|r| r.iter().sum()).collect();
        let d1 = (0..s).all(|j| {
            let lhs: BigRational = (0..s).map(|i| &b[i] * &a[i][j]).sum();
            lhs == &b[j] * (&one - &c[j])
        });
        assert!(d1, "generator must produce D(1)");
        return ButcherTableau::new(a, b, c, ()).unwrap();
    }
}

/// Random valid parameters for the order-10 family: rational nodes in (0, 1)
/// and weights that are random rational multiples of the Lobatto weights.
pub fn random_family_params(rng: &mut ChaCha8Rng) -> rk10::family::FamilyParams {
    use rk10::family::{lobatto6, FamilyParams};
    use rk10::FieldElement as FE;
    let l = lobatto6();
    let unit = |rng: &mut ChaCha8Rng| {
        let d = rng.gen_range(3..=13);
        FE::ratio(rng.gen_range(1..d), d)
    };
    loop {
        let p = FamilyParams {
            c2: unit(rng),
            c4: unit(rng),
            c5: unit(rng),
            b10: &l.w[1] * &unit(rng),
            b12: &l.w[2] * &unit(rng),
            b13: &l.w[3] * &unit(rng),
            b14: &l.w[4] * &unit(rng),
        };
        if p.validate().is_ok() {
            return p;
        }
    }
}
