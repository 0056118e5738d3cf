//! Error coefficients, stability function, interval, zeros and region data.

mod common;

use common::{q, random_family_params};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rk10::analysis::*;
use rk10::family::{construct_unverified, reference_method};
use rk10::field::{digits_to_prec, Real};
use rk10::tableau::known::{classic_rk4, forward_euler, implicit_midpoint};
use rk10::trees::factorial;
use rk10::FieldElement as FE;

fn leading(x: &Real, n: usize) -> String {
    // Truncated (not rounded) significant digits, as printed in tables.
    let s = x.abs().to_sci(n + 4);
    let mant: String = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).take(n).collect();
    let exp = s.split('e').nth(1).unwrap().to_string();
    format!("{}.{}e{}", &mant[..1], &mant[1..], exp)
}

#[test]
fn reference_error_coefficients() {
    let t = &reference_method().tableau;
    let reps = error_coefficient_table(t, 10..=13, 60);
    for r in &reps[1..] {
        assert!(r.relative_disagreement() < 1e-40, "p = {}", r.p);
    }
    assert!(reps[0].tp_labelings.log10_abs().is_none_or(|l| l < -50.0));
    assert!(reps[0].tp.log10_abs().is_none_or(|l| l < -50.0), "T10 vanishes");
    assert_eq!(leading(&reps[1].tp, 3), "3.49e-6");
    assert_eq!(leading(&reps[2].tp, 3), "8.48e-6");
    assert_eq!(leading(&reps[3].tp, 4), "1.407e-5");
    assert_eq!(reps[1].contributions.len(), 1842);
}

#[test]
fn error_coefficient_of_low_order_methods() {
    // Forward Euler at p = 2: only the tree [•] with bΦ = 0, so T₂ = 1/2.
    let r = error_coefficients(&forward_euler(), 2, 30);
    assert_eq!(r.tp.to_fixed(20), "+0.50000000000000000000");
    // RK4 at p = 4 is exact.
    assert!(error_coefficients(&classic_rk4(), 4, 30).tp.is_zero() || error_coefficients(&classic_rk4(), 4, 30).tp.log10_abs().unwrap() < -25.0);
}

#[test]
fn stability_polynomials() {
    let e = stability_polynomial(&forward_euler()).unwrap();
    assert_eq!(e.coeffs, vec![q(1, 1), q(1, 1)]);
    assert_eq!(stability_polynomial(&implicit_midpoint()).unwrap_err(), AnalysisError::NotExplicit);
    let r = stability_polynomial(&reference_method().tableau).unwrap();
    assert_eq!(r.degree(), 15);
    for k in 0..=10 {
        assert_eq!(r.coeffs[k], FE::ratio(1, factorial(k) as i64), "r{k}");
    }
    assert_ne!(r.coeffs[11], FE::ratio(1, factorial(11) as i64));
}

#[test]
fn taylor_coefficients_on_random_member() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let t = construct_unverified(&random_family_params(&mut rng)).unwrap().tableau;
    let r = stability_polynomial(&t).unwrap();
    for k in 0..=10 {
        assert_eq!(r.coeffs[k], FE::ratio(1, factorial(k) as i64), "r{k}");
    }
}

#[test]
fn stability_intervals() {
    let e = stability_interval(&forward_euler(), 30).unwrap();
    assert_eq!(e.to_fixed(25), "-2.0000000000000000000000000");
    // RK4: R = 1 + z + z²/2 + z³/6 + z⁴/24 crosses −1 … +1 at z ≈ −2.7852935634.
    let rk4 = stability_interval(&classic_rk4(), 30).unwrap();
    assert!(rk4.to_fixed(10).starts_with("-2.7852935634"), "{}", rk4.to_fixed(12));

    let t = &reference_method().tableau;
    let digits = 40;
    let z = stability_interval(t, digits).unwrap();
    assert!(z.to_fixed(4).starts_with("-4.4293"), "{}", z.to_fixed(8));
    let prec = digits_to_prec(digits);
    let coeffs = stability_polynomial(t).unwrap().to_real(prec);
    let at = eval_real(&coeffs, &z).abs();
    let dev = (&at - &Real::from_int(1, prec)).abs();
    assert!(dev.log10_abs().is_none_or(|l| l < -(digits as f64) + 5.0));
    let zf = z.to_f64();
    let c64 = stability_polynomial(t).unwrap().to_f64();
    for k in 0..10_000 {
        let x = zf * (k as f64 + 0.5) / 10_000.0;
        let v = c64.iter().rev().fold(0.0, |acc, c| acc * x + c);
        assert!(v.abs() <= 1.0 + 1e-12, "|R({x})| = {}", v.abs());
    }
}

#[test]
fn zeros_of_stability_functions() {
    let prec = digits_to_prec(30);
    let euler: Vec<Real> = stability_polynomial(&forward_euler()).unwrap().to_real(prec);
    let z = polynomial_zeros(&euler, 30).unwrap();
    assert_eq!(z.len(), 1);
    assert!((&z[0].re + &Real::from_int(1, prec)).abs().log10_abs().is_none_or(|l| l < -28.0));

    let digits = 40;
    let prec = digits_to_prec(digits + 20);
    let r = stability_polynomial(&reference_method().tableau).unwrap();
    let coeffs = r.to_real(prec);
    let roots = polynomial_zeros(&coeffs, digits).unwrap();
    assert_eq!(roots.len(), 15);
    // Vieta: Π z = (−1)^15 r₀/r₁₅ and Σ z = −r₁₄/r₁₅.
    let prod = roots.iter().fold(Complex::real(Real::from_int(1, prec)), |acc, z| acc.mul(&Complex::new(z.re.with_prec(prec), z.im.with_prec(prec))));
    let expect_prod = -&(&coeffs[0] / &coeffs[15]);
    let rel = |a: &Real, b: &Real| (a - b).abs().log10_abs().map_or(f64::NEG_INFINITY, |d| d - b.log10_abs().unwrap());
    assert!(rel(&prod.re, &expect_prod) < -30.0);
    assert!(prod.im.log10_abs().is_none_or(|l| l < expect_prod.log10_abs().unwrap() - 30.0));
    let sum = roots.iter().fold(Real::zero(prec), |acc, z| &acc + &z.re.with_prec(prec));
    assert!(rel(&sum, &-&(&coeffs[14] / &coeffs[15])) < -30.0);
    // Real coefficients: non-real zeros come in conjugate pairs, and with odd
    // degree the number of real zeros is odd.
    let is_real = |z: &Complex| z.im.log10_abs().is_none_or(|l| l < -30.0);
    for z in roots.iter().filter(|z| !is_real(z)) {
        let conj = Complex::new(z.re.clone(), -&z.im);
        assert!(roots.iter().any(|w| w.sub(&conj).abs().log10_abs().is_none_or(|l| l < -30.0)));
    }
    assert_eq!(roots.iter().filter(|z| is_real(z)).count() % 2, 1);
    // Scaled by 1/10 they lie near the Szegő curve (qualitative: report distances).
    let curve = szego_curve(2000, 1.0).unwrap();
    let mut dist: Vec<f64> =
        roots.iter().map(|z| distance_to_polyline((z.re.to_f64() / 10.0, z.im.to_f64() / 10.0), &curve)).collect();
    dist.sort_by(f64::total_cmp);
    // A few zeros sit far from the curve (the degree exceeds the order);
    // the bulk follows it.
    assert!(dist[7] < 0.05, "median distance {}", dist[7]);
}

#[test]
fn szego_curve_properties() {
    let c = szego_curve(400, 1.0).unwrap();
    assert!(c.iter().any(|&(x, y)| (x - 1.0).abs() < 1e-12 && y.abs() < 1e-12), "z = 1 on the curve");
    for k in 0..=400 {
        let (a, b) = (c[k], c[400 - k]);
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 + b.1).abs() < 1e-12);
    }
    for &(x, y) in &c {
        let z = num_complex::Complex64::new(x, y);
        assert!(((z * (1.0 - z).exp()).norm() - 1.0).abs() < 1e-9);
    }
    // Oracle: Newton on r·e^{1+r} = 1.
    let mut r = 0.3_f64;
    for _ in 0..50 {
        let f = r * (1.0 + r).exp() - 1.0;
        r -= f / ((1.0 + r) * (1.0 + r).exp());
    }
    assert!((szego_leftmost() + r).abs() < 1e-12);
    let scaled = szego_curve(400, 10.0).unwrap();
    assert!((scaled[0].0 - 10.0 * c[0].0).abs() < 1e-9);
}

#[test]
fn region_data() {
    let euler = stability_polynomial(&forward_euler()).unwrap().to_f64();
    let w = Window { xmin: -2.5, xmax: 0.5, ymin: -1.5, ymax: 1.5 };
    let reg = region_samples(&euler, w, 121).unwrap();
    assert!(!reg.boundary.is_empty());
    let cell = 3.0 / 120.0;
    for [a, b] in &reg.boundary {
        for p in [a, b] {
            let d = ((p.0 + 1.0).powi(2) + p.1.powi(2)).sqrt();
            assert!((d - 1.0).abs() < cell, "boundary point off the circle");
        }
    }
    let point = region_samples(&euler, Window { xmin: 0.0, xmax: 0.0, ymin: 0.0, ymax: 0.0 }, 1).unwrap();
    assert_eq!(point.values, vec![vec![1.0]]);
    assert!(region_samples(&euler, w, 0).is_err());

    let t = &reference_method().tableau;
    let zr = stability_interval(t, 20).unwrap().to_f64();
    let c = stability_polynomial(t).unwrap().to_f64();
    let reg = region_samples(&c, Window { xmin: -5.0, xmax: 0.5, ymin: -0.5, ymax: 0.5 }, 221).unwrap();
    let cell = 5.5 / 220.0;
    let crossing = reg
        .boundary
        .iter()
        .flatten()
        .filter(|p| p.1.abs() < 1e-12)
        .map(|p| (p.0 - zr).abs())
        .fold(f64::INFINITY, f64::min);
    assert!(crossing < cell, "boundary meets the real axis near z_R");
    let text = write_region(&reg);
    assert!(text.lines().count() > 221 * 221);
}
