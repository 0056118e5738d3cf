//! Simultaneous polynomial root finding (Aberth–Ehrlich iteration).

use crate::field::{digits_to_prec, Real};

use super::{eval_complex, AnalysisError, Complex};

/// p(z) and p′(z) by Horner's scheme.
fn eval_with_derivative(coeffs: &[Real], z: &Complex) -> (Complex, Complex) {
    let prec = z.prec();
    let mut p = Complex::zero(prec);
    let mut dp = Complex::zero(prec);
    for k in coeffs.iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(&Complex::real(k.clone()));
    }
    (p, dp)
}

/// log10 of |p(z)| relative to Σ|a_k||z|^k.
fn relative_residual(coeffs: &[Real], z: &Complex) -> f64 {
    let prec = z.prec();
    let r = z.abs();
    let scale = coeffs.iter().rev().fold(Real::zero(prec), |acc, k| &(&acc * &r) + &k.abs());
    let p = eval_complex(coeffs, z).abs();
    match (p.log10_abs(), scale.log10_abs()) {
        (None, _) => f64::NEG_INFINITY,
        (Some(a), Some(b)) => a - b,
        (Some(_), None) => f64::INFINITY,
    }
}

/// All complex zeros of Σ coeffs[k] z^k, accurate to about `digits` digits.
///
/// Iterates at `digits + 20` digits from points spread on a circle of the
/// geometric-mean root radius, then applies one Newton polish per root.
pub fn polynomial_zeros(coeffs: &[Real], digits: u32) -> Result<Vec<Complex>, AnalysisError> {
    let prec = digits_to_prec(digits + 20);
    let coeffs: Vec<Real> = coeffs.iter().map(|c| c.with_prec(prec)).collect();
    let n = coeffs.iter().rposition(|x| !x.is_zero()).unwrap_or(0);
    if n == 0 {
        return Err(AnalysisError::InvalidArgument("polynomial degree must be at least 1".into()));
    }
    let coeffs = coeffs[..=n].to_vec();
    // Zero roots split off exactly.
    let zeros_at_origin = coeffs.iter().position(|x| !x.is_zero()).unwrap_or(0);
    let reduced = &coeffs[zeros_at_origin..];
    let m = reduced.len() - 1;
    let mut roots: Vec<Complex> = Vec::with_capacity(n);
    if m > 0 {
        let ratio = (reduced[0].to_f64() / reduced[m].to_f64()).abs();
        let radius = ratio.powf(1.0 / m as f64).max(1e-3);
        let mut z: Vec<Complex> = (0..m)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.4;
                Complex::from_f64(radius * t.cos(), radius * t.sin(), prec)
            })
            .collect();
        let tol = -(digits as f64) - 10.0;
        let mut converged = false;
        for _ in 0..500 {
            let mut max_step = f64::NEG_INFINITY;
            for k in 0..m {
                let (p, dp) = eval_with_derivative(reduced, &z[k]);
                if p.norm_sqr().is_zero() {
                    continue;
                }
                let Some(w) = p.div(&dp) else { continue };
                let mut s = Complex::zero(prec);
                for j in 0..m {
                    if j != k {
                        if let Some(inv) = Complex::real(Real::from_int(1, prec)).div(&z[k].sub(&z[j])) {
                            s = s.add(&inv);
                        }
                    }
                }
                let denom = Complex::real(Real::from_int(1, prec)).sub(&w.mul(&s));
                let step = w.div(&denom).unwrap_or(w);
                let size = step.abs().log10_abs().unwrap_or(f64::NEG_INFINITY)
                    - z[k].abs().log10_abs().unwrap_or(0.0).max(0.0);
                max_step = max_step.max(size);
                z[k] = z[k].sub(&step);
            }
            if max_step < tol {
                converged = true;
                break;
            }
        }
        for zk in z.iter_mut() {
            let (p, dp) = eval_with_derivative(reduced, zk);
            if let Some(step) = p.div(&dp) {
                *zk = zk.sub(&step);
            }
        }
        let worst = z.iter().map(|zk| relative_residual(reduced, zk)).fold(f64::NEG_INFINITY, f64::max);
        if !converged || worst > -(digits as f64) {
            return Err(AnalysisError::NonConvergence { best_log10: worst });
        }
        roots.extend(z);
    }
    roots.extend((0..zeros_at_origin).map(|_| Complex::zero(prec)));
    let out_prec = digits_to_prec(digits);
    Ok(roots.into_iter().map(|z| Complex::new(z.re.with_prec(out_prec), z.im.with_prec(out_prec))).collect())
}
