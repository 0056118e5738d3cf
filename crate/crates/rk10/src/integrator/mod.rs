//! Fixed-step explicit Runge–Kutta integration at high precision, the
//! one-step circle tests and an observed-order measurement.

mod expr;

use num_rational::BigRational;
use num_traits::Zero;

use crate::analysis::{eval_complex, stability_polynomial, Complex};
use crate::field::{prec_to_digits, Real};
use crate::tableau::ButcherTableau;

pub use expr::{Expr, ExprError};

/// Integration failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegratorError {
    #[error("explicit stepping requires strictly lower-triangular A")]
    NotExplicit,
    #[error("{0}")]
    Rhs(#[from] ExprError),
    #[error("right-hand side is singular at the current state")]
    Singular,
    #[error("problem has no known exact solution")]
    NoExactSolution,
    #[error("one-step error underflows the working precision at h = {h}; raise --digits")]
    Underflow { h: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Right-hand side of x′ = f(t, x).
#[derive(Debug, Clone)]
pub enum Rhs {
    /// x′ = −y, y′ = x.
    LinearCircle,
    /// x′ = −y/(x² + y²), y′ = x/(x² + y²).
    NonlinearCircle,
    /// One expression per component over the variables `t, x₁, …, x_n`.
    Expressions(Vec<Expr>),
}

/// An initial value problem.
#[derive(Debug, Clone)]
pub struct OdeProblem {
    pub name: String,
    pub rhs: Rhs,
    pub t0: BigRational,
    pub x0: Vec<BigRational>,
    /// Whether the exact solution is (cos t, sin t).
    pub circle_solution: bool,
}

impl OdeProblem {
    fn circle(name: &str, rhs: Rhs) -> OdeProblem {
        OdeProblem {
            name: name.into(),
            rhs,
            t0: BigRational::zero(),
            x0: vec![BigRational::from_integer(1.into()), BigRational::zero()],
            circle_solution: true,
        }
    }

    /// x′ = −y, y′ = x from (1, 0).
    pub fn linear_circle() -> OdeProblem {
        Self::circle("linear-circle", Rhs::LinearCircle)
    }

    /// x′ = −y/(x² + y²), y′ = x/(x² + y²) from (1, 0).
    pub fn nonlinear_circle() -> OdeProblem {
        Self::circle("nonlinear-circle", Rhs::NonlinearCircle)
    }

    /// A user system: `vars` name the state components, `rhs[k]` is the
    /// derivative of `vars[k]` and may also use `t`.
    pub fn from_expressions(vars: &[&str], rhs: &[&str], x0: Vec<BigRational>) -> Result<OdeProblem, IntegratorError> {
        if vars.len() != rhs.len() || vars.len() != x0.len() || vars.is_empty() {
            return Err(IntegratorError::InvalidArgument(
                "need one right-hand side and one initial value per variable".into(),
            ));
        }
        let names: Vec<String> = std::iter::once("t").chain(vars.iter().copied()).map(String::from).collect();
        let exprs = rhs.iter().map(|s| Expr::parse(s, &names)).collect::<Result<_, _>>()?;
        Ok(OdeProblem {
            name: "expr".into(),
            rhs: Rhs::Expressions(exprs),
            t0: BigRational::zero(),
            x0,
            circle_solution: false,
        })
    }

    pub fn dimension(&self) -> usize {
        self.x0.len()
    }

    /// Initial state at the given precision.
    pub fn initial(&self, prec: u32) -> (Real, Vec<Real>) {
        (Real::from_rational(&self.t0, prec), self.x0.iter().map(|v| Real::from_rational(v, prec)).collect())
    }

    /// f(t, x).
    pub fn eval(&self, t: &Real, x: &[Real]) -> Result<Vec<Real>, IntegratorError> {
        match &self.rhs {
            Rhs::LinearCircle => Ok(vec![-&x[1], x[0].clone()]),
            Rhs::NonlinearCircle => {
                let r2 = &(&x[0] * &x[0]) + &(&x[1] * &x[1]);
                let inv = r2.recip().ok_or(IntegratorError::Singular)?;
                Ok(vec![-&(&x[1] * &inv), &x[0] * &inv])
            }
            Rhs::Expressions(es) => {
                let vals: Vec<Real> = std::iter::once(t.clone()).chain(x.iter().cloned()).collect();
                es.iter().map(|e| e.eval(&vals).map_err(IntegratorError::from)).collect()
            }
        }
    }

    /// The exact solution at t, when known.
    pub fn exact(&self, t: &Real) -> Option<Vec<Real>> {
        self.circle_solution.then(|| {
            let (s, c) = t.sin_cos();
            vec![c, s]
        })
    }
}

fn axpy_into(acc: &mut [Real], k: &Real, v: &[Real]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = &*a + &(k * x);
    }
}

/// One explicit Runge–Kutta step: stages X_i = x + hΣ_j a_ij F_j computed in
/// sequence, then x + hΣ_j b_j F_j.
pub fn rk_step(
    tab: &ButcherTableau<Real>,
    problem: &OdeProblem,
    t: &Real,
    x: &[Real],
    h: &Real,
) -> Result<Vec<Real>, IntegratorError> {
    if !tab.is_explicit() {
        return Err(IntegratorError::NotExplicit);
    }
    let s = tab.stages();
    let mut f: Vec<Vec<Real>> = Vec::with_capacity(s);
    for i in 0..s {
        let mut xi = x.to_vec();
        for j in 0..i {
            let a = &tab.a()[i][j];
            if !a.is_zero() {
                axpy_into(&mut xi, &(h * a), &f[j]);
            }
        }
        let ti = t + &(h * &tab.c()[i]);
        f.push(problem.eval(&ti, &xi)?);
    }
    let mut out = x.to_vec();
    for (j, fj) in f.iter().enumerate() {
        let b = &tab.b()[j];
        if !b.is_zero() {
            axpy_into(&mut out, &(h * b), fj);
        }
    }
    Ok(out)
}

/// `n_steps` equal steps from the initial point to `t_end`; returns the
/// initial point followed by every step endpoint.
pub fn integrate(
    tab: &ButcherTableau<Real>,
    problem: &OdeProblem,
    t_end: &Real,
    n_steps: usize,
) -> Result<Vec<(Real, Vec<Real>)>, IntegratorError> {
    if n_steps == 0 {
        return Err(IntegratorError::InvalidArgument("n_steps must be at least 1".into()));
    }
    let prec = t_end.prec();
    let (t0, mut x) = problem.initial(prec);
    let h = &(t_end - &t0) / &Real::from_int(n_steps as u64, prec);
    let mut out = vec![(t0.clone(), x.clone())];
    for k in 0..n_steps {
        // t from t₀ + k·h each step, so no rounding accumulates in t.
        let t = &t0 + &(&h * &Real::from_int(k as u64, prec));
        x = rk_step(tab, problem, &t, &x, &h)?;
        out.push((&t0 + &(&h * &Real::from_int(k as u64 + 1, prec)), x.clone()));
    }
    Ok(out)
}

/// Observed local order: one-step errors at h₀/2ᵏ and their log–log slope.
#[derive(Debug, Clone)]
pub struct OrderMeasurement {
    pub steps: Vec<Real>,
    pub errors: Vec<Real>,
    /// Least-squares slope of log‖error‖ against log h (≈ p + 1).
    pub slope: f64,
}

/// Measures the local order by step halving from the initial point of a
/// problem with a known solution (`levels` step sizes h₀, h₀/2, …).
pub fn measure_order(
    tab: &ButcherTableau<Real>,
    problem: &OdeProblem,
    h0: &Real,
    levels: usize,
) -> Result<OrderMeasurement, IntegratorError> {
    if levels < 3 {
        return Err(IntegratorError::InvalidArgument("need at least 3 levels".into()));
    }
    let prec = h0.prec();
    let floor = -(prec_to_digits(prec) as f64) + 5.0;
    let (t0, x0) = problem.initial(prec);
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    let mut pts = Vec::new();
    for k in 0..levels {
        let h = h0.mul_pow2(-(k as i64));
        let x = rk_step(tab, problem, &t0, &x0, &h)?;
        let exact = problem.exact(&(&t0 + &h)).ok_or(IntegratorError::NoExactSolution)?;
        let err2 = x.iter().zip(&exact).fold(Real::zero(prec), |acc, (a, b)| {
            let d = a - b;
            &acc + &(&d * &d)
        });
        let err = err2.sqrt().expect("nonnegative");
        let le = err.log10_abs().filter(|&l| l > floor).ok_or_else(|| IntegratorError::Underflow { h: h.to_sci(6) })?;
        pts.push((h.log10_abs().expect("nonzero step"), le));
        steps.push(h);
        errors.push(err);
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(OrderMeasurement { steps, errors, slope: sxy / sxx })
}

/// One step of size h on the linear circle from (1, 0) equals R(ih) in the
/// complex plane, to within 10^(5 − digits) at the working precision.
pub fn linear_step_identity_check(tab: &ButcherTableau<Real>, h: &Real) -> Result<bool, IntegratorError> {
    let prec = h.prec();
    let problem = OdeProblem::linear_circle();
    let (t0, x0) = problem.initial(prec);
    let x = rk_step(tab, &problem, &t0, &x0, h)?;
    let coeffs = stability_polynomial(tab).map_err(|_| IntegratorError::NotExplicit)?.to_real(prec);
    let r = eval_complex(&coeffs, &Complex::new(Real::zero(prec), h.clone()));
    let diff = Complex::new(&x[0] - &r.re, &x[1] - &r.im).abs();
    let tol = -(prec_to_digits(prec) as f64) + 5.0;
    Ok(diff.log10_abs().is_none_or(|l| l <= tol))
}
