//! Subcommand bodies. Each returns the text of its primary output; notes
//! for the user go to standard error.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_rational::BigRational;
use rk10::analysis::{
    error_coefficient_table, polynomial_zeros, region_samples, stability_interval, stability_polynomial,
    szego_curve, write_region, Window,
};
use rk10::duality;
use rk10::family::{
    c6_constants, c6_simplified, closing_ratio, construct_detailed, match_constants, named_constants,
    reference_method, FamilyParams,
};
use rk10::field::{digits_to_prec, parse_decimal_rational};
use rk10::integrator::{measure_order, rk_step, Expr, OdeProblem};
use rk10::io::{golden, read_tableau, reference_listing, write_decimal, write_exact, Mode, TableauFile};
use rk10::tableau::{check_bcd, cluster_analysis, verify_order};
use rk10::trees::Forest;
use rk10::{ButcherTableau, FieldElement, Real, Scalar};

use crate::{Problem, TableauSource};

/// Flags shared by every subcommand.
pub struct Global {
    pub exact: bool,
    pub digits: Option<u32>,
}

impl Global {
    fn digits_or(&self, default: u32) -> u32 {
        self.digits.unwrap_or(default)
    }
}

const DEFAULT_DIGITS: u32 = 40;
const LISTING_DIGITS: u32 = 90;

/// Writes the primary output to a file or standard output.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(g: &Global, src: &TableauSource) -> Result<TableauFile> {
    if src.reference {
        // The exact construction is only needed for exact work.
        return Ok(if g.exact {
            TableauFile::Exact(reference_method().tableau.clone())
        } else {
            TableauFile::Decimal(reference_listing())
        });
    }
    let path = src.tableau.as_ref().expect("clap enforces a source");
    Ok(read_tableau(path, Mode::Auto)?)
}

/// Runs `f` on the tableau in exact or numeric form, per `--exact`.
macro_rules! with_scalar {
    ($g:expr, $file:expr, |$tab:ident| $body:expr) => {{
        if $g.exact {
            let $tab = $file.to_field();
            $body
        } else {
            let $tab = $file.to_real(digits_to_prec($g.digits_or(DEFAULT_DIGITS)));
            $body
        }
    }};
}

fn sci<S: Scalar>(x: &S) -> String {
    if x.is_zero() {
        "0".into()
    } else {
        x.to_real(256).to_sci(6)
    }
}

pub fn trees(max_order: usize, stats: bool) -> Result<String> {
    if max_order == 0 {
        bail!("--max-order must be at least 1");
    }
    let forest = Forest::new(max_order);
    let mut out = String::from("# order count\n");
    for (k, n) in forest.counts().iter().enumerate() {
        writeln!(out, "{} {}", k + 1, n)?;
    }
    writeln!(out, "total {}", forest.len())?;
    if stats {
        out.push_str("# tree order density symmetry labelings\n");
        for i in 0..forest.len() {
            let t = forest.tree(i);
            writeln!(out, "{} {} {} {} {}", t, t.order(), forest.density(i), forest.symmetry(i), forest.labelings(i))?;
        }
    }
    Ok(out)
}

fn verify_report<S: Scalar>(tab: &ButcherTableau<S>, order: usize, show: usize) -> Result<String> {
    let rep = verify_order(tab, order, None);
    let tol = tab.tol();
    let mut out = String::new();
    writeln!(out, "stages {}", tab.stages())?;
    writeln!(out, "order_checked {}", rep.order_checked)?;
    writeln!(out, "conditions {}", rep.residuals.len())?;
    writeln!(out, "achieved_order {}", rep.achieved_order)?;
    writeln!(out, "failures {}", rep.failures(tol))?;
    match rep.max_abs_log10 {
        Some(l) => writeln!(out, "max_abs_residual_log10 {l:.3}")?,
        None => writeln!(out, "max_abs_residual 0")?,
    }
    let shown: Vec<_> = rep.residuals.iter().filter(|(_, r)| !r.is_zero()).take(show).collect();
    if !shown.is_empty() {
        out.push_str("# tree order residual\n");
        for (t, r) in shown {
            writeln!(out, "{} {} {}", t, t.order(), sci(r))?;
        }
    }
    Ok(out)
}

pub fn verify(g: &Global, src: &TableauSource, order: usize, show: usize) -> Result<String> {
    if order == 0 {
        bail!("--order must be at least 1");
    }
    let file = load(g, src)?;
    with_scalar!(g, file, |tab| verify_report(&tab, order, show))
}

pub fn bcd(g: &Global, src: &TableauSource) -> Result<String> {
    let file = load(g, src)?;
    let b = with_scalar!(g, file, |tab| check_bcd(&tab));
    Ok(format!("{b}\n"))
}

fn cluster_report<S: Scalar>(tab: &ButcherTableau<S>) -> Result<String> {
    let rep = cluster_analysis(tab);
    let mut out = String::from("# stage c stage_order strong_stage_order weak_stage_coorder\n");
    let so = &rep.stages;
    for i in 0..tab.stages() {
        writeln!(
            out,
            "{} {} {} {} {}",
            i + 1,
            tab.c()[i].to_real(256).to_fixed(12),
            so.stage_order[i],
            so.strong_stage_order[i],
            so.weak_stage_coorder[i]
        )?;
    }
    out.push_str("# clusters\n");
    for c in &rep.clusters {
        writeln!(out, "{c}")?;
    }
    writeln!(out, "dimension_identity {}", if rep.dimension_identity_holds() { "holds" } else { "fails" })?;
    Ok(out)
}

pub fn clusters(g: &Global, src: &TableauSource) -> Result<String> {
    let file = load(g, src)?;
    with_scalar!(g, file, |tab| cluster_report(&tab))
}

pub fn dualize(g: &Global, src: &TableauSource) -> Result<String> {
    let file = load(g, src)?;
    let digits = g.digits_or(LISTING_DIGITS) as usize;
    // Decimal files are exact decimal fractions, so both forms dualize exactly.
    let (text, self_dual) = match &file {
        TableauFile::Decimal(t) if !g.exact => {
            let d = duality::dualize(t)?;
            (write_decimal(&d.dual, digits), d.self_dual)
        }
        _ => {
            let d = duality::dualize(&file.to_field())?;
            (write_exact(&d.dual), d.self_dual)
        }
    };
    eprintln!("self-dual: {}", if self_dual { "yes" } else { "no" });
    Ok(text)
}

fn parse_param(name: &str, s: &str) -> Result<FieldElement> {
    FieldElement::parse(s).map_err(|e| anyhow!("--{name}: {e}"))
}

pub fn derive(
    g: &Global,
    params: Option<[Option<String>; 7]>,
    exact_out: Option<&Path>,
    decimal_out: Option<&Path>,
    constants: bool,
) -> Result<String> {
    let owned;
    let cons = match params {
        None => reference_method(),
        Some(p) => {
            let names = ["c2", "c4", "c5", "b10", "b12", "b13", "b14"];
            let v: Vec<FieldElement> = names
                .iter()
                .zip(&p)
                .map(|(n, s)| parse_param(n, s.as_deref().expect("clap enforces parameters")))
                .collect::<Result<_>>()?;
            let params = FamilyParams {
                c2: v[0].clone(),
                c4: v[1].clone(),
                c5: v[2].clone(),
                b10: v[3].clone(),
                b12: v[4].clone(),
                b13: v[5].clone(),
                b14: v[6].clone(),
            };
            owned = construct_detailed(&params)?;
            &owned
        }
    };
    let digits = g.digits_or(LISTING_DIGITS) as usize;
    let decimal = write_decimal(&cons.tableau, digits);
    if let Some(p) = exact_out {
        std::fs::write(p, write_exact(&cons.tableau)).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = decimal_out {
        std::fs::write(p, &decimal).with_context(|| format!("writing {}", p.display()))?;
    }
    let prec = digits_to_prec(digits as u32 + 10);
    eprintln!("order 10 verified exactly; c6 = {}", cons.c6.to_real(prec).to_fixed(digits.min(30)));
    if constants {
        return constants_report(cons, digits, prec);
    }
    Ok(if exact_out.is_none() && decimal_out.is_none() { decimal } else { String::new() })
}

fn constants_report(cons: &rk10::family::Construction, digits: usize, prec: u32) -> Result<String> {
    let mut out = String::new();
    let fixed = |x: &FieldElement| x.to_real(prec).to_fixed(digits);
    writeln!(out, "Â {}", fixed(closing_ratio()?))?;
    writeln!(out, "a14,13 {}", fixed(&cons.a14_13))?;
    writeln!(out, "a8,7 {}", fixed(&cons.a87))?;
    writeln!(out, "a6,5 {}", fixed(&cons.a65))?;
    writeln!(out, "c6 {}", fixed(&cons.c6))?;
    for (n, v) in cons.gamma.named() {
        writeln!(out, "{n} {}", fixed(v))?;
    }
    let k = c6_constants()?;
    for (n, v) in ["U", "U′", "U″", "V", "V′", "V″"].iter().zip(k.as_array()) {
        writeln!(out, "{n} {}", fixed(v))?;
    }
    let simple = c6_simplified(k)?;
    writeln!(out, "U₁ {}", fixed(&simple.u1))?;
    writeln!(out, "U₂ {}", fixed(&simple.u2))?;
    writeln!(out, "c6_constants_match_published {}", k.matches_published)?;
    out.push_str("# published constants block: row, matching derived quantities\n");
    let matches = match_constants(&golden::constant_values(), &named_constants(cons)?);
    for m in matches {
        let names: Vec<String> = m
            .matches
            .iter()
            .map(|(n, kind)| match kind {
                rk10::family::MatchKind::Equal => n.clone(),
                rk10::family::MatchKind::Negated => format!("-{n}"),
            })
            .collect();
        writeln!(out, "{} {}", m.row, if names.is_empty() { "-".into() } else { names.join(" ") })?;
    }
    Ok(out)
}

/// Options of the `analyze` subcommand.
pub struct AnalyzeRequest {
    pub summary: bool,
    pub error_coeffs: Option<String>,
    pub stability_interval: bool,
    pub region: Option<Vec<f64>>,
    pub zeros: bool,
    pub szego: Option<Vec<f64>>,
}

fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let bad = || anyhow!("--error-coeffs expects P..Q or P, got `{s}`");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn positive_count(x: f64, what: &str) -> Result<usize> {
    if x.fract() != 0.0 || x < 1.0 {
        bail!("{what} must be a positive integer");
    }
    Ok(x as usize)
}

pub fn analyze(g: &Global, src: &TableauSource, mut req: AnalyzeRequest) -> Result<String> {
    if !req.summary
        && req.error_coeffs.is_none()
        && !req.stability_interval
        && req.region.is_none()
        && !req.zeros
        && req.szego.is_none()
    {
        req.summary = true;
        req.error_coeffs = Some("11..13".into());
        req.stability_interval = true;
    }
    let file = load(g, src)?;
    let digits = g.digits_or(DEFAULT_DIGITS);
    let prec = digits_to_prec(digits + 20);
    let tab = file.to_real(prec);
    let mut out = String::new();
    if req.summary {
        let field = file.to_field();
        let min_b = field.b().iter().filter(|x| !x.is_zero()).map(|x| x.to_real(prec).abs()).reduce(|p, q| if q < p { q } else { p });
        let max_a = field.a().iter().flatten().map(|x| x.to_real(prec).abs()).reduce(Real::max);
        writeln!(out, "stages {}", tab.stages())?;
        writeln!(out, "explicit {}", tab.is_explicit())?;
        if let Some(m) = min_b {
            let exact = field.b().iter().filter(|x| !x.is_zero()).find(|x| x.to_real(prec).abs() == m);
            // Show the exact value when it is a short fraction (decimal listings
            // carry long truncated ones).
            let shown = exact
                .and_then(|x| x.as_rational())
                .map(|r| if r < BigRational::from_integer(0.into()) { -r } else { r })
                .filter(|r| r.denom().to_string().len() <= 12)
                .map(|r| format!(" ({r})"))
                .unwrap_or_default();
            writeln!(out, "min_nonzero_abs_weight {}{shown}", m.to_fixed(digits as usize))?;
        }
        if let Some(m) = max_a {
            writeln!(out, "max_abs_a {}", m.to_fixed(digits as usize))?;
        }
    }
    if let Some(r) = &req.error_coeffs {
        out.push_str("# p T_p T_p(labelings)\n");
        for rep in error_coefficient_table(&tab, parse_range(r)?, digits + 20) {
            writeln!(out, "{} {} {}", rep.p, rep.tp.to_sci(8), rep.tp_labelings.to_sci(8))?;
        }
    }
    if req.stability_interval {
        let z = stability_interval(&tab, digits)?;
        writeln!(out, "z_R {}", z.to_fixed(digits as usize))?;
    }
    if req.zeros {
        let coeffs = stability_polynomial(&tab)?.to_real(prec);
        out.push_str("# zeros of R: re im\n");
        for z in polynomial_zeros(&coeffs, digits)? {
            writeln!(out, "{} {}", z.re.to_sci(digits as usize), z.im.to_sci(digits as usize))?;
        }
    }
    if let Some(v) = &req.region {
        let coeffs = stability_polynomial(&tab)?.to_f64();
        let window = Window { xmin: v[0], xmax: v[1], ymin: v[2], ymax: v[3] };
        let data = region_samples(&coeffs, window, positive_count(v[4], "region resolution")?)?;
        out.push_str(&write_region(&data));
    }
    if let Some(v) = &req.szego {
        out.push_str("# Szegő curve: x y\n");
        for (x, y) in szego_curve(positive_count(v[1], "Szegő resolution")?, v[0])? {
            writeln!(out, "{x:.12e} {y:.12e}")?;
        }
    }
    Ok(out)
}

/// Options of the `integrate` subcommand.
pub struct IntegrateRequest {
    pub problem: Problem,
    pub vars: Vec<String>,
    pub rhs: Vec<String>,
    pub x0: Vec<String>,
    pub h: String,
    pub steps: usize,
    pub measure_order: bool,
    pub levels: usize,
}

fn parse_value(s: &str) -> Result<BigRational> {
    if let Some((p, q)) = s.split_once('/') {
        let (p, q) = (parse_decimal_rational(p.trim()), parse_decimal_rational(q.trim()));
        if let (Ok(p), Ok(q)) = (p, q) {
            if q != BigRational::from_integer(0.into()) {
                return Ok(p / q);
            }
        }
        bail!("malformed initial value `{s}`");
    }
    parse_decimal_rational(s).map_err(|_| anyhow!("malformed initial value `{s}`"))
}

pub fn integrate(g: &Global, src: &TableauSource, req: IntegrateRequest) -> Result<String> {
    let digits = g.digits_or(DEFAULT_DIGITS);
    let prec = digits_to_prec(digits + 10);
    let problem = match req.problem {
        Problem::LinearCircle => OdeProblem::linear_circle(),
        Problem::NonlinearCircle => OdeProblem::nonlinear_circle(),
        Problem::Expr => {
            let vars: Vec<&str> = req.vars.iter().map(String::as_str).collect();
            let rhs: Vec<&str> = req.rhs.iter().map(String::as_str).collect();
            let x0 = req.x0.iter().map(|s| parse_value(s)).collect::<Result<Vec<_>>>()?;
            OdeProblem::from_expressions(&vars, &rhs, x0)?
        }
    };
    let h = Expr::parse(&req.h, &["pi".to_string()])
        .and_then(|e| e.eval(&[Real::pi(prec)]))
        .map_err(|e| anyhow!("--h: {e}"))?;
    let tab = load(g, src)?.to_real(prec);
    let mut out = String::new();
    let d = digits as usize;
    if req.measure_order {
        let m = measure_order(&tab, &problem, &h, req.levels)?;
        out.push_str("# h error\n");
        for (h, e) in m.steps.iter().zip(&m.errors) {
            writeln!(out, "{} {}", h.to_sci(8), e.to_sci(8))?;
        }
        // Local error behaves like h^(p+1).
        writeln!(out, "local_order {:.4}", m.slope)?;
        return Ok(out);
    }
    let (t0, mut x) = problem.initial(prec);
    let names: Vec<String> = match req.problem {
        Problem::Expr => req.vars.clone(),
        _ => vec!["x".into(), "y".into()],
    };
    writeln!(out, "# t {}", names.join(" "))?;
    let line = |t: &Real, x: &[Real]| {
        let xs: Vec<String> = x.iter().map(|v| v.to_fixed(d)).collect();
        format!("{} {}\n", t.to_fixed(d), xs.join(" "))
    };
    out.push_str(&line(&t0, &x));
    for k in 0..req.steps {
        let t = &t0 + &(&h * &Real::from_int(k as u64, prec));
        x = rk_step(&tab, &problem, &t, &x, &h)?;
        out.push_str(&line(&(&t0 + &(&h * &Real::from_int(k as u64 + 1, prec))), &x));
    }
    Ok(out)
}
