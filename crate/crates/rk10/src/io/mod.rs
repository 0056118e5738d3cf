//! Tableau file formats and embedded reference data.
//!
//! *Decimal* files list numbers one per line: the s nodes, the s weights,
//! then A row by row — only the strictly lower triangle (s(s−1)/2 numbers)
//! for explicit methods, or all s² entries otherwise. Blank lines and lines
//! starting with `#` are ignored. Numbers are read exactly as decimal
//! fractions.
//!
//! *Exact* files start with a header `s=<int> mode=exact` followed by the
//! entries in the same order, one field element per line: an
//! `xi: n/d n/d n/d n/d n/d n/d n/d n/d` coordinate block (the output form),
//! nine integers, or a rational.

pub mod golden;

use std::path::Path;

use num_rational::BigRational;

use crate::field::{digits_to_prec, parse_decimal_rational, FieldElement, Real};
use crate::scalar::Scalar;
use crate::tableau::ButcherTableau;

/// File-level failures, with 1-based line numbers where applicable.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {msg}")]
    File { path: String, msg: String },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("cannot infer stage count from {count} numbers")]
    StageCount { count: usize },
    #[error("line {line}: expected {expected} entries for s = {s}, found {found}")]
    CountMismatch { line: usize, s: usize, expected: String, found: usize },
    #[error("invalid tableau: {0}")]
    Tableau(String),
}

/// Which format to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Decimal,
    Exact,
    /// Exact if the file starts with an `s=` header, decimal otherwise.
    Auto,
}

/// A tableau as read from a file.
#[derive(Debug, Clone)]
pub enum TableauFile {
    /// Decimal listing, held as exact decimal fractions.
    Decimal(ButcherTableau<BigRational>),
    Exact(ButcherTableau<FieldElement>),
}

impl TableauFile {
    pub fn stages(&self) -> usize {
        match self {
            TableauFile::Decimal(t) => t.stages(),
            TableauFile::Exact(t) => t.stages(),
        }
    }

    /// The tableau in ℚ(α, β) (decimal entries become rationals).
    pub fn to_field(&self) -> ButcherTableau<FieldElement> {
        match self {
            TableauFile::Decimal(t) => t.to_field(),
            TableauFile::Exact(t) => t.clone(),
        }
    }

    /// The tableau rounded to the given binary precision.
    pub fn to_real(&self, prec: u32) -> ButcherTableau<Real> {
        match self {
            TableauFile::Decimal(t) => t.to_real(prec),
            TableauFile::Exact(t) => t.to_real(prec),
        }
    }
}

/// Stage count and layout for `count` entries: explicit if
/// count = 2s + s(s−1)/2, full if count = 2s + s².
fn infer_shape(count: usize) -> Option<(usize, bool)> {
    (1..=count).find_map(|s| {
        if 2 * s + s * (s - 1) / 2 == count {
            Some((s, true))
        } else if 2 * s + s * s == count {
            Some((s, false))
        } else {
            None
        }
    })
}

fn assemble<S: Scalar>(entries: Vec<S>, s: usize, explicit: bool, ctx: S::Ctx) -> Result<ButcherTableau<S>, IoError> {
    let mut it = entries.into_iter();
    let c: Vec<S> = it.by_ref().take(s).collect();
    let b: Vec<S> = it.by_ref().take(s).collect();
    let tab = if explicit {
        let lower: Vec<Vec<S>> = (0..s).map(|i| it.by_ref().take(i).collect()).collect();
        ButcherTableau::explicit(lower, b, c, ctx)
    } else {
        let a: Vec<Vec<S>> = (0..s).map(|_| it.by_ref().take(s).collect()).collect();
        ButcherTableau::new(a, b, c, ctx)
    };
    tab.map_err(|e| IoError::Tableau(e.to_string()))
}

/// Content lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses a decimal listing.
pub fn parse_decimal(text: &str) -> Result<ButcherTableau<BigRational>, IoError> {
    let mut entries = Vec::new();
    for (line, l) in content_lines(text) {
        for tok in l.split_whitespace() {
            let v = parse_decimal_rational(tok)
                .map_err(|_| IoError::Malformed { line, msg: format!("malformed number `{tok}`") })?;
            entries.push(v);
        }
    }
    let (s, explicit) = infer_shape(entries.len()).ok_or(IoError::StageCount { count: entries.len() })?;
    assemble(entries, s, explicit, ())
}

/// Parses an exact file.
pub fn parse_exact(text: &str) -> Result<ButcherTableau<FieldElement>, IoError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(IoError::Malformed { line: 1, msg: "empty file".into() })?;
    let bad_header = || IoError::Malformed { line: hline, msg: "expected header `s=<int> mode=exact`".into() };
    let mut s = None;
    let mut mode_ok = false;
    for part in header.split_whitespace() {
        if let Some(v) = part.strip_prefix("s=") {
            s = Some(v.parse::<usize>().map_err(|_| bad_header())?);
        } else if part == "mode=exact" {
            mode_ok = true;
        } else {
            return Err(bad_header());
        }
    }
    let s = s.filter(|&s| s > 0 && mode_ok).ok_or_else(bad_header)?;
    let mut entries = Vec::new();
    let mut last = hline;
    for (line, l) in lines {
        let v = FieldElement::parse(l).map_err(|e| IoError::Malformed { line, msg: e.to_string() })?;
        entries.push(v);
        last = line;
    }
    let explicit_n = 2 * s + s * (s - 1) / 2;
    let full_n = 2 * s + s * s;
    let explicit = if entries.len() == explicit_n {
        true
    } else if entries.len() == full_n {
        false
    } else {
        return Err(IoError::CountMismatch {
            line: last,
            s,
            expected: format!("{explicit_n} or {full_n}"),
            found: entries.len(),
        });
    };
    assemble(entries, s, explicit, ())
}

/// Parses text in the given mode.
pub fn parse_tableau(text: &str, mode: Mode) -> Result<TableauFile, IoError> {
    let exact = match mode {
        Mode::Decimal => false,
        Mode::Exact => true,
        Mode::Auto => content_lines(text).next().is_some_and(|(_, l)| l.starts_with("s=")),
    };
    if exact {
        parse_exact(text).map(TableauFile::Exact)
    } else {
        parse_decimal(text).map(TableauFile::Decimal)
    }
}

/// Reads a tableau file.
pub fn read_tableau(path: &Path, mode: Mode) -> Result<TableauFile, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| IoError::File { path: path.display().to_string(), msg: e.to_string() })?;
    parse_tableau(&text, mode)
}

/// Entries in file order: c, b, then A (lower triangle if explicit).
fn entries<S: Scalar>(tab: &ButcherTableau<S>) -> Vec<&S> {
    let s = tab.stages();
    let mut out: Vec<&S> = tab.c().iter().chain(tab.b()).collect();
    for i in 0..s {
        let row = &tab.a()[i];
        out.extend(if tab.is_explicit() { &row[..i] } else { &row[..] });
    }
    out
}

/// Decimal listing with `digits` fractional digits per number.
pub fn write_decimal<S: Scalar>(tab: &ButcherTableau<S>, digits: usize) -> String {
    let prec = digits_to_prec(digits as u32 + 10);
    entries(tab).into_iter().map(|x| x.to_real(prec).to_fixed(digits) + "\n").collect()
}

/// Exact listing with `xi:` coordinate blocks.
pub fn write_exact(tab: &ButcherTableau<FieldElement>) -> String {
    let mut out = format!("s={} mode=exact\n", tab.stages());
    for x in entries(tab) {
        out.push_str(&x.to_xi_string());
        out.push('\n');
    }
    out
}

/// The embedded decimal listing of the reference method.
pub fn reference_listing() -> ButcherTableau<BigRational> {
    parse_decimal(golden::decimal_listing()).expect("embedded listing parses")
}

/// Writes a file in its own mode; `digits` applies to decimal files.
pub fn write_tableau(file: &TableauFile, digits: usize) -> String {
    match file {
        TableauFile::Decimal(t) => write_decimal(t, digits),
        TableauFile::Exact(t) => write_exact(t),
    }
}

/// The embedded reference data: the decimal listing and the rows of the
/// constants block.
pub fn embedded_golden() -> (&'static str, Vec<[num_bigint::BigInt; 9]>) {
    (golden::decimal_listing(), golden::constant_rows())
}
