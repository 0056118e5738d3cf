//! Dense linear algebra over any [`Scalar`]: solves, spans and null spaces.
//!
//! Exact scalars pivot on the first nonzero entry; numeric scalars use
//! partial pivoting and a relative rank threshold.

use crate::scalar::{magnitude, Scalar, Tol};

/// The system matrix has no unique solution.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("singular linear system")]
pub struct Singular;

fn pick_pivot<S: Scalar>(rows: &[Vec<S>], col: usize, from: usize) -> Option<usize> {
    if S::EXACT {
        (from..rows.len()).find(|&i| !rows[i][col].is_zero())
    } else {
        (from..rows.len())
            .filter(|&i| !rows[i][col].is_zero())
            .max_by(|&a, &b| magnitude(&rows[a][col]).total_cmp(&magnitude(&rows[b][col])))
    }
}

/// Solves the square system `m x = rhs`.
///
/// In numeric mode a pivot smaller than 10^(−digits/2) times the largest
/// entry of its column counts as zero.
pub fn solve<S: Scalar>(m: &[Vec<S>], rhs: &[S]) -> Result<Vec<S>, Singular> {
    let n = m.len();
    assert_eq!(rhs.len(), n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let ctx = rhs[0].ctx();
    let rank_tol = Tol::rank_for::<S>(&ctx);
    let mut a: Vec<Vec<S>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            assert_eq!(row.len(), n);
            let mut v = row.clone();
            v.push(r.clone());
            v
        })
        .collect();
    for k in 0..n {
        let p = pick_pivot(&a, k, k).ok_or(Singular)?;
        if !S::EXACT {
            let scale = (0..n).map(|i| magnitude(&a[i][k])).fold(f64::NEG_INFINITY, f64::max);
            if magnitude(&a[p][k]) < scale + rank_tol.0 {
                return Err(Singular);
            }
        }
        a.swap(k, p);
        let inv = a[k][k].inv().ok_or(Singular)?;
        for j in k..=n {
            a[k][j] = a[k][j].mul(&inv);
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in k..=n {
                if a[k][j].is_zero() {
                    continue;
                }
                let t = f.mul(&a[k][j]);
                a[i][j] = a[i][j].sub(&t);
            }
        }
    }
    Ok(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Incrementally built basis of a subspace of `S^dim`.
///
/// Keeps the inserted independent vectors in insertion order alongside a
/// reduced echelon copy used for membership tests.
#[derive(Debug, Clone)]
pub struct Span<S: Scalar> {
    dim: usize,
    basis: Vec<Vec<S>>,
    echelon: Vec<(usize, Vec<S>)>,
    tol: Tol,
    zero: Tol,
}

impl<S: Scalar> Span<S> {
    /// Empty span in `S^dim`; `rank_tol` is the relative threshold (ignored
    /// for exact scalars).
    pub fn new(dim: usize, rank_tol: Tol) -> Span<S> {
        Span { dim, basis: Vec::new(), echelon: Vec::new(), tol: rank_tol, zero: Tol(f64::NEG_INFINITY) }
    }

    /// Empty span using the context's rank threshold; numeric vectors whose
    /// entries are all below the context's zero tolerance count as zero.
    pub fn for_ctx(dim: usize, ctx: &S::Ctx) -> Span<S> {
        Span { zero: Tol::default_for::<S>(ctx), ..Span::new(dim, Tol::rank_for::<S>(ctx)) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Selected independent generators, in insertion order.
    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    fn reduce(&self, v: &[S]) -> Vec<S> {
        let mut r = v.to_vec();
        for (p, row) in &self.echelon {
            if r[*p].is_zero() {
                continue;
            }
            let f = r[*p].clone();
            for j in 0..self.dim {
                if !row[j].is_zero() {
                    r[j] = r[j].sub(&f.mul(&row[j]));
                }
            }
            // The pivot entry is eliminated exactly by construction.
            r[*p] = S::zero(&f.ctx());
        }
        r
    }

    fn negligible_residual(&self, v: &[S], r: &[S]) -> bool {
        if S::EXACT {
            return r.iter().all(Scalar::is_zero);
        }
        let scale = v.iter().map(magnitude).fold(f64::NEG_INFINITY, f64::max);
        let res = r.iter().map(magnitude).fold(f64::NEG_INFINITY, f64::max);
        res == f64::NEG_INFINITY || res < scale + self.tol.0 || res <= self.zero.0
    }

    /// Whether `v` lies in the span.
    pub fn contains(&self, v: &[S]) -> bool {
        let r = self.reduce(v);
        self.negligible_residual(v, &r)
    }

    /// Adds `v` if it is independent of the current basis; returns whether it
    /// was added.
    pub fn insert(&mut self, v: &[S]) -> bool {
        assert_eq!(v.len(), self.dim);
        if self.basis.len() == self.dim {
            return false;
        }
        let r = self.reduce(v);
        if self.negligible_residual(v, &r) {
            return false;
        }
        let p = if S::EXACT {
            r.iter().position(|x| !x.is_zero()).unwrap()
        } else {
            (0..self.dim).max_by(|&a, &b| magnitude(&r[a]).total_cmp(&magnitude(&r[b]))).unwrap()
        };
        let inv = r[p].inv().expect("nonzero pivot");
        let mut row: Vec<S> = r.iter().map(|x| x.mul(&inv)).collect();
        row[p] = S::one(&inv.ctx());
        // Keep earlier rows reduced with respect to the new pivot.
        for (_, other) in &mut self.echelon {
            if other[p].is_zero() {
                continue;
            }
            let f = other[p].clone();
            for j in 0..self.dim {
                if !row[j].is_zero() {
                    other[j] = other[j].sub(&f.mul(&row[j]));
                }
            }
            other[p] = S::zero(&f.ctx());
        }
        self.echelon.push((p, row));
        self.basis.push(v.to_vec());
        true
    }

    /// Whether every basis vector of `other` lies in this span.
    pub fn contains_span(&self, other: &Span<S>) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }
}

/// Basis of the null space `{x : m x = 0}` of an r×n matrix (exact or numeric).
pub fn nullspace<S: Scalar>(m: &[Vec<S>], n: usize, ctx: &S::Ctx) -> Vec<Vec<S>> {
    let rank_tol = Tol::rank_for::<S>(ctx);
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == a.len() {
            break;
        }
        let Some(p) = pick_pivot(&a, col, row) else { continue };
        if !S::EXACT {
            let scale = a.iter().flat_map(|r| r.iter()).map(magnitude).fold(f64::NEG_INFINITY, f64::max);
            if magnitude(&a[p][col]) < scale + rank_tol.0 {
                continue;
            }
        }
        a.swap(row, p);
        let inv = a[row][col].inv().unwrap();
        for j in 0..n {
            a[row][j] = a[row][j].mul(&inv);
        }
        for i in 0..a.len() {
            if i == row || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..n {
                let t = f.mul(&a[row][j]);
                a[i][j] = a[i][j].sub(&t);
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(ctx); n];
            v[f] = S::one(ctx);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = a[r][f].neg();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn solve_small_rational() {
        let m = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        let x = solve(&m, &[q(3, 1), q(5, 1)]).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
        let s = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert_eq!(solve(&s, &[q(1, 1), q(1, 1)]), Err(Singular));
    }

    #[test]
    fn span_membership() {
        let mut sp: Span<BigRational> = Span::new(3, Tol(0.0));
        assert!(sp.insert(&[q(1, 1), q(1, 1), q(0, 1)]));
        assert!(sp.insert(&[q(0, 1), q(1, 1), q(1, 1)]));
        assert!(!sp.insert(&[q(1, 1), q(2, 1), q(1, 1)]));
        assert!(sp.contains(&[q(2, 1), q(1, 1), q(-1, 1)]));
        assert!(!sp.contains(&[q(0, 1), q(0, 1), q(1, 1)]));
        assert_eq!(sp.dim(), 2);
    }

    #[test]
    fn nullspace_dimension() {
        let m = vec![vec![q(1, 1), q(2, 1), q(3, 1)], vec![q(2, 1), q(4, 1), q(6, 1)]];
        let ns = nullspace(&m, 3, &());
        assert_eq!(ns.len(), 2);
        for v in ns {
            let dot: BigRational = m[0].iter().zip(&v).map(|(a, b)| a * b).sum();
            assert_eq!(dot, q(0, 1));
        }
    }
}
