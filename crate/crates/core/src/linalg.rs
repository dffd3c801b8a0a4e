//! Linear algebra over the truncated rings.

use crate::error::{Error, Result};
use crate::ring::{RingElem, UnitResult};

/// Minimal commutative-ring interface used by the division-free algorithms.
pub trait CRing: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl CRing for RingElem {
    fn zero_like(&self) -> Self {
        self.ctx().zero()
    }
    fn one_like(&self) -> Self {
        self.ctx().one()
    }
    fn add(&self, o: &Self) -> Self {
        RingElem::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RingElem::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RingElem::mul(self, o)
    }
    fn neg(&self) -> Self {
        RingElem::neg(self)
    }
    fn is_zero(&self) -> bool {
        RingElem::is_zero(self)
    }
}

pub type Matrix<R> = Vec<Vec<R>>;

pub fn mat_vec<R: CRing>(m: &Matrix<R>, v: &[R]) -> Vec<R> {
    m.iter()
        .map(|row| {
            let mut acc = v[0].zero_like();
            for (a, b) in row.iter().zip(v) {
                acc = acc.add(&a.mul(b));
            }
            acc
        })
        .collect()
}

/// Division-free determinant (Berkowitz).
pub fn det<R: CRing>(m: &Matrix<R>) -> R {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n), "square matrix required");
    let one = m[0][0].one_like();
    // characteristic polynomial coefficients of the leading r×r block
    let mut vect = vec![one.clone(), m[0][0].neg()];
    for r in 1..n {
        let a = &m[r][r];
        // t = [1, -a, -R C, -R A C, ..., -R A^{r-1} C]
        let mut t = vec![one.clone(), a.neg()];
        let mut col: Vec<R> = (0..r).map(|i| m[i][r].clone()).collect();
        for k in 0..r {
            let rc = (0..r).fold(one.zero_like(), |acc, j| acc.add(&m[r][j].mul(&col[j])));
            t.push(rc.neg());
            if k + 1 < r {
                col = (0..r)
                    .map(|i| (0..r).fold(one.zero_like(), |acc, j| acc.add(&m[i][j].mul(&col[j]))))
                    .collect();
            }
        }
        let next: Vec<R> = (0..r + 2)
            .map(|i| {
                let mut acc = one.zero_like();
                for j in 0..=i.min(r) {
                    acc = acc.add(&t[i - j].mul(&vect[j]));
                }
                acc
            })
            .collect();
        vect = next;
    }
    if n % 2 == 0 {
        vect[n].clone()
    } else {
        vect[n].neg()
    }
}

/// Solve a square system pivoting only on certified units.
pub fn linear_solve(m: &Matrix<RingElem>, b: &[RingElem]) -> Result<Vec<RingElem>> {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n) && b.len() == n, "square system required");
    let mut a: Matrix<RingElem> = m.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut found = None;
        for row in col..n {
            if let UnitResult::Unit(inv) = a[row][col].is_unit_with_inverse() {
                found = Some((row, inv));
                break;
            }
        }
        let (pr, inv) = found.ok_or(Error::NoSolution { column: col })?;
        a.swap(col, pr);
        rhs.swap(col, pr);
        for j in col..n {
            a[col][j] = a[col][j].mul(&inv);
        }
        rhs[col] = rhs[col].mul(&inv);
        for row in 0..n {
            if row == col || a[row][col].is_exact_zero() {
                continue;
            }
            let f = a[row][col].clone();
            for j in col..n {
                let v = f.mul(&a[col][j]);
                a[row][j] = a[row][j].sub(&v);
            }
            rhs[row] = rhs[row].sub(&f.mul(&rhs[col]));
        }
    }
    Ok(rhs)
}

/// Row-echelon form over a ring in which every nonzero element is `p^v`
/// times a unit (true for `L_1` at height 2, and for `Z/p^a`).
///
/// Full pivoting on the least `p`-adic valuation keeps every elimination
/// factor exact. Several right-hand sides can be solved against one
/// factorization.
pub struct EchelonSolver {
    rows: usize,
    cols: usize,
    /// reduced matrix augmented with the right-hand sides
    a: Matrix<RingElem>,
    nrhs: usize,
    /// pivot (row, original column, valuation, inverse of unit part)
    pivots: Vec<(usize, usize, u32, RingElem)>,
    stuck: Option<usize>,
}

impl EchelonSolver {
    /// `m` is `rows × cols`; `rhs` are column vectors of length `rows`.
    pub fn new(m: &Matrix<RingElem>, rhs: &[Vec<RingElem>]) -> EchelonSolver {
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut a: Matrix<RingElem> = m.clone();
        for (i, row) in a.iter_mut().enumerate() {
            for r in rhs {
                row.push(r[i].clone());
            }
        }
        let mut s = EchelonSolver { rows, cols, a, nrhs: rhs.len(), pivots: vec![], stuck: None };
        s.reduce();
        s
    }

    fn reduce(&mut self) {
        let width = self.cols + self.nrhs;
        let mut used_col = vec![false; self.cols];
        let mut r0 = 0;
        while r0 < self.rows {
            // least valuation in the remaining block
            let mut best: Option<(u32, usize, usize)> = None;
            for i in r0..self.rows {
                for j in 0..self.cols {
                    if used_col[j] {
                        continue;
                    }
                    if let Some(v) = self.a[i][j].p_valuation() {
                        if best.map_or(true, |(bv, _, _)| v < bv) {
                            best = Some((v, i, j));
                        }
                    }
                }
            }
            let Some((v, _, _)) = best else { break };
            // among entries of that valuation, take one whose unit part inverts
            let mut chosen = None;
            'search: for i in r0..self.rows {
                for j in 0..self.cols {
                    if used_col[j] || self.a[i][j].p_valuation() != Some(v) {
                        continue;
                    }
                    let w = self.a[i][j].div_p_pow(v).expect("valuation divides");
                    if let UnitResult::Unit(inv) = w.is_unit_with_inverse() {
                        chosen = Some((i, j, inv));
                        break 'search;
                    }
                }
            }
            let Some((pi, pj, winv)) = chosen else {
                self.stuck = Some(best.unwrap().2);
                break;
            };
            self.a.swap(r0, pi);
            used_col[pj] = true;
            for i in r0 + 1..self.rows {
                let Some(vi) = self.a[i][pj].p_valuation() else { continue };
                debug_assert!(vi >= v);
                let f = self.a[i][pj].div_p_pow(v).expect("min valuation").mul(&winv);
                for j in 0..width {
                    let t = f.mul(&self.a[r0][j]);
                    self.a[i][j] = self.a[i][j].sub(&t);
                }
            }
            self.pivots.push((r0, pj, v, winv));
            r0 += 1;
        }
    }

    /// Column that blocked elimination, if any.
    pub fn stuck_column(&self) -> Option<usize> {
        self.stuck
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Solve for the `k`-th right-hand side; `None` if it is not in the image.
    pub fn solution(&self, k: usize) -> Result<Option<Vec<RingElem>>> {
        if let Some(c) = self.stuck {
            return Err(Error::NoSolution { column: c });
        }
        let bcol = self.cols + k;
        let zero = self.a[0][0].zero_like();
        for i in self.pivots.len()..self.rows {
            if !self.a[i][bcol].is_zero() {
                return Ok(None);
            }
        }
        let mut x = vec![zero.clone(); self.cols];
        for &(r, c, v, ref winv) in self.pivots.iter().rev() {
            let mut acc = self.a[r][bcol].clone();
            for j in 0..self.cols {
                if j != c && !x[j].is_exact_zero() {
                    acc = acc.sub(&self.a[r][j].mul(&x[j]));
                }
            }
            match acc.div_p_pow(v) {
                Ok(q) => x[c] = q.mul(winv),
                Err(_) => return Ok(None),
            }
        }
        Ok(Some(x))
    }
}

/// Solve a possibly rectangular system `m · x = b`, returning `None` when `b`
/// is not in the image.
pub fn solve_in_span(m: &Matrix<RingElem>, b: &[RingElem]) -> Result<Option<Vec<RingElem>>> {
    EchelonSolver::new(m, &[b.to_vec()]).solution(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{RingCtx, RingSpec};
    use std::sync::Arc;

    fn lt() -> Arc<RingCtx> {
        RingCtx::new(RingSpec::lt_flavor(2, 2, 4, 1, 8, 6)).unwrap()
    }

    fn ints(r: &Arc<RingCtx>, m: &[&[i64]]) -> Matrix<RingElem> {
        m.iter().map(|row| row.iter().map(|&c| r.from_int(c)).collect()).collect()
    }

    #[test]
    fn berkowitz_matches_cofactor_expansion() {
        let r = RingCtx::new(RingSpec::e_flavor(5, 1, 6, 0)).unwrap();
        let m = ints(&r, &[&[2, 7, 1, 3], &[0, 4, 9, 2], &[5, 1, 1, 8], &[3, 3, 0, 6]]);
        assert_eq!(det(&m), r.from_int(420));
        let m1 = ints(&r, &[&[3]]);
        assert_eq!(det(&m1), r.from_int(3));
        let m2 = ints(&r, &[&[1, 2], &[3, 4]]);
        assert_eq!(det(&m2), r.from_int(-2));
    }

    #[test]
    fn identity_solve() {
        let r = lt();
        let id = ints(&r, &[&[1, 0], &[0, 1]]);
        let b = vec![r.var(1), r.from_int(3)];
        assert_eq!(linear_solve(&id, &b).unwrap(), b);
    }

    #[test]
    fn solve_with_inverted_u() {
        let r = lt();
        let u = r.var(1);
        let s = linear_solve(&vec![vec![u.clone()]], &[u.mul(&u)]).unwrap();
        assert_eq!(s, vec![u]);
    }

    #[test]
    fn non_unit_pivot_reports_column() {
        let r = lt();
        let m = ints(&r, &[&[2, 0], &[0, 1]]);
        assert_eq!(linear_solve(&m, &[r.one(), r.one()]), Err(Error::NoSolution { column: 0 }));
    }

    #[test]
    fn echelon_handles_zero_divisors() {
        let r = lt();
        let m = ints(&r, &[&[2, 4], &[6, 0]]);
        let b = vec![r.from_int(2), r.from_int(6)];
        let x = solve_in_span(&m, &b).unwrap().unwrap();
        assert_eq!(mat_vec(&m, &x), b);
        let bad = vec![r.from_int(1), r.zero()];
        assert!(solve_in_span(&m, &bad).unwrap().is_none());
    }

    #[test]
    fn echelon_rectangular() {
        let r = lt();
        let u = r.var(1);
        let m = vec![vec![u.clone()], vec![r.from_int(2)], vec![r.zero()]];
        let b = vec![u.mul(&u), u.scale(2), r.zero()];
        let x = solve_in_span(&m, &b).unwrap().unwrap();
        assert_eq!(x, vec![u]);
    }
}
