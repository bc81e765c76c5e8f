//! Two-phase revised primal simplex for `min cᵀx  s.t.  A x = b, x ≥ 0`.
//!
//! The constraint matrix is dense with few rows and many columns. Every
//! iteration re-solves with the current basis from scratch (LU with partial
//! pivoting), so no error accumulates across pivots. Pricing is Dantzig's
//! most-negative reduced cost; after a run of degenerate pivots it switches
//! to Bland's rule (lowest-index improving column, lowest-index leaving
//! variable among ratio ties), which cannot cycle.

use crate::linalg::{lu_solve, Matrix};
use crate::scalar::{max_abs, Scalar};
use crate::{Error, Result};

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 32;

#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    pub a: Matrix<T>,
    pub b: Vec<T>,
    pub cost: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// Basic columns at the optimum (artificial columns excluded).
    pub basis: Vec<usize>,
    pub pivots: usize,
}

/// Constraint data with artificial identity columns appended after the
/// structural ones.
struct Revised<'a, T> {
    a: &'a Matrix<T>,
    /// Row signs making the right-hand side nonnegative.
    sign: Vec<T>,
    b: Vec<T>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
    pivots: usize,
    max_pivots: usize,
}

impl<T: Scalar> Revised<'_, T> {
    fn entry(&self, i: usize, j: usize) -> T {
        if j < self.cols {
            self.sign[i] * self.a.get(i, j)
        } else if j - self.cols == i {
            T::one()
        } else {
            T::zero()
        }
    }

    fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.entry(i, j)).collect()
    }

    fn basis_matrix(&self) -> Matrix<T> {
        Matrix::from_fn(self.rows, self.rows, |i, k| self.entry(i, self.basis[k]))
    }

    fn basic_solution(&self) -> Result<Vec<T>> {
        lu_solve(&self.basis_matrix(), &self.b).map_err(|_| singular_basis())
    }

    /// Pivots until no column in `0..allowed` prices out negative.
    fn optimize(&mut self, cost: &dyn Fn(usize) -> T, allowed: usize) -> Result<()> {
        let eps = T::epsilon().sqrt() * T::lit(1e-3);
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            let bm = self.basis_matrix();
            let xb = lu_solve(&bm, &self.b).map_err(|_| singular_basis())?;
            let cb: Vec<T> = self.basis.iter().map(|&j| cost(j)).collect();
            let y = lu_solve(&bm.transpose(), &cb).map_err(|_| singular_basis())?;
            let y_scale = T::one() + max_abs(&y);

            let mut entering: Option<(usize, T)> = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let yaj: T = (0..self.rows).map(|i| y[i] * self.entry(i, j)).sum();
                let rc = cost(j) - yaj;
                if rc >= -eps * y_scale {
                    continue;
                }
                if bland {
                    entering = Some((j, rc));
                    break;
                }
                if entering.map_or(true, |(_, best)| rc < best) {
                    entering = Some((j, rc));
                }
            }
            let Some((q, _)) = entering else {
                return Ok(());
            };

            let d = lu_solve(&bm, &self.column(q)).map_err(|_| singular_basis())?;
            let d_tol = eps * (T::one() + max_abs(&d));
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows {
                if d[i] <= d_tol {
                    continue;
                }
                let ratio = xb[i].max(T::zero()) / d[i];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        let tie = (ratio - lr).abs() <= eps * (T::one() + lr.abs());
                        if (!tie && ratio < lr) || (tie && self.basis[i] < self.basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
            let (row, step) = leave.ok_or(Error::Unbounded)?;
            if self.pivots >= self.max_pivots {
                return Err(Error::NumericalFailure(format!(
                    "simplex exceeded {} pivots",
                    self.max_pivots
                )));
            }
            if step <= eps {
                degenerate += 1;
                if degenerate >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.basis[row] = q;
            self.pivots += 1;
        }
    }
}

fn singular_basis() -> Error {
    Error::NumericalFailure("basis matrix became singular".into())
}

impl<T: Scalar> LinearProgram<T> {
    pub fn solve(&self) -> Result<LpSolution<T>> {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        assert_eq!(self.b.len(), rows, "rhs length");
        assert_eq!(self.cost.len(), cols, "cost length");
        let sign: Vec<T> = self
            .b
            .iter()
            .map(|&v| if v < T::zero() { -T::one() } else { T::one() })
            .collect();
        let b: Vec<T> = self.b.iter().zip(&sign).map(|(&v, &s)| v * s).collect();
        let mut lp = Revised {
            a: &self.a,
            sign,
            b,
            rows,
            cols,
            basis: (cols..cols + rows).collect(),
            pivots: 0,
            max_pivots: 50 * (cols + rows) + 10_000,
        };

        // phase one: minimize the sum of artificials
        lp.optimize(&|j| if j >= cols { T::one() } else { T::zero() }, cols + rows)?;
        let xb = lp.basic_solution()?;
        let infeasibility: T = lp
            .basis
            .iter()
            .zip(&xb)
            .filter(|(&j, _)| j >= cols)
            .map(|(_, &v)| v.abs())
            .sum();
        let eps = T::epsilon().sqrt() * T::lit(1e-3);
        if infeasibility > eps * (T::one() + max_abs(&lp.b)) {
            return Err(Error::Infeasible);
        }
        // swap zero-level artificials for structural columns where possible
        for row in 0..rows {
            if lp.basis[row] < cols {
                continue;
            }
            let bm = lp.basis_matrix();
            let mut e = vec![T::zero(); rows];
            e[row] = T::one();
            // row `row` of B⁻¹
            let Ok(r) = lu_solve(&bm.transpose(), &e) else { continue };
            let candidate = (0..cols).filter(|j| !lp.basis.contains(j)).find(|&j| {
                let v: T = (0..rows).map(|i| r[i] * lp.entry(i, j)).sum();
                v.abs() > eps
            });
            if let Some(j) = candidate {
                lp.basis[row] = j;
            }
        }

        let cost = &self.cost;
        // artificials left in the basis sit on redundant rows; pricing them at
        // zero keeps them at level zero
        lp.optimize(&|j| if j < cols { cost[j] } else { T::zero() }, cols)?;

        let xb = lp.basic_solution()?;
        let mut x = vec![T::zero(); cols];
        for (&j, &v) in lp.basis.iter().zip(&xb) {
            if j < cols {
                x[j] = v.max(T::zero());
            }
        }
        let objective = x.iter().zip(&self.cost).map(|(&xi, &ci)| xi * ci).sum();
        Ok(LpSolution {
            x,
            objective,
            basis: lp.basis.into_iter().filter(|&j| j < cols).collect(),
            pivots: lp.pivots,
        })
    }
}
