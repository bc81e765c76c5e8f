//! Small dense linear algebra: row-major matrices, LU with partial pivoting,
//! Gaussian elimination with complete pivoting, and Householder QR with
//! column pivoting. Sizes here never exceed a few thousand entries.

use crate::scalar::{max_abs, Scalar};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

/// Solves the square system `a x = b` by LU with partial pivoting.
/// Fails with `SingularSupport` when a pivot vanishes relative to the
/// matrix scale.
pub fn lu_solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "lu_solve needs a square matrix");
    assert_eq!(b.len(), n, "dimension mismatch");
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = max_abs(&m.data);
    let tiny = scale * T::epsilon() * T::from_count(n.max(1));
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| {
                m.get(i, k)
                    .abs()
                    .partial_cmp(&m.get(j, k).abs())
                    .expect("finite entries")
            })
            .expect("nonempty range");
        if m.get(p, k).abs() <= tiny {
            return Err(Error::SingularSupport(format!("zero pivot in column {k}")));
        }
        m.swap_rows(k, p);
        x.swap(k, p);
        let pivot = m.get(k, k);
        for i in k + 1..n {
            let f = m.get(i, k) / pivot;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = m.get(i, j) - f * m.get(k, j);
                m.set(i, j, v);
            }
            x[i] = x[i] - f * x[k];
        }
    }
    for k in (0..n).rev() {
        let s: T = (k + 1..n).map(|j| m.get(k, j) * x[j]).sum();
        x[k] = (x[k] - s) / m.get(k, k);
    }
    Ok(x)
}

/// Basic solution of a (possibly singular) square system by Gaussian
/// elimination with complete pivoting. Free variables are set to zero.
#[derive(Clone, Debug)]
pub struct PivotedSolution<T> {
    pub x: Vec<T>,
    pub rank: usize,
    /// `‖a x − b‖∞`.
    pub residual: T,
}

pub fn complete_pivot_solve<T: Scalar>(a: &Matrix<T>, b: &[T], rank_tol: T) -> PivotedSolution<T> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "complete_pivot_solve needs a square matrix");
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    let mut first_pivot = T::zero();
    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, T::zero());
        for i in k..n {
            for j in k..n {
                let v = m.get(i, j).abs();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if k == 0 {
            first_pivot = best;
        }
        if best.is_zero() || best <= rank_tol * first_pivot {
            break;
        }
        m.swap_rows(k, pi);
        rhs.swap(k, pi);
        m.swap_cols(k, pj);
        perm.swap(k, pj);
        let pivot = m.get(k, k);
        for i in k + 1..n {
            let f = m.get(i, k) / pivot;
            for j in k..n {
                let v = m.get(i, j) - f * m.get(k, j);
                m.set(i, j, v);
            }
            rhs[i] = rhs[i] - f * rhs[k];
        }
        rank += 1;
    }
    let mut y = vec![T::zero(); n];
    for k in (0..rank).rev() {
        let s: T = (k + 1..rank).map(|j| m.get(k, j) * y[j]).sum();
        y[k] = (rhs[k] - s) / m.get(k, k);
    }
    let mut x = vec![T::zero(); n];
    for (k, &p) in perm.iter().enumerate() {
        x[p] = y[k];
    }
    let ax = a.mul_vec(&x);
    let residual = ax
        .iter()
        .zip(b)
        .fold(T::zero(), |r, (&u, &v)| r.max((u - v).abs()));
    PivotedSolution { x, rank, residual }
}

/// Householder QR with column pivoting, `G Π = Q R`.
#[derive(Clone, Debug)]
pub struct PivotedQr<T> {
    /// Upper-trapezoidal factor, `min(m, n) × n`.
    r: Matrix<T>,
    perm: Vec<usize>,
    rank: usize,
}

impl<T: Scalar> PivotedQr<T> {
    /// Factorizes `g`; diagonal entries of `R` below `rank_tol · |R₀₀|` end the
    /// numerical rank.
    pub fn new(g: &Matrix<T>, rank_tol: T) -> Self {
        let (m, n) = (g.rows(), g.cols());
        let mut a = g.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let steps = m.min(n);
        let mut rank = 0;
        let mut r00 = T::zero();
        for k in 0..steps {
            let col_norm = |a: &Matrix<T>, j: usize| -> T {
                (k..m).map(|i| a.get(i, j) * a.get(i, j)).sum::<T>().sqrt()
            };
            let (mut pj, mut best) = (k, T::zero());
            for j in k..n {
                let v = col_norm(&a, j);
                if v > best {
                    best = v;
                    pj = j;
                }
            }
            a.swap_cols(k, pj);
            perm.swap(k, pj);
            if k == 0 {
                r00 = best;
            }
            if best.is_zero() || best <= rank_tol * r00 {
                break;
            }
            // reflector v = x − α e₁ with α = −sign(x₀)‖x‖
            let x0 = a.get(k, k);
            let alpha = if x0 >= T::zero() { -best } else { best };
            let mut v: Vec<T> = (k..m).map(|i| a.get(i, k)).collect();
            v[0] = v[0] - alpha;
            let vnorm2: T = v.iter().map(|&t| t * t).sum();
            if !vnorm2.is_zero() {
                for j in k..n {
                    let dot: T = (k..m).map(|i| v[i - k] * a.get(i, j)).sum();
                    let f = T::lit(2.0) * dot / vnorm2;
                    for i in k..m {
                        let val = a.get(i, j) - f * v[i - k];
                        a.set(i, j, val);
                    }
                }
            }
            a.set(k, k, alpha);
            for i in k + 1..m {
                a.set(i, k, T::zero());
            }
            rank += 1;
        }
        let r = Matrix::from_fn(steps, n, |i, j| if j >= i { a.get(i, j) } else { T::zero() });
        PivotedQr { r, perm, rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Minimum-norm solution of `Gᵀ u = c`, expressed in the orthogonal
    /// coordinates `y = Qᵀ u` (so `‖u‖ = ‖y‖`). Returns `y` and the residual
    /// `‖Gᵀ u − c‖∞`.
    pub fn solve_transposed_min_norm(&self, c: &[T]) -> (Vec<T>, T) {
        let n = self.perm.len();
        assert_eq!(c.len(), n, "dimension mismatch");
        let d: Vec<T> = self.perm.iter().map(|&p| c[p]).collect();
        let r = self.rank;
        // Rᵀ y = d: forward substitution on the leading r × r block
        let mut y = vec![T::zero(); r];
        for i in 0..r {
            let s: T = (0..i).map(|k| self.r.get(k, i) * y[k]).sum();
            y[i] = (d[i] - s) / self.r.get(i, i);
        }
        let residual = (r..n).fold(T::zero(), |acc, i| {
            let s: T = (0..r).map(|k| self.r.get(k, i) * y[k]).sum();
            acc.max((s - d[i]).abs())
        });
        (y, residual)
    }
}

impl<T: Scalar> PivotedQr<T> {
    /// Solves `GᵀG v = b` as `Π R⁻¹ R⁻ᵀ Πᵀ b`. Requires full column rank.
    pub fn solve_normal(&self, b: &[T]) -> Vec<T> {
        let n = self.perm.len();
        assert_eq!(self.rank, n, "solve_normal needs full column rank");
        let (y, _) = self.solve_transposed_min_norm(b);
        let mut z = vec![T::zero(); n];
        for i in (0..n).rev() {
            let s: T = (i + 1..n).map(|k| self.r.get(i, k) * z[k]).sum();
            z[i] = (y[i] - s) / self.r.get(i, i);
        }
        let mut v = vec![T::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            v[p] = z[k];
        }
        v
    }
}
