//! Information matrices, the c-optimality functional and Elfving-type
//! optimality certificates.
//!
//! A design `ξ` with support `x_i` and weights `ω_i` is c-optimal iff there is
//! a polynomial `pᵀf` with `|pᵀf(x)| ≤ 1` on `[0, a]`, `|pᵀf(x_i)| = 1` at
//! every support point, and `c = h Σ ω_i f(x_i) pᵀf(x_i)`; the optimal
//! variance is then `h²`. For slope estimation the extremal polynomial is the
//! rescaled Chebyshev polynomial `S_n` and `h` has a closed form in terms of
//! the basis derivatives `L̄'_i(z)`.

use serde::Serialize;

use crate::designs::{Design, DesignProblem};
use crate::linalg::{complete_pivot_solve, Matrix, PivotedQr};
use crate::polynomial::Poly;
use crate::scalar::{max_abs, two_prod, two_sum, Scalar};
use crate::{Error, Result, Tolerances};

/// Default number of uniform grid points for the `|pᵀf| ≤ 1` check.
pub const DEFAULT_CERT_GRID: usize = 2001;

/// `M(ξ) = Σ ω_i f(x_i) f(x_i)ᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct InfoMatrix<T> {
    entries: Matrix<T>,
}

impl<T: Scalar> InfoMatrix<T> {
    pub fn new(design: &Design<T>, n: usize) -> Self {
        let pts = design.points();
        let w = design.weights();
        // M[j][k] = Σ ω_i x_i^{j+k+2}, zero-based j and k
        let entries = Matrix::from_fn(n, n, |j, k| {
            pts.iter()
                .zip(w)
                .map(|(&x, &wi)| wi * x.powi((j + k + 2) as i32))
                .sum()
        });
        InfoMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn get(&self, j: usize, k: usize) -> T {
        self.entries.get(j, k)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.entries.to_rows()
    }

    pub fn quadratic_form(&self, v: &[T]) -> T {
        let mv = self.entries.mul_vec(v);
        mv.iter().zip(v).map(|(&a, &b)| a * b).sum()
    }
}

impl<T: Scalar + Serialize> Serialize for InfoMatrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.to_rows().serialize(s)
    }
}

pub fn info_matrix<T: Scalar>(design: &Design<T>, n: usize) -> InfoMatrix<T> {
    InfoMatrix::new(design, n)
}

fn regression_row<T: Scalar>(x: T, n: usize) -> impl Iterator<Item = T> {
    let mut p = T::one();
    (0..n).map(move |_| {
        p = p * x;
        p
    })
}

/// `cᵀ M⁻(ξ) c`, or `+∞` when `c` is not in the range of `M(ξ)`.
pub fn variance<T: Scalar>(design: &Design<T>, c: &[T]) -> T {
    variance_with(design, c, &Tolerances::default())
}

/// `G` with rows `√ω_i f(x_i)ᵀ`, columns scaled to unit norm, together with
/// `c` scaled inversely.
fn equilibrated_rows<T: Scalar>(design: &Design<T>, c: &[T]) -> (Matrix<T>, Vec<T>) {
    let n = c.len();
    let m = design.len();
    let mut g = Matrix::from_fn(m, n, |_, _| T::zero());
    for (i, (&x, &w)) in design.points().iter().zip(design.weights()).enumerate() {
        let sw = w.sqrt();
        for (k, v) in regression_row(x, n).enumerate() {
            g.set(i, k, sw * v);
        }
    }
    let mut scaled_c = c.to_vec();
    for k in 0..n {
        let norm = (0..m).map(|i| g.get(i, k) * g.get(i, k)).sum::<T>().sqrt();
        if norm > T::zero() {
            for i in 0..m {
                let v = g.get(i, k) / norm;
                g.set(i, k, v);
            }
            scaled_c[k] = scaled_c[k] / norm;
        }
    }
    (g, scaled_c)
}

/// Computes the functional as the squared minimum norm of `u` with
/// `Gᵀ u = c`, where `G` has rows `√ω_i f(x_i)ᵀ`, so that `M = GᵀG` is never
/// formed.
pub fn variance_with<T: Scalar>(design: &Design<T>, c: &[T], tol: &Tolerances) -> T {
    let (g, scaled_c) = equilibrated_rows(design, c);
    let rank_tol = T::lit(10.0) * T::from_count(g.rows().max(g.cols())) * T::epsilon();
    let qr = PivotedQr::new(&g, rank_tol);
    let (y, residual) = qr.solve_transposed_min_norm(&scaled_c);
    if residual > T::lit(tol.admissibility) * max_abs(&scaled_c) {
        return T::infinity();
    }
    if qr.rank() < g.cols() {
        return y.iter().map(|&t| t * t).sum();
    }
    // full rank: refine M v = c with residuals in double-word
    let (m, n) = (g.rows(), g.cols());
    let mut v = qr.solve_normal(&scaled_c);
    for _ in 0..2 {
        let gv: Vec<(T, T)> = (0..m)
            .map(|i| {
                let s = compensated_dot(T::zero(), (0..n).map(|k| (g.get(i, k), v[k])));
                let tail = compensated_dot(-s, (0..n).map(|k| (g.get(i, k), v[k])));
                (s, tail)
            })
            .collect();
        let r: Vec<T> = (0..n)
            .map(|k| {
                let terms = gv.iter().enumerate().flat_map(|(i, &(hi, lo))| [(-g.get(i, k), hi), (-g.get(i, k), lo)]);
                compensated_dot(scaled_c[k], terms)
            })
            .collect();
        let dv = qr.solve_normal(&r);
        v.iter_mut().zip(&dv).for_each(|(vi, &d)| *vi = *vi + d);
    }
    compensated_dot(T::zero(), v.iter().zip(&scaled_c).map(|(&a, &b)| (a, b)))
}

/// The same functional by a different generalized inverse: a basic solution
/// of `M v = c` from Gaussian elimination with complete pivoting on the
/// augmented system `[−αI G; Gᵀ 0] [u; v] = [0; c]`, i.e. `M v = α c` with
/// `u = G v / α`, so `M` is never formed. Taking `α` near the smallest
/// singular value of `G` keeps the system about as well conditioned as `G`.
pub fn variance_via_augmented_system<T: Scalar>(design: &Design<T>, c: &[T], tol: &Tolerances) -> T {
    let (g, scaled_c) = equilibrated_rows(design, c);
    let (m, n) = (g.rows(), g.cols());
    let rank_tol = T::lit(10.0) * T::from_count(m + n) * T::epsilon();
    let alpha = smallest_pivot(&g, rank_tol);
    let k = Matrix::from_fn(m + n, m + n, |i, j| match (i < m, j < m) {
        (true, true) if i == j => -alpha,
        (true, true) | (false, false) => T::zero(),
        (true, false) => g.get(i, j - m),
        (false, true) => g.get(j, i - m),
    });
    let mut rhs = vec![T::zero(); m];
    rhs.extend_from_slice(&scaled_c);
    let sol = complete_pivot_solve(&k, &rhs, rank_tol);
    // K is exact, so refinement with double-word residuals recovers what the
    // elimination loses
    let mut x = sol.x;
    let residual = |x: &[T]| -> Vec<T> {
        (0..m + n)
            .map(|i| compensated_dot(rhs[i], (0..m + n).map(|j| (-k.get(i, j), x[j]))))
            .collect()
    };
    for _ in 0..3 {
        let dx = complete_pivot_solve(&k, &residual(&x), rank_tol).x;
        x.iter_mut().zip(&dx).for_each(|(xi, &d)| *xi = *xi + d);
    }
    // normwise backward error: x itself can be huge for nearly singular M
    let bound = T::from_count(m + n) * max_abs(&x) + max_abs(&scaled_c);
    if max_abs(&residual(&x)) > T::lit(tol.admissibility) * bound {
        return T::infinity();
    }
    compensated_dot(T::zero(), x[m..].iter().zip(&scaled_c).map(|(&v, &ci)| (v, ci))) / alpha
}

/// Magnitude of the last pivot above `rank_tol · |first pivot|` in complete
/// pivoting elimination of `g`; a cheap stand-in for its smallest singular
/// value.
fn smallest_pivot<T: Scalar>(g: &Matrix<T>, rank_tol: T) -> T {
    let (m, n) = (g.rows(), g.cols());
    let mut a = g.to_rows();
    let mut first = T::zero();
    let mut last = T::one();
    for k in 0..m.min(n) {
        let (mut pi, mut pj, mut best) = (k, k, T::zero());
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, &v) in row.iter().enumerate().skip(k) {
                if v.abs() > best {
                    (pi, pj, best) = (i, j, v.abs());
                }
            }
        }
        if k == 0 {
            first = best;
        }
        if best.is_zero() || best <= rank_tol * first {
            break;
        }
        last = best;
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        let pivot_row = a[k].clone();
        for row in a.iter_mut().skip(k + 1) {
            let f = row[k] / pivot_row[k];
            for (v, &p) in row.iter_mut().zip(&pivot_row).skip(k) {
                *v = *v - f * p;
            }
        }
    }
    last
}

/// `init + Σ aᵢbᵢ` accumulated with error-free transformations.
fn compensated_dot<T: Scalar>(init: T, terms: impl Iterator<Item = (T, T)>) -> T {
    let (mut s, mut err) = (init, T::zero());
    for (a, b) in terms {
        let (p, pe) = two_prod(a, b);
        let (sum, se) = two_sum(s, p);
        s = sum;
        err = err + pe + se;
    }
    s + err
}

/// `S_n(x) = T_n((x/a)(1 + cos(π/2n)) − cos(π/2n))`.
pub fn extremal_polynomial<T: Scalar>(problem: &DesignProblem<T>) -> Poly<T> {
    let n = problem.n();
    let shift = (T::PI() / (T::lit(2.0) * T::from_count(n))).cos();
    Poly::chebyshev_t(n).compose_affine((T::one() + shift) / problem.a(), -shift)
}

/// Signed `h = (−1)^{n+j} Σ_i |L̄'_i(z)|` together with the index `j` of the
/// admissible interval containing `z`.
pub fn h_value<T: Scalar>(problem: &DesignProblem<T>, z: T, tol: &Tolerances) -> Result<(T, usize)> {
    let region = problem.admissible_region_with(tol)?;
    let j = region
        .intervals()
        .iter()
        .position(|iv| iv.contains(z))
        .ok_or(Error::ZOutsideRegion { z: z.as_f64() })?
        + 1;
    let total: T = problem.weight_derivatives_at(z).into_iter().map(T::abs).sum();
    let sign = if (problem.n() + j) % 2 == 0 { T::one() } else { -T::one() };
    Ok((sign * total, j))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Failed,
    ZOutsideRegion,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Verified => "verified",
            Verdict::Failed => "failed",
            Verdict::ZOutsideRegion => "z_outside_region",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub grid: usize,
    pub tol: Tolerances,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { grid: DEFAULT_CERT_GRID, tol: Tolerances::default() }
    }
}

/// Extremal polynomial coefficients, `h > 0`, and the margin on each
/// optimality condition for a given design.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElfvingCertificate<T> {
    /// Coefficients of `x¹, …, xⁿ`.
    pub p: Vec<T>,
    pub h: T,
    /// `max |pᵀf(x)| − 1` over the check grid.
    pub condition1_margin: T,
    /// `||pᵀf(x_i)| − 1|` per support point of the design.
    pub condition2_residuals: Vec<T>,
    /// `‖c − h Σ ω_i f(x_i) pᵀf(x_i)‖∞`.
    pub condition3_residual: T,
    /// Index of the admissible interval containing `z`, from 1.
    pub interval: usize,
    pub verdict: Verdict,
}

impl<T: Scalar> ElfvingCertificate<T> {
    pub fn verifies(&self) -> bool {
        self.verdict == Verdict::Verified
    }
}

/// `S_n(x)` through the three-term recurrence for `T_n`. This is the same
/// polynomial as the monomial coefficients in the certificate, but free of
/// their rounding, which otherwise dominates condition (3) for larger `n`.
fn extremal_value<T: Scalar>(n: usize, scale: T, shift: T, x: T) -> T {
    let u = x * scale - shift;
    let (mut prev, mut cur) = (T::one(), u);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = T::lit(2.0) * u * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn certify<T: Scalar>(problem: &DesignProblem<T>, z: T, design: &Design<T>) -> Result<ElfvingCertificate<T>> {
    certify_with(problem, z, design, &CertifyOptions::default())
}

/// Checks the three Elfving conditions for `design` with the closed-form
/// extremal polynomial and `h`. Errors with `ZOutsideRegion` when `z` is not
/// interior to an admissible interval.
pub fn certify_with<T: Scalar>(
    problem: &DesignProblem<T>,
    z: T,
    design: &Design<T>,
    opts: &CertifyOptions,
) -> Result<ElfvingCertificate<T>> {
    let n = problem.n();
    let a = problem.a();
    let (signed_h, interval) = h_value(problem, z, &opts.tol)?;
    let s = extremal_polynomial(problem);
    let mut p: Vec<T> = (1..=n).map(|k| s.coeff(k)).collect();
    let (h, sign) = if signed_h < T::zero() {
        p.iter_mut().for_each(|c| *c = -*c);
        (-signed_h, -T::one())
    } else {
        (signed_h, T::one())
    };
    let shift = (T::PI() / (T::lit(2.0) * T::from_count(n))).cos();
    let scale = (T::one() + shift) / a;
    let pf = |x: T| sign * extremal_value(n, scale, shift, x);

    let mut check_points: Vec<T> = (0..opts.grid.max(2))
        .map(|i| a * T::from_count(i) / T::from_count(opts.grid.max(2) - 1))
        .collect();
    let crit = s.derivative();
    if !crit.is_zero() {
        let roots = crit.real_roots_with_tol(T::zero(), a, T::lit(opts.tol.root))?;
        check_points.extend(roots.roots);
    }
    let sup = check_points
        .iter()
        .fold(T::zero(), |m, &x| m.max(pf(x).abs()));
    let condition1_margin = sup - T::one();

    let condition2_residuals: Vec<T> = design
        .points()
        .iter()
        .map(|&x| (pf(x).abs() - T::one()).abs())
        .collect();

    let c = problem.slope_vector(z);
    let mut rep = vec![T::zero(); n];
    for (&x, &w) in design.points().iter().zip(design.weights()) {
        let px = pf(x);
        for (k, fk) in regression_row(x, n).enumerate() {
            rep[k] = rep[k] + h * w * fk * px;
        }
    }
    let condition3_residual = c
        .iter()
        .zip(&rep)
        .fold(T::zero(), |m, (&ci, &ri)| m.max((ci - ri).abs()));

    let cert = T::lit(opts.tol.cert);
    let ok = condition1_margin <= cert
        && condition2_residuals.iter().all(|&r| r <= cert)
        && condition3_residual <= cert * (T::one() + max_abs(&c));
    Ok(ElfvingCertificate {
        p,
        h,
        condition1_margin,
        condition2_residuals,
        condition3_residual,
        interval,
        verdict: if ok { Verdict::Verified } else { Verdict::Failed },
    })
}
