//! Dense univariate real polynomials.
//!
//! Coefficients are stored in ascending powers: `coeffs[k]` multiplies `x^k`.
//! Real roots are isolated with Sturm sequences built on the square-free part
//! and refined by bisection, so every reported root is bracketed by a sign
//! change (or a Sturm count) of width at most the requested tolerance.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::scalar::{max_abs, two_prod, two_sum, Scalar};
use crate::{Error, Result};

/// Default absolute tolerance on the argument for [`Poly::real_roots`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

/// Real roots found in an open interval, strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootList<T> {
    pub roots: Vec<T>,
    /// Width of the bracket each root was refined to.
    pub tol: T,
}

impl<T> RootList<T> {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

impl<T: Scalar> Poly<T> {
    /// Builds a polynomial from ascending coefficients. An empty vector is
    /// the zero polynomial.
    pub fn new(coeffs: Vec<T>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![T::zero()] }
    }

    pub fn constant(c: T) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Poly { coeffs: vec![T::zero(), T::one()] }
    }

    /// Monic polynomial `Π (x − r)` over the given roots.
    pub fn from_roots(roots: &[T]) -> Self {
        let mut coeffs = vec![T::one()];
        for &r in roots {
            let mut next = vec![T::zero(); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] = next[k + 1] + c;
                next[k] = next[k] - r * c;
            }
            coeffs = next;
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond storage.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    /// Highest power with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Leading (highest nonzero) coefficient, zero for the zero polynomial.
    pub fn leading(&self) -> T {
        self.degree().map_or_else(T::zero, |d| self.coeffs[d])
    }

    /// Copy with trailing zero coefficients removed.
    pub fn trimmed(&self) -> Self {
        match self.degree() {
            Some(d) => Poly { coeffs: self.coeffs[..=d].to_vec() },
            None => Self::zero(),
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc.mul_add(x, c))
    }

    /// Compensated Horner evaluation: as accurate as Horner run in twice
    /// the working precision, then rounded.
    pub fn eval_compensated(&self, x: T) -> T {
        let mut s = T::zero();
        let mut err = T::zero();
        for &c in self.coeffs.iter().rev() {
            let (p, pe) = two_prod(s, x);
            let (sum, se) = two_sum(p, c);
            s = sum;
            err = err * x + (pe + se);
        }
        s + err
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| T::from_count(k) * c)
            .collect();
        Poly { coeffs }
    }

    /// Returns `q` with `q(x) = p(alpha·x + beta)`, by Horner's scheme in
    /// polynomial arithmetic.
    pub fn compose_affine(&self, alpha: T, beta: T) -> Self {
        let inner = Poly { coeffs: vec![beta, alpha] };
        let mut acc = Self::zero();
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * &inner) + &Self::constant(c);
        }
        acc.trimmed()
    }

    pub fn scale(&self, s: T) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    /// Euclidean division `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(Error::ZeroPolynomial)?;
        let lead = d.coeffs[dd];
        let mut rem = self.trimmed().coeffs;
        if rem.len() <= dd {
            return Ok((Self::zero(), Poly { coeffs: rem }));
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &dc) in d.coeffs[..=dd].iter().enumerate() {
                rem[k + j] = rem[k + j] - q * dc;
            }
            rem[k + dd] = T::zero();
        }
        rem.truncate(dd.max(1));
        Ok((Poly { coeffs: quot }, Poly::new(rem).trimmed()))
    }

    /// Chebyshev polynomial of the first kind, `T_n(cos t) = cos(n t)`.
    pub fn chebyshev_t(n: usize) -> Self {
        let two_x = Poly { coeffs: vec![T::zero(), T::lit(2.0)] };
        let mut prev = Self::constant(T::one());
        if n == 0 {
            return prev;
        }
        let mut cur = Self::x();
        for _ in 1..n {
            let next = &(&two_x * &cur) - &prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Upper bound on the modulus of every root (Cauchy).
    fn root_bound(&self) -> Result<T> {
        let d = self.degree().ok_or(Error::ZeroPolynomial)?;
        let lead = self.coeffs[d].abs();
        let m = self.coeffs[..d]
            .iter()
            .fold(T::zero(), |m, c| m.max(c.abs() / lead));
        Ok(T::one() + m)
    }

    /// All distinct real roots in the open interval `(lo, hi)`, refined to
    /// [`DEFAULT_ROOT_TOL`].
    pub fn real_roots(&self, lo: T, hi: T) -> Result<RootList<T>> {
        self.real_roots_with_tol(lo, hi, T::lit(DEFAULT_ROOT_TOL))
    }

    /// All distinct real roots in `(lo, hi)`. Infinite endpoints are replaced
    /// by the Cauchy root bound. Multiple roots are reported once.
    pub fn real_roots_with_tol(&self, lo: T, hi: T, tol: T) -> Result<RootList<T>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::Degenerate(format!(
                "empty query interval ({lo}, {hi})"
            )));
        }
        let p = self.trimmed();
        if p.degree() == Some(0) {
            return Ok(RootList { roots: Vec::new(), tol });
        }
        let bound = p.root_bound()?;
        let lo_f = if lo.is_finite() { lo } else { -bound };
        let hi_f = if hi.is_finite() { hi } else { bound };
        if lo_f >= hi_f {
            return Ok(RootList { roots: Vec::new(), tol });
        }

        let sturm = SturmChain::new(&p)?;
        let mut roots = Vec::new();
        let mut stack = vec![(lo_f, hi_f, sturm.variations(lo_f), sturm.variations(hi_f))];
        while let Some((l, r, vl, vr)) = stack.pop() {
            if vl < vr {
                return Err(Error::Degenerate(format!(
                    "inconsistent Sturm counts on ({l}, {r}]"
                )));
            }
            match vl - vr {
                0 => {}
                1 => roots.push(sturm.refine(l, r, vl, tol)),
                k => {
                    let mid = l + (r - l) / T::lit(2.0);
                    if r - l <= tol || mid <= l || mid >= r {
                        return Err(Error::Degenerate(format!(
                            "{k} roots not separated within ({l}, {r}]"
                        )));
                    }
                    let vm = sturm.variations(mid);
                    // right half first so the stack pops left to right
                    stack.push((mid, r, vm, vr));
                    stack.push((l, mid, vl, vm));
                }
            }
        }
        roots.retain(|&x| x > lo && x < hi);
        roots.sort_by(|a, b| a.partial_cmp(b).expect("roots are finite"));
        roots.dedup();
        Ok(RootList { roots, tol })
    }
}

/// Drops leading coefficients of modulus at most `zero_tol`, then rescales so
/// the largest coefficient has modulus one. `None` when nothing is left.
fn normalized<T: Scalar>(mut coeffs: Vec<T>, zero_tol: T) -> Option<Vec<T>> {
    while coeffs.last().is_some_and(|c| c.abs() <= zero_tol) {
        coeffs.pop();
    }
    let m = max_abs(&coeffs);
    if coeffs.is_empty() || m.is_zero() || !m.is_finite() {
        return None;
    }
    for c in coeffs.iter_mut() {
        *c = *c / m;
    }
    Some(coeffs)
}

struct SturmChain<T> {
    chain: Vec<Poly<T>>,
    /// Square-free polynomial whose sign changes are bisected.
    base: Poly<T>,
}

impl<T: Scalar> SturmChain<T> {
    fn new(p: &Poly<T>) -> Result<Self> {
        // remainders below this, relative to unit-normalized operands, are
        // rounding noise
        let zero_tol = T::lit(1024.0) * T::epsilon();
        let chain = Self::build(p, zero_tol)?;
        let last = chain.last().expect("chain is nonempty");
        if last.degree().unwrap_or(0) == 0 {
            return Ok(SturmChain { chain, base: p.clone() });
        }
        // repeated roots: continue with p / gcd(p, p')
        let (q, _) = p.div_rem(last)?;
        let q = Poly::new(
            normalized(q.into_coeffs(), T::zero()).ok_or(Error::Degenerate(
                "square-free part vanished".into(),
            ))?,
        );
        let chain = Self::build(&q, zero_tol)?;
        if chain.last().and_then(|c| c.degree()).unwrap_or(0) != 0 {
            return Err(Error::Degenerate(
                "square-free reduction left a common factor".into(),
            ));
        }
        Ok(SturmChain { chain, base: q })
    }

    /// Sturm chain of `p`. Remainders are computed on unit-normalized
    /// operands; the head of the chain is `p` itself so its sign is exact.
    fn build(p: &Poly<T>, zero_tol: T) -> Result<Vec<Poly<T>>> {
        let p0 = Poly::new(normalized(p.coeffs.clone(), T::zero()).ok_or(Error::ZeroPolynomial)?);
        let mut chain = vec![p0];
        let d = chain[0].derivative();
        if let Some(c) = normalized(d.into_coeffs(), T::zero()) {
            chain.push(Poly::new(c));
        }
        while chain.len() >= 2 {
            let k = chain.len();
            if chain[k - 1].degree().unwrap_or(0) == 0 {
                break;
            }
            let (_, r) = chain[k - 2].div_rem(&chain[k - 1])?;
            match normalized(r.neg().into_coeffs(), zero_tol) {
                Some(c) => chain.push(Poly::new(c)),
                None => break,
            }
        }
        chain[0] = p.trimmed();
        Ok(chain)
    }

    fn variations(&self, x: T) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for (k, p) in self.chain.iter().enumerate() {
            let v = if k == 0 { p.eval_compensated(x) } else { p.eval(x) };
            let s = if v > T::zero() {
                1
            } else if v < T::zero() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Shrinks `(l, r]`, known to hold exactly one root, to width `tol`.
    fn refine(&self, mut l: T, mut r: T, mut vl: usize, tol: T) -> T {
        let two = T::lit(2.0);
        let mut fl = self.base.eval_compensated(l);
        let fr = self.base.eval_compensated(r);
        if fr.is_zero() {
            return r;
        }
        let bracketed = fl * fr < T::zero();
        while r - l > tol {
            let mid = l + (r - l) / two;
            if mid <= l || mid >= r {
                break;
            }
            if bracketed {
                let fm = self.base.eval_compensated(mid);
                if fm.is_zero() {
                    return mid;
                }
                if (fm < T::zero()) == (fl < T::zero()) {
                    l = mid;
                    fl = fm;
                } else {
                    r = mid;
                }
            } else {
                let vm = self.variations(mid);
                if vm < vl {
                    r = mid;
                } else {
                    l = mid;
                    vl = vm;
                }
            }
        }
        l + (r - l) / two
    }
}

impl<T: Scalar> Add for &Poly<T> {
    type Output = Poly<T>;

    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly { coeffs: (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect() }
    }
}

impl<T: Scalar> Sub for &Poly<T> {
    type Output = Poly<T>;

    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly { coeffs: (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect() }
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;

    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Poly { coeffs: out }
    }
}

impl<T: Scalar> Neg for Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        Poly { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Poly<f64> {
        Poly::new(c.to_vec())
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p(&[0.0, -1.0, 1.0]).eval(1.0), 0.0);
        assert!((Poly::<f64>::chebyshev_t(4).eval(1.0) - 1.0).abs() < 1e-15);
        let lp = p(&[8.6607, -40.981, 35.490]);
        assert!(lp.eval(0.2785).abs() < 2e-3);
    }

    #[test]
    fn degree_ignores_trailing_zeros() {
        assert_eq!(p(&[1.0, 2.0, 0.0, 0.0]).degree(), Some(1));
        assert_eq!(p(&[0.0, 0.0]).degree(), None);
        assert_eq!(Poly::<f64>::new(vec![]).coeffs(), &[0.0]);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p(&[0.0, 0.0, 1.0]).derivative().coeffs(), &[0.0, 2.0]);
        assert!(p(&[5.0]).derivative().is_zero());
    }

    #[test]
    fn derivative_of_first_quadratic_basis_polynomial() {
        // (z² − z)/(4 − 3√2) with nodes √2−1 and 1
        let r2 = 2f64.sqrt();
        let l1 = p(&[0.0, -1.0, 1.0]).scale(1.0 / (4.0 - 3.0 * r2));
        let d = l1.derivative();
        let k = (4.0 + 3.0 * r2) / 2.0;
        assert!((d.coeff(0) - k).abs() < 1e-12);
        assert!((d.coeff(1) + 2.0 * k).abs() < 1e-12);
    }

    #[test]
    fn compose_affine_examples() {
        assert_eq!(Poly::x().compose_affine(2.0, 3.0).coeffs(), &[3.0, 2.0]);
        let q = p(&[1.5, -2.0, 0.25, 4.0]);
        assert_eq!(q.compose_affine(1.0, 0.0), q);

        let c = (std::f64::consts::PI / 4.0).cos();
        let s2 = Poly::<f64>::chebyshev_t(2).compose_affine(1.0 + c, -c);
        assert!((s2.eval(1.0) - 1.0).abs() < 1e-12);
        assert!((s2.eval(2f64.sqrt() - 1.0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(Poly::<f64>::chebyshev_t(0).coeffs(), &[1.0]);
        assert_eq!(Poly::<f64>::chebyshev_t(2).coeffs(), &[-1.0, 0.0, 2.0]);
        let t4 = Poly::<f64>::chebyshev_t(4);
        assert_eq!(t4.coeffs(), &[1.0, 0.0, -8.0, 0.0, 8.0]);
        assert!(t4.eval((std::f64::consts::PI / 8.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn real_roots_examples() {
        let r = p(&[-1.0, 2.0]).real_roots(-10.0, 10.0).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - 0.5).abs() < 1e-12);

        let r = p(&[0.66745, -8.6240, 13.933]).real_roots(-10.0, 10.0).unwrap();
        assert_eq!(r.roots.len(), 2);
        assert!((r.roots[0] - 0.090).abs() < 2e-3);
        assert!((r.roots[1] - 0.528).abs() < 2e-3);

        assert!(p(&[1.0, 0.0, 1.0]).real_roots(-10.0, 10.0).unwrap().is_empty());
    }

    #[test]
    fn real_roots_errors() {
        assert_eq!(p(&[0.0, 0.0]).real_roots(0.0, 1.0), Err(Error::ZeroPolynomial));
        assert!(matches!(
            p(&[1.0, 1.0]).real_roots(1.0, 0.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn multiple_roots_reported_once() {
        // (x − 0.5)² (x + 0.75)³ (x − 1.25), exact in binary
        let q = Poly::<f64>::from_roots(&[0.5, 0.5, -0.75, -0.75, -0.75, 1.25]);
        let r = q.real_roots(-5.0, 5.0).unwrap();
        assert_eq!(r.roots.len(), 3, "{:?}", r.roots);
        for (got, want) in r.roots.iter().zip([-0.75, 0.5, 1.25]) {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn open_interval_excludes_endpoints() {
        let q = Poly::<f64>::from_roots(&[0.0, 1.0, 2.0]);
        let r = q.real_roots(0.0, 2.0).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infinite_window_uses_root_bound() {
        let q = Poly::<f64>::from_roots(&[-40.0, 3.0, 75.5]);
        let r = q.real_roots(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert_eq!(r.roots.len(), 3);
        assert!((r.roots[2] - 75.5).abs() < 1e-9);
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = p(&[1.0, -3.0, 0.5, 2.0, 7.0]);
        let d = p(&[2.0, 0.0, 1.0]);
        let (q, r) = a.div_rem(&d).unwrap();
        assert!(r.degree().map_or(true, |k| k < 2));
        let back = &(&q * &d) + &r;
        for k in 0..5 {
            assert!((back.coeff(k) - a.coeff(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn f32_roots() {
        let q = Poly::<f32>::from_roots(&[0.25, 0.75]);
        let r = q.real_roots(-1.0, 2.0).unwrap();
        assert_eq!(r.roots.len(), 2);
        assert!((r.roots[0] - 0.25).abs() < 1e-6);
        assert!((r.roots[1] - 0.75).abs() < 1e-6);
    }
}
