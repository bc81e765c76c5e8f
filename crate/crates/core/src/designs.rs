//! Closed-form designs supported on the extremal points of the rescaled
//! Chebyshev polynomial.
//!
//! For a degree `n` model on `[0, a]` the candidate support is
//! `s_i = a (cos((i−1)π/n) + cos(π/2n)) / (1 + cos(π/2n))`, sorted ascending.
//! With `L̄_i` the Lagrange basis through `0, s_1, …, s_n` that vanishes at the
//! origin, the weights at target `z` are `|L̄'_i(z)| / Σ_j |L̄'_j(z)|`, and the
//! design is optimal exactly when `z` lies in the union of the open intervals
//! `(ω_{1,j−1}, ω_{n,j})`, where `ω_{i,k}` is the `k`-th root of `L̄'_i`.

use serde::Serialize;

use crate::polynomial::Poly;
use crate::scalar::Scalar;
use crate::{Error, Result, Tolerances};

/// Maximum number of doublings of the root search window.
const MAX_WINDOW_DOUBLINGS: usize = 64;

/// Degree `n ≥ 1` model with no intercept on the design space `[0, a]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DesignProblem<T> {
    n: usize,
    a: T,
}

/// Finite probability measure on `[0, a]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Design<T> {
    points: Vec<T>,
    weights: Vec<T>,
}

/// Open interval; either endpoint may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn contains(&self, z: T) -> bool {
        z > self.lo && z < self.hi
    }
}

/// Where a target point falls relative to the admissible region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Location<T> {
    /// Strictly inside interval `A_j`, with `j` counted from 1.
    Interior(usize),
    /// Within the boundary tolerance of a finite endpoint.
    Boundary(T),
    /// In a gap between intervals.
    Gap,
}

/// Union of the open intervals `A_1, …, A_n` on which the closed-form design
/// is optimal, together with the labelled roots that bound them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibleRegion<T> {
    intervals: Vec<Interval<T>>,
    /// `boundary_roots[i][k]` is the `(k+1)`-th ascending root of `L̄'_{i+1}`.
    boundary_roots: Vec<Vec<T>>,
}

impl<T: Scalar> AdmissibleRegion<T> {
    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    pub fn boundary_roots(&self) -> &[Vec<T>] {
        &self.boundary_roots
    }

    /// `ω_{i,k}` with both indices counted from 1.
    pub fn root(&self, i: usize, k: usize) -> T {
        self.boundary_roots[i - 1][k - 1]
    }

    /// Finite interval endpoints in ascending order.
    pub fn finite_endpoints(&self) -> Vec<T> {
        self.intervals
            .iter()
            .flat_map(|iv| [iv.lo, iv.hi])
            .filter(|x| x.is_finite())
            .collect()
    }

    pub fn locate(&self, z: T, boundary_tol: T) -> Location<T> {
        if let Some(&e) = self
            .finite_endpoints()
            .iter()
            .find(|&&e| (z - e).abs() <= boundary_tol)
        {
            return Location::Boundary(e);
        }
        match self.intervals.iter().position(|iv| iv.contains(z)) {
            Some(j) => Location::Interior(j + 1),
            None => Location::Gap,
        }
    }

    pub fn contains(&self, z: T) -> bool {
        self.intervals.iter().any(|iv| iv.contains(z))
    }

    /// Intervals as `(lo, hi)` pairs in `f64`.
    pub fn to_f64_pairs(&self) -> Vec<(f64, f64)> {
        self.intervals
            .iter()
            .map(|iv| (iv.lo.as_f64(), iv.hi.as_f64()))
            .collect()
    }
}

impl<T: Scalar> Design<T> {
    /// Validates and builds a design; weights must sum to one within `1e-9`.
    pub fn new(points: Vec<T>, weights: Vec<T>) -> Result<Self> {
        Self::with_sum_tol(points, weights, T::lit(1e-9))
    }

    pub fn with_sum_tol(points: Vec<T>, weights: Vec<T>, sum_tol: T) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDesign("no support points".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidDesign(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().chain(&weights).any(|x| !x.is_finite()) {
            return Err(Error::InvalidDesign("non-finite entry".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDesign(
                "support points must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|&w| w <= T::zero()) {
            return Err(Error::InvalidDesign("weights must be positive".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > sum_tol {
            return Err(Error::InvalidDesign(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Design { points, weights })
    }

    /// One-point design.
    pub fn dirac(x: T) -> Self {
        Design { points: vec![x], weights: vec![T::one()] }
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks that every support point lies in `[0, a]`.
    pub fn check_support(&self, problem: &DesignProblem<T>) -> Result<()> {
        match self.points.iter().find(|&&x| x < T::zero() || x > problem.a()) {
            Some(x) => Err(Error::InvalidDesign(format!(
                "support point {x} outside [0, {}]",
                problem.a()
            ))),
            None => Ok(()),
        }
    }
}

impl<T: Scalar> DesignProblem<T> {
    pub fn new(n: usize, a: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidProblem("degree must be at least 1".into()));
        }
        if !(a > T::zero()) || !a.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "interval endpoint must be positive and finite, got {a}"
            )));
        }
        Ok(DesignProblem { n, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> T {
        self.a
    }

    /// `f(x) = (x, x², …, xⁿ)`.
    pub fn regression_vector(&self, x: T) -> Vec<T> {
        let mut out = Vec::with_capacity(self.n);
        let mut p = x;
        for _ in 0..self.n {
            out.push(p);
            p = p * x;
        }
        out
    }

    /// `c = f'(z) = (1, 2z, …, n zⁿ⁻¹)`.
    pub fn slope_vector(&self, z: T) -> Vec<T> {
        let mut out = Vec::with_capacity(self.n);
        let mut p = T::one();
        for k in 1..=self.n {
            out.push(T::from_count(k) * p);
            p = p * z;
        }
        out
    }

    /// Extremal points of the rescaled Chebyshev polynomial, ascending.
    pub fn support_points(&self) -> Vec<T> {
        let n = T::from_count(self.n);
        let shift = (T::PI() / (T::lit(2.0) * n)).cos();
        let mut s: Vec<T> = (0..self.n)
            .map(|i| {
                let t = (T::from_count(i) * T::PI() / n).cos();
                self.a * (t + shift) / (T::one() + shift)
            })
            .collect();
        s.reverse();
        // i = 1 gives exactly a
        if let Some(last) = s.last_mut() {
            *last = self.a;
        }
        s
    }

    /// Lagrange basis through the support points that vanishes at the origin:
    /// `L̄_i(z) = z Π_{j≠i}(z − s_j) / (s_i Π_{j≠i}(s_i − s_j))`.
    pub fn lagrange_basis(&self) -> Vec<Poly<T>> {
        let s = self.support_points();
        (0..self.n)
            .map(|i| {
                let mut nodes = Vec::with_capacity(self.n);
                nodes.push(T::zero());
                nodes.extend(s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
                let denom = s
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .fold(s[i], |acc, (_, &sj)| acc * (s[i] - sj));
                Poly::from_roots(&nodes).scale(T::one() / denom)
            })
            .collect()
    }

    /// Derivatives `L̄'_1, …, L̄'_n`, the numerators of the optimal weights.
    pub fn weight_functions(&self) -> Vec<Poly<T>> {
        self.lagrange_basis().iter().map(Poly::derivative).collect()
    }

    /// Signed values `L̄'_1(z), …, L̄'_n(z)`, evaluated from the product form
    /// `Σ_k Π_{l≠k}(z − r_l) / d_i` over the nodes `r = {0} ∪ {s_j : j≠i}`.
    /// Far outside `[0, a]` this avoids the cancellation of the expanded
    /// coefficients.
    pub fn weight_derivatives_at(&self, z: T) -> Vec<T> {
        let s = self.support_points();
        (0..self.n)
            .map(|i| {
                let mut nodes = Vec::with_capacity(self.n);
                nodes.push(T::zero());
                nodes.extend(s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
                let denom = s
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .fold(s[i], |acc, (_, &sj)| acc * (s[i] - sj));
                let sum: T = (0..nodes.len())
                    .map(|k| {
                        nodes
                            .iter()
                            .enumerate()
                            .filter(|&(l, _)| l != k)
                            .fold(T::one(), |acc, (_, &r)| acc * (z - r))
                    })
                    .sum();
                sum / denom
            })
            .collect()
    }

    /// `ω_i(z) = |L̄'_i(z)| / Σ_j |L̄'_j(z)|`.
    pub fn weights_at(&self, z: T) -> Result<Vec<T>> {
        self.weights_at_with(z, &Tolerances::default())
    }

    pub fn weights_at_with(&self, z: T, tol: &Tolerances) -> Result<Vec<T>> {
        let values: Vec<T> = self.weight_derivatives_at(z).into_iter().map(T::abs).collect();
        let total: T = values.iter().copied().sum();
        if !(total >= T::lit(tol.weight_denominator)) {
            return Err(Error::AllDerivativesVanish { z: z.as_f64() });
        }
        Ok(values.into_iter().map(|v| v / total).collect())
    }

    pub fn admissible_region(&self) -> Result<AdmissibleRegion<T>> {
        self.admissible_region_with(&Tolerances::default())
    }

    /// Roots of every `L̄'_i` and the intervals `(ω_{1,j−1}, ω_{n,j})`.
    pub fn admissible_region_with(&self, tol: &Tolerances) -> Result<AdmissibleRegion<T>> {
        let n = self.n;
        let root_tol = T::lit(tol.root);
        let mut boundary_roots = Vec::with_capacity(n);
        for p in self.weight_functions() {
            let mut half = T::lit(2.0) * self.a;
            let mut found = None;
            for _ in 0..MAX_WINDOW_DOUBLINGS {
                let roots = p.real_roots_with_tol(-half, half, root_tol)?;
                if roots.len() >= n - 1 {
                    found = Some(roots.roots);
                    break;
                }
                half = half * T::lit(2.0);
            }
            let roots = found.ok_or_else(|| {
                Error::Degenerate(format!("basis derivative has fewer than {} real roots", n - 1))
            })?;
            if roots.len() != n - 1 {
                return Err(Error::Degenerate(format!(
                    "basis derivative has {} real roots, expected {}",
                    roots.len(),
                    n - 1
                )));
            }
            boundary_roots.push(roots);
        }
        let intervals = (1..=n)
            .map(|j| Interval {
                lo: if j == 1 { T::neg_infinity() } else { boundary_roots[0][j - 2] },
                hi: if j == n { T::infinity() } else { boundary_roots[n - 1][j - 1] },
            })
            .collect();
        Ok(AdmissibleRegion { intervals, boundary_roots })
    }

    pub fn optimal_design(&self, z: T) -> Result<Design<T>> {
        self.optimal_design_with(z, &Tolerances::default())
    }

    /// Closed-form optimal design when `z` is interior to the admissible
    /// region; `NotCovered` in a gap and `BoundaryPoint` on an endpoint.
    pub fn optimal_design_with(&self, z: T, tol: &Tolerances) -> Result<Design<T>> {
        if self.n == 1 {
            return Ok(Design::dirac(self.a));
        }
        let region = self.admissible_region_with(tol)?;
        match region.locate(z, T::lit(tol.boundary)) {
            Location::Interior(_) => {
                let weights = self.weights_at_with(z, tol)?;
                Ok(Design { points: self.support_points(), weights })
            }
            Location::Boundary(e) => Err(Error::BoundaryPoint {
                z: z.as_f64(),
                endpoint: e.as_f64(),
            }),
            Location::Gap => Err(Error::NotCovered {
                z: z.as_f64(),
                region: region.to_f64_pairs(),
            }),
        }
    }
}
