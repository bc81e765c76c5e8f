//! Deterministic sweeps of the structural invariants, shared by the property
//! suite and the acceptance runner. Each check returns the first violation.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slope_design::elfving::extremal_polynomial;
use slope_design::oracle::{lp_c_optimal, restricted_weights};
use slope_design::{DesignProblem, GridSpec, Interval};

pub type Check = Result<(), String>;

pub const SCALES: [f64; 3] = [0.5, 1.0, 3.0];

pub fn problem(n: usize, a: f64) -> DesignProblem<f64> {
    DesignProblem::new(n, a).unwrap()
}

/// A point inside `iv` at fraction `t`; infinite sides are truncated to a
/// window of width `a`, and the whole line to `(−a, 2a)`.
pub fn inside(iv: &Interval<f64>, a: f64, t: f64) -> f64 {
    match (iv.lo.is_finite(), iv.hi.is_finite()) {
        (true, true) => iv.lo + t * (iv.hi - iv.lo),
        (false, true) => iv.hi - t * a,
        (true, false) => iv.lo + t * a,
        (false, false) => -a + 3.0 * t * a,
    }
}

/// `per_interval` evenly spaced targets in every admissible interval.
pub fn covered_targets(pr: &DesignProblem<f64>, per_interval: usize) -> Vec<f64> {
    let region = pr.admissible_region().unwrap();
    let mut out = Vec::new();
    for iv in region.intervals() {
        for k in 1..=per_interval {
            out.push(inside(iv, pr.a(), k as f64 / (per_interval + 1) as f64));
        }
    }
    out
}

pub fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub fn partition_of_unity() -> Check {
    for n in 1..=10 {
        for a in SCALES {
            let pr = problem(n, a);
            for k in 0..=60 {
                let z = -a + 3.0 * a * k as f64 / 60.0;
                let w = pr.weights_at(z).map_err(|e| e.to_string())?;
                let total: f64 = w.iter().sum();
                ensure!((total - 1.0).abs() <= 1e-12, "n={n} a={a} z={z}: sum {total}");
                ensure!(w.iter().all(|&x| (0.0..=1.0).contains(&x)), "n={n} a={a} z={z}: {w:?}");
            }
        }
    }
    Ok(())
}

pub fn interpolation() -> Check {
    for n in 1..=10 {
        for a in SCALES {
            let pr = problem(n, a);
            let s = pr.support_points();
            for (i, l) in pr.lagrange_basis().iter().enumerate() {
                ensure!(l.coeff(0) == 0.0, "n={n} a={a}: L̄_{} has an intercept", i + 1);
                for (j, &sj) in s.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    let got = l.eval(sj);
                    ensure!((got - want).abs() <= 1e-9, "n={n} a={a}: L̄_{}(s_{}) = {got}", i + 1, j + 1);
                }
            }
        }
    }
    Ok(())
}

pub fn root_counts() -> Check {
    for n in 1..=10 {
        for a in SCALES {
            let pr = problem(n, a);
            for (i, d) in pr.weight_functions().iter().enumerate() {
                let roots = d.real_roots(f64::NEG_INFINITY, f64::INFINITY).map_err(|e| e.to_string())?;
                ensure!(roots.len() == n - 1, "n={n} a={a}: L̄'_{} has {} real roots", i + 1, roots.len());
            }
        }
    }
    Ok(())
}

/// `ω_{n,k} < ω_{n−1,k} < … < ω_{1,k} < ω_{n,k+1}`.
pub fn interlacing() -> Check {
    for n in 2..=10 {
        for a in SCALES {
            let region = problem(n, a).admissible_region().map_err(|e| e.to_string())?;
            let mut chain = Vec::new();
            for k in 1..n {
                for i in (1..=n).rev() {
                    chain.push((region.root(i, k), i, k));
                }
            }
            for w in chain.windows(2) {
                ensure!(w[0].0 < w[1].0, "n={n} a={a}: ω_{{{},{}}} !< ω_{{{},{}}}", w[0].1, w[0].2, w[1].1, w[1].2);
            }
        }
    }
    Ok(())
}

pub fn scaling_equivariance() -> Check {
    for n in 1..=10 {
        let p1 = problem(n, 1.0);
        let s1 = p1.support_points();
        let e1 = p1.admissible_region().map_err(|e| e.to_string())?.finite_endpoints();
        for a in [0.25, 0.5, 3.0, 7.5] {
            let pa = problem(n, a);
            for (x, y) in pa.support_points().iter().zip(&s1) {
                ensure!(rel(*x, a * y) <= 1e-12, "n={n} a={a}: support {x} vs {}", a * y);
            }
            let ea = pa.admissible_region().map_err(|e| e.to_string())?.finite_endpoints();
            ensure!(ea.len() == e1.len(), "n={n} a={a}: endpoint count");
            for (x, y) in ea.iter().zip(&e1) {
                ensure!(rel(*x, a * y) <= 1e-9, "n={n} a={a}: endpoint {x} vs {}", a * y);
            }
            for k in 0..=30 {
                let u = -1.0 + 3.0 * k as f64 / 30.0;
                let wa = pa.weights_at(a * u).map_err(|e| e.to_string())?;
                let w1 = p1.weights_at(u).map_err(|e| e.to_string())?;
                for (x, y) in wa.iter().zip(&w1) {
                    ensure!((x - y).abs() <= 1e-10, "n={n} a={a} u={u}: weight {x} vs {y}");
                }
            }
        }
    }
    Ok(())
}

/// On `A_j` every `(−1)^{n−i} L̄'_i(z)` has sign `(−1)^{n+j}`; on `A_n` all
/// are positive.
pub fn sign_patterns() -> Check {
    for n in 1..=10 {
        for a in SCALES {
            let pr = problem(n, a);
            let region = pr.admissible_region().map_err(|e| e.to_string())?;
            let derivs = pr.weight_functions();
            for (jm1, iv) in region.intervals().iter().enumerate() {
                let j = jm1 + 1;
                let common = if (n + j) % 2 == 0 { 1.0 } else { -1.0 };
                for k in 1..=5 {
                    let z = inside(iv, a, k as f64 / 6.0);
                    for (im1, d) in derivs.iter().enumerate() {
                        let alt = if (n - im1 - 1) % 2 == 0 { 1.0 } else { -1.0 };
                        let v = alt * d.eval(z);
                        ensure!(common * v > 0.0, "n={n} a={a} j={j} i={} z={z}: {v}", im1 + 1);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Sup-norm one on `[0, a]`, attained exactly at the support points, with
/// `S_n(s_i) = (−1)^{n−i}` and `S_n(0) = 0`.
pub fn extremal_polynomial_shape() -> Check {
    for n in 1..=10 {
        for a in SCALES {
            let pr = problem(n, a);
            let s_n = extremal_polynomial(&pr);
            let s = pr.support_points();
            for (i, &x) in s.iter().enumerate() {
                let want = if (n - i - 1) % 2 == 0 { 1.0 } else { -1.0 };
                ensure!((s_n.eval(x) - want).abs() <= 1e-9, "n={n} a={a}: S_n(s_{}) = {}", i + 1, s_n.eval(x));
            }
            ensure!(s_n.eval(0.0).abs() <= 1e-9, "n={n} a={a}: S_n(0) = {}", s_n.eval(0.0));
            let sup = (0..=2000).map(|k| s_n.eval(a * k as f64 / 2000.0).abs()).fold(0.0, f64::max);
            ensure!((sup - 1.0).abs() <= 1e-9, "n={n} a={a}: sup {sup}");
            let crit = s_n.derivative().real_roots(0.0, a).map_err(|e| e.to_string())?;
            ensure!(crit.len() == n - 1, "n={n} a={a}: {} interior extrema", crit.len());
            for (c, x) in crit.roots.iter().zip(&s) {
                ensure!((c - x).abs() <= 1e-9 * a.max(1.0), "n={n} a={a}: extremum {c} vs support {x}");
            }
        }
    }
    Ok(())
}

/// The fixed-support solve `F β = f'(z)` returns `(L̄'_1(z), …, L̄'_n(z))`.
pub fn beta_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=8 {
        let pr = problem(n, 1.0);
        let s = pr.support_points();
        let derivs = pr.weight_functions();
        for _ in 0..20 {
            let z = rng.gen_range(-1.0..2.0);
            let sol = restricted_weights(&s, &pr.slope_vector(z)).map_err(|e| e.to_string())?;
            let want: Vec<f64> = derivs.iter().map(|d| d.eval(z)).collect();
            let scale = want.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (b, w) in sol.beta.iter().zip(&want) {
                ensure!((b - w).abs() <= 1e-9 * scale, "n={n} z={z}: β̃ {b} vs {w}");
            }
        }
    }
    Ok(())
}

/// Nested grids `m → 2m − 1` never raise the LP variance.
pub fn grid_refinement() -> Check {
    for (n, z) in [(2, 0.3), (3, 0.2), (4, 0.1), (3, 0.4), (5, 0.6), (6, 0.05)] {
        let pr = problem(n, 1.0);
        let c = pr.slope_vector(z);
        let mut prev = f64::INFINITY;
        let mut m = 51;
        while m <= 3201 {
            let v = lp_c_optimal(&pr, &c, &GridSpec::new(m)).map_err(|e| e.to_string())?.variance;
            ensure!(v <= prev + 1e-12, "n={n} z={z} m={m}: {v} > {prev}");
            prev = v;
            m = 2 * m - 1;
        }
    }
    Ok(())
}
