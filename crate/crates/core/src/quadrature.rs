//! Gaussian quadrature rules matched to the integrands of the sum rules.
//!
//! All rules are built the same way: the symmetric Jacobi matrix of the
//! monic three-term recurrence seeds the nodes (Golub–Welsch), each node is
//! polished by Newton's method on the orthonormal recurrence, and weights
//! come from the Christoffel sum `1 / sum_k p_k(x)^2`, which is a sum of
//! positive terms and keeps tiny weights relatively accurate.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    /// `int_0^1 f(x) dx`.
    Legendre,
    /// `int_0^inf e^(-x) f(x) dx`.
    Laguerre,
    /// `int_0^1 (1 - x)^(-1/2) f(x) dx`.
    JacobiHalf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    kind: RuleKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadRule {
    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule to the smooth factor `f` of the integrand.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss–Legendre on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Result<QuadRule> {
    check_count(n, 256)?;
    build(
        RuleKind::Legendre,
        n,
        1.0,
        |_| 0.5,
        |k| {
            let k = k as f64;
            k * k / (4.0 * (4.0 * k * k - 1.0))
        },
    )
}

/// Gauss–Laguerre for the weight `e^(-x)` on `[0, inf)`.
pub fn gauss_laguerre(n: usize) -> Result<QuadRule> {
    check_count(n, 128)?;
    build(
        RuleKind::Laguerre,
        n,
        1.0,
        |k| 2.0 * k as f64 + 1.0,
        |k| {
            let k = k as f64;
            k * k
        },
    )
}

/// Gauss–Jacobi for the weight `(1 - x)^(-1/2)` on `[0, 1]`.
pub fn gauss_jacobi_half(n: usize) -> Result<QuadRule> {
    check_count(n, 128)?;
    // Jacobi(a = -1/2, b = 0) on [-1, 1], mapped by x -> (1 + x) / 2.
    let (a, b) = (-0.5_f64, 0.0_f64);
    let alpha = move |k: usize| {
        let s = 2.0 * k as f64 + a + b;
        let on_pm1 = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        0.5 * (1.0 + on_pm1)
    };
    let beta = move |k: usize| {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let on_pm1 =
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0));
        0.25 * on_pm1
    };
    build(RuleKind::JacobiHalf, n, 2.0, alpha, beta)
}

fn check_count(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::invalid(format!("node count {n} outside 1..={max}")));
    }
    Ok(())
}

/// Orthonormal polynomial values `p_0..=p_n` and the derivative of `p_n`.
fn orthonormal(
    x: f64,
    n: usize,
    mu0: f64,
    alpha: &impl Fn(usize) -> f64,
    sqrt_beta: &[f64],
) -> (Vec<f64>, f64) {
    let mut p = Vec::with_capacity(n + 1);
    let mut prev = 0.0;
    let mut dprev = 0.0;
    let mut cur = 1.0 / mu0.sqrt();
    let mut dcur = 0.0;
    p.push(cur);
    for k in 0..n {
        let back = if k == 0 { 0.0 } else { sqrt_beta[k] };
        let next = ((x - alpha(k)) * cur - back * prev) / sqrt_beta[k + 1];
        let dnext = (cur + (x - alpha(k)) * dcur - back * dprev) / sqrt_beta[k + 1];
        prev = cur;
        dprev = dcur;
        cur = next;
        dcur = dnext;
        p.push(cur);
    }
    (p, dcur)
}

fn build(
    kind: RuleKind,
    n: usize,
    mu0: f64,
    alpha: impl Fn(usize) -> f64,
    beta: impl Fn(usize) -> f64,
) -> Result<QuadRule> {
    let sqrt_beta: Vec<f64> = (0..=n)
        .map(|k| if k == 0 { 0.0 } else { beta(k).sqrt() })
        .collect();

    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jac[(k, k)] = alpha(k);
        if k + 1 < n {
            jac[(k, k + 1)] = sqrt_beta[k + 1];
            jac[(k + 1, k)] = sqrt_beta[k + 1];
        }
    }
    let mut seeds: Vec<f64> = SymmetricEigen::new(jac)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    seeds.sort_by(f64::total_cmp);

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for seed in seeds {
        let mut x = seed;
        for _ in 0..8 {
            let (p, dp) = orthonormal(x, n, mu0, &alpha, &sqrt_beta);
            let step = p[n] / dp;
            if !step.is_finite() {
                break;
            }
            x -= step;
            if step.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        let (p, _) = orthonormal(x, n, mu0, &alpha, &sqrt_beta);
        let norm: f64 = p[..n].iter().map(|v| v * v).sum();
        nodes.push(x);
        weights.push(1.0 / norm);
    }
    Ok(QuadRule {
        kind,
        nodes,
        weights,
    })
}

/// Node count that integrates `e^(-x) x^k p(x)` exactly for `deg p <= degree`.
pub fn laguerre_nodes_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{factorial, half_beta_moment, to_f64};
    use approx::assert_relative_eq;

    #[test]
    fn legendre_examples() {
        let r2 = gauss_legendre(2).unwrap();
        assert_relative_eq!(r2.integrate(|x| x), 0.5, epsilon = 1e-16);
        assert_relative_eq!(r2.integrate(|x| x.powi(3)), 0.25, epsilon = 1e-15);
        // The endpoint branch point limits Legendre to O(n^-3) here; the
        // Jacobi rule absorbs it and is exact.
        let r64 = gauss_legendre(64).unwrap();
        let err = (r64.integrate(|x| (1.0 - x).sqrt()) - 2.0 / 3.0).abs();
        assert!(err < 5e-7 && err > 1e-8, "{err}");
        let j = gauss_jacobi_half(2).unwrap();
        assert_relative_eq!(j.integrate(|x| 1.0 - x), 2.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn laguerre_examples() {
        let r = gauss_laguerre(3).unwrap();
        assert_relative_eq!(r.integrate(|_| 1.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.integrate(|x| x), 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.integrate(|x| x.powi(5)), 120.0, max_relative = 1e-14);
    }

    #[test]
    fn jacobi_examples() {
        let r = gauss_jacobi_half(4).unwrap();
        assert_relative_eq!(r.integrate(|_| 1.0), 2.0, max_relative = 1e-15);
        assert_relative_eq!(r.integrate(|x| x), 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(r.integrate(|x| x * x), 16.0 / 15.0, max_relative = 1e-15);
    }

    #[test]
    fn node_count_limits() {
        assert!(gauss_legendre(0).is_err());
        assert!(gauss_legendre(257).is_err());
        assert!(gauss_legendre(256).is_ok());
        assert!(gauss_laguerre(129).is_err());
        assert!(gauss_jacobi_half(129).is_err());
        assert!(gauss_jacobi_half(128).is_ok());
    }

    fn check_exactness(rule: &QuadRule, exact: impl Fn(usize) -> f64) {
        let n = rule.len();
        for k in 0..2 * n {
            let got = rule.integrate(|x| x.powi(k as i32));
            let want = exact(k);
            assert!(
                ((got - want) / want).abs() < 1e-13,
                "{:?} n={n} degree {k}: {got} vs {want}",
                rule.kind()
            );
        }
    }

    #[test]
    fn monomial_exactness_all_kinds() {
        for n in [1, 2, 3, 5, 8, 13, 20, 32] {
            check_exactness(&gauss_legendre(n).unwrap(), |k| 1.0 / (k as f64 + 1.0));
            check_exactness(&gauss_laguerre(n).unwrap(), |k| to_f64(&factorial(k)));
            check_exactness(&gauss_jacobi_half(n).unwrap(), |k| {
                to_f64(&half_beta_moment(k))
            });
        }
    }

    #[test]
    fn nodes_inside_and_weights_positive() {
        let rules = [
            gauss_legendre(256).unwrap(),
            gauss_laguerre(128).unwrap(),
            gauss_jacobi_half(128).unwrap(),
        ];
        for r in &rules {
            let (lo, hi) = match r.kind() {
                RuleKind::Laguerre => (0.0, f64::INFINITY),
                _ => (0.0, 1.0),
            };
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]), "{:?}", r.kind());
            assert!(
                r.nodes().iter().all(|&x| x > lo && x < hi),
                "{:?}",
                r.kind()
            );
            assert!(r.weights().iter().all(|&w| w > 0.0), "{:?}", r.kind());
        }
        let l = gauss_laguerre(128).unwrap();
        assert_relative_eq!(l.weights().iter().sum::<f64>(), 1.0, max_relative = 1e-13);
    }
}
