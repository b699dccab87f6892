//! Constant-frequency oscillator driven by an external force.
//!
//! The generating function of `w_mn(nu)` is
//! `G(u, v | nu) = (1 - uv)^-1 exp(-nu (1 - u)(1 - v) / (1 - uv))`.
//! Internally it is split as
//! `exp(-nu) * (1 - uv)^-1 * exp(nu (u + v - 2uv) / (1 - uv))`, so the series
//! engine only sees factors with unit or zero constant term.

use num_complex::Complex64;
use num_traits::Zero;

use crate::domain::{ratio, Coeff, Poly};
use crate::error::{Error, Result};
use crate::quadrature::gauss_laguerre;
use crate::series::Series2;
use crate::specfun::{factorial, laguerre_all, laguerre_weight_integral};
use crate::table::{Family, Mode, Params, Prefactor, ProbTable, Symbolic};
use crate::{Rational, RationalPoly};

/// Excitation parameter `nu >= 0` of the forced oscillator.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NuParam(f64);

impl NuParam {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(Error::invalid(format!(
                "nu must be finite and >= 0, got {nu}"
            )));
        }
        Ok(NuParam(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `G(u, v | nu)` evaluated at complex `u`, `v`.
pub fn forced_gf_value(u: Complex64, v: Complex64, nu: NuParam) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let den = one - u * v;
    if den.norm() < 1e-14 {
        return Err(Error::SingularEvaluation("pole of (1 - uv)^-1".into()));
    }
    let expo = -nu.0 * (one - u) * (one - v) / den;
    Ok(expo.exp() / den)
}

/// Series part `(1 - uv)^-1 exp(nu (u + v - 2uv) / (1 - uv))` in any
/// coefficient domain; `nu` is a domain element (a number, or the
/// indeterminate of a polynomial domain).
pub fn forced_series<T: Coeff>(nu: &T, max_u: usize, max_v: usize) -> Result<Series2<T>> {
    let one_minus_uv = Series2::from_terms([(0, 0, T::one()), (1, 1, -T::one())], max_u, max_v);
    let geometric = one_minus_uv.inverse()?;
    let numer = Series2::from_terms(
        [
            (1, 0, nu.clone()),
            (0, 1, nu.clone()),
            (1, 1, nu.scale_ratio(-2, 1)),
        ],
        max_u,
        max_v,
    );
    let exponent = numer.checked_mul(&geometric)?;
    geometric.checked_mul(&exponent.exp()?)
}

/// Polynomial parts `P_mn(nu)` with `w_mn = exp(-nu) P_mn(nu)`, exact.
pub fn forced_exact_series(max_u: usize, max_v: usize) -> Result<Series2<RationalPoly>> {
    forced_series(&Poly::x(), max_u, max_v)
}

/// Square `size x size` table of `w_mn(nu)`.
pub fn forced_prob_table(nu: NuParam, size: usize, mode: Mode) -> Result<ProbTable> {
    check_size(size)?;
    let w = size - 1;
    let params = Params {
        nu: Some(nu.0),
        ..Default::default()
    };
    let scale = (-nu.0).exp();
    match mode {
        Mode::Exact => {
            let s = forced_exact_series(w, w)?;
            let polys: Vec<Vec<RationalPoly>> = (0..size)
                .map(|m| (0..size).map(|n| s.at(m, n).clone()).collect())
                .collect();
            let entries = polys
                .iter()
                .map(|row| row.iter().map(|p| scale * p.eval_f64_exact(nu.0)).collect())
                .collect();
            Ok(ProbTable::new(
                Family::Forced,
                params,
                mode,
                entries,
                Some(Symbolic {
                    prefactor: Prefactor::ExpNegNu,
                    polys,
                }),
            ))
        }
        Mode::Float => {
            let s = forced_series(&nu.0, w, w)?;
            let entries = (0..size)
                .map(|m| (0..size).map(|n| scale * s.at(m, n)).collect())
                .collect();
            Ok(ProbTable::new(Family::Forced, params, mode, entries, None))
        }
    }
}

/// Row `m` of the table, columns `0..=max_n`, in floating point.
pub fn forced_row(m: usize, nu: NuParam, max_n: usize) -> Result<Vec<f64>> {
    let s = forced_series(&nu.0, m, max_n)?;
    let scale = (-nu.0).exp();
    Ok((0..=max_n).map(|n| scale * s.at(m, n)).collect())
}

pub(crate) fn check_size(size: usize) -> Result<()> {
    let cap = crate::max_window() + 1;
    if size == 0 || size > cap {
        return Err(Error::invalid(format!(
            "table size {size} outside 1..={cap}"
        )));
    }
    Ok(())
}

/// Moments of `w_mn(nu)` over `nu in [0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumRules {
    pub norm: Rational,
    pub mean: Rational,
    pub variance: Rational,
    /// Gauss–Laguerre values of the same three quantities.
    pub numeric: [f64; 3],
}

impl SumRules {
    /// Predicted `(1, m + n + 1, 2mn + m + n + 1)`.
    pub fn predicted(m: usize, n: usize) -> [Rational; 3] {
        let (m, n) = (m as i64, n as i64);
        [
            ratio(1, 1),
            ratio(m + n + 1, 1),
            ratio(2 * m * n + m + n + 1, 1),
        ]
    }
}

/// Sum rules from the polynomial part `P` of `w = exp(-nu) P(nu)`, integrated
/// exactly term by term (`int nu^k exp(-nu) = k!`).
pub fn sum_rules_from_poly(p: &RationalPoly) -> Result<SumRules> {
    let nu = Poly::<Rational>::x();
    let m0 = laguerre_weight_integral(p);
    let m1 = laguerre_weight_integral(&(p.clone() * nu.clone()));
    let m2 = laguerre_weight_integral(&(p.clone() * nu.clone() * nu));
    let variance =
        m2.clone() - ratio(2, 1) * m1.clone() * m1.clone() + m1.clone() * m1.clone() * m0.clone();

    let degree = p.degree().unwrap_or(0) + 2;
    let rule = gauss_laguerre(degree / 2 + 2)?;
    // P has alternating coefficients; evaluate it without cancellation.
    let values: Vec<f64> = rule.nodes().iter().map(|&x| p.eval_f64_exact(x)).collect();
    let weighted = |f: &dyn Fn(f64) -> f64| -> f64 {
        rule.nodes()
            .iter()
            .zip(rule.weights())
            .zip(&values)
            .map(|((&x, &w), &pv)| w * pv * f(x))
            .sum()
    };
    let q0 = weighted(&|_| 1.0);
    let q1 = weighted(&|x| x);
    let qvar = weighted(&|x| (x - q1).powi(2));

    Ok(SumRules {
        norm: m0,
        mean: m1,
        variance,
        numeric: [q0, q1, qvar],
    })
}

/// Sum rules for one `(m, n)` pair.
pub fn forced_sum_rules(m: usize, n: usize) -> Result<SumRules> {
    let s = forced_exact_series(m, n)?;
    sum_rules_from_poly(s.at(m, n))
}

/// `S_k(nu) = exp(-nu) sum_{s<=k} (-1)^s L_s(2 nu)`.
pub fn forced_sk(k: usize, nu: NuParam) -> f64 {
    let p: f64 = laguerre_all(k, 2.0 * nu.0)
        .iter()
        .enumerate()
        .map(|(s, l)| if s % 2 == 0 { *l } else { -*l })
        .sum();
    (-nu.0).exp() * p
}

/// Exact `p_k(nu)` recovered from anti-diagonal polynomial sums.
pub fn forced_pk_exact(k: usize) -> Result<RationalPoly> {
    let s = forced_exact_series(k, k)?;
    Ok((0..=k).fold(Poly::zero(), |acc, m| acc + s.at(m, k - m).clone()))
}

/// Poisson weight `nu^n exp(-nu) / n!`.
pub fn poisson(n: usize, nu: NuParam) -> f64 {
    let mut term = (-nu.0).exp();
    for k in 1..=n {
        term *= nu.0 / k as f64;
    }
    term
}

/// `nu^n / n!` as an exact polynomial.
pub fn poisson_poly(n: usize) -> RationalPoly {
    Poly::monomial(ratio(1, 1) / factorial(n), n)
}
