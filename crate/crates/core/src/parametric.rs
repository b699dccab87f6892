//! Oscillator with a time-dependent frequency and no external force.
//!
//! `G(u, v | rho) = sqrt((1 - rho) / [(1 - uv)^2 - rho (u - v)^2])`. The scalar
//! `sqrt(1 - rho)` is carried outside the series, so every exact entry has
//! the form `w_mn = sqrt(1 - rho) P_mn(rho)` with rational `P_mn`.

use num_complex::Complex64;
use num_traits::Zero;

use crate::domain::{ratio, Coeff, Poly};
use crate::error::{Error, Result};
use crate::forced::check_size;
use crate::quadrature::{gauss_jacobi_half, gauss_legendre};
use crate::series::Series2;
use crate::specfun::{arctanh, half_beta_integral};
use crate::table::{Family, Mode, Params, Prefactor, ProbTable, Symbolic};
use crate::{Rational, RationalPoly};

/// Parametric excitation parameter, `0 <= rho <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RhoParam(f64);

impl RhoParam {
    pub fn new(rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::invalid(format!("rho must lie in [0, 1], got {rho}")));
        }
        Ok(RhoParam(rho))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Fails unless `rho < 1`, for operations dividing by `1 - rho`.
    pub fn below_one(self) -> Result<Self> {
        if self.0 >= 1.0 {
            return Err(Error::domain("operation diverges at rho = 1"));
        }
        Ok(self)
    }
}

/// `G(u, v | rho)`, principal branch (equal to `sqrt(1 - rho)` at the origin).
pub fn param_gf_value(u: Complex64, v: Complex64, rho: RhoParam) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let a = one - u * v;
    let d = u - v;
    let den = a * a - rho.0 * d * d;
    if den.norm() < 1e-14 {
        return Err(Error::SingularEvaluation(
            "(1 - uv)^2 - rho (u - v)^2 vanishes".into(),
        ));
    }
    Ok((1.0 - rho.0).sqrt() / den.sqrt())
}

/// `[(1 - uv)^2 - rho (u - v)^2]^(-1/2)` in any coefficient domain.
pub fn param_series<T: Coeff>(rho: &T, max_u: usize, max_v: usize) -> Result<Series2<T>> {
    let a = Series2::from_terms(
        [
            (0, 0, T::one()),
            (1, 1, T::from_ratio(-2, 1) + rho.scale_ratio(2, 1)),
            (2, 2, T::one()),
            (2, 0, -rho.clone()),
            (0, 2, -rho.clone()),
        ],
        max_u,
        max_v,
    );
    a.pow(&T::from_ratio(-1, 2))
}

/// Polynomial parts `P_mn(rho)`, exact.
pub fn param_exact_series(max_u: usize, max_v: usize) -> Result<Series2<RationalPoly>> {
    param_series(&Poly::x(), max_u, max_v)
}

/// Square `size x size` table of `w_mn(rho)`.
pub fn param_prob_table(rho: RhoParam, size: usize, mode: Mode) -> Result<ProbTable> {
    check_size(size)?;
    let w = size - 1;
    let params = Params {
        rho: Some(rho.0),
        ..Default::default()
    };
    let scale = (1.0 - rho.0).sqrt();
    match mode {
        Mode::Exact => {
            let s = param_exact_series(w, w)?;
            let polys: Vec<Vec<RationalPoly>> = (0..size)
                .map(|m| (0..size).map(|n| s.at(m, n).clone()).collect())
                .collect();
            let entries = polys
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|p| scale * p.eval_f64_exact(rho.0))
                        .collect()
                })
                .collect();
            Ok(ProbTable::new(
                Family::Parametric,
                params,
                mode,
                entries,
                Some(Symbolic {
                    prefactor: Prefactor::SqrtOneMinusRho,
                    polys,
                }),
            ))
        }
        Mode::Float => {
            rho.below_one()?;
            let s = param_series(&rho.0, w, w)?;
            let entries = (0..size)
                .map(|m| (0..size).map(|n| scale * s.at(m, n)).collect())
                .collect();
            Ok(ProbTable::new(
                Family::Parametric,
                params,
                mode,
                entries,
                None,
            ))
        }
    }
}

/// Checks the parity/structure of an exact entry: zero for odd `m + n`,
/// otherwise `rho^(|m-n|/2)` times a polynomial of degree at most
/// `(m + n)/2 - |m - n|/2`.
pub fn structure_holds(p: &RationalPoly, m: usize, n: usize) -> bool {
    if (m + n) % 2 == 1 {
        return p.is_zero();
    }
    let half_gap = m.abs_diff(n) / 2;
    match p.shift_down(half_gap) {
        None => false,
        Some(q) => q.degree().is_none_or(|d| d <= (m + n) / 2 - half_gap),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eq6Check {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// `int_0^1 G(u, v | rho) / (1 - rho) drho` against
/// `2 (artanh u - artanh v) / (u - v)`.
pub fn param_identity_eq6(u: f64, v: f64) -> Result<Eq6Check> {
    if !(u.abs() < 1.0 && v.abs() < 1.0) {
        return Err(Error::domain(format!("need |u|, |v| < 1, got ({u}, {v})")));
    }
    let rule = gauss_jacobi_half(64)?;
    let a = (1.0 - u * v).powi(2);
    let d = (u - v).powi(2);
    let lhs = rule.integrate(|rho| 1.0 / (a - rho * d).sqrt());
    let rhs = if (u - v).abs() < 1e-6 {
        let mid = 0.5 * (u + v);
        2.0 / (1.0 - mid * mid)
    } else {
        2.0 * (arctanh(u)? - arctanh(v)?) / (u - v)
    };
    Ok(Eq6Check {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

/// `int_0^1 w_mn / (rho sqrt(1 - rho))` and its companion over `rho (1 - rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondIntegral {
    /// Exact `int_0^1 P_mn(rho) / rho drho`.
    pub value: Rational,
    /// Gauss–Legendre value of the same (polynomial) integrand.
    pub quadrature: f64,
    /// Printed prediction `(1 + (-1)^(m+n)) / |m - n|`.
    pub printed: Rational,
    /// Exact `int_0^1 w_mn / (rho (1 - rho)) drho`, which the printed
    /// right-hand side matches.
    pub over_rho_one_minus_rho: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedIntegrals {
    /// Exact `int_0^1 w_mn / (1 - rho) drho`.
    pub first: Rational,
    pub first_quadrature: f64,
    /// Predicted `(1 + (-1)^(m+n)) / (m + n + 1)`.
    pub first_predicted: Rational,
    /// Absent on the diagonal, where the second identity is undefined.
    pub second: Option<SecondIntegral>,
}

impl WeightedIntegrals {
    pub fn first_residual(&self) -> Rational {
        self.first.clone() - self.first_predicted.clone()
    }
}

fn parity_factor(m: usize, n: usize) -> i64 {
    if (m + n).is_multiple_of(2) {
        2
    } else {
        0
    }
}

/// Weighted integrals from an exact polynomial part.
pub fn weighted_integrals_from_poly(
    p: &RationalPoly,
    m: usize,
    n: usize,
) -> Result<WeightedIntegrals> {
    let first = half_beta_integral(p);
    let jac = gauss_jacobi_half(p.degree().unwrap_or(0) / 2 + 2)?;
    let first_quadrature = jac.integrate(|x| p.eval_f64(x));
    let first_predicted = ratio(parity_factor(m, n), (m + n + 1) as i64);
    let second = if m == n {
        None
    } else {
        Some(second_from_poly(p, m, n)?)
    };
    Ok(WeightedIntegrals {
        first,
        first_quadrature,
        first_predicted,
        second,
    })
}

fn second_from_poly(p: &RationalPoly, m: usize, n: usize) -> Result<SecondIntegral> {
    if m == n {
        return Err(Error::domain(
            "second weighted identity is undefined for m = n",
        ));
    }
    let q = p
        .shift_down(1)
        .ok_or_else(|| Error::domain("w_mn / rho is not a polynomial"))?;
    let value = q
        .coeffs()
        .iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (k, c)| {
            acc + c.clone() * ratio(1, k as i64 + 1)
        });
    let leg = gauss_legendre(q.degree().unwrap_or(0) / 2 + 1)?;
    let quadrature = leg.integrate(|x| q.eval_f64(x));
    Ok(SecondIntegral {
        value,
        quadrature,
        printed: ratio(parity_factor(m, n), m.abs_diff(n) as i64),
        over_rho_one_minus_rho: half_beta_integral(&q),
    })
}

/// Both weighted integrals for `(m, n)`.
pub fn param_weighted_integrals(m: usize, n: usize) -> Result<WeightedIntegrals> {
    let s = param_exact_series(m, n)?;
    weighted_integrals_from_poly(s.at(m, n), m, n)
}

/// Second weighted integral alone; errors on the diagonal.
pub fn param_second_integral(m: usize, n: usize) -> Result<SecondIntegral> {
    if m == n {
        return Err(Error::domain(
            "second weighted identity is undefined for m = n",
        ));
    }
    let s = param_exact_series(m, n)?;
    second_from_poly(s.at(m, n), m, n)
}

/// `int_0^1 sqrt(1 - rho) P(rho) drho` exactly and by Gauss–Jacobi.
fn j_integral(p: &RationalPoly) -> Result<(Rational, f64)> {
    let one_minus = Poly::new(vec![ratio(1, 1), ratio(-1, 1)]);
    let integrand = p.clone() * one_minus;
    let exact = half_beta_integral(&integrand);
    let rule = gauss_jacobi_half(integrand.degree().unwrap_or(0) / 2 + 2)?;
    Ok((exact, rule.integrate(|x| integrand.eval_f64(x))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jnn {
    pub closed_form: Rational,
    /// Term-by-term Beta integral of the exact entry.
    pub exact: Rational,
    pub quadrature: f64,
}

/// `(1 / (2n + 1)) [1 + 1 / ((2n + 3)(2n - 1))]`.
pub fn jnn_closed_form(n: usize) -> Rational {
    let n = n as i64;
    ratio(1, 2 * n + 1) * (ratio(1, 1) + ratio(1, (2 * n + 3) * (2 * n - 1)))
}

/// `J_nn = int_0^1 w_nn(rho) drho`.
pub fn param_jnn(n: usize) -> Result<Jnn> {
    let s = param_exact_series(n, n)?;
    let (exact, quadrature) = j_integral(s.at(n, n))?;
    Ok(Jnn {
        closed_form: jnn_closed_form(n),
        exact,
        quadrature,
    })
}

/// Off-diagonal `J_mn` by Gauss–Jacobi on the factored form.
pub fn param_j_offdiag(m: usize, n: usize) -> Result<f64> {
    if m == n {
        return Err(Error::invalid("use param_jnn for diagonal entries"));
    }
    if (m + n) % 2 == 1 {
        return Ok(0.0);
    }
    let s = param_exact_series(m, n)?;
    Ok(j_integral(s.at(m, n))?.1)
}

/// Exact off-diagonal `J_mn`.
pub fn param_j_exact(m: usize, n: usize) -> Result<Rational> {
    let s = param_exact_series(m, n)?;
    Ok(j_integral(s.at(m, n))?.0)
}

/// `S_k(rho)`: `sqrt(1 - rho)` for even `k`, zero for odd `k`.
pub fn param_sk(k: usize, rho: RhoParam) -> f64 {
    if k.is_multiple_of(2) {
        (1.0 - rho.0).sqrt()
    } else {
        0.0
    }
}

/// `<n>_m = -1/2 + (m + 1/2)(1 + rho)/(1 - rho)`.
pub fn param_mean_n(m: usize, rho: RhoParam) -> Result<f64> {
    let r = rho.below_one()?.0;
    Ok(-0.5 + (m as f64 + 0.5) * (1.0 + r) / (1.0 - r))
}

/// Truncated moments of row `m` with a tail estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct RowMoments {
    pub norm: f64,
    pub mean: f64,
    pub second: f64,
    /// Last column included.
    pub n_max: usize,
    /// Estimated contributions of the omitted columns to the zeroth, first and
    /// second moments.
    pub tail: [f64; 3],
}

impl RowMoments {
    pub fn dispersion(&self) -> f64 {
        self.second - self.mean * self.mean
    }

    /// Bound on the error of [`Self::dispersion`] from truncation.
    pub fn dispersion_error(&self) -> f64 {
        self.tail[2] + 2.0 * self.mean.abs() * self.tail[1] + self.tail[1] * self.tail[1]
    }
}

const ROW_CAP: usize = 1 << 15;

/// Row `m` summed far enough that the estimated tail of the second moment
/// is below `tol`. Beyond the last column the entries of one parity class
/// are bounded by a geometric sequence whose ratio is the larger of `rho` and
/// the last observed ratio `w_{m,N} / w_{m,N-2}`.
pub fn param_row_moments(m: usize, rho: RhoParam, tol: f64) -> Result<RowMoments> {
    let r = rho.below_one()?.0;
    let scale = (1.0 - r).sqrt();
    let mut n_max = 64.max(4 * m);
    loop {
        let s = param_series(&r, m, n_max)?;
        let row: Vec<f64> = (0..=n_max).map(|n| scale * s.at(m, n)).collect();
        let moments = moments_with_tail(&row, r);
        let err = moments.dispersion_error().max(moments.tail[0]);
        if err < tol || r == 0.0 {
            return Ok(moments);
        }
        if n_max >= ROW_CAP {
            return Err(Error::Precision {
                achieved: err,
                requested: tol,
            });
        }
        n_max = (n_max * 2).min(ROW_CAP);
    }
}

fn moments_with_tail(row: &[f64], rho: f64) -> RowMoments {
    let mut acc = [0.0f64; 3];
    for (n, &w) in row.iter().enumerate() {
        let x = n as f64;
        acc[0] += w;
        acc[1] += x * w;
        acc[2] += x * x * w;
    }
    let last = row.len() - 1;
    let mut tail = [0.0f64; 3];
    // Parity classes ending at `last` and `last - 1`.
    for end in [last, last.saturating_sub(1)] {
        let w_end = row[end];
        if w_end == 0.0 {
            continue;
        }
        let mut ratio = rho;
        for back in 1..=3 {
            if end >= 2 * back && row[end - 2 * back] > 0.0 {
                let k = end - 2 * (back - 1);
                ratio = ratio.max(row[k] / row[k - 2]);
            }
        }
        if ratio >= 1.0 {
            tail = [f64::INFINITY; 3];
            break;
        }
        let mut term = w_end;
        for i in 1.. {
            term *= ratio;
            let x = (end + 2 * i) as f64;
            tail[0] += term;
            tail[1] += x * term;
            tail[2] += x * x * term;
            if x * x * term < 1e-30 {
                break;
            }
        }
    }
    RowMoments {
        norm: acc[0],
        mean: acc[1],
        second: acc[2],
        n_max: last,
        tail,
    }
}

/// `<dn^2>_m` from row moments; fails with [`Error::Precision`] when the
/// tail cannot be brought below `tol`.
pub fn param_dispersion(m: usize, rho: RhoParam, tol: f64) -> Result<f64> {
    Ok(param_row_moments(m, rho, tol)?.dispersion())
}
