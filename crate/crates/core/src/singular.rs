//! Singular oscillator `H = p^2/2 + omega(t)^2 x^2/2 + g/(8 x^2)` on `x > 0`.
//!
//! The generating function is `g(u, v) = lambda^(-2j) / (1 - uv lambda^2)` with
//! `lambda = 2(1 - rho) / (A + sqrt(A^2 - 4uv(1 - rho)^2))`,
//! `A = 1 - rho(u + v) + uv`. Writing `lambda = (1 - rho) L` with `L(0, 0) = 1`
//! leaves the scalar `(1 - rho)^(-2j)` outside the series.

use num_complex::Complex64;
use num_traits::Zero;

use crate::domain::Coeff;
use crate::error::{Error, Result};
use crate::forced::check_size;
use crate::parametric::RhoParam;
use crate::series::Series2;
use crate::specfun::gamma_ratio_coeff;
use crate::table::{Family, Mode, Params, ProbTable};

/// Representation weight `j < 0`, optionally derived from the coupling `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightJ {
    j: f64,
    g: Option<f64>,
}

impl WeightJ {
    pub fn new(j: f64) -> Result<Self> {
        if !(j.is_finite() && j < 0.0) {
            return Err(Error::invalid(format!(
                "weight j must be negative, got {j}"
            )));
        }
        Ok(WeightJ { j, g: None })
    }

    pub fn value(self) -> f64 {
        self.j
    }

    pub fn coupling(self) -> Option<f64> {
        self.g
    }

    /// Even sector of the regular oscillator.
    pub fn even() -> Self {
        WeightJ { j: -0.25, g: None }
    }

    /// Odd sector of the regular oscillator (`g = 0`).
    pub fn odd() -> Self {
        WeightJ {
            j: -0.75,
            g: Some(0.0),
        }
    }
}

/// `j = -1/2 - sqrt(1 + g)/4`, for `g > -1`.
pub fn j_from_g(g: f64) -> Result<WeightJ> {
    if !(g.is_finite() && g > -1.0) {
        return Err(Error::domain(format!(
            "coupling must satisfy g > -1, got {g}"
        )));
    }
    Ok(WeightJ {
        j: -0.5 - 0.25 * (1.0 + g).sqrt(),
        g: Some(g),
    })
}

/// Instantaneous level `E_n = 2 omega (n - j)`.
pub fn energy_level(n: usize, omega: f64, j: WeightJ) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid(format!(
            "omega must be positive, got {omega}"
        )));
    }
    Ok(2.0 * omega * (n as f64 - j.j))
}

/// `lambda(u, v)` on the principal branch of the square root.
pub fn lambda_value(u: Complex64, v: Complex64, rho: RhoParam) -> Result<Complex64> {
    let r = rho.value();
    let one = Complex64::new(1.0, 0.0);
    let a = one - r * (u + v) + u * v;
    let radicand = a * a - 4.0 * (1.0 - r).powi(2) * u * v;
    if radicand.re < 0.0 && radicand.im.abs() <= 1e-12 * radicand.norm() {
        return Err(Error::SingularEvaluation(
            "radicand on the branch cut of sqrt".into(),
        ));
    }
    let den = a + radicand.sqrt();
    if den.norm() < 1e-14 {
        return Err(Error::SingularEvaluation(
            "lambda denominator vanishes".into(),
        ));
    }
    Ok(2.0 * (1.0 - r) / den)
}

/// `g(u, v) = lambda^(-2j) / (1 - uv lambda^2)`.
pub fn singular_gf_value(
    u: Complex64,
    v: Complex64,
    rho: RhoParam,
    j: WeightJ,
) -> Result<Complex64> {
    let lam = lambda_value(u, v, rho)?;
    let den = Complex64::new(1.0, 0.0) - u * v * lam * lam;
    if den.norm() < 1e-14 {
        return Err(Error::SingularEvaluation(
            "pole of 1/(1 - uv lambda^2)".into(),
        ));
    }
    if lam.is_zero() {
        return Ok(Complex64::zero());
    }
    Ok(lam.powf(-2.0 * j.j) / den)
}

/// `L^(-2j) / (1 - (1 - rho)^2 uv L^2)` with `L = lambda / (1 - rho)`, in any
/// coefficient domain. `minus_two_j` is `-2j` as a domain element.
pub fn singular_series<T: Coeff>(
    rho: &T,
    minus_two_j: &T,
    max_u: usize,
    max_v: usize,
) -> Result<Series2<T>> {
    let one_minus_rho = T::one() - rho.clone();
    let c = one_minus_rho.clone() * one_minus_rho;
    let a = Series2::from_terms(
        [
            (0, 0, T::one()),
            (1, 0, -rho.clone()),
            (0, 1, -rho.clone()),
            (1, 1, T::one()),
        ],
        max_u,
        max_v,
    );
    let four_c_uv = Series2::from_terms([(1, 1, c.scale_ratio(4, 1))], max_u, max_v);
    let radicand = a.checked_mul(&a)?.checked_sub(&four_c_uv)?;
    let root = radicand.pow(&T::from_ratio(1, 2))?;
    // (A + sqrt(R)) / 2 has unit constant term; L is its reciprocal.
    let half_sum = a.checked_add(&root)?.scale(&T::from_ratio(1, 2));
    let big_l = half_sum.inverse()?;
    let numer = big_l.pow(minus_two_j)?;
    let uv_c = Series2::from_terms([(1, 1, c)], max_u, max_v);
    let den =
        Series2::one(max_u, max_v).checked_sub(&uv_c.checked_mul(&big_l.checked_mul(&big_l)?)?)?;
    numer.checked_mul(&den.inverse()?)
}

/// Square `size x size` table of `w_mn(rho; j)` (floating point).
pub fn singular_prob_table(rho: RhoParam, j: WeightJ, size: usize) -> Result<ProbTable> {
    check_size(size)?;
    let r = rho.below_one()?.value();
    let w = size - 1;
    let s = singular_series(&r, &(-2.0 * j.j), w, w)?;
    let scale = (1.0 - r).powf(-2.0 * j.j);
    let entries = (0..size)
        .map(|m| (0..size).map(|n| scale * s.at(m, n)).collect())
        .collect();
    Ok(ProbTable::new(
        Family::Singular,
        Params {
            rho: Some(r),
            j: Some(j.j),
            ..Default::default()
        },
        Mode::Float,
        entries,
        None,
    ))
}

/// Row `m` of the singular table, columns `0..=max_n`.
pub fn singular_row(m: usize, rho: RhoParam, j: WeightJ, max_n: usize) -> Result<Vec<f64>> {
    let r = rho.below_one()?.value();
    let s = singular_series(&r, &(-2.0 * j.j), m, max_n)?;
    let scale = (1.0 - r).powf(-2.0 * j.j);
    Ok((0..=max_n).map(|n| scale * s.at(m, n)).collect())
}

/// Closed-form ground row
/// `w_0n = Gamma(n - 2j) / (n! Gamma(-2j)) rho^n (1 - rho)^(-2j)`.
pub fn ground_row(n: usize, rho: RhoParam, j: WeightJ) -> Result<f64> {
    let r = rho.below_one()?.value();
    let coeff = gamma_ratio_coeff(n, j.j)?;
    Ok(coeff * r.powi(n as i32) * (1.0 - r).powf(-2.0 * j.j))
}

/// Sum of the ground row with a geometric tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSum {
    pub sum: f64,
    pub terms: usize,
    pub tail: f64,
}

/// Sums `w_0n` until the estimated remainder is below `tol`. Successive
/// terms have ratio `rho (n - 2j)/(n + 1)`, which tends to `rho`.
pub fn ground_row_sum(rho: RhoParam, j: WeightJ, tol: f64) -> Result<RowSum> {
    let r = rho.below_one()?.value();
    let a = -2.0 * j.j;
    let mut term = (1.0 - r).powf(a);
    let mut sum = 0.0;
    for n in 0..200_000usize {
        sum += term;
        let ratio = r * (n as f64 + a) / (n as f64 + 1.0);
        let next = term * ratio;
        let bound_ratio = ratio.max(r);
        let tail = next / (1.0 - bound_ratio);
        // Once n + 1 > a the ratio decreases towards rho, so the geometric
        // bound with the current ratio is valid.
        if (n as f64) + 1.0 > a && bound_ratio < 1.0 && tail < tol {
            return Ok(RowSum {
                sum,
                terms: n + 1,
                tail,
            });
        }
        term = next;
    }
    Err(Error::Precision {
        achieved: term / (1.0 - r),
        requested: tol,
    })
}

/// Small-`rho` expansion of the diagonal probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticDiag {
    /// `2 [n^2 - (2n + 1) j]`.
    pub slope: f64,
    /// `N = 2 sqrt((n - j)^2 - (j(j + 1) + 3/16)) - 1/2`.
    pub big_n: f64,
    /// `(N^2 + N + 1) / 2`.
    pub slope_from_n: f64,
}

pub fn adiabatic_diag(n: usize, j: WeightJ) -> Result<AdiabaticDiag> {
    let (nf, j) = (n as f64, j.j);
    let radicand = (nf - j).powi(2) - (j * (j + 1.0) + 3.0 / 16.0);
    if radicand < 0.0 {
        return Err(Error::domain(format!("negative radicand {radicand} in N")));
    }
    let big_n = 2.0 * radicand.sqrt() - 0.5;
    Ok(AdiabaticDiag {
        slope: 2.0 * (nf * nf - (2.0 * nf + 1.0) * j),
        big_n,
        slope_from_n: 0.5 * (big_n * big_n + big_n + 1.0),
    })
}

/// Slope of `1 - w_nn(rho)` at the origin from two small-`rho` samples,
/// Richardson-combined: `2 s(rho1) - s(2 rho1)` with `s = (1 - w_nn)/rho`.
pub fn adiabatic_slope_numeric(n: usize, j: WeightJ, rho1: f64) -> Result<f64> {
    let s = |r: f64| -> Result<f64> {
        let row = singular_row(n, RhoParam::new(r)?, j, n)?;
        Ok((1.0 - row[n]) / r)
    };
    Ok(2.0 * s(rho1)? - s(2.0 * rho1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ratio, Poly};
    use crate::parametric::{param_exact_series, param_gf_value, param_prob_table};
    use crate::series::{dft_extract_window, DftConfig};
    use crate::table::max_abs_diff;
    use crate::RationalPoly;
    use approx::assert_relative_eq;

    fn rho(x: f64) -> RhoParam {
        RhoParam::new(x).unwrap()
    }

    fn wj(x: f64) -> WeightJ {
        WeightJ::new(x).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn weight_from_coupling() {
        assert_eq!(j_from_g(0.0).unwrap().value(), -0.75);
        assert_eq!(j_from_g(3.0).unwrap().value(), -1.0);
        assert!((j_from_g(-1.0 + 1e-12).unwrap().value() + 0.5).abs() < 1e-6);
        assert!(j_from_g(-1.0).is_err());
        assert!(WeightJ::new(0.0).is_err());
        assert!(WeightJ::new(-0.25).is_ok());
    }

    #[test]
    fn energy_levels() {
        assert_eq!(energy_level(0, 1.0, wj(-0.75)).unwrap(), 1.5);
        assert_eq!(energy_level(2, 0.5, wj(-1.0)).unwrap(), 3.0);
        for jv in [-0.25, -0.6, -1.7] {
            let e0 = energy_level(4, 1.3, wj(jv)).unwrap();
            let e1 = energy_level(5, 1.3, wj(jv)).unwrap();
            assert_relative_eq!(e1 - e0, 2.6, epsilon = 1e-14);
        }
        assert!(energy_level(0, 0.0, wj(-1.0)).is_err());
    }

    #[test]
    fn lambda_examples() {
        let l = lambda_value(c(0.0), c(0.0), rho(0.3)).unwrap();
        assert_relative_eq!(l.re, 0.7, epsilon = 1e-15);
        let l = lambda_value(c(0.0), c(0.4), rho(0.3)).unwrap();
        assert_relative_eq!(l.re, 0.7 / (1.0 - 0.12), epsilon = 1e-15);
        let a = lambda_value(c(0.2), c(0.3), rho(0.5)).unwrap();
        let b = lambda_value(c(0.3), c(0.2), rho(0.5)).unwrap();
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn gf_examples() {
        let g = singular_gf_value(c(0.0), c(0.0), rho(0.3), wj(-0.8)).unwrap();
        assert_relative_eq!(g.re, 0.7f64.powf(1.6), epsilon = 1e-15);
        let g = singular_gf_value(c(0.5), c(0.5), rho(0.0), wj(-0.25)).unwrap();
        assert_relative_eq!(g.re, 4.0 / 3.0, epsilon = 1e-15);
        let g = singular_gf_value(c(0.0), c(0.4), rho(0.3), wj(-0.5)).unwrap();
        assert_relative_eq!(g.re, 0.7 / 0.88, epsilon = 1e-15);
    }

    #[test]
    fn table_corner_and_reductions() {
        let t = singular_prob_table(rho(0.5), wj(-0.25), 5).unwrap();
        assert_relative_eq!(t.get(0, 0), 0.5f64.sqrt(), epsilon = 1e-15);
        for r in [0.1, 0.5, 0.9] {
            let p = param_prob_table(rho(r), 14, Mode::Float).unwrap();
            let even = singular_prob_table(rho(r), WeightJ::even(), 7).unwrap();
            let odd = singular_prob_table(rho(r), WeightJ::odd(), 7).unwrap();
            assert!(max_abs_diff(&even.entries, &p.reindexed(7, |k| 2 * k)) < 1e-10);
            assert!(max_abs_diff(&odd.entries, &p.reindexed(7, |k| 2 * k + 1)) < 1e-10);
        }
    }

    #[test]
    fn exact_reductions_in_rational_arithmetic() {
        // With (1 - rho)^(-2j) = sqrt(1 - rho) (1 - rho)^k factored out, the
        // remaining series coincide with the parametric polynomial parts.
        let x = Poly::x();
        let w = 5;
        let par = param_exact_series(2 * w + 1, 2 * w + 1).unwrap();
        let even = singular_series(&x, &Poly::constant(ratio(1, 2)), w, w).unwrap();
        let odd = singular_series(&x, &Poly::constant(ratio(3, 2)), w, w).unwrap();
        let one_minus: RationalPoly = Poly::new(vec![ratio(1, 1), ratio(-1, 1)]);
        for m in 0..=w {
            for n in 0..=w {
                assert_eq!(even.at(m, n), par.at(2 * m, 2 * n), "even ({m},{n})");
                let lifted = odd.at(m, n).clone() * one_minus.clone();
                assert_eq!(&lifted, par.at(2 * m + 1, 2 * n + 1), "odd ({m},{n})");
            }
        }
    }

    #[test]
    fn ground_row_examples() {
        let r = rho(0.4);
        assert_relative_eq!(
            ground_row(0, r, wj(-0.7)).unwrap(),
            0.6f64.powf(1.4),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            ground_row(1, r, WeightJ::even()).unwrap(),
            0.5 * 0.4 * 0.6f64.sqrt(),
            epsilon = 1e-15
        );
        let s = ground_row_sum(rho(0.8), wj(-1.3), 1e-14).unwrap();
        assert!((s.sum - 1.0).abs() < 1e-12, "{s:?}");
    }

    #[test]
    fn ground_row_matches_series() {
        for jv in [-0.25, -0.75, -0.6, -1.3] {
            for r in [0.1, 0.5, 0.9] {
                let row = singular_row(0, rho(r), wj(jv), 12).unwrap();
                for (n, &w) in row.iter().enumerate() {
                    let closed = ground_row(n, rho(r), wj(jv)).unwrap();
                    assert!((w - closed).abs() < 1e-10, "j={jv} rho={r} n={n}");
                }
            }
        }
    }

    #[test]
    fn adiabatic_examples() {
        let a = adiabatic_diag(0, WeightJ::even()).unwrap();
        assert_eq!((a.slope, a.big_n, a.slope_from_n), (0.5, 0.0, 0.5));
        let a = adiabatic_diag(0, WeightJ::odd()).unwrap();
        assert_relative_eq!(a.big_n, 1.0, epsilon = 1e-15);
        assert_relative_eq!(a.slope_from_n, 1.5, epsilon = 1e-15);
        let a = adiabatic_diag(2, WeightJ::even()).unwrap();
        assert_relative_eq!(a.big_n, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn adiabatic_slope_matches_series() {
        for jv in [-0.25, -0.75, -0.6] {
            for n in 0..=4 {
                let a = adiabatic_diag(n, wj(jv)).unwrap();
                assert!((a.slope - a.slope_from_n).abs() < 1e-12);
                let num = adiabatic_slope_numeric(n, wj(jv), 1e-4).unwrap();
                assert!(
                    ((num - a.slope) / a.slope).abs() < 1e-4,
                    "j={jv} n={n}: {num} vs {}",
                    a.slope
                );
            }
        }
    }

    #[test]
    fn series_matches_contour_oracle() {
        for jv in [-0.25, -0.75, -0.6, -1.3] {
            for r in [0.1, 0.5, 0.9] {
                let t = singular_prob_table(rho(r), wj(jv), 11).unwrap();
                let oracle = dft_extract_window(
                    |u, v| singular_gf_value(u, v, rho(r), wj(jv)),
                    10,
                    10,
                    &DftConfig::default(),
                )
                .unwrap();
                let d = max_abs_diff(&t.entries, &oracle);
                assert!(d < 1e-9, "j={jv} rho={r}: {d:e}");
            }
        }
    }

    #[test]
    fn contour_oracle_agrees_with_parametric_gf_for_even_sector() {
        let r = rho(0.5);
        let sing = dft_extract_window(
            |u, v| singular_gf_value(u, v, r, WeightJ::even()),
            4,
            4,
            &DftConfig::default(),
        )
        .unwrap();
        let par = dft_extract_window(|u, v| param_gf_value(u, v, r), 8, 8, &DftConfig::default())
            .unwrap();
        for m in 0..=4 {
            for n in 0..=4 {
                assert!(
                    (sing[m][n] - par[2 * m][2 * n]).abs() < 1e-9,
                    "({m},{n}) {} vs {}",
                    sing[m][n],
                    par[2 * m][2 * n]
                );
            }
        }
    }

    #[test]
    fn invariants_and_unitarity() {
        for jv in [-0.25, -0.75, -1.3, -2.0] {
            for r in [0.1, 0.5, 0.8] {
                let t = singular_prob_table(rho(r), wj(jv), 25).unwrap();
                t.check_invariants().unwrap();
            }
        }
    }
}
