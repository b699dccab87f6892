//! Special functions used by the closed forms.

use num_bigint::BigInt;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::domain::{ratio, Coeff};
use crate::error::{Error, Result};
use crate::Rational;

/// Laguerre polynomial `L_s(x)` by forward recurrence
/// `(k + 1) L_{k+1} = (2k + 1 - x) L_k - k L_{k-1}`.
pub fn laguerre<F: Float>(s: usize, x: F) -> F {
    let mut prev = F::one();
    if s == 0 {
        return prev;
    }
    let mut cur = F::one() - x;
    for k in 1..s {
        let kf = F::from(k).unwrap();
        let next = ((kf + kf + F::one() - x) * cur - kf * prev) / (kf + F::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// All of `L_0(x), ..., L_s(x)`.
pub fn laguerre_all<F: Float>(s: usize, x: F) -> Vec<F> {
    let mut out = Vec::with_capacity(s + 1);
    out.push(F::one());
    if s == 0 {
        return out;
    }
    out.push(F::one() - x);
    for k in 1..s {
        let kf = F::from(k).unwrap();
        let next = ((kf + kf + F::one() - x) * out[k] - kf * out[k - 1]) / (kf + F::one());
        out.push(next);
    }
    out
}

/// `Gamma(n + a) / (n! Gamma(a))` for `a = -2j`, computed as the product
/// `prod_{k<n} (k + a) / (k + 1)` in any coefficient domain.
pub fn pochhammer_ratio<T: Coeff>(n: usize, a: &T) -> T {
    (0..n).fold(T::one(), |acc, k| {
        (acc * (a.clone() + T::from_ratio(k as i64, 1))).scale_ratio(1, k as i64 + 1)
    })
}

/// `Gamma(n - 2j) / (n! Gamma(-2j))`.
pub fn gamma_ratio_coeff(n: usize, j: f64) -> Result<f64> {
    let a = -2.0 * j;
    if !a.is_finite() || (a <= 0.0 && a == a.round()) {
        return Err(Error::domain(format!("Gamma(-2j) has a pole at j = {j}")));
    }
    Ok(pochhammer_ratio(n, &a))
}

/// Exact variant of [`gamma_ratio_coeff`] for rational `j`.
pub fn gamma_ratio_coeff_rational(n: usize, j: &Rational) -> Result<Rational> {
    let a = -(j.clone() * ratio(2, 1));
    if a.is_integer() && !a.is_positive() {
        return Err(Error::domain(format!("Gamma(-2j) has a pole at j = {j}")));
    }
    Ok(pochhammer_ratio(n, &a))
}

/// `artanh(x) = ln((1 + x) / (1 - x)) / 2` for `|x| < 1`.
pub fn arctanh(x: f64) -> Result<f64> {
    if !(x.abs() < 1.0) {
        return Err(Error::domain(format!("arctanh needs |x| < 1, got {x}")));
    }
    Ok(0.5 * (x.ln_1p() - (-x).ln_1p()))
}

/// `k!` as a rational.
pub fn factorial(k: usize) -> Rational {
    let f = (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    Rational::from_integer(f)
}

/// `int_0^1 (1 - x)^(-1/2) x^k dx = B(k + 1, 1/2)`, exactly.
pub fn half_beta_moment(k: usize) -> Rational {
    (0..k).fold(ratio(2, 1), |acc, i| {
        acc * ratio(2 * i as i64 + 2, 2 * i as i64 + 3)
    })
}

/// Exact `int_0^1 (1 - x)^(-1/2) p(x) dx` for a rational polynomial.
pub fn half_beta_integral(p: &crate::RationalPoly) -> Rational {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .fold(Rational::zero(), |acc, (k, c)| {
            acc + c * half_beta_moment(k)
        })
}

/// Exact `int_0^inf e^(-x) p(x) dx` for a rational polynomial.
pub fn laguerre_weight_integral(p: &crate::RationalPoly) -> Rational {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .fold(Rational::zero(), |acc, (k, c)| acc + c * factorial(k))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 3.7_f64), 1.0);
        // p_1 = 1 - L_1(2 nu) = 2 nu at nu = 0.7
        assert_relative_eq!(laguerre(1, 1.4_f64), -0.4, epsilon = 1e-15);
        // p_2 = 2 nu^2 - 2 nu + 1 = 1 at nu = 1 forces L_2(2) = -1
        assert_relative_eq!(laguerre(2, 2.0_f64), -1.0, epsilon = 1e-15);
        assert_relative_eq!(laguerre(2, 2.0_f32), -1.0, epsilon = 1e-6);
    }

    #[test]
    fn laguerre_matches_explicit_sum() {
        // L_s(x) = sum_k (-1)^k C(s, k) x^k / k!
        for s in 0..12usize {
            for &x in &[0.0, 0.5, 2.0, 7.5] {
                let mut binom = 1.0;
                let mut fact = 1.0;
                let mut explicit = 0.0;
                for k in 0..=s {
                    if k > 0 {
                        binom *= (s - k + 1) as f64 / k as f64;
                        fact *= k as f64;
                    }
                    explicit += (-1f64).powi(k as i32) * binom * f64::powi(x, k as i32) / fact;
                }
                assert_relative_eq!(
                    laguerre(s, x),
                    explicit,
                    epsilon = 1e-9,
                    max_relative = 1e-10
                );
            }
        }
        let all = laguerre_all(9, 1.3);
        for (s, v) in all.iter().enumerate() {
            assert_eq!(*v, laguerre(s, 1.3));
        }
    }

    proptest! {
        #[test]
        fn laguerre_recurrence_residual(s in 1usize..50, x in -20.0f64..20.0) {
            let l = laguerre_all(s + 1, x);
            let k = s as f64;
            let lhs = (k + 1.0) * l[s + 1];
            let rhs = (2.0 * k + 1.0 - x) * l[s] - k * l[s - 1];
            let scale = lhs.abs().max(((2.0 * k + 1.0 - x) * l[s]).abs()).max(1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn gamma_ratio_successive(n in 0usize..60, j in -3.0f64..-0.01) {
            prop_assume!((2.0 * j).fract() != 0.0);
            let a = gamma_ratio_coeff(n, j).unwrap();
            let b = gamma_ratio_coeff(n + 1, j).unwrap();
            let want = (n as f64 - 2.0 * j) / (n as f64 + 1.0);
            prop_assert!((b / a - want).abs() <= 1e-14 * want.abs());
        }
    }

    #[test]
    fn gamma_ratio_examples() {
        assert_eq!(gamma_ratio_coeff(0, -0.3).unwrap(), 1.0);
        assert_relative_eq!(gamma_ratio_coeff(1, -0.25).unwrap(), 0.5);
        assert_relative_eq!(gamma_ratio_coeff(2, -0.25).unwrap(), 0.375);
        assert_eq!(
            gamma_ratio_coeff_rational(2, &ratio(-1, 4)).unwrap(),
            ratio(3, 8)
        );
        // (2n - 1)!! / (2^n n!) pattern of the even vacuum row
        for n in 0..10usize {
            let dfact: i64 = (1..=n as i64).map(|k| 2 * k - 1).product();
            let want = ratio(dfact, (1i64 << n) * (1..=n as i64).product::<i64>());
            assert_eq!(gamma_ratio_coeff_rational(n, &ratio(-1, 4)).unwrap(), want);
        }
    }

    #[test]
    fn gamma_ratio_poles() {
        assert!(gamma_ratio_coeff(3, 0.0).is_err());
        assert!(gamma_ratio_coeff(3, 1.0).is_err());
        assert!(gamma_ratio_coeff(3, 0.5).is_err());
        assert!(gamma_ratio_coeff(3, 0.25).is_ok());
        assert!(gamma_ratio_coeff_rational(1, &ratio(1, 2)).is_err());
    }

    #[test]
    fn arctanh_values() {
        assert_eq!(arctanh(0.0).unwrap(), 0.0);
        assert_relative_eq!(arctanh(0.5).unwrap(), 0.5 * 3f64.ln(), epsilon = 1e-15);
        assert_eq!(arctanh(-0.3).unwrap(), -arctanh(0.3).unwrap());
        assert!(arctanh(1.0).is_err());
        assert!(arctanh(-1.5).is_err());
        assert!(arctanh(f64::NAN).is_err());
    }

    #[test]
    fn beta_moments() {
        assert_eq!(half_beta_moment(0), ratio(2, 1));
        assert_eq!(half_beta_moment(1), ratio(4, 3));
        assert_eq!(half_beta_moment(2), ratio(16, 15));
        assert_eq!(factorial(5), ratio(120, 1));
    }
}
