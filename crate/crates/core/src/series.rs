//! Truncated bivariate power series in `u`, `v`.
//!
//! A [`Series2`] holds the coefficients of `u^m v^n` for `m <= max_u`,
//! `n <= max_v` in a dense row-major grid. Every operation truncates to the
//! same box; since the box is closed under taking smaller exponents, the
//! truncated product, inverse, exponential and power are exact on the window.
//!
//! Transcendental operations use recurrences driven by the Euler operator
//! `D = u d/du + v d/dv`, which multiplies the coefficient of `u^m v^n` by
//! `m + n`. For `f = a^alpha` with `a(0,0) = 1` one has `a Df = alpha f Da`;
//! for `e = exp(x)` with `x(0,0) = 0` one has `De = e Dx`. Both determine the
//! coefficients in row-major order with one division by `m + n` each.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::Zero;

use crate::domain::Coeff;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Series2<T> {
    max_u: usize,
    max_v: usize,
    coeffs: Vec<T>,
}

impl<T: Coeff> Series2<T> {
    pub fn zeros(max_u: usize, max_v: usize) -> Self {
        Series2 {
            max_u,
            max_v,
            coeffs: vec![T::zero(); (max_u + 1) * (max_v + 1)],
        }
    }

    pub fn constant(c: T, max_u: usize, max_v: usize) -> Self {
        let mut s = Self::zeros(max_u, max_v);
        s.coeffs[0] = c;
        s
    }

    pub fn one(max_u: usize, max_v: usize) -> Self {
        Self::constant(T::one(), max_u, max_v)
    }

    /// Builds a series from `(m, n, c)` terms; terms outside the window are
    /// dropped and repeated exponents accumulate.
    pub fn from_terms<I>(terms: I, max_u: usize, max_v: usize) -> Self
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut s = Self::zeros(max_u, max_v);
        for (m, n, c) in terms {
            if m <= max_u && n <= max_v {
                let k = s.idx(m, n);
                s.coeffs[k] = s.coeffs[k].clone() + c;
            }
        }
        s
    }

    /// Builds a series from a coefficient function evaluated on the window.
    pub fn from_fn(max_u: usize, max_v: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut coeffs = Vec::with_capacity((max_u + 1) * (max_v + 1));
        for m in 0..=max_u {
            for n in 0..=max_v {
                coeffs.push(f(m, n));
            }
        }
        Series2 {
            max_u,
            max_v,
            coeffs,
        }
    }

    pub fn window(&self) -> (usize, usize) {
        (self.max_u, self.max_v)
    }

    #[inline]
    fn idx(&self, m: usize, n: usize) -> usize {
        m * (self.max_v + 1) + n
    }

    /// Coefficient of `u^m v^n`.
    pub fn coeff(&self, m: usize, n: usize) -> Result<&T> {
        if m > self.max_u || n > self.max_v {
            return Err(Error::OutOfRange {
                m,
                n,
                max_u: self.max_u,
                max_v: self.max_v,
            });
        }
        Ok(&self.coeffs[self.idx(m, n)])
    }

    /// Unchecked accessor for in-window indices.
    #[inline]
    pub fn at(&self, m: usize, n: usize) -> &T {
        &self.coeffs[self.idx(m, n)]
    }

    pub fn constant_term(&self) -> &T {
        &self.coeffs[0]
    }

    fn check_window(&self, other: &Self) -> Result<()> {
        if self.window() != other.window() {
            return Err(Error::WindowMismatch(self.window(), other.window()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_window(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() + b.clone()))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_window(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() - b.clone()))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        Series2 {
            max_u: self.max_u,
            max_v: self.max_v,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|c| c.clone() * k.clone())
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Series2<U> {
        Series2 {
            max_u: self.max_u,
            max_v: self.max_v,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Nonzero terms other than the constant, as `(i, j, c)`.
    fn nonconstant_terms(&self) -> Vec<(usize, usize, &T)> {
        let mut out = Vec::new();
        for i in 0..=self.max_u {
            for j in 0..=self.max_v {
                let c = self.at(i, j);
                if (i, j) != (0, 0) && !c.is_zero() {
                    out.push((i, j, c));
                }
            }
        }
        out
    }

    /// Truncated product.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_window(other)?;
        let mut out = Self::zeros(self.max_u, self.max_v);
        for i in 0..=self.max_u {
            for j in 0..=self.max_v {
                let a = self.at(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..=self.max_u - i {
                    for l in 0..=self.max_v - j {
                        let b = other.at(k, l);
                        if b.is_zero() {
                            continue;
                        }
                        let t = out.idx(i + k, j + l);
                        out.coeffs[t] = out.coeffs[t].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse within the window.
    pub fn inverse(&self) -> Result<Self> {
        let inv0 = self
            .constant_term()
            .try_recip()
            .ok_or(Error::SingularSeries)?;
        let terms = self.nonconstant_terms();
        let mut out = Self::zeros(self.max_u, self.max_v);
        out.coeffs[0] = inv0.clone();
        for m in 0..=self.max_u {
            for n in 0..=self.max_v {
                if (m, n) == (0, 0) {
                    continue;
                }
                let mut acc = T::zero();
                for &(i, j, a) in &terms {
                    if i <= m && j <= n {
                        acc = acc + a.clone() * out.at(m - i, n - j).clone();
                    }
                }
                let k = out.idx(m, n);
                out.coeffs[k] = -(acc * inv0.clone());
            }
        }
        Ok(out)
    }

    /// `exp(x)` for a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::invalid(
                "exp requires a zero constant term; factor the scalar exponential out",
            ));
        }
        let terms = self.nonconstant_terms();
        let mut out = Self::zeros(self.max_u, self.max_v);
        out.coeffs[0] = T::one();
        for m in 0..=self.max_u {
            for n in 0..=self.max_v {
                let d = m + n;
                if d == 0 {
                    continue;
                }
                let mut acc = T::zero();
                for &(i, j, x) in &terms {
                    if i <= m && j <= n {
                        let w = x.scale_ratio((i + j) as i64, 1);
                        acc = acc + w * out.at(m - i, n - j).clone();
                    }
                }
                let k = out.idx(m, n);
                out.coeffs[k] = acc.scale_ratio(1, d as i64);
            }
        }
        Ok(out)
    }

    /// `a^alpha` for a series with unit constant term, via the binomial
    /// series. `alpha` is an element of the coefficient domain, so exact
    /// domains need a rational exponent.
    pub fn pow(&self, alpha: &T) -> Result<Self> {
        if !self.constant_term().is_one() {
            return Err(Error::invalid(
                "pow requires a unit constant term; factor the scalar part out",
            ));
        }
        let terms = self.nonconstant_terms();
        let mut out = Self::zeros(self.max_u, self.max_v);
        out.coeffs[0] = T::one();
        for m in 0..=self.max_u {
            for n in 0..=self.max_v {
                let d = m + n;
                if d == 0 {
                    continue;
                }
                let mut acc = T::zero();
                for &(i, j, a) in &terms {
                    if i <= m && j <= n {
                        let e = i + j;
                        // alpha*e - (d - e)
                        let w = alpha.scale_ratio(e as i64, 1) - T::from_ratio((d - e) as i64, 1);
                        acc = acc + a.clone() * out.at(m - i, n - j).clone() * w;
                    }
                }
                let k = out.idx(m, n);
                out.coeffs[k] = acc.scale_ratio(1, d as i64);
            }
        }
        Ok(out)
    }

    /// Evaluates the truncated polynomial at `(u, v)` after mapping
    /// coefficients to complex numbers.
    pub fn eval_complex(
        &self,
        u: Complex64,
        v: Complex64,
        to_c: impl Fn(&T) -> Complex64,
    ) -> Complex64 {
        let mut total = Complex64::zero();
        for m in (0..=self.max_u).rev() {
            let mut row = Complex64::zero();
            for n in (0..=self.max_v).rev() {
                row = row * v + to_c(self.at(m, n));
            }
            total = total * u + row;
        }
        total
    }
}

impl<T: Coeff> std::fmt::Debug for Series2<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Series2[{}x{}]{{", self.max_u, self.max_v)?;
        let mut first = true;
        for m in 0..=self.max_u {
            for n in 0..=self.max_v {
                let c = self.at(m, n);
                if c.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "u^{m}v^{n}: {c:?}")?;
            }
        }
        write!(f, "}}")
    }
}

/// Sampling parameters for [`dft_extract`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DftConfig {
    pub radius: f64,
    /// Points per angle; `None` picks `max(4 (max(m, n) + 1), 64)`.
    pub grid: Option<usize>,
    /// Largest tolerated imaginary part of an extracted coefficient.
    pub imag_tol: f64,
}

impl Default for DftConfig {
    fn default() -> Self {
        DftConfig {
            radius: 0.5,
            grid: None,
            imag_tol: 1e-10,
        }
    }
}

impl DftConfig {
    pub fn with_radius(radius: f64) -> Self {
        DftConfig {
            radius,
            ..Default::default()
        }
    }
}

/// Coefficient `(m, n)` of an analytic function by trapezoidal contour
/// inversion on the torus `|u| = |v| = radius`.
pub fn dft_extract<F>(evaluator: F, m: usize, n: usize, cfg: &DftConfig) -> Result<f64>
where
    F: Fn(Complex64, Complex64) -> Result<Complex64>,
{
    let window = dft_extract_window(evaluator, m, n, cfg)?;
    Ok(window[m][n])
}

/// All coefficients `(0..=max_m, 0..=max_n)` from one set of samples.
///
/// The returned values are real parts; any imaginary part above
/// `cfg.imag_tol` is reported as [`Error::OracleFailure`].
pub fn dft_extract_window<F>(
    evaluator: F,
    max_m: usize,
    max_n: usize,
    cfg: &DftConfig,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(Complex64, Complex64) -> Result<Complex64>,
{
    let g = cfg.grid.unwrap_or((4 * (max_m.max(max_n) + 1)).max(64));
    if g <= max_m.max(max_n) {
        return Err(Error::invalid(format!(
            "grid {g} must exceed the largest extracted index {}",
            max_m.max(max_n)
        )));
    }
    if !(cfg.radius > 0.0) {
        return Err(Error::invalid("contour radius must be positive"));
    }
    let roots: Vec<Complex64> = (0..g)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / g as f64))
        .collect();
    let mut samples = vec![vec![Complex64::zero(); g]; g];
    for (a, row) in samples.iter_mut().enumerate() {
        for (b, s) in row.iter_mut().enumerate() {
            *s = evaluator(roots[a] * cfg.radius, roots[b] * cfg.radius)?;
        }
    }
    // Transform along v for each u-angle, then along u.
    let mut half = vec![vec![Complex64::zero(); max_n + 1]; g];
    for a in 0..g {
        for n in 0..=max_n {
            half[a][n] = (0..g)
                .map(|b| samples[a][b] * roots[(n * b) % g].conj())
                .sum();
        }
    }
    let norm = (g * g) as f64;
    let mut out = vec![vec![0.0; max_n + 1]; max_m + 1];
    for m in 0..=max_m {
        for n in 0..=max_n {
            let c: Complex64 = (0..g).map(|a| half[a][n] * roots[(m * a) % g].conj()).sum();
            let c = c / norm / cfg.radius.powi((m + n) as i32);
            if c.im.abs() > cfg.imag_tol {
                return Err(Error::OracleFailure {
                    residue: c.im.abs(),
                    tol: cfg.imag_tol,
                });
            }
            out[m][n] = c.re;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ratio, Poly};
    use crate::Rational;

    type R = Rational;

    fn rs(terms: &[(usize, usize, i64, i64)], w: usize) -> Series2<R> {
        Series2::from_terms(terms.iter().map(|&(m, n, p, q)| (m, n, ratio(p, q))), w, w)
    }

    fn geometric_uv(w: usize) -> Series2<R> {
        Series2::from_fn(w, w, |m, n| if m == n { ratio(1, 1) } else { ratio(0, 1) })
    }

    #[test]
    fn product_distributes() {
        let a = rs(&[(0, 0, 1, 1), (1, 0, 1, 1)], 3);
        let b = rs(&[(0, 0, 1, 1), (0, 1, 1, 1)], 3);
        let want = rs(&[(0, 0, 1, 1), (1, 0, 1, 1), (0, 1, 1, 1), (1, 1, 1, 1)], 3);
        assert_eq!(a.checked_mul(&b).unwrap(), want);
    }

    #[test]
    fn telescoping_product_is_one() {
        let w = 6;
        let one_minus_uv = rs(&[(0, 0, 1, 1), (1, 1, -1, 1)], w);
        let p = one_minus_uv.checked_mul(&geometric_uv(w)).unwrap();
        assert_eq!(p, Series2::one(w, w));
    }

    #[test]
    fn product_over_polynomial_domain() {
        let rho: Poly<R> = Poly::x();
        let one = Poly::<R>::constant(ratio(1, 1));
        let a = Series2::from_terms([(0, 0, one.clone()), (1, 0, -rho.clone())], 4, 4);
        let b = Series2::from_terms([(0, 0, one.clone()), (1, 0, rho.clone())], 4, 4);
        let want = Series2::from_terms([(0, 0, one), (2, 0, -(rho.clone() * rho))], 4, 4);
        assert_eq!(a.checked_mul(&b).unwrap(), want);
    }

    #[test]
    fn mismatched_windows_rejected() {
        let a = Series2::<f64>::one(2, 2);
        let b = Series2::<f64>::one(2, 3);
        assert!(matches!(a.checked_mul(&b), Err(Error::WindowMismatch(..))));
        assert!(matches!(a.checked_add(&b), Err(Error::WindowMismatch(..))));
    }

    #[test]
    fn inverse_of_one_minus_uv_is_geometric() {
        let w = 8;
        let inv = rs(&[(0, 0, 1, 1), (1, 1, -1, 1)], w).inverse().unwrap();
        assert_eq!(inv, geometric_uv(w));
        assert_eq!(
            Series2::<R>::one(3, 3).inverse().unwrap(),
            Series2::one(3, 3)
        );
    }

    #[test]
    fn inverse_of_two_plus_u() {
        let inv = rs(&[(0, 0, 2, 1), (1, 0, 1, 1)], 4).inverse().unwrap();
        for k in 0..=4usize {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(*inv.at(k, 0), ratio(sign, 1 << (k + 1)));
        }
        let back = inv
            .checked_mul(&rs(&[(0, 0, 2, 1), (1, 0, 1, 1)], 4))
            .unwrap();
        assert_eq!(back, Series2::one(4, 4));
    }

    #[test]
    fn singular_series_detected() {
        let a = rs(&[(1, 0, 1, 1)], 3);
        assert!(matches!(a.inverse(), Err(Error::SingularSeries)));
        let p = Series2::from_terms([(0, 0, Poly::<R>::x())], 2, 2);
        assert!(matches!(p.inverse(), Err(Error::SingularSeries)));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(Series2::<R>::zeros(4, 4).exp().unwrap(), Series2::one(4, 4));

        let nu = Poly::<R>::x();
        let x = Series2::from_terms([(1, 0, nu)], 5, 0);
        let e = x.exp().unwrap();
        let mut fact = 1i64;
        for k in 0..=5usize {
            if k > 0 {
                fact *= k as i64;
            }
            assert_eq!(*e.at(k, 0), Poly::monomial(ratio(1, fact), k));
        }

        let uv = rs(&[(1, 0, 1, 1), (0, 1, 1, 1)], 3).exp().unwrap();
        assert_eq!(*uv.at(1, 1), ratio(1, 1));
        assert_eq!(*uv.at(2, 1), ratio(1, 2));
    }

    #[test]
    fn exp_rejects_constant_term() {
        assert!(Series2::<f64>::one(2, 2).exp().is_err());
    }

    #[test]
    fn half_power_squares_back() {
        let rho = Poly::<R>::x();
        let one = Poly::<R>::constant(ratio(1, 1));
        let a = Series2::from_terms([(0, 0, one), (0, 2, -rho)], 0, 8);
        let s = a.pow(&Poly::constant(ratio(-1, 2))).unwrap();
        assert_eq!(*s.at(0, 2), Poly::monomial(ratio(1, 2), 1));
        assert_eq!(*s.at(0, 4), Poly::monomial(ratio(3, 8), 2));
        let sq = s.checked_mul(&s).unwrap().checked_mul(&a).unwrap();
        assert_eq!(sq, Series2::one(0, 8));
    }

    #[test]
    fn pow_of_square_matches_inverse() {
        let w = 7;
        let a = rs(&[(0, 0, 1, 1), (1, 1, -1, 1)], w);
        let sq = a.checked_mul(&a).unwrap();
        assert_eq!(sq.pow(&ratio(-1, 2)).unwrap(), a.inverse().unwrap());
        assert_eq!(
            Series2::<R>::one(3, 3).pow(&ratio(7, 3)).unwrap(),
            Series2::one(3, 3)
        );
    }

    #[test]
    fn pow_rejects_non_unit_constant() {
        let a = Series2::<f64>::constant(2.0, 2, 2);
        assert!(a.pow(&0.5).is_err());
    }

    #[test]
    fn coeff_accessor() {
        let g = geometric_uv(4);
        assert_eq!(*g.coeff(3, 3).unwrap(), ratio(1, 1));
        assert_eq!(*g.coeff(2, 3).unwrap(), ratio(0, 1));
        assert!(matches!(g.coeff(5, 0), Err(Error::OutOfRange { .. })));

        let nu = Poly::<R>::x();
        let eu = Series2::from_terms([(1, 0, nu.clone())], 3, 3)
            .exp()
            .unwrap();
        let ev = Series2::from_terms([(0, 1, nu)], 3, 3).exp().unwrap();
        let p = eu.checked_mul(&ev).unwrap();
        assert_eq!(*p.coeff(1, 1).unwrap(), Poly::monomial(ratio(1, 1), 2));
    }

    #[test]
    fn dft_recovers_geometric_coefficients() {
        let f = |u: Complex64, v: Complex64| Ok((Complex64::new(1.0, 0.0) - u * v).inv());
        let cfg = DftConfig {
            radius: 0.5,
            grid: Some(32),
            imag_tol: 1e-10,
        };
        assert!((dft_extract(f, 2, 2, &cfg).unwrap() - 1.0).abs() < 1e-12);
        assert!(dft_extract(f, 2, 1, &cfg).unwrap().abs() < 1e-12);
    }

    #[test]
    fn dft_flags_complex_coefficients() {
        let f = |u: Complex64, _v: Complex64| Ok(u * Complex64::new(0.0, 1.0));
        let r = dft_extract(f, 1, 0, &DftConfig::default());
        assert!(matches!(r, Err(Error::OracleFailure { .. })));
    }

    #[test]
    fn dft_grid_must_exceed_index() {
        let f = |_u: Complex64, _v: Complex64| Ok(Complex64::new(1.0, 0.0));
        let cfg = DftConfig {
            grid: Some(3),
            ..Default::default()
        };
        assert!(dft_extract(f, 3, 0, &cfg).is_err());
    }
}
