//! Coefficient domains for truncated series.
//!
//! A [`Coeff`] is a commutative ring with a small amount of extra structure:
//! embedding of integer ratios, and a partial reciprocal. The exact
//! instantiations ([`Rational`], [`Poly<Rational>`]) never round.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Commutative ring contract used by [`crate::series::Series2`].
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Embeds the integer ratio `num / den` (`den != 0`).
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Multiplicative inverse if one exists in the domain.
    fn try_recip(&self) -> Option<Self>;

    /// `true` for domains whose arithmetic is exact.
    fn is_exact() -> bool;

    /// Scales by the integer ratio `num / den`.
    fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self.clone() * Self::from_ratio(num, den)
    }
}

impl Coeff for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn try_recip(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }

    fn is_exact() -> bool {
        false
    }

    fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self * num as f64 / den as f64
    }
}

impl Coeff for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }

    fn try_recip(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }

    fn is_exact() -> bool {
        false
    }
}

impl Coeff for Complex64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn try_recip(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.inv())
    }

    fn is_exact() -> bool {
        false
    }

    fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self * (num as f64 / den as f64)
    }
}

impl Coeff for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn try_recip(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn is_exact() -> bool {
        true
    }
}

/// Dense univariate polynomial `c[0] + c[1] x + c[2] x^2 + ...`.
///
/// Trailing zero coefficients are trimmed, so structural equality is
/// polynomial equality. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// The indeterminate `x`.
    pub fn x() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    /// `c * x^k`.
    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowest power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Horner evaluation in any domain the coefficients map into.
    pub fn eval_with<S, F>(&self, x: S, embed: F) -> S
    where
        S: Clone + Zero + Add<Output = S> + Mul<Output = S>,
        F: Fn(&T) -> S,
    {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + embed(c))
    }

    /// Divides by `x^k`; returns `None` if the division is not exact.
    pub fn shift_down(&self, k: usize) -> Option<Self> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) {
            return None;
        }
        Some(Poly::new(self.coeffs.iter().skip(k).cloned().collect()))
    }
}

impl Poly<Rational> {
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.eval_with(x, |c| c.to_f64().unwrap_or(f64::NAN))
    }

    /// Evaluates at the exact binary value of `x` and rounds once.
    pub fn eval_f64_exact(&self, x: f64) -> f64 {
        match Rational::from_float(x) {
            Some(r) => self.eval_rational(&r).to_f64().unwrap_or(f64::NAN),
            None => f64::NAN,
        }
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        self.eval_with(x.clone(), Clone::clone)
    }

    /// Sum of |c_k| x^k, used for rounding-error bounds.
    pub fn abs_eval_f64(&self, x: f64) -> f64 {
        self.eval_with(x, |c| c.abs().to_f64().unwrap_or(f64::NAN))
    }
}

impl<T: Coeff> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c:?}")?,
                1 => write!(f, "{c:?}*x")?,
                _ => write!(f, "{c:?}*x^{k}")?,
            }
        }
        Ok(())
    }
}

impl<T: Coeff> Add for Poly<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (mut long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self.coeffs, rhs.coeffs)
        } else {
            (rhs.coeffs, self.coeffs)
        };
        for (a, b) in long.iter_mut().zip(short) {
            *a = a.clone() + b;
        }
        Poly::new(long)
    }
}

impl<T: Coeff> Neg for Poly<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Poly {
            coeffs: self.coeffs.into_iter().map(Neg::neg).collect(),
        }
    }
}

impl<T: Coeff> Sub for Poly<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Coeff> Mul for Poly<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Coeff> Zero for Poly<T> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Coeff> One for Poly<T> {
    fn one() -> Self {
        Poly::constant(T::one())
    }
}

impl<T: Coeff> Coeff for Poly<T> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Poly::constant(T::from_ratio(num, den))
    }

    /// Only nonzero constants are units in a polynomial ring.
    fn try_recip(&self) -> Option<Self> {
        match self.coeffs.as_slice() {
            [c] => c.try_recip().map(Poly::constant),
            _ => None,
        }
    }

    fn is_exact() -> bool {
        T::is_exact()
    }

    fn scale_ratio(&self, num: i64, den: i64) -> Self {
        let r = T::from_ratio(num, den);
        Poly::new(self.coeffs.iter().map(|c| c.clone() * r.clone()).collect())
    }
}

/// `num / den` as a [`Rational`].
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

/// Renders a rational as `(numerator, denominator)` decimal strings.
pub fn rational_parts(r: &Rational) -> (String, String) {
    (r.numer().to_string(), r.denom().to_string())
}
