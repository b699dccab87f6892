//! Generating functions and sum rules for quantum oscillators with
//! time-dependent parameters.
//!
//! Three families are covered, each characterised by one excitation
//! parameter:
//!
//! * [`forced`]: constant frequency under an external force, parameter `nu`;
//! * [`parametric`]: variable frequency, parameter `rho` in `[0, 1]`;
//! * [`singular`]: variable frequency plus a `g / 8x^2` barrier, parameters
//!   `rho` and the weight `j`.
//!
//! Transition probabilities `w_mn` are coefficients of bivariate generating
//! functions, extracted with the truncated-series engine in [`series`] over a
//! pluggable coefficient domain ([`domain::Coeff`]). Exact domains make the
//! integral sum rules checkable with zero residual. [`excitation`] computes
//! `nu` and `rho` from force and frequency profiles; [`verify`] bundles every
//! identity into a report.
//!
//! Units: `hbar = m = 1`.

pub mod domain;
pub mod error;
pub mod excitation;
pub mod forced;
pub mod parametric;
pub mod quadrature;
pub mod series;
pub mod singular;
pub mod specfun;
pub mod table;
pub mod verify;

pub use domain::{Coeff, Poly};
pub use error::{Error, Result};
pub use series::{DftConfig, Series2};
pub use table::{Family, Mode, ProbTable};

/// Arbitrary-precision rational numbers.
pub type Rational = num_rational::BigRational;
/// Polynomials in an excitation parameter with exact rational coefficients.
pub type RationalPoly = Poly<Rational>;

pub type SeriesF64 = Series2<f64>;
pub type SeriesF32 = Series2<f32>;
pub type SeriesC64 = Series2<num_complex::Complex64>;
pub type SeriesRational = Series2<Rational>;
pub type SeriesPoly = Series2<RationalPoly>;

pub use num_complex::Complex64;

/// Default truncation window (highest exponent kept in `u` and `v`).
pub const DEFAULT_WINDOW: usize = 24;

/// Environment variable capping series windows.
pub const MAX_WINDOW_ENV: &str = "OSCIGEN_MAX_WINDOW";

/// Largest window allowed, from [`MAX_WINDOW_ENV`] if set.
pub fn max_window() -> usize {
    std::env::var(MAX_WINDOW_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(512)
}
