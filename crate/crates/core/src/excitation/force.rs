//! `nu = |int f(t) e^(-i omega t) dt|^2 / (2 omega)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::profile::{ForceProfile, Samples};
use crate::error::{Error, Result};
use crate::forced::NuParam;
use crate::quadrature::gauss_legendre;

/// Fourier transform `int f(t) e^(-i omega t) dt`.
pub fn force_fourier(profile: &ForceProfile, omega: f64) -> Result<Complex64> {
    check_omega(omega)?;
    profile.validate()?;
    let w = omega;
    Ok(match profile {
        ForceProfile::Gaussian { f0, tau, t0 } => {
            let mag = f0 * tau * PI.sqrt() * (-(w * tau).powi(2) / 4.0).exp();
            Complex64::from_polar(mag, -w * t0)
        }
        ForceProfile::Rectangular { f0, t_on, t_off } => {
            let centre = 0.5 * (t_on + t_off);
            let mag = 2.0 * f0 * (0.5 * w * (t_off - t_on)).sin() / w;
            Complex64::from_polar(mag, -w * centre)
        }
        ForceProfile::DampedCosine { f0, gamma, omega_d } => {
            let lorentz = |d: f64| gamma / (gamma * gamma + d * d);
            Complex64::new(f0 * (lorentz(w - omega_d) + lorentz(w + omega_d)), 0.0)
        }
        ForceProfile::Tabulated(s) => tabulated_fourier(s, w)?,
    })
}

pub fn nu_from_force(profile: &ForceProfile, omega: f64) -> Result<NuParam> {
    let ft = force_fourier(profile, omega)?;
    NuParam::new(ft.norm_sqr() / (2.0 * omega))
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid(format!(
            "omega must be positive, got {omega}"
        )));
    }
    Ok(())
}

/// Trapezoid rule on uniform grids (spectrally accurate for decaying
/// integrands); otherwise Gauss–Legendre panels on the local cubic, each
/// panel short compared with `1/omega`.
fn tabulated_fourier(s: &Samples, omega: f64) -> Result<Complex64> {
    let phase = |t: f64| Complex64::from_polar(1.0, -omega * t);
    if s.is_uniform() {
        let n = s.times.len();
        let h = (s.times[n - 1] - s.times[0]) / (n - 1) as f64;
        let sum: Complex64 = s
            .times
            .iter()
            .zip(&s.values)
            .enumerate()
            .map(|(k, (&t, &f))| {
                let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                w * f * phase(t)
            })
            .sum();
        return Ok(sum * h);
    }
    let rule = gauss_legendre(8)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for w in s.times.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = ((b - a) * omega / 0.5).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        for p in 0..pieces {
            let lo = a + p as f64 * h;
            for (&x, &wt) in rule.nodes().iter().zip(rule.weights()) {
                let t = lo + x * h;
                acc += wt * h * s.interpolate(t) * phase(t);
            }
        }
    }
    Ok(acc)
}
