//! `rho = |beta/alpha|^2` from classical scattering of `xi'' + omega(t)^2 xi = 0`.
//!
//! `xi -> (2 omega_-)^(-1/2) e^(-i omega_- t)` at early times and
//! `xi -> (2 omega_+)^(-1/2) (alpha e^(-i omega_+ t) + beta e^(i omega_+ t))`
//! at late times, so `|alpha|^2 - |beta|^2 = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::ode::{Dp5, Dp5Options};
use super::profile::FrequencyProfile;
use crate::error::{Error, Result};

/// Relative flatness required of `omega(t)` at both ends.
pub const FLATNESS: f64 = 1e-8;
/// Number of periods over which the flatness must persist.
pub const FLAT_PERIODS: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BogoliubovResult {
    #[serde(serialize_with = "complex_pair")]
    pub alpha: Complex64,
    #[serde(serialize_with = "complex_pair")]
    pub beta: Complex64,
    pub rho: f64,
    pub wronskian_residual: f64,
    pub steps: usize,
    pub rejected_steps: usize,
    /// Requested tolerance times the largest accepted error estimate.
    pub achieved_tol: f64,
    pub t_start: f64,
    pub t_match: f64,
}

fn complex_pair<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// First time, walking from `from` in direction `dir`, after which
/// `omega(t)` stays within `FLATNESS` of `target` for `FLAT_PERIODS` periods.
fn flat_time(profile: &FrequencyProfile, from: f64, dir: f64, target: f64) -> Result<f64> {
    let period = 2.0 * PI / target;
    let h = period / 16.0;
    let mut t = from;
    let mut last_bad: Option<f64> = None;
    let mut walked = 0.0;
    for _ in 0..4_000_000 {
        if (walked - last_bad.map_or(0.0, |b| (b - from) * dir)) >= FLAT_PERIODS * period {
            return Ok(last_bad.map_or(from, |b| b + dir * h));
        }
        if (profile.omega(t, t) - target).abs() >= FLATNESS * target {
            last_bad = Some(t);
        }
        t += dir * h;
        walked += h;
    }
    Err(Error::Integration {
        t,
        reason: format!("omega(t) does not approach {target} to {FLATNESS:e}"),
    })
}

pub fn bogoliubov_from_frequency(profile: &FrequencyProfile, tol: f64) -> Result<BogoliubovResult> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::invalid(format!(
            "tol must lie in [1e-12, 1e-4], got {tol:e}"
        )));
    }
    profile.validate()?;
    let (w_minus, w_plus) = profile.asymptotes();
    let centre = profile.center();
    let t_start = flat_time(profile, centre, -1.0, w_minus)?;
    let t_match = flat_time(profile, centre, 1.0, w_plus)?;
    let period = 2.0 * PI / w_plus;
    let t_end = t_match + period;

    let mut cuts = vec![t_start];
    cuts.extend(
        profile
            .breakpoints()
            .into_iter()
            .filter(|&b| b > t_start && b < t_end),
    );
    cuts.push(t_match);
    cuts.push(t_end);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let xi0 = Complex64::from_polar((2.0 * w_minus).powf(-0.5), -w_minus * t_start);
    let dxi0 = Complex64::new(0.0, -w_minus) * xi0;
    let mut y = [xi0.re, xi0.im, dxi0.re, dxi0.im];

    let scale = (2.0 * w_plus).sqrt() / 2.0;
    let project = |t: f64, y: &[f64; 4]| {
        let xi = Complex64::new(y[0], y[1]);
        let dxi = Complex64::new(y[2], y[3]);
        let i_dxi = Complex64::i() * dxi / w_plus;
        let alpha = scale * (xi + i_dxi) * Complex64::from_polar(1.0, w_plus * t);
        let beta = scale * (xi - i_dxi) * Complex64::from_polar(1.0, -w_plus * t);
        (alpha, beta)
    };

    // The state is normalized to |xi| ~ (2 omega)^(-1/2); the internal
    // tolerance leaves headroom for the global error of many steps.
    let mut ode = Dp5::new(Dp5Options::new(tol * 0.05));
    let mut avg_alpha = Complex64::new(0.0, 0.0);
    let mut avg_beta = Complex64::new(0.0, 0.0);
    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let side = 0.5 * (a + b);
        let rhs = |t: f64, y: &[f64; 4]| {
            let w2 = profile.omega2(t, side);
            [y[2], y[3], -w2 * y[0], -w2 * y[1]]
        };
        if a >= t_match {
            ode.opts.h_max = period / 32.0;
            let mut prev = Some((a, project(a, &y)));
            y = ode.integrate(rhs, a, b, y, |t, y| {
                let cur = project(t, y);
                if let Some((tp, (ap, bp))) = prev {
                    let dt = t - tp;
                    avg_alpha += 0.5 * dt * (ap + cur.0);
                    avg_beta += 0.5 * dt * (bp + cur.1);
                }
                prev = Some((t, cur));
            })?;
        } else {
            y = ode.integrate(rhs, a, b, y, |_, _| {})?;
        }
    }
    let alpha = avg_alpha / period;
    let beta = avg_beta / period;
    let wronskian_residual = (alpha.norm_sqr() - beta.norm_sqr() - 1.0).abs();
    let rho = beta.norm_sqr() / alpha.norm_sqr();
    if wronskian_residual >= 10.0 * tol {
        return Err(Error::Integration {
            t: t_end,
            reason: format!("Wronskian residual {wronskian_residual:e} exceeds 10 tol"),
        });
    }
    Ok(BogoliubovResult {
        alpha,
        beta,
        rho,
        wronskian_residual,
        steps: ode.stats.steps,
        rejected_steps: ode.stats.rejected,
        achieved_tol: ode.stats.max_error * ode.opts.rtol,
        t_start,
        t_match,
    })
}

/// `sinh^2(pi (w+ - w-) T / 2) / sinh^2(pi (w+ + w-) T / 2)` for the tanh ramp.
pub fn tanh_ramp_rho(omega_minus: f64, omega_plus: f64, t_scale: f64) -> f64 {
    let num = (0.5 * PI * (omega_plus - omega_minus) * t_scale).sinh();
    let den = (0.5 * PI * (omega_plus + omega_minus) * t_scale).sinh();
    (num / den).powi(2)
}

/// `((w+ - w-) / (w+ + w-))^2` for an instantaneous jump.
pub fn sudden_rho(omega_minus: f64, omega_plus: f64) -> f64 {
    ((omega_plus - omega_minus) / (omega_plus + omega_minus)).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excitation::profile::Samples;

    fn ramp(t: f64) -> FrequencyProfile {
        FrequencyProfile::TanhRamp {
            omega2_minus: 1.0,
            omega2_plus: 4.0,
            t_scale: t,
        }
    }

    #[test]
    fn constant_frequency_does_not_scatter() {
        let r =
            bogoliubov_from_frequency(&FrequencyProfile::Constant { omega: 1.7 }, 1e-10).unwrap();
        assert!(r.rho < 1e-20);
        assert!((r.alpha.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sudden_step() {
        let p = FrequencyProfile::SuddenStep {
            omega_minus: 1.0,
            omega_plus: 2.0,
            t_jump: 0.3,
        };
        let r = bogoliubov_from_frequency(&p, 1e-10).unwrap();
        assert!((r.rho - 1.0 / 9.0).abs() < 1e-6, "{r:?}");
        assert!(r.wronskian_residual < 1e-9);
    }

    #[test]
    fn tanh_ramp_matches_closed_form() {
        for t in [0.3, 1.0] {
            let r = bogoliubov_from_frequency(&ramp(t), 1e-10).unwrap();
            let want = tanh_ramp_rho(1.0, 2.0, t);
            assert!(
                ((r.rho - want) / want).abs() < 1e-6,
                "T={t}: {} vs {want}",
                r.rho
            );
            assert!(r.wronskian_residual < 1e-9);
        }
        assert!((tanh_ramp_rho(1.0, 2.0, 1.0) - 0.00170980698898692).abs() < 1e-15);
    }

    #[test]
    fn adiabatic_and_sudden_limits() {
        let slow = bogoliubov_from_frequency(&ramp(20.0 / 3.0), 1e-10).unwrap();
        assert!(slow.rho < 1e-3, "{}", slow.rho);
        let fast = bogoliubov_from_frequency(&ramp(1e-3 / 2.0), 1e-10).unwrap();
        let want = sudden_rho(1.0, 2.0);
        assert!(((fast.rho - want) / want).abs() < 0.01, "{}", fast.rho);
        assert!(fast.wronskian_residual < 1e-9);
    }

    #[test]
    fn tabulated_ramp() {
        let p = ramp(1.0);
        let times: Vec<f64> = (-400..=400).map(|k| k as f64 * 0.05).collect();
        let values = times.iter().map(|&t| p.omega(t, t)).collect();
        let tab = FrequencyProfile::Tabulated(Samples::new(times, values));
        let r = bogoliubov_from_frequency(&tab, 1e-10).unwrap();
        let want = tanh_ramp_rho(1.0, 2.0, 1.0);
        assert!(((r.rho - want) / want).abs() < 1e-3, "{} vs {want}", r.rho);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let p = FrequencyProfile::Constant { omega: 1.0 };
        assert!(bogoliubov_from_frequency(&p, 1e-3).is_err());
        assert!(bogoliubov_from_frequency(&p, 1e-13).is_err());
    }
}
