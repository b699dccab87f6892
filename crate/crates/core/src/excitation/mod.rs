//! Excitation parameters from physical profiles: `nu` from a force `f(t)`,
//! `rho` from a frequency `omega(t)`.

pub mod bogoliubov;
pub mod force;
pub mod ode;
pub mod profile;

use serde::Serialize;

pub use bogoliubov::{bogoliubov_from_frequency, sudden_rho, tanh_ramp_rho, BogoliubovResult};
pub use force::{force_fourier, nu_from_force};
pub use profile::{read_two_column_csv, ForceProfile, FrequencyProfile, Samples};

use crate::error::Result;
use crate::forced::{forced_row, NuParam};
use crate::parametric::{param_mean_n, param_prob_table, RhoParam};
use crate::table::Mode;

/// Number of vacuum-row probabilities in a report.
pub const REPORT_ROW: usize = 8;

/// Either kind of profile, for [`excitation_report`].
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Force { profile: ForceProfile, omega: f64 },
    Frequency { profile: FrequencyProfile, tol: f64 },
}

/// Excitation parameter with the mean quantum number and transition
/// probabilities out of the ground state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcitationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub mean_n0: f64,
    pub vacuum_row: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bogoliubov: Option<BogoliubovResult>,
}

pub fn excitation_report(profile: &Profile) -> Result<ExcitationReport> {
    match profile {
        Profile::Force { profile, omega } => {
            let nu = nu_from_force(profile, *omega)?;
            Ok(force_report(nu)?)
        }
        Profile::Frequency { profile, tol } => {
            let b = bogoliubov_from_frequency(profile, *tol)?;
            let rho = RhoParam::new(b.rho)?;
            let t = param_prob_table(rho, REPORT_ROW, Mode::Float)?;
            Ok(ExcitationReport {
                nu: None,
                rho: Some(b.rho),
                mean_n0: param_mean_n(0, rho)?,
                vacuum_row: (0..REPORT_ROW).map(|n| t.get(0, n)).collect(),
                bogoliubov: Some(b),
            })
        }
    }
}

fn force_report(nu: NuParam) -> Result<ExcitationReport> {
    Ok(ExcitationReport {
        nu: Some(nu.value()),
        rho: None,
        mean_n0: nu.value(),
        vacuum_row: forced_row(0, nu, REPORT_ROW - 1)?,
        bogoliubov: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_frequency_report() {
        let r = excitation_report(&Profile::Frequency {
            profile: FrequencyProfile::Constant { omega: 1.0 },
            tol: 1e-10,
        })
        .unwrap();
        assert!(r.rho.unwrap() < 1e-20);
        assert!(r.mean_n0.abs() < 1e-15);
        assert!((r.vacuum_row[0] - 1.0).abs() < 1e-12);
        assert!(r.vacuum_row[1..].iter().all(|w| w.abs() < 1e-12));
    }

    #[test]
    fn sudden_step_report() {
        let r = excitation_report(&Profile::Frequency {
            profile: FrequencyProfile::SuddenStep {
                omega_minus: 1.0,
                omega_plus: 2.0,
                t_jump: 0.0,
            },
            tol: 1e-10,
        })
        .unwrap();
        assert!((r.mean_n0 - 0.125).abs() < 1e-6);
        assert!(r.vacuum_row[1] == 0.0 && r.vacuum_row[3] == 0.0);
    }

    #[test]
    fn zero_force_report() {
        let r = excitation_report(&Profile::Force {
            profile: ForceProfile::zero(),
            omega: 2.0,
        })
        .unwrap();
        assert_eq!(r.nu, Some(0.0));
        assert_eq!(r.vacuum_row[0], 1.0);
        assert!(r.vacuum_row[1..].iter().all(|&w| w == 0.0));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"nu\":0.0") && !json.contains("rho"));
    }
}
