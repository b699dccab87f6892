//! Declarative force and frequency profiles, loaded from JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tabulated samples, given inline or as a path to a two-column CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Samples {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl Samples {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Self {
        Samples {
            times,
            values,
            csv: None,
        }
    }

    /// Reads the CSV file, if any, relative to `base`.
    fn resolve(&mut self, base: Option<&Path>) -> Result<()> {
        let Some(path) = self.csv.take() else {
            return Ok(());
        };
        if !self.times.is_empty() || !self.values.is_empty() {
            return Err(Error::Profile(
                "give either inline samples or a csv path, not both".into(),
            ));
        }
        let path = match base {
            Some(b) if path.is_relative() => b.join(path),
            _ => path,
        };
        let (times, values) = read_two_column_csv(&path)?;
        self.times = times;
        self.values = values;
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.csv.is_some() {
            return Err(Error::Profile("csv samples not loaded".into()));
        }
        if self.times.len() != self.values.len() {
            return Err(Error::Profile(format!(
                "{} times but {} values",
                self.times.len(),
                self.values.len()
            )));
        }
        if self.times.len() < 4 {
            return Err(Error::Profile("need at least 4 samples".into()));
        }
        if self
            .times
            .iter()
            .chain(&self.values)
            .any(|x| !x.is_finite())
        {
            return Err(Error::Profile("samples must be finite".into()));
        }
        if !self.times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Profile("sample times must increase strictly".into()));
        }
        Ok(())
    }

    /// `true` when the spacing is uniform to 1e-9 relative.
    pub fn is_uniform(&self) -> bool {
        let h = (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64;
        self.times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
    }

    /// Smooth local cubic (Hermite with three-point slopes), constant
    /// continuation outside the sample range.
    pub fn interpolate(&self, t: f64) -> f64 {
        let (x, y) = (&self.times, &self.values);
        let n = x.len();
        if t <= x[0] {
            return y[0];
        }
        if t >= x[n - 1] {
            return y[n - 1];
        }
        let i = x
            .partition_point(|&xi| xi <= t)
            .saturating_sub(1)
            .min(n - 2);
        let h = x[i + 1] - x[i];
        let s = (t - x[i]) / h;
        let (d0, d1) = (self.slope(i), self.slope(i + 1));
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * y[i] + h10 * h * d0 + h01 * y[i + 1] + h11 * h * d1
    }

    fn slope(&self, i: usize) -> f64 {
        let (x, y) = (&self.times, &self.values);
        let n = x.len();
        if i == 0 {
            return (y[1] - y[0]) / (x[1] - x[0]);
        }
        if i == n - 1 {
            return (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
        }
        let (hl, hr) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        let (dl, dr) = ((y[i] - y[i - 1]) / hl, (y[i + 1] - y[i]) / hr);
        (hr * dl + hl * dr) / (hl + hr)
    }
}

/// Reads `(time, value)` rows; `#` starts a comment line.
pub fn read_two_column_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Profile(format!(
                "{}: record {} has {} fields, expected 2",
                path.display(),
                line + 1,
                record.len()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| {
                Error::Profile(format!("{}: record {}: {e}", path.display(), line + 1))
            })
        };
        times.push(parse(&record[0])?);
        values.push(parse(&record[1])?);
    }
    Ok((times, values))
}

/// Driving force `f(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForceProfile {
    /// `f0 exp(-(t - t0)^2 / tau^2)`.
    Gaussian {
        f0: f64,
        tau: f64,
        t0: f64,
    },
    /// `f0` on `[t_on, t_off]`, zero elsewhere.
    Rectangular {
        f0: f64,
        t_on: f64,
        t_off: f64,
    },
    /// `f0 exp(-gamma |t|) cos(omega_d t)`.
    DampedCosine {
        f0: f64,
        gamma: f64,
        omega_d: f64,
    },
    Tabulated(Samples),
}

impl ForceProfile {
    pub fn zero() -> Self {
        ForceProfile::Gaussian {
            f0: 0.0,
            tau: 1.0,
            t0: 0.0,
        }
    }

    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut p: ForceProfile = serde_json::from_str(text)?;
        if let ForceProfile::Tabulated(s) = &mut p {
            s.resolve(base)?;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?, path.parent())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ForceProfile::Gaussian { f0, tau, t0 } => f0 * (-((t - t0) / tau).powi(2)).exp(),
            ForceProfile::Rectangular { f0, t_on, t_off } => {
                if (*t_on..=*t_off).contains(&t) {
                    *f0
                } else {
                    0.0
                }
            }
            ForceProfile::DampedCosine { f0, gamma, omega_d } => {
                f0 * (-gamma * t.abs()).exp() * (omega_d * t).cos()
            }
            ForceProfile::Tabulated(s) => s.interpolate(t),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match self {
            ForceProfile::Gaussian { f0, tau, t0 } => {
                if !finite(&[*f0, *tau, *t0]) || *tau <= 0.0 {
                    return Err(Error::Profile(
                        "gaussian needs finite f0, t0 and tau > 0".into(),
                    ));
                }
            }
            ForceProfile::Rectangular { f0, t_on, t_off } => {
                if !finite(&[*f0, *t_on, *t_off]) || t_off < t_on {
                    return Err(Error::Profile(
                        "rectangular needs finite f0 and t_on <= t_off".into(),
                    ));
                }
            }
            ForceProfile::DampedCosine { f0, gamma, omega_d } => {
                if !finite(&[*f0, *gamma, *omega_d]) || *gamma <= 0.0 {
                    return Err(Error::Profile(
                        "damped_cosine needs gamma > 0 so that f decays".into(),
                    ));
                }
            }
            ForceProfile::Tabulated(s) => {
                s.validate()?;
                let peak = s.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let ends = s.values[0].abs().max(s.values[s.values.len() - 1].abs());
                if ends > 1e-8 * peak {
                    return Err(Error::Profile(format!(
                        "tabulated force does not decay: end value {ends:e} exceeds 1e-8 of peak {peak:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Frequency profile `omega(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FrequencyProfile {
    Constant {
        omega: f64,
    },
    /// `omega_minus` before `t_jump`, `omega_plus` from `t_jump` on.
    SuddenStep {
        omega_minus: f64,
        omega_plus: f64,
        t_jump: f64,
    },
    /// `omega^2 = omega2_minus + (omega2_plus - omega2_minus)(1 + tanh(t/T))/2`.
    TanhRamp {
        omega2_minus: f64,
        omega2_plus: f64,
        #[serde(rename = "T")]
        t_scale: f64,
    },
    /// Samples of `omega(t)`.
    Tabulated(Samples),
}

impl FrequencyProfile {
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut p: FrequencyProfile = serde_json::from_str(text)?;
        if let FrequencyProfile::Tabulated(s) = &mut p {
            s.resolve(base)?;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?, path.parent())
    }

    /// `omega(t)^2`. At a jump the value of the side containing `side` is used.
    pub fn omega2(&self, t: f64, side: f64) -> f64 {
        match self {
            FrequencyProfile::Constant { omega } => omega * omega,
            FrequencyProfile::SuddenStep {
                omega_minus,
                omega_plus,
                t_jump,
            } => {
                let before = t < *t_jump || (t == *t_jump && side < *t_jump);
                if before {
                    omega_minus * omega_minus
                } else {
                    omega_plus * omega_plus
                }
            }
            FrequencyProfile::TanhRamp {
                omega2_minus,
                omega2_plus,
                t_scale,
            } => omega2_minus + (omega2_plus - omega2_minus) * 0.5 * (1.0 + (t / t_scale).tanh()),
            FrequencyProfile::Tabulated(s) => s.interpolate(t).powi(2),
        }
    }

    pub fn omega(&self, t: f64, side: f64) -> f64 {
        self.omega2(t, side).sqrt()
    }

    /// Asymptotic frequencies `(omega_-, omega_+)`.
    pub fn asymptotes(&self) -> (f64, f64) {
        match self {
            FrequencyProfile::Constant { omega } => (*omega, *omega),
            FrequencyProfile::SuddenStep {
                omega_minus,
                omega_plus,
                ..
            } => (*omega_minus, *omega_plus),
            FrequencyProfile::TanhRamp {
                omega2_minus,
                omega2_plus,
                ..
            } => (omega2_minus.sqrt(), omega2_plus.sqrt()),
            FrequencyProfile::Tabulated(s) => (s.values[0], s.values[s.values.len() - 1]),
        }
    }

    /// Point where the profile changes, used to start the flatness search.
    pub(crate) fn center(&self) -> f64 {
        match self {
            FrequencyProfile::Constant { .. } | FrequencyProfile::TanhRamp { .. } => 0.0,
            FrequencyProfile::SuddenStep { t_jump, .. } => *t_jump,
            FrequencyProfile::Tabulated(s) => 0.5 * (s.times[0] + s.times[s.times.len() - 1]),
        }
    }

    /// Times where `omega^2` or its low derivatives jump.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        match self {
            FrequencyProfile::SuddenStep { t_jump, .. } => vec![*t_jump],
            FrequencyProfile::Tabulated(s) => s.times.clone(),
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        match self {
            FrequencyProfile::Constant { omega } => {
                if !positive(*omega) {
                    return Err(Error::Profile("constant needs omega > 0".into()));
                }
            }
            FrequencyProfile::SuddenStep {
                omega_minus,
                omega_plus,
                t_jump,
            } => {
                if !positive(*omega_minus) || !positive(*omega_plus) || !t_jump.is_finite() {
                    return Err(Error::Profile(
                        "sudden_step needs positive frequencies".into(),
                    ));
                }
            }
            FrequencyProfile::TanhRamp {
                omega2_minus,
                omega2_plus,
                t_scale,
            } => {
                if !positive(*omega2_minus) || !positive(*omega2_plus) || !positive(*t_scale) {
                    return Err(Error::Profile(
                        "tanh_ramp needs omega2_minus, omega2_plus, T > 0".into(),
                    ));
                }
            }
            FrequencyProfile::Tabulated(s) => {
                s.validate()?;
                if !s.values.iter().all(|&w| positive(w)) {
                    return Err(Error::Profile("tabulated omega must be positive".into()));
                }
                let v = &s.values;
                let n = v.len();
                let flat = |a: f64, b: f64| (a - b).abs() <= 1e-8 * a.abs().max(b.abs());
                if !flat(v[0], v[1]) || !flat(v[n - 1], v[n - 2]) {
                    return Err(Error::Profile(
                        "tabulated omega must be flat to 1e-8 at both ends".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_closed_forms() {
        let p = ForceProfile::from_json(r#"{"kind":"gaussian","f0":1,"tau":2,"t0":0.5}"#, None)
            .unwrap();
        assert_eq!(
            p,
            ForceProfile::Gaussian {
                f0: 1.0,
                tau: 2.0,
                t0: 0.5
            }
        );
        let q = FrequencyProfile::from_json(
            r#"{"kind":"tanh_ramp","omega2_minus":1,"omega2_plus":4,"T":1}"#,
            None,
        )
        .unwrap();
        assert_eq!(q.asymptotes(), (1.0, 2.0));
        assert!(FrequencyProfile::from_json(r#"{"kind":"constant","omega":-1}"#, None).is_err());
        assert!(
            FrequencyProfile::from_json(r#"{"kind":"constant","omega":1,"x":2}"#, None).is_err()
        );
        assert!(ForceProfile::from_json(r#"{"kind":"sawtooth"}"#, None).is_err());
    }

    #[test]
    fn step_side_at_jump() {
        let p = FrequencyProfile::SuddenStep {
            omega_minus: 1.0,
            omega_plus: 2.0,
            t_jump: 0.0,
        };
        assert_eq!(p.omega2(0.0, -1.0), 1.0);
        assert_eq!(p.omega2(0.0, 1.0), 4.0);
    }

    #[test]
    fn cubic_reproduces_quadratics_on_uniform_grid() {
        let times: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let values = times.iter().map(|t| 1.0 + 2.0 * t + 3.0 * t * t).collect();
        let s = Samples::new(times, values);
        for t in [0.15, 0.42, 0.77] {
            assert!((s.interpolate(t) - (1.0 + 2.0 * t + 3.0 * t * t)).abs() < 1e-12);
        }
        assert!(s.is_uniform());
    }

    #[test]
    fn csv_samples_with_comments() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("w.csv");
        let mut f = std::fs::File::create(&csv_path).unwrap();
        writeln!(f, "# time, omega").unwrap();
        for k in 0..6 {
            writeln!(f, "{}, 1.5", k as f64).unwrap();
        }
        let json_path = dir.path().join("p.json");
        std::fs::write(&json_path, r#"{"kind":"tabulated","csv":"w.csv"}"#).unwrap();
        let p = FrequencyProfile::from_file(&json_path).unwrap();
        assert_eq!(p.asymptotes(), (1.5, 1.5));
        std::fs::write(&csv_path, "0, 1\n1\n").unwrap();
        assert!(FrequencyProfile::from_file(&json_path).is_err());
    }

    #[test]
    fn rejects_non_decaying_force() {
        let s = Samples::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 1.0, 0.5]);
        assert!(ForceProfile::Tabulated(s).validate().is_err());
    }
}
