//! Verification suites: every identity the library implements, checked
//! against an independent route and collected in a machine-readable report.
//!
//! Numeric comparisons pass when the residual is at most `tol`; a few checks
//! whose accuracy is limited by construction (small-`rho` extrapolation,
//! asymptotic matching) use a fixed looser threshold when it exceeds `tol`.
//! Exact checks require exact rational equality.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::domain::{ratio, Coeff, Poly};
use crate::error::{Error, Result};
use crate::excitation::{
    bogoliubov_from_frequency, nu_from_force, sudden_rho, tanh_ramp_rho, ForceProfile,
    FrequencyProfile, Samples,
};
use crate::forced::{
    forced_exact_series, forced_gf_value, forced_prob_table, forced_sk, forced_sum_rules, poisson,
    poisson_poly, NuParam, SumRules,
};
use crate::parametric::{
    param_gf_value, param_identity_eq6, param_jnn, param_mean_n, param_prob_table,
    param_row_moments, param_second_integral, param_sk, param_weighted_integrals, RhoParam,
};
use crate::series::{dft_extract_window, DftConfig};
use crate::singular::{
    adiabatic_diag, adiabatic_slope_numeric, ground_row, ground_row_sum, singular_gf_value,
    singular_prob_table, singular_row, singular_series, WeightJ,
};
use crate::table::{max_abs_diff, Mode, ProbTable};
use crate::{Rational, RationalPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Computed and shown, never gating.
    ReportedOnly,
}

/// A computed or expected quantity: a float or an exact rational string.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Exact(String),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Number(x)
    }
}

impl From<&Rational> for Value {
    fn from(r: &Rational) -> Self {
        Value::Exact(r.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    /// Short name of the identity being checked.
    pub identity: String,
    pub computed: Vec<Value>,
    pub expected: Vec<Value>,
    pub residual: f64,
    pub threshold: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn numeric(
        id: impl Into<String>,
        identity: &str,
        computed: Vec<Value>,
        expected: Vec<Value>,
        residual: f64,
        threshold: f64,
    ) -> Self {
        let status = if residual <= threshold {
            Status::Pass
        } else {
            Status::Fail
        };
        Check {
            id: id.into(),
            identity: identity.into(),
            computed,
            expected,
            residual,
            threshold,
            status,
            note: None,
        }
    }

    fn exact(
        id: impl Into<String>,
        identity: &str,
        computed: &[Rational],
        expected: &[Rational],
    ) -> Self {
        let equal = computed == expected;
        let residual = computed
            .iter()
            .zip(expected)
            .map(|(a, b)| (a - b).abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        Check {
            id: id.into(),
            identity: identity.into(),
            computed: computed.iter().map(Value::from).collect(),
            expected: expected.iter().map(Value::from).collect(),
            residual,
            threshold: 0.0,
            status: if equal { Status::Pass } else { Status::Fail },
            note: None,
        }
    }

    fn flag(id: impl Into<String>, identity: &str, ok: bool, note: String) -> Self {
        Check {
            id: id.into(),
            identity: identity.into(),
            computed: Vec::new(),
            expected: Vec::new(),
            residual: if ok { 0.0 } else { 1.0 },
            threshold: 0.0,
            status: if ok { Status::Pass } else { Status::Fail },
            note: Some(note),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn errored(id: String, identity: &str, err: &Error) -> Self {
        Check {
            id,
            identity: identity.into(),
            computed: Vec::new(),
            expected: Vec::new(),
            residual: f64::INFINITY,
            threshold: 0.0,
            status: Status::Fail,
            note: Some(format!("error: {err}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Forced,
    Parametric,
    Singular,
    Excitation,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forced" => Ok(Suite::Forced),
            "parametric" => Ok(Suite::Parametric),
            "singular" => Ok(Suite::Singular),
            "excitation" => Ok(Suite::Excitation),
            "all" => Ok(Suite::All),
            _ => Err(Error::invalid(format!("unknown suite {s:?}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Forced => "forced",
            Suite::Parametric => "parametric",
            Suite::Singular => "singular",
            Suite::Excitation => "excitation",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub reported_only: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub tol: f64,
    pub checks: Vec<Check>,
    pub summary: Summary,
    pub wall_time_s: f64,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn find(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Parameter grids shared by the suites.
pub const NU_GRID: [f64; 3] = [0.3, 1.0, 3.0];
pub const RHO_GRID: [f64; 3] = [0.1, 0.5, 0.9];
pub const RHO_TAIL_GRID: [f64; 3] = [0.1, 0.5, 0.8];
pub const J_GRID: [f64; 4] = [-0.25, -0.75, -0.6, -1.3];
pub const J_ADIABATIC_GRID: [f64; 3] = [-0.25, -0.75, -0.6];
/// Integrator tolerance for the excitation suite.
pub const ODE_TOL: f64 = 1e-10;

pub fn run_suite(suite: Suite, tol: f64) -> Result<VerifyReport> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid(format!("tol must be positive, got {tol}")));
    }
    let start = Instant::now();
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Forced {
        forced_checks(tol, &mut checks);
    }
    if all || suite == Suite::Parametric {
        parametric_checks(tol, &mut checks);
    }
    if all || suite == Suite::Singular {
        singular_checks(tol, &mut checks);
    }
    if all || suite == Suite::Excitation {
        excitation_checks(tol, &mut checks);
    }
    let mut summary = Summary {
        total: checks.len(),
        ..Default::default()
    };
    for c in &checks {
        match c.status {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::ReportedOnly => summary.reported_only += 1,
        }
    }
    Ok(VerifyReport {
        suite,
        tol,
        checks,
        summary,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Runs `f`, turning an error into a failed check.
fn guarded(
    out: &mut Vec<Check>,
    id: impl Into<String>,
    identity: &str,
    f: impl FnOnce(String) -> Result<Check>,
) {
    let id = id.into();
    match f(id.clone()) {
        Ok(c) => out.push(c),
        Err(e) => out.push(Check::errored(id, identity, &e)),
    }
}

fn guarded_many(
    out: &mut Vec<Check>,
    id: &str,
    identity: &str,
    f: impl FnOnce(&mut Vec<Check>) -> Result<()>,
) {
    let mut local = Vec::new();
    match f(&mut local) {
        Ok(()) => out.extend(local),
        Err(e) => {
            out.extend(local);
            out.push(Check::errored(id.into(), identity, &e));
        }
    }
}

fn tag(x: f64) -> String {
    format!("{x}")
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn oracle_diff(
    table: &ProbTable,
    f: impl Fn(num_complex::Complex64, num_complex::Complex64) -> Result<num_complex::Complex64>,
) -> Result<f64> {
    let w = table.rows() - 1;
    let oracle = dft_extract_window(f, w, w, &DftConfig::default())?;
    Ok(max_abs_diff(&table.entries, &oracle))
}

/// Window of the oracle comparisons: `m, n <= 10`.
const ORACLE_SIZE: usize = 11;

fn forced_checks(tol: f64, out: &mut Vec<Check>) {
    let identity = "sum-rules";
    guarded_many(out, "forced.sum_rules", identity, |out| {
        let mut worst_rel: f64 = 0.0;
        let mut failures = Vec::new();
        for m in 0..=8 {
            for n in 0..=8 {
                let r = forced_sum_rules(m, n)?;
                let got = [r.norm.clone(), r.mean.clone(), r.variance.clone()];
                let want = SumRules::predicted(m, n);
                if got != want {
                    failures.push(format!("({m},{n})"));
                }
                for (q, w) in r.numeric.iter().zip(&want) {
                    worst_rel = worst_rel.max(rel(*q, w.to_f64().unwrap_or(f64::NAN)));
                }
                if (m, n) == (1, 2) {
                    out.push(Check::exact("forced.sum_rules.m1n2", identity, &got, &want));
                }
            }
        }
        out.push(Check::flag(
            "forced.sum_rules.exact",
            identity,
            failures.is_empty(),
            if failures.is_empty() {
                "1, m+n+1, 2mn+m+n+1 exactly for all 0 <= m, n <= 8".into()
            } else {
                format!("mismatch at {}", failures.join(" "))
            },
        ));
        out.push(
            Check::numeric(
                "forced.sum_rules.quadrature",
                identity,
                vec![worst_rel.into()],
                vec![0.0.into()],
                worst_rel,
                tol,
            )
            .with_note("largest relative Gauss-Laguerre deviation over 0 <= m, n <= 8"),
        );
        Ok(())
    });

    for &x in &NU_GRID {
        guarded(
            out,
            format!("forced.poisson.nu{}", tag(x)),
            "poisson-row",
            |id| {
                let nu = NuParam::new(x)?;
                let t = forced_prob_table(nu, 13, Mode::Float)?;
                let d = (0..=12)
                    .map(|n| (t.get(0, n) - poisson(n, nu)).abs())
                    .fold(0.0, f64::max);
                Ok(Check::numeric(
                    id,
                    "poisson-row",
                    vec![d.into()],
                    vec![0.0.into()],
                    d,
                    tol,
                ))
            },
        );
    }

    guarded(out, "forced.poisson.exact_moments", "poisson-row", |id| {
        // With p_n the exact vacuum-row polynomials:
        // sum_{n<=N} n p_n = nu sum_{n<N} p_n and
        // sum_{n<=N} n(n-1) p_n = nu^2 sum_{n<N-1} p_n, so mean = variance = nu.
        let big_n = 16;
        let s = forced_exact_series(0, big_n)?;
        let p: Vec<RationalPoly> = (0..=big_n).map(|n| s.at(0, n).clone()).collect();
        let poisson_rows = p.iter().enumerate().all(|(n, q)| *q == poisson_poly(n));
        let nu = Poly::<Rational>::x();
        let sum = |k: usize, f: &dyn Fn(usize) -> i64| {
            (0..=k).fold(Poly::zero(), |acc: RationalPoly, n| {
                acc + p[n].scale_ratio(f(n), 1)
            })
        };
        let first = sum(big_n, &|n| n as i64) == nu.clone() * sum(big_n - 1, &|_| 1);
        let second = sum(big_n, &|n| (n * n.saturating_sub(1)) as i64)
            == nu.clone() * nu * sum(big_n - 2, &|_| 1);
        Ok(Check::flag(
            id,
            "poisson-row",
            poisson_rows && first && second,
            format!("exact rows nu^n/n!: {poisson_rows}; mean identity: {first}; variance identity: {second}"),
        ))
    });

    for &x in &NU_GRID {
        guarded(
            out,
            format!("forced.antidiagonal.nu{}", tag(x)),
            "anti-diagonal-sums",
            |id| {
                let nu = NuParam::new(x)?;
                let t = forced_prob_table(nu, 17, Mode::Float)?;
                let d = (0..=16)
                    .map(|k| (forced_sk(k, nu) - t.anti_diagonal_sum(k).unwrap_or(f64::NAN)).abs())
                    .fold(0.0, f64::max);
                Ok(Check::numeric(
                    id,
                    "anti-diagonal-sums",
                    vec![d.into()],
                    vec![0.0.into()],
                    d,
                    tol,
                ))
            },
        );
    }
    guarded(
        out,
        "forced.antidiagonal.spot",
        "anti-diagonal-sums",
        |id| {
            let one = NuParam::new(1.0)?;
            let got = [forced_sk(0, one), forced_sk(1, one), forced_sk(3, one)];
            let want = [1.0 / E, 2.0 / E, 4.0 / (3.0 * E)];
            let d = got
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(Check::numeric(
                id,
                "anti-diagonal-sums",
                got.iter().map(|&v| v.into()).collect(),
                want.iter().map(|&v| v.into()).collect(),
                d,
                tol,
            ))
        },
    );

    for &x in &NU_GRID {
        guarded(
            out,
            format!("forced.oracle.nu{}", tag(x)),
            "contour-oracle",
            |id| {
                let nu = NuParam::new(x)?;
                let t = forced_prob_table(nu, ORACLE_SIZE, Mode::Float)?;
                let d = oracle_diff(&t, |u, v| forced_gf_value(u, v, nu))?;
                Ok(Check::numeric(
                    id,
                    "contour-oracle",
                    vec![d.into()],
                    vec![0.0.into()],
                    d,
                    tol,
                ))
            },
        );
        guarded(
            out,
            format!("forced.invariants.nu{}", tag(x)),
            "probability-invariants",
            |id| {
                let t = forced_prob_table(NuParam::new(x)?, 25, Mode::Float)?;
                let r = t.check_invariants();
                Ok(Check::flag(
                    id,
                    "probability-invariants",
                    r.is_ok(),
                    format!("{r:?}"),
                ))
            },
        );
    }
}

fn parametric_checks(tol: f64, out: &mut Vec<Check>) {
    guarded(
        out,
        "param.generating_identity.grid",
        "generating-identity",
        |id| {
            let pts = [-0.6, -0.3, 0.0, 0.3, 0.6];
            let mut worst: f64 = 0.0;
            for &u in &pts {
                for &v in &pts {
                    worst = worst.max(param_identity_eq6(u, v)?.residual);
                }
            }
            Ok(Check::numeric(
                id,
                "generating-identity",
                vec![worst.into()],
                vec![0.0.into()],
                worst,
                tol,
            )
            .with_note("5x5 grid of (u, v) in (-0.7, 0.7)"))
        },
    );

    let identity = "first-weighted-integral";
    guarded_many(out, "param.first_integral", identity, |out| {
        let mut failures = Vec::new();
        let mut worst_q: f64 = 0.0;
        for m in 0..=10 {
            for n in 0..=10 {
                let w = param_weighted_integrals(m, n)?;
                if !w.first_residual().is_zero() {
                    failures.push(format!("({m},{n})"));
                }
                worst_q = worst_q.max(
                    (w.first_quadrature - w.first_predicted.to_f64().unwrap_or(f64::NAN)).abs(),
                );
                if (m, n) == (0, 0) || (m, n) == (1, 3) {
                    out.push(Check::exact(
                        format!("param.first_integral.m{m}n{n}"),
                        identity,
                        std::slice::from_ref(&w.first),
                        std::slice::from_ref(&w.first_predicted),
                    ));
                }
            }
        }
        out.push(Check::flag(
            "param.first_integral.exact",
            identity,
            failures.is_empty(),
            if failures.is_empty() {
                "(1 + (-1)^(m+n)) / (m + n + 1) exactly for all 0 <= m, n <= 10".into()
            } else {
                format!("mismatch at {}", failures.join(" "))
            },
        ));
        out.push(Check::numeric(
            "param.first_integral.quadrature",
            identity,
            vec![worst_q.into()],
            vec![0.0.into()],
            worst_q,
            tol,
        ));
        Ok(())
    });

    for (m, n) in [(0usize, 2usize), (1, 3)] {
        guarded(
            out,
            format!("param.second_integral.m{m}n{n}"),
            "second-weighted-integral",
            |id| {
                let s = param_second_integral(m, n)?;
                let residual = (&s.value - &s.printed)
                    .abs()
                    .to_f64()
                    .unwrap_or(f64::INFINITY);
                Ok(Check {
                id,
                identity: "second-weighted-integral".into(),
                computed: vec![(&s.value).into(), s.quadrature.into()],
                expected: vec![(&s.printed).into()],
                residual,
                threshold: 0.0,
                status: Status::ReportedOnly,
                note: Some(format!(
                    "int w/(rho sqrt(1-rho)) = {} differs from the printed (1+(-1)^(m+n))/|m-n| = {}; \
                     the printed value equals int w/(rho(1-rho)) = {}",
                    s.value, s.printed, s.over_rho_one_minus_rho
                )),
            })
            },
        );
    }

    for n in 0..=6 {
        guarded(
            out,
            format!("param.diagonal_integral.n{n}"),
            "diagonal-integral",
            |id| {
                let j = param_jnn(n)?;
                let want = j.closed_form.to_f64().unwrap_or(f64::NAN);
                let residual = (j.quadrature - want).abs();
                let exact_ok = j.exact == j.closed_form;
                let mut c = Check::numeric(
                    id,
                    "diagonal-integral",
                    vec![(&j.exact).into(), j.quadrature.into()],
                    vec![(&j.closed_form).into()],
                    residual,
                    tol,
                );
                if !exact_ok {
                    c.status = Status::Fail;
                    c.note = Some("exact integral differs from the closed form".into());
                }
                Ok(c)
            },
        );
    }

    for &r in &RHO_TAIL_GRID {
        guarded(
            out,
            format!("param.antidiagonal.rho{}", tag(r)),
            "anti-diagonal-sums",
            |id| {
                let rho = RhoParam::new(r)?;
                let t = param_prob_table(rho, 17, Mode::Float)?;
                let d = (0..=16)
                    .map(|k| (param_sk(k, rho) - t.anti_diagonal_sum(k).unwrap_or(f64::NAN)).abs())
                    .fold(0.0, f64::max);
                Ok(Check::numeric(
                    id,
                    "anti-diagonal-sums",
                    vec![d.into()],
                    vec![0.0.into()],
                    d,
                    tol,
                ))
            },
        );
        for m in 0..=4 {
            guarded(
                out,
                format!("param.mean.m{m}.rho{}", tag(r)),
                "mean-quantum-number",
                |id| {
                    let rho = RhoParam::new(r)?;
                    let mom = param_row_moments(m, rho, 1e-10)?;
                    let want = param_mean_n(m, rho)?;
                    let d = (mom.mean - want).abs().max((mom.norm - 1.0).abs());
                    let bound = tol + mom.tail[1].max(mom.tail[0]);
                    Ok(Check::numeric(
                        id,
                        "mean-quantum-number",
                        vec![mom.mean.into(), mom.norm.into()],
                        vec![want.into(), 1.0.into()],
                        d,
                        bound,
                    )
                    .with_note(format!("row summed to n = {}", mom.n_max)))
                },
            );
        }
        guarded(
            out,
            format!("param.dispersion.m0.rho{}", tag(r)),
            "dispersion",
            |id| {
                let rho = RhoParam::new(r)?;
                let mom = param_row_moments(0, rho, 1e-10)?;
                let want = 2.0 * r / (1.0 - r).powi(2);
                let d = (mom.dispersion() - want).abs();
                Ok(Check::numeric(
                    id,
                    "dispersion",
                    vec![mom.dispersion().into()],
                    vec![want.into()],
                    d,
                    tol + mom.dispersion_error(),
                )
                .with_note("vacuum row: 2 rho / (1 - rho)^2"))
            },
        );
    }

    for &r in &RHO_GRID {
        guarded(
            out,
            format!("param.oracle.rho{}", tag(r)),
            "contour-oracle",
            |id| {
                let rho = RhoParam::new(r)?;
                let t = param_prob_table(rho, ORACLE_SIZE, Mode::Float)?;
                let d = oracle_diff(&t, |u, v| param_gf_value(u, v, rho))?;
                Ok(Check::numeric(
                    id,
                    "contour-oracle",
                    vec![d.into()],
                    vec![0.0.into()],
                    d,
                    tol,
                ))
            },
        );
        guarded(
            out,
            format!("param.invariants.rho{}", tag(r)),
            "probability-invariants",
            |id| {
                let t = param_prob_table(RhoParam::new(r)?, 25, Mode::Float)?;
                let res = t.check_invariants();
                Ok(Check::flag(
                    id,
                    "probability-invariants",
                    res.is_ok(),
                    format!("{res:?}"),
                ))
            },
        );
    }
}

fn singular_checks(tol: f64, out: &mut Vec<Check>) {
    for &r in &RHO_GRID {
        guarded(
            out,
            format!("singular.reduction.rho{}", tag(r)),
            "sector-reduction",
            |id| {
                let rho = RhoParam::new(r)?;
                let p = param_prob_table(rho, 14, Mode::Float)?;
                let even = singular_prob_table(rho, WeightJ::even(), 7)?;
                let odd = singular_prob_table(rho, WeightJ::odd(), 7)?;
                let de = max_abs_diff(&even.entries, &p.reindexed(7, |k| 2 * k));
                let d_o = max_abs_diff(&odd.entries, &p.reindexed(7, |k| 2 * k + 1));
                Ok(Check::numeric(
                    id,
                    "sector-reduction",
                    vec![de.into(), d_o.into()],
                    vec![0.0.into(), 0.0.into()],
                    de.max(d_o),
                    tol,
                )
                .with_note("j = -1/4 vs even-even and j = -3/4 vs odd-odd, m, n <= 6"))
            },
        );
    }
    guarded(out, "singular.reduction.exact", "sector-reduction", |id| {
        let w = 6;
        let x = Poly::<Rational>::x();
        let par = crate::parametric::param_exact_series(2 * w + 1, 2 * w + 1)?;
        let even = singular_series(&x, &Poly::constant(ratio(1, 2)), w, w)?;
        let odd = singular_series(&x, &Poly::constant(ratio(3, 2)), w, w)?;
        let one_minus: RationalPoly = Poly::new(vec![ratio(1, 1), ratio(-1, 1)]);
        let mut ok = true;
        for m in 0..=w {
            for n in 0..=w {
                ok &= even.at(m, n) == par.at(2 * m, 2 * n);
                ok &= &(odd.at(m, n).clone() * one_minus.clone()) == par.at(2 * m + 1, 2 * n + 1);
            }
        }
        Ok(Check::flag(
            id,
            "sector-reduction",
            ok,
            "rational-polynomial identity in rho, m, n <= 6".into(),
        ))
    });

    for &jv in &J_GRID {
        guarded(
            out,
            format!("singular.ground_row.j{}", tag(jv)),
            "ground-row",
            |id| {
                let j = WeightJ::new(jv)?;
                let mut worst: f64 = 0.0;
                for &r in &RHO_GRID {
                    let rho = RhoParam::new(r)?;
                    let row = singular_row(0, rho, j, 12)?;
                    for (n, &w) in row.iter().enumerate() {
                        worst = worst.max((w - ground_row(n, rho, j)?).abs());
                    }
                }
                Ok(Check::numeric(
                    id,
                    "ground-row",
                    vec![worst.into()],
                    vec![0.0.into()],
                    worst,
                    tol,
                ))
            },
        );
        guarded(
            out,
            format!("singular.ground_norm.j{}", tag(jv)),
            "ground-row",
            |id| {
                let j = WeightJ::new(jv)?;
                let mut worst: f64 = 0.0;
                for &r in &RHO_TAIL_GRID {
                    let s = ground_row_sum(RhoParam::new(r)?, j, 1e-14)?;
                    worst = worst.max((s.sum - 1.0).abs() + s.tail);
                }
                Ok(Check::numeric(
                    id,
                    "ground-row",
                    vec![worst.into()],
                    vec![0.0.into()],
                    worst,
                    tol,
                )
                .with_note("normalization deficit plus tail bound, rho <= 0.8"))
            },
        );
    }

    for &jv in &J_ADIABATIC_GRID {
        guarded(
            out,
            format!("singular.adiabatic.j{}", tag(jv)),
            "adiabatic-slope",
            |id| {
                let j = WeightJ::new(jv)?;
                let mut worst_rel: f64 = 0.0;
                let mut worst_forms: f64 = 0.0;
                for n in 0..=4 {
                    let a = adiabatic_diag(n, j)?;
                    worst_forms = worst_forms.max((a.slope - a.slope_from_n).abs());
                    worst_rel = worst_rel.max(rel(adiabatic_slope_numeric(n, j, 1e-4)?, a.slope));
                }
                let mut c = Check::numeric(
                id,
                "adiabatic-slope",
                vec![worst_rel.into(), worst_forms.into()],
                vec![0.0.into(), 0.0.into()],
                worst_rel,
                tol.max(1e-4),
            )
            .with_note("relative Richardson slope error at rho = 1e-4, n <= 4; second value: slope-form disagreement");
                if worst_forms > tol.max(1e-12) {
                    c.status = Status::Fail;
                }
                Ok(c)
            },
        );
    }

    for &jv in &J_GRID {
        for &r in &RHO_GRID {
            guarded(
                out,
                format!("singular.oracle.j{}.rho{}", tag(jv), tag(r)),
                "contour-oracle",
                |id| {
                    let (j, rho) = (WeightJ::new(jv)?, RhoParam::new(r)?);
                    let t = singular_prob_table(rho, j, ORACLE_SIZE)?;
                    let d = oracle_diff(&t, |u, v| singular_gf_value(u, v, rho, j))?;
                    Ok(Check::numeric(
                        id,
                        "contour-oracle",
                        vec![d.into()],
                        vec![0.0.into()],
                        d,
                        tol,
                    ))
                },
            );
        }
        guarded(
            out,
            format!("singular.invariants.j{}", tag(jv)),
            "probability-invariants",
            |id| {
                let t = singular_prob_table(RhoParam::new(0.5)?, WeightJ::new(jv)?, 25)?;
                let res = t.check_invariants();
                Ok(Check::flag(
                    id,
                    "probability-invariants",
                    res.is_ok(),
                    format!("{res:?}"),
                ))
            },
        );
    }
}

fn excitation_checks(tol: f64, out: &mut Vec<Check>) {
    guarded(out, "excitation.gaussian_nu", "force-excitation", |id| {
        let p = ForceProfile::Gaussian {
            f0: 1.0,
            tau: 1.0,
            t0: 0.0,
        };
        let nu = nu_from_force(&p, 1.0)?.value();
        let want = PI * (-0.5f64).exp() / 2.0;
        Ok(Check::numeric(
            id,
            "force-excitation",
            vec![nu.into()],
            vec![want.into()],
            (nu - want).abs(),
            tol,
        ))
    });
    guarded(
        out,
        "excitation.rectangular_full_period",
        "force-excitation",
        |id| {
            let p = ForceProfile::Rectangular {
                f0: 1.0,
                t_on: 0.0,
                t_off: 2.0 * PI,
            };
            let nu = nu_from_force(&p, 1.0)?.value();
            Ok(Check::numeric(
                id,
                "force-excitation",
                vec![nu.into()],
                vec![0.0.into()],
                nu,
                tol,
            ))
        },
    );
    guarded(
        out,
        "excitation.tabulated_gaussian",
        "force-excitation",
        |id| {
            let g = ForceProfile::Gaussian {
                f0: 1.0,
                tau: 1.0,
                t0: 0.0,
            };
            let h = 2.0 * PI / 64.0;
            let times: Vec<f64> = (-100..=100).map(|k| k as f64 * h).collect();
            let values = times.iter().map(|&t| g.eval(t)).collect();
            let nu =
                nu_from_force(&ForceProfile::Tabulated(Samples::new(times, values)), 1.0)?.value();
            let want = nu_from_force(&g, 1.0)?.value();
            Ok(Check::numeric(
                id,
                "force-excitation",
                vec![nu.into()],
                vec![want.into()],
                rel(nu, want),
                tol.max(1e-6),
            )
            .with_note("relative error, 64 samples per period"))
        },
    );

    let mut wronskian: Vec<(String, f64)> = Vec::new();
    let mut run = |out: &mut Vec<Check>,
                   id: &str,
                   profile: FrequencyProfile,
                   want: f64,
                   threshold: f64,
                   relative: bool| {
        guarded(out, id, "frequency-excitation", |id| {
            let r = bogoliubov_from_frequency(&profile, ODE_TOL)?;
            wronskian.push((id.clone(), r.wronskian_residual));
            let residual = if relative {
                rel(r.rho, want)
            } else {
                (r.rho - want).abs()
            };
            Ok(Check::numeric(
                id,
                "frequency-excitation",
                vec![r.rho.into()],
                vec![want.into()],
                residual,
                threshold,
            ))
        });
    };
    let ramp = |t: f64| FrequencyProfile::TanhRamp {
        omega2_minus: 1.0,
        omega2_plus: 4.0,
        t_scale: t,
    };
    run(
        out,
        "excitation.constant",
        FrequencyProfile::Constant { omega: 1.0 },
        0.0,
        tol,
        false,
    );
    run(
        out,
        "excitation.sudden_step",
        FrequencyProfile::SuddenStep {
            omega_minus: 1.0,
            omega_plus: 2.0,
            t_jump: 0.0,
        },
        1.0 / 9.0,
        tol.max(1e-6),
        false,
    );
    run(
        out,
        "excitation.tanh_ramp",
        ramp(1.0),
        tanh_ramp_rho(1.0, 2.0, 1.0),
        tol.max(1e-6),
        true,
    );
    run(
        out,
        "excitation.sudden_limit",
        ramp(1e-3 / 2.0),
        sudden_rho(1.0, 2.0),
        1e-2,
        true,
    );
    // Adiabatic ramp, T (omega_+ + omega_-) = 20: only rho < 1e-3 is asserted.
    run(
        out,
        "excitation.adiabatic",
        ramp(20.0 / 3.0),
        0.0,
        1e-3,
        false,
    );

    let worst = wronskian.iter().map(|(_, w)| *w).fold(0.0, f64::max);
    out.push(
        Check::numeric(
            "excitation.wronskian",
            "wronskian",
            vec![worst.into()],
            vec![0.0.into()],
            worst,
            tol.max(1e-9),
        )
        .with_note(format!(
            "largest | |alpha|^2 - |beta|^2 - 1 | over {} integrations",
            wronskian.len()
        )),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_default_tolerance() {
        let r = run_suite(Suite::All, 1e-9).unwrap();
        for c in &r.checks {
            assert_ne!(c.status, Status::Fail, "{c:?}");
        }
        assert!(r.all_passed());
        assert_eq!(r.summary.reported_only, 2);
        let triple = r.find("forced.sum_rules.m1n2").unwrap();
        assert_eq!(
            triple.computed,
            vec![
                Value::Exact("1".into()),
                Value::Exact("4".into()),
                Value::Exact("8".into())
            ]
        );
        let j00 = r.find("param.diagonal_integral.n0").unwrap();
        assert_eq!(j00.computed[0], Value::Exact("2/3".into()));
        let second = r.find("param.second_integral.m0n2").unwrap();
        assert_eq!(second.computed[0], Value::Exact("1/2".into()));
        assert_eq!(second.status, Status::ReportedOnly);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [
            Suite::Forced,
            Suite::Parametric,
            Suite::Singular,
            Suite::Excitation,
            Suite::All,
        ] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn impossible_tolerance_fails_numeric_checks() {
        let r = run_suite(Suite::Forced, 1e-30).unwrap();
        assert!(!r.all_passed());
        assert_eq!(
            r.find("forced.sum_rules.exact").unwrap().status,
            Status::Pass
        );
    }
}
