//! `oscigen`: transition-probability tables, identity verification and
//! excitation-parameter extraction from the command line.
//!
//! Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 verification failure, 2 invalid input, 3 integration failure.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use oscigen::excitation::{excitation_report, ForceProfile, FrequencyProfile, Profile};
use oscigen::forced::{forced_prob_table, NuParam};
use oscigen::parametric::{param_prob_table, RhoParam};
use oscigen::singular::{singular_prob_table, WeightJ};
use oscigen::verify::{run_suite, Suite};
use oscigen::{Error, Mode, ProbTable};

#[derive(Parser)]
#[command(
    name = "oscigen",
    version,
    about = "Quantum oscillator transition probabilities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the M x M table of transition probabilities w_mn.
    Table {
        #[arg(value_enum)]
        family: FamilyArg,
        /// Force excitation parameter (forced family).
        #[arg(long)]
        nu: Option<f64>,
        /// Parametric excitation parameter in [0, 1].
        #[arg(long)]
        rho: Option<f64>,
        /// Representation weight j < 0 (singular family).
        #[arg(long, allow_hyphen_values = true)]
        j: Option<f64>,
        /// Table size: quantum numbers 0..M-1.
        #[arg(long = "max", default_value_t = 8)]
        size: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Float)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Write to a file instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the identity checks and print a JSON report.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Extract nu or rho from a profile file and print a JSON record.
    Excite {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_enum)]
        what: WhatArg,
        /// Oscillator frequency (required for nu).
        #[arg(long)]
        omega: Option<f64>,
        /// Integrator tolerance for rho, in [1e-12, 1e-4].
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Forced,
    Parametric,
    Singular,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Forced,
    Parametric,
    Singular,
    Excitation,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhatArg {
    Nu,
    Rho,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Integration { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Table {
            family,
            nu,
            rho,
            j,
            size,
            mode,
            format,
            output,
        } => cmd_table(family, nu, rho, j, size, mode, format, output),
        Command::Verify { suite, tol } => cmd_verify(suite, tol),
        Command::Excite {
            profile,
            what,
            omega,
            tol,
        } => cmd_excite(profile, what, omega, tol),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("oscigen: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn require(value: Option<f64>, flag: &str, family: &str) -> Result<f64, Failure> {
    value.ok_or_else(|| Failure::input(format!("{family} tables need {flag}")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_table(
    family: FamilyArg,
    nu: Option<f64>,
    rho: Option<f64>,
    j: Option<f64>,
    size: usize,
    mode: ModeArg,
    format: FormatArg,
    output: Option<PathBuf>,
) -> Result<u8, Failure> {
    let mode = match mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    };
    let unused = |flag: &str, v: Option<f64>| match v {
        Some(_) => Err(Failure::input(format!(
            "{flag} does not apply to this family"
        ))),
        None => Ok(()),
    };
    let table: ProbTable = match family {
        FamilyArg::Forced => {
            unused("--rho", rho)?;
            unused("--j", j)?;
            forced_prob_table(NuParam::new(require(nu, "--nu", "forced")?)?, size, mode)?
        }
        FamilyArg::Parametric => {
            unused("--nu", nu)?;
            unused("--j", j)?;
            param_prob_table(
                RhoParam::new(require(rho, "--rho", "parametric")?)?,
                size,
                mode,
            )?
        }
        FamilyArg::Singular => {
            unused("--nu", nu)?;
            if mode == Mode::Exact {
                return Err(Failure::input(
                    "singular tables are available in float mode only",
                ));
            }
            let rho = RhoParam::new(require(rho, "--rho", "singular")?)?;
            let j = WeightJ::new(require(j, "--j", "singular")?)?;
            singular_prob_table(rho, j, size)?
        }
    };
    let text = match format {
        FormatArg::Csv => table.to_csv()?,
        FormatArg::Json => table.to_json()? + "\n",
    };
    match output {
        Some(path) => fs::write(&path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?,
        None => emit(&text)?,
    }
    Ok(0)
}

fn cmd_verify(suite: SuiteArg, tol: f64) -> Result<u8, Failure> {
    let suite = match suite {
        SuiteArg::Forced => Suite::Forced,
        SuiteArg::Parametric => Suite::Parametric,
        SuiteArg::Singular => Suite::Singular,
        SuiteArg::Excitation => Suite::Excitation,
        SuiteArg::All => Suite::All,
    };
    let report = run_suite(suite, tol)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::input(e.to_string()))?;
    emit(&(json + "\n"))?;
    for c in report
        .checks
        .iter()
        .filter(|c| c.status != oscigen::verify::Status::Pass)
    {
        eprintln!(
            "{:?}: {} {}",
            c.status,
            c.id,
            c.note.as_deref().unwrap_or("")
        );
    }
    let s = report.summary;
    eprintln!(
        "{} checks: {} pass, {} fail, {} reported-only ({:.2} s)",
        s.total, s.pass, s.fail, s.reported_only, report.wall_time_s
    );
    Ok(if report.all_passed() { 0 } else { 1 })
}

fn cmd_excite(path: PathBuf, what: WhatArg, omega: Option<f64>, tol: f64) -> Result<u8, Failure> {
    let profile = match what {
        WhatArg::Nu => {
            let omega = omega.ok_or_else(|| Failure::input("--what nu needs --omega"))?;
            let profile = ForceProfile::from_file(&path).map_err(|e| parse_failure(&path, e))?;
            Profile::Force { profile, omega }
        }
        WhatArg::Rho => {
            let profile =
                FrequencyProfile::from_file(&path).map_err(|e| parse_failure(&path, e))?;
            Profile::Frequency { profile, tol }
        }
    };
    let report = excitation_report(&profile)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::input(e.to_string()))?;
    emit(&(json + "\n"))?;
    Ok(0)
}

/// Writes data to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            Err(Failure::input(format!("cannot write output: {e}")))
        }
        _ => Ok(()),
    }
}

fn parse_failure(path: &std::path::Path, e: Error) -> Failure {
    Failure::input(format!("{}: {e}", path.display()))
}
