//! Transition-probability tables.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::domain::{rational_parts, Poly};
use crate::error::{Error, Result};
use crate::{Rational, RationalPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Forced,
    Parametric,
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Excitation parameters a table was built for.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j: Option<f64>,
}

/// Scalar factor multiplying the polynomial part of every exact entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prefactor {
    /// `exp(-nu)`, polynomial in `nu`.
    #[serde(rename = "exp(-nu)")]
    ExpNegNu,
    /// `sqrt(1 - rho)`, polynomial in `rho`.
    #[serde(rename = "sqrt(1-rho)")]
    SqrtOneMinusRho,
}

impl Prefactor {
    pub fn parameter(self) -> &'static str {
        match self {
            Prefactor::ExpNegNu => "nu",
            Prefactor::SqrtOneMinusRho => "rho",
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Prefactor::ExpNegNu => (-x).exp(),
            Prefactor::SqrtOneMinusRho => (1.0 - x).sqrt(),
        }
    }
}

/// Exact form `w_mn = prefactor(x) * poly_mn(x)` of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbolic {
    pub prefactor: Prefactor,
    pub polys: Vec<Vec<RationalPoly>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable {
    pub family: Family,
    pub params: Params,
    pub mode: Mode,
    /// `entries[m][n] = w_mn`.
    pub entries: Vec<Vec<f64>>,
    /// Per-row bound on the probability mass beyond the last column.
    pub tail: Vec<f64>,
    pub symbolic: Option<Symbolic>,
}

impl ProbTable {
    /// Assembles a table and derives the row tail bounds `1 - row sum`.
    pub fn new(
        family: Family,
        params: Params,
        mode: Mode,
        entries: Vec<Vec<f64>>,
        symbolic: Option<Symbolic>,
    ) -> Self {
        let tail = entries
            .iter()
            .map(|row| (1.0 - row.iter().sum::<f64>()).max(0.0))
            .collect();
        ProbTable {
            family,
            params,
            mode,
            entries,
            tail,
            symbolic,
        }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.entries[m][n]
    }

    pub fn row_sum(&self, m: usize) -> f64 {
        self.entries[m].iter().sum()
    }

    /// `sum_{m+n=k} w_mn`, if every term of the anti-diagonal is present.
    pub fn anti_diagonal_sum(&self, k: usize) -> Option<f64> {
        if k >= self.rows() || k >= self.cols() {
            return None;
        }
        Some((0..=k).map(|m| self.entries[m][k - m]).sum())
    }

    /// Exact polynomial part of entry `(m, n)`.
    pub fn poly(&self, m: usize, n: usize) -> Option<&RationalPoly> {
        self.symbolic.as_ref().map(|s| &s.polys[m][n])
    }

    /// Square sub-table `w[f(m)][f(n)]` for `m, n < size`.
    pub fn reindexed(&self, size: usize, f: impl Fn(usize) -> usize) -> Vec<Vec<f64>> {
        (0..size)
            .map(|m| (0..size).map(|n| self.entries[f(m)][f(n)]).collect())
            .collect()
    }

    /// Checks bounds, symmetry and row-sum invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let square = self.rows().min(self.cols());
        for (m, row) in self.entries.iter().enumerate() {
            for (n, &w) in row.iter().enumerate() {
                if !(-1e-15..=1.0 + 1e-12).contains(&w) {
                    return Err(Error::invalid(format!("w[{m}][{n}] = {w} outside [0, 1]")));
                }
                if m < square && n < square {
                    let d = (w - self.entries[n][m]).abs();
                    let exact_mismatch = self.mode == Mode::Exact
                        && self
                            .symbolic
                            .as_ref()
                            .is_some_and(|s| s.polys[m][n] != s.polys[n][m]);
                    if d > 1e-12 || exact_mismatch {
                        return Err(Error::invalid(format!("asymmetric at ({m}, {n}): {d:e}")));
                    }
                }
            }
            let s: f64 = row.iter().sum();
            if s > 1.0 + 1e-12 {
                return Err(Error::invalid(format!("row {m} sums to {s}")));
            }
            if 1.0 - s > self.tail[m] + 1e-15 {
                return Err(Error::invalid(format!(
                    "row {m} deficit exceeds tail bound"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TableJson::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: TableJson = serde_json::from_str(text)?;
        raw.try_into()
    }

    /// CSV with a header row and column of quantum numbers; cells carry 17
    /// significant digits so every `f64` round-trips.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["m\\n".to_string()];
        header.extend((0..self.cols()).map(|n| n.to_string()));
        w.write_record(&header)?;
        for (m, row) in self.entries.iter().enumerate() {
            let mut rec = vec![m.to_string()];
            rec.extend(row.iter().map(|v| format_17(*v)));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
    }
}

/// Decimal scientific notation with 17 significant digits.
pub fn format_17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Entries of a table written by [`ProbTable::to_csv`].
pub fn entries_from_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .skip(1)
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|e| Error::invalid(format!("cell {c:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(row);
    }
    Ok(out)
}

/// Max |a - b| over two equally sized matrices.
pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

#[derive(Serialize, Deserialize)]
struct RatJson {
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct SymbolicJson {
    prefactor: Prefactor,
    parameter: String,
    /// `coeffs[m][n][k]` is the coefficient of `parameter^k` in entry `(m, n)`.
    coeffs: Vec<Vec<Vec<RatJson>>>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    family: Family,
    params: Params,
    mode: Mode,
    size: [usize; 2],
    entries: Vec<Vec<f64>>,
    tail: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    symbolic: Option<SymbolicJson>,
}

impl From<&ProbTable> for TableJson {
    fn from(t: &ProbTable) -> Self {
        let symbolic = t.symbolic.as_ref().map(|s| SymbolicJson {
            prefactor: s.prefactor,
            parameter: s.prefactor.parameter().to_string(),
            coeffs: s
                .polys
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|p| {
                            p.coeffs()
                                .iter()
                                .map(|c| {
                                    let (num, den) = rational_parts(c);
                                    RatJson { num, den }
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        });
        TableJson {
            family: t.family,
            params: t.params,
            mode: t.mode,
            size: [t.rows(), t.cols()],
            entries: t.entries.clone(),
            tail: t.tail.clone(),
            symbolic,
        }
    }
}

impl TryFrom<TableJson> for ProbTable {
    type Error = Error;

    fn try_from(raw: TableJson) -> Result<Self> {
        let parse = |s: &str| -> Result<BigInt> {
            s.parse()
                .map_err(|_| Error::invalid(format!("bad integer string {s:?}")))
        };
        let symbolic = match raw.symbolic {
            None => None,
            Some(s) => {
                let mut polys = Vec::with_capacity(s.coeffs.len());
                for row in s.coeffs {
                    let mut prow = Vec::with_capacity(row.len());
                    for entry in row {
                        let cs = entry
                            .iter()
                            .map(|r| Ok(Rational::new(parse(&r.num)?, parse(&r.den)?)))
                            .collect::<Result<Vec<_>>>()?;
                        prow.push(Poly::new(cs));
                    }
                    polys.push(prow);
                }
                Some(Symbolic {
                    prefactor: s.prefactor,
                    polys,
                })
            }
        };
        if raw.entries.len() != raw.size[0] || raw.entries.iter().any(|r| r.len() != raw.size[1]) {
            return Err(Error::invalid("table size does not match entries"));
        }
        Ok(ProbTable {
            family: raw.family,
            params: raw.params,
            mode: raw.mode,
            entries: raw.entries,
            tail: raw.tail,
            symbolic,
        })
    }
}
