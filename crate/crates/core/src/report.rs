//! Tabular output shared by the command-line front end.
//!
//! Every table is written with a header row. Floating-point values use 12
//! significant digits in scientific notation, so identical inputs give
//! byte-identical files.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::asymptotics::{ShiftComparison, TwoTermModel};
use crate::eigensolver::LabeledSpectrum;
use crate::quasiparticle::{QpTable, TableRow};
use crate::toeplitz::ToeplitzMatrix;
use crate::wienerhopf::ComparisonReport;
use crate::{Error, Result};

/// A single table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

/// `x` with 12 significant digits; `NaN` and infinities spelled out.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        x.to_string()
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_number(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            // round-trip through the printed form so CSV and JSON agree
            Cell::Num(x) if x.is_finite() => Value::from(format_number(*x).parse::<f64>().unwrap_or(*x)),
            Cell::Num(_) => Value::Null,
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Length(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, e)))
    }

    /// Array of row objects keyed by column name.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::to_json))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn save(&self, path: &Path, format: Format) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        match format {
            Format::Csv => self.write_csv(file),
            Format::Json => {
                serde_json::to_writer_pretty(file, &self.to_json()).map_err(|e| Error::Io(e.into()))
            }
        }
    }
}

/// Output file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Run metadata written next to every output table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub command: String,
    pub version: String,
    pub config: Value,
    pub outputs: Vec<String>,
    /// Scalar results worth reading without parsing the tables.
    pub summary: Value,
}

impl Sidecar {
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer_pretty(file, self).map_err(|e| Error::Io(e.into()))
    }
}

/// Compact matrix record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "N")]
    pub n: usize,
    /// `T(n)` for `n = -(N-1) ..= N-1`.
    pub diagonals: Vec<f64>,
}

impl From<&ToeplitzMatrix> for MatrixRecord {
    fn from(m: &ToeplitzMatrix) -> Self {
        let n = m.order as i64;
        Self {
            alpha: m.params.alpha,
            beta: m.params.beta,
            n: m.order,
            diagonals: (1 - n..n).map(|k| m.diag(k)).collect(),
        }
    }
}

/// Dense matrix, one CSV row per matrix row.
pub fn matrix_table(m: &ToeplitzMatrix) -> Table {
    let columns: Vec<String> = (0..m.order).map(|k| format!("c{k}")).collect();
    let mut t = Table::new(&columns);
    t.rows = (0..m.order)
        .map(|j| (0..m.order).map(|k| Cell::Num(m.get(j, k))).collect())
        .collect();
    t
}

/// Labeled eigenvalues with their grid matching distances.
pub fn spectrum_table(s: &LabeledSpectrum) -> Table {
    let mut t = Table::new(&["l", "re_eps", "im_eps", "grid_distance"]);
    t.rows = s
        .eigenvalues
        .iter()
        .zip(&s.distances)
        .enumerate()
        .map(|(l, (e, d))| vec![l.into(), e.re.into(), e.im.into(), (*d).into()])
        .collect();
    t
}

/// Points on the symbol curve.
pub fn curve_table(points: &[Complex64]) -> Table {
    let mut t = Table::new(&["k", "re_a", "im_a"]);
    t.rows = points
        .iter()
        .enumerate()
        .map(|(k, z)| vec![k.into(), z.re.into(), z.im.into()])
        .collect();
    t
}

/// Phase of each entry, continued so consecutive values differ by less than pi.
pub fn unwrapped_phase(v: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len());
    let mut prev: Option<f64> = None;
    for z in v {
        let a = z.arg();
        let next = match prev {
            None => a,
            Some(p) => a + std::f64::consts::TAU * ((p - a) / std::f64::consts::TAU).round(),
        };
        out.push(next);
        prev = Some(next);
    }
    out
}

/// Eigenvector components with branch ids `j mod branches` and
/// `ln|psi_j / psi_{j+1}|` (`NaN` in the last row).
pub fn eigenvector_table(psi: &[Complex64], branches: usize) -> Table {
    let branches = branches.max(1);
    let phase = unwrapped_phase(psi);
    let mut t = Table::new(&["j", "re_psi", "im_psi", "abs_psi", "phase", "branch", "log_ratio"]);
    t.rows = psi
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let ratio = psi
                .get(j + 1)
                .map_or(f64::NAN, |next| (z.norm() / next.norm()).ln());
            vec![
                j.into(),
                z.re.into(),
                z.im.into(),
                z.norm().into(),
                phase[j].into(),
                (j % branches).into(),
                ratio.into(),
            ]
        })
        .collect();
    t
}

fn table_row(r: &TableRow) -> Vec<Cell> {
    vec![
        r.n.into(),
        r.l.into(),
        r.value_psi.into(),
        r.value_eps.into(),
        r.diff_e6.into(),
        r.diff_nk.into(),
        r.value_psi_n.into(),
        r.residual.into(),
    ]
}

/// Momentum table followed by a `fit` row carrying the anchored constant in
/// the `value_psi_N` column.
pub fn qp_table_table(q: &QpTable) -> Table {
    let mut t = Table::new(&[
        "N",
        "l",
        "value_psi",
        "value_eps",
        "diff_e6",
        "diff_Nk",
        "value_psi_N",
        "residual",
    ]);
    t.rows = q.rows.iter().map(table_row).collect();
    let mut fit = vec![Cell::Text("fit".into())];
    fit.extend(std::iter::repeat(Cell::Num(f64::NAN)).take(5));
    fit.push(q.fit.constant.into());
    fit.push(Cell::Num(f64::NAN));
    t.rows.push(fit);
    t
}

pub fn comparison_table(r: &ComparisonReport) -> Table {
    let mut t = Table::new(&["j", "j_frac", "abs_err", "rel_err", "abs_psi_exact", "abs_psi_wh"]);
    t.rows = r
        .rows
        .iter()
        .map(|x| {
            vec![
                x.j.into(),
                x.j_frac.into(),
                x.abs_err.into(),
                x.rel_err.into(),
                x.abs_exact.into(),
                x.abs_wh.into(),
            ]
        })
        .collect();
    t
}

/// Coefficients `j`, real and imaginary parts, modulus.
pub fn coefficient_table(c: &[Complex64]) -> Table {
    let mut t = Table::new(&["j", "re", "im", "abs"]);
    t.rows = c
        .iter()
        .enumerate()
        .map(|(j, z)| vec![j.into(), z.re.into(), z.im.into(), z.norm().into()])
        .collect();
    t
}

/// Exact eigenvector against the two-term model and its parts.
pub fn overlay_table(exact: &[Complex64], model: &TwoTermModel, tail: &[Complex64]) -> Table {
    let mut t = Table::new(&["j", "abs_psi_exact", "abs_two_term", "abs_exp_term", "abs_tail_term"]);
    t.rows = exact
        .iter()
        .enumerate()
        .map(|(j, e)| {
            vec![
                j.into(),
                e.norm().into(),
                (model.exponential(j) + model.algebraic(j)).norm().into(),
                model.exponential(j).norm().into(),
                tail.get(j).map_or(f64::NAN, |x| x.norm()).into(),
            ]
        })
        .collect();
    t
}

pub fn shift_table(rows: &[ShiftComparison]) -> Table {
    let mut t = Table::new(&[
        "N",
        "l",
        "re_measured",
        "im_measured",
        "re_predicted",
        "im_predicted",
        "deviation",
        "deviation_imag_only",
    ]);
    t.rows = rows
        .iter()
        .map(|s| {
            vec![
                s.n.into(),
                s.l.into(),
                s.measured.re.into(),
                s.measured.im.into(),
                s.predicted.re.into(),
                s.predicted.im.into(),
                s.deviation.into(),
                s.deviation_imag_only.into(),
            ]
        })
        .collect();
    t
}
