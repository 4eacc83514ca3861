//! Command implementations. Each one computes its jobs (in parallel over `N`)
//! and then writes tables in input order.

use std::path::PathBuf;

use fhtoeplitz::asymptotics::{predicted_im_p, shift_comparison, tail_term, TwoTermModel};
use fhtoeplitz::eigensolver::{grid_momentum, labeled_eigenvector, labeled_spectrum, GridDenominator, LabeledSpectrum};
use fhtoeplitz::quasiparticle::{qp_table, record_from_eigenpair, LRule, Window};
use fhtoeplitz::report::{self, Cell, Format, Sidecar, Table};
use fhtoeplitz::symbol::symbol_image;
use fhtoeplitz::toeplitz::{build_matrix, ToeplitzMatrix};
use fhtoeplitz::wienerhopf::{compare_with_exact, default_window, find_zc, psi_s_coeffs, psi_wh_coeffs};
use fhtoeplitz::{par, Complex64, FHParams, VERSION};
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{Command, Common, ConfigError, LabelChoice};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Numerical(#[from] fhtoeplitz::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

type Result<T> = std::result::Result<T, RunError>;

/// Collects written files for the sidecar.
struct Writer {
    dir: PathBuf,
    format: Format,
    files: Vec<String>,
}

impl Writer {
    fn new(common: &Common) -> Result<Self> {
        std::fs::create_dir_all(&common.out).map_err(|e| {
            ConfigError::Invalid(format!("cannot create {}: {e}", common.out.display()))
        })?;
        Ok(Self {
            dir: common.out.clone(),
            format: common.format.into(),
            files: Vec::new(),
        })
    }

    fn table(&mut self, stem: &str, table: &Table) -> Result<()> {
        let name = format!("{stem}.{}", self.format.extension());
        table.save(&self.dir.join(&name), self.format)?;
        self.files.push(name);
        Ok(())
    }

    fn finish(self, command: &Command, summary: Value) -> Result<PathBuf> {
        let path = self.dir.join(format!("{}.meta.json", command.name()));
        let sidecar = Sidecar {
            command: command.name().to_owned(),
            version: VERSION.to_owned(),
            config: serde_json::to_value(command.common()).unwrap_or(Value::Null),
            outputs: self.files,
            summary,
        };
        sidecar.save(&path)?;
        Ok(path)
    }
}

pub fn run(command: &Command) -> Result<PathBuf> {
    let common = command.common();
    let params = common.params()?;
    let orders = common.orders()?;
    let grid: GridDenominator = common.grid.into();
    let mut out = Writer::new(common)?;
    let summary = par::with_threads(common.threads, || -> Result<Value> {
        match command {
            Command::Spectrum { curve_samples, .. } => spectrum(&mut out, params, &orders, grid, *curve_samples),
            Command::Eigvec { branches, .. } => {
                eigvec(&mut out, params, &orders, common.label(LRule::Quarter)?, grid, *branches)
            }
            Command::QpTable { part, .. } => {
                let rule = match common.label(LRule::Half)? {
                    LabelChoice::Rule(r) => r,
                    _ => return Err(ConfigError::Invalid("qp-table takes --l-rule only".into()).into()),
                };
                let table = qp_table(params, &orders, rule, (*part).into(), Window::default(), grid)?;
                let stem = format!("qp_table_{}_{}", json_name(part), json_name(&rule));
                out.table(&stem, &report::qp_table_table(&table))?;
                Ok(json!({ "fit": table.fit, "records": table.records }))
            }
            Command::WhCompare { s_terms, .. } => {
                wh_compare(&mut out, params, &orders, common.label(LRule::Quarter)?, grid, *s_terms)
            }
            Command::Asymptotics { .. } => asymptotics(&mut out, params, &orders, common.label(LRule::Quarter)?, grid),
        }
    })?;
    out.finish(command, summary)
}

fn json_name<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_value(x)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

struct Solved {
    n: usize,
    l: usize,
    matrix: ToeplitzMatrix,
    spectrum: LabeledSpectrum,
}

fn solve(params: FHParams, n: usize, grid: GridDenominator) -> fhtoeplitz::Result<(ToeplitzMatrix, LabeledSpectrum)> {
    let matrix = build_matrix(params, n)?;
    let spectrum = labeled_spectrum(&matrix, grid)?;
    Ok((matrix, spectrum))
}

/// Spectra for every `N`, computed in parallel and returned in order.
fn solve_all(params: FHParams, orders: &[usize], label: Option<LabelChoice>, grid: GridDenominator) -> Result<Vec<Solved>> {
    let labels = orders
        .iter()
        .map(|&n| label.map_or(Ok(0), |c| c.resolve(n)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let jobs: Vec<(usize, usize)> = orders.iter().copied().zip(labels).collect();
    par::map_slice(&jobs, |&(n, l)| {
        solve(params, n, grid).map(|(matrix, spectrum)| Solved { n, l, matrix, spectrum })
    })
    .into_iter()
    .map(|r| r.map_err(RunError::from))
    .collect()
}

fn spectrum(out: &mut Writer, params: FHParams, orders: &[usize], grid: GridDenominator, samples: usize) -> Result<Value> {
    let solved = solve_all(params, orders, None, grid)?;
    out.table("symbol_curve", &report::curve_table(&symbol_image(params, samples.max(16))?))?;
    let mut summary = Vec::new();
    for s in &solved {
        out.table(&format!("spectrum_N{}", s.n), &report::spectrum_table(&s.spectrum))?;
        let max = s.spectrum.distances.iter().copied().fold(0.0, f64::max);
        summary.push(json!({ "N": s.n, "max_grid_distance": max }));
    }
    Ok(Value::Array(summary))
}

fn eigvec(
    out: &mut Writer,
    params: FHParams,
    orders: &[usize],
    label: LabelChoice,
    grid: GridDenominator,
    branches: usize,
) -> Result<Value> {
    let solved = solve_all(params, orders, Some(label), grid)?;
    let vectors = par::map_slice(&solved, |s| labeled_eigenvector(&s.matrix, &s.spectrum, s.l));
    let mut summary = Vec::new();
    for (s, psi) in solved.iter().zip(vectors) {
        let psi = psi?;
        out.table(&format!("eigvec_N{}_l{}", s.n, s.l), &report::eigenvector_table(&psi, branches))?;
        let eps = s.spectrum.eigenvalues[s.l];
        summary.push(json!({ "N": s.n, "l": s.l, "eigenvalue": [eps.re, eps.im] }));
    }
    Ok(Value::Array(summary))
}

fn zc_seed(l: usize, n: usize, grid: GridDenominator) -> Complex64 {
    Complex64::from_polar(1.0 + 3.0 / n as f64, -grid_momentum(l, n, grid))
}

fn wh_compare(
    out: &mut Writer,
    params: FHParams,
    orders: &[usize],
    label: LabelChoice,
    grid: GridDenominator,
    s_terms: Option<usize>,
) -> Result<Value> {
    let solved = solve_all(params, orders, Some(label), grid)?;
    let mut summary = Vec::new();
    for s in &solved {
        let psi = labeled_eigenvector(&s.matrix, &s.spectrum, s.l)?;
        let eps = s.spectrum.eigenvalues[s.l];
        let wh = psi_wh_coeffs(params, eps, s.n.max(8), Some(zc_seed(s.l, s.n, grid)))?;
        let report = compare_with_exact(&wh, &psi, default_window(s.n))?;
        let (coeffs, s_info) = psi_s_coeffs(params, eps, s_terms.unwrap_or(s.n).max(8))?;
        let tail = (0..coeffs.len())
            .map(|j| tail_term(params, eps, j))
            .collect::<fhtoeplitz::Result<Vec<_>>>()?;
        let mut s_table = report::coefficient_table(&coeffs);
        s_table.columns.push("abs_tail".into());
        for (row, t) in s_table.rows.iter_mut().zip(&tail) {
            row.push(Cell::Num(t.norm()));
        }
        out.table(&format!("wh_compare_N{}_l{}", s.n, s.l), &report::comparison_table(&report))?;
        out.table(&format!("psi_s_N{}_l{}", s.n, s.l), &s_table)?;
        summary.push(json!({
            "N": s.n,
            "l": s.l,
            "eigenvalue": [eps.re, eps.im],
            "z_c": [wh.z_c.re, wh.z_c.im],
            "C": [report.c.re, report.c.im],
            "window": report.window,
            "max_abs_err_to_half": report.max_abs_err_up_to(0.5),
            "rel_err_at_0.3": report.rel_err_at(0.3),
            "rel_err_at_0.9": report.rel_err_at(0.9),
            "wh_extraction": wh.info,
            "psi_s_extraction": s_info,
        }));
    }
    Ok(Value::Array(summary))
}

fn asymptotics(out: &mut Writer, params: FHParams, orders: &[usize], label: LabelChoice, grid: GridDenominator) -> Result<Value> {
    let solved = solve_all(params, orders, Some(label), grid)?;
    let exponent = 2.0 * params.alpha + 1.0;
    let mut shifts = Vec::new();
    let mut law = Table::new(&["N", "l", "im_p_psi", "im_p_eps", "predicted_im_p", "remainder", "exponent"]);
    let mut summary = Vec::new();
    for s in &solved {
        let psi = labeled_eigenvector(&s.matrix, &s.spectrum, s.l)?;
        let eps = s.spectrum.eigenvalues[s.l];
        let record = record_from_eigenpair(params, &s.spectrum, &psi, s.l, Window::default())?;
        let shift = shift_comparison(params, eps, s.n, s.l, grid)?;
        let z_c = find_zc(params, eps, Some(zc_seed(s.l, s.n, grid)))?;
        let model = TwoTermModel::new(params, eps, z_c, s.n / 2)?;
        let tail = (0..s.n)
            .map(|j| tail_term(params, eps, j))
            .collect::<fhtoeplitz::Result<Vec<_>>>()?;
        // the exact vector is normalized differently; match it to the model on the window
        let (lo, hi) = default_window(s.n);
        let scale = least_squares_scale(&psi[lo..=hi], &(lo..=hi).map(|j| model.exponential(j) + model.algebraic(j)).collect::<Vec<_>>());
        let scaled: Vec<Complex64> = psi.iter().map(|x| x * scale).collect();
        out.table(&format!("overlay_N{}_l{}", s.n, s.l), &report::overlay_table(&scaled, &model, &tail))?;
        let nf = s.n as f64;
        law.push(vec![
            s.n.into(),
            s.l.into(),
            record.p_psi.im.into(),
            record.p_eps.im.into(),
            predicted_im_p(params.alpha, s.n).into(),
            (record.p_psi.im * nf - exponent * nf.ln()).into(),
            exponent.into(),
        ])?;
        summary.push(json!({
            "N": s.n,
            "l": s.l,
            "A": [model.a.re, model.a.im],
            "B": [model.b.re, model.b.im],
            "z_c": [z_c.re, z_c.im],
            "interference_ratio": model.interference_ratio(s.n),
            "shift_deviation": shift.deviation,
            "shift_deviation_imag_only": shift.deviation_imag_only,
        }));
        shifts.push(shift);
    }
    out.table("shift", &report::shift_table(&shifts))?;
    out.table("im_p_law", &law)?;
    Ok(Value::Array(summary))
}

/// `c` minimizing `|c x - y|` over the slices.
fn least_squares_scale(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let (num, den) = x.iter().zip(y).fold((Complex64::new(0.0, 0.0), 0.0), |(num, den), (a, b)| {
        (num + a.conj() * b, den + a.norm_sqr())
    });
    if den > 0.0 {
        num / den
    } else {
        Complex64::new(1.0, 0.0)
    }
}
