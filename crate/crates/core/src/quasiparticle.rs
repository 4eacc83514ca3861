//! Quasi-particle momenta.
//!
//! An eigenvector in its central region behaves like `psi_j ~ e^{i p j}`,
//! and its eigenvalue is `a(e^{-i p})` for the same complex `p`. This module
//! extracts `p` both ways, tabulates the two estimates against `N`, and fits
//! `N Im p = (2a+1) ln N + C`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolver::{
    grid_momentum, labeled_eigenvector, labeled_spectrum, GridDenominator, LabeledSpectrum,
};
use crate::symbol::{arg_0_2pi, solve_zc, solve_zc_from_curve, FHParams};
use crate::toeplitz::build_matrix;
use crate::{Error, Result};

/// Label selection rules used by the tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LRule {
    /// `floor((N-1)/2)`, momentum near pi.
    Half,
    /// `floor((sqrt 5 - 1)(N-1)/2)`, an irrational fraction of the band.
    Golden,
    /// `floor((N-1)/4)`.
    Quarter,
}

impl LRule {
    pub fn label(self, n: usize) -> usize {
        let m = (n - 1) as f64;
        let l = match self {
            Self::Half => (m / 2.0).floor(),
            Self::Golden => ((5f64.sqrt() - 1.0) * m / 2.0).floor(),
            Self::Quarter => (m / 4.0).floor(),
        };
        l as usize
    }
}

/// Which part of the momentum a table reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    /// `Im p`, compared through `N^3` and the log law.
    ImagP,
    /// `Re q = Re p - 2 pi l / (N-1)`, compared through `N^2` and a constant.
    RealQ,
}

/// Index window `[floor(lo N), floor(hi N)]` for the eigenvector estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Default for Window {
    fn default() -> Self {
        Self { lo: 0.2, hi: 0.5 }
    }
}

impl Window {
    pub fn indices(&self, n: usize) -> (usize, usize) {
        (
            (self.lo * n as f64).floor() as usize,
            (self.hi * n as f64).floor() as usize,
        )
    }
}

/// Shift `x` by a multiple of `2 pi` to land nearest `target`.
fn nearest_branch(x: f64, target: f64) -> f64 {
    x + TAU * ((target - x) / TAU).round()
}

/// `p = -i [ln psi_J - ln psi_j] / (J - j)`, with the phase unwrapped step by
/// step so that each increment is the branch closest to `target`.
pub fn p_from_eigenvector(psi: &[Complex64], j: usize, big_j: usize, target: f64) -> Result<Complex64> {
    if j >= big_j || big_j >= psi.len() {
        return Err(Error::BadWindow {
            j,
            big_j,
            reason: format!("need 0 <= j < J <= {}", psi.len().saturating_sub(1)),
        });
    }
    let mut log_mod = 0.0;
    let mut phase = 0.0;
    for k in j..big_j {
        if psi[k].norm() == 0.0 || psi[k + 1].norm() == 0.0 {
            return Err(Error::BadWindow {
                j,
                big_j,
                reason: format!("zero component near index {k}"),
            });
        }
        let ratio = psi[k + 1] / psi[k];
        log_mod += ratio.norm().ln();
        phase += nearest_branch(ratio.arg(), target);
    }
    let steps = (big_j - j) as f64;
    Ok(Complex64::new(phase / steps, -log_mod / steps))
}

/// `p = i ln z_c` where `a(z_c) = eps` and `|z_c| >= 1`, with `Re p` on the
/// branch nearest `target`.
pub fn p_from_eigenvalue(params: FHParams, eps: Complex64, target: f64, n: usize) -> Result<Complex64> {
    let seed = Complex64::from_polar(1.0 + 3.0 / n as f64, -target);
    let zc = solve_zc(params, eps, seed).or_else(|_| solve_zc_from_curve(params, eps))?;
    Ok(p_from_zc(zc, target))
}

/// `i ln z_c` on the branch nearest `target`.
pub fn p_from_zc(zc: Complex64, target: f64) -> Complex64 {
    let re = nearest_branch(TAU - arg_0_2pi(zc), target);
    Complex64::new(re, zc.norm().ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumRecord {
    pub n: usize,
    pub l: usize,
    pub eigenvalue: Complex64,
    pub p_psi: Complex64,
    pub p_eps: Complex64,
    pub q_psi: Complex64,
    pub q_eps: Complex64,
}

/// Exact eigenpair with label `l` at order `n` and both momentum estimates.
pub fn momentum_record(
    params: FHParams,
    n: usize,
    l: usize,
    window: Window,
    grid: GridDenominator,
) -> Result<MomentumRecord> {
    let matrix = build_matrix(params, n)?;
    let spectrum = labeled_spectrum(&matrix, grid)?;
    let psi = labeled_eigenvector(&matrix, &spectrum, l)?;
    record_from_eigenpair(params, &spectrum, &psi, l, window)
}

/// Both momentum estimates from an already computed eigenpair.
pub fn record_from_eigenpair(
    params: FHParams,
    spectrum: &LabeledSpectrum,
    psi: &[Complex64],
    l: usize,
    window: Window,
) -> Result<MomentumRecord> {
    let n = spectrum.order;
    let target = grid_momentum(l, n, spectrum.grid);
    let (j, big_j) = window.indices(n);
    let p_psi = p_from_eigenvector(psi, j, big_j, target)?;
    let eps = spectrum.eigenvalues[l];
    let p_eps = p_from_eigenvalue(params, eps, target, n)?;
    Ok(MomentumRecord {
        n,
        l,
        eigenvalue: eps,
        p_psi,
        p_eps,
        q_psi: p_psi - target,
        q_eps: p_eps - target,
    })
}

/// Anchored and unconstrained fits of `value N` against `ln N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Prescribed slope (`2a+1` for the log law, `0` for a constant).
    pub slope_coeff: f64,
    /// Constant chosen so the residual at the largest `N` vanishes.
    pub constant: f64,
    /// `(N, value N - fit)`, in input order.
    pub residuals: Vec<(usize, f64)>,
    /// Ordinary least-squares slope and intercept against `ln N`.
    pub lstsq_slope: f64,
    pub lstsq_intercept: f64,
}

fn anchored_fit(points: &[(usize, f64)], slope: f64) -> Result<FitResult> {
    if points.is_empty() {
        return Err(Error::InvalidParams("fit needs at least one point".into()));
    }
    let anchor = points
        .iter()
        .max_by_key(|(n, _)| *n)
        .expect("non-empty");
    let law = |n: usize| slope * (n as f64).ln();
    let constant = anchor.1 - law(anchor.0);
    let residuals = points
        .iter()
        .map(|&(n, v)| (n, if n == anchor.0 { 0.0 } else { v - law(n) - constant }))
        .collect();
    let (lstsq_slope, lstsq_intercept) = if points.len() >= 2 {
        let xs: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).ln()).collect();
        let m = points.len() as f64;
        let mx = xs.iter().sum::<f64>() / m;
        let my = points.iter().map(|(_, v)| v).sum::<f64>() / m;
        let sxy: f64 = xs.iter().zip(points).map(|(x, (_, v))| (x - mx) * (v - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        if sxx > 0.0 {
            let s = sxy / sxx;
            (s, my - s * mx)
        } else {
            (f64::NAN, f64::NAN)
        }
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(FitResult {
        slope_coeff: slope,
        constant,
        residuals,
        lstsq_slope,
        lstsq_intercept,
    })
}

/// Fits `value N = (2a+1) ln N + C`, anchored at the largest `N`.
pub fn fit_log_law(points: &[(usize, f64)], alpha: f64) -> Result<FitResult> {
    anchored_fit(points, 2.0 * alpha + 1.0)
}

/// Fits `value N = C`, anchored at the largest `N`.
pub fn fit_constant(points: &[(usize, f64)]) -> Result<FitResult> {
    anchored_fit(points, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub l: usize,
    pub value_psi: f64,
    pub value_eps: f64,
    /// `(value_psi - value_eps) 1e6`.
    pub diff_e6: f64,
    /// `(value_psi - value_eps) N^k` with `k = 3` for `Im p`, `2` for `Re q`.
    pub diff_nk: f64,
    pub value_psi_n: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpTable {
    pub params: FHParams,
    pub rule: LRule,
    pub part: Part,
    pub rows: Vec<TableRow>,
    pub records: Vec<MomentumRecord>,
    pub fit: FitResult,
}

/// One row per `N`; jobs for different `N` run in parallel.
pub fn qp_table(
    params: FHParams,
    ns: &[usize],
    rule: LRule,
    part: Part,
    window: Window,
    grid: GridDenominator,
) -> Result<QpTable> {
    if ns.is_empty() {
        return Err(Error::InvalidParams("empty N list".into()));
    }
    let records = crate::par::map_slice(ns, |&n| {
        momentum_record(params, n, rule.label(n), window, grid)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    table_from_records(params, records, rule, part)
}

/// Assembles table rows and the fit from precomputed records.
pub fn table_from_records(
    params: FHParams,
    records: Vec<MomentumRecord>,
    rule: LRule,
    part: Part,
) -> Result<QpTable> {
    let pick = |r: &MomentumRecord| match part {
        Part::ImagP => (r.p_psi.im, r.p_eps.im),
        Part::RealQ => (r.q_psi.re, r.q_eps.re),
    };
    let k = match part {
        Part::ImagP => 3,
        Part::RealQ => 2,
    };
    let points: Vec<(usize, f64)> = records
        .iter()
        .map(|r| (r.n, pick(r).0 * r.n as f64))
        .collect();
    let fit = match part {
        Part::ImagP => fit_log_law(&points, params.alpha)?,
        Part::RealQ => fit_constant(&points)?,
    };
    let rows = records
        .iter()
        .zip(&fit.residuals)
        .map(|(r, &(_, residual))| {
            let (vp, ve) = pick(r);
            let nf = r.n as f64;
            TableRow {
                n: r.n,
                l: r.l,
                value_psi: vp,
                value_eps: ve,
                diff_e6: (vp - ve) * 1e6,
                diff_nk: (vp - ve) * nf.powi(k),
                value_psi_n: vp * nf,
                residual,
            }
        })
        .collect();
    Ok(QpTable {
        params,
        rule,
        part,
        rows,
        records,
        fit,
    })
}

/// Spacing of consecutive momenta in units of the grid step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingReport {
    /// `(l, Re(p^{l+1} - p^l) d / 2 pi)` with `l / (N-1)` in `[0.1, 0.9]`.
    pub central: Vec<(usize, f64)>,
    /// Same quantity outside the central band (`NaN` where `p` could not be
    /// extracted).
    pub endpoint: Vec<(usize, f64)>,
    pub central_mean: f64,
    pub central_max_deviation: f64,
}

/// Spacing statistics from eigenvalues ordered by label.
pub fn spacing_report(params: FHParams, eigenvalues: &[Complex64], grid: GridDenominator) -> SpacingReport {
    let n = eigenvalues.len();
    let momenta: Vec<Option<f64>> = crate::par::map_range(n, |l| {
        let target = grid_momentum(l, n, grid);
        p_from_eigenvalue(params, eigenvalues[l], target, n).ok().map(|p| p.re)
    });
    let step = TAU / grid.value(n);
    let mut central = Vec::new();
    let mut endpoint = Vec::new();
    for l in 0..n.saturating_sub(1) {
        let ratio = match (momenta[l], momenta[l + 1]) {
            (Some(a), Some(b)) => (b - a) / step,
            _ => f64::NAN,
        };
        let frac = l as f64 / (n - 1) as f64;
        let frac_next = (l + 1) as f64 / (n - 1) as f64;
        if frac >= 0.1 && frac_next <= 0.9 {
            central.push((l, ratio));
        } else {
            endpoint.push((l, ratio));
        }
    }
    let finite: Vec<f64> = central.iter().map(|(_, r)| *r).filter(|r| r.is_finite()).collect();
    let central_mean = finite.iter().sum::<f64>() / finite.len().max(1) as f64;
    let central_max_deviation = central
        .iter()
        .map(|(_, r)| if r.is_finite() { (r - 1.0).abs() } else { f64::INFINITY })
        .fold(0.0, f64::max);
    SpacingReport {
        central,
        endpoint,
        central_mean,
        central_max_deviation,
    }
}

/// [`spacing_report`] for a labeled spectrum.
pub fn spacing_of(spectrum: &LabeledSpectrum) -> SpacingReport {
    spacing_report(spectrum.params, &spectrum.eigenvalues, spectrum.grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::grid_eigenvalue;

    fn fh() -> FHParams {
        FHParams::new(1.0 / 3.0, -0.5).unwrap()
    }

    #[test]
    fn l_rules() {
        assert_eq!(LRule::Half.label(100), 49);
        assert_eq!(LRule::Golden.label(40), 24);
        assert_eq!(LRule::Quarter.label(400), 99);
        assert_eq!(LRule::Quarter.label(1000), 249);
    }

    #[test]
    fn pure_exponential() {
        let p0 = Complex64::new(2.3, 0.05);
        let psi: Vec<Complex64> = (0..50).map(|j| (Complex64::i() * p0 * j as f64).exp()).collect();
        let p = p_from_eigenvector(&psi, 10, 25, 2.3).unwrap();
        assert!((p - p0).norm() < 1e-12);
        assert!(p_from_eigenvector(&psi, 25, 25, 2.3).is_err());
        let mut holed = psi.clone();
        holed[12] = Complex64::new(0.0, 0.0);
        assert!(p_from_eigenvector(&holed, 10, 25, 2.3).is_err());
    }

    #[test]
    fn eigenvalue_round_trip() {
        let n = 100;
        let grid = GridDenominator::default();
        let l = 30;
        let eps = grid_eigenvalue(fh(), l, n, grid).unwrap();
        let p0 = grid_momentum(l, n, grid);
        let p = p_from_eigenvalue(fh(), eps, p0, n).unwrap();
        assert!((p.re - p0).abs() < 1e-10 && p.im.abs() < 1e-10, "{p}");
    }

    #[test]
    fn exact_log_law_points() {
        let alpha = 1.0 / 3.0;
        let pts: Vec<(usize, f64)> = [40, 100, 400]
            .iter()
            .map(|&n| (n, (2.0 * alpha + 1.0) * (n as f64).ln() + 1.0))
            .collect();
        let fit = fit_log_law(&pts, alpha).unwrap();
        assert!((fit.constant - 1.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|(_, r)| r.abs() < 1e-12));
        assert!((fit.lstsq_slope - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn printed_table_fit() {
        // value N column of the half-band imaginary-part table
        let pts = [
            (2000, 15.308),
            (1000, 14.146),
            (400, 12.594),
            (200, 11.406),
            (100, 10.195),
            (40, 8.530),
        ];
        let fit = fit_log_law(&pts, 1.0 / 3.0).unwrap();
        assert!((fit.constant - 2.639).abs() < 1e-3);
        assert!((fit.residuals[5].1 + 0.258).abs() < 2e-3);
        assert!((fit.lstsq_slope - 1.728).abs() < 5e-3);
    }

    #[test]
    fn uniform_grid_spacing() {
        let n = 60;
        let grid = GridDenominator::default();
        let eig: Vec<Complex64> = (0..n).map(|l| grid_eigenvalue(fh(), l, n, grid).unwrap()).collect();
        let rep = spacing_report(fh(), &eig, grid);
        assert!(rep.central_max_deviation < 1e-8);
        assert!(rep.endpoint.iter().all(|(l, _)| (*l as f64) < 0.1 * 59.0 || (*l + 1) as f64 > 0.9 * 59.0));
    }

    #[test]
    fn small_table_row() {
        let r = momentum_record(fh(), 40, 19, Window::default(), GridDenominator::default()).unwrap();
        assert!((r.p_psi.im - 0.2143346).abs() < 1e-6, "{}", r.p_psi);
        assert!((r.p_eps.im - 0.213463).abs() < 2e-6, "{}", r.p_eps);
    }
}
