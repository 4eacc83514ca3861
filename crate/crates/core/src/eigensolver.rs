//! Dense non-Hermitian eigendecomposition, Widom-grid labeling and
//! biorthonormal normalization.
//!
//! The eigenproblem is delegated to faer (balancing, Hessenberg reduction,
//! shifted QR). Left eigenvectors are never computed: for a Toeplitz matrix
//! `J T^T J = T` with `J` the index reversal, so the reversed right vector is
//! a left vector for the same eigenvalue.

use std::f64::consts::TAU;

use faer::prelude::*;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::assignment::min_cost_assignment;
use crate::symbol::{circle_sample, FHParams};
use crate::toeplitz::ToeplitzMatrix;
use crate::{Error, Result};

/// Largest order accepted by the dense solvers.
pub const DEFAULT_ORDER_CAP: usize = 2000;

/// Eigenvalue gaps below this make biorthonormalization meaningless.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Self-pairings below this mark a defective eigenpair.
pub const DEFECTIVE_PAIRING: f64 = 1e-14;

/// Denominator of the labeling grid `p_l = 2 pi l / d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GridDenominator {
    /// `d = N - 1`, so that `l = 0` and `l = N - 1` both sit at `z = 1`.
    #[default]
    OrderMinusOne,
    /// `d = N`.
    Order,
}

impl GridDenominator {
    pub fn value(self, n: usize) -> f64 {
        match self {
            Self::OrderMinusOne => (n - 1) as f64,
            Self::Order => n as f64,
        }
    }
}

/// Grid momentum `2 pi l / d`.
pub fn grid_momentum(l: usize, n: usize, grid: GridDenominator) -> f64 {
    TAU * l as f64 / grid.value(n)
}

/// Grid eigenvalue `a(e^{-i p_l})`.
pub fn grid_eigenvalue(params: FHParams, l: usize, n: usize, grid: GridDenominator) -> Result<Complex64> {
    let p = grid_momentum(l, n, grid);
    let theta = (TAU - p).rem_euclid(TAU);
    circle_sample(params, theta)
}

/// Unordered eigenpairs.
#[derive(Debug, Clone)]
pub struct RawEigenpairs {
    pub params: FHParams,
    pub eigenvalues: Vec<Complex64>,
    /// Right eigenvectors, one per eigenvalue, unit 2-norm.
    pub vectors: Vec<Vec<Complex64>>,
}

fn check_order(matrix: &ToeplitzMatrix, cap: usize) -> Result<()> {
    if matrix.order > cap {
        return Err(Error::OrderTooLarge {
            n: matrix.order,
            cap,
        });
    }
    Ok(())
}

fn to_faer(matrix: &ToeplitzMatrix) -> Mat<f64> {
    Mat::<f64>::from_fn(matrix.order, matrix.order, |j, k| matrix.get(j, k))
}

/// `||T v - lambda v||_inf`.
pub fn residual(matrix: &ToeplitzMatrix, lambda: Complex64, v: &[Complex64]) -> f64 {
    matrix
        .mul_vec(v)
        .iter()
        .zip(v)
        .map(|(tv, x)| (tv - lambda * x).norm())
        .fold(0.0, f64::max)
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Full eigendecomposition with the residual contract
/// `||T psi - eps psi||_inf <= 1e-10 ||T||_inf ||psi||_inf`.
pub fn eig_dense(matrix: &ToeplitzMatrix, cap: usize) -> Result<RawEigenpairs> {
    check_order(matrix, cap)?;
    let a = to_faer(matrix);
    let evd = a.eigen().map_err(|e| Error::EigenFailure {
        fingerprint: matrix.fingerprint(),
        reason: format!("{e:?}"),
    })?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let n = matrix.order;
    let eigenvalues: Vec<Complex64> = (0..n).map(|i| s[i]).collect();
    let vectors: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let v: Vec<Complex64> = (0..n).map(|j| u[(j, i)]).collect();
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    let t_norm = matrix.norm_inf();
    for (lambda, v) in eigenvalues.iter().zip(&vectors) {
        let r = residual(matrix, *lambda, v);
        if r > 1e-10 * t_norm * inf_norm(v) {
            return Err(Error::EigenFailure {
                fingerprint: matrix.fingerprint(),
                reason: format!("residual {r:.3e} for eigenvalue {lambda}"),
            });
        }
    }
    Ok(RawEigenpairs {
        params: matrix.params,
        eigenvalues,
        vectors,
    })
}

/// Eigenvalues only; cheaper than [`eig_dense`] when few vectors are needed.
pub fn eigenvalues_dense(matrix: &ToeplitzMatrix, cap: usize) -> Result<Vec<Complex64>> {
    check_order(matrix, cap)?;
    to_faer(matrix).eigenvalues().map_err(|e| Error::EigenFailure {
        fingerprint: matrix.fingerprint(),
        reason: format!("{e:?}"),
    })
}

/// Right eigenvector for a known eigenvalue by shifted inverse iteration.
///
/// The shift is displaced from `lambda` by a few ulps of `||T||` so that the
/// LU factors stay finite; two or three sweeps reach the residual contract.
pub fn inverse_iteration(matrix: &ToeplitzMatrix, lambda: Complex64) -> Result<Vec<Complex64>> {
    let n = matrix.order;
    let t_norm = matrix.norm_inf().max(f64::MIN_POSITIVE);
    let shift = lambda + Complex64::new(1.0, 0.7) * (1e-13 * t_norm);
    let shifted = Mat::<c64>::from_fn(n, n, |j, k| {
        let t = Complex64::new(matrix.get(j, k), 0.0);
        if j == k {
            t - shift
        } else {
            t
        }
    });
    let lu = shifted.partial_piv_lu();
    // deterministic start with no special structure
    let mut x = Mat::<c64>::from_fn(n, 1, |j, _| {
        let s = (j as f64 * 0.618_033_988_749_895).fract();
        Complex64::new(1.0 + s, 0.5 - s)
    });
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for _ in 0..6 {
        lu.solve_in_place(x.as_mut());
        let norm = (0..n).map(|j| x[(j, 0)].norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        for j in 0..n {
            x[(j, 0)] /= norm;
        }
        let v: Vec<Complex64> = (0..n).map(|j| x[(j, 0)]).collect();
        let r = residual(matrix, lambda, &v);
        let done = r <= 1e-12 * t_norm * inf_norm(&v);
        if best.as_ref().map_or(true, |(br, _)| r < *br) {
            best = Some((r, v));
        }
        if done {
            break;
        }
    }
    match best {
        Some((r, v)) if r <= 1e-10 * t_norm * inf_norm(&v) => Ok(v),
        Some((r, _)) => Err(Error::EigenFailure {
            fingerprint: matrix.fingerprint(),
            reason: format!("inverse iteration residual {r:.3e} at {lambda}"),
        }),
        None => Err(Error::EigenFailure {
            fingerprint: matrix.fingerprint(),
            reason: format!("inverse iteration broke down at {lambda}"),
        }),
    }
}

/// Matching of eigenvalues to grid labels.
#[derive(Debug, Clone)]
pub struct Labeling {
    /// `index_of_label[l]` is the position of the eigenvalue with label `l`.
    pub index_of_label: Vec<usize>,
    /// `|eps^l - a(e^{-i p_l})|`.
    pub distances: Vec<f64>,
}

/// Minimum-total-distance assignment of eigenvalues to grid points.
pub fn label_eigenvalues(
    params: FHParams,
    eigenvalues: &[Complex64],
    grid: GridDenominator,
) -> Result<Labeling> {
    let n = eigenvalues.len();
    if n < 2 {
        return Err(Error::Labeling(format!("need at least 2 eigenvalues, got {n}")));
    }
    let targets = (0..n)
        .map(|l| grid_eigenvalue(params, l, n, grid))
        .collect::<Result<Vec<_>>>()?;
    // rows are labels, columns eigenvalues
    let mut cost = Vec::with_capacity(n * n);
    for t in &targets {
        for e in eigenvalues {
            cost.push((e - t).norm());
        }
    }
    let index_of_label = min_cost_assignment(&cost, n);
    let distances = index_of_label
        .iter()
        .enumerate()
        .map(|(l, &i)| cost[l * n + i])
        .collect();
    Ok(Labeling {
        index_of_label,
        distances,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralEntry {
    pub l: usize,
    pub eigenvalue: Complex64,
    pub right: Vec<Complex64>,
    /// Always the index reversal of `right`.
    pub left: Vec<Complex64>,
    pub match_distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub order: usize,
    pub params: FHParams,
    pub grid: GridDenominator,
    /// Sorted by label.
    pub entries: Vec<SpectralEntry>,
}

fn reversed(v: &[Complex64]) -> Vec<Complex64> {
    v.iter().rev().copied().collect()
}

/// Labels raw eigenpairs against the grid.
pub fn label_spectrum(raw: RawEigenpairs, grid: GridDenominator) -> Result<SpectralDecomposition> {
    let n = raw.eigenvalues.len();
    if raw.vectors.len() != n {
        return Err(Error::Length(format!(
            "{} eigenvalues but {} vectors",
            n,
            raw.vectors.len()
        )));
    }
    let labeling = label_eigenvalues(raw.params, &raw.eigenvalues, grid)?;
    let entries = labeling
        .index_of_label
        .iter()
        .enumerate()
        .map(|(l, &i)| SpectralEntry {
            l,
            eigenvalue: raw.eigenvalues[i],
            left: reversed(&raw.vectors[i]),
            right: raw.vectors[i].clone(),
            match_distance: labeling.distances[l],
        })
        .collect();
    Ok(SpectralDecomposition {
        order: n,
        params: raw.params,
        grid,
        entries,
    })
}

/// `sum_j psi_{N-1-j} psi_j`.
pub fn self_pairing(v: &[Complex64]) -> Complex64 {
    v.iter().zip(v.iter().rev()).map(|(a, b)| a * b).sum()
}

/// Scales `v` to unit self-pairing and fixes the overall sign.
pub fn normalize_vector(v: &[Complex64]) -> Result<Vec<Complex64>, Complex64> {
    let pairing = self_pairing(v);
    let scale_ref = v.iter().map(|x| x.norm_sqr()).sum::<f64>();
    if pairing.norm() < DEFECTIVE_PAIRING * scale_ref.max(f64::MIN_POSITIVE) {
        return Err(pairing);
    }
    let s = pairing.sqrt();
    let mut out: Vec<Complex64> = v.iter().map(|x| x / s).collect();
    let max = inf_norm(&out);
    if let Some(first) = out.iter().find(|x| x.norm() > 1e-14 * max) {
        let flip = if first.re.abs() < 1e-12 * max {
            first.im < 0.0
        } else {
            first.re < 0.0
        };
        if flip {
            out.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(out)
}

/// Rescales every right vector so that `sum_j psi_{N-1-j} psi_j = 1` and
/// rebuilds the left vectors.
pub fn normalize_biorthogonal(mut decomp: SpectralDecomposition) -> Result<SpectralDecomposition> {
    for entry in decomp.entries.iter_mut() {
        let right = normalize_vector(&entry.right).map_err(|pairing| Error::Defective {
            l: entry.l,
            pairing: pairing.norm(),
        })?;
        entry.left = reversed(&right);
        entry.right = right;
    }
    let n = decomp.entries.len();
    for a in 0..n {
        for b in a + 1..n {
            let gap = (decomp.entries[a].eigenvalue - decomp.entries[b].eigenvalue).norm();
            if gap < DEGENERACY_GAP {
                return Err(Error::Degenerate {
                    l: decomp.entries[a].l,
                    m: decomp.entries[b].l,
                    gap,
                });
            }
        }
    }
    Ok(decomp)
}

/// Full pipeline: build, solve, label, normalize.
pub fn decompose(matrix: &ToeplitzMatrix, grid: GridDenominator) -> Result<SpectralDecomposition> {
    let raw = eig_dense(matrix, DEFAULT_ORDER_CAP)?;
    normalize_biorthogonal(label_spectrum(raw, grid)?)
}

/// `max_{l,m} |sum_j psi~^l_j psi^m_j - delta_{lm}|`.
pub fn check_biorthonormality(decomp: &SpectralDecomposition) -> f64 {
    let entries = &decomp.entries;
    let rows = crate::par::map_range(entries.len(), |a| {
        let left = &entries[a].left;
        entries
            .iter()
            .enumerate()
            .map(|(b, e)| {
                let s: Complex64 = left.iter().zip(&e.right).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                (s - target).norm()
            })
            .fold(0.0, f64::max)
    });
    rows.into_iter().fold(0.0, f64::max)
}

/// `max_{j,k} |sum_l psi~^l_j psi^l_k - delta_{jk}|`.
pub fn check_completeness(decomp: &SpectralDecomposition) -> f64 {
    let n = decomp.order;
    let entries = &decomp.entries;
    let rows = crate::par::map_range(n, |j| {
        (0..n)
            .map(|k| {
                let s: Complex64 = entries.iter().map(|e| e.left[j] * e.right[k]).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                (s - target).norm()
            })
            .fold(0.0, f64::max)
    });
    rows.into_iter().fold(0.0, f64::max)
}

/// Labeled eigenvalues of a matrix without vectors.
#[derive(Debug, Clone)]
pub struct LabeledSpectrum {
    pub order: usize,
    pub params: FHParams,
    pub grid: GridDenominator,
    /// `eigenvalues[l]`.
    pub eigenvalues: Vec<Complex64>,
    pub distances: Vec<f64>,
}

/// Eigenvalues of `matrix` labeled against the grid.
pub fn labeled_spectrum(matrix: &ToeplitzMatrix, grid: GridDenominator) -> Result<LabeledSpectrum> {
    let values = eigenvalues_dense(matrix, DEFAULT_ORDER_CAP)?;
    let labeling = label_eigenvalues(matrix.params, &values, grid)?;
    Ok(LabeledSpectrum {
        order: matrix.order,
        params: matrix.params,
        grid,
        eigenvalues: labeling.index_of_label.iter().map(|&i| values[i]).collect(),
        distances: labeling.distances,
    })
}

/// Biorthonormally normalized eigenvector with label `l`.
pub fn labeled_eigenvector(
    matrix: &ToeplitzMatrix,
    spectrum: &LabeledSpectrum,
    l: usize,
) -> Result<Vec<Complex64>> {
    let lambda = *spectrum.eigenvalues.get(l).ok_or_else(|| {
        Error::Labeling(format!("label {l} out of range for N = {}", spectrum.order))
    })?;
    let v = inverse_iteration(matrix, lambda)?;
    normalize_vector(&v).map_err(|pairing| Error::Defective {
        l,
        pairing: pairing.norm(),
    })
}
