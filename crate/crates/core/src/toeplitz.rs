//! Fisher-Hartwig Toeplitz matrices.
//!
//! The diagonal values are
//! `T(n) = (-1)^n Gamma(2a+1) / (Gamma(a+1+b-n) Gamma(a+1-b+n))`. Moderate
//! offsets use the gamma ratio directly; larger ones go through log-gamma
//! differences so that offsets beyond the gamma overflow threshold stay
//! finite. A denominator pole makes the element exactly zero.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::specialfn::{gamma_real, is_gamma_pole, ln_gamma_abs, sin_pi};
use crate::symbol::{circle_sample, FHParams};
use crate::{Error, Result};

const DIRECT_GAMMA_LIMIT: f64 = 60.0;

/// Closed-form matrix element `T(n)`, `n = j - k`.
pub fn element(params: FHParams, n: i64) -> Result<f64> {
    let FHParams { alpha, beta } = params;
    if alpha <= -0.5 {
        return Err(Error::InvalidParams(format!(
            "alpha = {alpha} must exceed -1/2"
        )));
    }
    let nf = n as f64;
    let x1 = alpha + 1.0 + beta - nf;
    let x2 = alpha + 1.0 - beta + nf;
    if is_gamma_pole(x1) || is_gamma_pole(x2) {
        return Ok(0.0);
    }
    let parity = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    if x1.abs() < DIRECT_GAMMA_LIMIT && x2.abs() < DIRECT_GAMMA_LIMIT {
        // exact at integer arguments, which the log route is not
        let num = gamma_real(2.0 * alpha + 1.0)?.value;
        return Ok(parity * num * gamma_real(x1)?.reciprocal() * gamma_real(x2)?.reciprocal());
    }
    let (ln_num, _) = ln_gamma_abs(2.0 * alpha + 1.0)?;
    let (ln1, s1) = ln_gamma_abs(x1)?;
    let (ln2, s2) = ln_gamma_abs(x2)?;
    // Gamma(2a+1) > 0 for a > -1/2
    Ok(parity * s1 * s2 * (ln_num - ln1 - ln2).exp())
}

/// Large-offset law `-Gamma(2a+1) sin pi(a +- b) / (pi |n + b|^{2a+1})`,
/// with `+` for `n > 0` and `-` for `n < 0`.
///
/// For negative offsets the base is `|n + b|`, which is what the parity
/// relation `T_b(n) = T_{-b}(-n)` gives; the sign then needs no adjustment.
pub fn element_asymptotic(params: FHParams, n: i64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("asymptotic law needs |n| >= 1".into()));
    }
    let FHParams { alpha, beta } = params;
    let g = gamma_real(2.0 * alpha + 1.0)?.value;
    let s = if n > 0 {
        sin_pi(alpha + beta)
    } else {
        sin_pi(alpha - beta)
    };
    let base = (n as f64 + beta).abs();
    Ok(-g * s / (PI * base.powf(2.0 * alpha + 1.0)))
}

/// Uniform trapezoid rule with `m` nodes for
/// `(1/2pi) int_0^{2pi} a(e^{i theta}) e^{-i n theta} d theta`.
pub fn element_trapezoid(params: FHParams, n: i64, m: usize) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..m {
        let theta = TAU * k as f64 / m as f64;
        let a = circle_sample(params, theta)?;
        // reduce n*k mod m before forming the angle to keep it accurate
        let phase = -TAU * ((n.rem_euclid(m as i64) as u128 * k as u128) % m as u128) as f64
            / m as f64;
        sum += a * Complex64::from_polar(1.0, phase);
    }
    Ok(sum / m as f64)
}

const NUMERIC_MAX_DOUBLINGS: usize = 9;

/// Fourier-integral oracle for [`element`].
///
/// Trapezoid sums on `m, 2m, 4m, ...` nodes followed by Richardson
/// extrapolation with the error exponents `2a+1, 2a+2, ...` produced by the
/// `|theta|^{2a}` cusp at `theta = 0`. Doubling stops once successive
/// extrapolants agree to `1e-12` or after a fixed number of levels.
pub fn element_numeric(params: FHParams, n: i64, m: usize) -> Result<Complex64> {
    if m < 256 {
        return Err(Error::InvalidParams(format!(
            "element_numeric needs m >= 256, got {m}"
        )));
    }
    let exponent = |k: usize| 2.0 * params.alpha + 1.0 + k as f64;
    // table[i][k]: level i, k-th extrapolation
    let mut table: Vec<Vec<Complex64>> = Vec::new();
    let mut last_best: Option<Complex64> = None;
    let mut base = m;
    for level in 0..NUMERIC_MAX_DOUBLINGS {
        let t = element_trapezoid(params, n, base)?;
        let mut row = vec![t];
        for k in 1..=level {
            let factor = 2f64.powf(exponent(k - 1));
            let prev = table[level - 1][k - 1];
            let next = (row[k - 1] * factor - prev) / (factor - 1.0);
            row.push(next);
        }
        let best = *row.last().expect("non-empty");
        table.push(row);
        if let Some(lb) = last_best {
            if (best - lb).norm() < 1e-12 && level >= 2 {
                return Ok(best);
            }
        }
        last_best = Some(best);
        base *= 2;
    }
    Ok(last_best.expect("at least one level"))
}

/// Order-`N` Toeplitz matrix stored as its `2N - 1` diagonals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzMatrix {
    pub params: FHParams,
    pub order: usize,
    /// `diagonals[n + N - 1] = T(n)` for `n` in `-(N-1)..=(N-1)`.
    pub diagonals: Vec<f64>,
}

impl ToeplitzMatrix {
    /// Builds a matrix from explicit diagonals (used for tests and imports).
    pub fn from_diagonals(params: FHParams, diagonals: Vec<f64>) -> Result<Self> {
        if diagonals.len() % 2 == 0 {
            return Err(Error::Length(format!(
                "{} diagonals; need 2N - 1",
                diagonals.len()
            )));
        }
        let order = (diagonals.len() + 1) / 2;
        Ok(Self {
            params,
            order,
            diagonals,
        })
    }

    /// `T(n)`; panics if `|n| >= N`.
    pub fn diag(&self, n: i64) -> f64 {
        self.diagonals[(n + self.order as i64 - 1) as usize]
    }

    /// Entry `(j, k) = T(j - k)`.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.diag(j as i64 - k as i64)
    }

    /// Dense row-major materialization.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.order;
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                out.push(self.get(j, k));
            }
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.order)
            .map(|j| (0..self.order).map(|k| self.get(j, k).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.order)
            .map(|j| (0..self.order).map(|k| v[k] * self.get(j, k)).sum())
            .collect()
    }

    /// `v^T T`, i.e. the left action.
    pub fn vec_mul(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.order)
            .map(|k| (0..self.order).map(|j| v[j] * self.get(j, k)).sum())
            .collect()
    }

    /// Short identification string used in error reports.
    pub fn fingerprint(&self) -> String {
        let checksum: f64 = self
            .diagonals
            .iter()
            .enumerate()
            .map(|(i, d)| d * (1.0 + i as f64).sqrt())
            .sum();
        format!(
            "FH(alpha={}, beta={}, N={}, checksum={:.12e})",
            self.params.alpha, self.params.beta, self.order, checksum
        )
    }
}

/// Assembles the order-`n` matrix from [`element`].
pub fn build_matrix(params: FHParams, n: usize) -> Result<ToeplitzMatrix> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("matrix order must be >= 2, got {n}")));
    }
    let last = n as i64 - 1;
    let diagonals = (-last..=last)
        .map(|off| element(params, off))
        .collect::<Result<Vec<_>>>()?;
    Ok(ToeplitzMatrix {
        params,
        order: n,
        diagonals,
    })
}

/// Result of applying the truncated semi-infinite operator.
#[derive(Debug, Clone)]
pub struct OperatorApplication {
    pub values: Vec<Complex64>,
    /// Bound on the neglected tail `sum_{k >= M} |T(j - k)| |v_k|`, assuming
    /// `|v_k|` does not grow beyond `|v_{M-1}|`.
    pub truncation_estimate: f64,
}

/// `(sum_{k < M} T(j - k) v_k)` for `j < j_max`, where `M = v.len() >= 4 j_max`.
pub fn apply_operator(params: FHParams, v: &[Complex64], j_max: usize) -> Result<OperatorApplication> {
    let m = v.len();
    if m < 4 * j_max {
        return Err(Error::Truncation { m, j_max });
    }
    if j_max == 0 {
        return Ok(OperatorApplication {
            values: Vec::new(),
            truncation_estimate: 0.0,
        });
    }
    // offsets n = j - k range over [-(m-1), j_max-1]
    let lo = -(m as i64 - 1);
    let hi = j_max as i64 - 1;
    let table = (lo..=hi)
        .map(|n| element(params, n))
        .collect::<Result<Vec<_>>>()?;
    let t = |n: i64| table[(n - lo) as usize];
    let values = crate::par::map_range(j_max, |j| {
        v.iter()
            .enumerate()
            .map(|(k, &vk)| vk * t(j as i64 - k as i64))
            .sum::<Complex64>()
    });
    let tail_amp = v.last().map(|x| x.norm()).unwrap_or(0.0);
    let s = 2.0 * params.alpha;
    let coeff = gamma_real(2.0 * params.alpha + 1.0)?.value / PI;
    // sum_{k >= M} (k - j)^{-(2a+1)} <= (M - j_max)^{-2a} / (2a) (+ first term)
    let gap = (m - j_max) as f64;
    let tail_sum = if s > 0.0 {
        gap.powf(-s) / s + gap.powf(-(s + 1.0))
    } else {
        0.0
    };
    Ok(OperatorApplication {
        values,
        truncation_estimate: coeff * tail_amp * tail_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fh() -> FHParams {
        FHParams::new(1.0 / 3.0, -0.5).unwrap()
    }

    #[test]
    fn shift_matrix_elements() {
        let shift = FHParams::new(0.0, -1.0).unwrap();
        for n in -6..=6 {
            let t = element(shift, n).unwrap();
            if n == -1 {
                assert_eq!(t, -1.0);
            } else {
                assert_eq!(t, 0.0, "n = {n}");
            }
        }
    }

    #[test]
    fn elements_satisfy_ratio_recurrence() {
        // T(n+1) / T(n) = (n - a - b) / (n + 1 + a - b)
        let p = fh();
        for n in -60..60i64 {
            let lhs = element(p, n + 1).unwrap() / element(p, n).unwrap();
            let nf = n as f64;
            let rhs = (nf - p.alpha - p.beta) / (nf + 1.0 + p.alpha - p.beta);
            assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn large_offsets_do_not_overflow() {
        let p = fh();
        let t = element(p, 5000).unwrap();
        let a = element_asymptotic(p, 5000).unwrap();
        assert!(t.is_finite() && (t / a - 1.0).abs() < 1e-3);
    }

    #[test]
    fn parity_under_beta_flip() {
        let p = fh();
        for n in -30..=30 {
            let a = element(p, n).unwrap();
            let b = element(p.reflected(), -n).unwrap();
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn asymptotic_examples() {
        let p = fh();
        for n in [100, -100] {
            let ratio = element_asymptotic(p, n).unwrap() / element(p, n).unwrap();
            assert!((ratio - 1.0).abs() < 0.02, "n = {n}: {ratio}");
        }
        let q = FHParams::new(0.0, -0.5).unwrap();
        let v = element_asymptotic(q, 10).unwrap();
        assert!((v - 1.0 / (PI * 9.5)).abs() < 1e-15);
        // the (n + b) base carries a relative error of about -2(2a+1)b/n, 4% at n = 40
        let forty = element_asymptotic(p, 40).unwrap() / element(p, 40).unwrap();
        assert!((forty - 1.0).abs() < 0.05);
        let predicted = 1.0 - 2.0 * (2.0 * p.alpha + 1.0) * p.beta / 40.0;
        assert!((forty - predicted).abs() < 0.01, "{forty} vs {predicted}");
    }

    #[test]
    fn tail_law_constant() {
        let p = fh();
        let c = gamma_real(2.0 * p.alpha + 1.0).unwrap().value * sin_pi(p.alpha + p.beta).abs() / PI;
        let n = 100i64;
        let v = element(p, n).unwrap().abs() * (n as f64).powf(2.0 * p.alpha + 1.0);
        assert!((v / c - 1.0).abs() < 0.02);
    }

    #[test]
    fn trapezoid_single_mode() {
        let shift = FHParams::new(0.0, -1.0).unwrap();
        let t = element_trapezoid(shift, -1, 512).unwrap();
        assert!((t - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let t = element_numeric(shift, 3, 512).unwrap();
        assert!(t.norm() < 1e-12);
    }

    #[test]
    fn numeric_oracle_agrees_at_small_offsets() {
        let p = fh();
        for n in [0i64, 1, -1, 5, -7] {
            let num = element_numeric(p, n, 1 << 12).unwrap();
            let exact = element(p, n).unwrap();
            assert!((num.re - exact).abs() < 1e-10, "n = {n}: {} vs {exact}", num.re);
            assert!(num.im.abs() < 1e-9);
        }
        assert!(element_numeric(p, 0, 128).is_err());
    }

    #[test]
    fn build_small_matrices() {
        let p = fh();
        let m = build_matrix(p, 2).unwrap();
        assert_eq!(m.get(0, 0), element(p, 0).unwrap());
        assert_eq!(m.get(0, 1), element(p, -1).unwrap());
        assert_eq!(m.get(1, 0), element(p, 1).unwrap());
        let shift = build_matrix(FHParams::new(0.0, -1.0).unwrap(), 4).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let expected = if k == j + 1 { -1.0 } else { 0.0 };
                assert_eq!(shift.get(j, k), expected);
            }
        }
        assert!(build_matrix(p, 1).is_err());
    }

    #[test]
    fn operator_on_geometric_vector() {
        let shift = FHParams::new(0.0, -1.0).unwrap();
        let eps = Complex64::new(0.3, 0.1);
        let v: Vec<Complex64> = (0..64).map(|j| eps.powu(j)).collect();
        let out = apply_operator(shift, &v, 16).unwrap();
        for j in 0..16 {
            assert!((out.values[j] + eps * v[j]).norm() < 1e-15);
        }
        let zero = vec![Complex64::new(0.0, 0.0); 40];
        let out = apply_operator(fh(), &zero, 10).unwrap();
        assert!(out.values.iter().all(|x| x.norm() == 0.0));
        assert!(apply_operator(fh(), &zero, 11).is_err());
    }
}
