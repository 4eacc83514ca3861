//! Two-term large-`j` model of the eigenvector and the eigenvalue shift.
//!
//! Writing the Wiener-Hopf eigenvector as the convolution of `1/(z - z_c)`
//! with the algebraic tail of `psi_S` gives
//! `psi_j ~ A z_c^{-j-1} + B (j+1)^{-(2a+1)}` where
//!
//! ```text
//! A =  sin pi(a+b)/(pi eps) int_0^inf dmu e^{-mu} mu^{2a} / (1 - z_c e^{-mu})
//! B = -sin pi(a+b)/(pi eps) int_0^inf dmu e^{-mu} mu^{2a} / (1 - z_c e^{-mu/(j+1)})
//! ```
//!
//! Requiring the two terms to cancel near `j = N` fixes
//! `Im p = (2a+1) ln N / N + O(1/N)`, and with it the eigenvalue shift.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolver::{grid_eigenvalue, grid_momentum, GridDenominator};
use crate::quad::{integrate, QuadOptions};
use crate::specialfn::{gamma_real, sin_pi};
use crate::quasiparticle::p_from_eigenvalue;
use crate::symbol::{symbol_circle, FHParams};
use crate::{Error, Result};

/// Smallest admissible `|1 - z_c e^{-mu}|` on the integration path.
pub const KERNEL_GUARD: f64 = 1e-6;
/// Distance of `Re p` from 0 or `2 pi` below which the shift formula fails.
pub const ENDPOINT_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoTermModel {
    pub a: Complex64,
    pub b: Complex64,
    /// Index at which `B` was evaluated.
    pub b_index: usize,
    pub z_c: Complex64,
    pub alpha: f64,
    pub beta: f64,
}

impl TwoTermModel {
    pub fn new(params: FHParams, eps: Complex64, z_c: Complex64, b_index: usize) -> Result<Self> {
        Ok(Self {
            a: coeff_a(params, eps, z_c)?,
            b: coeff_b(params, eps, z_c, b_index)?,
            b_index,
            z_c,
            alpha: params.alpha,
            beta: params.beta,
        })
    }

    /// `A z_c^{-j-1}`.
    pub fn exponential(&self, j: usize) -> Complex64 {
        self.a * self.z_c.powf(-(j as f64) - 1.0)
    }

    /// `B (j+1)^{-(2a+1)}`.
    pub fn algebraic(&self, j: usize) -> Complex64 {
        self.b * ((j + 1) as f64).powf(-(2.0 * self.alpha + 1.0))
    }

    /// `|A z_c^{-N}| / |B N^{-(2a+1)}|`; near one when the terms interfere at
    /// the boundary.
    pub fn interference_ratio(&self, n: usize) -> f64 {
        self.exponential(n - 1).norm() / self.algebraic(n - 1).norm()
    }
}

/// `min_{mu >= 0} |1 - z e^{-mu}|`, in closed form.
fn min_kernel_modulus(z: Complex64) -> f64 {
    let (r, phi) = (z.norm(), z.arg());
    let c = phi.cos();
    if c <= 0.0 {
        1.0
    } else if c < r {
        phi.sin().abs()
    } else {
        (z - 1.0).norm()
    }
}

/// `int_0^inf dmu e^{-mu} mu^{2a} / (1 - z_c e^{-mu / scale})` with `mu = e^s`.
fn kernel_integral(alpha: f64, z_c: Complex64, scale: f64) -> Result<Complex64> {
    let min = min_kernel_modulus(z_c);
    if min < KERNEL_GUARD {
        return Err(Error::NearSingularKernel { min_modulus: min });
    }
    let power = 2.0 * alpha + 1.0;
    let lo = (1e-17f64).ln() / power;
    let hi = 50f64.ln();
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        max_intervals: 4000,
    };
    let r = integrate(
        |s| {
            let mu = s.exp();
            Complex64::from((-mu + power * s).exp()) / (1.0 - z_c * (-mu / scale).exp())
        },
        lo,
        hi,
        opts,
    )?;
    Ok(r.value)
}

fn prefactor(params: FHParams, eps: Complex64) -> Complex64 {
    sin_pi(params.alpha + params.beta) / (PI * eps)
}

/// Amplitude of the exponential term.
pub fn coeff_a(params: FHParams, eps: Complex64, z_c: Complex64) -> Result<Complex64> {
    if z_c.norm() <= 1.0 {
        return Err(Error::WrongRoot(z_c));
    }
    let pre = prefactor(params, eps);
    if pre == Complex64::new(0.0, 0.0) {
        return Ok(pre);
    }
    Ok(pre * kernel_integral(params.alpha, z_c, 1.0)?)
}

/// Amplitude of the algebraic term evaluated at index `j`.
pub fn coeff_b(params: FHParams, eps: Complex64, z_c: Complex64, j: usize) -> Result<Complex64> {
    if z_c.norm() <= 1.0 {
        return Err(Error::WrongRoot(z_c));
    }
    let pre = prefactor(params, eps);
    if pre == Complex64::new(0.0, 0.0) {
        return Ok(pre);
    }
    Ok(-pre * kernel_integral(params.alpha, z_c, (j + 1) as f64)?)
}

/// `A z_c^{-j-1} + B (j+1)^{-(2a+1)}`.
pub fn psi_two_term(model: &TwoTermModel, j: usize) -> Complex64 {
    model.exponential(j) + model.algebraic(j)
}

/// Convolution of `-z_c^{-k-1}` with the algebraic tail of `psi_S`:
/// `Gamma(2a+1) sin pi(a+b)/(pi eps z_c) sum_{k<=j} z_c^{k-j} (k+1)^{-(2a+1)}`.
pub fn convolution_sum(params: FHParams, eps: Complex64, z_c: Complex64, j: usize) -> Result<Complex64> {
    let power = 2.0 * params.alpha + 1.0;
    let g = gamma_real(power)?.value;
    let inv = 1.0 / z_c;
    // Horner in 1/z_c from k = 0 upwards
    let sum = (0..=j).fold(Complex64::new(0.0, 0.0), |acc, k| {
        acc * inv + ((k + 1) as f64).powf(-power)
    });
    // the fold produced sum_k (k+1)^{-power} z_c^{-(j-k)}
    Ok(g * prefactor(params, eps) / z_c * sum)
}

/// Leading term `(2a+1) ln N / N` of `Im p`.
pub fn predicted_im_p(alpha: f64, n: usize) -> f64 {
    let n = n as f64;
    (2.0 * alpha + 1.0) * n.ln() / n
}

/// `d eps / eps = (b + i a cot(p/2)) (2a+1) ln N / N`.
pub fn eigenvalue_shift(params: FHParams, p: Complex64, n: usize) -> Result<Complex64> {
    let re = p.re.rem_euclid(TAU);
    if re < ENDPOINT_GUARD || TAU - re < ENDPOINT_GUARD {
        return Err(Error::EndpointRegime { p });
    }
    let cot = 1.0 / (p.re / 2.0).tan();
    Ok(Complex64::new(params.beta, params.alpha * cot) * predicted_im_p(params.alpha, n))
}

/// `-Gamma(2a+1) sin pi(a+b) / (pi eps (j+1)^{2a+1})`.
pub fn tail_term(params: FHParams, eps: Complex64, j: usize) -> Result<Complex64> {
    let power = 2.0 * params.alpha + 1.0;
    let g = gamma_real(power)?.value;
    Ok(-g * prefactor(params, eps) * ((j + 1) as f64).powf(-power))
}

/// Measured and predicted relative eigenvalue shift for one label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftComparison {
    pub n: usize,
    pub l: usize,
    pub eigenvalue: Complex64,
    pub grid_value: Complex64,
    /// `(eps^l - a(e^{-i p_l})) / eps^l`.
    pub measured: Complex64,
    pub predicted: Complex64,
    /// `|measured - predicted| / |predicted|`.
    pub deviation: f64,
    /// Momentum from the root `z_c` of `a(z) = eps^l`.
    pub momentum: Complex64,
    /// `(eps^l - a(e^{-i Re p})) / eps^l`: the shift caused by `Im p` alone.
    pub measured_imag_only: Complex64,
    /// Formula evaluated at `Re p`, compared with `measured_imag_only`.
    pub deviation_imag_only: f64,
}

/// Compares the measured shift of `eigenvalue` (label `l`) with the formula.
pub fn shift_comparison(
    params: FHParams,
    eigenvalue: Complex64,
    n: usize,
    l: usize,
    grid: GridDenominator,
) -> Result<ShiftComparison> {
    let grid_value = grid_eigenvalue(params, l, n, grid)?;
    let p = Complex64::new(grid_momentum(l, n, grid), 0.0);
    let predicted = eigenvalue_shift(params, p, n)?;
    let measured = (eigenvalue - grid_value) / eigenvalue;
    let momentum = p_from_eigenvalue(params, eigenvalue, p.re, n)?;
    let base = symbol_circle(params, (TAU - momentum.re).rem_euclid(TAU))?;
    let measured_imag_only = (eigenvalue - base) / eigenvalue;
    let predicted_at_re = eigenvalue_shift(params, Complex64::new(momentum.re, 0.0), n)?;
    Ok(ShiftComparison {
        n,
        l,
        eigenvalue,
        grid_value,
        measured,
        predicted,
        deviation: (measured - predicted).norm() / predicted.norm(),
        momentum,
        measured_imag_only,
        deviation_imag_only: (measured_imag_only - predicted_at_re).norm() / predicted_at_re.norm(),
    })
}
