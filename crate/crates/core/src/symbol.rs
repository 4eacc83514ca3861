//! The Fisher-Hartwig symbol `a(z) = (2 - z - 1/z)^alpha (-z)^beta`.
//!
//! On the unit circle `z = e^{i theta}` the symbol is
//! `(2 - 2 cos theta)^alpha e^{i beta (theta - pi)}`, real and positive at
//! `theta = pi`. Off the circle it continues as
//! `(z - 1)^{2 alpha} z^{beta - alpha} e^{-i (beta + alpha) pi}` with both
//! arguments taken in `[0, 2 pi)`, so the cuts of `(z - 1)` and `z` both lie
//! along the positive real axis.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FHParams {
    pub alpha: f64,
    pub beta: f64,
}

impl FHParams {
    /// Accepts any finite pair with `alpha > -1/2` (where the closed-form
    /// matrix elements are valid). Use [`FHParams::in_study_range`] to check
    /// `0 < alpha < |beta| < 1`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "alpha = {alpha}, beta = {beta} must be finite"
            )));
        }
        if alpha <= -0.5 {
            return Err(Error::InvalidParams(format!(
                "alpha = {alpha} must exceed -1/2"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn in_study_range(&self) -> bool {
        0.0 < self.alpha && self.alpha < self.beta.abs() && self.beta.abs() < 1.0
    }

    /// The parity partner `beta -> -beta` (symbol under `z -> 1/z`).
    pub fn reflected(&self) -> Self {
        Self {
            alpha: self.alpha,
            beta: -self.beta,
        }
    }

    /// `2 alpha + 1`, the algebraic decay exponent of the matrix elements.
    pub fn tail_exponent(&self) -> f64 {
        2.0 * self.alpha + 1.0
    }
}

/// Argument of `z` in `[0, 2 pi)`.
pub fn arg_0_2pi(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// A continued symbol value together with the factor arguments used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedValue {
    pub value: Complex64,
    /// `arg(z - 1)` in `[0, 2 pi)`.
    pub arg_z_minus_one: f64,
    /// `arg(z)` in `[0, 2 pi)`.
    pub arg_z: f64,
}

/// `a(e^{i theta})` for `theta` in `[0, 2 pi]`.
///
/// At `theta = 0` (and `2 pi`) the value is the limit `0` when `alpha > 0`;
/// for `alpha <= 0` the point is singular and an error is returned.
pub fn symbol_circle(params: FHParams, theta: f64) -> Result<Complex64> {
    if !(0.0..=TAU).contains(&theta) {
        return Err(Error::InvalidParams(format!(
            "theta = {theta} outside [0, 2 pi]"
        )));
    }
    if theta == 0.0 || theta == TAU {
        return if params.alpha > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::SingularEvaluation {
                alpha: params.alpha,
            })
        };
    }
    Ok(circle_unchecked(params, theta))
}

/// Symbol on the circle for `theta` strictly inside `(0, 2 pi)`.
pub(crate) fn circle_unchecked(params: FHParams, theta: f64) -> Complex64 {
    // 2 - 2 cos theta = (2 sin(theta/2))^2
    let base = 2.0 * (0.5 * theta).sin();
    let modulus = if params.alpha == 0.0 {
        1.0
    } else {
        base.powf(2.0 * params.alpha)
    };
    Complex64::from_polar(modulus, params.beta * (theta - PI))
}

/// One-sided limits of the symbol at `z = 1`: `(theta -> 0+, theta -> 2 pi-)`.
pub(crate) fn circle_limits_at_one(params: FHParams) -> Result<(Complex64, Complex64)> {
    if params.alpha > 0.0 {
        Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)))
    } else if params.alpha == 0.0 {
        Ok((
            Complex64::from_polar(1.0, -params.beta * PI),
            Complex64::from_polar(1.0, params.beta * PI),
        ))
    } else {
        Err(Error::SingularEvaluation {
            alpha: params.alpha,
        })
    }
}

/// Value used at a sampling node on the circle; at `theta = 0` the mean of
/// the one-sided limits (the Fourier-series value at a jump).
pub(crate) fn circle_sample(params: FHParams, theta: f64) -> Result<Complex64> {
    if theta <= 0.0 || theta >= TAU {
        let (right, left) = circle_limits_at_one(params)?;
        Ok(0.5 * (right + left))
    } else {
        Ok(circle_unchecked(params, theta))
    }
}

/// The analytic continuation `(z - 1)^{2 alpha} z^{beta - alpha} e^{-i (beta + alpha) pi}`.
pub fn symbol_analytic(params: FHParams, z: Complex64) -> Result<BranchedValue> {
    if z.norm() == 0.0 {
        return Err(Error::OnBranchCut(z));
    }
    if z.im == 0.0 && z.re > 0.0 {
        return Err(Error::OnBranchCut(z));
    }
    Ok(analytic_unchecked(params, z))
}

pub(crate) fn analytic_unchecked(params: FHParams, z: Complex64) -> BranchedValue {
    let FHParams { alpha, beta } = params;
    let zm1 = z - 1.0;
    let arg_zm1 = arg_0_2pi(zm1);
    let arg_z = arg_0_2pi(z);
    let ln_mod = 2.0 * alpha * zm1.norm().ln() + (beta - alpha) * z.norm().ln();
    let phase = 2.0 * alpha * arg_zm1 + (beta - alpha) * arg_z - (beta + alpha) * PI;
    BranchedValue {
        value: Complex64::from_polar(ln_mod.exp(), phase),
        arg_z_minus_one: arg_zm1,
        arg_z,
    }
}

/// `z a'(z) / a(z)` for the continued symbol.
pub(crate) fn log_derivative_z(params: FHParams, z: Complex64) -> Complex64 {
    2.0 * params.alpha * z / (z - 1.0) + (params.beta - params.alpha)
}

/// `m` samples of the symbol at `theta_k = 2 pi k / m`, with the limit value
/// at `theta = 0` in slot 0.
pub fn symbol_image(params: FHParams, m: usize) -> Result<Vec<Complex64>> {
    if m < 16 {
        return Err(Error::InvalidParams(format!("symbol_image needs m >= 16, got {m}")));
    }
    let (right, _) = circle_limits_at_one(params)?;
    let mut out = Vec::with_capacity(m);
    out.push(right);
    for k in 1..m {
        out.push(circle_unchecked(params, TAU * k as f64 / m as f64));
    }
    Ok(out)
}

const WINDING_MAX_SAMPLES: usize = 1 << 24;

/// Winding number of `a(e^{ip}) - eps` as `p` runs over `[0, 2 pi]`.
///
/// The phase is unwrapped over `m` uniform steps; `m` is doubled until
/// every step is below `pi / 2`.
pub fn winding_number(params: FHParams, eps: Complex64, m: usize) -> Result<i32> {
    let (right, left) = circle_limits_at_one(params)?;
    let scale = 1.0 + eps.norm();
    let mut m = m.max(16);
    loop {
        let mut total = 0.0;
        let mut max_step: f64 = 0.0;
        let mut min_dist = f64::INFINITY;
        let mut prev = right - eps;
        min_dist = min_dist.min(prev.norm());
        for k in 1..=m {
            let cur = if k == m {
                left - eps
            } else {
                circle_unchecked(params, TAU * k as f64 / m as f64) - eps
            };
            min_dist = min_dist.min(cur.norm());
            let step = (cur / prev).arg();
            max_step = max_step.max(step.abs());
            total += step;
            prev = cur;
        }
        if min_dist < 1e-13 * scale {
            return Err(Error::IllConditionedWinding { distance: min_dist });
        }
        if max_step < PI / 2.0 {
            let nu = total / TAU;
            if (nu - nu.round()).abs() > 1e-6 {
                // open curve (jump at z = 1 for alpha = 0 and non-integer beta)
                return Err(Error::IllConditionedWinding { distance: min_dist });
            }
            return Ok(nu.round() as i32);
        }
        if m >= WINDING_MAX_SAMPLES {
            return Err(Error::InsufficientSamples { m });
        }
        m *= 2;
    }
}

const NEWTON_MAX_ITER: usize = 200;

/// Solves `a(z_c) = eps` for the root outside the unit circle by damped
/// Newton iteration in `w = ln z`, keeping `arg z` inside `(0, 2 pi)`.
pub fn solve_zc(params: FHParams, eps: Complex64, z0: Complex64) -> Result<Complex64> {
    if z0.norm() == 0.0 || !z0.re.is_finite() || !z0.im.is_finite() {
        return Err(Error::InvalidParams(format!("bad initial guess {z0}")));
    }
    let target = 1e-12 * eps.norm().max(f64::MIN_POSITIVE);
    let mut arg = arg_0_2pi(z0);
    if arg == 0.0 {
        arg = 1e-6;
    }
    let mut w = Complex64::new(z0.norm().ln(), arg);
    let eval = |w: Complex64| {
        let z = w.exp();
        let a = analytic_unchecked(params, z).value;
        (z, a, a - eps)
    };
    let (mut z, mut a, mut f) = eval(w);
    let mut iterations = 0;
    while iterations < NEWTON_MAX_ITER {
        if f.norm() <= 1e-3 * target {
            break;
        }
        iterations += 1;
        let dfdw = a * log_derivative_z(params, z);
        if dfdw.norm() == 0.0 || !dfdw.re.is_finite() {
            break;
        }
        let step = -f / dfdw;
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-12 {
            let trial = w + step * lambda;
            if trial.im > 0.0 && trial.im < TAU {
                let (zt, at, ft) = eval(trial);
                if ft.norm() < f.norm() {
                    w = trial;
                    z = zt;
                    a = at;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            // no further decrease possible in floating point
            break;
        }
    }
    if !(f.norm() <= target) {
        return Err(Error::NewtonFailure {
            iterations,
            residual: f.norm(),
        });
    }
    if z.norm() < 1.0 - 1e-10 {
        return Err(Error::WrongRoot(z));
    }
    Ok(z)
}

/// Angle on the unit circle whose symbol value is nearest `eps` (dense scan).
pub fn nearest_circle_angle(params: FHParams, eps: Complex64, m: usize) -> f64 {
    let m = m.max(16);
    (1..m)
        .map(|k| {
            let theta = TAU * k as f64 / m as f64;
            (theta, (circle_unchecked(params, theta) - eps).norm())
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(t, _)| t)
        .unwrap_or(PI)
}

/// [`solve_zc`] seeded from the nearest point of the symbol curve, pushed
/// slightly outward.
pub fn solve_zc_from_curve(params: FHParams, eps: Complex64) -> Result<Complex64> {
    let theta = nearest_circle_angle(params, eps, 8192);
    let mut last = None;
    for radius in [1.0 + 1e-3, 1.01, 1.05, 1.2] {
        match solve_zc(params, eps, Complex64::from_polar(radius, theta)) {
            Ok(z) => return Ok(z),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}
