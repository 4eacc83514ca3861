//! Wiener-Hopf eigenvectors of the semi-infinite Toeplitz operator.
//!
//! For a winding number of -1 the generating function of the eigenvector is
//! `psi(z) = C exp(-G(z))` with `G(z) = ln(z - z_c) + S(z)`. Here `z_c` is the
//! root of `a(z) = eps` outside the unit disk and `S` is the integral along
//! the symbol's branch cut
//!
//! ```text
//! S(z) = 1/(2 pi i) int_1^inf dt/(t - z) ln[(x e^{-i phi} - eps)/(x e^{i phi} - eps)],
//! x(t) = (t-1)^{2a} t^{b-a},  phi = (a+b) pi.
//! ```
//!
//! With `t = 1 + e^u` the integrand is smooth on the whole real `u` line and
//! decays exponentially at both ends. A single evaluation uses adaptive
//! Gauss-Kronrod. Bulk evaluation on the unit circle uses a trapezoid rule in
//! `u` whose nodes do not depend on `z`.
//!
//! `S` is fixed only up to an additive constant. This module normalizes it so
//! that `S(1) = 0`, which makes `exp(-S)` equal to one at `z = 1`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::quad::{integrate, QuadOptions};
use crate::specialfn::sin_pi;
use crate::symbol::{solve_zc, solve_zc_from_curve, winding_number, FHParams};
use crate::{Error, Result};

/// Relative size below which the integrand tails are dropped.
const TAIL_CUTOFF: f64 = 1e-17;
/// Largest number of circle samples for coefficient extraction.
pub const MAX_SAMPLES: usize = 1 << 20;
/// Aliasing must stay below this fraction of the largest coefficient.
pub const ALIASING_RATIO: f64 = 1e-8;

/// The `z`-independent part of the cut integrand.
#[derive(Debug, Clone, Copy)]
struct CutIntegrand {
    params: FHParams,
    c_minus: Complex64,
    c_plus: Complex64,
    /// `S` vanishes identically when `sin pi(a+b) = 0`.
    trivial: bool,
}

impl CutIntegrand {
    fn new(params: FHParams, eps: Complex64) -> Result<Self> {
        let trivial = sin_pi(params.alpha + params.beta) == 0.0;
        if !trivial {
            if params.alpha <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "the cut integral needs alpha > 0 (alpha = {})",
                    params.alpha
                )));
            }
            if params.alpha + params.beta >= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "the cut integral needs alpha + beta < 0 (got {})",
                    params.alpha + params.beta
                )));
            }
        }
        if eps.norm() == 0.0 {
            return Err(Error::InvalidParams("eps = 0 has no Wiener-Hopf eigenvector".into()));
        }
        let phi = (params.alpha + params.beta) * PI;
        let out = Self {
            params,
            c_minus: Complex64::from_polar(1.0, -phi) / eps,
            c_plus: Complex64::from_polar(1.0, phi) / eps,
            trivial,
        };
        if !trivial {
            out.check_branch()?;
        }
        Ok(out)
    }

    /// `x(t)` with `t = 1 + e^u`.
    fn x_of_u(&self, u: f64) -> f64 {
        let FHParams { alpha, beta } = self.params;
        (2.0 * alpha * u + (beta - alpha) * u.exp().ln_1p()).exp()
    }

    /// Largest `x` on the path; attained at `t = (a-b)/(-a-b)`.
    fn x_max(&self) -> f64 {
        let FHParams { alpha, beta } = self.params;
        let t = (alpha - beta) / (-alpha - beta);
        (t - 1.0).powf(2.0 * alpha) * t.powf(beta - alpha)
    }

    /// The principal logarithms equal the continuously tracked branch
    /// (which starts from 0 where `x -> 0`) unless `1 - x c` crosses the
    /// negative axis, i.e. `c` is real positive and reached by `1/x`.
    fn check_branch(&self) -> Result<()> {
        let xm = self.x_max();
        for c in [self.c_minus, self.c_plus] {
            if c.im.abs() <= 1e-14 * c.norm() && c.re > 0.0 && xm * c.re >= 1.0 {
                return Err(Error::BranchAmbiguity);
            }
        }
        Ok(())
    }

    /// `ln[(x e^{-i phi} - eps)/(x e^{i phi} - eps)]` at `t = 1 + e^u`.
    fn log_ratio(&self, u: f64) -> Complex64 {
        let x = self.x_of_u(u);
        (1.0 - self.c_minus * x).ln() - (1.0 - self.c_plus * x).ln()
    }

    /// Lower and upper cut-offs in `u`.
    fn range(&self) -> (f64, f64) {
        let FHParams { alpha, beta } = self.params;
        // near t = 1 the integrand is O(e^{2a u}) (worst case z = 1)
        let lo = (TAIL_CUTOFF.ln() / (2.0 * alpha)).max(-4000.0);
        // at infinity the leading term e^{(a+b)u} is integrated in closed form;
        // the cut-off only has to make the O(x^2) remainder negligible
        let s = -(alpha + beta);
        let hi = ((TAIL_CUTOFF * 2.0 * s).ln() / (-2.0 * s)).clamp(40.0, 4000.0);
        (lo, hi)
    }

    /// Closed-form `int_hi^inf` of the leading large-`u` term.
    fn upper_tail(&self, hi: f64) -> Complex64 {
        let s = self.params.alpha + self.params.beta;
        let x = self.x_of_u(hi);
        // ln(1 - c_- x) - ln(1 - c_+ x) ~ (c_+ - c_-) x and x ~ e^{s u}
        (self.c_plus - self.c_minus) * x / (-s)
    }
}

/// `dt/(t - z)` with `t = 1 + e^u` is `du / (1 + (1 - z) e^{-u})`.
fn kernel(u: f64, z: Complex64) -> Complex64 {
    1.0 / (1.0 + (1.0 - z) * (-u).exp())
}

fn check_z(z: Complex64) -> Result<()> {
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidParams(format!("|z| = {} exceeds 1", z.norm())));
    }
    if z.im == 0.0 && z.re > 1.0 {
        return Err(Error::OnBranchCut(z));
    }
    Ok(())
}

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, TAU)
}

/// Cut integral `S(z)` by adaptive Gauss-Kronrod in `u = ln(t - 1)`
/// (absolute tolerance 1e-11). Not normalized.
pub fn s_integral(params: FHParams, eps: Complex64, z: Complex64) -> Result<Complex64> {
    check_z(z)?;
    let cut = CutIntegrand::new(params, eps)?;
    s_adaptive(&cut, z)
}

fn s_adaptive(cut: &CutIntegrand, z: Complex64) -> Result<Complex64> {
    if cut.trivial {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (lo, hi) = cut.range();
    let opts = QuadOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-13,
        max_intervals: 20_000,
    };
    let body = integrate(|u| cut.log_ratio(u) * kernel(u, z), lo, hi, opts)?;
    // the kernel tends to 1 at large u
    Ok((body.value + cut.upper_tail(hi)) / two_pi_i())
}

/// Trapezoid rule in `u` for many evaluations of `S`.
///
/// The integrand is analytic in a strip of half-width about `pi/2` around the
/// real `u` axis for every `|z| <= 1`, so the error falls like `e^{-pi^2/h}`.
/// The step is halved until two successive rules agree to 1e-13 at a set of
/// probe points including `z = 1` and points next to it.
#[derive(Debug, Clone)]
pub struct SIntegralRule {
    cut: CutIntegrand,
    /// `e^{-u_k}`.
    decay: Vec<f64>,
    /// `h * log_ratio(u_k)`.
    weighted: Vec<Complex64>,
    tail: Complex64,
    pub step: f64,
}

impl SIntegralRule {
    pub fn new(params: FHParams, eps: Complex64) -> Result<Self> {
        let cut = CutIntegrand::new(params, eps)?;
        let mut rule = Self::with_step(cut, 0.5);
        if cut.trivial {
            return Ok(rule);
        }
        let probes = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::from_polar(1.0, 1e-4),
            Complex64::from_polar(1.0, -0.3),
            Complex64::from_polar(1.0, 2.0),
        ];
        for _ in 0..6 {
            let finer = Self::with_step(cut, rule.step / 2.0);
            let diff = probes
                .iter()
                .map(|&z| (finer.eval_raw(z) - rule.eval_raw(z)).norm())
                .fold(0.0, f64::max);
            rule = finer;
            if diff < 1e-13 {
                return Ok(rule);
            }
        }
        Err(Error::Quadrature {
            achieved: f64::NAN,
            requested: 1e-13,
        })
    }

    fn with_step(cut: CutIntegrand, step: f64) -> Self {
        let (lo, hi) = cut.range();
        let count = ((hi - lo) / step).ceil() as usize;
        let step = (hi - lo) / count as f64;
        let nodes: Vec<f64> = (0..=count).map(|k| lo + step * k as f64).collect();
        let weighted = if cut.trivial {
            Vec::new()
        } else {
            nodes
                .iter()
                .enumerate()
                .map(|(k, &u)| {
                    let w = if k == 0 || k == count { 0.5 } else { 1.0 };
                    cut.log_ratio(u) * (w * step)
                })
                .collect()
        };
        let tail = if cut.trivial {
            Complex64::new(0.0, 0.0)
        } else {
            cut.upper_tail(hi)
        };
        Self {
            cut,
            decay: nodes.iter().map(|u| (-u).exp()).collect(),
            weighted,
            tail,
            step,
        }
    }

    fn eval_raw(&self, z: Complex64) -> Complex64 {
        if self.cut.trivial {
            return Complex64::new(0.0, 0.0);
        }
        let one_minus_z = 1.0 - z;
        let body: Complex64 = self
            .decay
            .iter()
            .zip(&self.weighted)
            .map(|(&d, &w)| w / (1.0 + one_minus_z * d))
            .sum();
        (body + self.tail) / two_pi_i()
    }

    /// `S(z)` for `|z| <= 1`, `z` not on `(1, inf)`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_z(z)?;
        Ok(self.eval_raw(z))
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.decay.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decay.is_empty()
    }
}

/// `G(z) = ln(z - z_c) + S(z)`, principal logarithm, `S` unnormalized.
pub fn g_plus(params: FHParams, eps: Complex64, z_c: Complex64, z: Complex64) -> Result<Complex64> {
    Ok((z - z_c).ln() + s_integral(params, eps, z)?)
}

/// Refuses eigenvalues whose winding number is not -1.
pub fn require_winding_minus_one(params: FHParams, eps: Complex64) -> Result<()> {
    let nu = winding_number(params, eps, 4096)?;
    if nu != -1 {
        return Err(Error::WindingMismatch { nu });
    }
    Ok(())
}

/// Diagnostics of a coefficient extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionInfo {
    /// Number of circle samples.
    pub samples: usize,
    /// Estimated aliasing error on each returned coefficient.
    pub aliasing: f64,
    /// Trapezoid step of the cut integral.
    pub quad_step: f64,
}

/// Taylor coefficients `0..count` of an analytic function from its values on
/// the unit circle, doubling the sample count until aliasing is acceptable.
fn taylor_coefficients<F>(count: usize, f: F) -> Result<(Vec<Complex64>, usize, f64)>
where
    F: Fn(Complex64) -> Complex64 + Sync + Send,
{
    let mut m = (32 * count).next_power_of_two().max(64);
    let mut values = crate::par::map_range(m, |k| f(Complex64::from_polar(1.0, TAU * k as f64 / m as f64)));
    loop {
        let mut spectrum = values.clone();
        FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut spectrum);
        let scale = 1.0 / m as f64;
        spectrum.iter_mut().for_each(|c| *c *= scale);
        let max = spectrum[..count].iter().map(|c| c.norm()).fold(0.0, f64::max);
        // the top quarter holds aliased negative powers and the tail beyond M/2;
        // the folded-back error on the low coefficients is of the same size
        let aliasing = 2.0 * spectrum[3 * m / 4..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let threshold = ALIASING_RATIO * max;
        if aliasing <= threshold {
            spectrum.truncate(count);
            return Ok((spectrum, m, aliasing));
        }
        if m >= MAX_SAMPLES {
            return Err(Error::Aliasing {
                estimate: aliasing,
                threshold,
                m,
            });
        }
        // the old samples are the even samples of the doubled grid
        let odd = crate::par::map_range(m, |k| f(Complex64::from_polar(1.0, PI * (2 * k + 1) as f64 / m as f64)));
        values = values.into_iter().zip(odd).flat_map(|(e, o)| [e, o]).collect();
        m *= 2;
    }
}

/// Wiener-Hopf eigenvector coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WHEigenvector {
    pub params: FHParams,
    pub eps: Complex64,
    pub z_c: Complex64,
    /// Coefficients of `exp(-(S(z) - S(1))) / (z - z_c)`.
    pub coeffs: Vec<Complex64>,
    /// Matching constant; 1 until fitted against an exact vector.
    pub c: Complex64,
    pub info: ExtractionInfo,
}

impl WHEigenvector {
    /// `C psi_j`.
    pub fn scaled(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|x| x * self.c).collect()
    }
}

/// Root of `a(z) = eps` outside the disk, seeded near `seed` when given.
pub fn find_zc(params: FHParams, eps: Complex64, seed: Option<Complex64>) -> Result<Complex64> {
    match seed {
        Some(z0) => solve_zc(params, eps, z0).or_else(|_| solve_zc_from_curve(params, eps)),
        None => solve_zc_from_curve(params, eps),
    }
}

/// Coefficients `j = 0..j_max` of `exp(-G(z))`.
pub fn psi_wh_coeffs(
    params: FHParams,
    eps: Complex64,
    j_max: usize,
    zc_seed: Option<Complex64>,
) -> Result<WHEigenvector> {
    if j_max < 8 {
        return Err(Error::InvalidParams(format!("j_max = {j_max} must be >= 8")));
    }
    require_winding_minus_one(params, eps)?;
    let z_c = find_zc(params, eps, zc_seed)?;
    if z_c.norm() <= 1.0 {
        return Err(Error::WrongRoot(z_c));
    }
    let rule = SIntegralRule::new(params, eps)?;
    let s1 = rule.eval_raw(Complex64::new(1.0, 0.0));
    let (coeffs, samples, aliasing) =
        taylor_coefficients(j_max, |z| (s1 - rule.eval_raw(z)).exp() / (z - z_c))?;
    Ok(WHEigenvector {
        params,
        eps,
        z_c,
        coeffs,
        c: Complex64::new(1.0, 0.0),
        info: ExtractionInfo {
            samples,
            aliasing,
            quad_step: rule.step,
        },
    })
}

/// Coefficients `j = 0..j_max` of `exp(-(S(z) - S(1)))`.
pub fn psi_s_coeffs(params: FHParams, eps: Complex64, j_max: usize) -> Result<(Vec<Complex64>, ExtractionInfo)> {
    if j_max < 8 {
        return Err(Error::InvalidParams(format!("j_max = {j_max} must be >= 8")));
    }
    require_winding_minus_one(params, eps)?;
    let rule = SIntegralRule::new(params, eps)?;
    let s1 = rule.eval_raw(Complex64::new(1.0, 0.0));
    let (coeffs, samples, aliasing) = taylor_coefficients(j_max, |z| (s1 - rule.eval_raw(z)).exp())?;
    Ok((
        coeffs,
        ExtractionInfo {
            samples,
            aliasing,
            quad_step: rule.step,
        },
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub j: usize,
    pub j_frac: f64,
    pub abs_err: f64,
    /// `|psi_j / (C psi^WH_j) - 1|`; `NaN` where `|C psi^WH_j| <= 1e-14`.
    pub rel_err: f64,
    pub abs_exact: f64,
    pub abs_wh: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub c: Complex64,
    pub window: (usize, usize),
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    /// Largest absolute error over rows with `j_frac <= limit`.
    pub fn max_abs_err_up_to(&self, limit: f64) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.j_frac <= limit)
            .map(|r| r.abs_err)
            .fold(0.0, f64::max)
    }

    /// Relative error at the row nearest `j_frac`.
    pub fn rel_err_at(&self, j_frac: f64) -> f64 {
        self.rows
            .iter()
            .min_by(|a, b| (a.j_frac - j_frac).abs().total_cmp(&(b.j_frac - j_frac).abs()))
            .map(|r| r.rel_err)
            .unwrap_or(f64::NAN)
    }
}

/// Least-squares `C` over `window` (inclusive), then per-`j` errors of
/// `C psi^WH` against `exact`.
pub fn compare_with_exact(
    wh: &WHEigenvector,
    exact: &[Complex64],
    window: (usize, usize),
) -> Result<ComparisonReport> {
    let n = exact.len();
    if n < 2 || wh.coeffs.len() < n {
        return Err(Error::Length(format!(
            "{} Wiener-Hopf coefficients for an exact vector of length {n}",
            wh.coeffs.len()
        )));
    }
    let (lo, hi) = window;
    if lo > hi || hi >= n {
        return Err(Error::BadWindow {
            j: lo,
            big_j: hi,
            reason: format!("window must lie in [0, {}]", n - 1),
        });
    }
    let (num, den) = (lo..=hi).fold((Complex64::new(0.0, 0.0), 0.0), |(num, den), j| {
        (num + wh.coeffs[j].conj() * exact[j], den + wh.coeffs[j].norm_sqr())
    });
    if den == 0.0 {
        return Err(Error::BadWindow {
            j: lo,
            big_j: hi,
            reason: "Wiener-Hopf coefficients vanish on the window".into(),
        });
    }
    let c = num / den;
    let rows = (0..n)
        .map(|j| {
            let model = c * wh.coeffs[j];
            let rel_err = if model.norm() > 1e-14 {
                (exact[j] / model - 1.0).norm()
            } else {
                f64::NAN
            };
            ComparisonRow {
                j,
                j_frac: j as f64 / (n - 1) as f64,
                abs_err: (model - exact[j]).norm(),
                rel_err,
                abs_exact: exact[j].norm(),
                abs_wh: model.norm(),
            }
        })
        .collect();
    Ok(ComparisonReport {
        c,
        window,
        rows,
    })
}

/// Default matching window `[floor(0.2 N), floor(0.5 N)]`.
pub fn default_window(n: usize) -> (usize, usize) {
    ((0.2 * n as f64).floor() as usize, (0.5 * n as f64).floor() as usize)
}

/// Exact factorization of `K(z) = z^{-1} - eps` for the pure shift symbol
/// `a(z) = 1/z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftFactorization {
    pub eps: Complex64,
    /// `K+(z) = 1 - eps z` as `[1, -eps]`.
    pub k_plus: Vec<Complex64>,
    /// `K-(z) = 1`.
    pub k_minus: Vec<Complex64>,
    /// `psi_j = eps^j` for `j < len` (with `C = 1`).
    pub psi: Vec<Complex64>,
}

/// `K = K+/(z K-)` with `K+ = 1 - eps z`, `K- = 1`, and `psi_j = eps^j`.
///
/// This is the factorization for the symbol `1/z`. The `(a, b) = (0, -1)`
/// member of the family is `-1/z`, whose eigenvector is `(-eps)^j`.
pub fn shift_example_factorization(eps: Complex64, len: usize) -> Result<ShiftFactorization> {
    if eps.norm() >= 1.0 {
        return Err(Error::EigenvalueOutsideDisk(eps.norm()));
    }
    let mut psi = Vec::with_capacity(len);
    let mut term = Complex64::new(1.0, 0.0);
    for _ in 0..len {
        psi.push(term);
        term *= eps;
    }
    Ok(ShiftFactorization {
        eps,
        k_plus: vec![Complex64::new(1.0, 0.0), -eps],
        k_minus: vec![Complex64::new(1.0, 0.0)],
        psi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::analytic_unchecked;

    fn fh() -> FHParams {
        FHParams::new(1.0 / 3.0, -0.5).unwrap()
    }

    fn study_eps() -> Complex64 {
        // a point strictly inside the curve near p = pi/2
        let p = FHParams::new(1.0 / 3.0, -0.5).unwrap();
        analytic_unchecked(p, Complex64::from_polar(1.03, -PI / 2.0 + TAU)).value
    }

    #[test]
    fn shift_symbol_has_trivial_cut() {
        let shift = FHParams::new(0.0, -1.0).unwrap();
        let eps = Complex64::new(0.3, 0.0);
        assert_eq!(s_integral(shift, eps, Complex64::new(0.2, 0.1)).unwrap(), Complex64::new(0.0, 0.0));
        let (c, _) = psi_s_coeffs(shift, eps, 16).unwrap();
        assert!((c[0] - 1.0).norm() < 1e-14);
        assert!(c[1..].iter().all(|x| x.norm() < 1e-14));
    }

    #[test]
    fn shift_coefficients_are_geometric() {
        let shift = FHParams::new(0.0, -1.0).unwrap();
        let eps = Complex64::new(0.3, 0.0);
        let wh = psi_wh_coeffs(shift, eps, 32, None).unwrap();
        assert!((wh.z_c + 1.0 / eps).norm() < 1e-12);
        let c0 = wh.coeffs[0];
        for (j, c) in wh.coeffs.iter().enumerate() {
            assert!((c / c0 - (-eps).powu(j as u32)).norm() < 1e-12, "j = {j}");
        }
    }

    #[test]
    fn shift_factorization() {
        let f = shift_example_factorization(Complex64::new(0.5, 0.0), 6).unwrap();
        assert!((f.psi[5] - 0.5f64.powi(5)).norm() < 1e-15);
        let f0 = shift_example_factorization(Complex64::new(0.0, 0.0), 3).unwrap();
        assert_eq!(f0.psi[1], Complex64::new(0.0, 0.0));
        assert_eq!(f0.k_plus[1], Complex64::new(0.0, 0.0));
        assert!(shift_example_factorization(Complex64::new(1.0, 0.0), 3).is_err());
    }

    #[test]
    fn rule_matches_adaptive() {
        let eps = study_eps();
        let rule = SIntegralRule::new(fh(), eps).unwrap();
        for z in [
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.3, 0.4),
            Complex64::from_polar(1.0, 0.01),
            Complex64::new(1.0, 0.0),
        ] {
            let a = s_integral(fh(), eps, z).unwrap();
            let b = rule.eval(z).unwrap();
            assert!((a - b).norm() < 1e-10, "z = {z}: {a} vs {b}");
        }
    }

    /// `G(z)` from the unit-circle integral of `ln[z'(a(z') - eps)]`, with the
    /// logarithm continued along the circle.
    fn g_contour(params: FHParams, eps: Complex64, z: Complex64) -> Complex64 {
        let m = 1 << 14;
        let f = |th: f64| {
            let w = Complex64::from_polar(1.0, th);
            w * (crate::symbol::circle_sample(params, th).unwrap() - eps)
        };
        let mut phases = Vec::with_capacity(m + 1);
        let mut acc = f(0.0).arg();
        phases.push(acc);
        let mut prev = f(0.0);
        for k in 1..=m {
            let cur = f(TAU * k as f64 / m as f64);
            acc += (cur / prev).arg();
            phases.push(acc);
            prev = cur;
        }
        let log_at = |th: f64| {
            let v = f(th);
            let pos = th / TAU * m as f64;
            let k = (pos.floor() as usize).min(m - 1);
            let frac = pos - k as f64;
            let guess = phases[k] * (1.0 - frac) + phases[k + 1] * frac;
            let a = v.arg();
            Complex64::new(v.norm().ln(), a + TAU * ((guess - a) / TAU).round())
        };
        let opts = QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-13,
            max_intervals: 20_000,
        };
        let r = integrate(
            |th| {
                let w = Complex64::from_polar(1.0, th);
                log_at(th) * w / (w - z)
            },
            0.0,
            TAU,
            opts,
        )
        .unwrap();
        r.value / TAU
    }

    #[test]
    fn cut_integral_matches_contour_integral() {
        let eps = study_eps();
        let zc = find_zc(fh(), eps, None).unwrap();
        let z = Complex64::new(-0.5, 0.0);
        let w = Complex64::new(0.0, 0.0);
        let lhs = g_contour(fh(), eps, z) - g_contour(fh(), eps, w);
        let rhs = g_plus(fh(), eps, zc, z).unwrap() - g_plus(fh(), eps, zc, w).unwrap();
        // compare modulo 2 pi i
        let d = lhs - rhs;
        let d = Complex64::new(d.re, d.im - TAU * (d.im / TAU).round());
        assert!(d.norm() < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn taylor_series_consistency() {
        let eps = study_eps();
        let wh = psi_wh_coeffs(fh(), eps, 256, None).unwrap();
        let z = Complex64::new(0.5, 0.0);
        let series: Complex64 = wh.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
        let s1 = s_integral(fh(), eps, Complex64::new(1.0, 0.0)).unwrap();
        let direct = (s1 - s_integral(fh(), eps, z).unwrap()).exp() / (z - wh.z_c);
        assert!((series - direct).norm() < 4.0 * wh.info.aliasing.max(1e-12), "{series} vs {direct} ({:?})", wh.info);
    }

    #[test]
    fn refuses_positive_winding() {
        let p = FHParams::new(1.0 / 3.0, 0.5).unwrap();
        let eps = analytic_unchecked(p, Complex64::from_polar(0.97, 2.0)).value;
        assert!(matches!(
            psi_wh_coeffs(p, eps, 16, None),
            Err(Error::WindingMismatch { nu: 1 })
        ));
    }

    #[test]
    fn comparison_with_itself() {
        let eps = study_eps();
        let wh = psi_wh_coeffs(fh(), eps, 64, None).unwrap();
        let exact: Vec<Complex64> = wh.coeffs[..40].iter().map(|c| c * 2.5).collect();
        let rep = compare_with_exact(&wh, &exact, (8, 20)).unwrap();
        assert!((rep.c - 2.5).norm() < 1e-12);
        assert!(rep.rows.iter().all(|r| r.abs_err < 1e-12));
        let rep = compare_with_exact(&wh, &wh.coeffs[..40], (8, 20)).unwrap();
        assert!((rep.c - 1.0).norm() < 1e-12);
    }
}
