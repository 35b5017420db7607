// SPDX-License-Identifier: Apache-2.0

//! Gap extraction from contrast decay, power-law regression and comb spectra.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::observables::{MeanFieldSeries, TimeSeriesRecord};

/// Fraction of the initial C − 1 below which the automatic window opens.
pub const WINDOW_DROP: f64 = 0.8;
/// Latest automatic window start (τ): the window opens here if the contrast
/// has not yet dropped by `WINDOW_DROP`.
pub const WINDOW_LATEST_START: f64 = 10.0;
/// Window closes once C − 1 falls below this many standard errors.
pub const WINDOW_END_SIGMAS: f64 = 3.0;
pub const MIN_FIT_POINTS: usize = 20;
pub const DEFAULT_PROMINENCE: f64 = 10.0;

fn t95(dof: usize) -> f64 {
    StudentsT::new(0.0, 1.0, dof.max(1) as f64)
        .expect("valid t distribution")
        .inverse_cdf(0.975)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FitWindow {
    /// Opens when C − 1 < 0.8 (C0 − 1) or at τ = 10, whichever is first;
    /// closes when C − 1 < 3σ or at the end of the record.
    Auto,
    Range { start: f64, end: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapFit {
    /// Λ in units of κ/2 per τ (the rate in C − 1 = A e^{−Λτ}).
    pub lambda: f64,
    pub amplitude: f64,
    /// Standard error of Λ from the fit covariance.
    pub lambda_se: f64,
    /// 95% half-widths.
    pub lambda_ci: f64,
    pub amplitude_ci: f64,
    pub window: (f64, f64),
    pub points: usize,
    /// √(Σ r²) of the weighted residuals.
    pub residual_norm: f64,
    pub reduced_chi2: f64,
    pub warning: Option<String>,
}

impl GapFit {
    pub fn ci_excludes_zero(&self) -> bool {
        self.lambda - self.lambda_ci > 0.0
    }
}

fn window_bounds(tau: &[f64], c: &[f64], se: &[f64], window: FitWindow) -> (f64, f64) {
    match window {
        FitWindow::Range { start, end } => (start, end),
        FitWindow::Auto => {
            let c0 = c[0] - 1.0;
            let start = tau
                .iter()
                .zip(c)
                .find(|(&t, &ci)| ci - 1.0 < WINDOW_DROP * c0 || t >= tau[0] + WINDOW_LATEST_START)
                .map_or(tau[0], |(t, _)| *t);
            let end = tau
                .iter()
                .zip(c.iter().zip(se))
                .find(|(&t, (&ci, &s))| t > start && s > 0.0 && ci - 1.0 < WINDOW_END_SIGMAS * s)
                .map_or(*tau.last().unwrap(), |(t, _)| *t);
            (start, end)
        }
    }
}

/// Weighted 2-parameter Levenberg-Marquardt on y = A e^{−Λx}.
fn lm_exponential(x: &[f64], y: &[f64], w: &[f64], mut a: f64, mut lam: f64) -> (f64, f64, [[f64; 2]; 2], f64) {
    let chi2 = |a: f64, lam: f64| -> f64 {
        x.iter()
            .zip(y)
            .zip(w)
            .map(|((xi, yi), wi)| wi * (yi - a * (-lam * xi).exp()).powi(2))
            .sum()
    };
    let normal = |a: f64, lam: f64| {
        let mut jtj = [[0.0; 2]; 2];
        let mut jtr = [0.0; 2];
        for ((xi, yi), wi) in x.iter().zip(y).zip(w) {
            let e = (-lam * xi).exp();
            let j = [e, -a * xi * e];
            let r = yi - a * e;
            for p in 0..2 {
                jtr[p] += wi * j[p] * r;
                for q in 0..2 {
                    jtj[p][q] += wi * j[p] * j[q];
                }
            }
        }
        (jtj, jtr)
    };
    let mut mu = 1e-3;
    let mut current = chi2(a, lam);
    for _ in 0..200 {
        let (jtj, jtr) = normal(a, lam);
        let m00 = jtj[0][0] * (1.0 + mu);
        let m11 = jtj[1][1] * (1.0 + mu);
        let det = m00 * m11 - jtj[0][1] * jtj[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let da = (m11 * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let dl = (m00 * jtr[1] - jtj[1][0] * jtr[0]) / det;
        let trial = chi2(a + da, lam + dl);
        if trial <= current {
            let converged = (da.abs() <= 1e-14 * a.abs().max(1e-300)) && (dl.abs() <= 1e-14 * lam.abs().max(1e-300))
                || (current - trial) <= 1e-15 * current;
            a += da;
            lam += dl;
            current = trial;
            mu = (mu * 0.3).max(1e-12);
            if converged {
                break;
            }
        } else {
            mu *= 10.0;
            if mu > 1e12 {
                break;
            }
        }
    }
    let (jtj, _) = normal(a, lam);
    let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
    let cov = [[jtj[1][1] / det, -jtj[0][1] / det], [-jtj[1][0] / det, jtj[0][0] / det]];
    (a, lam, cov, current)
}

/// Fits C(τ) − 1 = A e^{−Λτ}. `se` are per-point standard errors; if any is
/// non-positive the fit is unweighted.
pub fn fit_gap_series(tau: &[f64], c: &[f64], se: &[f64], window: FitWindow) -> Result<GapFit> {
    if tau.len() != c.len() || tau.len() != se.len() {
        return Err(Error::ParameterDomain("series lengths differ".into()));
    }
    if tau.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!("{} points, need {MIN_FIT_POINTS}", tau.len())));
    }
    let weighted = se.iter().all(|s| *s > 0.0);
    if weighted && !c.iter().zip(se).any(|(ci, s)| ci - 1.0 > WINDOW_END_SIGMAS * s) {
        return Err(Error::NoSignal("C − 1 never exceeds 3σ".into()));
    }
    let (start, end) = window_bounds(tau, c, se, window);
    let idx: Vec<usize> = (0..tau.len()).filter(|&i| tau[i] >= start && tau[i] <= end).collect();
    if idx.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} points in window [{start}, {end}], need {MIN_FIT_POINTS}",
            idx.len()
        )));
    }
    // Shift time to the window start for conditioning.
    let x: Vec<f64> = idx.iter().map(|&i| tau[i] - start).collect();
    let y: Vec<f64> = idx.iter().map(|&i| c[i] - 1.0).collect();
    let w: Vec<f64> = idx.iter().map(|&i| if weighted { 1.0 / (se[i] * se[i]) } else { 1.0 }).collect();

    // Log-linear starting point from points clearly above noise.
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, &i) in idx.iter().enumerate() {
        let s = if weighted { se[i] } else { 0.0 };
        if y[k] > WINDOW_END_SIGMAS * s && y[k] > 0.0 {
            let ly = y[k].ln();
            let wk = if weighted { (y[k] / s).powi(2) } else { 1.0 };
            sw += wk;
            sx += wk * x[k];
            sy += wk * ly;
            sxx += wk * x[k] * x[k];
            sxy += wk * x[k] * ly;
        }
    }
    let den = sw * sxx - sx * sx;
    if !(sw > 0.0) || den <= 0.0 {
        return Err(Error::NoSignal("no points above noise in the fit window".into()));
    }
    let slope = (sw * sxy - sx * sy) / den;
    let icpt = (sy - slope * sx) / sw;

    let (a0, lam, cov, chi2) = lm_exponential(&x, &y, &w, icpt.exp(), -slope);
    let n = x.len();
    let dof = n - 2;
    let reduced = chi2 / dof as f64;
    // Unweighted fits estimate the noise from the residuals; weighted fits
    // inflate the covariance only when the scatter exceeds the stated errors.
    let scale = if weighted { reduced.max(1.0) } else { reduced };
    let q = t95(dof);
    let lambda_se = (cov[1][1] * scale).sqrt();
    let lambda_ci = q * lambda_se;
    if !(lam > 0.0) || !lambda_ci.is_finite() {
        return Err(Error::NoSignal(format!("fitted Λ = {lam:e} is not a decay")));
    }
    // Back to τ = 0: A = A0 e^{Λ·start}.
    let growth = (lam * start).exp();
    let amplitude = a0 * growth;
    let var_a = growth * growth
        * (cov[0][0] + 2.0 * a0 * start * cov[0][1] + (a0 * start).powi(2) * cov[1][1])
        * scale;
    let amplitude_ci = q * var_a.sqrt();

    let residuals: Vec<f64> = x
        .iter()
        .zip(&y)
        .zip(&w)
        .map(|((xi, yi), wi)| (yi - a0 * (-lam * xi).exp()) * wi.sqrt())
        .collect();
    let warning = runs_warning(&residuals);
    Ok(GapFit {
        lambda: lam,
        amplitude,
        lambda_se,
        lambda_ci,
        amplitude_ci,
        window: (start, end),
        points: n,
        residual_norm: chi2.sqrt(),
        reduced_chi2: reduced,
        warning,
    })
}

/// Wald-Wolfowitz runs test on residual signs; flags systematic structure.
fn runs_warning(r: &[f64]) -> Option<String> {
    let pos = r.iter().filter(|v| **v > 0.0).count() as f64;
    let neg = r.iter().filter(|v| **v < 0.0).count() as f64;
    let n = pos + neg;
    if pos == 0.0 || neg == 0.0 {
        return None;
    }
    let runs = 1 + r
        .iter()
        .filter(|v| **v != 0.0)
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|w| (*w[0] > 0.0) != (*w[1] > 0.0))
        .count();
    let mean = 2.0 * pos * neg / n + 1.0;
    let var = (mean - 1.0) * (mean - 2.0) / (n - 1.0);
    let z = (runs as f64 - mean) / var.sqrt();
    (z < -3.0).then(|| format!("residuals show systematic structure ({runs} sign runs, expected {mean:.1})"))
}

/// Gap fit on the contrast column of a record.
pub fn fit_gap(record: &TimeSeriesRecord, window: FitWindow) -> Result<GapFit> {
    fit_gap_series(&record.taus(), &record.contrasts(), &record.contrast_errors(), window)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    /// Exponent a in y = b x^a.
    pub exponent: f64,
    pub prefactor: f64,
    pub exponent_ci: f64,
    /// 95% interval for b (asymmetric because the fit is in ln b).
    pub prefactor_range: (f64, f64),
    pub reduced_chi2: f64,
}

/// Weighted regression of ln y on ln x. `sigma` are standard errors of y;
/// without them the fit is unweighted and errors come from the scatter.
pub fn power_law_fit(x: &[f64], y: &[f64], sigma: Option<&[f64]>) -> Result<PowerLaw> {
    if x.len() != y.len() || sigma.is_some_and(|s| s.len() != x.len()) {
        return Err(Error::ParameterDomain("input lengths differ".into()));
    }
    if x.len() < 3 {
        return Err(Error::ParameterDomain(format!("{} points, need 3", x.len())));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::ParameterDomain("power-law fit needs positive values".into()));
    }
    let xmax = x.iter().cloned().fold(f64::MIN, f64::max);
    let xmin = x.iter().cloned().fold(f64::MAX, f64::min);
    if xmax / xmin < 10.0 - 1e-9 {
        return Err(Error::ParameterDomain("x must span at least one decade".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let w: Vec<f64> = match sigma {
        Some(s) => {
            if s.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::ParameterDomain("standard errors must be positive".into()));
            }
            y.iter().zip(s).map(|(yi, si)| (yi / si).powi(2)).collect()
        }
        None => vec![1.0; x.len()],
    };
    let sw: f64 = w.iter().sum();
    let mx = w.iter().zip(&lx).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = w.iter().zip(&ly).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(&lx).map(|(wi, xi)| wi * (xi - mx).powi(2)).sum();
    let sxy: f64 = w.iter().zip(lx.iter().zip(&ly)).map(|(wi, (xi, yi))| wi * (xi - mx) * (yi - my)).sum();
    let a = sxy / sxx;
    let lb = my - a * mx;
    let dof = x.len() - 2;
    let chi2: f64 = w.iter().zip(lx.iter().zip(&ly)).map(|(wi, (xi, yi))| wi * (yi - lb - a * xi).powi(2)).sum();
    let reduced = chi2 / dof as f64;
    let scale = if sigma.is_some() { reduced.max(1.0) } else { reduced };
    let var_a = scale / sxx;
    let var_lb = scale * (1.0 / sw + mx * mx / sxx);
    let q = t95(dof);
    Ok(PowerLaw {
        exponent: a,
        prefactor: lb.exp(),
        exponent_ci: q * var_a.sqrt(),
        prefactor_range: ((lb - q * var_lb.sqrt()).exp(), (lb + q * var_lb.sqrt()).exp()),
        reduced_chi2: reduced,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Angular frequencies in κ, ascending, relative to the pump.
    pub omega: Vec<f64>,
    pub power: Vec<f64>,
    pub t0: f64,
    pub n_periods: f64,
    pub period: f64,
    pub ntilde: f64,
}

impl SpectrumResult {
    /// Grid spacing 2π/(N_T T).
    pub fn bin(&self) -> f64 {
        2.0 * PI / (self.n_periods * self.period)
    }
}

/// S(ω) = |(√2π/(N_T T)) ∫_{t0}^{t0+N_T T} e^{iωt} φ(0,t) Ñ dt|², with the
/// integral taken as a rectangle-rule sum over the samples in the window.
pub fn power_spectrum(series: &MeanFieldSeries, t0: f64, n_periods: f64, period: f64) -> Result<SpectrumResult> {
    let dt = series.interval;
    if !(period > 0.0) || !(n_periods > 0.0) {
        return Err(Error::ParameterDomain("period and N_T must be positive".into()));
    }
    if dt > period / 2.0 {
        return Err(Error::ParameterDomain(format!("sampling {dt} coarser than half a period {period}")));
    }
    let span = n_periods * period;
    let first = ((t0 - series.t0) / dt).round();
    if first < 0.0 || ((series.t0 + first * dt) - t0).abs() > 1e-6 * dt {
        return Err(Error::ParameterDomain(format!("t0 = {t0} is not a sample time of the series")));
    }
    let n = (span / dt).round() as usize;
    if ((n as f64) * dt - span).abs() > 1e-6 * dt {
        return Err(Error::ParameterDomain("window is not a whole number of samples".into()));
    }
    let first = first as usize;
    if first + n > series.values.len() {
        return Err(Error::InsufficientData(format!(
            "series has {} samples, window needs {}",
            series.values.len(),
            first + n
        )));
    }
    let mut buf: Vec<Complex64> = series.values[first..first + n].to_vec();
    // Σ_j φ_j e^{+2πi kj/N} is the unnormalised inverse DFT.
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let norm = (2.0 * PI).sqrt() / span * dt * series.ntilde;
    let half = (n / 2) as i64;
    let mut omega = Vec::with_capacity(n);
    let mut power = Vec::with_capacity(n);
    let bin = 2.0 * PI / span;
    for k in (-(n as i64 - 1 - half))..=half {
        let idx = k.rem_euclid(n as i64) as usize;
        omega.push(k as f64 * bin);
        // The e^{iω t0} factor has unit modulus.
        power.push((buf[idx] * norm).norm_sqr());
    }
    Ok(SpectrumResult { omega, power, t0, n_periods, period, ntilde: series.ntilde })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombSpacing {
    pub spacing: f64,
    pub uncertainty: f64,
    /// Refined peak positions (κ), ascending.
    pub peaks: Vec<f64>,
}

/// Relative floor on the detection level, for spectra whose median bin is
/// at rounding-error level.
pub const DYNAMIC_RANGE_FLOOR: f64 = 1e-10;

/// Local maxima above `prominence`× the median power (and above
/// `DYNAMIC_RANGE_FLOOR`× the maximum), refined by a parabola through the
/// three bins around each maximum.
pub fn detect_peaks(spec: &SpectrumResult, prominence: f64) -> Vec<f64> {
    let p = &spec.power;
    let mut sorted = p.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let max = sorted.last().copied().unwrap_or(0.0);
    let level = (prominence * median).max(DYNAMIC_RANGE_FLOOR * max);
    let bin = spec.bin();
    let mut peaks = Vec::new();
    for k in 1..p.len().saturating_sub(1) {
        if p[k] > level && p[k] > p[k - 1] && p[k] >= p[k + 1] {
            let den = p[k - 1] - 2.0 * p[k] + p[k + 1];
            let delta = if den != 0.0 { 0.5 * (p[k - 1] - p[k + 1]) / den } else { 0.0 };
            peaks.push(spec.omega[k] + delta.clamp(-0.5, 0.5) * bin);
        }
    }
    peaks
}

/// Comb line spacing from peaks above `prominence`× median. Gaps left by
/// missing lines are counted as whole multiples of the smallest spacing.
pub fn comb_spacing(spec: &SpectrumResult, prominence: f64) -> Result<CombSpacing> {
    let peaks = detect_peaks(spec, prominence);
    if peaks.len() < 3 {
        return Err(Error::InsufficientComb { found: peaks.len() });
    }
    let gaps: Vec<f64> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
    let base = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    let per_line: Vec<f64> = gaps.iter().map(|g| g / (g / base).round().max(1.0)).collect();
    let n = per_line.len() as f64;
    let mean = per_line.iter().sum::<f64>() / n;
    let var = if per_line.len() > 1 {
        per_line.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(CombSpacing { spacing: mean, uncertainty: (var / n).sqrt(), peaks })
}
