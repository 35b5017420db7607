// SPDX-License-Identifier: Apache-2.0

//! Mean-field (Gross-Pitaevskii / Lugiato-Lefever) solver.
//!
//! The default scheme is Strang splitting: the linear dissipative part is
//! applied exactly for half a step on either side of a midpoint (RK2) update
//! of the Kerr and drive terms. The literal explicit-Euler update is kept as
//! a cross-check.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{linear_factors, FwmKernel, ModeField, RealSpaceTransform};
use crate::lattice::{detuning_profile, soliton_threshold, ModelParams};
use crate::observables::{classical_tick, TimeSeriesRecord, DEFAULT_GRID};

pub const DEFAULT_DT: f64 = 5e-4;
pub const MAX_DT_HALVINGS: u32 = 6;
pub const DEFAULT_T_RELAX: f64 = 50.0;
pub const DEFAULT_STATIONARITY_WINDOW: f64 = 5.0;
pub const DEFAULT_STATIONARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Scheme {
    #[default]
    SplitStep,
    Euler,
}

/// One-trajectory integrator with precomputed propagators and FFT scratch.
///
/// `shift` is an extra constant real detuning added to every mode; the
/// Wigner drift uses it for −g/Ñ.
#[derive(Clone)]
pub struct Stepper {
    scheme: Scheme,
    dt: f64,
    g: f64,
    half_drive: f64,
    drive_index: usize,
    sigma: Vec<f64>,
    half_lin: Vec<Complex64>,
    kernel: FwmKernel,
    k1: Vec<Complex64>,
    mid: Vec<Complex64>,
}

impl Stepper {
    pub fn new(model: &ModelParams, dt: f64, scheme: Scheme) -> Result<Self> {
        Self::with_shift(model, dt, scheme, 0.0)
    }

    pub fn with_shift(model: &ModelParams, dt: f64, scheme: Scheme, shift: f64) -> Result<Self> {
        model.validate()?;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::ParameterDomain(format!("dt must be positive, got {dt}")));
        }
        let sigma: Vec<f64> = detuning_profile(model).into_iter().map(|s| s + shift).collect();
        let half_lin = linear_factors(&sigma, 1.0, 0.5 * dt);
        let n = model.modes;
        Ok(Stepper {
            scheme,
            dt,
            g: model.g,
            half_drive: 0.5 * model.drive,
            drive_index: model.index_of(0)?,
            sigma,
            half_lin,
            kernel: FwmKernel::new(n),
            k1: vec![Complex64::new(0.0, 0.0); n],
            mid: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Advances `amps` by one step in place.
    pub fn step(&mut self, amps: &mut [Complex64]) {
        match self.scheme {
            Scheme::SplitStep => self.split_step(amps),
            Scheme::Euler => self.euler_step(amps),
        }
    }

    /// i(g·FWM(a) − (F/2)δ_{l0}) written to `out`.
    fn nonlinear_rhs(kernel: &mut FwmKernel, g: f64, half_drive: f64, drive_index: usize, a: &[Complex64], out: &mut [Complex64]) {
        kernel.apply(a, g, out);
        out[drive_index] -= half_drive;
        for o in out.iter_mut() {
            *o = Complex64::new(-o.im, o.re);
        }
    }

    fn split_step(&mut self, amps: &mut [Complex64]) {
        let dt = self.dt;
        for (a, e) in amps.iter_mut().zip(&self.half_lin) {
            *a *= e;
        }
        Self::nonlinear_rhs(&mut self.kernel, self.g, self.half_drive, self.drive_index, amps, &mut self.k1);
        for ((m, a), k) in self.mid.iter_mut().zip(amps.iter()).zip(&self.k1) {
            *m = a + k * (0.5 * dt);
        }
        Self::nonlinear_rhs(&mut self.kernel, self.g, self.half_drive, self.drive_index, &self.mid, &mut self.k1);
        for ((a, k), e) in amps.iter_mut().zip(&self.k1).zip(&self.half_lin) {
            *a = (*a + k * dt) * e;
        }
    }

    fn euler_step(&mut self, amps: &mut [Complex64]) {
        let dt = self.dt;
        Self::nonlinear_rhs(&mut self.kernel, self.g, self.half_drive, self.drive_index, amps, &mut self.k1);
        for ((a, k), &s) in amps.iter_mut().zip(&self.k1).zip(&self.sigma) {
            // i(σ + i/2)α = (iσ − 1/2)α
            let lin = Complex64::new(-0.5, s) * *a;
            *a += (lin + k) * dt;
        }
    }
}

pub(crate) fn all_finite(amps: &[Complex64]) -> bool {
    amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
}

/// One step of the mean-field equation.
pub fn gp_step(field: &ModeField, model: &ModelParams, dt: f64, scheme: Scheme) -> Result<ModeField> {
    let mut st = Stepper::new(model, dt, scheme)?;
    let mut out = field.clone();
    st.step(&mut out.amps);
    if !all_finite(&out.amps) {
        return Err(Error::Divergence { step: 0, trajectory: None });
    }
    out.time += dt;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpOptions {
    pub dt: f64,
    pub scheme: Scheme,
    /// Real-space grid for contrast and density.
    pub grid: usize,
    /// Halve dt and restart on divergence, at most this many times.
    pub max_halvings: u32,
}

impl Default for GpOptions {
    fn default() -> Self {
        GpOptions { dt: DEFAULT_DT, scheme: Scheme::SplitStep, grid: DEFAULT_GRID, max_halvings: MAX_DT_HALVINGS }
    }
}

fn steps_for(duration: f64, dt: f64) -> u64 {
    (duration / dt).round().max(0.0) as u64
}

/// Integrates for `t_end` (in 1/κ) from `field`, recording classical
/// observables every `cadence`. Returns the final field and the record.
pub fn evolve_gp(
    field: &ModeField,
    model: &ModelParams,
    t_end: f64,
    cadence: f64,
    opts: &GpOptions,
) -> Result<(ModeField, TimeSeriesRecord)> {
    let mut dt = opts.dt;
    let mut halvings = 0;
    loop {
        match evolve_fixed(field, model, t_end, cadence, dt, opts) {
            Err(Error::Divergence { step, .. }) if halvings < opts.max_halvings => {
                log::warn!("GP diverged at step {step} with dt = {dt}; halving");
                dt *= 0.5;
                halvings += 1;
            }
            other => return other,
        }
    }
}

fn evolve_fixed(
    field: &ModeField,
    model: &ModelParams,
    t_end: f64,
    cadence: f64,
    dt: f64,
    opts: &GpOptions,
) -> Result<(ModeField, TimeSeriesRecord)> {
    if !(t_end > 0.0) {
        return Err(Error::ParameterDomain(format!("t_end must be positive, got {t_end}")));
    }
    if !(cadence >= dt) {
        return Err(Error::ParameterDomain(format!("cadence {cadence} shorter than dt {dt}")));
    }
    if field.modes() != model.modes {
        return Err(Error::Config(format!(
            "field has {} modes, model {}",
            field.modes(),
            model.modes
        )));
    }
    let mut st = Stepper::new(model, dt, opts.scheme)?;
    let mut transform = RealSpaceTransform::new(model.modes, opts.grid)?;
    let every = steps_for(cadence, dt).max(1);
    let total = steps_for(t_end, dt);
    let mut out = field.clone();
    let t0 = field.time;
    let mut record = TimeSeriesRecord::classical(model, dt, opts.grid);
    record.push(classical_tick(&out, model, &mut transform)?)?;
    for k in 1..=total {
        st.step(&mut out.amps);
        if !all_finite(&out.amps) {
            return Err(Error::Divergence { step: k, trajectory: None });
        }
        out.time = t0 + k as f64 * dt;
        if k % every == 0 {
            record.push(classical_tick(&out, model, &mut transform)?)?;
        }
    }
    Ok((out, record))
}

/// True iff every N_l changed by less than `tol` (relative) over the trailing
/// `window` (in 1/κ). Occupations are phase-free, so the lab-frame rotation
/// does not affect the test.
pub fn check_stationarity(record: &TimeSeriesRecord, window: f64, tol: f64) -> Result<bool> {
    let ticks = &record.ticks;
    if ticks.len() < 2 {
        return Err(Error::InsufficientData("record has fewer than two ticks".into()));
    }
    let tau_window = 0.5 * window;
    let span = ticks.last().unwrap().tau - ticks[0].tau;
    if span + 1e-12 < 2.0 * tau_window {
        return Err(Error::InsufficientData(format!(
            "record spans {} in t, need {}",
            2.0 * span,
            2.0 * window
        )));
    }
    let t_last = ticks.last().unwrap().tau;
    let tail: Vec<_> = ticks.iter().filter(|t| t.tau >= t_last - tau_window - 1e-12).collect();
    let last = tail.last().unwrap();
    let floor = last.n_tot.abs() * 1e-14;
    for (l, &ref_n) in last.occupations.iter().enumerate() {
        let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
            (lo.min(t.occupations[l]), hi.max(t.occupations[l]))
        });
        let scale = ref_n.abs().max(floor).max(f64::MIN_POSITIVE);
        if (hi - lo) / scale >= tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Initial condition for soliton preparation.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedSpec {
    /// Sech pulse at θ = 0 on top of the linear (g = 0) background:
    /// u(θ) = u_bg·(1 + ratio·sech(θ/width)). `None` picks the width from
    /// the dispersion/detuning balance and the ratio from the Kerr soliton
    /// peak amplitude.
    Sech { width: Option<f64>, ratio: Option<f64> },
    /// A previously stored field.
    Field(ModeField),
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec::Sech { width: None, ratio: None }
    }
}

/// Linear-cavity fixed point α_0 = (F/2)/(σ0 + i/2), the closed form for g = 0.
pub fn linear_fixed_point(model: &ModelParams) -> Complex64 {
    Complex64::new(0.5 * model.drive, 0.0) / Complex64::new(model.sigma0, 0.5)
}

/// Default sech width sqrt(D2 / (−2σ0)) in rad.
pub fn default_seed_width(model: &ModelParams) -> f64 {
    (model.d2 / (2.0 * model.sigma0.abs())).sqrt()
}

/// Default peak-to-background amplitude ratio: the Kerr soliton peak
/// |u| = sqrt(−2σ0/g) over the linear background |α_0|.
pub fn default_seed_ratio(model: &ModelParams) -> f64 {
    let peak = (2.0 * model.sigma0.abs() / model.g).sqrt();
    peak / linear_fixed_point(model).norm()
}

pub fn sech_seed(model: &ModelParams, width: f64, ratio: f64) -> ModeField {
    let grid = crate::field::dealiased_grid(model.modes).max(DEFAULT_GRID);
    let bg = linear_fixed_point(model);
    let psi: Vec<Complex64> = (0..grid)
        .map(|k| {
            let mut th = 2.0 * PI * k as f64 / grid as f64;
            if th > PI {
                th -= 2.0 * PI;
            }
            bg * (1.0 + ratio / (th / width).cosh()) / (2.0 * PI).sqrt()
        })
        .collect();
    let real = crate::field::RealSpaceField { psi, modes: model.modes };
    crate::field::from_real_space(&real).expect("seed grid exceeds mode count")
}

/// Number of density peaks rising above half of the peak-to-floor height.
pub fn count_peaks(density: &[f64]) -> usize {
    let n = density.len();
    let max = density.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = density.iter().cloned().fold(f64::INFINITY, f64::min);
    let half = min + 0.5 * (max - min);
    let mut peaks = 0;
    for k in 0..n {
        let prev = density[(k + n - 1) % n];
        let next = density[(k + 1) % n];
        if density[k] > half && density[k] >= prev && density[k] > next {
            peaks += 1;
        }
    }
    peaks
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonOptions {
    pub t_relax: f64,
    pub window: f64,
    pub tol: f64,
    /// Extra relaxation rounds of `t_relax` before giving up.
    pub max_extensions: u32,
    /// Minimum contrast for the relaxed field to count as a soliton.
    pub min_contrast: f64,
    pub gp: GpOptions,
}

impl Default for SolitonOptions {
    fn default() -> Self {
        SolitonOptions {
            t_relax: DEFAULT_T_RELAX,
            window: DEFAULT_STATIONARITY_WINDOW,
            tol: DEFAULT_STATIONARITY_TOL,
            max_extensions: 4,
            min_contrast: 1.5,
            gp: GpOptions::default(),
        }
    }
}

/// Relaxes a seed to the stationary single-soliton field.
pub fn prepare_soliton(model: &ModelParams, seed: &SeedSpec, opts: &SolitonOptions) -> Result<(ModeField, TimeSeriesRecord)> {
    model.require_anomalous()?;
    let thr = soliton_threshold(model)?;
    if !thr.above {
        return Err(Error::ParameterDomain(format!(
            "drive {} is not above the soliton threshold F_thr = {}",
            model.drive, thr.drive_threshold
        )));
    }
    match seed {
        SeedSpec::Field(f) => relax(model, f.clone(), opts),
        SeedSpec::Sech { width, ratio } => {
            let mut width = width.unwrap_or_else(|| default_seed_width(model));
            let ratio = ratio.unwrap_or_else(|| default_seed_ratio(model));
            let mut attempt = 0;
            loop {
                match relax(model, sech_seed(model, width, ratio), opts) {
                    Err(Error::MultiSoliton { peaks }) if attempt < 3 => {
                        log::warn!("{peaks} solitons from seed width {width}; narrowing");
                        width *= 0.7;
                        attempt += 1;
                    }
                    other => return other,
                }
            }
        }
    }
}

fn relax(model: &ModelParams, mut field: ModeField, opts: &SolitonOptions) -> Result<(ModeField, TimeSeriesRecord)> {
    let cadence = 0.1f64.max(opts.gp.dt);
    let mut rounds = 0;
    loop {
        let (out, record) = evolve_gp(&field, model, opts.t_relax, cadence, &opts.gp)?;
        let last = record.ticks.last().expect("record has ticks");
        if last.contrast < opts.min_contrast {
            return Err(Error::NonConvergence(format!(
                "seed relaxed to a homogeneous state (contrast {:.4})",
                last.contrast
            )));
        }
        if let Some(d) = &last.density {
            let peaks = count_peaks(d);
            if peaks > 1 {
                return Err(Error::MultiSoliton { peaks });
            }
        }
        if check_stationarity(&record, opts.window, opts.tol)? {
            return Ok((out, record));
        }
        rounds += 1;
        if rounds > opts.max_extensions {
            return Err(Error::NonConvergence(format!(
                "occupations still drifting after t = {}",
                opts.t_relax * rounds as f64
            )));
        }
        field = out;
    }
}
