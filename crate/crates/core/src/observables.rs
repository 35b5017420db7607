// SPDX-License-Identifier: Apache-2.0

//! Physical observables from Wigner ensembles (and single classical fields).
//!
//! Ensembles hold rescaled amplitudes α̃ = α/√Ñ. Physical numbers are
//! recovered by multiplying second moments by Ñ before the symmetric-ordering
//! correction: N_l = Ñ⟨|α̃_l|²⟩ − 1/2 and N_θ = Ñ⟨|ψ̃(θ)|²⟩ − N_m/(4π).
//!
//! All ensemble sums are taken over per-trajectory contributions in
//! trajectory order, so results do not depend on the thread pool.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ModeField, RealSpaceTransform};
use crate::lattice::ModelParams;
use crate::twa::Ensemble;

/// Default real-space grid.
pub const DEFAULT_GRID: usize = 256;
/// Trajectory blocks used for jackknife errors on the contrast.
pub const JACKKNIFE_BLOCKS: usize = 20;
pub const RECORD_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tick {
    /// τ = κt/2.
    pub tau: f64,
    pub occupations: Vec<f64>,
    pub occupations_se: Vec<f64>,
    pub n_tot: f64,
    pub n_tot_se: f64,
    /// NaN when the mean density is not positive (vacuum).
    pub contrast: f64,
    pub contrast_se: f64,
    /// Ensemble-mean rescaled field at θ = 0 in the lab frame.
    pub mean_field: Complex64,
    pub mean_field_se: f64,
    pub density: Option<Vec<f64>>,
}

impl Tick {
    #[cfg(test)]
    pub(crate) fn constant_for_tests(tau: f64, occupations: Vec<f64>) -> Self {
        let n = occupations.len();
        Tick {
            tau,
            n_tot: occupations.iter().sum(),
            occupations,
            occupations_se: vec![0.0; n],
            n_tot_se: 0.0,
            contrast: 1.0,
            contrast_se: 0.0,
            mean_field: Complex64::new(0.0, 0.0),
            mean_field_se: 0.0,
            density: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordKind {
    Classical,
    Wigner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordMeta {
    pub version: u32,
    pub kind: RecordKind,
    pub model_hash: String,
    pub ntilde: f64,
    pub modes: usize,
    pub grid: usize,
    pub dt: f64,
    pub trajectories: usize,
    pub master_seed: Option<u64>,
    pub corotating: bool,
    pub d1: f64,
    /// Crate version that wrote the record.
    pub code_version: String,
    /// Digest of the run settings, when written by the runner.
    pub settings_digest: Option<String>,
}

/// Sink for ticks; must receive them in time order.
pub trait Recorder {
    fn record(&mut self, tick: Tick) -> Result<()>;
}

/// Discards every tick.
pub struct NullRecorder;

impl Recorder for NullRecorder {
    fn record(&mut self, _tick: Tick) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub meta: RecordMeta,
    pub ticks: Vec<Tick>,
    /// Optional bound on the number of ticks held in memory.
    #[serde(skip)]
    pub capacity: Option<usize>,
}

impl TimeSeriesRecord {
    pub fn new(meta: RecordMeta) -> Self {
        TimeSeriesRecord { meta, ticks: Vec::new(), capacity: None }
    }

    pub fn classical(model: &ModelParams, dt: f64, grid: usize) -> Self {
        Self::new(RecordMeta {
            version: RECORD_VERSION,
            kind: RecordKind::Classical,
            model_hash: model.physics_hash(),
            ntilde: model.ntilde,
            modes: model.modes,
            grid,
            dt,
            trajectories: 1,
            master_seed: None,
            corotating: model.corotating,
            d1: model.d1,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            settings_digest: None,
        })
    }

    pub fn push(&mut self, tick: Tick) -> Result<()> {
        if let Some(cap) = self.capacity {
            if self.ticks.len() >= cap {
                return Err(Error::Io(std::io::Error::new(
                    std::io::ErrorKind::OutOfMemory,
                    format!("recorder capacity {cap} exceeded"),
                )));
            }
        }
        if let Some(last) = self.ticks.last() {
            if !(tick.tau > last.tau) {
                return Err(Error::InsufficientData(format!(
                    "tick at tau {} does not follow {}",
                    tick.tau, last.tau
                )));
            }
            if tick.occupations.len() != last.occupations.len() {
                return Err(Error::Format("tick vector length changed".into()));
            }
        }
        self.ticks.push(tick);
        Ok(())
    }

    pub fn taus(&self) -> Vec<f64> {
        self.ticks.iter().map(|t| t.tau).collect()
    }

    pub fn contrasts(&self) -> Vec<f64> {
        self.ticks.iter().map(|t| t.contrast).collect()
    }

    pub fn contrast_errors(&self) -> Vec<f64> {
        self.ticks.iter().map(|t| t.contrast_se).collect()
    }

    /// Tick closest to `tau`.
    pub fn at_tau(&self, tau: f64) -> Option<&Tick> {
        self.ticks
            .iter()
            .min_by(|a, b| (a.tau - tau).abs().total_cmp(&(b.tau - tau).abs()))
    }
}

impl Recorder for TimeSeriesRecord {
    fn record(&mut self, tick: Tick) -> Result<()> {
        self.push(tick)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableOptions {
    pub grid: usize,
    /// Subtract the symmetric-ordering half quantum (default on).
    pub subtract_vacuum: bool,
    pub keep_density: bool,
}

impl Default for ObservableOptions {
    fn default() -> Self {
        ObservableOptions { grid: DEFAULT_GRID, subtract_vacuum: true, keep_density: false }
    }
}

/// Lab-frame phase factor e^{−i D1 l t} for mode `l` when the run is in the
/// co-rotating frame, 1 otherwise.
pub fn lab_phase(model: &ModelParams, l: i64, t: f64) -> Complex64 {
    if model.corotating {
        Complex64::from_polar(1.0, -model.d1 * l as f64 * t)
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// ψ(θ) of one trajectory in the lab frame, with the 1/√2π prefactor.
pub fn field_at(amps: &[Complex64], model: &ModelParams, theta: f64, t: f64) -> Complex64 {
    let h = (amps.len() as i64 - 1) / 2;
    let s: Complex64 = amps
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let l = i as i64 - h;
            a * Complex64::from_polar(1.0, theta * l as f64) * lab_phase(model, l, t)
        })
        .sum();
    s / (2.0 * PI).sqrt()
}

/// max_θ n / (∫n dθ / 2π) on a uniform grid.
pub fn contrast(density: &[f64]) -> Result<f64> {
    if density.is_empty() {
        return Err(Error::DegenerateDensity { mean: 0.0 });
    }
    let mean = density.iter().sum::<f64>() / density.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::DegenerateDensity { mean });
    }
    let max = density.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(max / mean)
}

fn mean_se(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    (mean, (var / nf).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Occupations {
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
}

/// N_l = Ñ⟨|α̃_l|²⟩ − 1/2 with standard errors.
pub fn mode_occupation(ens: &Ensemble, subtract_vacuum: bool) -> Occupations {
    let n = ens.len();
    let modes = ens.modes();
    let vac = if subtract_vacuum { 0.5 } else { 0.0 };
    let mut mean = Vec::with_capacity(modes);
    let mut se = Vec::with_capacity(modes);
    for l in 0..modes {
        let vals = ens.trajectories.iter().map(|t| ens.ntilde * t.amps[l].norm_sqr());
        let (m, s) = mean_se(vals, n);
        mean.push(m - vac);
        se.push(s);
    }
    Occupations { mean, se }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonCount {
    pub n_tot: f64,
    pub se: f64,
    /// Intracavity power P_I = ħ ω_p D1 N_tot / (2π) in W, when the SI scale
    /// is known.
    pub power: Option<f64>,
}

pub fn intracavity_power(model: &ModelParams, n_tot: f64) -> Option<f64> {
    let wp = model.pump_omega?;
    let d1 = model.d1_per_s()?;
    Some(crate::lattice::HBAR * wp * d1 * n_tot / (2.0 * PI))
}

pub fn total_photons_and_power(ens: &Ensemble, model: &ModelParams, subtract_vacuum: bool) -> PhotonCount {
    let vac = if subtract_vacuum { 0.5 * ens.modes() as f64 } else { 0.0 };
    let vals = ens
        .trajectories
        .iter()
        .map(|t| ens.ntilde * t.amps.iter().map(|a| a.norm_sqr()).sum::<f64>());
    let (m, se) = mean_se(vals, ens.len());
    let n_tot = m - vac;
    PhotonCount { n_tot, se, power: intracavity_power(model, n_tot) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    /// Photons per radian; ∫ n dθ = N_tot.
    pub n: Vec<f64>,
    pub se: Vec<f64>,
}

fn trajectory_densities(ens: &Ensemble, grid: usize) -> Result<Vec<Vec<f64>>> {
    let modes = ens.modes();
    // Validate the grid once up front.
    RealSpaceTransform::new(modes, grid)?;
    Ok(ens
        .trajectories
        .par_iter()
        .map_init(
            || (RealSpaceTransform::new(modes, grid).unwrap(), vec![Complex64::new(0.0, 0.0); grid]),
            |(tr, psi), t| {
                tr.forward_into(&t.amps, psi);
                psi.iter().map(|p| p.norm_sqr()).collect::<Vec<f64>>()
            },
        )
        .collect())
}

/// n(θ) = Ñ⟨|ψ̃(θ)|²⟩ − N_m/(4π), in photons per radian.
pub fn photon_density(ens: &Ensemble, grid: usize, subtract_vacuum: bool) -> Result<Density> {
    let per = trajectory_densities(ens, grid)?;
    let vac = if subtract_vacuum { ens.modes() as f64 / (4.0 * PI) } else { 0.0 };
    let n = ens.len();
    let mut dens = Vec::with_capacity(grid);
    let mut se = Vec::with_capacity(grid);
    for k in 0..grid {
        let (m, s) = mean_se(per.iter().map(|d| ens.ntilde * d[k]), n);
        dens.push(m - vac);
        se.push(s);
    }
    Ok(Density { n: dens, se })
}

/// Ensemble mean of the lab-frame rescaled field at `theta`, with its
/// standard error.
pub fn mean_field(ens: &Ensemble, model: &ModelParams, theta: f64) -> (Complex64, f64) {
    let vals: Vec<Complex64> = ens
        .trajectories
        .iter()
        .map(|t| field_at(&t.amps, model, theta, ens.time))
        .collect();
    complex_mean_se(&vals)
}

pub(crate) fn complex_mean_se(vals: &[Complex64]) -> (Complex64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<Complex64>() / n;
    if vals.len() < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Uniformly sampled ensemble-mean field φ(θ, t) in rescaled units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldSeries {
    /// Time of the first sample in 1/κ.
    pub t0: f64,
    pub interval: f64,
    pub ntilde: f64,
    pub theta: f64,
    pub values: Vec<Complex64>,
    pub se: Vec<f64>,
}

impl MeanFieldSeries {
    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| self.t0 + k as f64 * self.interval).collect()
    }
}

/// φ(0, t) from the ticks of a record. Refuses cadences that cannot resolve
/// the round-trip frequency D1 or non-uniform tick spacing.
pub fn mean_field_series(record: &TimeSeriesRecord) -> Result<MeanFieldSeries> {
    let ticks = &record.ticks;
    if ticks.len() < 2 {
        return Err(Error::InsufficientData("record has fewer than two ticks".into()));
    }
    let interval = 2.0 * (ticks[1].tau - ticks[0].tau);
    let limit = PI / record.meta.d1;
    if interval > limit {
        return Err(Error::Aliasing { interval, limit });
    }
    for w in ticks.windows(2) {
        let d = 2.0 * (w[1].tau - w[0].tau);
        if (d - interval).abs() > 1e-6 * interval {
            return Err(Error::InsufficientData("ticks are not uniformly spaced".into()));
        }
    }
    Ok(MeanFieldSeries {
        t0: 2.0 * ticks[0].tau,
        interval,
        ntilde: record.meta.ntilde,
        theta: 0.0,
        values: ticks.iter().map(|t| t.mean_field).collect(),
        se: ticks.iter().map(|t| t.mean_field_se).collect(),
    })
}

struct TrajectoryStats {
    occ: Vec<f64>,
    density: Vec<f64>,
    psi0: Complex64,
}

/// All recorded observables of an ensemble in one pass.
pub fn ensemble_tick(ens: &Ensemble, model: &ModelParams, opts: &ObservableOptions) -> Result<Tick> {
    let n = ens.len();
    if n < 2 {
        return Err(Error::InsufficientData("ensemble needs at least two trajectories".into()));
    }
    let modes = ens.modes();
    let grid = opts.grid;
    RealSpaceTransform::new(modes, grid)?;
    let nt = ens.ntilde;
    let t = ens.time;
    let stats: Vec<TrajectoryStats> = ens
        .trajectories
        .par_iter()
        .map_init(
            || (RealSpaceTransform::new(modes, grid).unwrap(), vec![Complex64::new(0.0, 0.0); grid]),
            |(tr, psi), traj| {
                tr.forward_into(&traj.amps, psi);
                TrajectoryStats {
                    occ: traj.amps.iter().map(|a| nt * a.norm_sqr()).collect(),
                    density: psi.iter().map(|p| nt * p.norm_sqr()).collect(),
                    psi0: field_at(&traj.amps, model, 0.0, t),
                }
            },
        )
        .collect();

    let vac_l = if opts.subtract_vacuum { 0.5 } else { 0.0 };
    let vac_theta = if opts.subtract_vacuum { modes as f64 / (4.0 * PI) } else { 0.0 };

    let mut occupations = Vec::with_capacity(modes);
    let mut occupations_se = Vec::with_capacity(modes);
    for l in 0..modes {
        let (m, s) = mean_se(stats.iter().map(|st| st.occ[l]), n);
        occupations.push(m - vac_l);
        occupations_se.push(s);
    }
    let (tot, n_tot_se) = mean_se(stats.iter().map(|st| st.occ.iter().sum::<f64>()), n);
    let n_tot = tot - vac_l * modes as f64;

    // Block sums for the jackknife, accumulated in trajectory order.
    let blocks = JACKKNIFE_BLOCKS.min(n);
    let mut block_sum = vec![vec![0.0; grid]; blocks];
    let mut block_count = vec![0usize; blocks];
    for (i, st) in stats.iter().enumerate() {
        let b = i * blocks / n;
        block_count[b] += 1;
        for (acc, d) in block_sum[b].iter_mut().zip(&st.density) {
            *acc += d;
        }
    }
    let mut total = vec![0.0; grid];
    for bs in &block_sum {
        for (acc, v) in total.iter_mut().zip(bs) {
            *acc += v;
        }
    }
    let density: Vec<f64> = total.iter().map(|s| s / n as f64 - vac_theta).collect();
    // Vacuum-like ensembles have no meaningful contrast; it is reported as NaN.
    let (c, contrast_se) = match contrast(&density) {
        Ok(c) => {
            let mut loo = Vec::with_capacity(blocks);
            for b in 0..blocks {
                let m = (n - block_count[b]) as f64;
                let d: Vec<f64> = total
                    .iter()
                    .zip(&block_sum[b])
                    .map(|(s, bs)| (s - bs) / m - vac_theta)
                    .collect();
                loo.push(contrast(&d).unwrap_or(f64::NAN));
            }
            let bf = blocks as f64;
            let loo_mean = loo.iter().sum::<f64>() / bf;
            let var = loo.iter().map(|x| (x - loo_mean).powi(2)).sum::<f64>();
            (c, ((bf - 1.0) / bf * var).sqrt())
        }
        Err(Error::DegenerateDensity { .. }) => (f64::NAN, f64::NAN),
        Err(e) => return Err(e),
    };

    let psi0: Vec<Complex64> = stats.iter().map(|s| s.psi0).collect();
    let (mean_field, mean_field_se) = complex_mean_se(&psi0);

    Ok(Tick {
        tau: 0.5 * t,
        occupations,
        occupations_se,
        n_tot,
        n_tot_se,
        contrast: c,
        contrast_se,
        mean_field,
        mean_field_se,
        density: if opts.keep_density { Some(density) } else { None },
    })
}

/// Observables of a single classical field: N_l = Ñ|α̃_l|², no vacuum term.
pub fn classical_tick(field: &ModeField, model: &ModelParams, transform: &mut RealSpaceTransform) -> Result<Tick> {
    let nt = model.ntilde;
    let occupations: Vec<f64> = field.amps.iter().map(|a| nt * a.norm_sqr()).collect();
    let n_tot = occupations.iter().sum();
    let real = transform.to_real(field);
    let density: Vec<f64> = real.psi.iter().map(|p| nt * p.norm_sqr()).collect();
    let c = contrast(&density)?;
    Ok(Tick {
        tau: 0.5 * field.time,
        occupations_se: vec![0.0; occupations.len()],
        occupations,
        n_tot,
        n_tot_se: 0.0,
        contrast: c,
        contrast_se: 0.0,
        mean_field: field_at(&field.amps, model, 0.0, field.time),
        mean_field_se: 0.0,
        density: Some(density),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoisePolicy;
    use crate::twa::{sample_initial, Ensemble};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn contrast_examples() {
        assert_eq!(contrast(&vec![2.5; 64]).unwrap(), 1.0);
        // Flat comb of M modes: |ψ(0)|² = M²/2π, mean density M/2π → C = M.
        for m in [3usize, 5, 9, 21] {
            let f = ModeField::from_amps(vec![c(1.0, 0.0); m]);
            let d = crate::field::to_real_space(&f, 256).unwrap().density();
            assert_relative_eq!(contrast(&d).unwrap(), m as f64, max_relative = 1e-12);
            let scaled: Vec<f64> = d.iter().map(|x| 3.7 * x).collect();
            assert_relative_eq!(contrast(&scaled).unwrap(), m as f64, max_relative = 1e-12);
        }
        assert!(matches!(contrast(&vec![0.0; 8]), Err(Error::DegenerateDensity { .. })));
    }

    fn deterministic_ensemble(field: &ModeField, ntilde: f64, n: usize) -> Ensemble {
        let m = ModelParams { ntilde, ..ModelParams::baseline(field.modes()) };
        Ensemble::replicate(field, &m, n, NoisePolicy::new(0))
    }

    #[test]
    fn deterministic_occupation_is_classical_minus_half() {
        let f = ModeField::from_amps(vec![c(3.0, 1.0), c(0.5, -2.0), c(10.0, 0.0)]);
        let ens = deterministic_ensemble(&f, 1.0, 4);
        let occ = mode_occupation(&ens, true);
        for (o, a) in occ.mean.iter().zip(&f.amps) {
            assert_relative_eq!(*o, a.norm_sqr() - 0.5, max_relative = 1e-14);
        }
        assert!(occ.se.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn scaling_bookkeeping() {
        // Doubling Ñ at fixed rescaled field doubles N_l + 1/2.
        let f = ModeField::from_amps(vec![c(3.0, 1.0), c(0.5, -2.0), c(10.0, 0.0)]);
        let a = mode_occupation(&deterministic_ensemble(&f, 0.3, 3), true);
        let b = mode_occupation(&deterministic_ensemble(&f, 0.6, 3), true);
        for (x, y) in a.mean.iter().zip(&b.mean) {
            assert_relative_eq!(y + 0.5, 2.0 * (x + 0.5), max_relative = 1e-14);
        }
    }

    #[test]
    fn noise_free_parseval_identity() {
        let f = ModeField::from_amps((0..11).map(|i| c(1.0 + i as f64, 0.3 * i as f64)).collect());
        let ens = deterministic_ensemble(&f, 2.0, 3);
        let model = ModelParams { ntilde: 2.0, ..ModelParams::baseline(11) };
        let tick = ensemble_tick(&ens, &model, &ObservableOptions { keep_density: true, ..Default::default() }).unwrap();
        let d = tick.density.unwrap();
        let integral = d.iter().sum::<f64>() * 2.0 * PI / d.len() as f64;
        assert_relative_eq!(integral, tick.n_tot, max_relative = 1e-10);
        let occ_sum: f64 = tick.occupations.iter().sum();
        assert_relative_eq!(occ_sum, tick.n_tot, max_relative = 1e-12);
        let dens = photon_density(&ens, 256, true).unwrap();
        assert_relative_eq!(dens.n[0], d[0], max_relative = 1e-12);
    }

    #[test]
    fn vacuum_ensemble_is_empty() {
        let model = ModelParams { ntilde: 1e-4, ..ModelParams::baseline(7) };
        let ens = sample_initial(&ModeField::zeros(7), &model, 4000, NoisePolicy::new(3)).unwrap();
        let occ = mode_occupation(&ens, true);
        for (m, s) in occ.mean.iter().zip(&occ.se) {
            assert!(m.abs() < 3.5 * s, "N_l = {m} ± {s}");
        }
        let tot = total_photons_and_power(&ens, &model, true);
        assert!(tot.n_tot.abs() < 3.5 * tot.se);
        let dens = photon_density(&ens, 64, true).unwrap();
        for (m, s) in dens.n.iter().zip(&dens.se) {
            assert!(m.abs() < 4.0 * s, "n = {m} ± {s}");
        }
        let (phi, se) = mean_field(&ens, &model, 0.0);
        assert!(phi.norm() < 3.5 * se * std::f64::consts::SQRT_2);
    }

    #[test]
    fn observables_invariant_under_permutation() {
        let model = ModelParams { ntilde: 1e-2, ..ModelParams::baseline(7) };
        let ens = sample_initial(&ModeField::zeros(7), &model, 50, NoisePolicy::new(8)).unwrap();
        let mut rev = ens.clone();
        rev.trajectories.reverse();
        let a = mode_occupation(&ens, true);
        let b = mode_occupation(&rev, true);
        for (x, y) in a.mean.iter().zip(&b.mean) {
            assert_relative_eq!(x, y, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn intracavity_power_formula() {
        let m = ModelParams::baseline(21);
        let p = intracavity_power(&m, 1e8).unwrap();
        let expect = crate::lattice::HBAR * m.pump_omega.unwrap() * m.d1 * m.kappa_per_s.unwrap() * 1e8 / (2.0 * PI);
        assert_relative_eq!(p, expect, max_relative = 1e-14);
        let no_si = ModelParams { kappa_per_s: None, ..m };
        assert!(intracavity_power(&no_si, 1e8).is_none());
    }

    #[test]
    fn record_rejects_out_of_order_and_overflow() {
        let m = ModelParams::baseline(3);
        let mut r = TimeSeriesRecord::classical(&m, 1e-3, 16);
        r.push(Tick::constant_for_tests(1.0, vec![1.0; 3])).unwrap();
        assert!(r.push(Tick::constant_for_tests(1.0, vec![1.0; 3])).is_err());
        r.capacity = Some(1);
        assert!(matches!(r.push(Tick::constant_for_tests(2.0, vec![1.0; 3])), Err(Error::Io(_))));
    }
}
