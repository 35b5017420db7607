// SPDX-License-Identifier: Apache-2.0

//! Truncated Wigner ensembles.
//!
//! Each trajectory obeys the rescaled Langevin equation
//!
//! dα̃_l = i[(σ_l + i/2 − g/Ñ)α̃_l + g·FWM_l(α̃) − (F/2)δ_{l0}] dt + √(dt/(2Ñ)) ξ_l
//!
//! integrated with the GP split-step (shift folded into the linear
//! propagator) followed by one additive noise kick per step.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ModeField;
use crate::gp::{all_finite, Scheme, Stepper, DEFAULT_DT};
use crate::lattice::ModelParams;
use crate::noise::{NoisePolicy, NoiseStream};
use crate::observables::{ensemble_tick, field_at, MeanFieldSeries, ObservableOptions, Recorder};

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub amps: Vec<Complex64>,
    pub noise: NoiseStream,
}

/// Reference point for the time axis: t = time + (steps − self.steps)·dt.
/// Reset whenever the step size changes, so chunked and continuous runs
/// compute identical time stamps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Epoch {
    pub time: f64,
    pub steps: u64,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub trajectories: Vec<Trajectory>,
    pub ntilde: f64,
    pub model_hash: String,
    pub master_seed: u64,
    /// Time in 1/κ.
    pub time: f64,
    /// Steps taken since sampling.
    pub steps: u64,
    pub epoch: Option<Epoch>,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.trajectories.first().map_or(0, |t| t.amps.len())
    }

    /// `n` noiseless copies of `field`.
    pub fn replicate(field: &ModeField, model: &ModelParams, n: usize, policy: NoisePolicy) -> Self {
        Ensemble {
            trajectories: (0..n)
                .map(|i| Trajectory { amps: field.amps.clone(), noise: policy.stream(i) })
                .collect(),
            ntilde: model.ntilde,
            model_hash: model.physics_hash(),
            master_seed: policy.master_seed,
            time: field.time,
            steps: 0,
            epoch: None,
        }
    }

    /// Epoch for step size `dt`, starting a new one if `dt` changed.
    fn epoch_for(&mut self, dt: f64) -> Epoch {
        match self.epoch {
            Some(e) if e.dt == dt => e,
            _ => {
                let e = Epoch { time: self.time, steps: self.steps, dt };
                self.epoch = Some(e);
                e
            }
        }
    }

    fn set_steps(&mut self, steps: u64, epoch: Epoch) {
        self.steps = steps;
        self.time = epoch.time + (steps - epoch.steps) as f64 * epoch.dt;
    }

    pub fn member(&self, i: usize) -> ModeField {
        ModeField { amps: self.trajectories[i].amps.clone(), time: self.time }
    }

    fn check_model(&self, model: &ModelParams) -> Result<()> {
        let h = model.physics_hash();
        if h != self.model_hash {
            return Err(Error::HashMismatch { expected: self.model_hash.clone(), found: h });
        }
        if model.modes != self.modes() {
            return Err(Error::Config(format!(
                "ensemble has {} modes, model has {}",
                self.modes(),
                model.modes
            )));
        }
        Ok(())
    }
}

/// Draws α̃_μ(0) = α̃_GP + ξ_μ/√(2Ñ), using Ñ from `model`.
pub fn sample_initial(gp_field: &ModeField, model: &ModelParams, n_traj: usize, policy: NoisePolicy) -> Result<Ensemble> {
    model.validate()?;
    if n_traj < 2 {
        return Err(Error::ParameterDomain(format!("need at least 2 trajectories, got {n_traj}")));
    }
    if gp_field.modes() != model.modes {
        return Err(Error::Config(format!(
            "field has {} modes, model has {}",
            gp_field.modes(),
            model.modes
        )));
    }
    let scale = (0.5 / model.ntilde).sqrt();
    let mut ens = Ensemble::replicate(gp_field, model, n_traj, policy);
    for t in &mut ens.trajectories {
        t.noise.add_scaled(&mut t.amps, scale);
    }
    Ok(ens)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwaOptions {
    pub dt: f64,
    pub scheme: Scheme,
    /// Langevin noise (off gives deterministic GP trajectories).
    pub noise: bool,
    /// Include the −g/Ñ drift shift.
    pub wigner_shift: bool,
    pub observables: ObservableOptions,
}

impl Default for TwaOptions {
    fn default() -> Self {
        TwaOptions {
            dt: DEFAULT_DT,
            scheme: Scheme::SplitStep,
            noise: true,
            wigner_shift: true,
            observables: ObservableOptions::default(),
        }
    }
}

fn make_stepper(ens: &Ensemble, model: &ModelParams, opts: &TwaOptions) -> Result<Stepper> {
    let shift = if opts.wigner_shift { -model.g / ens.ntilde } else { 0.0 };
    Stepper::with_shift(model, opts.dt, opts.scheme, shift)
}

/// Advances every trajectory by `n` steps. Work is split across the current
/// rayon pool; each trajectory only touches its own state.
fn advance(ens: &mut Ensemble, stepper: &Stepper, n: u64, noise_scale: Option<f64>) -> Result<()> {
    let start = ens.steps;
    let failures: Vec<Option<u64>> = ens
        .trajectories
        .par_iter_mut()
        .map_init(
            || stepper.clone(),
            |st, traj| {
                for k in 0..n {
                    st.step(&mut traj.amps);
                    if let Some(s) = noise_scale {
                        traj.noise.add_scaled(&mut traj.amps, s);
                    }
                    if !all_finite(&traj.amps) {
                        return Some(start + k + 1);
                    }
                }
                None
            },
        )
        .collect();
    if let Some((i, step)) = failures.iter().enumerate().find_map(|(i, f)| f.map(|s| (i, s))) {
        return Err(Error::Divergence { step, trajectory: Some(i) });
    }
    Ok(())
}

/// One step of every trajectory.
pub fn twa_step(ens: &mut Ensemble, model: &ModelParams, opts: &TwaOptions) -> Result<()> {
    ens.check_model(model)?;
    let stepper = make_stepper(ens, model, opts)?;
    let scale = opts.noise.then(|| (opts.dt / (2.0 * ens.ntilde)).sqrt());
    let epoch = ens.epoch_for(opts.dt);
    advance(ens, &stepper, 1, scale)?;
    ens.set_steps(ens.steps + 1, epoch);
    Ok(())
}

/// Evolves to `t_end`, pushing an ensemble tick whenever the step count
/// since the current epoch is a multiple of `cadence/dt`. The starting state
/// is not recorded.
///
/// A run split into several calls at cadence-aligned times produces the
/// same ticks, bit for bit, as a single call, whatever the pool size.
pub fn evolve_twa(
    ens: &mut Ensemble,
    model: &ModelParams,
    t_end: f64,
    cadence: f64,
    opts: &TwaOptions,
    recorder: &mut dyn Recorder,
) -> Result<()> {
    ens.check_model(model)?;
    let dt = opts.dt;
    if !(t_end > ens.time) {
        return Err(Error::ParameterDomain(format!("t_end {t_end} not after current time {}", ens.time)));
    }
    if !(cadence >= dt) {
        return Err(Error::ParameterDomain(format!("cadence {cadence} shorter than dt {dt}")));
    }
    let stepper = make_stepper(ens, model, opts)?;
    let scale = opts.noise.then(|| (dt / (2.0 * ens.ntilde)).sqrt());
    let epoch = ens.epoch_for(dt);
    let target = epoch.steps + ((t_end - epoch.time) / dt).round() as u64;
    let every = ((cadence / dt).round() as u64).max(1);
    while ens.steps < target {
        let since = ens.steps - epoch.steps;
        let next_tick = (since / every + 1) * every + epoch.steps;
        let stop = next_tick.min(target);
        advance(ens, &stepper, stop - ens.steps, scale)?;
        ens.set_steps(stop, epoch);
        if (stop - epoch.steps) % every == 0 {
            recorder.record(ensemble_tick(ens, model, &opts.observables)?)?;
        }
    }
    Ok(())
}

/// Samples the ensemble-mean lab-frame field at `theta` every `interval`,
/// `count` times, starting with the current state.
///
/// The integration step is `interval / substeps`.
pub fn sample_mean_field(
    ens: &mut Ensemble,
    model: &ModelParams,
    theta: f64,
    interval: f64,
    count: usize,
    substeps: u64,
    opts: &TwaOptions,
) -> Result<MeanFieldSeries> {
    ens.check_model(model)?;
    let limit = model.round_trip() / 2.0;
    if !(interval <= limit) {
        return Err(Error::Aliasing { interval, limit });
    }
    let substeps = substeps.max(1);
    let dt = interval / substeps as f64;
    let sub = TwaOptions { dt, ..*opts };
    let stepper = make_stepper(ens, model, &sub)?;
    let scale = sub.noise.then(|| (dt / (2.0 * ens.ntilde)).sqrt());
    let epoch = ens.epoch_for(dt);
    let t_start = ens.time;
    let mut values = Vec::with_capacity(count);
    let mut errors = Vec::with_capacity(count);
    for k in 0..count {
        if k > 0 {
            advance(ens, &stepper, substeps, scale)?;
            ens.set_steps(ens.steps + substeps, epoch);
        }
        let t = ens.time;
        let psi: Vec<Complex64> = ens.trajectories.iter().map(|tr| field_at(&tr.amps, model, theta, t)).collect();
        let (m, se) = crate::observables::complex_mean_se(&psi);
        values.push(m);
        errors.push(se);
    }
    Ok(MeanFieldSeries { t0: t_start, interval, ntilde: ens.ntilde, theta, values, se: errors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::gp_step;
    use crate::observables::{mode_occupation, TimeSeriesRecord};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_model(modes: usize, ntilde: f64) -> ModelParams {
        ModelParams { ntilde, ..ModelParams::baseline(modes) }
    }

    fn random_field(modes: usize, seed: u64, amp: f64) -> ModeField {
        let mut s = NoiseStream::new(seed, 0);
        ModeField::from_amps((0..modes).map(|_| s.complex_normal() * amp).collect())
    }

    #[test]
    fn initial_moments() {
        let model = small_model(5, 1e-2);
        let f = random_field(5, 1, 100.0);
        let n = 4000;
        let ens = sample_initial(&f, &model, n, NoisePolicy::new(2)).unwrap();
        let var = 1.0 / (2.0 * model.ntilde);
        for l in 0..5 {
            let mean: Complex64 = ens.trajectories.iter().map(|t| t.amps[l]).sum::<Complex64>() / n as f64;
            assert!((mean - f.amps[l]).norm() < 3.0 * var.sqrt() / (n as f64).sqrt() * 1.5);
            let m2 = ens.trajectories.iter().map(|t| (t.amps[l] - f.amps[l]).norm_sqr()).sum::<f64>() / n as f64;
            assert!((m2 / var - 1.0).abs() < 5.0 / (n as f64).sqrt());
        }
        assert!(sample_initial(&f, &model, 1, NoisePolicy::new(2)).is_err());
        let bad = ModelParams { ntilde: 0.0, ..model };
        assert!(sample_initial(&f, &bad, 4, NoisePolicy::new(2)).is_err());
    }

    #[test]
    fn classical_limit_matches_gp() {
        let model = small_model(7, 1.0);
        let f = random_field(7, 5, 30.0);
        let mut ens = Ensemble::replicate(&f, &model, 3, NoisePolicy::new(0));
        let opts = TwaOptions { dt: 1e-3, noise: false, wigner_shift: false, ..Default::default() };
        let mut g = f.clone();
        for _ in 0..20 {
            twa_step(&mut ens, &model, &opts).unwrap();
            g = gp_step(&g, &model, 1e-3, Scheme::SplitStep).unwrap();
        }
        for t in &ens.trajectories {
            assert_eq!(t.amps, g.amps);
        }
    }

    #[test]
    fn huge_ntilde_approaches_gp() {
        let model = small_model(7, 1e30);
        let f = random_field(7, 6, 30.0);
        let mut ens = Ensemble::replicate(&f, &model, 2, NoisePolicy::new(0));
        let opts = TwaOptions { dt: 1e-3, ..Default::default() };
        let mut g = f.clone();
        for _ in 0..20 {
            twa_step(&mut ens, &model, &opts).unwrap();
            g = gp_step(&g, &model, 1e-3, Scheme::SplitStep).unwrap();
        }
        assert!(crate::field::rel_l2(&ens.trajectories[0].amps, &g.amps) < 1e-12);
    }

    #[test]
    fn ornstein_uhlenbeck_variance() {
        let model = ModelParams { g: 0.0, drive: 0.0, ntilde: 1e-3, ..ModelParams::baseline(3) };
        let mut ens = sample_initial(&ModeField::zeros(3), &model, 2000, NoisePolicy::new(11)).unwrap();
        let opts = TwaOptions { dt: 1e-2, ..Default::default() };
        let mut rec = TimeSeriesRecord::classical(&model, 1e-2, 64);
        evolve_twa(&mut ens, &model, 12.0, 4.0, &opts, &mut rec).unwrap();
        let occ = mode_occupation(&ens, false);
        for m in &occ.mean {
            // Ñ⟨|α̃|²⟩ → 1/2
            assert!((m - 0.5).abs() < 0.05 * 0.5, "{m}");
        }
        assert_eq!(rec.ticks.len(), 3);
        assert_relative_eq!(rec.ticks[2].tau, 6.0, max_relative = 1e-12);
    }

    #[test]
    fn schedule_independent() {
        let model = small_model(7, 1e-2);
        let f = random_field(7, 9, 20.0);
        let opts = TwaOptions { dt: 1e-3, ..Default::default() };
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let mut ens = sample_initial(&f, &model, 37, NoisePolicy::new(4)).unwrap();
                let mut rec = TimeSeriesRecord::classical(&model, 1e-3, 32);
                evolve_twa(&mut ens, &model, 0.05, 0.01, &opts, &mut rec).unwrap();
                rec
            })
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn chunked_evolution_matches_single_call() {
        let model = small_model(5, 1e-2);
        let f = random_field(5, 3, 20.0);
        let opts = TwaOptions { dt: 1e-3, ..Default::default() };
        let start = sample_initial(&f, &model, 6, NoisePolicy::new(2)).unwrap();
        let mut a = start.clone();
        let mut ra = TimeSeriesRecord::classical(&model, 1e-3, 32);
        evolve_twa(&mut a, &model, 0.09, 0.01, &opts, &mut ra).unwrap();
        let mut b = start;
        let mut rb = TimeSeriesRecord::classical(&model, 1e-3, 32);
        for t_end in [0.03, 0.06, 0.09] {
            evolve_twa(&mut b, &model, t_end, 0.01, &opts, &mut rb).unwrap();
        }
        assert_eq!(ra, rb);
        assert_eq!(a.time, b.time);
        assert_eq!(ra.ticks.len(), 9);
    }

    #[test]
    fn split_runs_resume_exactly() {
        let model = small_model(5, 1e-2);
        let f = random_field(5, 3, 20.0);
        let opts = TwaOptions { dt: 1e-3, ..Default::default() };
        let mut a = sample_initial(&f, &model, 4, NoisePolicy::new(1)).unwrap();
        let mut b = a.clone();
        for _ in 0..10 {
            twa_step(&mut a, &model, &opts).unwrap();
        }
        for _ in 0..4 {
            twa_step(&mut b, &model, &opts).unwrap();
        }
        // rebuild streams from saved positions
        for t in &mut b.trajectories {
            t.noise = NoiseStream::at(1, t.noise.index(), t.noise.word_pos());
        }
        for _ in 0..6 {
            twa_step(&mut b, &model, &opts).unwrap();
        }
        for (x, y) in a.trajectories.iter().zip(&b.trajectories) {
            assert_eq!(x.amps, y.amps);
        }
    }

    #[test]
    fn model_mismatch_refused() {
        let model = small_model(5, 1e-2);
        let mut ens = Ensemble::replicate(&ModeField::zeros(5), &model, 2, NoisePolicy::new(0));
        let other = ModelParams { d2: 0.03, ..model };
        assert!(matches!(twa_step(&mut ens, &other, &TwaOptions::default()), Err(Error::HashMismatch { .. })));
    }

    #[test]
    fn divergence_reports_trajectory() {
        let model = ModelParams { g: 1.0, ..small_model(5, 1.0) };
        let mut ens = Ensemble::replicate(&ModeField::zeros(5), &model, 3, NoisePolicy::new(0));
        ens.trajectories[1].amps[2] = c(1e200, 0.0);
        let opts = TwaOptions { dt: 1e-2, noise: false, ..Default::default() };
        match twa_step(&mut ens, &model, &opts) {
            Err(Error::Divergence { trajectory, .. }) => assert_eq!(trajectory, Some(1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mean_field_sampling_refuses_aliasing() {
        let model = small_model(5, 1.0);
        let mut ens = Ensemble::replicate(&ModeField::zeros(5), &model, 2, NoisePolicy::new(0));
        let t = model.round_trip();
        assert!(matches!(
            sample_mean_field(&mut ens, &model, 0.0, 0.6 * t, 4, 1, &TwaOptions::default()),
            Err(Error::Aliasing { .. })
        ));
    }
}
