// SPDX-License-Identifier: Apache-2.0

//! Run orchestration behind the `simulate` front end.
//!
//! Artifact layout under `<root>/<run.output>/`:
//!
//! | file                        | content                                  |
//! |-----------------------------|------------------------------------------|
//! | `config.toml`               | resolved configuration                   |
//! | `soliton.field`             | stationary GP field                      |
//! | `gp.rec`, `gp.tsv`          | GP relaxation record                     |
//! | `twa_<Ñ>.rec`, `.tsv`       | Wigner record per Ñ                      |
//! | `twa_<Ñ>.ckpt`              | latest checkpoint per Ñ                  |
//! | `spectrum_gp.tsv`           | noise-off comb spectrum                  |
//! | `spectrum_twa.tsv`          | Wigner spectrum at the largest Ñ         |
//! | `report.toml`               | gap table, power laws, comb spacing      |

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{
    comb_spacing, fit_gap, power_law_fit, power_spectrum, CombSpacing, FitWindow, GapFit, PowerLaw, SpectrumResult,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::field::ModeField;
use crate::gp::{evolve_gp, prepare_soliton, sech_seed, GpOptions, SeedSpec, SolitonOptions};
use crate::lattice::{soliton_threshold, ModelParams};
use crate::noise::NoisePolicy;
use crate::observables::{ensemble_tick, NullRecorder, ObservableOptions, RecordKind, TimeSeriesRecord};
use crate::persist::{
    load_checkpoint, load_field, load_record, record_digest, save_checkpoint, save_field, save_record,
    save_record_text, write_atomic, Checkpoint,
};
use crate::twa::{evolve_twa, sample_initial, sample_mean_field, Ensemble, TwaOptions};

/// Optional early stop, used to exercise checkpoint/resume.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunLimits {
    /// Stop after the first checkpoint at or beyond this time (1/κ).
    pub halt_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointOutcome {
    Complete(TimeSeriesRecord),
    Halted { checkpoint: PathBuf, time: f64 },
}

pub struct Runner {
    pub config: RunConfig,
    pub dir: PathBuf,
    pub limits: RunLimits,
    pool: rayon::ThreadPool,
}

/// Ñ formatted for file names.
pub fn ntilde_tag(ntilde: f64) -> String {
    format!("{ntilde:e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub ntilde: f64,
    pub trajectories: usize,
    pub t0: f64,
    pub periods: f64,
    pub bin: f64,
    pub spacing: Option<f64>,
    pub spacing_se: Option<f64>,
    pub peaks: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub ntilde: f64,
    pub record: String,
    pub record_digest: String,
    pub tau_star: f64,
    pub n_tot: f64,
    pub n_tot_se: f64,
    pub fit: Option<GapFit>,
    pub fit_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub model_hash: String,
    pub settings_digest: String,
    pub trajectories: usize,
    pub points: Vec<PointReport>,
    /// Λ strictly decreasing in Ñ over all fitted points.
    pub gap_monotone: bool,
    pub gap_vs_ntilde: Option<PowerLaw>,
    pub gap_vs_ntot: Option<PowerLaw>,
    pub ntot_vs_ntilde: Option<PowerLaw>,
    pub spectrum: Option<SpectrumSummary>,
}

impl Runner {
    /// Output directory is `root/<run.output>`; `workers` overrides the
    /// config.
    pub fn new(config: RunConfig, root: &Path, workers: Option<usize>, seed: Option<u64>) -> Result<Self> {
        let mut config = config;
        if let Some(s) = seed {
            config.run.seed = s;
        }
        if let Some(w) = workers {
            config.run.workers = Some(w);
        }
        config.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.run.workers.unwrap_or(0))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        let dir = root.join(&config.run.output);
        Ok(Runner { config, dir, limits: RunLimits::default(), pool })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write_config(&self) -> Result<()> {
        write_atomic(&self.path("config.toml"), self.config.to_toml()?.as_bytes())
    }

    fn gp_options(&self) -> GpOptions {
        GpOptions { dt: self.config.run.dt, scheme: self.config.run.scheme, grid: self.config.run.grid, ..GpOptions::default() }
    }

    fn twa_options(&self) -> TwaOptions {
        let r = &self.config.run;
        TwaOptions {
            dt: r.dt,
            scheme: r.scheme,
            noise: r.noise,
            wigner_shift: r.wigner_shift,
            observables: ObservableOptions { grid: r.grid, subtract_vacuum: r.subtract_vacuum, keep_density: false },
        }
    }

    /// Relaxes (or loads) the stationary soliton and writes it with its
    /// record. Below threshold the seed is only integrated, and only if the
    /// config allows it.
    pub fn run_gp(&self) -> Result<(ModeField, TimeSeriesRecord)> {
        let model = self.config.model()?;
        self.write_config()?;
        let s = &self.config.soliton;
        let above = soliton_threshold(&model)?;
        let (field, record) = if !above.above {
            if !self.config.run.allow_below_threshold {
                return Err(Error::ParameterDomain(format!(
                    "drive F = {} is not above F_thr = {}; set run.allow_below_threshold to integrate anyway",
                    model.drive, above.drive_threshold
                )));
            }
            let seed = match &s.field {
                Some(p) => load_field(p, &model)?,
                None => sech_seed(
                    &model,
                    s.width.unwrap_or_else(|| crate::gp::default_seed_width(&model)),
                    s.ratio.unwrap_or_else(|| crate::gp::default_seed_ratio(&model)),
                ),
            };
            evolve_gp(&seed, &model, s.t_relax, self.config.run.cadence, &self.gp_options())?
        } else {
            let seed = match &s.field {
                Some(p) => SeedSpec::Field(load_field(p, &model)?),
                None => SeedSpec::Sech { width: s.width, ratio: s.ratio },
            };
            let opts = SolitonOptions { t_relax: s.t_relax, gp: self.gp_options(), ..SolitonOptions::default() };
            prepare_soliton(&model, &seed, &opts)?
        };
        let mut record = record;
        record.meta.settings_digest = Some(self.config.settings_digest());
        save_field(&self.path("soliton.field"), &field, &model)?;
        save_record(&self.path("gp.rec"), &record)?;
        save_record_text(&self.path("gp.tsv"), &record)?;
        log::info!(
            "GP: N_tot = {:.6e}, contrast = {:.4}",
            record.ticks.last().map_or(f64::NAN, |t| t.n_tot),
            record.ticks.last().map_or(f64::NAN, |t| t.contrast)
        );
        Ok((field, record))
    }

    /// Soliton from a previous `gp` run in the same directory, or a fresh one.
    pub fn soliton(&self) -> Result<ModeField> {
        let model = self.config.model()?;
        let p = self.path("soliton.field");
        if p.exists() {
            load_field(&p, &model)
        } else {
            Ok(self.run_gp()?.0)
        }
    }

    fn point_seed(&self, index: usize) -> u64 {
        self.config.run.seed.wrapping_add(index as u64)
    }

    /// One Wigner run at `ntilde`. With `resume`, continues from that
    /// checkpoint; a completed record is returned as is.
    pub fn run_point(&self, soliton: &ModeField, ntilde: f64, index: usize, resume: Option<Checkpoint>) -> Result<PointOutcome> {
        let cfg = &self.config;
        let model = ModelParams { ntilde, ..cfg.model()? };
        let opts = self.twa_options();
        let digest = cfg.settings_digest();
        let tag = ntilde_tag(ntilde);
        let ckpt_path = self.path(&format!("twa_{tag}.ckpt"));
        let t_end = cfg.t_end();
        self.pool.install(|| -> Result<PointOutcome> {
            let (mut ens, mut record) = match resume {
                Some(ck) => {
                    let (e, r) = ck.restore(&model, &digest)?;
                    log::info!("resuming Ñ = {tag} at t = {}", e.time);
                    (e, r)
                }
                None => {
                    let mut start = soliton.clone();
                    start.time = 0.0;
                    let ens = sample_initial(&start, &model, cfg.run.trajectories, NoisePolicy::new(self.point_seed(index)))?;
                    let mut record = TimeSeriesRecord::classical(&model, opts.dt, opts.observables.grid);
                    record.meta.kind = RecordKind::Wigner;
                    record.meta.trajectories = ens.len();
                    record.meta.master_seed = Some(ens.master_seed);
                    record.meta.settings_digest = Some(digest.clone());
                    record.push(ensemble_tick(&ens, &model, &opts.observables)?)?;
                    (ens, record)
                }
            };
            let segment = cfg.run.checkpoint_every.unwrap_or(t_end);
            let n_segments = (t_end / segment).ceil() as u64;
            let mut k = (ens.time / segment + 1e-9).floor() as u64;
            while ens.time < t_end - 0.5 * opts.dt {
                k += 1;
                let stop = if k >= n_segments { t_end } else { k as f64 * segment };
                evolve_twa(&mut ens, &model, stop, cfg.run.cadence, &opts, &mut record)?;
                if cfg.run.checkpoint_every.is_some() {
                    save_checkpoint(&ckpt_path, &Checkpoint::capture(&ens, &record, &digest))?;
                    log::info!("Ñ = {tag}: checkpoint at t = {}", ens.time);
                    if let Some(h) = self.limits.halt_at {
                        if ens.time >= h && ens.time < t_end - 0.5 * opts.dt {
                            return Ok(PointOutcome::Halted { checkpoint: ckpt_path.clone(), time: ens.time });
                        }
                    }
                }
            }
            save_record(&self.path(&format!("twa_{tag}.rec")), &record)?;
            save_record_text(&self.path(&format!("twa_{tag}.tsv")), &record)?;
            Ok(PointOutcome::Complete(record))
        })
    }

    /// Single Wigner run at the first configured Ñ (or the model's).
    pub fn run_twa(&self, resume: Option<&Path>) -> Result<PointOutcome> {
        let model = self.config.model()?;
        let soliton = self.soliton()?;
        let ck = resume.map(load_checkpoint).transpose()?;
        self.run_point(&soliton, model.ntilde, 0, ck)
    }

    fn ntilde_list(&self) -> Result<Vec<f64>> {
        let list = &self.config.run.ntilde;
        if list.is_empty() {
            return Err(Error::Config("sweep needs a non-empty run.ntilde list".into()));
        }
        Ok(list.clone())
    }

    /// All sweep points, then the analysis. With `resume`, finished points
    /// are read back from disk and the checkpointed point continues.
    pub fn run_sweep(&self, resume: Option<&Path>) -> Result<Option<SweepReport>> {
        let list = self.ntilde_list()?;
        let soliton = self.soliton()?;
        let mut ck = resume.map(load_checkpoint).transpose()?;
        for (i, &n) in list.iter().enumerate() {
            let rec = self.path(&format!("twa_{}.rec", ntilde_tag(n)));
            let matching = ck.as_ref().is_some_and(|c| c.ntilde == n);
            if resume.is_some() && rec.exists() && !matching {
                log::info!("Ñ = {n:e}: record present, skipping");
                continue;
            }
            let this = if matching { ck.take() } else { None };
            match self.run_point(&soliton, n, i, this)? {
                PointOutcome::Complete(_) => {}
                PointOutcome::Halted { .. } => return Ok(None),
            }
        }
        Ok(Some(self.run_analyze()?))
    }

    /// Fits every stored record of the Ñ list and writes `report.toml`.
    pub fn run_analyze(&self) -> Result<SweepReport> {
        let cfg = &self.config;
        let model = cfg.model()?;
        let list = self.ntilde_list()?;
        let window = match (cfg.analysis.window_start, cfg.analysis.window_end) {
            (Some(start), Some(end)) => FitWindow::Range { start, end },
            (None, None) => FitWindow::Auto,
            _ => return Err(Error::Config("give both window_start and window_end or neither".into())),
        };
        let mut points = Vec::new();
        for &n in &list {
            let name = format!("twa_{}.rec", ntilde_tag(n));
            let record = load_record(&self.path(&name))?;
            if record.meta.model_hash != model.physics_hash() {
                return Err(Error::HashMismatch { expected: model.physics_hash(), found: record.meta.model_hash });
            }
            let last_tau = record.ticks.last().map_or(0.0, |t| t.tau);
            let tau_star = cfg.analysis.tau_star.min(last_tau);
            let tick = record.at_tau(tau_star).ok_or_else(|| Error::InsufficientData(format!("{name} is empty")))?;
            let (fit, fit_error) = match fit_gap(&record, window) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            points.push(PointReport {
                ntilde: n,
                record: name,
                record_digest: record_digest(&record)?,
                tau_star: tick.tau,
                n_tot: tick.n_tot,
                n_tot_se: tick.n_tot_se,
                fit,
                fit_error,
            });
        }
        let fitted: Vec<(&PointReport, &GapFit)> = points.iter().filter_map(|p| p.fit.as_ref().map(|f| (p, f))).collect();
        let mut sorted = fitted.clone();
        sorted.sort_by(|a, b| a.0.ntilde.total_cmp(&b.0.ntilde));
        let gap_monotone = fitted.len() == points.len() && sorted.windows(2).all(|w| w[1].1.lambda < w[0].1.lambda);
        let positive: Vec<_> = sorted.iter().filter(|(_, f)| f.lambda > 0.0).collect();
        let xs: Vec<f64> = positive.iter().map(|(p, _)| p.ntilde).collect();
        let ns: Vec<f64> = positive.iter().map(|(p, _)| p.n_tot).collect();
        let ls: Vec<f64> = positive.iter().map(|(_, f)| f.lambda).collect();
        let lse: Vec<f64> = positive.iter().map(|(_, f)| f.lambda_se).collect();
        let gap_vs_ntilde = power_law_fit(&xs, &ls, Some(&lse)).ok();
        let gap_vs_ntot = power_law_fit(&ns, &ls, Some(&lse)).ok();
        let all_x: Vec<f64> = points.iter().map(|p| p.ntilde).collect();
        let all_n: Vec<f64> = points.iter().map(|p| p.n_tot).collect();
        let all_nse: Vec<f64> = points.iter().map(|p| p.n_tot_se.max(f64::MIN_POSITIVE)).collect();
        let ntot_vs_ntilde = power_law_fit(&all_x, &all_n, Some(&all_nse)).ok();
        let spectrum = {
            let p = self.path("spectrum_twa.toml");
            if p.exists() {
                let text = std::fs::read_to_string(&p)?;
                Some(toml::from_str(&text)?)
            } else {
                None
            }
        };
        let report = SweepReport {
            model_hash: model.physics_hash(),
            settings_digest: cfg.settings_digest(),
            trajectories: cfg.run.trajectories,
            points,
            gap_monotone,
            gap_vs_ntilde,
            gap_vs_ntot,
            ntot_vs_ntilde,
            spectrum,
        };
        let text = toml::to_string(&report).map_err(|e| Error::Format(e.to_string()))?;
        write_atomic(&self.path("report.toml"), text.as_bytes())?;
        Ok(report)
    }

    /// Comb spectrum of the noise-off soliton.
    pub fn gp_spectrum(&self) -> Result<(SpectrumResult, CombSpacing)> {
        let model = self.config.model()?;
        let soliton = self.soliton()?;
        let mut start = soliton;
        start.time = 0.0;
        let ens = Ensemble::replicate(&start, &model, 2, NoisePolicy::new(0));
        let opts = TwaOptions { noise: false, wigner_shift: false, ..self.twa_options() };
        let (spec, comb) = self.spectrum_of(ens, &model, &opts)?;
        let comb = comb?;
        write_spectrum(&self.path("spectrum_gp.tsv"), &spec)?;
        Ok((spec, comb))
    }

    /// Spectrum of the Wigner mean field at the largest configured Ñ. The
    /// comb detection result is returned separately so that a missing comb
    /// still leaves the spectrum on disk.
    pub fn twa_spectrum(&self) -> Result<(SpectrumResult, Result<CombSpacing>)> {
        let list = self.ntilde_list()?;
        let ntilde = list.iter().cloned().fold(f64::MIN, f64::max);
        let model = ModelParams { ntilde, ..self.config.model()? };
        let mut start = self.soliton()?;
        start.time = 0.0;
        let n = self.config.spectrum.as_ref().and_then(|s| s.trajectories).unwrap_or(self.config.run.trajectories);
        let seed = self.point_seed(list.len());
        let (spec, comb) = self.pool.install(|| {
            let ens = sample_initial(&start, &model, n, NoisePolicy::new(seed))?;
            self.spectrum_of(ens, &model, &self.twa_options())
        })?;
        write_spectrum(&self.path("spectrum_twa.tsv"), &spec)?;
        let s = self.config.spectrum.clone().unwrap_or_default();
        let summary = SpectrumSummary {
            ntilde,
            trajectories: n,
            t0: spec.t0,
            periods: spec.n_periods,
            bin: spec.bin(),
            spacing: comb.as_ref().ok().map(|c| c.spacing),
            spacing_se: comb.as_ref().ok().map(|c| c.uncertainty),
            peaks: crate::analysis::detect_peaks(&spec, s.prominence).len(),
            error: comb.as_ref().err().map(|e| e.to_string()),
        };
        let text = toml::to_string(&summary).map_err(|e| Error::Format(e.to_string()))?;
        write_atomic(&self.path("spectrum_twa.toml"), text.as_bytes())?;
        Ok((spec, comb))
    }

    fn spectrum_of(&self, mut ens: Ensemble, model: &ModelParams, opts: &TwaOptions) -> Result<(SpectrumResult, Result<CombSpacing>)> {
        let s = self.config.spectrum.clone().unwrap_or_default();
        if s.t0 > 0.0 {
            evolve_twa(&mut ens, model, s.t0, s.t0, opts, &mut NullRecorder)?;
        }
        let period = model.round_trip();
        let interval = period / s.samples_per_period as f64;
        let substeps = (interval / opts.dt).ceil().max(1.0) as u64;
        let count = (s.periods * s.samples_per_period as f64).round() as usize;
        let series = sample_mean_field(&mut ens, model, 0.0, interval, count, substeps, opts)?;
        let spec = power_spectrum(&series, series.t0, s.periods, period)?;
        let comb = comb_spacing(&spec, s.prominence);
        Ok((spec, comb))
    }
}

fn write_spectrum(path: &Path, spec: &SpectrumResult) -> Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "# kerrsim spectrum")?;
    writeln!(buf, "# ntilde = {:e}", spec.ntilde)?;
    writeln!(buf, "# t0 = {} (1/kappa), periods = {}, period = {:e} (1/kappa)", spec.t0, spec.n_periods, spec.period)?;
    writeln!(buf, "# units: omega in kappa relative to the pump; power is S(omega) of ntilde*phi")?;
    writeln!(buf, "omega\tpower")?;
    for (w, p) in spec.omega.iter().zip(&spec.power) {
        writeln!(buf, "{w:e}\t{p:e}")?;
    }
    write_atomic(path, &buf)
}
