// SPDX-License-Identifier: Apache-2.0

//! Run configuration files.
//!
//! ```toml
//! [model]                 # or [physical]
//! g_over_kappa = 3.05e-9
//! sigma0_over_kappa = -1.024
//! d1_over_kappa = 1858.7
//! d2_over_kappa = 0.0202
//! drive_amplitude = 1.8e4
//! modes = 21
//!
//! [run]
//! output = "desk"
//! tau_end = 100.0
//! trajectories = 400
//! ntilde = [1e-5, 3e-5, 1e-4, 3e-4, 1e-3]
//! seed = 1
//! ```
//!
//! Times are in 1/κ except where a key says `tau`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gp::{Scheme, DEFAULT_DT, DEFAULT_T_RELAX};
use crate::lattice::{ModelBlock, ModelParams, ParamFile, PhysicalBlock};
use crate::observables::DEFAULT_GRID;

/// Environment variable holding the default output root.
pub const OUTPUT_ROOT_ENV: &str = "KERRSIM_OUTPUT";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunBlock {
    /// Output subdirectory under the output root.
    pub output: String,
    /// Run length in 1/κ; give this or `tau_end`.
    pub t_end: Option<f64>,
    pub tau_end: Option<f64>,
    pub dt: f64,
    /// Tick spacing in 1/κ.
    pub cadence: f64,
    pub trajectories: usize,
    /// Ñ values. `twa` uses the first; `sweep` runs them all.
    pub ntilde: Vec<f64>,
    pub seed: u64,
    pub grid: usize,
    /// Checkpoint spacing in 1/κ; must be a multiple of `cadence`.
    pub checkpoint_every: Option<f64>,
    pub workers: Option<usize>,
    pub noise: bool,
    pub wigner_shift: bool,
    pub subtract_vacuum: bool,
    pub scheme: Scheme,
    pub allow_below_threshold: bool,
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            output: "run".into(),
            t_end: None,
            tau_end: None,
            dt: DEFAULT_DT,
            cadence: 1.0,
            trajectories: 1000,
            ntilde: Vec::new(),
            seed: 1,
            grid: DEFAULT_GRID,
            checkpoint_every: None,
            workers: None,
            noise: true,
            wigner_shift: true,
            subtract_vacuum: true,
            scheme: Scheme::SplitStep,
            allow_below_threshold: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolitonBlock {
    pub width: Option<f64>,
    pub ratio: Option<f64>,
    /// Start from a stored field instead of a sech seed.
    pub field: Option<PathBuf>,
    pub t_relax: f64,
}

impl Default for SolitonBlock {
    fn default() -> Self {
        SolitonBlock { width: None, ratio: None, field: None, t_relax: DEFAULT_T_RELAX }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumBlock {
    /// Start of the transform window in 1/κ.
    pub t0: f64,
    /// Window length in round trips (N_T).
    pub periods: f64,
    pub samples_per_period: usize,
    /// Ensemble size for the Wigner spectrum (defaults to the run's).
    pub trajectories: Option<usize>,
    pub prominence: f64,
}

impl Default for SpectrumBlock {
    fn default() -> Self {
        SpectrumBlock { t0: 20.0, periods: 64.0, samples_per_period: 32, trajectories: None, prominence: 10.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisBlock {
    /// Reference time for N_tot, clamped to the end of each record.
    pub tau_star: f64,
    pub window_start: Option<f64>,
    pub window_end: Option<f64>,
}

impl Default for AnalysisBlock {
    fn default() -> Self {
        AnalysisBlock { tau_star: 60.0, window_start: None, window_end: None }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelBlock>,
    pub physical: Option<PhysicalBlock>,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub soliton: SolitonBlock,
    pub spectrum: Option<SpectrumBlock>,
    #[serde(default)]
    pub analysis: AnalysisBlock,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Model parameters; Ñ is the first `run.ntilde` entry if any.
    pub fn model(&self) -> Result<ModelParams> {
        let pf = ParamFile { model: self.model.clone(), physical: self.physical.clone() };
        let mut m = pf.resolve()?;
        if let Some(&n) = self.run.ntilde.first() {
            m.ntilde = n;
        }
        m.validate()?;
        Ok(m)
    }

    pub fn t_end(&self) -> f64 {
        match (self.run.t_end, self.run.tau_end) {
            (Some(t), _) => t,
            (None, Some(tau)) => 2.0 * tau,
            (None, None) => 200.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model()?;
        let r = &self.run;
        if r.t_end.is_some() && r.tau_end.is_some() {
            return Err(Error::Config("give t_end or tau_end, not both".into()));
        }
        if !(self.t_end() > 0.0) {
            return Err(Error::Config("run length must be positive".into()));
        }
        if !(r.dt > 0.0) || !(r.cadence >= r.dt) {
            return Err(Error::Config(format!("need 0 < dt <= cadence, got dt = {}, cadence = {}", r.dt, r.cadence)));
        }
        if r.trajectories < 2 {
            return Err(Error::Config("need at least 2 trajectories".into()));
        }
        if r.ntilde.iter().any(|n| !(*n > 0.0)) {
            return Err(Error::Config("ntilde values must be positive".into()));
        }
        if r.grid < 2 {
            return Err(Error::Config("grid too small".into()));
        }
        if let Some(c) = r.checkpoint_every {
            let k = c / r.cadence;
            if !(c > 0.0) || (k - k.round()).abs() > 1e-9 || k.round() < 1.0 {
                return Err(Error::Config(format!(
                    "checkpoint_every = {c} is not a positive multiple of cadence = {}",
                    r.cadence
                )));
            }
        }
        if r.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if let Some(s) = &self.spectrum {
            if !(s.periods >= 1.0) || s.samples_per_period < 2 || !(s.t0 >= 0.0) {
                return Err(Error::Config("spectrum needs periods >= 1, samples_per_period >= 2, t0 >= 0".into()));
            }
        }
        Ok(())
    }

    /// Digest of the settings that change the numbers of a Wigner run.
    pub fn settings_digest(&self) -> String {
        let r = &self.run;
        let mut h = Sha256::new();
        h.update(b"kerrsim-settings-v1");
        for v in [r.dt, r.cadence, r.checkpoint_every.unwrap_or(0.0)] {
            h.update(v.to_le_bytes());
        }
        h.update((r.trajectories as u64).to_le_bytes());
        h.update((r.grid as u64).to_le_bytes());
        h.update([r.noise as u8, r.wigner_shift as u8, r.subtract_vacuum as u8, r.scheme as u8]);
        hex::encode(&h.finalize()[..16])
    }

    /// Desk-scale sweep: N_m = 21, 400 trajectories, five Ñ values, τ to 100.
    pub fn desk_preset() -> Self {
        RunConfig {
            model: Some(ModelBlock::from_model(&ModelParams::baseline(21))),
            physical: None,
            run: RunBlock {
                output: "desk".into(),
                tau_end: Some(100.0),
                trajectories: 400,
                ntilde: vec![1e-5, 3e-5, 1e-4, 3e-4, 1e-3],
                checkpoint_every: Some(20.0),
                ..RunBlock::default()
            },
            soliton: SolitonBlock::default(),
            spectrum: Some(SpectrumBlock::default()),
            analysis: AnalysisBlock::default(),
        }
    }

    /// Full-scale configuration: N_m = 101, Ñ from 6.3e-6 to 1, τ to 60 and
    /// N_T = 2e4 round trips. Far beyond desk resources; shipped for reference.
    pub fn full_scale_preset() -> Self {
        RunConfig {
            model: Some(ModelBlock::from_model(&ModelParams::baseline(101))),
            physical: None,
            run: RunBlock {
                output: "full".into(),
                tau_end: Some(60.0),
                trajectories: 1000,
                ntilde: vec![6.3e-6, 2e-5, 6.3e-5, 2e-4, 6.3e-4, 2e-3, 6.3e-3, 2e-2, 6.3e-2, 0.2, 0.63, 1.0],
                checkpoint_every: Some(10.0),
                ..RunBlock::default()
            },
            soliton: SolitonBlock::default(),
            spectrum: Some(SpectrumBlock { periods: 2e4, samples_per_period: 128, ..SpectrumBlock::default() }),
            analysis: AnalysisBlock::default(),
        }
    }
}

pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model]
g_over_kappa = 3.05e-9
sigma0_over_kappa = -1.024
d1_over_kappa = 1858.7
d2_over_kappa = 0.0202
drive_amplitude = 1.8e4
modes = 21
"#;

    #[test]
    fn minimal_config_defaults() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.run.dt, DEFAULT_DT);
        assert_eq!(c.t_end(), 200.0);
        assert_eq!(c.model().unwrap().ntilde, 1.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let both = format!("{MINIMAL}\n[physical]\nradius_m = 1.0\n");
        assert!(RunConfig::parse(&both).is_err());
        assert!(RunConfig::parse("[run]\ndt = 1e-3\n").is_err());
        let ck = format!("{MINIMAL}\n[run]\ncadence = 1.0\ncheckpoint_every = 1.5\n");
        assert!(matches!(RunConfig::parse(&ck), Err(Error::Config(_))));
        let typo = format!("{MINIMAL}\n[run]\ncadense = 1.0\n");
        assert!(matches!(RunConfig::parse(&typo), Err(Error::Config(_))));
        let lengths = format!("{MINIMAL}\n[run]\nt_end = 1.0\ntau_end = 1.0\n");
        assert!(RunConfig::parse(&lengths).is_err());
    }

    #[test]
    fn presets_round_trip() {
        for p in [RunConfig::desk_preset(), RunConfig::full_scale_preset()] {
            let text = p.to_toml().unwrap();
            let back = RunConfig::parse(&text).unwrap();
            assert_eq!(back.model().unwrap(), p.model().unwrap());
            assert_eq!(back.run.ntilde, p.run.ntilde);
            assert_eq!(back.settings_digest(), p.settings_digest());
        }
        let d = RunConfig::desk_preset();
        assert_eq!(d.model().unwrap().modes, 21);
        assert_eq!(d.t_end(), 200.0);
    }

    #[test]
    fn digest_tracks_settings() {
        let a = RunConfig::desk_preset();
        let mut b = a.clone();
        b.run.dt = 1e-3;
        assert_ne!(a.settings_digest(), b.settings_digest());
        let mut c = a.clone();
        c.run.workers = Some(3);
        assert_eq!(a.settings_digest(), c.settings_digest());
    }
}
