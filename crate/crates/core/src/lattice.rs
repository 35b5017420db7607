// SPDX-License-Identifier: Apache-2.0

//! Resonator parameters: physical-to-dimensionless conversion, the mode
//! detuning profile, dispersion, the soliton threshold and the classicality
//! rescaling.
//!
//! Everything downstream works in units where the loss rate is one. SI values
//! only exist at the boundary (`PhysicalParams`, the parameter-file loader
//! and the intracavity-power helper).

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Pump specification: either the detuning from the pumped resonance or the
/// absolute pump angular frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PumpSpec {
    /// σ0 = ω_p − ω0 in rad/s.
    Detuning(f64),
    /// ω_p in rad/s.
    AngularFrequency(f64),
}

/// Microring parameters in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub radius: f64,
    pub area_eff: f64,
    pub quality_factor: f64,
    pub resonance_freq: f64,
    pub refractive_index: f64,
    pub kerr_n2: f64,
    /// Group-velocity dispersion β2 (s²/m). Negative is anomalous.
    pub beta2: f64,
    pub pump: PumpSpec,
    pub power_ext: f64,
    pub coupling_eta: f64,
}

impl PhysicalParams {
    /// Silicon-nitride ring encapsulated in silica, 100 µm radius, critically
    /// coupled. β2 is chosen so that D2 = 2.02e-2 κ and the pump power so that
    /// F = 1.8e4.
    pub fn silicon_nitride() -> Self {
        let omega0 = 2.0 * PI * 193.5e12;
        let q = 1.5e6;
        let kappa = omega0 / q;
        let n0 = 1.99;
        let radius = 100e-6;
        let d1 = SPEED_OF_LIGHT / (n0 * radius);
        let d2 = 2.02e-2 * kappa;
        let beta2 = -d2 * n0 / (SPEED_OF_LIGHT * d1 * d1);
        let sigma0 = -1.024 * kappa;
        let eta = 0.5;
        let drive: f64 = 1.8e4;
        let omega_p = omega0 + sigma0;
        PhysicalParams {
            radius,
            area_eff: 0.73 * 2.5e-12,
            quality_factor: q,
            resonance_freq: 193.5e12,
            refractive_index: n0,
            kerr_n2: 2.4e-19,
            beta2,
            pump: PumpSpec::Detuning(sigma0),
            power_ext: HBAR * omega_p * kappa * drive * drive / (4.0 * eta),
            coupling_eta: eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("radius", self.radius),
            ("area_eff", self.area_eff),
            ("quality_factor", self.quality_factor),
            ("resonance_freq", self.resonance_freq),
            ("refractive_index", self.refractive_index),
            ("kerr_n2", self.kerr_n2),
            ("power_ext", self.power_ext),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::ParameterDomain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.coupling_eta > 0.0 && self.coupling_eta <= 1.0) {
            return Err(Error::ParameterDomain(format!(
                "coupling_eta must lie in (0, 1], got {}",
                self.coupling_eta
            )));
        }
        if let PumpSpec::AngularFrequency(w) = self.pump {
            if !(w > 0.0) {
                return Err(Error::ParameterDomain(format!("pump frequency must be positive, got {w}")));
            }
        }
        if !self.beta2.is_finite() {
            return Err(Error::ParameterDomain("beta2 must be finite".into()));
        }
        Ok(())
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI * self.resonance_freq
    }

    pub fn kappa(&self) -> f64 {
        self.omega0() / self.quality_factor
    }

    pub fn length(&self) -> f64 {
        2.0 * PI * self.radius
    }

    pub fn pump_omega(&self) -> f64 {
        match self.pump {
            PumpSpec::Detuning(s) => self.omega0() + s,
            PumpSpec::AngularFrequency(w) => w,
        }
    }

    pub fn sigma0(&self) -> f64 {
        match self.pump {
            PumpSpec::Detuning(s) => s,
            PumpSpec::AngularFrequency(w) => w - self.omega0(),
        }
    }

    /// Kerr rate g in 1/s.
    pub fn kerr_rate(&self) -> f64 {
        let w0 = self.omega0();
        let n0 = self.refractive_index;
        HBAR * w0 * w0 * SPEED_OF_LIGHT * self.kerr_n2 / (n0 * n0 * self.area_eff * self.length())
    }

    /// Free spectral range D1 in rad/s.
    pub fn fsr(&self) -> f64 {
        SPEED_OF_LIGHT / (self.refractive_index * self.radius)
    }

    /// Second-order dispersion D2 in rad/s.
    pub fn d2(&self) -> f64 {
        let d1 = self.fsr();
        -(SPEED_OF_LIGHT / self.refractive_index) * d1 * d1 * self.beta2
    }

    /// Drive amplitude from P_ext = ħ ω_p κ F² / (4η).
    pub fn drive_amplitude(&self) -> f64 {
        (4.0 * self.coupling_eta * self.power_ext / (HBAR * self.pump_omega() * self.kappa())).sqrt()
    }
}

/// Dimensionless model parameters. Rates are in units of the loss rate κ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// κ in 1/s, when an SI scale is known.
    pub kappa_per_s: Option<f64>,
    /// Pump angular frequency in rad/s, when known (needed for power output).
    pub pump_omega: Option<f64>,
    pub g: f64,
    pub sigma0: f64,
    pub d1: f64,
    pub d2: f64,
    pub drive: f64,
    pub modes: usize,
    pub ntilde: f64,
    pub corotating: bool,
}

impl ModelParams {
    /// Baseline silicon-nitride operating point with `modes` modes in the
    /// co-rotating frame.
    pub fn baseline(modes: usize) -> Self {
        let kappa = 2.0 * PI * 193.5e12 / 1.5e6;
        ModelParams {
            kappa_per_s: Some(kappa),
            pump_omega: Some(2.0 * PI * 193.5e12 - 1.024 * kappa),
            g: 3.05e-9,
            sigma0: -1.024,
            d1: 1.8587e3,
            d2: 2.02e-2,
            drive: 1.8e4,
            modes,
            ntilde: 1.0,
            corotating: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 || self.modes % 2 == 0 {
            return Err(Error::ParameterDomain(format!(
                "mode count must be odd and positive, got {}",
                self.modes
            )));
        }
        if !(self.ntilde > 0.0) || !self.ntilde.is_finite() {
            return Err(Error::ParameterDomain(format!("ntilde must be positive, got {}", self.ntilde)));
        }
        if let Some(k) = self.kappa_per_s {
            if !(k > 0.0) {
                return Err(Error::ParameterDomain(format!("kappa must be positive, got {k}")));
            }
        }
        for (name, v) in [
            ("g", self.g),
            ("sigma0", self.sigma0),
            ("d1", self.d1),
            ("d2", self.d2),
            ("drive", self.drive),
        ] {
            if !v.is_finite() {
                return Err(Error::ParameterDomain(format!("{name} is not finite")));
            }
        }
        if self.g < 0.0 {
            return Err(Error::ParameterDomain(format!("g must be non-negative, got {}", self.g)));
        }
        Ok(())
    }

    /// Soliton runs refuse normal dispersion.
    pub fn require_anomalous(&self) -> Result<()> {
        if self.d2 > 0.0 {
            Ok(())
        } else {
            Err(Error::NormalDispersion { d2: self.d2 })
        }
    }

    pub fn half_width(&self) -> i64 {
        (self.modes as i64 - 1) / 2
    }

    /// Mode numbers l in storage order.
    pub fn mode_numbers(&self) -> impl Iterator<Item = i64> + Clone {
        let h = self.half_width();
        -h..=h
    }

    /// Storage index of mode l.
    pub fn index_of(&self, l: i64) -> Result<usize> {
        let h = self.half_width();
        if l.abs() > h {
            return Err(Error::ModeIndex { l, half: h });
        }
        Ok((l + h) as usize)
    }

    /// Kerr rate in 1/s if the SI scale is known.
    pub fn g_per_s(&self) -> Option<f64> {
        self.kappa_per_s.map(|k| self.g * k)
    }

    pub fn d1_per_s(&self) -> Option<f64> {
        self.kappa_per_s.map(|k| self.d1 * k)
    }

    pub fn d2_per_s(&self) -> Option<f64> {
        self.kappa_per_s.map(|k| self.d2 * k)
    }

    /// Soliton round-trip period 2π/D1 in 1/κ.
    pub fn round_trip(&self) -> f64 {
        2.0 * PI / self.d1
    }

    /// Hash over everything that determines the dynamics except Ñ. GP fields
    /// and TWA ensembles for different Ñ share it.
    pub fn physics_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"kerrsim-model-v1");
        for v in [self.g, self.sigma0, self.d1, self.d2, self.drive] {
            h.update(v.to_le_bytes());
        }
        h.update((self.modes as u64).to_le_bytes());
        h.update([self.corotating as u8]);
        hex::encode(&h.finalize()[..16])
    }
}

/// Converts SI resonator parameters to the dimensionless model.
pub fn derive_model_params(phys: &PhysicalParams, modes: usize, ntilde: f64) -> Result<ModelParams> {
    phys.validate()?;
    let kappa = phys.kappa();
    let model = ModelParams {
        kappa_per_s: Some(kappa),
        pump_omega: Some(phys.pump_omega()),
        g: phys.kerr_rate() / kappa,
        sigma0: phys.sigma0() / kappa,
        d1: phys.fsr() / kappa,
        d2: phys.d2() / kappa,
        drive: phys.drive_amplitude(),
        modes,
        ntilde,
        corotating: true,
    };
    model.validate()?;
    if phys.beta2 >= 0.0 {
        log::warn!("beta2 = {} >= 0: normal dispersion, soliton runs will refuse", phys.beta2);
    }
    Ok(model)
}

/// External pump power for a drive amplitude: P_ext = ħ ω_p κ F² / (4η).
pub fn pump_power(drive: f64, pump_omega: f64, kappa_per_s: f64, eta: f64) -> f64 {
    HBAR * pump_omega * kappa_per_s * drive * drive / (4.0 * eta)
}

/// σ_l = σ0 − D1 l − (D2/2) l², without the D1 term in the co-rotating frame.
pub fn detuning_profile(model: &ModelParams) -> Vec<f64> {
    model
        .mode_numbers()
        .map(|l| {
            let l = l as f64;
            let fsr = if model.corotating { 0.0 } else { model.d1 * l };
            model.sigma0 - fsr - 0.5 * model.d2 * l * l
        })
        .collect()
}

/// D_int(l) = (D2/2) l².
pub fn integrated_dispersion(model: &ModelParams, l: i64) -> Result<f64> {
    model.index_of(l)?;
    let l = l as f64;
    Ok(0.5 * model.d2 * l * l)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub drive_threshold: f64,
    pub above: bool,
}

/// F_thr = sqrt(κ/(2g)); above iff F > F_thr strictly.
pub fn soliton_threshold(model: &ModelParams) -> Result<Threshold> {
    if !(model.g > 0.0) {
        return Err(Error::ParameterDomain(format!("threshold needs g > 0, got {}", model.g)));
    }
    let drive_threshold = (0.5 / model.g).sqrt();
    Ok(Threshold { drive_threshold, above: model.drive > drive_threshold })
}

/// g ← gÑ, F ← F/√Ñ. F²g is preserved.
pub fn rescale(model: &ModelParams, factor: f64) -> Result<ModelParams> {
    if !(factor > 0.0) || !factor.is_finite() {
        return Err(Error::ParameterDomain(format!("rescale factor must be positive, got {factor}")));
    }
    let mut out = model.clone();
    out.g = model.g * factor;
    out.drive = model.drive / factor.sqrt();
    out.ntilde = model.ntilde * factor;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parameter files
// ---------------------------------------------------------------------------

/// `[model]` block. Each quantity may be given in κ units or SI, never both.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub kappa_per_s: Option<f64>,
    pub pump_omega_rad_per_s: Option<f64>,
    pub g_over_kappa: Option<f64>,
    pub g_per_s: Option<f64>,
    pub sigma0_over_kappa: Option<f64>,
    pub sigma0_rad_per_s: Option<f64>,
    pub d1_over_kappa: Option<f64>,
    pub d1_rad_per_s: Option<f64>,
    pub d2_over_kappa: Option<f64>,
    pub d2_rad_per_s: Option<f64>,
    pub drive_amplitude: f64,
    pub modes: usize,
    #[serde(default = "one")]
    pub ntilde: f64,
    #[serde(default = "yes")]
    pub corotating: bool,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// `[physical]` block, SI throughout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalBlock {
    pub radius_m: f64,
    pub area_eff_m2: f64,
    pub quality_factor: f64,
    pub resonance_freq_hz: f64,
    pub refractive_index: f64,
    pub kerr_n2_m2_per_w: f64,
    pub beta2_s2_per_m: f64,
    pub sigma0_rad_per_s: Option<f64>,
    pub pump_omega_rad_per_s: Option<f64>,
    pub power_ext_w: f64,
    pub coupling_eta: f64,
    pub modes: usize,
    #[serde(default = "one")]
    pub ntilde: f64,
    #[serde(default = "yes")]
    pub corotating: bool,
}

fn pick(name: &str, kappa_units: Option<f64>, si: Option<f64>, kappa: Option<f64>) -> Result<f64> {
    match (kappa_units, si) {
        (Some(_), Some(_)) => Err(Error::Config(format!(
            "{name} given both in kappa units and in SI units"
        ))),
        (Some(v), None) => Ok(v),
        (None, Some(v)) => match kappa {
            Some(k) => Ok(v / k),
            None => Err(Error::Config(format!("{name} given in SI units but kappa_per_s is missing"))),
        },
        (None, None) => Err(Error::Config(format!("{name} missing"))),
    }
}

impl ModelBlock {
    pub fn resolve(&self) -> Result<ModelParams> {
        let k = self.kappa_per_s;
        let model = ModelParams {
            kappa_per_s: k,
            pump_omega: self.pump_omega_rad_per_s,
            g: pick("g", self.g_over_kappa, self.g_per_s, k)?,
            sigma0: pick("sigma0", self.sigma0_over_kappa, self.sigma0_rad_per_s, k)?,
            d1: pick("d1", self.d1_over_kappa, self.d1_rad_per_s, k)?,
            d2: pick("d2", self.d2_over_kappa, self.d2_rad_per_s, k)?,
            drive: self.drive_amplitude,
            modes: self.modes,
            ntilde: self.ntilde,
            corotating: self.corotating,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn from_model(m: &ModelParams) -> Self {
        ModelBlock {
            kappa_per_s: m.kappa_per_s,
            pump_omega_rad_per_s: m.pump_omega,
            g_over_kappa: Some(m.g),
            sigma0_over_kappa: Some(m.sigma0),
            d1_over_kappa: Some(m.d1),
            d2_over_kappa: Some(m.d2),
            drive_amplitude: m.drive,
            modes: m.modes,
            ntilde: m.ntilde,
            corotating: m.corotating,
            ..Default::default()
        }
    }
}

impl PhysicalBlock {
    pub fn physical(&self) -> Result<PhysicalParams> {
        let pump = match (self.sigma0_rad_per_s, self.pump_omega_rad_per_s) {
            (Some(s), None) => PumpSpec::Detuning(s),
            (None, Some(w)) => PumpSpec::AngularFrequency(w),
            _ => {
                return Err(Error::Config(
                    "give exactly one of sigma0_rad_per_s and pump_omega_rad_per_s".into(),
                ))
            }
        };
        Ok(PhysicalParams {
            radius: self.radius_m,
            area_eff: self.area_eff_m2,
            quality_factor: self.quality_factor,
            resonance_freq: self.resonance_freq_hz,
            refractive_index: self.refractive_index,
            kerr_n2: self.kerr_n2_m2_per_w,
            beta2: self.beta2_s2_per_m,
            pump,
            power_ext: self.power_ext_w,
            coupling_eta: self.coupling_eta,
        })
    }

    pub fn resolve(&self) -> Result<ModelParams> {
        let mut m = derive_model_params(&self.physical()?, self.modes, self.ntilde)?;
        m.corotating = self.corotating;
        Ok(m)
    }
}

/// A parameter file holds exactly one of `[model]` or `[physical]`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub model: Option<ModelBlock>,
    pub physical: Option<PhysicalBlock>,
}

impl ParamFile {
    pub fn resolve(&self) -> Result<ModelParams> {
        match (&self.model, &self.physical) {
            (Some(m), None) => m.resolve(),
            (None, Some(p)) => p.resolve(),
            (Some(_), Some(_)) => Err(Error::Config("both [model] and [physical] blocks present".into())),
            (None, None) => Err(Error::Config("no [model] or [physical] block".into())),
        }
    }
}

pub fn parse_params(text: &str) -> Result<ModelParams> {
    let file: ParamFile = toml::from_str(text)?;
    file.resolve()
}

pub fn load_params(path: &Path) -> Result<ModelParams> {
    parse_params(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn silicon_nitride_kappa_and_kerr_rate() {
        let phys = PhysicalParams::silicon_nitride();
        let m = derive_model_params(&phys, 101, 1.0).unwrap();
        let kappa = m.kappa_per_s.unwrap();
        assert!((kappa - 8.1e8).abs() / 8.1e8 < 0.01, "kappa = {kappa}");
        assert!((m.g_per_s().unwrap() - 2.47).abs() < 0.01);
        assert!((m.g - 3.05e-9).abs() / 3.05e-9 < 0.01, "g = {}", m.g);
        assert_relative_eq!(m.d1, 1858.7, max_relative = 1e-3);
        assert_relative_eq!(m.d2, 2.02e-2, max_relative = 1e-12);
        assert_relative_eq!(m.drive, 1.8e4, max_relative = 1e-12);
        assert_relative_eq!(m.sigma0, -1.024, max_relative = 1e-12);
    }

    #[test]
    fn doubling_q_halves_kappa() {
        let a = PhysicalParams::silicon_nitride();
        let mut b = a.clone();
        b.quality_factor *= 2.0;
        assert_relative_eq!(b.kappa(), a.kappa() / 2.0, max_relative = 1e-15);
        assert_eq!(b.kerr_rate(), a.kerr_rate());
        let ga = a.kerr_rate() / a.kappa();
        let gb = b.kerr_rate() / b.kappa();
        assert_relative_eq!(gb, 2.0 * ga, max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_physical() {
        let mut p = PhysicalParams::silicon_nitride();
        p.quality_factor = 0.0;
        assert!(matches!(derive_model_params(&p, 21, 1.0), Err(Error::ParameterDomain(_))));
        let mut p = PhysicalParams::silicon_nitride();
        p.radius = -1.0;
        assert!(derive_model_params(&p, 21, 1.0).is_err());
        let mut p = PhysicalParams::silicon_nitride();
        p.area_eff = 0.0;
        assert!(derive_model_params(&p, 21, 1.0).is_err());
    }

    #[test]
    fn normal_dispersion_refused_for_solitons() {
        let mut p = PhysicalParams::silicon_nitride();
        p.beta2 = p.beta2.abs();
        let m = derive_model_params(&p, 21, 1.0).unwrap();
        assert!(m.d2 < 0.0);
        assert!(matches!(m.require_anomalous(), Err(Error::NormalDispersion { .. })));
    }

    #[test]
    fn pump_power_round_trip() {
        let p = PhysicalParams::silicon_nitride();
        let m = derive_model_params(&p, 21, 1.0).unwrap();
        let back = pump_power(m.drive, m.pump_omega.unwrap(), m.kappa_per_s.unwrap(), p.coupling_eta);
        assert_relative_eq!(back, p.power_ext, max_relative = 1e-12);
    }

    #[test]
    fn detuning_examples() {
        let mut m = ModelParams::baseline(21);
        m.corotating = false;
        let s = detuning_profile(&m);
        assert_eq!(s[m.index_of(0).unwrap()], m.sigma0);
        // −1.024 − 1858.7 − 0.0101
        let expected = -1.024 - 1858.7 - 0.0101;
        assert_relative_eq!(s[m.index_of(1).unwrap()], expected, max_relative = 1e-14);

        m.corotating = true;
        let s = detuning_profile(&m);
        for l in 1..=m.half_width() {
            assert_eq!(s[m.index_of(l).unwrap()], s[m.index_of(-l).unwrap()]);
        }
    }

    #[test]
    fn integrated_dispersion_examples() {
        let m = ModelParams::baseline(21);
        assert_eq!(integrated_dispersion(&m, 0).unwrap(), 0.0);
        assert_relative_eq!(integrated_dispersion(&m, 10).unwrap(), 1.01, max_relative = 1e-14);
        assert_eq!(integrated_dispersion(&m, 7).unwrap(), integrated_dispersion(&m, -7).unwrap());
        assert!(matches!(integrated_dispersion(&m, 11), Err(Error::ModeIndex { .. })));
    }

    #[test]
    fn threshold_examples() {
        let mut m = ModelParams::baseline(21);
        let t = soliton_threshold(&m).unwrap();
        // sqrt(0.5 / 3.05e-9)
        assert_relative_eq!(t.drive_threshold, 1.2804e4, max_relative = 1e-4);
        assert!(t.above);
        m.drive = t.drive_threshold;
        assert!(!soliton_threshold(&m).unwrap().above);
        m.g = 0.0;
        assert!(soliton_threshold(&m).is_err());
    }

    #[test]
    fn rescale_examples() {
        let m = ModelParams::baseline(21);
        assert_eq!(rescale(&m, 1.0).unwrap(), m);
        let r = rescale(&m, 1e-4).unwrap();
        assert_relative_eq!(r.g, 3.05e-13, max_relative = 1e-14);
        assert_relative_eq!(r.drive, 1.8e6, max_relative = 1e-14);
        assert!(rescale(&m, 0.0).is_err());
        assert!(rescale(&m, -2.0).is_err());
    }

    #[test]
    fn param_file_rejects_mixed_units() {
        let text = r#"
[model]
kappa_per_s = 8.1e8
g_over_kappa = 3.05e-9
g_per_s = 2.47
sigma0_over_kappa = -1.024
d1_over_kappa = 1858.7
d2_over_kappa = 0.0202
drive_amplitude = 1.8e4
modes = 21
"#;
        let err = parse_params(text).unwrap_err();
        assert!(err.to_string().contains("both"), "{err}");
    }

    #[test]
    fn param_file_si_keys_convert() {
        let text = r#"
[model]
kappa_per_s = 8.0e8
g_per_s = 2.4
sigma0_over_kappa = -1.024
d1_rad_per_s = 1.6e12
d2_over_kappa = 0.0202
drive_amplitude = 1.8e4
modes = 21
"#;
        let m = parse_params(text).unwrap();
        assert_relative_eq!(m.g, 3e-9, max_relative = 1e-14);
        assert_relative_eq!(m.d1, 2000.0, max_relative = 1e-14);
        assert!(m.corotating);
        assert_eq!(m.ntilde, 1.0);
    }

    #[test]
    fn param_file_physical_block() {
        let p = PhysicalParams::silicon_nitride();
        let text = format!(
            r#"
[physical]
radius_m = {}
area_eff_m2 = {}
quality_factor = {}
resonance_freq_hz = {}
refractive_index = {}
kerr_n2_m2_per_w = {}
beta2_s2_per_m = {}
sigma0_rad_per_s = {}
power_ext_w = {}
coupling_eta = {}
modes = 101
"#,
            p.radius,
            p.area_eff,
            p.quality_factor,
            p.resonance_freq,
            p.refractive_index,
            p.kerr_n2,
            p.beta2,
            p.sigma0(),
            p.power_ext,
            p.coupling_eta
        );
        let m = parse_params(&text).unwrap();
        assert_relative_eq!(m.drive, 1.8e4, max_relative = 1e-12);
        assert_eq!(m.modes, 101);
    }

    #[test]
    fn even_modes_rejected() {
        let mut m = ModelParams::baseline(21);
        m.modes = 20;
        assert!(m.validate().is_err());
    }

    #[test]
    fn hash_ignores_ntilde() {
        let m = ModelParams::baseline(21);
        let r = ModelParams { ntilde: 1e-3, ..m.clone() };
        assert_eq!(m.physics_hash(), r.physics_hash());
        let d = ModelParams { d2: 0.03, ..m.clone() };
        assert_ne!(m.physics_hash(), d.physics_hash());
    }
}
