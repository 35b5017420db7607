// SPDX-License-Identifier: Apache-2.0

//! On-disk formats: field files, binary and text records, checkpoints.
//!
//! Binary files start with an 8-byte magic and a little-endian u32 format
//! version, followed by a bincode payload. Writes go to a sibling temporary
//! file that is renamed into place.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ModeField;
use crate::lattice::ModelParams;
use crate::noise::NoiseStream;
use crate::observables::TimeSeriesRecord;
use crate::twa::{Ensemble, Epoch, Trajectory};

pub const FIELD_MAGIC: &[u8; 8] = b"KSFIELD\0";
pub const RECORD_MAGIC: &[u8; 8] = b"KSRECRD\0";
pub const CHECKPOINT_MAGIC: &[u8; 8] = b"KSCHKPT\0";
pub const FORMAT_VERSION: u32 = 1;

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn encode<T: Serialize>(magic: &[u8; 8], value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(64);
    out.extend_from_slice(magic);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    bincode::serialize_into(&mut out, value)?;
    Ok(out)
}

fn decode<T: DeserializeOwned>(magic: &[u8; 8], path: &Path) -> Result<T> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 12 || &bytes[..8] != magic {
        return Err(Error::Format(format!("{} is not a {} file", path.display(), kind_name(magic))));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "{}: format version {version}, this build reads {FORMAT_VERSION}",
            path.display()
        )));
    }
    Ok(bincode::deserialize(&bytes[12..])?)
}

fn kind_name(magic: &[u8; 8]) -> &'static str {
    match magic {
        m if m == FIELD_MAGIC => "field",
        m if m == RECORD_MAGIC => "record",
        _ => "checkpoint",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldFile {
    pub modes: usize,
    pub corotating: bool,
    pub model_hash: String,
    pub field: ModeField,
}

pub fn save_field(path: &Path, field: &ModeField, model: &ModelParams) -> Result<()> {
    let file = FieldFile {
        modes: model.modes,
        corotating: model.corotating,
        model_hash: model.physics_hash(),
        field: field.clone(),
    };
    write_atomic(path, &encode(FIELD_MAGIC, &file)?)
}

/// Loads a field, refusing one made for a different mode count, frame or
/// physics.
pub fn load_field(path: &Path, model: &ModelParams) -> Result<ModeField> {
    let file: FieldFile = decode(FIELD_MAGIC, path)?;
    if file.modes != model.modes || file.field.modes() != model.modes {
        return Err(Error::Config(format!(
            "field file has {} modes, model has {}",
            file.modes, model.modes
        )));
    }
    if file.corotating != model.corotating {
        return Err(Error::Config("field file was written in a different frame".into()));
    }
    let h = model.physics_hash();
    if file.model_hash != h {
        return Err(Error::HashMismatch { expected: file.model_hash, found: h });
    }
    Ok(file.field)
}

pub fn save_record(path: &Path, record: &TimeSeriesRecord) -> Result<()> {
    write_atomic(path, &encode(RECORD_MAGIC, record)?)
}

pub fn load_record(path: &Path) -> Result<TimeSeriesRecord> {
    decode(RECORD_MAGIC, path)
}

/// SHA-256 of the binary encoding of a record, hex encoded.
pub fn record_digest(record: &TimeSeriesRecord) -> Result<String> {
    use sha2::{Digest, Sha256};
    let bytes = encode(RECORD_MAGIC, record)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Columnar text: a `#` header with metadata and units, then one row per
/// tick.
pub fn write_record_text(w: &mut dyn Write, record: &TimeSeriesRecord) -> std::io::Result<()> {
    let m = &record.meta;
    writeln!(w, "# kerrsim record, format {}", m.version)?;
    writeln!(w, "# kind = {:?}", m.kind)?;
    writeln!(w, "# model_hash = {}", m.model_hash)?;
    writeln!(w, "# ntilde = {:e}", m.ntilde)?;
    writeln!(w, "# modes = {}", m.modes)?;
    writeln!(w, "# grid = {}", m.grid)?;
    writeln!(w, "# dt = {:e}", m.dt)?;
    writeln!(w, "# trajectories = {}", m.trajectories)?;
    writeln!(w, "# code_version = {}", m.code_version)?;
    if let Some(d) = &m.settings_digest {
        writeln!(w, "# settings_digest = {d}")?;
    }
    match m.master_seed {
        Some(s) => writeln!(w, "# master_seed = {s}")?,
        None => writeln!(w, "# master_seed = none")?,
    }
    writeln!(w, "# frame = {}", if m.corotating { "corotating" } else { "lab" })?;
    writeln!(w, "# d1 = {:e}", m.d1)?;
    writeln!(w, "# units: tau = kappa*t/2; photon numbers are physical (rescaling undone);")?;
    writeln!(w, "#        phi is the rescaled lab-frame mean field at theta = 0 in 1/sqrt(rad);")?;
    writeln!(w, "#        *_se columns are standard errors over trajectories (jackknife for contrast)")?;
    let h = (m.modes as i64 - 1) / 2;
    let mut cols = vec![
        "tau".to_string(),
        "n_tot".into(),
        "n_tot_se".into(),
        "contrast".into(),
        "contrast_se".into(),
        "phi_re".into(),
        "phi_im".into(),
        "phi_se".into(),
    ];
    cols.extend((-h..=h).map(|l| format!("N_{l}")));
    cols.extend((-h..=h).map(|l| format!("N_{l}_se")));
    writeln!(w, "{}", cols.join("\t"))?;
    for t in &record.ticks {
        let mut row = vec![
            format!("{}", t.tau),
            format!("{:e}", t.n_tot),
            format!("{:e}", t.n_tot_se),
            format!("{}", t.contrast),
            format!("{:e}", t.contrast_se),
            format!("{:e}", t.mean_field.re),
            format!("{:e}", t.mean_field.im),
            format!("{:e}", t.mean_field_se),
        ];
        row.extend(t.occupations.iter().map(|v| format!("{v:e}")));
        row.extend(t.occupations_se.iter().map(|v| format!("{v:e}")));
        writeln!(w, "{}", row.join("\t"))?;
    }
    Ok(())
}

pub fn save_record_text(path: &Path, record: &TimeSeriesRecord) -> Result<()> {
    let mut buf = BufWriter::new(Vec::new());
    write_record_text(&mut buf, record)?;
    write_atomic(path, &buf.into_inner().map_err(|e| e.into_error())?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryState {
    pub amps: Vec<Complex64>,
    pub stream: u64,
    pub word_pos: u128,
}

/// Everything needed to continue a Wigner run bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub model_hash: String,
    /// Digest of the run settings that affect the numbers (dt, cadence,
    /// options). A resume under different settings is refused.
    pub settings_digest: String,
    pub ntilde: f64,
    pub master_seed: u64,
    pub time: f64,
    pub steps: u64,
    pub epoch: Option<Epoch>,
    pub trajectories: Vec<TrajectoryState>,
    pub record: TimeSeriesRecord,
}

impl Checkpoint {
    pub fn capture(ens: &Ensemble, record: &TimeSeriesRecord, settings_digest: &str) -> Self {
        Checkpoint {
            model_hash: ens.model_hash.clone(),
            settings_digest: settings_digest.to_string(),
            ntilde: ens.ntilde,
            master_seed: ens.master_seed,
            time: ens.time,
            steps: ens.steps,
            epoch: ens.epoch,
            trajectories: ens
                .trajectories
                .iter()
                .map(|t| TrajectoryState { amps: t.amps.clone(), stream: t.noise.index(), word_pos: t.noise.word_pos() })
                .collect(),
            record: record.clone(),
        }
    }

    /// Rebuilds the ensemble after checking it belongs to `model` and was
    /// written under the same settings.
    pub fn restore(self, model: &ModelParams, settings_digest: &str) -> Result<(Ensemble, TimeSeriesRecord)> {
        let h = model.physics_hash();
        if self.model_hash != h {
            return Err(Error::HashMismatch { expected: self.model_hash, found: h });
        }
        if self.settings_digest != settings_digest {
            return Err(Error::HashMismatch { expected: self.settings_digest, found: settings_digest.to_string() });
        }
        if self.ntilde != model.ntilde {
            return Err(Error::Config(format!(
                "checkpoint is for ntilde = {}, run is for {}",
                self.ntilde, model.ntilde
            )));
        }
        if self.trajectories.iter().any(|t| t.amps.len() != model.modes) {
            return Err(Error::Format("checkpoint trajectory length does not match the model".into()));
        }
        let seed = self.master_seed;
        let ens = Ensemble {
            trajectories: self
                .trajectories
                .into_iter()
                .map(|t| Trajectory { amps: t.amps, noise: NoiseStream::at(seed, t.stream, t.word_pos) })
                .collect(),
            ntilde: self.ntilde,
            model_hash: self.model_hash,
            master_seed: seed,
            time: self.time,
            steps: self.steps,
            epoch: self.epoch,
        };
        Ok((ens, self.record))
    }
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    write_atomic(path, &encode(CHECKPOINT_MAGIC, ckpt)?)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    decode(CHECKPOINT_MAGIC, path)
}
