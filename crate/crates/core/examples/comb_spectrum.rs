// SPDX-License-Identifier: Apache-2.0

//! Lab-frame field at θ = 0: comb lines at multiples of D1, without and with
//! quantum noise.
//!
//! cargo run --release --example comb_spectrum -- [ntilde] [trajectories]

use kerrsim::analysis::{comb_spacing, detect_peaks, power_spectrum, DEFAULT_PROMINENCE};
use kerrsim::gp::{prepare_soliton, SeedSpec, SolitonOptions};
use kerrsim::lattice::ModelParams;
use kerrsim::noise::NoisePolicy;
use kerrsim::twa::{sample_initial, sample_mean_field, Ensemble, TwaOptions};

const SAMPLES_PER_PERIOD: usize = 32;
const PERIODS: f64 = 64.0;

fn spectrum(mut ens: Ensemble, model: &ModelParams, opts: &TwaOptions) -> kerrsim::Result<()> {
    let period = model.round_trip();
    let interval = period / SAMPLES_PER_PERIOD as f64;
    let substeps = (interval / opts.dt).ceil() as u64;
    let count = (PERIODS * SAMPLES_PER_PERIOD as f64) as usize;
    let series = sample_mean_field(&mut ens, model, 0.0, interval, count, substeps, opts)?;
    let spec = power_spectrum(&series, series.t0, PERIODS, period)?;
    let peaks = detect_peaks(&spec, DEFAULT_PROMINENCE);
    println!("  bin {:.2} kappa, {} lines above {}x median", spec.bin(), peaks.len(), DEFAULT_PROMINENCE);
    match comb_spacing(&spec, DEFAULT_PROMINENCE) {
        Ok(c) => println!("  spacing {:.4} ± {:.1e} kappa (D1 = {})", c.spacing, c.uncertainty, model.d1),
        Err(e) => println!("  {e}"),
    }
    Ok(())
}

fn main() -> kerrsim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let ntilde: f64 = args.first().map_or(1e-3, |s| s.parse().expect("ntilde"));
    let n_traj: usize = args.get(1).map_or(100, |s| s.parse().expect("trajectories"));
    let base = ModelParams::baseline(21);
    let (mut soliton, _) = prepare_soliton(&base, &SeedSpec::default(), &SolitonOptions::default())?;
    soliton.time = 0.0;

    println!("mean field, noise off");
    let quiet = TwaOptions { noise: false, wigner_shift: false, ..TwaOptions::default() };
    spectrum(Ensemble::replicate(&soliton, &base, 2, NoisePolicy::new(0)), &base, &quiet)?;

    println!("Wigner ensemble, N = {ntilde:e}, {n_traj} trajectories");
    let model = ModelParams { ntilde, ..base };
    let ens = sample_initial(&soliton, &model, n_traj, NoisePolicy::new(1))?;
    spectrum(ens, &model, &TwaOptions::default())
}
