// SPDX-License-Identifier: Apache-2.0

//! Wigner ensemble around the GP soliton: contrast decay at one Ñ.
//!
//! cargo run --release --example twa_decay -- [ntilde] [trajectories] [tau_end]

use std::time::Instant;

use kerrsim::analysis::{fit_gap, FitWindow};
use kerrsim::gp::{prepare_soliton, SeedSpec, SolitonOptions};
use kerrsim::lattice::ModelParams;
use kerrsim::noise::NoisePolicy;
use kerrsim::observables::{ensemble_tick, Recorder, RecordKind, TimeSeriesRecord};
use kerrsim::twa::{evolve_twa, sample_initial, TwaOptions};

fn main() -> kerrsim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let ntilde: f64 = args.first().map_or(1e-4, |s| s.parse().expect("ntilde"));
    let n_traj: usize = args.get(1).map_or(200, |s| s.parse().expect("trajectories"));
    let tau_end: f64 = args.get(2).map_or(20.0, |s| s.parse().expect("tau_end"));

    let base = ModelParams::baseline(21);
    let (soliton, _) = prepare_soliton(&base, &SeedSpec::default(), &SolitonOptions::default())?;
    let model = ModelParams { ntilde, ..base };
    let mut ens = sample_initial(&soliton, &model, n_traj, NoisePolicy::new(1))?;
    ens.time = 0.0;

    let opts = TwaOptions::default();
    let mut record = TimeSeriesRecord::classical(&model, opts.dt, opts.observables.grid);
    record.meta.kind = RecordKind::Wigner;
    record.meta.trajectories = n_traj;
    record.record(ensemble_tick(&ens, &model, &opts.observables)?)?;

    let clock = Instant::now();
    evolve_twa(&mut ens, &model, 2.0 * tau_end, 1.0, &opts, &mut record)?;
    println!("# {:.1} s", clock.elapsed().as_secs_f64());
    println!("# tau  N_tot  C  C_se");
    for t in record.ticks.iter().step_by(5) {
        println!("{:6.1} {:.5e} {:.5} {:.5}", t.tau, t.n_tot, t.contrast, t.contrast_se);
    }
    match fit_gap(&record, FitWindow::Auto) {
        Ok(fit) => println!(
            "Lambda = {:.4e} ± {:.2e} over tau in [{:.1}, {:.1}]",
            fit.lambda, fit.lambda_ci, fit.window.0, fit.window.1
        ),
        Err(e) => println!("fit failed: {e}"),
    }
    Ok(())
}
