// SPDX-License-Identifier: Apache-2.0

//! Undriven, linear cavity: the Wigner ensemble holds half a quantum per mode.
//!
//! cargo run --release --example vacuum -- [trajectories]

use kerrsim::field::ModeField;
use kerrsim::lattice::ModelParams;
use kerrsim::noise::NoisePolicy;
use kerrsim::observables::{mode_occupation, NullRecorder};
use kerrsim::twa::{evolve_twa, sample_initial, TwaOptions};

fn main() -> kerrsim::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(2000, |s| s.parse().expect("trajectories"));
    let model = ModelParams { g: 0.0, drive: 0.0, ntilde: 1e-4, ..ModelParams::baseline(11) };
    let mut ens = sample_initial(&ModeField::zeros(model.modes), &model, n, NoisePolicy::new(3))?;
    evolve_twa(&mut ens, &model, 20.0, 20.0, &TwaOptions::default(), &mut NullRecorder)?;
    let raw = mode_occupation(&ens, false);
    let sub = mode_occupation(&ens, true);
    println!("{:>4} {:>12} {:>12} {:>10}", "l", "N<|a|^2>", "N_l", "se");
    for (l, ((r, s), e)) in model.mode_numbers().zip(raw.mean.iter().zip(&sub.mean).zip(&sub.se)) {
        println!("{l:>4} {r:>12.4} {s:>12.4} {e:>10.4}");
    }
    Ok(())
}
