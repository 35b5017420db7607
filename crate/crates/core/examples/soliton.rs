// SPDX-License-Identifier: Apache-2.0

//! Relax a sech seed to the stationary single soliton and print its comb.
//!
//! cargo run --release --example soliton -- [modes]

use kerrsim::gp::{default_seed_ratio, default_seed_width, prepare_soliton, SeedSpec, SolitonOptions};
use kerrsim::lattice::{soliton_threshold, ModelParams};

fn main() -> kerrsim::Result<()> {
    let modes: usize = std::env::args().nth(1).map_or(21, |s| s.parse().expect("mode count"));
    let model = ModelParams::baseline(modes);
    let thr = soliton_threshold(&model)?;
    println!("F = {:.4e}, F_thr = {:.4e}", model.drive, thr.drive_threshold);
    println!(
        "seed width {:.4} rad, ratio {:.3}",
        default_seed_width(&model),
        default_seed_ratio(&model)
    );
    let (field, record) = prepare_soliton(&model, &SeedSpec::default(), &SolitonOptions::default())?;
    let last = record.ticks.last().unwrap();
    println!("t = {:.1}, N_tot = {:.6e}, contrast = {:.4}", field.time, last.n_tot, last.contrast);
    for (l, n) in model.mode_numbers().zip(&last.occupations) {
        println!("{l:>4} {n:.6e}");
    }
    Ok(())
}
