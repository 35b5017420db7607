// SPDX-License-Identifier: Apache-2.0

//! Same seed, drive below and above the soliton threshold.
//!
//! cargo run --release --example threshold -- [factor ...]

use kerrsim::gp::{default_seed_ratio, default_seed_width, evolve_gp, sech_seed, GpOptions};
use kerrsim::lattice::{soliton_threshold, ModelParams};

fn main() -> kerrsim::Result<()> {
    let mut factors: Vec<f64> = std::env::args().skip(1).map(|s| s.parse().expect("factor")).collect();
    if factors.is_empty() {
        factors = vec![0.9, 1.5];
    }
    let base = ModelParams::baseline(21);
    let f_thr = soliton_threshold(&base)?.drive_threshold;
    let seed = sech_seed(&base, default_seed_width(&base), default_seed_ratio(&base));
    for k in factors {
        let model = ModelParams { drive: k * f_thr, ..base.clone() };
        let (field, rec) = evolve_gp(&seed, &model, 100.0, 1.0, &GpOptions::default())?;
        let last = rec.ticks.last().unwrap();
        let centre = field.get(0).norm_sqr();
        let side: f64 = (1..=model.half_width()).map(|l| field.get(l).norm_sqr() + field.get(-l).norm_sqr()).sum();
        println!(
            "F = {k:.2} F_thr: contrast {:.4}, side/centre {:.3e}, N_tot {:.4e}",
            last.contrast,
            side / centre,
            last.n_tot
        );
    }
    Ok(())
}
