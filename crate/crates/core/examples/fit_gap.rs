// SPDX-License-Identifier: Apache-2.0

//! Gap fit on a synthetic contrast decay, or on a stored record.
//!
//! cargo run --example fit_gap -- [record.rec]

use kerrsim::analysis::{fit_gap, fit_gap_series, FitWindow};
use kerrsim::persist::load_record;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> kerrsim::Result<()> {
    let fit = match std::env::args().nth(1) {
        Some(path) => fit_gap(&load_record(path.as_ref())?, FitWindow::Auto)?,
        None => {
            let (amp, lambda, sigma) = (3.0, 0.02, 0.02);
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let noise = Normal::new(0.0, sigma).expect("sigma");
            let tau: Vec<f64> = (0..=100).map(f64::from).collect();
            let c: Vec<f64> = tau.iter().map(|t| 1.0 + amp * (-lambda * t).exp() + noise.sample(&mut rng)).collect();
            println!("truth: A = {amp}, Lambda = {lambda}");
            fit_gap_series(&tau, &c, &vec![sigma; tau.len()], FitWindow::Auto)?
        }
    };
    println!("Lambda = {:.5e} ± {:.2e} (95%)", fit.lambda, fit.lambda_ci);
    println!("A      = {:.5} ± {:.2e}", fit.amplitude, fit.amplitude_ci);
    println!("window tau in [{:.1}, {:.1}], {} points, reduced chi2 {:.3}", fit.window.0, fit.window.1, fit.points, fit.reduced_chi2);
    if let Some(w) = &fit.warning {
        println!("warning: {w}");
    }
    Ok(())
}
