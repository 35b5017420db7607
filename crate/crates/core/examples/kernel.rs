// SPDX-License-Identifier: Apache-2.0

//! Four-wave-mixing term: zero-padded FFT against the direct triple sum.
//!
//! cargo run --release --example kernel -- [modes]

use std::time::Instant;

use kerrsim::field::{dealiased_grid, fwm_naive, FwmKernel, ModeField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let modes: usize = std::env::args().nth(1).map_or(21, |s| s.parse().expect("mode count"));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let amps: Vec<Complex64> = (0..modes).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let field = ModeField::from_amps(amps);

    let clock = Instant::now();
    let naive = fwm_naive(&field, 1.0);
    let t_naive = clock.elapsed();

    let mut kernel = FwmKernel::new(modes);
    let mut out = vec![Complex64::default(); modes];
    let clock = Instant::now();
    kernel.apply(&field.amps, 1.0, &mut out);
    let t_fft = clock.elapsed();

    let err: f64 = out.iter().zip(&naive.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
        / naive.amps.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
    println!("modes {modes}, padded grid {}", dealiased_grid(modes));
    println!("relative error {err:.2e}");
    println!("direct sum {:?}, spectral {:?}", t_naive, t_fft);
}
