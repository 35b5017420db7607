// SPDX-License-Identifier: Apache-2.0

//! Mode-space kernels shared by the mean-field and Wigner integrators.
//!
//! A field is stored as complex amplitudes α_l for l = −L … L (L = (N_m−1)/2)
//! in increasing order of l. The four-wave-mixing sum
//! Σ_{m+p−n=l} α_m ᾱ_n α_p is the l-th Fourier coefficient of |u|²u with
//! u(θ) = Σ_l α_l e^{ilθ}, which is what the spectral kernel evaluates.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeField {
    pub amps: Vec<Complex64>,
    /// Time in units of 1/κ.
    pub time: f64,
}

impl ModeField {
    pub fn zeros(modes: usize) -> Self {
        ModeField { amps: vec![Complex64::new(0.0, 0.0); modes], time: 0.0 }
    }

    pub fn from_amps(amps: Vec<Complex64>) -> Self {
        ModeField { amps, time: 0.0 }
    }

    pub fn modes(&self) -> usize {
        self.amps.len()
    }

    pub fn half_width(&self) -> i64 {
        (self.amps.len() as i64 - 1) / 2
    }

    pub fn get(&self, l: i64) -> Complex64 {
        self.amps[(l + self.half_width()) as usize]
    }

    pub fn set(&mut self, l: i64, v: Complex64) {
        let h = self.half_width();
        self.amps[(l + h) as usize] = v;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        ModeField { amps: self.amps.iter().map(|a| a * s).collect(), time: self.time }
    }
}

/// ψ(θ_k) on θ_k = 2πk/N.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpaceField {
    pub psi: Vec<Complex64>,
    pub modes: usize,
}

impl RealSpaceField {
    pub fn grid(&self) -> usize {
        self.psi.len()
    }

    pub fn theta(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.psi.len() as f64
    }

    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|p| p.norm_sqr()).collect()
    }

    /// Trapezoidal ∫|ψ|² dθ on the periodic grid.
    pub fn integrated_density(&self) -> f64 {
        let n = self.psi.len() as f64;
        self.psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * 2.0 * PI / n
    }
}

/// Smallest power of two holding the cubic products of `modes` modes
/// without aliasing into the retained band.
pub fn dealiased_grid(modes: usize) -> usize {
    (2 * modes).next_power_of_two()
}

/// Brute-force four-wave mixing: g Σ_{m+p−n=l} α_m ᾱ_n α_p over in-range
/// indices. O(N_m³); the reference for [`FwmKernel`].
pub fn fwm_naive(field: &ModeField, g: f64) -> ModeField {
    let n = field.modes() as i64;
    let h = field.half_width();
    let a = &field.amps;
    let mut out = vec![Complex64::new(0.0, 0.0); n as usize];
    for m in -h..=h {
        let am = a[(m + h) as usize];
        for nn in -h..=h {
            let an = a[(nn + h) as usize].conj();
            let amn = am * an;
            for p in -h..=h {
                let l = m + p - nn;
                if l.abs() <= h {
                    out[(l + h) as usize] += amn * a[(p + h) as usize];
                }
            }
        }
    }
    for v in &mut out {
        *v *= g;
    }
    ModeField { amps: out, time: field.time }
}

/// Spectral four-wave mixing on a zero-padded grid.
///
/// Holds FFT plans and scratch buffers, so one kernel per thread.
pub struct FwmKernel {
    modes: usize,
    grid: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Clone for FwmKernel {
    fn clone(&self) -> Self {
        FwmKernel {
            modes: self.modes,
            grid: self.grid,
            fwd: Arc::clone(&self.fwd),
            inv: Arc::clone(&self.inv),
            buf: self.buf.clone(),
            scratch: self.scratch.clone(),
        }
    }
}

impl FwmKernel {
    pub fn new(modes: usize) -> Self {
        let grid = dealiased_grid(modes);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid);
        let inv = planner.plan_fft_inverse(grid);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        FwmKernel {
            modes,
            grid,
            fwd,
            inv,
            buf: vec![Complex64::new(0.0, 0.0); grid],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Writes g·FWM(amps) into `out`.
    pub fn apply(&mut self, amps: &[Complex64], g: f64, out: &mut [Complex64]) {
        debug_assert_eq!(amps.len(), self.modes);
        let h = (self.modes - 1) / 2;
        let m = self.grid;
        self.buf.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        // Coefficient of e^{ilθ} lives at bin l mod M.
        for (i, a) in amps.iter().enumerate() {
            let bin = (i + m - h) % m;
            self.buf[bin] = *a;
        }
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        for u in self.buf.iter_mut() {
            *u *= u.norm_sqr();
        }
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
        let scale = g / m as f64;
        for (i, o) in out.iter_mut().enumerate() {
            let bin = (i + m - h) % m;
            *o = self.buf[bin] * scale;
        }
    }
}

/// Spectral evaluation of the four-wave-mixing term; equal to [`fwm_naive`]
/// up to rounding.
pub fn fwm_spectral(field: &ModeField, g: f64) -> ModeField {
    let mut kernel = FwmKernel::new(field.modes());
    let mut out = vec![Complex64::new(0.0, 0.0); field.modes()];
    kernel.apply(&field.amps, g, &mut out);
    ModeField { amps: out, time: field.time }
}

/// Per-mode factors exp[(iσ_l − κ/2)·dt].
pub fn linear_factors(sigma: &[f64], kappa: f64, dt: f64) -> Vec<Complex64> {
    sigma
        .iter()
        .map(|&s| (Complex64::new(-0.5 * kappa, s) * dt).exp())
        .collect()
}

/// Exact propagation of the linear dissipative part over `dt`.
pub fn linear_step(field: &ModeField, sigma: &[f64], kappa: f64, dt: f64) -> ModeField {
    let f = linear_factors(sigma, kappa, dt);
    ModeField {
        amps: field.amps.iter().zip(&f).map(|(a, e)| a * e).collect(),
        time: field.time + dt,
    }
}

/// Mode space → real space with ψ(θ) = (2π)^{-1/2} Σ_l e^{ilθ} α_l.
pub struct RealSpaceTransform {
    modes: usize,
    grid: usize,
    inv: Arc<dyn Fft<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl RealSpaceTransform {
    pub fn new(modes: usize, grid: usize) -> Result<Self> {
        if grid < modes {
            return Err(Error::Resolution { grid, modes });
        }
        let mut planner = FftPlanner::new();
        let inv = planner.plan_fft_inverse(grid);
        let fwd = planner.plan_fft_forward(grid);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Ok(RealSpaceTransform {
            modes,
            grid,
            inv,
            fwd,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Fills `psi` (length `grid`) from mode amplitudes.
    pub fn forward_into(&mut self, amps: &[Complex64], psi: &mut [Complex64]) {
        let h = (self.modes - 1) / 2;
        let m = self.grid;
        psi.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for (i, a) in amps.iter().enumerate() {
            psi[(i + m - h) % m] = *a;
        }
        self.inv.process_with_scratch(psi, &mut self.scratch);
        let s = 1.0 / (2.0 * PI).sqrt();
        psi.iter_mut().for_each(|c| *c *= s);
    }

    pub fn to_real(&mut self, field: &ModeField) -> RealSpaceField {
        let mut psi = vec![Complex64::new(0.0, 0.0); self.grid];
        self.forward_into(&field.amps, &mut psi);
        RealSpaceField { psi, modes: self.modes }
    }

    /// Projection back onto the retained modes.
    pub fn to_modes(&mut self, real: &RealSpaceField) -> ModeField {
        let h = (self.modes - 1) / 2;
        let m = self.grid;
        let mut buf = real.psi.clone();
        self.fwd.process_with_scratch(&mut buf, &mut self.scratch);
        let s = (2.0 * PI).sqrt() / m as f64;
        let amps = (0..self.modes).map(|i| buf[(i + m - h) % m] * s).collect();
        ModeField::from_amps(amps)
    }
}

pub fn to_real_space(field: &ModeField, grid: usize) -> Result<RealSpaceField> {
    Ok(RealSpaceTransform::new(field.modes(), grid)?.to_real(field))
}

pub fn from_real_space(real: &RealSpaceField) -> Result<ModeField> {
    Ok(RealSpaceTransform::new(real.modes, real.grid())?.to_modes(real))
}

#[cfg(test)]
pub(crate) fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(modes: usize, seed: u64) -> ModeField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ModeField::from_amps(
            (0..modes)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    }

    #[test]
    fn single_mode_fwm() {
        let mut f = ModeField::zeros(5);
        let a = c(0.7, -0.3);
        f.set(0, a);
        let out = fwm_naive(&f, 2.0);
        for l in -2..=2 {
            let expect = if l == 0 { 2.0 * a.norm_sqr() * a } else { c(0.0, 0.0) };
            assert_relative_eq!(out.get(l).re, expect.re, epsilon = 1e-15);
            assert_relative_eq!(out.get(l).im, expect.im, epsilon = 1e-15);
        }
    }

    #[test]
    fn two_sideband_enumeration() {
        // N_m = 3, α_{±1} = A real. l = 1 collects (1,1,1), (1,−1,−1), (−1,−1,1) → 3|A|²A.
        // l = 0 needs m + p − n = 0 with m, n, p ∈ {±1}: impossible with odd sums, so 0.
        let amp = 1.3;
        let mut f = ModeField::zeros(3);
        f.set(-1, c(amp, 0.0));
        f.set(1, c(amp, 0.0));
        let g = 0.5;
        let out = fwm_naive(&f, g);
        assert_eq!(out.get(0), c(0.0, 0.0));
        assert_relative_eq!(out.get(1).re, 3.0 * g * amp.powi(3), max_relative = 1e-15);
        assert_relative_eq!(out.get(-1).re, 3.0 * g * amp.powi(3), max_relative = 1e-15);
        let spec = fwm_spectral(&f, g);
        assert!(rel_l2(&spec.amps, &out.amps) < 1e-14);
    }

    #[test]
    fn spectral_matches_naive() {
        for &modes in &[3usize, 7, 11, 21] {
            for seed in 0..10 {
                let f = random_field(modes, seed);
                let err = rel_l2(&fwm_spectral(&f, 1.7).amps, &fwm_naive(&f, 1.7).amps);
                assert!(err < 1e-12, "modes {modes} seed {seed}: {err}");
            }
        }
    }

    #[test]
    fn zero_field_and_phase_covariance() {
        let z = ModeField::zeros(11);
        assert!(fwm_spectral(&z, 1.0).amps.iter().all(|a| *a == c(0.0, 0.0)));
        let f = random_field(11, 3);
        let ph = Complex64::from_polar(1.0, 0.83);
        let a = fwm_spectral(&f.scaled(ph), 1.0);
        let b = fwm_spectral(&f, 1.0).scaled(ph);
        assert!(rel_l2(&a.amps, &b.amps) < 1e-13);
    }

    #[test]
    fn dealiased_grid_sizes() {
        assert_eq!(dealiased_grid(3), 8);
        assert_eq!(dealiased_grid(21), 64);
        assert_eq!(dealiased_grid(101), 256);
    }

    #[test]
    fn linear_step_examples() {
        let f = random_field(7, 1);
        let zero_sigma = vec![0.0; 7];
        let out = linear_step(&f, &zero_sigma, 1.0, 0.3);
        let decay = (-0.15f64).exp();
        for (a, b) in out.amps.iter().zip(&f.amps) {
            assert_relative_eq!(a.re, b.re * decay, max_relative = 1e-14);
        }
        let sigma: Vec<f64> = (0..7).map(|i| 100.0 * i as f64 - 3.0).collect();
        let out = linear_step(&f, &sigma, 0.0, 0.7);
        for (a, b) in out.amps.iter().zip(&f.amps) {
            assert_relative_eq!(a.norm(), b.norm(), max_relative = 1e-14);
        }
        let half = linear_step(&linear_step(&f, &sigma, 1.0, 0.35), &sigma, 1.0, 0.35);
        assert!(rel_l2(&half.amps, &out_k(&f, &sigma)) < 1e-14);
    }

    fn out_k(f: &ModeField, sigma: &[f64]) -> Vec<Complex64> {
        linear_step(f, sigma, 1.0, 0.7).amps
    }

    #[test]
    fn real_space_examples() {
        let mut f = ModeField::zeros(7);
        f.set(0, c(2.0, 1.0));
        let r = to_real_space(&f, 16).unwrap();
        let expect = c(2.0, 1.0) / (2.0 * PI).sqrt();
        for p in &r.psi {
            assert_relative_eq!(p.re, expect.re, epsilon = 1e-14);
            assert_relative_eq!(p.im, expect.im, epsilon = 1e-14);
        }

        let flat = ModeField::from_amps(vec![c(1.0, 0.0); 9]);
        let d = to_real_space(&flat, 64).unwrap().density();
        let kmax = d.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(kmax, 0);
        assert_relative_eq!(d[0], 81.0 / (2.0 * PI), max_relative = 1e-13);

        assert!(matches!(to_real_space(&flat, 8), Err(Error::Resolution { .. })));
    }

    #[test]
    fn parseval_random() {
        for seed in 0..5 {
            let f = random_field(21, seed);
            let r = to_real_space(&f, 256).unwrap();
            assert_relative_eq!(r.integrated_density(), f.norm_sqr(), max_relative = 1e-12);
            let back = from_real_space(&r).unwrap();
            assert!(rel_l2(&back.amps, &f.amps) < 1e-13);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fwm_is_cubic(seed in 0u64..1000, re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let f = random_field(11, seed);
            let s = c(re, im);
            let lhs = fwm_spectral(&f.scaled(s), 1.0);
            let rhs = fwm_spectral(&f, 1.0).scaled(s * s.norm_sqr());
            prop_assert!(rel_l2(&lhs.amps, &rhs.amps) < 1e-12);
        }

        #[test]
        fn fwm_commutes_with_mode_reversal(seed in 0u64..1000) {
            let f = random_field(7, seed);
            let mut rev = f.clone();
            rev.amps.reverse();
            let mut expect = fwm_naive(&f, 1.0).amps;
            expect.reverse();
            prop_assert!(rel_l2(&fwm_spectral(&rev, 1.0).amps, &expect) < 1e-12);
        }

        #[test]
        fn linear_step_norm_bookkeeping(seed in 0u64..1000, dt in 1e-4f64..2.0) {
            let f = random_field(9, seed);
            let sigma: Vec<f64> = (0..9).map(|i| (i as f64 - 4.0) * 37.1).collect();
            let out = linear_step(&f, &sigma, 1.0, dt);
            let restored = out.norm_sqr() * dt.exp();
            prop_assert!((restored - f.norm_sqr()).abs() / f.norm_sqr() < 1e-12);
        }
    }
}
