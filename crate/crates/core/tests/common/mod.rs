// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use kerrsim::config::RunConfig;

pub const MODEL: &str = r#"
[model]
g_over_kappa = 3.05e-9
sigma0_over_kappa = -1.024
d1_over_kappa = 1858.7
d2_over_kappa = 0.0202
drive_amplitude = 1.8e4
modes = 21
"#;

/// Baseline model with a short Wigner run appended.
pub fn small_config(run: &str) -> RunConfig {
    RunConfig::parse(&format!("{MODEL}\n[run]\n{run}")).expect("config")
}

pub fn small_text(run: &str) -> String {
    format!("{MODEL}\n[run]\n{run}")
}
