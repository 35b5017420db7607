// SPDX-License-Identifier: Apache-2.0

//! Stop a Wigner run at its first checkpoint, resume it, and compare with an
//! uninterrupted run.
//!
//! cargo run --release --example checkpoint_resume

use kerrsim::config::RunConfig;
use kerrsim::persist::{load_checkpoint, record_digest};
use kerrsim::runner::{PointOutcome, RunLimits, Runner};

const CONFIG: &str = r#"
[model]
g_over_kappa = 3.05e-9
sigma0_over_kappa = -1.024
d1_over_kappa = 1858.7
d2_over_kappa = 0.0202
drive_amplitude = 1.8e4
modes = 21

[run]
output = "resume"
tau_end = 4.0
trajectories = 32
ntilde = [1e-3]
checkpoint_every = 2.0
"#;

fn main() -> kerrsim::Result<()> {
    let config = RunConfig::parse(CONFIG)?;
    let root = std::env::temp_dir().join(format!("kerrsim-resume-{}", std::process::id()));

    let straight = Runner::new(config.clone(), &root.join("a"), None, None)?;
    let PointOutcome::Complete(full) = straight.run_twa(None)? else { unreachable!() };

    let mut halted = Runner::new(config.clone(), &root.join("b"), None, None)?;
    halted.limits = RunLimits { halt_at: Some(2.0) };
    let PointOutcome::Halted { checkpoint, time } = halted.run_twa(None)? else { unreachable!() };
    println!("halted at t = {time}, checkpoint {}", checkpoint.display());
    println!("checkpoint holds {} trajectories", load_checkpoint(&checkpoint)?.trajectories.len());

    let resumed = Runner::new(config, &root.join("b"), None, None)?;
    let PointOutcome::Complete(rest) = resumed.run_twa(Some(&checkpoint))? else { unreachable!() };

    let (a, b) = (record_digest(&full)?, record_digest(&rest)?);
    println!("uninterrupted {a}\nresumed       {b}\nidentical: {}", a == b);
    std::fs::remove_dir_all(&root)?;
    Ok(())
}
