// SPDX-License-Identifier: Apache-2.0

//! Gap sweep over Ñ from a config file, as `simulate sweep` runs it.
//!
//! cargo run --release --example sweep -- [config.toml] [output_root]

use std::path::PathBuf;

use kerrsim::config::{output_root, RunConfig};
use kerrsim::runner::Runner;

fn main() -> kerrsim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.first().map_or_else(|| PathBuf::from("crates/core/examples/configs/smoke.toml"), PathBuf::from);
    let root = args.get(1).map_or_else(output_root, PathBuf::from);
    let runner = Runner::new(RunConfig::load(&path)?, &root, None, None)?;
    let Some(report) = runner.run_sweep(None)? else { return Ok(()) };
    for p in &report.points {
        match &p.fit {
            Some(f) => println!("{:>8.1e}  N_tot {:.4e}  Lambda {:.4e} ± {:.1e}", p.ntilde, p.n_tot, f.lambda, f.lambda_ci),
            None => println!("{:>8.1e}  N_tot {:.4e}  {}", p.ntilde, p.n_tot, p.fit_error.as_deref().unwrap_or("")),
        }
    }
    if let Some(a) = &report.gap_vs_ntilde {
        println!("Lambda ~ N^a, a = {:.3} ± {:.3}", a.exponent, a.exponent_ci);
    }
    println!("report in {}", runner.dir.join("report.toml").display());
    Ok(())
}
