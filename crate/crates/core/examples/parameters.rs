// SPDX-License-Identifier: Apache-2.0

//! SI microring parameters to the dimensionless model, and back to powers.
//!
//! cargo run --example parameters -- [params.toml]

use kerrsim::lattice::{derive_model_params, load_params, pump_power, soliton_threshold, PhysicalParams};
use kerrsim::observables::intracavity_power;

fn main() -> kerrsim::Result<()> {
    let model = match std::env::args().nth(1) {
        Some(path) => load_params(path.as_ref())?,
        None => {
            let phys = PhysicalParams::silicon_nitride();
            println!("kappa = {:.4e} 1/s, g = {:.4e} 1/s", phys.kappa(), phys.kerr_rate());
            println!("P_ext = {:.4} mW", phys.power_ext * 1e3);
            derive_model_params(&phys, 21, 1.0)?
        }
    };
    let thr = soliton_threshold(&model)?;
    println!("g/kappa      {:.4e}", model.g);
    println!("sigma0/kappa {:.4}", model.sigma0);
    println!("D1/kappa     {:.1}", model.d1);
    println!("D2/kappa     {:.4e}", model.d2);
    println!("F            {:.4e} (F_thr {:.4e}, above: {})", model.drive, thr.drive_threshold, thr.above);
    if let (Some(k), Some(w)) = (model.kappa_per_s, model.pump_omega) {
        println!("threshold pump power {:.4} mW at eta = 0.5", pump_power(thr.drive_threshold, w, k, 0.5) * 1e3);
        if let Some(p) = intracavity_power(&model, 1e8) {
            println!("1e8 intracavity photons circulate {:.3} W", p);
        }
    }
    println!("model hash {}", model.physics_hash());
    Ok(())
}
