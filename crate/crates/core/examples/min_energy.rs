//! Lower edge of the allowed set with momentum powers 2 and 4.

use comb_bootstrap::scan::{min_allowed_energy, MinEnergy};
use comb_bootstrap::{LatticeParams, ScanConfig};

fn main() -> comb_bootstrap::Result<()> {
    let params = LatticeParams::default();
    for power in [2, 4] {
        for cutoff in [5, 20, 50, 100] {
            let cfg = ScanConfig::new(params, cutoff, power).with_range(-2.0, 1.0, 0.005);
            match min_allowed_energy(&cfg) {
                Ok(MinEnergy::Bounded(e)) => {
                    println!("power {power} K = {cutoff:3}: E_min = {e:.4}")
                }
                Ok(other) => println!("power {power} K = {cutoff:3}: {other:?}"),
                Err(err) => println!("power {power} K = {cutoff:3}: {err}"),
            }
        }
    }
    println!("exact band bottom: 0.7402");
    Ok(())
}
