//! Uncertainty-product bound <x^2><p^2> >= 1/4 on the energy.

use comb_bootstrap::scan::{heisenberg_min_energy, uncertainty_product, x2_moment};
use comb_bootstrap::{LatticeParams, ScanConfig};

fn main() -> comb_bootstrap::Result<()> {
    let params = LatticeParams::default();
    let grid = ScanConfig::default().with_range(-1.0, 5.0, 0.001);
    for cutoff in [10, 100, 1000] {
        println!(
            "K = {cutoff:4}: E_min = {:?}",
            heisenberg_min_energy(&params, cutoff, &grid)?
        );
    }
    for e in [0.5, 1.0, 2.0, 3.7, 5.0] {
        println!(
            "E = {e}: <x^2> = {:.4}, product = {:?}",
            x2_moment(e, &params, 1000)?,
            uncertainty_product(e, &params, 1000)
        );
    }
    Ok(())
}
