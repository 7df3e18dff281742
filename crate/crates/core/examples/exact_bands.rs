//! Exact bands and gaps of the comb from the transcendental relation.

use comb_bootstrap::exact::{exact_band_edges, exact_gaps, kp_dispersion_rhs, rho0_analytic};
use comb_bootstrap::LatticeParams;

fn main() -> comb_bootstrap::Result<()> {
    let params = LatticeParams::new(2.0, 2.0)?;
    let bands = exact_band_edges(&params, 30.0)?;
    for b in &bands {
        println!("band {}: [{:.6}, {:.6}]", b.index, b.lo, b.hi);
    }
    for (i, g) in exact_gaps(&bands).iter().enumerate() {
        println!("gap {}: {:.6}", i + 1, g);
    }
    for e in [0.5, 1.0, 2.0, 5.0] {
        println!(
            "E = {e:4}: f(E) = {:+.6}  rho(0) = {:+.6}",
            kp_dispersion_rhs(e, &params),
            rho0_analytic(e, &params)?
        );
    }
    Ok(())
}
