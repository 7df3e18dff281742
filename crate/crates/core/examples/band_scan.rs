//! Toeplitz (power 0) scan at one cutoff against the exact bands.
//!
//!     cargo run --release --example band_scan -- 50

use comb_bootstrap::exact::{exact_band_edges, exact_gaps};
use comb_bootstrap::scan::scan;
use comb_bootstrap::{LatticeParams, ScanConfig};

fn main() -> comb_bootstrap::Result<()> {
    let cutoff = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let params = LatticeParams::default();
    let spectrum = scan(&ScanConfig::new(params, cutoff, 0))?;
    println!("K = {cutoff}, e_min = {:?}", spectrum.e_min);
    for b in &spectrum.allowed {
        println!("allowed {}: [{:.3}, {:.3}]", b.index, b.lo, b.hi);
    }
    let exact = exact_gaps(&exact_band_edges(&params, 30.0)?);
    for (g, x) in spectrum.gaps.iter().zip(&exact) {
        println!("gap {}: {:.3} (exact {:.3})", g.index, g.width, x);
    }
    Ok(())
}
