//! k(E) across the first two bands from the even-moment series.

use comb_bootstrap::dispersion::{adaptive_truncation, dispersion_curve, DEFAULT_SERIES_TOL};
use comb_bootstrap::exact::exact_band_edges;
use comb_bootstrap::LatticeParams;

fn main() -> comb_bootstrap::Result<()> {
    let params = LatticeParams::default();
    for band in exact_band_edges(&params, 10.0)?.iter().take(2) {
        let curve = dispersion_curve(band, &params, 11, None)?;
        println!(
            "band {} (max residual {:.2e})",
            band.index,
            curve.max_residual()
        );
        for s in &curve.samples {
            let n = adaptive_truncation(s.energy, &params, DEFAULT_SERIES_TOL)?;
            println!("  E = {:8.4}  k = {:.6}  N = {n}", s.energy, s.k);
        }
    }
    Ok(())
}
