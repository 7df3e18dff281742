//! One constraint matrix and its PSD verdict inside a band and inside a gap.

use comb_bootstrap::psd::{build_matrix, is_psd, DEFAULT_TOL};
use comb_bootstrap::{LatticeParams, Regularization, Rho0Source};

fn main() -> comb_bootstrap::Result<()> {
    let params = LatticeParams::default();
    for (label, e) in [("band 2", 5.0), ("gap 1", 3.3), ("gap 2", 10.8)] {
        for power in [0, 2, 4] {
            let m = build_matrix(
                power,
                30,
                e,
                &params,
                Regularization::FiniteK,
                Rho0Source::Analytic,
            )?;
            let v = is_psd(&m, DEFAULT_TOL)?;
            println!(
                "{label} E = {e}: power {power}, order {}, psd = {}, min eig = {:+.3e}",
                m.order(),
                v.psd,
                v.min_eig
            );
        }
    }
    Ok(())
}
