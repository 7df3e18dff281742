//! Moments <t_n p^s> at one energy, and the truncated recursion converging
//! to the closed forms.

use comb_bootstrap::moments::{tn_p_recursive, MomentTable, Regularization, Rho0Source};
use comb_bootstrap::LatticeParams;

fn main() -> comb_bootstrap::Result<()> {
    let params = LatticeParams::default();
    let e = 1.0;
    let table = MomentTable::new(e, params, 10, Regularization::FiniteK, Rho0Source::FiniteK)?;
    println!("E = {e}, K = 10, finite-K rho(0) = {:.6}", table.rho0());
    println!(
        "{:>3} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "n", "s=0", "s=1", "s=2", "s=3", "s=4"
    );
    for n in 0..=4 {
        let row: Vec<String> = (0..=4)
            .map(|s| format!("{:12.6}", table.tn_p(n, s).unwrap()))
            .collect();
        println!("{n:>3} {}", row.join(" "));
    }

    println!("\n<t_1 p^3>: closed form vs truncated recursion");
    for k in [10, 100, 1000] {
        let t = MomentTable::new(e, params, k, Regularization::FiniteK, Rho0Source::FiniteK)?;
        let closed = t.tn_p(1, 3)?;
        let rec = tn_p_recursive(1, 3, e, &params, k)?;
        println!("K = {k:5}: {closed:.8} {rec:.8}");
    }
    Ok(())
}
