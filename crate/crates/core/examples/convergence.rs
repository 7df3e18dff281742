//! Gap widths against K for the Toeplitz matrix, and for all powers at K = 5.

use comb_bootstrap::scan::{convergence_study, MinEnergy};
use comb_bootstrap::ScanConfig;

fn cell(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into())
}

fn main() -> comb_bootstrap::Result<()> {
    let template = ScanConfig::default();
    let rows = convergence_study(&template, &[2, 5, 10, 20, 50, 100], &[0])?;
    let by_power = convergence_study(&template, &[5], &[0, 1, 2, 3, 4])?;
    println!("power   K   gap1   gap2   gap3  e_min");
    for r in rows.iter().chain(&by_power) {
        let e_min = match r.e_min {
            MinEnergy::Bounded(e) => format!("{e:.3}"),
            MinEnergy::UnboundedBelow => "unbounded".into(),
            MinEnergy::Empty => "none".into(),
        };
        println!(
            "{:5} {:3} {:>6} {:>6} {:>6}  {e_min}",
            r.power,
            r.cutoff,
            cell(r.gaps[0]),
            cell(r.gaps[1]),
            cell(r.gaps[2])
        );
    }
    Ok(())
}
