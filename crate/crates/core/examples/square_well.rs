//! Square-well moments, Fourier modes and the quantization residual.

use std::f64::consts::PI;

use comb_bootstrap::isw::{
    isw_fourier_mode, isw_moment, kp_isw_limit_check, quantization_residual, DEFAULT_TRUNC,
};
use comb_bootstrap::LatticeParams;

fn main() -> comb_bootstrap::Result<()> {
    let a = 2.0;
    for m in 1..=3 {
        let e = (m as f64 * PI / a).powi(2);
        let modes: Vec<String> = (0..=4)
            .map(|n| {
                format!(
                    "{:+.6}",
                    isw_fourier_mode(n, e, a, DEFAULT_TRUNC).unwrap().re
                )
            })
            .collect();
        println!(
            "m = {m}: <X^2> = {:.6}, c_0..c_4 = {}",
            isw_moment(2, e, a)?,
            modes.join(" ")
        );
    }
    for e in [1.0, 2.0, PI * PI / 4.0, 3.0, PI * PI] {
        println!(
            "E = {e:.4}: residual = {:.3e}",
            quantization_residual(e, a, DEFAULT_TRUNC)?
        );
    }
    let comb = LatticeParams::default();
    for delta in [1e-3, 1e-4, 1e-5] {
        println!(
            "delta = {delta:e}: A rho(0)/(E - E_1) = {:.6}",
            kp_isw_limit_check(1, &comb, delta)?
        );
    }
    Ok(())
}
