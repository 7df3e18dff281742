//! Closed-form Kronig-Penney solution: the transcendental dispersion
//! relation, exact band edges, and the analytic density at the barrier.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{BandInterval, LatticeParams, POLE_TOL};

/// Grid step used to bracket band edges.
pub const EDGE_GRID_STEP: f64 = 1e-3;
/// Bisection stops once the bracket is narrower than this.
pub const EDGE_TOL: f64 = 1e-9;

/// `sin z / z`, with the small-argument series near zero.
fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// Right-hand side `f(E)` of `cos(ka) = cos(a√E) + (A / 2√E) sin(a√E)`.
///
/// Negative energies use the hyperbolic continuation
/// `cosh(a√|E|) + (A / 2√|E|) sinh(a√|E|)`; the two branches meet at
/// `f(0) = 1 + Aa/2`.
pub fn kp_dispersion_rhs(energy: f64, params: &LatticeParams) -> f64 {
    let a = params.period;
    let half_aa = 0.5 * params.strength * a;
    if energy >= 0.0 {
        let z = a * energy.sqrt();
        z.cos() + half_aa * sinc(z)
    } else {
        let w = a * (-energy).sqrt();
        let sinhc = if w < 1e-4 {
            1.0 + w * w / 6.0
        } else {
            w.sinh() / w
        };
        w.cosh() + half_aa * sinhc
    }
}

/// `|f(E)| - 1`: non-positive exactly on the allowed bands.
fn band_indicator(energy: f64, params: &LatticeParams) -> f64 {
    kp_dispersion_rhs(energy, params).abs() - 1.0
}

fn bisect_edge(mut lo: f64, mut hi: f64, params: &LatticeParams) -> f64 {
    let lo_allowed = band_indicator(lo, params) <= 0.0;
    while hi - lo > EDGE_TOL {
        let mid = 0.5 * (lo + hi);
        if (band_indicator(mid, params) <= 0.0) == lo_allowed {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All allowed bands of the comb in `(0, e_max]`, in increasing order.
///
/// Edges are bracketed on a grid of step [`EDGE_GRID_STEP`] and refined by
/// bisection. A band still open at `e_max` is closed there. Returns an
/// empty list when `e_max` lies below the first band.
pub fn exact_band_edges(params: &LatticeParams, e_max: f64) -> Result<Vec<BandInterval>> {
    if !(e_max > 0.0) {
        return Err(Error::InvalidParams(format!(
            "e_max must be > 0, got {e_max}"
        )));
    }
    let steps = (e_max / EDGE_GRID_STEP).ceil() as usize;
    let mut bands = Vec::new();
    let mut prev_e = 0.0;
    let mut prev_allowed = band_indicator(0.0, params) <= 0.0;
    let mut open: Option<f64> = prev_allowed.then_some(0.0);
    for i in 1..=steps {
        let e = (i as f64 * EDGE_GRID_STEP).min(e_max);
        let allowed = band_indicator(e, params) <= 0.0;
        if allowed != prev_allowed {
            let edge = bisect_edge(prev_e, e, params);
            if allowed {
                open = Some(edge);
            } else if let Some(lo) = open.take() {
                bands.push(BandInterval::new(lo, edge, bands.len() + 1)?);
            }
        }
        prev_e = e;
        prev_allowed = allowed;
    }
    if let Some(lo) = open {
        if lo < e_max {
            bands.push(BandInterval::new(lo, e_max, bands.len() + 1)?);
        }
    }
    Ok(bands)
}

/// Widths of the gaps between consecutive bands.
pub fn exact_gaps(bands: &[BandInterval]) -> Vec<f64> {
    bands.windows(2).map(|w| w[1].lo - w[0].hi).collect()
}

/// Bracket `2a/A + (1 - z cot z)/E` with `z = a√E`, evaluated stably across
/// `E = 0` and continued to `E < 0` through `z cot z → w coth w`.
fn rho0_bracket(energy: f64, params: &LatticeParams) -> f64 {
    let a = params.period;
    let base = 2.0 * a / params.strength;
    let z2 = a * a * energy;
    if z2.abs() < 1e-3 {
        // 1 - z cot z = z²/3 + z⁴/45 + 2z⁶/945 + z⁸/4725 + ...
        let a2 = a * a;
        return base
            + a2 / 3.0
            + a2 * z2 / 45.0
            + 2.0 * a2 * z2 * z2 / 945.0
            + a2 * z2 * z2 * z2 / 4725.0;
    }
    if energy > 0.0 {
        let z = z2.sqrt();
        base + (1.0 - z * z.cos() / z.sin()) / energy
    } else {
        let w = (-z2).sqrt();
        base + (1.0 - w / w.tanh()) / energy
    }
}

/// Analytic density at the barrier,
/// `ρ(0) = 2 / (A [2a/A + 1/E - (a/√E) cot(a√E)])`.
///
/// Returns exactly `0` at `E = m²π²/a²`. Raises [`Error::Pole`] where the
/// bracket vanishes and ρ(0) diverges.
pub fn rho0_analytic(energy: f64, params: &LatticeParams) -> Result<f64> {
    if params.nearest_pole(energy).is_some() {
        return Ok(0.0);
    }
    let a = params.period;
    let z2 = a * a * energy;
    if energy > 0.0 && z2 >= 1e-3 {
        // Multiply through by sin z so the pole set of cot does not appear.
        let z = z2.sqrt();
        let (s, c) = z.sin_cos();
        let lead = 2.0 * a / params.strength + 1.0 / energy;
        let denom = lead * s - z * c / energy;
        let scale = lead.abs() + (z / energy).abs();
        if denom.abs() <= POLE_TOL * scale {
            return Err(Error::Pole {
                energy,
                what: "analytic ρ(0) bracket vanishes",
            });
        }
        return Ok(2.0 * s / (params.strength * denom));
    }
    let bracket = rho0_bracket(energy, params);
    if bracket.abs() <= POLE_TOL * (2.0 * a / params.strength) {
        return Err(Error::Pole {
            energy,
            what: "analytic ρ(0) bracket vanishes",
        });
    }
    Ok(2.0 / (params.strength * bracket))
}

/// Fourier coefficient `A ρ(0) / (E - π²m²/a²)` of `cos(2πmx/a)` in `a ρ(x)`.
pub(crate) fn density_coefficient(
    m: i64,
    energy: f64,
    rho0: f64,
    params: &LatticeParams,
) -> Result<f64> {
    if params.is_pole(energy, m) {
        return Err(Error::Pole {
            energy,
            what: "density mode",
        });
    }
    Ok(params.strength * rho0 / (energy - params.pole_energy(m)))
}

/// Truncated density `ρ(x) = 1/a + (1/a) Σ_{m=1..modes} c_m cos(2πmx/a)`
/// built from a given ρ(0).
pub fn rho_x_series(
    x: f64,
    energy: f64,
    params: &LatticeParams,
    rho0: f64,
    modes: usize,
) -> Result<f64> {
    let a = params.period;
    let theta = 2.0 * PI * x / a;
    let mut sum = 1.0;
    for m in 1..=modes as i64 {
        sum += density_coefficient(m, energy, rho0, params)? * (m as f64 * theta).cos();
    }
    Ok(sum / a)
}

/// Truncated density with the analytic ρ(0).
pub fn rho_x_analytic(x: f64, energy: f64, params: &LatticeParams, modes: usize) -> Result<f64> {
    let half = 0.5 * params.period;
    if x < -half - 1e-12 || x > half + 1e-12 {
        return Err(Error::InvalidParams(format!("x = {x} outside [-a/2, a/2]")));
    }
    let rho0 = rho0_analytic(energy, params)?;
    rho_x_series(x, energy, params, rho0, modes)
}
