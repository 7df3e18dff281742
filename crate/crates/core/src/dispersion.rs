//! Bloch dispersion `cos(ka)` rebuilt from the even momentum moments,
//! `cos(ka) = Σ_n (-1)^n a^{2n}/(2n)! ⟨p^{2n}⟩` with
//! `⟨p^{2n}⟩ = E^n (1 - nA/(aE))`.
//!
//! Only even powers enter. The first odd moment `⟨p⟩ = (a/2) j(a/2)` would
//! need the particle current, which is not computed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::kp_dispersion_rhs;
use crate::lattice::{BandInterval, LatticeParams};

/// Tail target used by [`adaptive_truncation`].
pub const DEFAULT_SERIES_TOL: f64 = 1e-10;
/// Allowed excess of `|cos ka|` over 1 before it counts as an error.
pub const EDGE_SLACK: f64 = 1e-9;

const MAX_TERMS: usize = 10_000;

/// Partial sum through `n = N`.
///
/// Written as `Σ (-1)^n a^{2n}/(2n)! (E^n - n A E^{n-1}/a)` so `E = 0` and
/// `E < 0` need no special case.
pub fn cos_ka_series(energy: f64, params: &LatticeParams, truncation: usize) -> f64 {
    let a = params.period;
    let x = -a * a * energy;
    // u = (-a²E)^n/(2n)!, w = (-a²)^n E^{n-1}/(2n)!
    let mut u = 1.0;
    let mut w = -a * a / 2.0;
    let mut sum = 1.0;
    for n in 1..=truncation {
        let nf = n as f64;
        let d = (2.0 * nf - 1.0) * (2.0 * nf);
        u *= x / d;
        if n > 1 {
            w *= x / d;
        }
        sum += u - params.strength / a * nf * w;
    }
    sum
}

/// Tail bound `|a²E|^{N+1}/(2N+2)! · (1 + (N+1)A/(a|E|))` after `N` terms.
pub fn tail_bound(energy: f64, params: &LatticeParams, truncation: usize) -> f64 {
    let a = params.period;
    let x = a * a * energy.abs();
    let n1 = truncation as f64 + 1.0;
    let mut term = 1.0;
    for k in 1..=(2 * truncation + 2) {
        term /= k as f64;
        if k % 2 == 0 {
            term *= x;
        }
    }
    if energy == 0.0 {
        return term * n1 * params.strength * a;
    }
    term * (1.0 + n1 * params.strength / (a * energy.abs()))
}

/// Smallest `N` whose tail bound is below `tol`.
pub fn adaptive_truncation(energy: f64, params: &LatticeParams, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!(
            "series tolerance must be > 0, got {tol}"
        )));
    }
    let a = params.period;
    let x = a * a * energy.abs();
    // Incremental |a²E|^{N+1}/(2N+2)!
    let mut term = x / 2.0;
    for n in 0..MAX_TERMS {
        let n1 = n as f64 + 1.0;
        let factor = if energy == 0.0 {
            n1 * params.strength * a
        } else {
            1.0 + n1 * params.strength / (a * energy.abs())
        };
        if term * factor < tol && term < 1.0 {
            return Ok(n);
        }
        let k = 2.0 * n1;
        term *= x / ((k + 1.0) * (k + 2.0));
    }
    Err(Error::NonConvergent(format!(
        "series tail above {tol} after {MAX_TERMS} terms"
    )))
}

/// Series value with the truncation picked from the tail bound.
pub fn cos_ka_adaptive(energy: f64, params: &LatticeParams) -> Result<f64> {
    let n = adaptive_truncation(energy, params, DEFAULT_SERIES_TOL)?;
    Ok(cos_ka_series(energy, params, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionSample {
    pub energy: f64,
    /// Bloch wavevector in `[0, π/a]`.
    pub k: f64,
    pub cos_ka_series: f64,
    pub cos_ka_exact: f64,
}

impl DispersionSample {
    pub fn residual(&self) -> f64 {
        (self.cos_ka_series - self.cos_ka_exact).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionCurve {
    pub band_index: usize,
    pub truncation: Option<usize>,
    pub samples: Vec<DispersionSample>,
}

impl DispersionCurve {
    pub fn max_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(DispersionSample::residual)
            .fold(0.0, f64::max)
    }
}

/// `k = arccos(cos ka)/a`, clamping overshoots up to [`EDGE_SLACK`].
pub fn wavevector(cos_ka: f64, params: &LatticeParams) -> Result<f64> {
    if !(cos_ka.abs() <= 1.0 + EDGE_SLACK) {
        return Err(Error::Numeric(format!(
            "|cos ka| = {} exceeds 1",
            cos_ka.abs()
        )));
    }
    Ok(cos_ka.clamp(-1.0, 1.0).acos() / params.period)
}

/// Samples uniformly in `E` across `band` without range checks: `k` is NaN
/// where `|cos ka|` exceeds 1 by more than [`EDGE_SLACK`]. `truncation =
/// None` picks `N` per energy from the tail bound.
pub fn dispersion_samples(
    band: &BandInterval,
    params: &LatticeParams,
    samples: usize,
    truncation: Option<usize>,
) -> Result<Vec<DispersionSample>> {
    if samples < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let step = (band.hi - band.lo) / (samples - 1) as f64;
    (0..samples)
        .map(|i| {
            let energy = if i == samples - 1 {
                band.hi
            } else {
                band.lo + i as f64 * step
            };
            let series = match truncation {
                Some(n) => cos_ka_series(energy, params, n),
                None => cos_ka_adaptive(energy, params)?,
            };
            Ok(DispersionSample {
                energy,
                k: wavevector(series, params).unwrap_or(f64::NAN),
                cos_ka_series: series,
                cos_ka_exact: kp_dispersion_rhs(energy, params),
            })
        })
        .collect()
}

/// `k(E) = arccos(cos ka)/a` across `band`; a sample with `|cos ka|` beyond
/// the edge slack is a numeric error.
pub fn dispersion_curve(
    band: &BandInterval,
    params: &LatticeParams,
    samples: usize,
    truncation: Option<usize>,
) -> Result<DispersionCurve> {
    let samples = dispersion_samples(band, params, samples, truncation)?;
    if let Some(bad) = samples.iter().find(|s| s.k.is_nan()) {
        return Err(Error::Numeric(format!(
            "|cos ka| = {} exceeds 1 at E = {}",
            bad.cos_ka_series.abs(),
            bad.energy
        )));
    }
    Ok(DispersionCurve {
        band_index: band.index,
        truncation,
        samples,
    })
}
