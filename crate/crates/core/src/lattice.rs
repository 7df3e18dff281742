//! Physical configuration of the comb and the band-interval record shared by
//! the exact solution and the bootstrap scans.
//!
//! Units: ħ = 1 and 2m = 1, so the Hamiltonian is `H = p² + A Σ δ(x - na)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to decide that an energy sits on a pole.
pub const POLE_TOL: f64 = 1e-12;

/// Period `a` and barrier strength `A` of the Dirac comb.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    /// Lattice period `a`.
    pub period: f64,
    /// Delta-barrier strength `A`.
    pub strength: f64,
}

impl LatticeParams {
    pub fn new(period: f64, strength: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "period must be > 0, got {period}"
            )));
        }
        if !(strength > 0.0 && strength.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "barrier strength must be > 0, got {strength}"
            )));
        }
        Ok(Self { period, strength })
    }

    /// Builds parameters without the repulsive-comb check. Used by limits
    /// such as `A → 0` where the strength is allowed to vanish.
    pub fn unchecked(period: f64, strength: f64) -> Self {
        Self { period, strength }
    }

    /// `π/a`, the unit in which mode momenta are measured.
    #[inline]
    pub fn mode_unit(&self) -> f64 {
        PI / self.period
    }

    /// Energy `m²π²/a²` at which ⟨t_m⟩ has its pole and ρ(0) vanishes.
    #[inline]
    pub fn pole_energy(&self, m: i64) -> f64 {
        let k = m as f64 * self.mode_unit();
        k * k
    }

    /// Returns true if `energy` coincides with `m²π²/a²` within [`POLE_TOL`].
    pub fn is_pole(&self, energy: f64, m: i64) -> bool {
        let pole = self.pole_energy(m);
        (energy - pole).abs() <= POLE_TOL * pole.abs().max(1.0)
    }

    /// Index `m ≥ 1` of the closest pole energy `m²π²/a²`, if `energy`
    /// lies on one.
    pub fn nearest_pole(&self, energy: f64) -> Option<i64> {
        if energy <= 0.0 {
            return None;
        }
        let m = (energy.sqrt() / self.mode_unit()).round() as i64;
        (m >= 1 && self.is_pole(energy, m)).then_some(m)
    }
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self {
            period: 2.0,
            strength: 2.0,
        }
    }
}

/// One allowed energy band `[lo, hi]`, 1-based `index`.
///
/// Exact bands always satisfy `lo < hi`. Bands read off a scan grid may be
/// degenerate (`lo == hi`) when a single grid point is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandInterval {
    pub lo: f64,
    pub hi: f64,
    pub index: usize,
}

impl BandInterval {
    pub fn new(lo: f64, hi: f64, index: usize) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidParams(format!(
                "band needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi, index })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, energy: f64) -> bool {
        self.lo <= energy && energy <= self.hi
    }
}
