//! Energy sweeps under the PSD constraint: allowed bands, gaps, minimum
//! energies, the uncertainty-product bound and K-convergence tables.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rho0_analytic;
use crate::lattice::{BandInterval, LatticeParams};
use crate::moments::{rho0, MomentTable, Regularization, Rho0Source};
use crate::psd::{build_from_table, is_psd, DEFAULT_TOL, MAX_POWER};

/// Sweep configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub params: LatticeParams,
    /// Mode cutoff `K`; matrices have order `K+1`.
    pub cutoff: usize,
    pub power: u32,
    pub e_lo: f64,
    pub e_hi: f64,
    pub e_step: f64,
    pub tol: f64,
    pub reg: Regularization,
    pub rho0_source: Rho0Source,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            params: LatticeParams::default(),
            cutoff: 20,
            power: 0,
            e_lo: -2.0,
            e_hi: 30.0,
            e_step: 0.005,
            tol: DEFAULT_TOL,
            reg: Regularization::FiniteK,
            rho0_source: Rho0Source::Analytic,
        }
    }
}

impl ScanConfig {
    pub fn new(params: LatticeParams, cutoff: usize, power: u32) -> Self {
        Self {
            params,
            cutoff,
            power,
            ..Self::default()
        }
    }

    pub fn with_range(mut self, e_lo: f64, e_hi: f64, e_step: f64) -> Self {
        self.e_lo = e_lo;
        self.e_hi = e_hi;
        self.e_step = e_step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        LatticeParams::new(self.params.period, self.params.strength)?;
        if self.cutoff == 0 {
            return bad("K must be >= 1".into());
        }
        if self.power > MAX_POWER {
            return Err(Error::InvalidPower(self.power));
        }
        if !(self.e_lo.is_finite() && self.e_hi.is_finite() && self.e_lo < self.e_hi) {
            return bad(format!(
                "need e_lo < e_hi, got [{}, {}]",
                self.e_lo, self.e_hi
            ));
        }
        if !(self.e_step > 0.0 && self.e_step.is_finite()) {
            return bad(format!("e_step must be positive, got {}", self.e_step));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be non-negative, got {}", self.tol));
        }
        Ok(())
    }

    /// Grid energies, with points on a mode pole (or at `E = 0`) pushed up
    /// by `e_step/10`.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.e_hi - self.e_lo) / self.e_step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| self.nudge(self.e_lo + i as f64 * self.e_step))
            .collect()
    }

    fn nudge(&self, energy: f64) -> f64 {
        if self.params.nearest_pole(energy).is_some() || energy.abs() < 1e-12 {
            energy + self.e_step / 10.0
        } else {
            energy
        }
    }
}

/// PSD verdict at one grid energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub energy: f64,
    pub allowed: bool,
    pub min_eig: f64,
    pub rho0: f64,
}

/// Grid energy whose test failed, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub energy: f64,
    pub reason: String,
}

/// Lower end of the allowed set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum MinEnergy {
    Bounded(f64),
    /// The lowest grid energy is already allowed.
    UnboundedBelow,
    /// Nothing on the grid is allowed.
    Empty,
}

impl MinEnergy {
    pub fn value(&self) -> Option<f64> {
        match self {
            MinEnergy::Bounded(e) => Some(*e),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap {
    /// Index of the band below the gap.
    pub index: usize,
    pub width: f64,
}

/// Allowed intervals read off a scan grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandSpectrum {
    pub allowed: Vec<BandInterval>,
    pub gaps: Vec<Gap>,
    pub e_min: MinEnergy,
    pub skipped: Vec<SkippedPoint>,
}

impl BandSpectrum {
    /// First `n` gap widths, `None` past the end.
    pub fn gap_widths(&self, n: usize) -> Vec<Option<f64>> {
        (0..n).map(|i| self.gaps.get(i).map(|g| g.width)).collect()
    }

    pub fn contains(&self, energy: f64) -> bool {
        self.allowed.iter().any(|b| b.contains(energy))
    }
}

/// PSD test at one energy.
pub fn test_energy(config: &ScanConfig, energy: f64) -> Result<GridPoint> {
    let r0 = rho0(energy, &config.params, config.cutoff, config.rho0_source)?;
    let table = MomentTable::from_rho0(
        energy,
        config.params,
        config.cutoff,
        config.reg,
        r0,
        config.cutoff,
    )?;
    let matrix = build_from_table(config.power, &table)?;
    let verdict = is_psd(&matrix, config.tol)?;
    Ok(GridPoint {
        energy,
        allowed: verdict.psd,
        min_eig: verdict.min_eig,
        rho0: r0,
    })
}

/// Evaluates every grid energy, in grid order.
pub fn scan_points(
    config: &ScanConfig,
) -> Result<Vec<std::result::Result<GridPoint, SkippedPoint>>> {
    config.validate()?;
    let grid = config.grid();
    Ok(grid
        .par_iter()
        .map(|&e| {
            test_energy(config, e).map_err(|err| SkippedPoint {
                energy: e,
                reason: err.to_string(),
            })
        })
        .collect())
}

/// Collapses per-point verdicts into maximal allowed intervals. Skipped
/// points neither open nor close an interval.
pub fn spectrum_from_points(
    points: &[std::result::Result<GridPoint, SkippedPoint>],
) -> BandSpectrum {
    let mut allowed: Vec<BandInterval> = Vec::new();
    let mut skipped = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    let mut first_evaluated: Option<bool> = None;
    let close = |run: (f64, f64), allowed: &mut Vec<BandInterval>| {
        let index = allowed.len() + 1;
        allowed.push(BandInterval {
            lo: run.0,
            hi: run.1,
            index,
        });
    };
    for p in points {
        match p {
            Err(s) => skipped.push(s.clone()),
            Ok(gp) => {
                first_evaluated.get_or_insert(gp.allowed);
                match (gp.allowed, open) {
                    (true, None) => open = Some((gp.energy, gp.energy)),
                    (true, Some((lo, _))) => open = Some((lo, gp.energy)),
                    (false, Some(run)) => {
                        close(run, &mut allowed);
                        open = None;
                    }
                    (false, None) => {}
                }
            }
        }
    }
    if let Some(run) = open {
        close(run, &mut allowed);
    }
    let gaps = allowed
        .windows(2)
        .map(|w| Gap {
            index: w[0].index,
            width: w[1].lo - w[0].hi,
        })
        .collect();
    let e_min = match (first_evaluated, allowed.first()) {
        (Some(true), _) => MinEnergy::UnboundedBelow,
        (_, Some(b)) => MinEnergy::Bounded(b.lo),
        _ => MinEnergy::Empty,
    };
    BandSpectrum {
        allowed,
        gaps,
        e_min,
        skipped,
    }
}

/// Sweeps the grid and returns the allowed bands.
pub fn scan(config: &ScanConfig) -> Result<BandSpectrum> {
    Ok(spectrum_from_points(&scan_points(config)?))
}

fn allowed_at(config: &ScanConfig, energy: f64) -> Option<bool> {
    let mut e = energy;
    for _ in 0..4 {
        if let Ok(p) = test_energy(config, e) {
            return Some(p.allowed);
        }
        e += config.e_step * 1e-3;
    }
    None
}

/// Lowest allowed energy, refined by bisection on the PSD boundary below the
/// first allowed grid point to `e_step/100`.
pub fn min_allowed_energy(config: &ScanConfig) -> Result<MinEnergy> {
    refine_min_energy(config, &scan_points(config)?)
}

/// [`min_allowed_energy`] from grid points already evaluated with `config`.
pub fn refine_min_energy(
    config: &ScanConfig,
    points: &[std::result::Result<GridPoint, SkippedPoint>],
) -> Result<MinEnergy> {
    let mut below: Option<f64> = None;
    let mut first: Option<f64> = None;
    for p in points.iter().flatten() {
        if p.allowed {
            first = Some(p.energy);
            break;
        }
        below = Some(p.energy);
    }
    let Some(mut hi) = first else {
        return Err(Error::NoAllowedEnergy);
    };
    let Some(mut lo) = below else {
        return Ok(MinEnergy::UnboundedBelow);
    };
    let target = config.e_step / 100.0;
    while hi - lo > target {
        let mid = 0.5 * (lo + hi);
        match allowed_at(config, mid) {
            Some(true) => hi = mid,
            Some(false) => lo = mid,
            None => break,
        }
    }
    Ok(MinEnergy::Bounded(hi))
}

/// `⟨x²⟩` over the cell `[-a/2, a/2]` from the density's cosine series,
/// `a²/12 + Σ_{m=1..K} [Aρ(0)/(E - π²m²/a²)] a²(-1)^m/(2π²m²)`, with the
/// analytic ρ(0).
pub fn x2_moment(energy: f64, params: &LatticeParams, cutoff: usize) -> Result<f64> {
    let r0 = rho0_analytic(energy, params)?;
    x2_moment_with_rho0(energy, params, cutoff, r0)
}

pub fn x2_moment_with_rho0(
    energy: f64,
    params: &LatticeParams,
    cutoff: usize,
    rho0: f64,
) -> Result<f64> {
    let a = params.period;
    let mut sum = 0.0;
    // Smallest terms first.
    for m in (1..=cutoff as i64).rev() {
        if params.is_pole(energy, m) {
            return Err(Error::Pole {
                energy,
                what: "⟨x²⟩ mode",
            });
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mf = m as f64;
        sum += params.strength * rho0 / (energy - params.pole_energy(m)) * sign
            / (2.0 * PI * PI * mf * mf);
    }
    Ok(a * a * (1.0 / 12.0 + sum))
}

/// `⟨x²⟩⟨p²⟩` with `⟨p²⟩ = E - Aρ(0)`, or `None` when either factor is
/// non-positive or undefined.
pub fn uncertainty_product(energy: f64, params: &LatticeParams, cutoff: usize) -> Option<f64> {
    let r0 = rho0_analytic(energy, params).ok()?;
    let x2 = x2_moment_with_rho0(energy, params, cutoff, r0).ok()?;
    let p2 = energy - params.strength * r0;
    (x2 > 0.0 && p2 > 0.0).then_some(x2 * p2)
}

/// Lowest grid energy with `⟨x²⟩⟨p²⟩ ≥ 1/4`.
pub fn heisenberg_min_energy(
    params: &LatticeParams,
    cutoff: usize,
    grid: &ScanConfig,
) -> Result<MinEnergy> {
    grid.validate()?;
    let energies = grid.grid();
    let ok: Vec<bool> = energies
        .par_iter()
        .map(|&e| uncertainty_product(e, params, cutoff).is_some_and(|p| p >= 0.25))
        .collect();
    Ok(match ok.iter().position(|&b| b) {
        Some(0) => MinEnergy::UnboundedBelow,
        Some(i) => MinEnergy::Bounded(energies[i]),
        None => MinEnergy::Empty,
    })
}

/// One `(K, power)` row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub rho0_source: Rho0Source,
    pub power: u32,
    pub cutoff: usize,
    pub gaps: [Option<f64>; 3],
    pub e_min: MinEnergy,
    pub skipped: usize,
}

/// Gap widths and `E_min` for every `(K, power)` pair, ordered by power then
/// K. `template` supplies the grid, tolerance and ρ(0) source.
pub fn convergence_study(
    template: &ScanConfig,
    cutoffs: &[usize],
    powers: &[u32],
) -> Result<Vec<ConvergenceRow>> {
    if cutoffs.is_empty() || powers.is_empty() {
        return Err(Error::InvalidParams("empty K or power list".into()));
    }
    let mut rows = Vec::with_capacity(cutoffs.len() * powers.len());
    for &power in powers {
        for &cutoff in cutoffs {
            let config = ScanConfig {
                cutoff,
                power,
                ..*template
            };
            let spectrum = scan(&config)?;
            let g = spectrum.gap_widths(3);
            rows.push(ConvergenceRow {
                rho0_source: config.rho0_source,
                power,
                cutoff,
                gaps: [g[0], g[1], g[2]],
                e_min: spectrum.e_min,
                skipped: spectrum.skipped.len(),
            });
        }
    }
    Ok(rows)
}
