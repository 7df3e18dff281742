//! Moments `⟨t_n p^s⟩` of a comb eigenstate, with `t_n = exp(2πinx/a)`.
//!
//! Everything follows from `⟨t_n⟩ = (Aρ(0)/2) / (E - n²π²/a²)` for `n ≠ 0`
//! and `⟨t_0⟩ = 1`, so a whole table is fixed by the energy and ρ(0).
//! Momentum powers up to four have closed forms; the fourth contains the
//! divergent sum `Σ_m 1`, resolved by a [`Regularization`].

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rho0_analytic;
use crate::lattice::{LatticeParams, POLE_TOL};

/// Treatment of the divergent mode sum `Σ_{m=-∞..∞} 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Regularization {
    /// Count the retained modes: `Σ 1 ↦ 2K + 1`.
    #[default]
    FiniteK,
    /// `1 + 2ζ(0) = 0`.
    Zeta,
}

impl Regularization {
    pub fn divergent_sum(self, cutoff: usize) -> f64 {
        match self {
            Regularization::FiniteK => (2 * cutoff + 1) as f64,
            Regularization::Zeta => 0.0,
        }
    }
}

/// Where ρ(0) comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Rho0Source {
    /// Truncated mode sum with the same cutoff as the constraint matrix.
    FiniteK,
    /// Closed form, the `K → ∞` limit.
    #[default]
    Analytic,
}

/// ρ(0) from the truncated sum, `(a - A Σ_{m=1..K} 1/(E - π²m²/a²))⁻¹`.
pub fn rho0_finite_k(energy: f64, params: &LatticeParams, cutoff: usize) -> Result<f64> {
    if cutoff == 0 {
        return Err(Error::InvalidParams("mode cutoff K must be >= 1".into()));
    }
    let mut sum = 0.0;
    let mut scale = params.period;
    for m in 1..=cutoff as i64 {
        if params.is_pole(energy, m) {
            return Err(Error::Pole {
                energy,
                what: "finite-K ρ(0) mode",
            });
        }
        let term = params.strength / (energy - params.pole_energy(m));
        sum += term;
        scale += term.abs();
    }
    let bracket = params.period - sum;
    if bracket.abs() <= POLE_TOL * scale {
        return Err(Error::Divergence { energy });
    }
    Ok(1.0 / bracket)
}

/// ρ(0) from the selected source.
pub fn rho0(energy: f64, params: &LatticeParams, cutoff: usize, source: Rho0Source) -> Result<f64> {
    match source {
        Rho0Source::FiniteK => rho0_finite_k(energy, params, cutoff),
        Rho0Source::Analytic => rho0_analytic(energy, params),
    }
}

/// `⟨t_n⟩` for a given ρ(0); `⟨t_0⟩ = 1`.
pub fn t_moment(n: i64, energy: f64, params: &LatticeParams, rho0: f64) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    if params.is_pole(energy, n) {
        return Err(Error::Pole {
            energy,
            what: "⟨t_n⟩",
        });
    }
    Ok(0.5 * params.strength * rho0 / (energy - params.pole_energy(n)))
}

/// Closed forms of `⟨t_n p^s⟩` for `s ≤ 4` given `⟨t_n⟩`.
fn tn_p_closed(
    n: i64,
    power: u32,
    t_n: f64,
    energy: f64,
    params: &LatticeParams,
    rho0: f64,
    divergent_sum: f64,
) -> Result<f64> {
    let c = params.mode_unit();
    let nc = n as f64 * c;
    let arho = params.strength * rho0;
    Ok(match power {
        0 => t_n,
        1 => -nc * t_n,
        2 => energy * t_n - arho,
        3 => -nc * (energy * t_n - 2.0 * arho),
        4 => {
            energy * energy * t_n
                - arho
                    * (2.0 * energy + 4.0 * nc * nc
                        - params.strength / params.period * divergent_sum)
        }
        p => return Err(Error::InvalidPower(p)),
    })
}

/// `⟨p^{2s}⟩ = E^s (1 - s A ρ(0) / E)`.
pub fn p_even_moment(s: u32, energy: f64, params: &LatticeParams, rho0: f64) -> Result<f64> {
    if s == 0 {
        return Ok(1.0);
    }
    if energy == 0.0 {
        return Err(Error::InvalidParams("⟨p^2s⟩ needs E != 0".into()));
    }
    let s_f = s as f64;
    Ok(energy.powi(s as i32) * (1.0 - s_f * params.strength * rho0 / energy))
}

/// Moments at one energy, memoized over the mode range the bootstrap needs.
///
/// Only `⟨t_d⟩` for `0 ≤ d ≤ max_mode` is stored; negative modes follow from
/// `⟨t_{-d}⟩ = ⟨t_d⟩` and all `⟨t_n p^s⟩` are generated from the closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub energy: f64,
    pub params: LatticeParams,
    /// Mode cutoff `K` (sets the finite-K ρ(0) and the regularized sum).
    pub cutoff: usize,
    pub reg: Regularization,
    rho0: f64,
    modes: Vec<f64>,
}

impl MomentTable {
    /// Table with modes `|d| ≤ K`, enough for a `(K+1) × (K+1)` matrix.
    pub fn new(
        energy: f64,
        params: LatticeParams,
        cutoff: usize,
        reg: Regularization,
        source: Rho0Source,
    ) -> Result<Self> {
        Self::with_modes(energy, params, cutoff, reg, source, cutoff)
    }

    pub fn with_modes(
        energy: f64,
        params: LatticeParams,
        cutoff: usize,
        reg: Regularization,
        source: Rho0Source,
        max_mode: usize,
    ) -> Result<Self> {
        let rho0 = rho0(energy, &params, cutoff, source)?;
        Self::from_rho0(energy, params, cutoff, reg, rho0, max_mode)
    }

    /// Table for an externally supplied ρ(0).
    pub fn from_rho0(
        energy: f64,
        params: LatticeParams,
        cutoff: usize,
        reg: Regularization,
        rho0: f64,
        max_mode: usize,
    ) -> Result<Self> {
        let modes = (0..=max_mode as i64)
            .map(|d| t_moment(d, energy, &params, rho0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            energy,
            params,
            cutoff,
            reg,
            rho0,
            modes,
        })
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn max_mode(&self) -> usize {
        self.modes.len() - 1
    }

    /// Regularized value of `Σ_m 1`.
    pub fn divergent_sum(&self) -> f64 {
        self.reg.divergent_sum(self.cutoff)
    }

    /// `⟨t_n⟩`.
    #[inline]
    pub fn t(&self, n: i64) -> Result<f64> {
        self.modes
            .get(n.unsigned_abs() as usize)
            .copied()
            .ok_or(Error::MissingMoment {
                mode: n,
                power: 0,
                available: self.max_mode(),
            })
    }

    /// `⟨t_n p^s⟩` for `s ≤ 4`.
    pub fn tn_p(&self, n: i64, power: u32) -> Result<f64> {
        let t_n = self.t(n).map_err(|_| Error::MissingMoment {
            mode: n,
            power,
            available: self.max_mode(),
        })?;
        tn_p_closed(
            n,
            power,
            t_n,
            self.energy,
            &self.params,
            self.rho0,
            self.divergent_sum(),
        )
    }

    /// All stored `⟨t_n p^s⟩`, `|n| ≤ max_mode`, `s ≤ 4`, ordered by `(n, s)`.
    pub fn entries(&self) -> BTreeMap<(i64, u32), f64> {
        let top = self.max_mode() as i64;
        let mut out = BTreeMap::new();
        for n in -top..=top {
            for s in 0..=4 {
                if let Ok(v) = self.tn_p(n, s) {
                    out.insert((n, s), v);
                }
            }
        }
        out
    }
}

/// `⟨t_n p^s⟩` through the closed forms (`s ≤ 4`).
pub fn tn_p_moment(
    n: i64,
    power: u32,
    energy: f64,
    params: &LatticeParams,
    cutoff: usize,
    reg: Regularization,
    source: Rho0Source,
) -> Result<f64> {
    let table = MomentTable::with_modes(
        energy,
        *params,
        cutoff,
        reg,
        source,
        n.unsigned_abs() as usize,
    )?;
    table.tn_p(n, power)
}

/// `⟨t_n p^s⟩` from the truncated double recursion
///
/// `⟨t_n p^{s+2}⟩ = (E - 4n²π²/a²)⟨t_n p^s⟩ - 4nπ/a ⟨t_n p^{s+1}⟩
///                 - (A/a) Σ_{m=-K..K} ⟨t_{m+n} p^s⟩`
///
/// seeded by `⟨t_n p⟩ = -nπ/a ⟨t_n⟩` and `⟨t_n p²⟩ = E⟨t_n⟩ - Aρ(0)`, with
/// the finite-K ρ(0) of the same cutoff. Any power is accepted; each
/// extra pair of powers nests one more window sum.
pub fn tn_p_recursive(
    n: i64,
    power: u32,
    energy: f64,
    params: &LatticeParams,
    cutoff: usize,
) -> Result<f64> {
    let rho0 = rho0_finite_k(energy, params, cutoff)?;
    let mut memo = HashMap::new();
    tn_p_rec(n, power, energy, params, cutoff as i64, rho0, &mut memo)
}

fn tn_p_rec(
    n: i64,
    power: u32,
    energy: f64,
    params: &LatticeParams,
    cutoff: i64,
    rho0: f64,
    memo: &mut HashMap<(i64, u32), f64>,
) -> Result<f64> {
    if let Some(&v) = memo.get(&(n, power)) {
        return Ok(v);
    }
    let c = params.mode_unit();
    let nc = n as f64 * c;
    let value = match power {
        0 => t_moment(n, energy, params, rho0)?,
        1 => -nc * t_moment(n, energy, params, rho0)?,
        2 => energy * t_moment(n, energy, params, rho0)? - params.strength * rho0,
        s => {
            let lower = s - 2;
            let mut window = 0.0;
            for m in -cutoff..=cutoff {
                window += tn_p_rec(m + n, lower, energy, params, cutoff, rho0, memo)?;
            }
            (energy - 4.0 * nc * nc) * tn_p_rec(n, lower, energy, params, cutoff, rho0, memo)?
                - 4.0 * nc * tn_p_rec(n, lower + 1, energy, params, cutoff, rho0, memo)?
                - params.strength / params.period * window
        }
    };
    memo.insert((n, power), value);
    Ok(value)
}

/// Fourier modes `V_m` of a real periodic potential.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPotential {
    pub period: f64,
    modes: BTreeMap<i64, Complex64>,
}

impl FourierPotential {
    pub fn new(period: f64, modes: BTreeMap<i64, Complex64>) -> Result<Self> {
        for (&m, &v) in &modes {
            let partner = modes.get(&-m).copied().unwrap_or_default();
            if (partner - v.conj()).norm() > 1e-12 * v.norm().max(1.0) {
                return Err(Error::InvalidParams(format!(
                    "V_{{-{m}}} must be the conjugate of V_{m} for a real potential"
                )));
            }
        }
        Ok(Self { period, modes })
    }

    /// Dirac comb: `V_m = A/a` for every `|m| ≤ cutoff`.
    pub fn dirac_comb(params: &LatticeParams, cutoff: usize) -> Self {
        let v = Complex64::new(params.strength / params.period, 0.0);
        let cutoff = cutoff as i64;
        let modes = (-cutoff..=cutoff).map(|m| (m, v)).collect();
        Self {
            period: params.period,
            modes,
        }
    }

    /// `V(x) = V0 cos(2πx/a)`, so `V_{±1} = V0/2` and nothing else.
    pub fn cosine(amplitude: f64, period: f64) -> Self {
        let half = Complex64::new(0.5 * amplitude, 0.0);
        let modes = [(-1, half), (1, half)].into_iter().collect();
        Self { period, modes }
    }

    pub fn mode(&self, m: i64) -> Complex64 {
        self.modes.get(&m).copied().unwrap_or_default()
    }

    /// Mode indices with a non-zero coefficient.
    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.modes
            .iter()
            .filter(|(_, v)| v.norm() > 0.0)
            .map(|(&m, _)| m)
    }
}

/// Residual of the Fourier-mode recursion at mode `n`,
/// `Σ_{|m| ≤ M} (2n + m) V_m ⟨t_{n+m}⟩ - 2n [E - n²π²/a²] ⟨t_n⟩`.
///
/// For `n = 0` this is `(a/2πi)⟨V'⟩`, which vanishes for any periodic
/// potential.
pub fn fourier_recursion_rhs(
    n: i64,
    energy: f64,
    potential: &FourierPotential,
    moments: &MomentTable,
    mode_cutoff: usize,
) -> Result<Complex64> {
    let needed = n.unsigned_abs() as usize + mode_cutoff;
    if moments.max_mode() < needed {
        return Err(Error::MissingMoment {
            mode: needed as i64,
            power: 0,
            available: moments.max_mode(),
        });
    }
    let c = std::f64::consts::PI / potential.period;
    let mut rhs = Complex64::new(0.0, 0.0);
    for m in potential
        .support()
        .filter(|m| m.unsigned_abs() as usize <= mode_cutoff)
    {
        rhs += potential.mode(m) * ((2 * n + m) as f64 * moments.t(n + m)?);
    }
    let nc = n as f64 * c;
    let lhs = 2.0 * n as f64 * (energy - nc * nc) * moments.t(n)?;
    Ok(rhs - lhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    const RHO0_AT_ONE: f64 = 0.2554;

    fn comb() -> LatticeParams {
        LatticeParams::default()
    }

    #[test]
    fn finite_k_reference_values() {
        let p = comb();
        assert_abs_diff_eq!(rho0_finite_k(1.0, &p, 5).unwrap(), 0.2654, epsilon = 5e-4);
        assert_abs_diff_eq!(
            rho0_finite_k(1.0, &p, 100_000).unwrap(),
            0.2554,
            epsilon = 1e-3
        );
        assert!(matches!(
            rho0_finite_k(PI * PI / 4.0 + 1e-13, &p, 5),
            Err(Error::Pole { .. })
        ));
        assert!(rho0_finite_k(1.0, &p, 0).is_err());
    }

    #[test]
    fn finite_k_converges_to_analytic() {
        let p = comb();
        let exact = rho0_analytic(1.0, &p).unwrap();
        let errs: Vec<f64> = [10, 100, 1000, 10_000]
            .iter()
            .map(|&k| (rho0_finite_k(1.0, &p, k).unwrap() - exact).abs())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]));
        assert!(errs[3] < 1e-5);
    }

    #[test]
    fn t_moment_values() {
        let p = comb();
        assert_eq!(t_moment(0, 7.0, &p, 0.3).unwrap(), 1.0);
        assert_abs_diff_eq!(
            t_moment(1, 1.0, &p, RHO0_AT_ONE).unwrap(),
            -0.1741,
            epsilon = 1e-3
        );
        assert_abs_diff_eq!(
            t_moment(2, 1.0, &p, RHO0_AT_ONE).unwrap(),
            -0.0288,
            epsilon = 1e-3
        );
        assert_eq!(
            t_moment(3, 1.0, &p, RHO0_AT_ONE).unwrap(),
            t_moment(-3, 1.0, &p, RHO0_AT_ONE).unwrap()
        );
        assert!(t_moment(1, PI * PI / 4.0, &p, 0.3).is_err());
    }

    fn table_at_one(reg: Regularization) -> MomentTable {
        MomentTable::from_rho0(1.0, comb(), 10, reg, RHO0_AT_ONE, 10).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let t = table_at_one(Regularization::FiniteK);
        assert_abs_diff_eq!(t.tn_p(0, 2).unwrap(), 0.4892, epsilon = 2e-3);
        assert_abs_diff_eq!(t.tn_p(1, 1).unwrap(), 0.2735, epsilon = 2e-3);
        assert_abs_diff_eq!(t.tn_p(1, 3).unwrap(), 1.878, epsilon = 5e-3);
        assert!(matches!(t.tn_p(0, 5), Err(Error::InvalidPower(5))));
        assert!(matches!(t.tn_p(11, 0), Err(Error::MissingMoment { .. })));
    }

    #[test]
    fn table_invariants() {
        let t = MomentTable::new(
            1.3,
            comb(),
            20,
            Regularization::FiniteK,
            Rho0Source::FiniteK,
        )
        .unwrap();
        let e = t.entries();
        assert_eq!(e[&(0, 0)], 1.0);
        for n in 1..=20 {
            assert_eq!(e[&(n, 0)], e[&(-n, 0)]);
            assert!(e[&(n, 0)] < 0.0);
        }
    }

    #[test]
    fn mode_sum_reproduces_rho0() {
        let p = comb();
        for &k in &[3usize, 17, 60] {
            let t =
                MomentTable::new(0.9, p, k, Regularization::FiniteK, Rho0Source::FiniteK).unwrap();
            let sum: f64 = (-(k as i64)..=k as i64).map(|m| t.t(-m).unwrap()).sum();
            assert_abs_diff_eq!(sum / p.period, t.rho0(), epsilon = 1e-13);
        }
    }

    #[test]
    fn zeta_mode_is_cutoff_independent() {
        let p = comb();
        let a = MomentTable::from_rho0(1.0, p, 5, Regularization::Zeta, 0.25, 3).unwrap();
        let b = MomentTable::from_rho0(1.0, p, 500, Regularization::Zeta, 0.25, 3).unwrap();
        for n in 0..=3 {
            assert_eq!(a.tn_p(n, 4).unwrap(), b.tn_p(n, 4).unwrap());
        }
        let f = MomentTable::from_rho0(1.0, p, 5, Regularization::FiniteK, 0.25, 3).unwrap();
        assert!(f.tn_p(0, 4).unwrap() != a.tn_p(0, 4).unwrap());
    }

    #[test]
    fn zeta_p_even_matches_closed_forms() {
        let p = comb();
        for &e in &[0.3, 1.0, 4.5, 17.0] {
            let rho = rho0_analytic(e, &p).unwrap();
            let t = MomentTable::from_rho0(e, p, 40, Regularization::Zeta, rho, 0).unwrap();
            for s in 0..=2u32 {
                let want = p_even_moment(s, e, &p, rho).unwrap();
                assert_relative_eq!(t.tn_p(0, 2 * s).unwrap(), want, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn p_even_examples() {
        let p = comb();
        assert_eq!(p_even_moment(0, 3.0, &p, 0.1).unwrap(), 1.0);
        assert_abs_diff_eq!(
            p_even_moment(1, 1.0, &p, 0.5).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            p_even_moment(2, 2.0, &p, 0.5).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert!(p_even_moment(1, 0.0, &p, 0.5).is_err());
    }

    #[test]
    fn recursion_matches_closed_forms() {
        let p = comb();
        let k = 100;
        for &e in &[0.8, 1.7, 5.0] {
            let rho = rho0_finite_k(e, &p, k).unwrap();
            let table = MomentTable::from_rho0(e, p, k, Regularization::FiniteK, rho, 2).unwrap();
            for n in 0..=2i64 {
                for s in 2..=4u32 {
                    let closed = table.tn_p(n, s).unwrap();
                    let rec = tn_p_recursive(n, s, e, &p, k).unwrap();
                    let err = (rec - closed).abs() / closed.abs().max(1.0);
                    assert!(err < 1e-2, "E={e} n={n} s={s}: rec {rec} closed {closed}");
                }
            }
        }
    }

    #[test]
    fn recursion_error_shrinks_with_cutoff() {
        let p = comb();
        let err = |k: usize| {
            let rho = rho0_finite_k(1.7, &p, k).unwrap();
            let t = MomentTable::from_rho0(1.7, p, k, Regularization::FiniteK, rho, 1).unwrap();
            (tn_p_recursive(1, 4, 1.7, &p, k).unwrap() - t.tn_p(1, 4).unwrap()).abs()
        };
        assert!(err(200) < err(50));
    }

    #[test]
    fn cosine_potential_has_two_modes() {
        let pot = FourierPotential::cosine(1.5, 2.0);
        assert_eq!(pot.support().collect::<Vec<_>>(), vec![-1, 1]);
        let mut bad = BTreeMap::new();
        bad.insert(1, Complex64::new(1.0, 0.5));
        bad.insert(-1, Complex64::new(1.0, 0.5));
        assert!(FourierPotential::new(2.0, bad).is_err());
    }

    #[test]
    fn comb_satisfies_fourier_recursion() {
        let p = comb();
        let cutoff = 10_000;
        let table = MomentTable::with_modes(
            1.0,
            p,
            cutoff,
            Regularization::FiniteK,
            Rho0Source::Analytic,
            cutoff + 1,
        )
        .unwrap();
        let pot = FourierPotential::dirac_comb(&p, cutoff);
        let r1 = fourier_recursion_rhs(1, 1.0, &pot, &table, cutoff).unwrap();
        assert!(r1.norm() < 1e-3, "residual {r1}");
        let r0 = fourier_recursion_rhs(0, 1.0, &pot, &table, cutoff).unwrap();
        assert!(r0.norm() < 1e-12);
        assert!(fourier_recursion_rhs(3, 1.0, &pot, &table, cutoff).is_err());
    }
}
