//! Infinite square well on `[0, a]`: moment recursion, closed moments,
//! Fourier modes of the density rebuilt from moments, energy quantization,
//! and the strong-barrier limit of the comb.
//!
//! The boundary terms fix `ψ'(a)² = ψ'(0)² = 2E/a`, which leaves
//! `⟨Xⁿ⟩ = -n(n-1)/(4E) ⟨X^{n-2}⟩ + aⁿ/(n+1)` with `⟨X⁰⟩ = 1`,
//! `⟨X¹⟩ = a/2`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::rho0_analytic;
use crate::lattice::LatticeParams;
use crate::psd::{is_psd_dense, PsdVerdict};

/// Mode tail that [`isw_fourier_mode`] accepts.
pub const MODE_TAIL_TOL: f64 = 1e-8;
/// Default number of centred-moment terms in a mode sum.
pub const DEFAULT_TRUNC: usize = 80;
/// `|sin(a√E)/(a√E)|` below this counts as an eigen-energy.
const NODE_TOL: f64 = 1e-12;

fn check(energy: f64, width: f64) -> Result<()> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "well energy must be > 0, got {energy}"
        )));
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "well width must be > 0, got {width}"
        )));
    }
    Ok(())
}

/// `⟨X⁰⟩, …, ⟨X^{max}⟩` at one energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IswMoments {
    pub energy: f64,
    pub width: f64,
    pub values: Vec<f64>,
}

impl IswMoments {
    pub fn new(energy: f64, width: f64, max_power: usize) -> Result<Self> {
        check(energy, width)?;
        let mut values = Vec::with_capacity(max_power + 1);
        for n in 0..=max_power {
            let v = match n {
                0 => 1.0,
                1 => 0.5 * width,
                _ => {
                    let nf = n as f64;
                    -nf * (nf - 1.0) / (4.0 * energy) * values[n - 2]
                        + width.powi(n as i32) / (nf + 1.0)
                }
            };
            values.push(v);
        }
        Ok(Self {
            energy,
            width,
            values,
        })
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }

    /// `0 ≤ ⟨Xⁿ⟩ ≤ aⁿ` for every stored power.
    pub fn within_support(&self) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(n, &v)| v >= 0.0 && v <= self.width.powi(n as i32) * (1.0 + 1e-12))
    }

    /// Hankel matrix `⟨X^{i+j}⟩`, `0 ≤ i, j ≤ order`.
    pub fn hankel(&self, order: usize) -> Result<DMatrix<f64>> {
        if 2 * order >= self.values.len() {
            return Err(Error::InvalidParams(format!(
                "Hankel order {order} needs moments up to {}",
                2 * order
            )));
        }
        Ok(DMatrix::from_fn(order + 1, order + 1, |i, j| {
            self.values[i + j]
        }))
    }
}

/// `⟨Xⁿ⟩` from the recursion.
pub fn isw_moment(n: usize, energy: f64, width: f64) -> Result<f64> {
    Ok(IswMoments::new(energy, width, n)?.values[n])
}

/// `⟨Xⁿ⟩ = Σ_{j=0..⌊n/2⌋} (-1/4E)^j n! a^{n-2j}/(n-2j+1)!`, the recursion
/// unrolled down to its seed (one sum for both parities).
pub fn isw_moment_closed(n: usize, energy: f64, width: f64) -> Result<f64> {
    check(energy, width)?;
    // term_j = (-1/4E)^j n!/(n-2j+1)! a^{n-2j}
    let mut term = width.powi(n as i32) / (n as f64 + 1.0);
    let mut sum = term;
    for j in 1..=n / 2 {
        let hi = (n - 2 * j + 3) as f64;
        let lo = (n - 2 * j + 2) as f64;
        term *= -hi * lo / (4.0 * energy * width * width);
        sum += term;
    }
    Ok(sum)
}

/// Centred moments `⟨(X - a/2)^{2m}⟩`, `m = 0..=max`. Odd ones vanish.
pub fn isw_centred_moments(energy: f64, width: f64, max: usize) -> Result<Vec<f64>> {
    check(energy, width)?;
    let x = width * energy.sqrt();
    let s = sinc(x);
    let b = 0.5 * width;
    let mut out = Vec::with_capacity(max + 1);
    let mut fact = 1.0; // (2m)!
    for m in 0..=max {
        if m > 0 {
            fact *= (2 * m - 1) as f64 * (2 * m) as f64;
        }
        let geo = fact * (-1.0 / (4.0 * energy)).powi(m as i32) * s;
        out.push(geo - fact * b.powi(2 * m as i32) * remainder_sum(m, x, 1.0));
    }
    Ok(out)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `scale · Σ_{j≥1} (-1)^j x^{2j}/(2m+2j+1)!`, with `scale` absorbed at the
/// start so the terms stay representable.
fn remainder_sum(m: usize, x: f64, scale: f64) -> f64 {
    // Start at scale/(2m+1)!.
    let mut term = scale;
    for k in 1..=(2 * m + 1) {
        term /= k as f64;
    }
    remainder_from(m, x, term)
}

fn remainder_from(m: usize, x: f64, base: f64) -> f64 {
    let x2 = x * x;
    let mut term = base;
    let mut sum = 0.0;
    let mut j = 1usize;
    loop {
        let k = (2 * m + 2 * j) as f64;
        term *= -x2 / (k * (k + 1.0));
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(f64::MIN_POSITIVE) && (j as f64) > x {
            break;
        }
        if term == 0.0 || j > 10_000 {
            break;
        }
        j += 1;
    }
    sum
}

/// Truncated mode sum and an estimate of its tail.
///
/// `c_n = ((-1)^n/a) Σ_{m=0..trunc} (-1)^m q^{2m} ⟨Y^{2m}⟩/(2m)!`,
/// `q = 2πn/a`, `Y = X - a/2`. Each centred moment splits into
/// `(2m)!(-1/4E)^m sinc(a√E)`, whose mode series is geometric in
/// `r = q²/4E`, and an entire remainder.
fn mode_sum(n: i64, energy: f64, width: f64, trunc: usize) -> (f64, f64) {
    let x = width * energy.sqrt();
    let s = sinc(x);
    let s = if s.abs() <= NODE_TOL { 0.0 } else { s };
    let q = 2.0 * PI * n as f64 / width;
    let qb = 0.5 * q * width;
    let r = q * q / (4.0 * energy);

    let mut geo = 0.0;
    let mut geo_tail = 0.0;
    if s != 0.0 {
        let mut rm = 1.0;
        for _ in 0..=trunc {
            geo += rm;
            rm *= r;
        }
        geo_tail = if r < 1.0 {
            (s * rm / (1.0 - r)).abs()
        } else {
            f64::INFINITY
        };
        geo *= s;
    }

    // Σ_m (-1)^m (qb)^{2m} S_m with base_m = (qb)^{2m}/(2m+1)!.
    let mut rem = 0.0;
    let mut base = 1.0;
    let mut last = 0.0;
    for m in 0..=trunc {
        if m > 0 {
            let k = (2 * m) as f64;
            base *= qb * qb / (k * (k + 1.0));
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        last = sign * remainder_from(m, x, base);
        rem += last;
    }
    let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
    let value = sign_n / width * (geo - rem);
    (value, (geo_tail + last.abs()) / width)
}

/// Fourier mode `c_n = (1/a) ∫₀ᵃ ρ(x) e^{-2πinx/a} dx` from the moments.
///
/// Fails with [`Error::NonConvergent`] when the moment series does not
/// settle below [`MODE_TAIL_TOL`] within `trunc` terms, which is what happens
/// away from the eigen-energies for `|n| ≥ a√E/π`.
pub fn isw_fourier_mode(n: i64, energy: f64, width: f64, trunc: usize) -> Result<Complex64> {
    check(energy, width)?;
    let (value, tail) = mode_sum(n, energy, width, trunc);
    if !(tail < MODE_TAIL_TOL) || !value.is_finite() {
        return Err(Error::NonConvergent(format!(
            "mode {n} at E = {energy}: tail {tail:e} after {trunc} terms"
        )));
    }
    Ok(Complex64::new(value, 0.0))
}

/// Eigen-state density `(2/a) sin²(mπx/a)`.
pub fn isw_density(x: f64, m: u32, width: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParams("quantum number must be >= 1".into()));
    }
    if !(x >= -1e-12 && x <= width + 1e-12) {
        return Err(Error::InvalidParams(format!(
            "x = {x} outside [0, {width}]"
        )));
    }
    let s = (m as f64 * PI * x / width).sin();
    Ok(2.0 / width * s * s)
}

/// `ρ(x) = c₀ + 2 Σ_{n≥1} Re(c_n e^{2πinx/a})` from modes `c_0, c_1, …`.
pub fn density_from_modes(x: f64, modes: &[Complex64], width: f64) -> f64 {
    let theta = 2.0 * PI * x / width;
    modes.iter().enumerate().fold(0.0, |acc, (n, c)| {
        let phase = Complex64::from_polar(1.0, n as f64 * theta);
        let w = if n == 0 { 1.0 } else { 2.0 };
        acc + w * (c * phase).re
    })
}

/// Level `m* = max(1, round(a√E/π))` whose pattern an energy is tested
/// against.
pub fn nearest_level(energy: f64, width: f64) -> u32 {
    ((width * energy.max(0.0).sqrt() / PI).round() as u32).max(1)
}

/// `Σ_{n=0..m*+1} |c_n - pattern_n|` with the pattern `c₀ = 1/a`,
/// `c_{m*} = -1/(2a)`, others zero.
///
/// Modes come from the `trunc`-term moment sums without the convergence
/// check, so off the eigen-energies the divergent part shows up as a large
/// residual rather than an error.
pub fn quantization_residual(energy: f64, width: f64, trunc: usize) -> Result<f64> {
    check(energy, width)?;
    let level = nearest_level(energy, width) as i64;
    let mut total = 0.0;
    for n in 0..=level + 1 {
        let (c, _) = mode_sum(n, energy, width, trunc);
        let target = if n == 0 {
            1.0 / width
        } else if n == level {
            -0.5 / width
        } else {
            0.0
        };
        total += (c - target).abs();
    }
    Ok(if total.is_finite() {
        total
    } else {
        f64::INFINITY
    })
}

/// Hankel positivity of `⟨X^{i+j}⟩` up to `order`.
pub fn hankel_psd(energy: f64, width: f64, order: usize, tol: f64) -> Result<PsdVerdict> {
    let moments = IswMoments::new(energy, width, 2 * order)?;
    is_psd_dense(&moments.hankel(order)?, tol)
}

/// `Aρ(0)/(E - n²π²/a²)` at `E = n²π²/a² + delta`; tends to `-1`.
pub fn kp_isw_limit_check(n: i64, params: &LatticeParams, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("limit needs n != 0".into()));
    }
    let pole = params.pole_energy(n);
    let energy = pole + delta;
    if delta == 0.0 || params.is_pole(energy, n) {
        return Err(Error::Pole {
            energy,
            what: "comb-to-well limit at delta = 0",
        });
    }
    let r0 = rho0_analytic(energy, params)?;
    Ok(params.strength * r0 / (energy - pole))
}

/// `⟨t_n⟩` of the comb at `E = m²π²/a² + delta`; approaches the well's
/// `a c_n` pattern (`-1/2` for `|n| = m`, zero otherwise).
pub fn kp_mode_limit(n: i64, m: i64, params: &LatticeParams, delta: f64) -> Result<f64> {
    let energy = params.pole_energy(m) + delta;
    let r0 = rho0_analytic(energy, params)?;
    crate::moments::t_moment(n, energy, params, r0)
}

/// Polynomial (Neville) extrapolation of `values` sampled at `steps` to
/// step zero.
pub fn richardson_limit(steps: &[f64], values: &[f64]) -> Result<f64> {
    if steps.len() != values.len() || steps.is_empty() {
        return Err(Error::InvalidParams(
            "need matching, non-empty samples".into(),
        ));
    }
    let mut p = values.to_vec();
    let n = p.len();
    for k in 1..n {
        for i in 0..n - k {
            let (hi, hk) = (steps[i], steps[i + k]);
            if hi == hk {
                return Err(Error::InvalidParams("repeated extrapolation step".into()));
            }
            p[i] = (hi * p[i + 1] - hk * p[i]) / (hi - hk);
        }
    }
    Ok(p[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const E1: f64 = PI * PI / 4.0;

    fn x2_quadrature(m: u32, a: f64) -> f64 {
        let n = 20_000;
        let h = a / n as f64;
        (0..=n)
            .map(|i| {
                let x = i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * x * x * isw_density(x, m, a).unwrap()
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn seeds_and_second_moment() {
        assert_eq!(isw_moment(0, E1, 2.0).unwrap(), 1.0);
        assert_eq!(isw_moment(1, 3.3, 2.0).unwrap(), 1.0);
        let x2 = isw_moment(2, E1, 2.0).unwrap();
        assert_abs_diff_eq!(x2, 4.0 * (1.0 / 3.0 - 0.5 / (PI * PI)), epsilon = 1e-12);
        assert_abs_diff_eq!(x2, x2_quadrature(1, 2.0), epsilon = 1e-6);
        assert_abs_diff_eq!(x2, 1.1307, epsilon = 1e-4);
    }

    #[test]
    fn closed_matches_recursion() {
        for level in 1..=3 {
            let e = (level * level) as f64 * E1;
            for n in 0..=20 {
                let r = isw_moment(n, e, 2.0).unwrap();
                let c = isw_moment_closed(n, e, 2.0).unwrap();
                assert_relative_eq!(r, c, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn centred_moments_match_quadrature() {
        let a = 2.0;
        let c = isw_centred_moments(E1, a, 3).unwrap();
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c[1], 1.0 / 3.0 - 2.0 / (PI * PI), epsilon = 1e-12);
        let raw = IswMoments::new(E1, a, 2).unwrap();
        assert_abs_diff_eq!(c[1], raw.values[2] - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn moments_bounded_and_hankel_psd() {
        for level in 1..=3 {
            let e = (level * level) as f64 * E1;
            let m = IswMoments::new(e, 2.0, 12).unwrap();
            assert!(m.within_support());
            for order in 1..=5 {
                assert!(hankel_psd(e, 2.0, order, 1e-9).unwrap().psd);
            }
        }
    }

    #[test]
    fn modes_hit_pattern() {
        for level in 1..=3i64 {
            let e = (level * level) as f64 * E1;
            for n in 0..=5i64 {
                let c = isw_fourier_mode(n, e, 2.0, DEFAULT_TRUNC).unwrap();
                let want = match n {
                    0 => 0.5,
                    _ if n == level => -0.25,
                    _ => 0.0,
                };
                assert_abs_diff_eq!(c.re, want, epsilon = 1e-6);
                assert_eq!(c.im, 0.0);
            }
        }
    }

    #[test]
    fn off_level_high_modes_do_not_converge() {
        assert!(matches!(
            isw_fourier_mode(2, 1.3 * E1, 2.0, DEFAULT_TRUNC),
            Err(Error::NonConvergent(_))
        ));
        assert!(isw_fourier_mode(0, 1.3 * E1, 2.0, DEFAULT_TRUNC).is_ok());
    }

    #[test]
    fn density_rebuilt_from_modes() {
        let a = 2.0;
        let e = 4.0 * E1;
        let modes: Vec<_> = (0..=6)
            .map(|n| isw_fourier_mode(n, e, a, DEFAULT_TRUNC).unwrap())
            .collect();
        for i in 0..=1000 {
            let x = a * i as f64 / 1000.0;
            assert_abs_diff_eq!(
                density_from_modes(x, &modes, a),
                isw_density(x, 2, a).unwrap(),
                epsilon = 1e-6
            );
        }
    }

    #[test]
    fn density_basics() {
        assert_eq!(isw_density(0.0, 1, 2.0).unwrap(), 0.0);
        assert_abs_diff_eq!(isw_density(1.0, 1, 2.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(isw_density(0.5, 0, 2.0).is_err());
        assert!(isw_density(2.5, 1, 2.0).is_err());
    }

    #[test]
    fn residual_separates_levels() {
        let eigen: f64 = (1..=3)
            .map(|l| quantization_residual((l * l) as f64 * E1, 2.0, DEFAULT_TRUNC).unwrap())
            .fold(0.0, f64::max);
        assert!(eigen < 1e-6, "{eigen}");
        for &e in &[0.5, 1.1 * E1, 2.0 * E1, 3.0 * E1, 6.0 * E1] {
            let r = quantization_residual(e, 2.0, DEFAULT_TRUNC).unwrap();
            assert!(r > 1e3 * eigen.max(1e-9) && r > 0.01, "E = {e}: {r}");
        }
    }

    #[test]
    fn comb_limit_ratio() {
        let p = LatticeParams::default();
        assert_abs_diff_eq!(
            kp_isw_limit_check(1, &p, 1e-4).unwrap(),
            -1.0,
            epsilon = 1e-2
        );
        assert_abs_diff_eq!(
            kp_isw_limit_check(2, &p, 1e-5).unwrap(),
            -1.0,
            epsilon = 1e-3
        );
        assert!(kp_isw_limit_check(1, &p, 0.0).is_err());
        let steps = [1e-3, 1e-4, 1e-5];
        let vals: Vec<f64> = steps
            .iter()
            .map(|&d| kp_isw_limit_check(1, &p, d).unwrap())
            .collect();
        assert_abs_diff_eq!(
            richardson_limit(&steps, &vals).unwrap(),
            -1.0,
            epsilon = 1e-5
        );
    }

    #[test]
    fn comb_modes_approach_well_pattern() {
        let p = LatticeParams::default();
        for n in 1..=4 {
            let t = kp_mode_limit(n, 2, &p, 1e-7).unwrap();
            let want = if n == 2 { -0.5 } else { 0.0 };
            assert_abs_diff_eq!(t, want, epsilon = 1e-5);
        }
    }

    #[test]
    fn richardson_on_polynomial() {
        let steps = [0.1, 0.05, 0.025];
        let vals: Vec<f64> = steps.iter().map(|h| 3.0 + 2.0 * h - h * h).collect();
        assert_abs_diff_eq!(
            richardson_limit(&steps, &vals).unwrap(),
            3.0,
            epsilon = 1e-12
        );
    }
}
