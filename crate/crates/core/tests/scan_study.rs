use comb_bootstrap::exact::{exact_band_edges, rho0_analytic};
use comb_bootstrap::scan::{convergence_study, min_allowed_energy, scan_points, MinEnergy};
use comb_bootstrap::{Error, LatticeParams, Rho0Source, ScanConfig};

fn comb() -> LatticeParams {
    LatticeParams::default()
}

#[test]
fn toeplitz_gaps_grow_with_k() {
    let rows = convergence_study(&ScanConfig::default(), &[2, 5, 10, 20, 50, 100], &[0]).unwrap();
    for g in 0..3 {
        let widths: Vec<f64> = rows.iter().map(|r| r.gaps[g].unwrap()).collect();
        assert!(
            widths.windows(2).all(|w| w[1] >= w[0]),
            "gap {}: {widths:?}",
            g + 1
        );
    }
}

#[test]
fn higher_powers_narrow_gaps_at_small_k() {
    let rows = convergence_study(&ScanConfig::default(), &[5], &[0, 2, 4]).unwrap();
    for g in 0..3 {
        let widths: Vec<f64> = rows.iter().map(|r| r.gaps[g].unwrap()).collect();
        assert!(
            widths.windows(2).all(|w| w[1] < w[0]),
            "gap {}: {widths:?}",
            g + 1
        );
    }
}

#[test]
fn powers_agree_at_large_k() {
    let rows = convergence_study(&ScanConfig::default(), &[100], &[0, 2, 4]).unwrap();
    for g in 0..3 {
        let base = rows[0].gaps[g].unwrap();
        let p2 = rows[1].gaps[g].unwrap();
        let p4 = rows[2].gaps[g].unwrap();
        assert!(
            (p2 - base).abs() / base <= 3e-3,
            "gap {}: {base} vs {p2}",
            g + 1
        );
        // The power-4 matrix carries the truncated Σ1 = 2K+1 and lags slightly.
        assert!(
            (p4 - base).abs() / base <= 1e-2,
            "gap {}: {base} vs {p4}",
            g + 1
        );
    }
}

#[test]
fn even_powers_bound_the_energy() {
    for power in [2, 4] {
        let cfg = ScanConfig::new(comb(), 5, power).with_range(-2.0, 1.0, 0.005);
        let e = min_allowed_energy(&cfg).unwrap();
        assert!(
            matches!(e, MinEnergy::Bounded(v) if v < 0.741),
            "power {power}: {e:?}"
        );
    }
}

#[test]
fn odd_powers_allow_nothing() {
    for power in [1, 3] {
        let cfg = ScanConfig::new(comb(), 5, power).with_range(-2.0, 30.0, 0.05);
        assert!(matches!(
            min_allowed_energy(&cfg),
            Err(Error::NoAllowedEnergy)
        ));
    }
}

#[test]
fn negative_rho0_survives_only_at_small_k() {
    // Allowed grid energies with ρ(0) <= 0, ρ(0) taken from the finite sum.
    let step = 0.01;
    let negative = |k| -> Vec<f64> {
        let cfg = ScanConfig {
            rho0_source: Rho0Source::FiniteK,
            ..ScanConfig::new(comb(), k, 0).with_range(0.0, 30.0, step)
        };
        scan_points(&cfg)
            .unwrap()
            .into_iter()
            .flatten()
            .filter(|p| p.allowed && p.rho0 <= 0.0)
            .map(|p| p.energy)
            .collect()
    };
    let p = comb();
    let near_top = |e: f64| (1..=3).any(|m| (0.0..=step * 1.01).contains(&(e - p.pole_energy(m))));

    let small = negative(5);
    assert!(
        small.iter().filter(|&&e| !near_top(e)).count() > 10,
        "{small:?}"
    );
    // At K = 100 only the grid point just past each band top, where ρ(0)
    // crosses zero, is left.
    let large = negative(100);
    assert!(large.iter().all(|&e| near_top(e)), "{large:?}");
}

#[test]
fn allowed_set_contains_exact_bands_for_power_two() {
    let p = comb();
    let bands = exact_band_edges(&p, 23.0).unwrap();
    for k in [5, 20] {
        let pts = scan_points(&ScanConfig::new(p, k, 2).with_range(0.0, 23.0, 0.01)).unwrap();
        for g in pts.iter().flatten() {
            if bands.iter().any(|b| b.contains(g.energy)) {
                assert!(g.allowed, "K = {k}: exact energy {} excluded", g.energy);
            }
        }
    }
}

#[test]
fn finite_k_source_converges_to_analytic() {
    let p = comb();
    for &e in &[0.5, 3.0, 6.0] {
        let a = rho0_analytic(e, &p).unwrap();
        let f = comb_bootstrap::moments::rho0_finite_k(e, &p, 20_000).unwrap();
        assert!(
            (a - f).abs() < 1e-3 * a.abs().max(1.0),
            "E = {e}: {a} vs {f}"
        );
    }
}
