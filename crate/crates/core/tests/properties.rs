use comb_bootstrap::dispersion::cos_ka_series;
use comb_bootstrap::exact::kp_dispersion_rhs;
use comb_bootstrap::isw::{isw_moment, isw_moment_closed};
use comb_bootstrap::moments::{t_moment, MomentTable};
use comb_bootstrap::psd::{build_matrix, is_psd_dense, DEFAULT_TOL};
use comb_bootstrap::{LatticeParams, Regularization, Rho0Source};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn off_pole(p: &LatticeParams, e: f64, k: usize) -> bool {
    (0..=k as i64 + 1).all(|m| (e - p.pole_energy(m)).abs() > 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrices_are_symmetric(power in 0u32..=4, k in 1usize..40, e in -2.0f64..30.0,
                              a in 0.5f64..4.0, strength in 0.1f64..6.0) {
        let p = LatticeParams::new(a, strength).unwrap();
        prop_assume!(off_pole(&p, e, k));
        if let Ok(m) = build_matrix(power, k, e, &p, Regularization::FiniteK, Rho0Source::FiniteK) {
            prop_assert!(m.symmetry_residual() < 1e-12);
        }
    }

    #[test]
    fn psd_verdict_ignores_scale(entries in prop::collection::vec(-1.0f64..1.0, 16),
                                 shift in -0.5f64..2.0, log_c in -10.0f64..10.0) {
        let b = DMatrix::from_vec(4, 4, entries);
        let m = &b * b.transpose() + DMatrix::identity(4, 4) * shift;
        let c = 10f64.powf(log_c);
        prop_assert_eq!(
            is_psd_dense(&m, DEFAULT_TOL).unwrap().psd,
            is_psd_dense(&(&m * c), DEFAULT_TOL).unwrap().psd
        );
    }

    #[test]
    fn gram_matrices_pass(entries in prop::collection::vec(-3.0f64..3.0, 30)) {
        let b = DMatrix::from_vec(5, 6, entries);
        prop_assert!(is_psd_dense(&(&b * b.transpose()), DEFAULT_TOL).unwrap().psd);
    }

    #[test]
    fn series_matches_relation(e in 0.05f64..30.0, a in 0.5f64..3.0, strength in 0.1f64..5.0) {
        let p = LatticeParams::new(a, strength).unwrap();
        prop_assert!((cos_ka_series(e, &p, 80) - kp_dispersion_rhs(e, &p)).abs() < 1e-9);
    }

    #[test]
    fn well_closed_form_is_the_recursion(n in 0usize..=20, e in 0.5f64..40.0, a in 0.5f64..3.0) {
        let r = isw_moment(n, e, a).unwrap();
        let c = isw_moment_closed(n, e, a).unwrap();
        prop_assert!((r - c).abs() <= 1e-9 * r.abs().max(a.powi(n as i32)));
    }

    #[test]
    fn modes_symmetric_in_n(n in 1i64..50, e in -2.0f64..30.0) {
        let p = LatticeParams::default();
        prop_assume!(off_pole(&p, e, 50));
        let t = MomentTable::new(e, p, 50, Regularization::FiniteK, Rho0Source::Analytic);
        prop_assume!(t.is_ok());
        let t = t.unwrap();
        prop_assert_eq!(t.t(n).unwrap(), t.t(-n).unwrap());
        prop_assert_eq!(t.t(n).unwrap(), t_moment(-n, e, &p, t.rho0()).unwrap());
    }
}
