use proptest::prelude::*;

use phasedetect_core::analytic::*;
use phasedetect_core::fock::{recommend_dim, FockSpace, PhotonStatistics, PureState};
use phasedetect_core::loss::LossChannel;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cat_amplitudes_are_even(alpha in 0.05f64..3.0) {
        let s = FockSpace::recommended(alpha, 0.0, 1e-12).unwrap();
        let cat = PureState::cat(s, alpha).unwrap();
        prop_assert!(cat.amplitudes().iter().skip(1).step_by(2).all(|a| a.re == 0.0 && a.im == 0.0));
        prop_assert!((cat.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn displaced_states_keep_unit_norm(alpha in 0.1f64..2.5, delta in -1.5f64..1.5) {
        let s = FockSpace::recommended(alpha, delta, 1e-12).unwrap();
        let psi = PureState::cat(s, alpha).unwrap().displaced(delta).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        prop_assert!((psi.photon_distribution().iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lossy_states_keep_unit_trace(alpha in 0.1f64..2.0, delta in 0.0f64..1.0, eta in 0.05f64..1.0) {
        let s = FockSpace::recommended(alpha, delta, 1e-12).unwrap();
        let psi = PureState::cat(s, alpha).unwrap().displaced(delta).unwrap();
        let rho = LossChannel::new(s, eta).unwrap().apply_pure(&psi).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-9);
        prop_assert!((rho.photon_distribution().iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn parity_is_bounded(alpha in 0.01f64..3.0, delta in 0.0f64..2.0, eta in 0.01f64..=1.0) {
        let p = cat_parity(alpha, delta, eta);
        prop_assert!(p.abs() <= 1.0 + 1e-15);
    }

    #[test]
    fn overlap_zeros_are_zeros(alpha in 0.2f64..5.0, k in 0u32..3) {
        prop_assert!(cat_overlap(alpha, cat_overlap_zero(alpha, k)).abs() < 1e-10);
    }

    #[test]
    fn false_positive_product_identity(alpha in 0.1f64..4.0, eta in 0.05f64..=1.0) {
        let direct = 0.5 * (1.0 - cat_parity_no_signal(alpha, eta));
        prop_assert!((direct - cat_false_positive_product(alpha, eta)).abs() < 1e-12);
    }

    #[test]
    fn fock1_false_positive_decreases_with_efficiency(e1 in 0.01f64..1.0, e2 in 0.01f64..1.0) {
        prop_assume!(e1 < e2);
        let r1 = fock1_error_rates(0.7, e1).unwrap();
        let r2 = fock1_error_rates(0.7, e2).unwrap();
        prop_assert!(r1.p_fp > r2.p_fp);
    }

    #[test]
    fn rates_are_probabilities(alpha in 0.1f64..4.0, delta in 0.0f64..2.0, eta in 0.01f64..=1.0) {
        let r = cat_error_rates(alpha, delta, eta).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.p_fp));
        prop_assert!((0.0..=1.0).contains(&r.p_fn));
        prop_assert!((0.0..=0.5).contains(&r.helstrom));
    }

    #[test]
    fn recommend_dim_is_monotone(a in 0.0f64..4.0, d in 0.0f64..2.0, extra in 0.0f64..1.0, exp in 3i32..15) {
        let tol = 10f64.powi(-exp);
        let base = recommend_dim(a, d, tol);
        prop_assert!(recommend_dim(a + extra, d, tol) >= base);
        prop_assert!(recommend_dim(a, d + extra, tol) >= base);
        prop_assert!(recommend_dim(a, d, tol * 2.0) <= base);
    }
}
