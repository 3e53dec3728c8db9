use causal_modes::commutator::{full_commutator, osc_commutator_modesum};
use causal_modes::estimator::{check_nonoverlap, estimator_e};
use causal_modes::{
    validate_config, AxisSpec, BoundaryConfig, CommutatorOptions, DetectorSpec, SpacetimeEvent,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mode_sum_is_exactly_antisymmetric(
        t in -5.0..5.0f64, x in 0.0..6.0f64, y in 0.0..4.0f64,
        tp in -5.0..5.0f64, xp in 0.0..6.0f64, yp in 0.0..4.0f64,
    ) {
        let bc = BoundaryConfig::new(vec![AxisSpec::periodic(6.0), AxisSpec::neumann(4.0)]);
        let cfg = validate_config(&bc, &CommutatorOptions::new(&bc, 12)).unwrap();
        let a = SpacetimeEvent::new(t, vec![x, y]);
        let b = SpacetimeEvent::new(tp, vec![xp, yp]);
        let ab = osc_commutator_modesum(&cfg, &a, &b).unwrap();
        let ba = osc_commutator_modesum(&cfg, &b, &a).unwrap();
        prop_assert_eq!(ab, -ba);
    }

    #[test]
    fn commutator_is_invariant_under_translation(
        t in -5.0..5.0f64, x in 0.0..10.0f64, shift in -30.0..30.0f64, dx in 0.0..10.0f64,
    ) {
        let bc = BoundaryConfig::torus(1, 10.0);
        let cfg = validate_config(&bc, &CommutatorOptions::new(&bc, 1)).unwrap();
        let c = |s: f64| full_commutator(
            &cfg,
            &SpacetimeEvent::new(t, vec![x + dx + s]),
            &SpacetimeEvent::new(0.0, vec![x + s]),
        ).unwrap().value;
        prop_assert!((c(0.0) - c(shift)).norm() < 1e-9);
    }

    #[test]
    fn spacelike_delta_estimator_is_dt_over_l(dt in 0.01..4.9f64, len in 10.0..80.0f64) {
        let bc = BoundaryConfig::torus(1, len);
        let opts = CommutatorOptions::new(&bc, 1).with_zero_mode(false);
        let cfg = validate_config(&bc, &opts).unwrap();
        let a = DetectorSpec::delta(0.0, vec![0.0]);
        let b = DetectorSpec::delta(dt, vec![5.0]);
        prop_assert!(check_nonoverlap(&bc, &a, &b));
        let e = estimator_e(&cfg, &a, &b).unwrap().value;
        prop_assert!((e - dt / len).abs() < 1e-5 * dt / len + 1e-9);
    }
}
