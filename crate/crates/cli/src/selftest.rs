//! Fast invariant checks run by `causal-modes selftest`.

use causal_modes::commutator::{
    full_commutator, osc_commutator_closed_1d, osc_commutator_modesum, zero_mode_commutator,
};
use causal_modes::dynamics::{signal_block, QubitState};
use causal_modes::estimator::{check_nonoverlap, EstimatorMethod};
use causal_modes::{
    validate_config, AxisKind, BoundaryConfig, CommutatorOptions, Complex64, DetectorSpec,
    SpacetimeEvent,
};

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> causal_modes::Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

fn ev(t: f64, x: &[f64]) -> SpacetimeEvent {
    SpacetimeEvent::new(t, x.to_vec())
}

pub fn run_all() -> Vec<Check> {
    vec![
        check("zero_mode_formula", || {
            let v = zero_mode_commutator(&BoundaryConfig::torus(1, 10.0), 1.0)?;
            Ok(((v - Complex64::new(0.0, -0.1)).norm() < 1e-15, format!("{v}")))
        }),
        check("closed_form_matches_mode_sum", || {
            let bc = BoundaryConfig::torus(1, 10.0);
            let cfg = validate_config(&bc, &CommutatorOptions::new(&bc, 4000).with_epsilon(1e-3))?;
            let (a, b) = (ev(3.0, &[2.0]), ev(0.0, &[0.0]));
            let c = osc_commutator_closed_1d(AxisKind::Periodic, 10.0, &a, &b, 1e-3)?;
            let m = osc_commutator_modesum(&cfg, &a, &b)?;
            let d = (c - m).norm();
            Ok((d < 5e-3, format!("|closed - sum| = {d:.2e}")))
        }),
        check("mode_sum_antisymmetry", || {
            let bc = BoundaryConfig::torus(2, 7.0);
            let cfg = validate_config(&bc, &CommutatorOptions::new(&bc, 20))?;
            let (a, b) = (ev(1.3, &[0.4, 2.2]), ev(-0.2, &[3.1, 5.0]));
            let s = osc_commutator_modesum(&cfg, &a, &b)? + osc_commutator_modesum(&cfg, &b, &a)?;
            Ok((s == Complex64::new(0.0, 0.0), format!("sum = {s}")))
        }),
        check("spacelike_cancellation", || {
            let bc = BoundaryConfig::torus(1, 10.0);
            let cfg = validate_config(&bc, &CommutatorOptions::new(&bc, 1))?;
            let v = full_commutator(&cfg, &ev(2.0, &[5.0]), &ev(0.0, &[0.0]))?.value;
            Ok((v.norm() < 1e-4, format!("|C| = {:.2e}", v.norm())))
        }),
        check("overlap_detection", || {
            let bc = BoundaryConfig::torus(1, 10.0);
            let a = DetectorSpec::top_hat(0.0, 1.0, vec![0.0], 1.0);
            let late = DetectorSpec::top_hat(2.0, 3.0, vec![3.0], 1.0);
            let early = DetectorSpec::top_hat(0.5, 3.0, vec![3.0], 1.0);
            let ok = check_nonoverlap(&bc, &a, &late) && !check_nonoverlap(&bc, &a, &early);
            Ok((ok, String::new()))
        }),
        check("thread_count_independence", || {
            let bc = BoundaryConfig::torus(2, 10.0);
            let cfg = validate_config(&bc, &CommutatorOptions::new(&bc, 60))?;
            let (a, b) = (ev(2.5, &[5.0, 1.0]), ev(0.0, &[0.0, 0.0]));
            let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
            let one = pool(1).install(|| osc_commutator_modesum(&cfg, &a, &b))?;
            let four = pool(4).install(|| osc_commutator_modesum(&cfg, &a, &b))?;
            Ok((one == four, format!("{one} vs {four}")))
        }),
        check("signal_block_traceless", || {
            let bc = BoundaryConfig::torus(1, 10.0);
            let cfg = validate_config(&bc, &CommutatorOptions::new(&bc, 50))?;
            let a = DetectorSpec::top_hat(0.0, 1.0, vec![0.0], 0.5).with_gap(2.0);
            let b = DetectorSpec::top_hat(2.0, 3.0, vec![1.0], 0.5).with_gap(1.0);
            let blk = signal_block(
                &cfg,
                &a,
                &QubitState::plus(0.3),
                &b,
                &QubitState::plus(1.1),
                EstimatorMethod::Auto,
            )?;
            Ok((blk.trace() == Complex64::new(0.0, 0.0), format!("defect {:.1e}", blk.hermiticity_defect)))
        }),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        for c in super::run_all() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
