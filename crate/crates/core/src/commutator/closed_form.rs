//! Closed-form oscillator commutators on a periodic or Neumann line.
//!
//! With `u = t - x`, `v = t + x` the mode sums resum to logarithms:
//!
//! ```text
//! periodic: (1/4π) Σ_{d ∈ {Δu, Δv}}            [log(1 - e^{ 2πi(d-iε)/L}) - log(1 - e^{-2πi(d-iε)/L})]
//! neumann:  (1/4π) Σ_{d ∈ {u-v', Δv, Δu, v-u'}} [log(1 - e^{  πi(d-iε)/L}) - log(1 - e^{  -πi(d-iε)/L})]
//! ```
//!
//! The shift `d → d - iε` is applied holomorphically to both logarithms, so a
//! spacelike pair gives `iΔt/L + ε/L`: the real part is of order ε and the
//! antisymmetry of the exact commutator holds only up to O(ε).

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{AxisKind, SpacetimeEvent};

/// `log(1 - e^w)` on the principal branch, accurate when `e^w` is near 1.
pub(crate) fn log_one_minus_exp(w: Complex64) -> Complex64 {
    // 1 - e^w = -expm1(w); reduce the phase first so sin/cos stay exact
    let y = (w.im + PI).rem_euclid(TAU) - PI;
    let ex = w.re.exp();
    let half = (0.5 * y).sin();
    let re = -(w.re.exp_m1() * y.cos() - 2.0 * half * half);
    let im = -ex * y.sin();
    Complex64::new(re, im).ln()
}

fn log_pair(d: f64, scale: f64, epsilon: f64) -> Complex64 {
    let z = Complex64::new(d, -epsilon) * Complex64::new(0.0, scale);
    log_one_minus_exp(z) - log_one_minus_exp(-z)
}

/// Oscillator part of `⟨[φ(a), φ(b)]⟩` on a line of length `length` with
/// periodic or Neumann ends.
pub fn osc_commutator_closed_1d(
    kind: AxisKind,
    length: f64,
    a: &SpacetimeEvent,
    b: &SpacetimeEvent,
    epsilon: f64,
) -> Result<Complex64> {
    a.check(1)?;
    b.check(1)?;
    let (ua, va) = (a.t - a.x[0], a.t + a.x[0]);
    let (ub, vb) = (b.t - b.x[0], b.t + b.x[0]);
    let sum = match kind {
        AxisKind::Periodic => {
            let s = TAU / length;
            log_pair(ua - ub, s, epsilon) + log_pair(va - vb, s, epsilon)
        }
        AxisKind::Neumann => {
            let s = PI / length;
            log_pair(ua - vb, s, epsilon)
                + log_pair(va - vb, s, epsilon)
                + log_pair(ua - ub, s, epsilon)
                + log_pair(va - ub, s, epsilon)
        }
        _ => return Err(Error::Unsupported("a periodic or Neumann axis for the closed form")),
    };
    Ok(sum / (4.0 * PI))
}

/// Signed separation on a circle of circumference `length`, in `[-L/2, L/2]`.
pub fn wrapped(dx: f64, length: f64) -> f64 {
    dx - length * (dx / length).round()
}

/// The single-logarithm shortcut `(1/4π) Log(e^{4πi(Δt-iε)/L})` for a periodic
/// line. Equal to the four-log form only where [`simplified_is_valid`] holds.
pub fn osc_commutator_simplified(length: f64, dt: f64, epsilon: f64) -> Complex64 {
    let w = Complex64::new(0.0, 2.0 * TAU / length) * Complex64::new(dt, -epsilon);
    w.exp().ln() / (4.0 * PI)
}

/// Spacelike on the circle and `|Δt| < L/4`, so the exponent stays on the
/// principal branch.
pub fn simplified_is_valid(length: f64, dt: f64, dx: f64) -> bool {
    dt.abs() < wrapped(dx, length).abs() && dt.abs() < 0.25 * length
}

/// Which logarithm branch the periodic closed form sits on: twice the
/// imaginary offset from the spacelike value `iΔt/L`, rounded.
pub fn branch_index(osc: Complex64, dt: f64, length: f64) -> i64 {
    (2.0 * (osc.im - dt / length)).round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ev(t: f64, x: f64) -> SpacetimeEvent {
        SpacetimeEvent::new(t, vec![x])
    }

    #[test]
    fn spacelike_value_is_i_dt_over_l_plus_eps_over_l() {
        let eps = 1e-6;
        let c = osc_commutator_closed_1d(AxisKind::Periodic, 10.0, &ev(2.0, 5.0), &ev(0.0, 0.0), eps)
            .unwrap();
        assert_abs_diff_eq!(c.im, 0.2, epsilon = 1e-9);
        assert_abs_diff_eq!(c.re, eps / 10.0, epsilon = 1e-12);
    }

    #[test]
    fn equal_times_vanish() {
        for x in [0.3, 2.0, 5.0, 7.7] {
            for kind in [AxisKind::Periodic, AxisKind::Neumann] {
                let c = osc_commutator_closed_1d(kind, 10.0, &ev(1.0, x), &ev(1.0, 1.1), 1e-6).unwrap();
                assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn timelike_plateau_of_the_oscillator_part() {
        // with the zero mode the full commutator is -i on (5, 15)
        for dt in [6.0, 7.0, 9.5, 12.0, 14.0] {
            let c =
                osc_commutator_closed_1d(AxisKind::Periodic, 10.0, &ev(dt, 5.0), &ev(0.0, 0.0), 1e-6)
                    .unwrap();
            assert_abs_diff_eq!(c.im - dt / 10.0, -1.0, epsilon = 1e-6);
            assert_eq!(branch_index(c, dt, 10.0), -2);
        }
    }

    #[test]
    fn neumann_spacelike_interior_cancels_zero_mode() {
        let c =
            osc_commutator_closed_1d(AxisKind::Neumann, 10.0, &ev(1.0, 6.0), &ev(0.0, 3.0), 1e-7).unwrap();
        assert_abs_diff_eq!(c.im, 0.1, epsilon = 1e-6);
    }

    #[test]
    fn simplified_matches_in_its_domain_only() {
        let l = 10.0;
        let eps = 1e-6;
        for (dt, dx) in [(2.0, 5.0), (1.0, 3.0), (2.4, 2.5)] {
            assert!(simplified_is_valid(l, dt, dx));
            let full =
                osc_commutator_closed_1d(AxisKind::Periodic, l, &ev(dt, dx), &ev(0.0, 0.0), eps).unwrap();
            let simple = osc_commutator_simplified(l, dt, eps);
            assert_abs_diff_eq!((full - simple).norm(), 0.0, epsilon = 1e-9);
        }
        // spacelike but past L/4: the shortcut jumps branch
        assert!(!simplified_is_valid(l, 3.0, 5.0));
        let full = osc_commutator_closed_1d(AxisKind::Periodic, l, &ev(3.0, 5.0), &ev(0.0, 0.0), eps)
            .unwrap();
        assert!((full - osc_commutator_simplified(l, 3.0, eps)).norm() > 0.4);
    }

    #[test]
    fn log_one_minus_exp_near_unity() {
        let w = Complex64::new(-1e-9, 1e-9);
        let direct = (Complex64::new(1.0, 0.0) - w.exp()).ln();
        let robust = log_one_minus_exp(w);
        assert!((robust - direct).norm() < 1e-6);
        assert!((robust.re - (2e-18f64).sqrt().ln()).abs() < 1e-6);
    }

    #[test]
    fn rejects_dirichlet_and_wrong_dimension() {
        assert!(osc_commutator_closed_1d(AxisKind::Dirichlet, 1.0, &ev(0.0, 0.0), &ev(1.0, 0.0), 1e-6)
            .is_err());
        let two = SpacetimeEvent::new(0.0, vec![0.0, 0.0]);
        assert!(osc_commutator_closed_1d(AxisKind::Periodic, 1.0, &two, &two, 1e-6).is_err());
    }
}
