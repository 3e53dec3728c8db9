//! Commutator with one open axis: a sum over the compact lattice of a
//! principal-value integral over the continuous label `l` of the open axis.
//!
//! Open-axis modes `e^{ily}/√(2π)` give `N² = 1/(4π V ω)` with `V` the compact
//! cell volume. Pairing `±l` turns `e^{±ilΔy}` into `2 cos(lΔy)`, so the
//! integrand on `[pv, Λ]` is real and smooth:
//!
//! ```text
//! C = i ∫_{pv}^{Λ} dl cos(lΔy) Σ_J A_J e^{-ωε} sin(ψ_J - ωΔt) / (π V_J ω),   ω = √(|k_J|² + l²)
//! ```
//!
//! At `l → 0` the `J = 0` term tends to `-Δt/(π V)`, so the window excluded by
//! `pv` contributes only O(pv).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::Adaptive;
use crate::spectrum::enumerate_compact;
use crate::types::{AxisKind, CheckedConfig, SpacetimeEvent};

const RULE_POINTS: usize = 16;
const TOLERANCE: f64 = 1e-10;
const MAX_DEPTH: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderResult {
    pub value: Complex64,
    pub error_estimate: f64,
    /// Compact-lattice terms carried through the integral.
    pub modes: usize,
    pub evaluations: usize,
}

struct Term {
    kappa2: f64,
    coeff: f64,
    psi: f64,
}

/// Panel edges on `[pv, Λ]`: doubling from `pv` up to 1, then uniform panels
/// short enough to hold about a quarter oscillation.
fn panel_edges(pv: f64, lambda: f64, freq: f64) -> Vec<f64> {
    let mut edges = vec![pv];
    let mut x = pv;
    while 2.0 * x < lambda.min(1.0) {
        x *= 2.0;
        edges.push(x);
    }
    let h = (0.5 * PI / freq.max(1.0)).min(1.0);
    let n = ((lambda - x) / h).ceil().max(1.0) as usize;
    let step = (lambda - x) / n as f64;
    for p in 1..n {
        edges.push(x + p as f64 * step);
    }
    edges.push(lambda);
    edges
}

pub fn einstein_cylinder_commutator(
    cfg: &CheckedConfig,
    a: &SpacetimeEvent,
    b: &SpacetimeEvent,
) -> Result<CylinderResult> {
    let bc = cfg.bc();
    let open = bc.open_axis().ok_or(Error::Unsupported("an open axis"))?;
    if bc.dim() < 2 {
        return Err(Error::Unsupported("at least one compact axis beside the open one"));
    }
    a.check(bc.dim())?;
    b.check(bc.dim())?;
    let opts = cfg.opts();
    let lambda = cfg.momentum_cutoff().ok_or(Error::Unsupported("a momentum cutoff"))?;
    let compact: Vec<usize> = (0..bc.dim()).filter(|&l| l != open).collect();
    let lattice = enumerate_compact(cfg, &compact, true)?;

    let terms: Vec<Term> = lattice
        .iter()
        .filter_map(|m| {
            let mut amp = 1.0;
            let mut psi = 0.0;
            let mut volume = 1.0;
            for &l in &compact {
                let len = bc.axes[l].length.unwrap_or(1.0);
                let (xa, xb) = (a.x[l], b.x[l]);
                match bc.axes[l].kind {
                    AxisKind::Periodic => {
                        psi += m.k[l] * (xa - xb);
                        volume *= len;
                    }
                    AxisKind::Neumann => {
                        amp *= (m.k[l] * xa).cos() * (m.k[l] * xb).cos();
                        volume *= if m.index[l] == 0 { len } else { 0.5 * len };
                    }
                    AxisKind::Dirichlet => {
                        amp *= (m.k[l] * xa).sin() * (m.k[l] * xb).sin();
                        volume *= 0.5 * len;
                    }
                    AxisKind::Open => unreachable!(),
                }
            }
            (amp != 0.0).then(|| Term { kappa2: m.omega * m.omega, coeff: amp / (PI * volume), psi })
        })
        .collect();

    let dt = a.t - b.t;
    let dy = a.x[open] - b.x[open];
    let eps = opts.epsilon;
    let integrand = |l: f64| {
        let s: f64 = terms
            .iter()
            .map(|j| {
                let w = (j.kappa2 + l * l).sqrt();
                j.coeff * (-w * eps).exp() * (j.psi - w * dt).sin() / w
            })
            .sum();
        (l * dy).cos() * s
    };

    let edges = panel_edges(opts.pv_epsilon, lambda, dt.abs() + dy.abs());
    let quad = Adaptive::new(RULE_POINTS, TOLERANCE, MAX_DEPTH);
    let res = quad.integrate_over(&edges, &integrand)?;
    Ok(CylinderResult {
        value: Complex64::new(0.0, res.value),
        error_estimate: res.error_estimate,
        modes: terms.len(),
        evaluations: res.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{validate_config, BoundaryConfig, CommutatorOptions};

    fn cfg(n: u32, pv: f64) -> CheckedConfig {
        let bc = BoundaryConfig::einstein_cylinder(10.0);
        let opts = CommutatorOptions::new(&bc, n).with_pv_epsilon(pv);
        validate_config(&bc, &opts).unwrap()
    }

    #[test]
    fn equal_times_vanish() {
        let a = SpacetimeEvent::new(1.0, vec![5.0, 0.0]);
        let b = SpacetimeEvent::new(1.0, vec![0.0, 0.0]);
        let r = einstein_cylinder_commutator(&cfg(10, 1e-3), &a, &b).unwrap();
        assert!(r.value.norm() < 1e-12);
    }

    #[test]
    fn antisymmetric() {
        let a = SpacetimeEvent::new(2.0, vec![5.0, 0.5]);
        let b = SpacetimeEvent::new(0.0, vec![0.0, 0.0]);
        let c = cfg(10, 1e-3);
        let ab = einstein_cylinder_commutator(&c, &a, &b).unwrap().value;
        let ba = einstein_cylinder_commutator(&c, &b, &a).unwrap().value;
        assert!((ab + ba).norm() < 1e-12);
    }

    #[test]
    fn panels_cover_range() {
        let e = panel_edges(1e-3, 50.0, 7.0);
        assert_eq!(e[0], 1e-3);
        assert_eq!(*e.last().unwrap(), 50.0);
        assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn requires_open_axis() {
        let bc = BoundaryConfig::torus(2, 1.0);
        let c = validate_config(&bc, &CommutatorOptions::new(&bc, 3)).unwrap();
        let a = SpacetimeEvent::new(0.0, vec![0.0, 0.0]);
        assert!(einstein_cylinder_commutator(&c, &a, &a).is_err());
    }
}
