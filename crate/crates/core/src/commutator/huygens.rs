//! Commutator profile along `Δt` on the 3-torus.

use num_complex::Complex64;
use rayon::prelude::*;

use super::CommutatorEngine;
use crate::error::{Error, Result};
use crate::types::{AxisKind, CheckedConfig, SpacetimeEvent};

#[derive(Debug, Clone, PartialEq)]
pub struct HuygensProfile {
    pub dt: Vec<f64>,
    pub value: Vec<Complex64>,
    /// Null distances `|Δx + nL|` up to the largest `Δt`.
    pub null_times: Vec<f64>,
    /// Largest `|Im C|` at least two mode wavelengths (`2L/N`) away from every
    /// null distance: the size of the truncation ripple at this cutoff.
    pub gibbs_envelope: f64,
    pub modes_summed: usize,
}

/// Full commutator between `(0, 0)` and `(Δt, dx)` for each `Δt` in `dts`.
pub fn huygens_profile(cfg: &CheckedConfig, dx: &[f64], dts: &[f64]) -> Result<HuygensProfile> {
    let bc = cfg.bc();
    if bc.dim() != 3 || bc.axes.iter().any(|a| a.kind != AxisKind::Periodic) {
        return Err(Error::Unsupported("a 3-torus"));
    }
    let engine = CommutatorEngine::new(cfg.clone())?;
    let origin = SpacetimeEvent::new(0.0, vec![0.0; 3]);
    let results: Vec<_> = dts
        .par_iter()
        .map(|&dt| engine.eval(&SpacetimeEvent::new(dt, dx.to_vec()), &origin))
        .collect::<Result<_>>()?;

    let lengths: Vec<f64> = bc.axes.iter().map(|a| a.length.unwrap_or(1.0)).collect();
    let t_max = dts.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let null_times = image_distances(dx, &lengths, t_max);
    let guard = (0..3)
        .map(|l| 2.0 * lengths[l] / cfg.index_cutoff(l).max(1) as f64)
        .fold(0.0, f64::max);
    let gibbs_envelope = dts
        .iter()
        .zip(&results)
        .filter(|(t, _)| t.abs() > guard && null_times.iter().all(|r| (t.abs() - r).abs() > guard))
        .map(|(_, r)| r.value.im.abs())
        .fold(0.0, f64::max);
    Ok(HuygensProfile {
        dt: dts.to_vec(),
        value: results.iter().map(|r| r.value).collect(),
        null_times,
        gibbs_envelope,
        modes_summed: results.first().map_or(0, |r| r.diagnostics.modes_summed),
    })
}

/// Sorted distances from `dx` to every lattice image of the origin, up to `t_max`.
fn image_distances(dx: &[f64], lengths: &[f64], t_max: f64) -> Vec<f64> {
    let reach: Vec<i64> = lengths.iter().map(|l| (t_max / l).ceil() as i64 + 1).collect();
    let mut out = Vec::new();
    for i in -reach[0]..=reach[0] {
        for j in -reach[1]..=reach[1] {
            for k in -reach[2]..=reach[2] {
                let d = [dx[0] + i as f64 * lengths[0], dx[1] + j as f64 * lengths[1], dx[2] + k as f64 * lengths[2]];
                let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                if r <= t_max {
                    out.push(r);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{validate_config, BoundaryConfig, CommutatorOptions};

    #[test]
    fn zero_mode_shift_is_exact() {
        let bc = BoundaryConfig::torus(3, 1.0);
        let dts = [0.0, 0.2, 0.6, 0.8];
        let with = validate_config(&bc, &CommutatorOptions::new(&bc, 6)).unwrap();
        let without =
            validate_config(&bc, &CommutatorOptions::new(&bc, 6).with_zero_mode(false)).unwrap();
        let p = huygens_profile(&with, &[0.5, 0.0, 0.0], &dts).unwrap();
        let q = huygens_profile(&without, &[0.5, 0.0, 0.0], &dts).unwrap();
        for ((t, a), b) in dts.iter().zip(&p.value).zip(&q.value) {
            assert!((a.im - b.im + t).abs() < 1e-14);
        }
        assert_eq!(p.value[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn image_distances_on_unit_cube() {
        let d = image_distances(&[0.5, 0.0, 0.0], &[1.0; 3], 1.2);
        assert_eq!(d.len(), 2);
        assert!((d[0] - 0.5).abs() < 1e-15);
        assert!((d[1] - 1.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_other_geometries() {
        let bc = BoundaryConfig::torus(2, 1.0);
        let cfg = validate_config(&bc, &CommutatorOptions::new(&bc, 3)).unwrap();
        assert!(huygens_profile(&cfg, &[0.5, 0.0], &[0.1]).is_err());
    }
}
