//! Klein–Gordon eigenmodes of the compact axes of a [`BoundaryConfig`].
//!
//! Per axis of length `L`:
//!
//! | kind      | index set        | wave number | spatial factor | `∫|f|²`          |
//! |-----------|------------------|-------------|----------------|------------------|
//! | Periodic  | `-N..=N`         | `2π i / L`  | `e^{ikx}`      | `L`              |
//! | Neumann   | `0..=N`          | `π i / L`   | `cos(kx)`      | `L/2` (`L` at 0) |
//! | Dirichlet | `1..=N`          | `π i / L`   | `sin(kx)`      | `L/2`            |
//!
//! A mode is `u_I = N_I e^{-iωt} Π f_l(x_l)` with `ω = |k|` and
//! `N_I = 1/√(2ω Π ∫|f_l|²)`, which makes the Klein–Gordon inner product
//! `(u_I, u_J) = δ_IJ`. The zero mode (`ω = 0`) is never a [`Mode`].
//!
//! Modes are ordered lexicographically on the multi-index, axis 0 slowest and
//! negative indices first; every mode sum in the crate relies on this order.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{AxisKind, BoundaryConfig, CheckedConfig, SpacetimeEvent, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub index: [i64; MAX_DIM],
    pub k: [f64; MAX_DIM],
    pub omega: f64,
    pub norm: f64,
}

fn index_range(kind: AxisKind, cutoff: u32) -> std::ops::RangeInclusive<i64> {
    let n = cutoff as i64;
    match kind {
        AxisKind::Periodic => -n..=n,
        AxisKind::Neumann => 0..=n,
        AxisKind::Dirichlet => 1..=n,
        AxisKind::Open => unreachable!("open axes are never enumerated"),
    }
}

/// Wave number of index `i` on an axis of the given kind and length.
pub fn wave_number(kind: AxisKind, length: f64, i: i64) -> f64 {
    match kind {
        AxisKind::Periodic => 2.0 * PI * i as f64 / length,
        AxisKind::Neumann | AxisKind::Dirichlet => PI * i as f64 / length,
        AxisKind::Open => f64::NAN,
    }
}

/// `∫|f|²` over one period/cell of the axis.
fn axis_mass(kind: AxisKind, length: f64, i: i64) -> f64 {
    match kind {
        AxisKind::Periodic => length,
        AxisKind::Neumann if i == 0 => length,
        AxisKind::Neumann | AxisKind::Dirichlet => 0.5 * length,
        AxisKind::Open => 2.0 * PI,
    }
}

/// Spatial factor of one axis at coordinate `x`.
pub fn axis_factor(kind: AxisKind, k: f64, x: f64) -> Complex64 {
    match kind {
        AxisKind::Periodic | AxisKind::Open => Complex64::from_polar(1.0, k * x),
        AxisKind::Neumann => Complex64::new((k * x).cos(), 0.0),
        AxisKind::Dirichlet => Complex64::new((k * x).sin(), 0.0),
    }
}

/// All oscillator modes of the compact axes within the cutoffs, in canonical
/// order. Fails on configurations with an open axis.
pub fn enumerate_modes(cfg: &CheckedConfig) -> Result<Vec<Mode>> {
    if cfg.bc().open_axis().is_some() {
        return Err(Error::OpenAxisNotEnumerable);
    }
    enumerate_compact(cfg, &(0..cfg.dim()).collect::<Vec<_>>(), false)
}

/// Lattice of the listed compact axes. With `keep_origin` the all-zero index
/// is kept even when it is constant (used when an open axis supplies the
/// frequency); zero-frequency entries then carry `omega == 0` and `norm == 0`.
pub(crate) fn enumerate_compact(
    cfg: &CheckedConfig,
    axes: &[usize],
    keep_origin: bool,
) -> Result<Vec<Mode>> {
    let bc = cfg.bc();
    let mut modes = Vec::new();
    let ranges: Vec<Vec<i64>> =
        axes.iter().map(|&a| index_range(bc.axes[a].kind, cfg.index_cutoff(a)).collect()).collect();
    if ranges.iter().any(|r| r.is_empty()) {
        return Ok(modes);
    }
    let total: usize = ranges.iter().map(|r| r.len()).product();
    modes.reserve(total);
    let mut cursor = vec![0usize; axes.len()];
    for _ in 0..total {
        let mut index = [0i64; MAX_DIM];
        let mut k = [0.0; MAX_DIM];
        for (slot, (&a, r)) in axes.iter().zip(&ranges).enumerate() {
            let i = r[cursor[slot]];
            index[a] = i;
            k[a] = wave_number(bc.axes[a].kind, bc.axes[a].length.unwrap_or(1.0), i);
        }
        let omega = k.iter().map(|v| v * v).sum::<f64>().sqrt();
        if omega > 0.0 {
            let mut m = Mode { index, k, omega, norm: 0.0 };
            m.norm = mode_norm(bc, &m)?;
            modes.push(m);
        } else if keep_origin {
            modes.push(Mode { index, k, omega, norm: 0.0 });
        }
        // odometer, last axis fastest
        for slot in (0..axes.len()).rev() {
            cursor[slot] += 1;
            if cursor[slot] < ranges[slot].len() {
                break;
            }
            cursor[slot] = 0;
        }
    }
    Ok(modes)
}

/// Klein–Gordon normalization `N_I = 1/√(2ω Π ∫|f_l|²)` of a discrete mode.
pub fn mode_norm(bc: &BoundaryConfig, mode: &Mode) -> Result<f64> {
    if mode.omega.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::ZeroFrequency);
    }
    let mass: f64 = bc
        .axes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.kind != AxisKind::Open)
        .map(|(l, a)| axis_mass(a.kind, a.length.unwrap_or(1.0), mode.index[l]))
        .product();
    Ok(1.0 / (2.0 * mode.omega * mass).sqrt())
}

/// `u_I(t, x) = N_I e^{-iωt} Π f_l(x_l)`.
pub fn eval_mode(bc: &BoundaryConfig, mode: &Mode, ev: &SpacetimeEvent) -> Result<Complex64> {
    ev.check(bc.dim())?;
    let spatial = bc
        .axes
        .iter()
        .enumerate()
        .map(|(l, a)| axis_factor(a.kind, mode.k[l], ev.x[l]))
        .fold(Complex64::new(1.0, 0.0), |acc, f| acc * f);
    Ok(Complex64::from_polar(mode.norm, -mode.omega * ev.t) * spatial)
}

/// Lanczos sigma factor `sinc(π i / (N + 1))` of one axis index.
pub fn lanczos_sigma(i: i64, cutoff: u32) -> f64 {
    let x = PI * i as f64 / (cutoff as f64 + 1.0);
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Modes with their per-mode commutator weight `2 N² e^{-ωε} σ_I` cached, for
/// evaluating many event pairs against one configuration.
#[derive(Debug, Clone)]
pub struct ModeTable {
    pub(crate) modes: Vec<Mode>,
    pub(crate) weight: Vec<f64>,
    pub(crate) kinds: [AxisKind; MAX_DIM],
    pub(crate) cutoff: [u32; MAX_DIM],
    pub(crate) dim: usize,
}

impl ModeTable {
    pub fn new(cfg: &CheckedConfig) -> Result<Self> {
        let modes = enumerate_modes(cfg)?;
        let opts = cfg.opts();
        let weight = modes
            .iter()
            .map(|m| {
                let sigma = if opts.sigma_factors {
                    (0..cfg.dim()).map(|l| lanczos_sigma(m.index[l], cfg.index_cutoff(l))).product()
                } else {
                    1.0
                };
                2.0 * m.norm * m.norm * (-m.omega * opts.epsilon).exp() * sigma
            })
            .collect();
        let mut kinds = [AxisKind::Periodic; MAX_DIM];
        let mut cutoff = [0; MAX_DIM];
        for (l, a) in cfg.bc().axes.iter().enumerate() {
            kinds[l] = a.kind;
            cutoff[l] = cfg.index_cutoff(l);
        }
        Ok(Self { modes, weight, kinds, cutoff, dim: cfg.dim() })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }
}
