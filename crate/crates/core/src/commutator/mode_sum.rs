//! Oscillator commutator as an explicit sum over Fock modes.
//!
//! For one mode `u_I(a) u_I*(b) - u_I*(a) u_I(b) = 2i N² Im(e^{-iωΔt} F(a) F*(b))`.
//! Periodic factors combine into a phase and standing waves into a real
//! amplitude, so each term is `2i N² e^{-ωε} A_I sin θ_I` with
//! `θ_I = -ωΔt + Σ_periodic k_l Δx_l` and `A_I = Π_standing f_l(a) f_l(b)`.
//! Swapping `a` and `b` negates every θ and leaves every `A` unchanged, which
//! makes the result exactly antisymmetric.

use num_complex::Complex64;

use crate::error::Result;
use crate::reduce::{sum_indexed, Summand};
use crate::spectrum::ModeTable;
use crate::types::{AxisKind, CheckedConfig, SpacetimeEvent, SummationPolicy};

/// Sum of the oscillator terms plus the contribution of the outermost shell
/// of the index lattice, a crude indicator of truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSum {
    pub value: Complex64,
    pub shell: f64,
    pub modes: usize,
}

#[derive(Clone, Copy, Default)]
struct Acc {
    total: f64,
    shell: f64,
}

impl std::ops::Add for Acc {
    type Output = Acc;
    fn add(self, o: Acc) -> Acc {
        Acc { total: self.total + o.total, shell: self.shell + o.shell }
    }
}

impl Summand for Acc {
    fn compensated<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        let (t, s): (Vec<f64>, Vec<f64>) = terms.into_iter().map(|a| (a.total, a.shell)).unzip();
        Acc { total: f64::compensated(t), shell: f64::compensated(s) }
    }
}

impl ModeTable {
    /// Imaginary part of the oscillator commutator between `a` and `b`.
    #[allow(clippy::needless_range_loop)]
    fn term(&self, i: usize, dt: f64, dx: &[f64; 3], a: &SpacetimeEvent, b: &SpacetimeEvent) -> f64 {
        let m = &self.modes[i];
        let mut theta = -m.omega * dt;
        let mut amp = self.weight[i];
        for l in 0..self.dim {
            match self.kinds[l] {
                AxisKind::Periodic => theta += m.k[l] * dx[l],
                AxisKind::Neumann => amp *= (m.k[l] * a.x[l]).cos() * (m.k[l] * b.x[l]).cos(),
                AxisKind::Dirichlet => amp *= (m.k[l] * a.x[l]).sin() * (m.k[l] * b.x[l]).sin(),
                AxisKind::Open => unreachable!("open axes are never tabulated"),
            }
        }
        amp * theta.sin()
    }

    fn on_shell(&self, i: usize) -> bool {
        let m = &self.modes[i];
        (0..self.dim).any(|l| m.index[l].unsigned_abs() == self.cutoff[l] as u64)
    }

    /// Oscillator commutator between two events already checked against the
    /// table's dimension.
    pub fn osc(&self, a: &SpacetimeEvent, b: &SpacetimeEvent, policy: SummationPolicy) -> ModeSum {
        let dt = a.t - b.t;
        let mut dx = [0.0; 3];
        for (d, (x, y)) in dx.iter_mut().zip(a.x.iter().zip(&b.x)) {
            *d = x - y;
        }
        let acc: Acc = sum_indexed(self.len(), policy, |i| {
            let t = self.term(i, dt, &dx, a, b);
            Acc { total: t, shell: if self.on_shell(i) { t } else { 0.0 } }
        });
        ModeSum { value: Complex64::new(0.0, acc.total), shell: acc.shell.abs(), modes: self.len() }
    }
}

/// `Σ_I (u_I(a) u_I*(b) - u_I*(a) u_I(b))` over every enumerated mode, each
/// term damped by `e^{-ωε}`.
pub fn osc_commutator_modesum(
    cfg: &CheckedConfig,
    a: &SpacetimeEvent,
    b: &SpacetimeEvent,
) -> Result<Complex64> {
    a.check(cfg.dim())?;
    b.check(cfg.dim())?;
    let table = ModeTable::new(cfg)?;
    Ok(table.osc(a, b, cfg.opts().summation).value)
}
