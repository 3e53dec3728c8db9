//! `⟨[φ(a), φ(b)]⟩` split into oscillator and zero-mode parts.

mod closed_form;
mod cylinder;
mod huygens;
mod mode_sum;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::ModeTable;
use crate::types::{AxisKind, BoundaryConfig, CheckedConfig, SpacetimeEvent};

pub use closed_form::{
    branch_index, osc_commutator_closed_1d, osc_commutator_simplified, simplified_is_valid, wrapped,
};
pub use cylinder::{einstein_cylinder_commutator, CylinderResult};
pub use huygens::{huygens_profile, HuygensProfile};
pub use mode_sum::{osc_commutator_modesum, ModeSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    ModeSum,
    PrincipalValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parts {
    pub osc: Complex64,
    pub zero_mode: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Oscillator terms summed; 0 for the closed forms.
    pub modes_summed: usize,
    pub epsilon_used: f64,
    /// Logarithm branch of the periodic closed form.
    pub branch_index: Option<i64>,
    pub method: Method,
    pub sigma_factors: bool,
    /// Quadrature error, outermost-shell contribution of a mode sum, or the
    /// O(ε) real part of a closed form.
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorResult {
    pub value: Complex64,
    pub parts: Parts,
    pub diagnostics: Diagnostics,
}

/// `-iΔt / Π L_l`, the zero-mode contribution.
pub fn zero_mode_commutator(bc: &BoundaryConfig, dt: f64) -> Result<Complex64> {
    if !bc.has_zero_mode() {
        return Err(Error::NoZeroMode);
    }
    Ok(Complex64::new(0.0, -dt / bc.compact_volume()))
}

/// Evaluates many event pairs against one configuration, building the mode
/// table once.
#[derive(Debug, Clone)]
pub struct CommutatorEngine {
    cfg: CheckedConfig,
    table: Option<ModeTable>,
}

impl CommutatorEngine {
    pub fn new(cfg: CheckedConfig) -> Result<Self> {
        let table = match Self::route(&cfg) {
            Method::ModeSum => Some(ModeTable::new(&cfg)?),
            _ => None,
        };
        Ok(Self { cfg, table })
    }

    fn route(cfg: &CheckedConfig) -> Method {
        let bc = cfg.bc();
        if bc.open_axis().is_some() {
            Method::PrincipalValue
        } else if bc.dim() == 1 && bc.axes[0].kind.admits_constant() && !cfg.opts().sigma_factors {
            Method::ClosedForm
        } else {
            Method::ModeSum
        }
    }

    pub fn config(&self) -> &CheckedConfig {
        &self.cfg
    }

    pub fn method(&self) -> Method {
        Self::route(&self.cfg)
    }

    pub fn eval(&self, a: &SpacetimeEvent, b: &SpacetimeEvent) -> Result<CommutatorResult> {
        let n = self.cfg.dim();
        a.check(n)?;
        b.check(n)?;
        let bc = self.cfg.bc();
        let opts = self.cfg.opts();
        let dt = a.t - b.t;
        let mut diagnostics = Diagnostics {
            modes_summed: 0,
            epsilon_used: opts.epsilon,
            branch_index: None,
            method: self.method(),
            sigma_factors: opts.sigma_factors,
            error_estimate: 0.0,
        };
        let osc = match diagnostics.method {
            Method::ClosedForm => {
                let axis = bc.axes[0];
                let len = axis.length.unwrap_or(1.0);
                let v = osc_commutator_closed_1d(axis.kind, len, a, b, opts.epsilon)?;
                if axis.kind == AxisKind::Periodic {
                    diagnostics.branch_index = Some(branch_index(v, dt, len));
                }
                diagnostics.error_estimate = v.re.abs();
                v
            }
            Method::ModeSum => {
                let table = self.table.as_ref().expect("mode table built for mode-sum route");
                let s = table.osc(a, b, opts.summation);
                diagnostics.modes_summed = s.modes;
                diagnostics.error_estimate = s.shell;
                s.value
            }
            Method::PrincipalValue => {
                let r = einstein_cylinder_commutator(&self.cfg, a, b)?;
                diagnostics.modes_summed = r.modes;
                diagnostics.error_estimate = r.error_estimate;
                r.value
            }
        };
        let zero_mode = if opts.include_zero_mode && bc.has_zero_mode() {
            zero_mode_commutator(bc, dt)?
        } else {
            Complex64::new(0.0, 0.0)
        };
        Ok(CommutatorResult { value: osc + zero_mode, parts: Parts { osc, zero_mode }, diagnostics })
    }
}

/// Oscillator part from the closed form (periodic or Neumann line), the
/// principal-value integral (one open axis) or the mode sum (otherwise), plus
/// the zero mode when requested and admissible.
pub fn full_commutator(
    cfg: &CheckedConfig,
    a: &SpacetimeEvent,
    b: &SpacetimeEvent,
) -> Result<CommutatorResult> {
    CommutatorEngine::new(cfg.clone())?.eval(a, b)
}
