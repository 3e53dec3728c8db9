//! Scenario files: boundary conditions, options, a detector pair, one sweep
//! and a list of output columns.
//!
//! ```toml
//! name = "line"
//! axes = [{ kind = "periodic", length = 10.0 }]
//!
//! [options]
//! cutoff = 100                 # index cutoff, one integer or one per compact axis
//! include_zero_mode = true
//!
//! [detectors.a]
//! center = [0.0]
//! t_on = 0.0
//! t_off = 0.0
//!
//! [detectors.b]
//! center = [5.0]
//! t_on = 1.0
//! t_off = 1.0
//!
//! [sweep]
//! variable = "dt"
//! grid = { start = 0.05, stop = 10.0, count = 200 }
//!
//! [[outputs]]
//! column = "E"
//! quantity = "estimator"
//! overrides = { include_zero_mode = false }
//! ```

use std::path::Path;

use causal_modes::{
    validate_config, AxisCutoff, AxisKind, AxisSpec, BoundaryConfig, CheckedConfig,
    CommutatorOptions, Complex64, DetectorSpec, SummationPolicy,
};
use causal_modes::dynamics::QubitState;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_CUTOFF: u32 = 100;
pub const DEFAULT_EPSILON_RELATIVE: f64 = 1e-6;
pub const DEFAULT_PV_EPSILON: f64 = 1e-3;
pub const DEFAULT_MOMENTUM_CUTOFF: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub axes: Vec<AxisSpec>,
    #[serde(default)]
    pub options: OptionsSpec,
    pub detectors: Detectors,
    pub sweep: Sweep,
    pub outputs: Vec<OutputSpec>,
}

/// Numerical options; every field may be left out.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    /// Absolute iε regulator; when absent `epsilon_relative` times the largest length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_relative: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<CutoffList>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum_cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub include_zero_mode: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pv_epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summation: Option<SummationPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_factors: Option<bool>,
}

/// Index cutoffs as written: a single integer or one per compact axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CutoffList {
    Uniform(u32),
    PerAxis(Vec<u32>),
}

impl OptionsSpec {
    /// `self` with every field of `other` that is set taking precedence.
    pub fn merged(&self, other: &OptionsSpec) -> OptionsSpec {
        OptionsSpec {
            epsilon: other.epsilon.or(self.epsilon),
            epsilon_relative: other.epsilon_relative.or(self.epsilon_relative),
            cutoff: other.cutoff.clone().or_else(|| self.cutoff.clone()),
            momentum_cutoff: other.momentum_cutoff.or(self.momentum_cutoff),
            include_zero_mode: other.include_zero_mode.or(self.include_zero_mode),
            pv_epsilon: other.pv_epsilon.or(self.pv_epsilon),
            summation: other.summation.or(self.summation),
            sigma_factors: other.sigma_factors.or(self.sigma_factors),
        }
    }

    /// Fills every unset field with its default. `epsilon` stays unset so a
    /// length sweep keeps scaling it.
    pub fn resolved(&self, axes: &[AxisSpec]) -> OptionsSpec {
        let compact = axes.iter().filter(|a| a.kind != AxisKind::Open).count();
        let cutoff = match &self.cutoff {
            Some(CutoffList::Uniform(n)) => vec![*n; compact],
            Some(CutoffList::PerAxis(v)) => v.clone(),
            None => vec![DEFAULT_CUTOFF; compact],
        };
        let has_open = axes.iter().any(|a| a.kind == AxisKind::Open);
        OptionsSpec {
            epsilon: self.epsilon,
            epsilon_relative: if self.epsilon.is_some() {
                self.epsilon_relative
            } else {
                Some(self.epsilon_relative.unwrap_or(DEFAULT_EPSILON_RELATIVE))
            },
            cutoff: Some(CutoffList::PerAxis(cutoff)),
            momentum_cutoff: if has_open {
                Some(self.momentum_cutoff.unwrap_or(DEFAULT_MOMENTUM_CUTOFF))
            } else {
                self.momentum_cutoff
            },
            include_zero_mode: Some(self.include_zero_mode.unwrap_or(true)),
            pv_epsilon: Some(self.pv_epsilon.unwrap_or(DEFAULT_PV_EPSILON)),
            summation: Some(self.summation.unwrap_or_default()),
            sigma_factors: Some(self.sigma_factors.unwrap_or(false)),
        }
    }

    /// Library options for `bc`; `self` must be resolved.
    pub fn to_options(&self, bc: &BoundaryConfig) -> Result<CommutatorOptions, CliError> {
        let reference = bc.reference_length();
        let mut opts = CommutatorOptions::new(bc, 1)
            .with_zero_mode(self.include_zero_mode.unwrap_or(true))
            .with_pv_epsilon(self.pv_epsilon.unwrap_or(DEFAULT_PV_EPSILON))
            .with_summation(self.summation.unwrap_or_default())
            .with_sigma_factors(self.sigma_factors.unwrap_or(false));
        opts.epsilon = self
            .epsilon
            .unwrap_or(self.epsilon_relative.unwrap_or(DEFAULT_EPSILON_RELATIVE) * reference);
        let compact: Vec<usize> =
            (0..bc.dim()).filter(|&l| bc.axes[l].kind != AxisKind::Open).collect();
        let list = match &self.cutoff {
            Some(CutoffList::Uniform(n)) => vec![*n; compact.len()],
            Some(CutoffList::PerAxis(v)) => v.clone(),
            None => vec![DEFAULT_CUTOFF; compact.len()],
        };
        if list.len() != compact.len() {
            return Err(CliError::Validation(format!(
                "options.cutoff: expected {} entries (one per compact axis), found {}",
                compact.len(),
                list.len()
            )));
        }
        for (slot, &l) in compact.iter().enumerate() {
            opts.cutoffs[l] = AxisCutoff::Index(list[slot]);
        }
        if let Some(lambda) = self.momentum_cutoff {
            opts = opts.with_momentum_cutoff(lambda);
        }
        Ok(opts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detectors {
    pub a: DetectorEntry,
    pub b: DetectorEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorEntry {
    pub center: Vec<f64>,
    #[serde(default)]
    pub sigma: f64,
    pub t_on: f64,
    pub t_off: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default = "one")]
    pub coupling: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateEntry>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub alpha: f64,
    /// `[re, im]`.
    #[serde(default)]
    pub beta: [f64; 2],
}

impl StateEntry {
    pub fn to_state(self) -> causal_modes::Result<QubitState> {
        QubitState::new(self.alpha, Complex64::new(self.beta[0], self.beta[1]))
    }
}

impl DetectorEntry {
    pub fn spec(&self) -> DetectorSpec {
        DetectorSpec {
            center: self.center.clone(),
            sigma: self.sigma,
            t_on: self.t_on,
            t_off: self.t_off,
            omega: self.omega,
            coupling: self.coupling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVar {
    #[serde(rename = "dt")]
    Dt,
    #[serde(rename = "L")]
    L,
    #[serde(rename = "D")]
    D,
    #[serde(rename = "delta_ratio")]
    DeltaRatio,
    #[serde(rename = "pv_epsilon")]
    PvEpsilon,
    #[serde(rename = "cutoff")]
    Cutoff,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Dt => "dt",
            SweepVar::L => "L",
            SweepVar::D => "D",
            SweepVar::DeltaRatio => "delta_ratio",
            SweepVar::PvEpsilon => "pv_epsilon",
            SweepVar::Cutoff => "cutoff",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => {
                    // numpy.linspace: start + k·step, last point exactly `stop`
                    let step = (stop - start) / (n - 1) as f64;
                    let mut v: Vec<f64> = (0..*n).map(|k| start + k as f64 * step).collect();
                    v[n - 1] = *stop;
                    v
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVar,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `⟨[φ(B), φ(A)]⟩` at the detector centres and switching mid-times.
    Commutator,
    CommutatorOsc,
    CommutatorZeroMode,
    /// Smeared commutator at the switching mid-times, B first.
    SmearedCommutator,
    /// `𝓔`; re/im carry the switched kernel `K(0, 0)`.
    Estimator,
    SignalBlockNorm,
    /// `iΔt / V`, the oscillator value a spacelike pair sees without the zero mode.
    ZeroModeReference,
}

/// Per-output changes to options and geometry, applied before the sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_relative: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<CutoffList>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum_cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub include_zero_mode: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pv_epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summation: Option<SummationPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_factors: Option<bool>,
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_ratio: Option<f64>,
    #[serde(default, rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

impl Overrides {
    pub fn options(&self) -> OptionsSpec {
        OptionsSpec {
            epsilon: self.epsilon,
            epsilon_relative: self.epsilon_relative,
            cutoff: self.cutoff.clone(),
            momentum_cutoff: self.momentum_cutoff,
            include_zero_mode: self.include_zero_mode,
            pv_epsilon: self.pv_epsilon,
            summation: self.summation,
            sigma_factors: self.sigma_factors,
        }
    }

    /// Geometry overrides in application order.
    pub fn geometry(&self) -> Vec<(SweepVar, f64)> {
        [
            (SweepVar::L, self.length),
            (SweepVar::DeltaRatio, self.delta_ratio),
            (SweepVar::D, self.d),
            (SweepVar::Dt, self.dt),
        ]
        .into_iter()
        .filter_map(|(v, x)| x.map(|x| (v, x)))
        .collect()
    }

    pub fn clear_options(&mut self, flags: &OptionsSpec) {
        if flags.epsilon.is_some() {
            self.epsilon = None;
            self.epsilon_relative = None;
        }
        if flags.cutoff.is_some() {
            self.cutoff = None;
        }
        if flags.include_zero_mode.is_some() {
            self.include_zero_mode = None;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub column: String,
    pub quantity: Quantity,
    #[serde(default, skip_serializing_if = "is_default")]
    pub overrides: Overrides,
}

fn is_default(o: &Overrides) -> bool {
    *o == Overrides::default()
}

/// Everything needed to evaluate one quantity at one grid point.
#[derive(Debug, Clone)]
pub struct Point {
    pub bc: BoundaryConfig,
    pub options: OptionsSpec,
    pub a: DetectorSpec,
    pub b: DetectorSpec,
}

impl Point {
    pub fn checked(&self) -> Result<CheckedConfig, CliError> {
        let opts = self.options.to_options(&self.bc)?;
        validate_config(&self.bc, &opts).map_err(|e| CliError::Validation(e.to_string()))
    }

    /// Sets one sweep variable.
    pub fn apply(&mut self, var: SweepVar, value: f64) -> Result<(), CliError> {
        match var {
            SweepVar::Dt => {
                let w = self.b.duration();
                let mid = self.a.mid_time() + value;
                self.b.t_on = mid - 0.5 * w;
                self.b.t_off = mid + 0.5 * w;
            }
            SweepVar::L => {
                self.bc = self.bc.clone().with_uniform_length(value);
            }
            SweepVar::D => {
                self.b.center[0] = self.a.center[0] + 0.5 * self.a.sigma + value + 0.5 * self.b.sigma;
            }
            SweepVar::DeltaRatio => {
                // keep the switching gap Δ and the surface distance D
                let gap = self.b.t_on - self.a.t_off;
                let d = self.b.center[0] - self.a.center[0] - 0.5 * (self.a.sigma + self.b.sigma);
                let w = value * gap;
                self.a.t_off = self.a.t_on + w;
                self.b.t_on = self.a.t_off + gap;
                self.b.t_off = self.b.t_on + w;
                self.a.sigma = w;
                self.b.sigma = w;
                self.b.center[0] = self.a.center[0] + w + d;
            }
            SweepVar::PvEpsilon => self.options.pv_epsilon = Some(value),
            SweepVar::Cutoff => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(CliError::Validation(format!(
                        "sweep.grid: cutoff values must be positive integers, got {value}"
                    )));
                }
                self.options.cutoff = Some(CutoffList::Uniform(value as u32));
            }
        }
        Ok(())
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
        }
    }

    /// Command-line flags override the file and any per-output setting.
    pub fn with_flags(mut self, flags: &OptionsSpec) -> Self {
        self.options = self.options.merged(flags);
        if flags.epsilon.is_some() {
            self.options.epsilon_relative = None;
        }
        for o in &mut self.outputs {
            o.overrides.clear_options(flags);
        }
        self
    }

    /// All defaults written out and the grid expanded, after validation.
    pub fn resolved(&self) -> Result<Self, CliError> {
        let mut out = self.clone();
        out.options = self.options.resolved(&self.axes);
        out.sweep.grid = GridSpec::List(self.sweep.grid.values());
        out.validate()?;
        Ok(out)
    }

    pub fn base_point(&self) -> Point {
        Point {
            bc: BoundaryConfig::new(self.axes.clone()),
            options: self.options.clone(),
            a: self.detectors.a.spec(),
            b: self.detectors.b.spec(),
        }
    }

    /// Base point with an output's overrides applied.
    pub fn output_point(&self, out: &OutputSpec) -> Result<Point, CliError> {
        let mut p = self.base_point();
        p.options = p.options.merged(&out.overrides.options());
        for (var, v) in out.overrides.geometry() {
            p.apply(var, v)?;
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: String| Err(CliError::Validation(m));
        if self.name.is_empty()
            || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return fail(format!("name: must be non-empty [A-Za-z0-9_-], got {:?}", self.name));
        }
        let base = self.base_point();
        base.checked()?;
        let n = self.axes.len();
        for (label, d) in [("a", &self.detectors.a), ("b", &self.detectors.b)] {
            d.spec().validate(n).map_err(|e| CliError::Validation(format!("detectors.{label}: {e}")))?;
            if let Some(s) = d.state {
                s.to_state()
                    .map_err(|e| CliError::Validation(format!("detectors.{label}.state: {e}")))?;
            }
        }
        let grid = self.sweep.grid.values();
        if grid.is_empty() {
            return fail("sweep.grid: must not be empty".into());
        }
        if grid.iter().any(|v| !v.is_finite()) {
            return fail("sweep.grid: values must be finite".into());
        }
        let up = grid.windows(2).all(|w| w[1] > w[0]);
        let down = grid.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return fail("sweep.grid: must be strictly monotone".into());
        }
        if matches!(self.sweep.variable, SweepVar::D | SweepVar::DeltaRatio)
            && self.axes.first().is_some_and(|a| a.kind == AxisKind::Open)
        {
            return fail("sweep.variable: D and delta_ratio act on axes[0], which must be compact".into());
        }
        if self.outputs.is_empty() {
            return fail("outputs: at least one output is required".into());
        }
        let mut seen = std::collections::HashSet::new();
        for (i, o) in self.outputs.iter().enumerate() {
            if o.column.is_empty()
                || !o.column.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return fail(format!("outputs[{i}].column: must be non-empty [A-Za-z0-9_-]"));
            }
            if !seen.insert(&o.column) {
                return fail(format!("outputs[{i}].column: duplicate {:?}", o.column));
            }
            if o.quantity == Quantity::SignalBlockNorm
                && (self.detectors.a.state.is_none() || self.detectors.b.state.is_none())
            {
                return fail(format!(
                    "outputs[{i}].quantity: signal_block_norm needs detectors.a.state and detectors.b.state"
                ));
            }
            if o.quantity == Quantity::CommutatorZeroMode && !base.bc.has_zero_mode() {
                return fail(format!(
                    "outputs[{i}].quantity: commutator_zero_mode needs a configuration with a zero mode"
                ));
            }
            let p = self
                .output_point(o)
                .map_err(|e| CliError::Validation(format!("outputs[{i}].overrides: {e}")))?;
            p.checked().map_err(|e| CliError::Validation(format!("outputs[{i}].overrides: {e}")))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "line"
axes = [{ kind = "periodic", length = 10.0 }]

[detectors.a]
center = [0.0]
t_on = 0.0
t_off = 0.0

[detectors.b]
center = [5.0]
t_on = 1.0
t_off = 1.0

[sweep]
variable = "dt"
grid = { start = 0.5, stop = 2.0, count = 4 }

[[outputs]]
column = "E"
quantity = "estimator"
overrides = { include_zero_mode = false }
"#;

    #[test]
    fn parses_and_resolves_defaults() {
        let s: Scenario = toml::from_str(MINIMAL).unwrap();
        let r = s.resolved().unwrap();
        assert_eq!(r.sweep.grid, GridSpec::List(vec![0.5, 1.0, 1.5, 2.0]));
        assert_eq!(r.options.cutoff, Some(CutoffList::PerAxis(vec![DEFAULT_CUTOFF])));
        assert_eq!(r.options.epsilon_relative, Some(DEFAULT_EPSILON_RELATIVE));
        let json = serde_json::to_string(&r).unwrap();
        let back: Scenario = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn missing_length_names_the_field() {
        let text = MINIMAL.replace("length = 10.0", "");
        let s: Scenario = toml::from_str(&text).unwrap();
        let err = s.resolved().unwrap_err().to_string();
        assert!(err.contains("axes[0].length"), "{err}");
    }

    #[test]
    fn non_monotone_grid_rejected() {
        let text = MINIMAL.replace("grid = { start = 0.5, stop = 2.0, count = 4 }", "grid = [1.0, 0.5, 2.0]");
        let s: Scenario = toml::from_str(&text).unwrap();
        assert!(s.resolved().unwrap_err().to_string().contains("sweep.grid"));
    }

    #[test]
    fn signal_block_requires_states() {
        let text = MINIMAL.replace("quantity = \"estimator\"", "quantity = \"signal_block_norm\"");
        let s: Scenario = toml::from_str(&text).unwrap();
        assert!(s.resolved().unwrap_err().to_string().contains("outputs[0].quantity"));
    }

    #[test]
    fn delta_ratio_keeps_gap_and_surface_distance() {
        let mut p = Point {
            bc: BoundaryConfig::torus(1, 20.0),
            options: OptionsSpec::default(),
            a: DetectorSpec::top_hat(0.0, 1.0, vec![0.0], 1.0),
            b: DetectorSpec::top_hat(2.0, 3.0, vec![1.5], 1.0),
        };
        p.apply(SweepVar::DeltaRatio, 0.25).unwrap();
        assert_eq!((p.a.t_on, p.a.t_off, p.b.t_on, p.b.t_off), (0.0, 0.25, 1.25, 1.5));
        assert_eq!(p.a.sigma, 0.25);
        assert!((p.b.center[0] - 0.125 - 0.125 - 0.5).abs() < 1e-15);
        p.apply(SweepVar::D, 0.3).unwrap();
        assert!((p.b.center[0] - 0.55).abs() < 1e-15);
    }

    #[test]
    fn unknown_field_is_a_parse_error() {
        let text = MINIMAL.replace("[sweep]", "[sweep]\nstep = 3");
        assert!(toml::from_str::<Scenario>(&text).is_err());
    }
}
