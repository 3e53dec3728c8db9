//! Domain vocabulary shared by every module: events, boundary conditions,
//! detector descriptions and numerical options.

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, Error, Result, Violation};

/// Largest supported number of spatial dimensions.
pub const MAX_DIM: usize = 3;

/// Momentum cutoff used on an open axis when none is given.
pub const DEFAULT_OPEN_CUTOFF: f64 = 50.0;

/// A point `(t, x)` of flat spacetime in units with `c = ħ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub x: Vec<f64>,
}

impl SpacetimeEvent {
    pub fn new(t: f64, x: impl Into<Vec<f64>>) -> Self {
        Self { t, x: x.into() }
    }

    /// Checks the dimension against `n` and that every coordinate is finite.
    pub fn check(&self, n: usize) -> Result<()> {
        if self.x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.x.len() });
        }
        if !self.t.is_finite() || self.x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteEvent);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    Periodic,
    Neumann,
    Dirichlet,
    Open,
}

impl AxisKind {
    pub const ALL: [AxisKind; 4] =
        [AxisKind::Periodic, AxisKind::Neumann, AxisKind::Dirichlet, AxisKind::Open];

    /// Whether the constant function is an admissible eigenfunction on this axis.
    pub fn admits_constant(self) -> bool {
        matches!(self, AxisKind::Periodic | AxisKind::Neumann)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub kind: AxisKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

impl AxisSpec {
    pub fn periodic(length: f64) -> Self {
        Self { kind: AxisKind::Periodic, length: Some(length) }
    }

    pub fn neumann(length: f64) -> Self {
        Self { kind: AxisKind::Neumann, length: Some(length) }
    }

    pub fn dirichlet(length: f64) -> Self {
        Self { kind: AxisKind::Dirichlet, length: Some(length) }
    }

    pub fn open() -> Self {
        Self { kind: AxisKind::Open, length: None }
    }
}

/// Per-axis boundary conditions of the spatial section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConfig {
    pub axes: Vec<AxisSpec>,
}

impl BoundaryConfig {
    pub fn new(axes: Vec<AxisSpec>) -> Self {
        Self { axes }
    }

    /// `n` periodic axes of equal length (the `n`-torus).
    pub fn torus(n: usize, length: f64) -> Self {
        Self::new(vec![AxisSpec::periodic(length); n])
    }

    pub fn neumann_box(n: usize, length: f64) -> Self {
        Self::new(vec![AxisSpec::neumann(length); n])
    }

    /// Periodic `x`, Dirichlet `y`, both of length `length`.
    pub fn annulus(length: f64) -> Self {
        Self::new(vec![AxisSpec::periodic(length), AxisSpec::dirichlet(length)])
    }

    /// Periodic `x` of circumference `length`, open `y`.
    pub fn einstein_cylinder(length: f64) -> Self {
        Self::new(vec![AxisSpec::periodic(length), AxisSpec::open()])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn has_zero_mode(&self) -> bool {
        !self.axes.is_empty() && self.axes.iter().all(|a| a.kind.admits_constant())
    }

    pub fn open_axis(&self) -> Option<usize> {
        self.axes.iter().position(|a| a.kind == AxisKind::Open)
    }

    /// Product of the compact axis lengths.
    pub fn compact_volume(&self) -> f64 {
        self.axes.iter().filter_map(|a| a.length).product()
    }

    pub fn length(&self, axis: usize) -> Option<f64> {
        self.axes.get(axis).and_then(|a| a.length)
    }

    /// Sets every compact axis to `length`.
    pub fn with_uniform_length(mut self, length: f64) -> Self {
        for a in &mut self.axes {
            if a.kind != AxisKind::Open {
                a.length = Some(length);
            }
        }
        self
    }

    /// Largest finite length, or 1 when there is none.
    pub fn reference_length(&self) -> f64 {
        self.axes
            .iter()
            .filter_map(|a| a.length)
            .filter(|l| l.is_finite() && *l > 0.0)
            .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |m| m.max(l))))
            .unwrap_or(1.0)
    }
}

/// A UV truncation of one axis: an index bound for compact axes, a momentum
/// bound for the open axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisCutoff {
    Index(u32),
    Momentum(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummationPolicy {
    /// Fixed pairwise tree over canonically ordered terms; scheduling-independent.
    #[default]
    PairwiseDeterministic,
    /// Single-threaded Neumaier summation in canonical order.
    SerialCompensated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorOptions {
    /// iε regulator (time units).
    pub epsilon: f64,
    pub cutoffs: Vec<AxisCutoff>,
    pub include_zero_mode: bool,
    /// Half-width of the excluded window around `l = 0` on an open axis.
    pub pv_epsilon: f64,
    #[serde(default)]
    pub summation: SummationPolicy,
    /// Multiply mode terms by Lanczos sigma factors.
    #[serde(default)]
    pub sigma_factors: bool,
}

impl CommutatorOptions {
    /// Defaults for `bc`: ε = 1e-6·L, index cutoff `n_max` on compact axes,
    /// momentum cutoff 50 on an open axis, zero mode included.
    pub fn new(bc: &BoundaryConfig, n_max: u32) -> Self {
        let cutoffs = bc
            .axes
            .iter()
            .map(|a| match a.kind {
                AxisKind::Open => AxisCutoff::Momentum(DEFAULT_OPEN_CUTOFF),
                _ => AxisCutoff::Index(n_max),
            })
            .collect();
        Self {
            epsilon: 1e-6 * bc.reference_length(),
            cutoffs,
            include_zero_mode: true,
            pv_epsilon: 1e-3,
            summation: SummationPolicy::PairwiseDeterministic,
            sigma_factors: false,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_zero_mode(mut self, include: bool) -> Self {
        self.include_zero_mode = include;
        self
    }

    pub fn with_pv_epsilon(mut self, pv: f64) -> Self {
        self.pv_epsilon = pv;
        self
    }

    pub fn with_summation(mut self, policy: SummationPolicy) -> Self {
        self.summation = policy;
        self
    }

    pub fn with_sigma_factors(mut self, on: bool) -> Self {
        self.sigma_factors = on;
        self
    }

    /// Replaces every index cutoff by `n_max`, leaving momentum cutoffs alone.
    pub fn with_index_cutoff(mut self, n_max: u32) -> Self {
        for c in &mut self.cutoffs {
            if let AxisCutoff::Index(n) = c {
                *n = n_max;
            }
        }
        self
    }

    pub fn with_momentum_cutoff(mut self, lambda: f64) -> Self {
        for c in &mut self.cutoffs {
            if let AxisCutoff::Momentum(m) = c {
                *m = lambda;
            }
        }
        self
    }
}

/// A boundary configuration and option set that passed [`validate_config`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckedConfig {
    bc: BoundaryConfig,
    opts: CommutatorOptions,
}

impl CheckedConfig {
    pub fn bc(&self) -> &BoundaryConfig {
        &self.bc
    }

    pub fn opts(&self) -> &CommutatorOptions {
        &self.opts
    }

    pub fn dim(&self) -> usize {
        self.bc.dim()
    }

    pub fn has_zero_mode(&self) -> bool {
        self.bc.has_zero_mode()
    }

    /// Index cutoff of a compact axis.
    pub fn index_cutoff(&self, axis: usize) -> u32 {
        match self.opts.cutoffs[axis] {
            AxisCutoff::Index(n) => n,
            AxisCutoff::Momentum(_) => 0,
        }
    }

    pub fn momentum_cutoff(&self) -> Option<f64> {
        self.opts.cutoffs.iter().find_map(|c| match c {
            AxisCutoff::Momentum(m) => Some(*m),
            AxisCutoff::Index(_) => None,
        })
    }

    pub fn into_parts(self) -> (BoundaryConfig, CommutatorOptions) {
        (self.bc, self.opts)
    }
}

/// Checks every invariant of `bc` and `opts`, reporting all violations at once.
pub fn validate_config(
    bc: &BoundaryConfig,
    opts: &CommutatorOptions,
) -> std::result::Result<CheckedConfig, ConfigError> {
    let mut violations = Vec::new();
    let n = bc.dim();
    if n == 0 {
        violations.push(Violation::NoAxes);
    }
    if n > MAX_DIM {
        violations.push(Violation::UnsupportedDimension { n });
    }
    let mut open = Vec::new();
    for (i, axis) in bc.axes.iter().enumerate() {
        match (axis.kind, axis.length) {
            (AxisKind::Open, Some(_)) => {
                open.push(i);
                violations.push(Violation::LengthOnOpenAxis { axis: i });
            }
            (AxisKind::Open, None) => open.push(i),
            (_, None) => violations.push(Violation::MissingLength { axis: i }),
            (_, Some(l)) if !(l.is_finite() && l > 0.0) => {
                violations.push(Violation::NonPositiveLength { axis: i, length: l })
            }
            _ => {}
        }
    }
    if open.len() > 1 {
        violations.push(Violation::MultipleOpenAxes { axes: open });
    }
    if opts.cutoffs.len() != n {
        violations.push(Violation::CutoffCountMismatch { expected: n, found: opts.cutoffs.len() });
    } else {
        for (i, (axis, cut)) in bc.axes.iter().zip(&opts.cutoffs).enumerate() {
            let reason = match (axis.kind, *cut) {
                (AxisKind::Open, AxisCutoff::Index(_)) => Some("open axis needs a momentum cutoff"),
                (AxisKind::Open, AxisCutoff::Momentum(m)) if !(m.is_finite() && m > 0.0) => {
                    Some("momentum cutoff must be finite and > 0")
                }
                (AxisKind::Open, AxisCutoff::Momentum(m)) if m <= opts.pv_epsilon => {
                    Some("momentum cutoff must exceed pv_epsilon")
                }
                (AxisKind::Open, AxisCutoff::Momentum(_)) => None,
                (_, AxisCutoff::Momentum(_)) => Some("compact axis needs an integer cutoff"),
                (_, AxisCutoff::Index(0)) => Some("index cutoff must be >= 1"),
                _ => None,
            };
            if let Some(reason) = reason {
                violations.push(Violation::BadCutoff { axis: i, reason });
            }
        }
    }
    if !(opts.epsilon.is_finite() && opts.epsilon > 0.0) {
        violations.push(Violation::BadEpsilon { value: opts.epsilon });
    }
    if !(opts.pv_epsilon.is_finite() && opts.pv_epsilon > 0.0) {
        violations.push(Violation::BadPvEpsilon { value: opts.pv_epsilon });
    }
    if violations.is_empty() {
        Ok(CheckedConfig { bc: bc.clone(), opts: opts.clone() })
    } else {
        Err(ConfigError { violations })
    }
}

/// One Unruh-DeWitt detector: smearing centre and width, switching window,
/// gap and coupling. `t_on == t_off` encodes delta switching at that instant,
/// `sigma == 0` a pointlike detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub center: Vec<f64>,
    #[serde(default)]
    pub sigma: f64,
    pub t_on: f64,
    pub t_off: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default = "one")]
    pub coupling: f64,
}

fn one() -> f64 {
    1.0
}

impl DetectorSpec {
    /// Pointlike detector switched on instantaneously at `t`.
    pub fn delta(t: f64, center: impl Into<Vec<f64>>) -> Self {
        Self { center: center.into(), sigma: 0.0, t_on: t, t_off: t, omega: 0.0, coupling: 1.0 }
    }

    /// Top-hat smearing of width `sigma`, top-hat switching on `[t_on, t_off]`.
    pub fn top_hat(t_on: f64, t_off: f64, center: impl Into<Vec<f64>>, sigma: f64) -> Self {
        Self { center: center.into(), sigma, t_on, t_off, omega: 0.0, coupling: 1.0 }
    }

    pub fn with_gap(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn is_delta(&self) -> bool {
        self.t_on == self.t_off
    }

    pub fn is_pointlike(&self) -> bool {
        self.sigma == 0.0
    }

    pub fn duration(&self) -> f64 {
        self.t_off - self.t_on
    }

    pub fn mid_time(&self) -> f64 {
        0.5 * (self.t_on + self.t_off)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.center.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.center.len() });
        }
        let finite = self.center.iter().all(|c| c.is_finite())
            && [self.sigma, self.t_on, self.t_off, self.omega, self.coupling]
                .iter()
                .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidDetector("non-finite parameter".into()));
        }
        if self.sigma < 0.0 {
            return Err(Error::InvalidDetector(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if self.t_on > self.t_off {
            return Err(Error::InvalidDetector(format!(
                "t_on ({}) after t_off ({})",
                self.t_on, self.t_off
            )));
        }
        Ok(())
    }
}
