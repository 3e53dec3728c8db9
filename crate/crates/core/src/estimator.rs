//! Smeared and switched commutators between two detectors.
//!
//! The central object is the switched kernel
//!
//! ```text
//! K(a, b) = ∫∫ χ_A(t) e^{iat} χ_B(t') e^{ibt'} 𝓒(t, t') dt dt'
//! ```
//!
//! where `𝓒` is the commutator smeared against both spatial profiles. The
//! estimator is `𝓔 = |K(0, 0)|` and the signalling block of
//! [`crate::dynamics`] needs `K(±Ω_A, ±Ω_B)`.
//!
//! Three routes evaluate `K`:
//!
//! * `Direct`: delta switching and pointlike smearing on both sides, so `K` is
//!   the bare commutator times phases.
//! * `Spectral`: every axis discrete. Each mode contributes
//!   `N² e^{-ωε} [ĉ_A(ω-a) ĉ_B(-ω-b) S_A S̄_B - ĉ_A(-ω-a) ĉ_B(ω-b) S̄_A S_B]`
//!   with `ĉ(ν) = ∫χ e^{-iνt} dt` and `S` the smeared spatial eigenfunction,
//!   both in closed form for top-hats and deltas. No quadrature error.
//! * `Quadrature`: tensor Gauss–Legendre over the switching and smearing
//!   supports of the full commutator, with a doubled-rule error estimate.

use num_complex::Complex64;
use serde::Serialize;

use crate::commutator::{wrapped, CommutatorEngine};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::reduce::sum_indexed;
use crate::spectrum::{enumerate_modes, lanczos_sigma};
use crate::types::{AxisKind, BoundaryConfig, CheckedConfig, DetectorSpec, SpacetimeEvent};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    TopHat,
    Delta,
}

/// A switching or smearing profile: `height` on `[lo, hi]`, or a delta of
/// weight `height` at `lo == hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Profile {
    pub kind: ProfileKind,
    pub lo: f64,
    pub hi: f64,
    pub height: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `(cos x - sinc x) / x`, the odd part of a top-hat's first moment.
fn first_moment_shape(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        // Σ (-1)^n 2n x^{2n-1} / (2n+1)!
        x * (-1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (-1.0 / 840.0 + x2 / 45360.0)))
    } else {
        (x.cos() - x.sin() / x) / x
    }
}

impl Profile {
    pub fn delta(at: f64) -> Self {
        Self { kind: ProfileKind::Delta, lo: at, hi: at, height: 1.0 }
    }

    /// Unit-mass top-hat on `[lo, hi]`.
    pub fn top_hat(lo: f64, hi: f64) -> Self {
        Self { kind: ProfileKind::TopHat, lo, hi, height: 1.0 / (hi - lo) }
    }

    pub fn with_height(mut self, height: f64) -> Self {
        self.height = height;
        self
    }

    /// Switching profile of a detector: delta when `t_on == t_off`.
    pub fn switching(d: &DetectorSpec) -> Self {
        if d.is_delta() {
            Self::delta(d.t_on)
        } else {
            Self::top_hat(d.t_on, d.t_off)
        }
    }

    /// Smearing profile of a detector along one axis: `[c ± σ/2]` or a delta.
    pub fn smearing(d: &DetectorSpec, axis: usize) -> Self {
        let c = d.center[axis];
        if d.is_pointlike() {
            Self::delta(c)
        } else {
            Self::top_hat(c - 0.5 * d.sigma, c + 0.5 * d.sigma)
        }
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn mass(&self) -> f64 {
        match self.kind {
            ProfileKind::Delta => self.height,
            ProfileKind::TopHat => self.height * (self.hi - self.lo),
        }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::TopHat if t >= self.lo && t <= self.hi => self.height,
            _ => 0.0,
        }
    }

    /// `∫ χ(t) e^{-iνt} dt`.
    pub fn transform(&self, nu: f64) -> Complex64 {
        let phase = Complex64::from_polar(1.0, -nu * self.center());
        match self.kind {
            ProfileKind::Delta => phase * self.height,
            ProfileKind::TopHat => {
                let w = self.hi - self.lo;
                phase * (self.height * w * sinc(0.5 * nu * w))
            }
        }
    }

    /// `∫ t χ(t) e^{-iνt} dt`.
    pub fn first_moment(&self, nu: f64) -> Complex64 {
        let c = self.center();
        let phase = Complex64::from_polar(1.0, -nu * c);
        match self.kind {
            ProfileKind::Delta => phase * (c * self.height),
            ProfileKind::TopHat => {
                let hw = 0.5 * (self.hi - self.lo);
                let even = c * self.height * 2.0 * hw * sinc(nu * hw);
                let odd = I * (2.0 * self.height * hw * hw * first_moment_shape(nu * hw));
                phase * (odd + even)
            }
        }
    }

    /// Gauss–Legendre nodes with weights `height · w_i`, or the single delta node.
    fn nodes(&self, rule: &GaussLegendre) -> Vec<(f64, f64)> {
        match self.kind {
            ProfileKind::Delta => vec![(self.lo, self.height)],
            ProfileKind::TopHat => {
                rule.mapped(self.lo, self.hi).map(|(x, w)| (x, w * self.height)).collect()
            }
        }
    }
}

/// Strictly ordered switching (`T_off_A < T_on_B`) and spatial supports
/// disjoint along at least one axis, using the wrapped distance on periodic
/// axes.
pub fn check_nonoverlap(bc: &BoundaryConfig, a: &DetectorSpec, b: &DetectorSpec) -> bool {
    if a.t_off.partial_cmp(&b.t_on) != Some(std::cmp::Ordering::Less) {
        return false;
    }
    let reach = 0.5 * (a.sigma + b.sigma);
    bc.axes.iter().enumerate().any(|(l, axis)| {
        let dx = b.center[l] - a.center[l];
        let gap = match (axis.kind, axis.length) {
            (AxisKind::Periodic, Some(len)) => wrapped(dx, len).abs(),
            _ => dx.abs(),
        };
        gap > reach
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Direct,
    Spectral,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMethod {
    /// `Direct` when both detectors are delta-switched and pointlike,
    /// `Spectral` when every axis is discrete, `Quadrature` otherwise.
    #[default]
    Auto,
    Spectral,
    /// Gauss–Legendre with this many nodes per non-delta dimension.
    Quadrature(usize),
}

pub const DEFAULT_QUADRATURE_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub modes_summed: usize,
}

/// Per-mode spatial overlap `N² e^{-ωε} σ_I S_A S̄_B`.
struct SpectralTable {
    omega: Vec<f64>,
    overlap: Vec<Complex64>,
    on_shell: Vec<bool>,
}

enum Backend {
    Direct { engine: CommutatorEngine },
    Spectral { table: SpectralTable },
    Quadrature { engine: CommutatorEngine, points: usize },
}

/// `K(a, b)` for one detector pair, with the per-mode data cached.
pub struct SwitchedKernel {
    cfg: CheckedConfig,
    a: DetectorSpec,
    b: DetectorSpec,
    chi_a: Profile,
    chi_b: Profile,
    backend: Backend,
}

fn axis_overlap(kind: AxisKind, k: f64, f: &Profile) -> Complex64 {
    let c = f.transform(k);
    match kind {
        AxisKind::Periodic => c.conj(),
        AxisKind::Neumann => Complex64::new(c.re, 0.0),
        AxisKind::Dirichlet => Complex64::new(-c.im, 0.0),
        AxisKind::Open => unreachable!("spectral route needs discrete axes"),
    }
}

impl SwitchedKernel {
    /// Kernel with the detectors' own switching profiles.
    pub fn new(
        cfg: &CheckedConfig,
        a: &DetectorSpec,
        b: &DetectorSpec,
        method: EstimatorMethod,
    ) -> Result<Self> {
        Self::with_profiles(cfg, a, b, Profile::switching(a), Profile::switching(b), method)
    }

    pub fn with_profiles(
        cfg: &CheckedConfig,
        a: &DetectorSpec,
        b: &DetectorSpec,
        chi_a: Profile,
        chi_b: Profile,
        method: EstimatorMethod,
    ) -> Result<Self> {
        let n = cfg.dim();
        a.validate(n)?;
        b.validate(n)?;
        let discrete = cfg.bc().open_axis().is_none();
        let route = match method {
            EstimatorMethod::Auto
                if chi_a.kind == ProfileKind::Delta
                    && chi_b.kind == ProfileKind::Delta
                    && a.is_pointlike()
                    && b.is_pointlike() =>
            {
                Route::Direct
            }
            EstimatorMethod::Auto if discrete => Route::Spectral,
            EstimatorMethod::Auto => Route::Quadrature,
            EstimatorMethod::Spectral if discrete => Route::Spectral,
            EstimatorMethod::Spectral => return Err(Error::OpenAxisNotEnumerable),
            EstimatorMethod::Quadrature(_) => Route::Quadrature,
        };
        let backend = match route {
            Route::Direct => Backend::Direct { engine: CommutatorEngine::new(cfg.clone())? },
            Route::Spectral => Backend::Spectral { table: Self::spectral_table(cfg, a, b)? },
            Route::Quadrature => Backend::Quadrature {
                engine: CommutatorEngine::new(cfg.clone())?,
                points: match method {
                    EstimatorMethod::Quadrature(p) => p.max(1),
                    _ => DEFAULT_QUADRATURE_POINTS,
                },
            },
        };
        Ok(Self { cfg: cfg.clone(), a: a.clone(), b: b.clone(), chi_a, chi_b, backend })
    }

    fn spectral_table(cfg: &CheckedConfig, a: &DetectorSpec, b: &DetectorSpec) -> Result<SpectralTable> {
        let bc = cfg.bc();
        let opts = cfg.opts();
        let modes = enumerate_modes(cfg)?;
        let fa: Vec<Profile> = (0..bc.dim()).map(|l| Profile::smearing(a, l)).collect();
        let fb: Vec<Profile> = (0..bc.dim()).map(|l| Profile::smearing(b, l)).collect();
        let mut omega = Vec::with_capacity(modes.len());
        let mut overlap = Vec::with_capacity(modes.len());
        let mut on_shell = Vec::with_capacity(modes.len());
        for m in &modes {
            let mut sa = Complex64::new(1.0, 0.0);
            let mut sb = Complex64::new(1.0, 0.0);
            let mut sigma = 1.0;
            let mut shell = false;
            for (l, axis) in bc.axes.iter().enumerate() {
                sa *= axis_overlap(axis.kind, m.k[l], &fa[l]);
                sb *= axis_overlap(axis.kind, m.k[l], &fb[l]);
                if opts.sigma_factors {
                    sigma *= lanczos_sigma(m.index[l], cfg.index_cutoff(l));
                }
                shell |= m.index[l].unsigned_abs() == cfg.index_cutoff(l) as u64;
            }
            let w = m.norm * m.norm * (-m.omega * opts.epsilon).exp() * sigma;
            omega.push(m.omega);
            overlap.push(sa * sb.conj() * w);
            on_shell.push(shell);
        }
        Ok(SpectralTable { omega, overlap, on_shell })
    }

    pub fn route(&self) -> Route {
        match self.backend {
            Backend::Direct { .. } => Route::Direct,
            Backend::Spectral { .. } => Route::Spectral,
            Backend::Quadrature { .. } => Route::Quadrature,
        }
    }

    fn zero_mode_on(&self) -> bool {
        self.cfg.opts().include_zero_mode && self.cfg.has_zero_mode()
    }

    /// `K(fa, fb)`.
    pub fn eval(&self, fa: f64, fb: f64) -> Result<KernelValue> {
        match &self.backend {
            Backend::Direct { engine } => {
                let ea = SpacetimeEvent::new(self.chi_a.lo, self.a.center.clone());
                let eb = SpacetimeEvent::new(self.chi_b.lo, self.b.center.clone());
                let r = engine.eval(&ea, &eb)?;
                let phase = self.chi_a.transform(-fa) * self.chi_b.transform(-fb);
                Ok(KernelValue {
                    value: phase * r.value,
                    error_estimate: r.diagnostics.error_estimate,
                    modes_summed: r.diagnostics.modes_summed,
                })
            }
            Backend::Spectral { table } => Ok(self.eval_spectral(table, fa, fb)),
            Backend::Quadrature { engine, points } => {
                let coarse = self.eval_quadrature(engine, *points, fa, fb)?;
                let fine = self.eval_quadrature(engine, 2 * points, fa, fb)?;
                Ok(KernelValue {
                    value: fine,
                    error_estimate: (fine - coarse).norm(),
                    modes_summed: 0,
                })
            }
        }
    }

    fn eval_spectral(&self, t: &SpectralTable, fa: f64, fb: f64) -> KernelValue {
        let (ca, cb) = (&self.chi_a, &self.chi_b);
        let term = |i: usize| {
            let w = t.omega[i];
            let p = t.overlap[i];
            ca.transform(w - fa) * cb.transform(-w - fb) * p
                - ca.transform(-w - fa) * cb.transform(w - fb) * p.conj()
        };
        let policy = self.cfg.opts().summation;
        let osc: Complex64 = sum_indexed(t.omega.len(), policy, term);
        let shell: Complex64 =
            sum_indexed(t.omega.len(), policy, |i| if t.on_shell[i] { term(i) } else { Complex64::default() });
        let zero = if self.zero_mode_on() {
            // -(i/V) ∫∫ χ_A χ_B e^{i fa t + i fb t'} (t - t'), unit-mass smearings
            let v = self.cfg.bc().compact_volume();
            -I / v * (ca.first_moment(-fa) * cb.transform(-fb) - ca.transform(-fa) * cb.first_moment(-fb))
        } else {
            Complex64::default()
        };
        KernelValue { value: osc + zero, error_estimate: shell.norm(), modes_summed: t.omega.len() }
    }

    fn eval_quadrature(
        &self,
        engine: &CommutatorEngine,
        points: usize,
        fa: f64,
        fb: f64,
    ) -> Result<Complex64> {
        let rule = GaussLegendre::new(points);
        let n = self.cfg.dim();
        let space = |d: &DetectorSpec| -> Vec<(Vec<f64>, f64)> {
            let mut out = vec![(Vec::new(), 1.0)];
            for l in 0..n {
                let nodes = Profile::smearing(d, l).nodes(&rule);
                out = out
                    .into_iter()
                    .flat_map(|(x, w)| {
                        nodes.iter().map(move |&(xl, wl)| {
                            let mut x = x.clone();
                            x.push(xl);
                            (x, w * wl)
                        })
                    })
                    .collect();
            }
            out
        };
        let (xa, xb) = (space(&self.a), space(&self.b));
        let (ta, tb) = (self.chi_a.nodes(&rule), self.chi_b.nodes(&rule));
        let total = ta.len() * tb.len() * xa.len() * xb.len();
        let results: Vec<Result<Complex64>> = {
            use rayon::prelude::*;
            (0..total)
                .into_par_iter()
                .map(|idx| {
                    let (rest, jb) = (idx / xb.len(), idx % xb.len());
                    let (rest, ja) = (rest / xa.len(), rest % xa.len());
                    let (it, jt) = (rest / tb.len(), rest % tb.len());
                    let (t, wt) = ta[it];
                    let (tp, wtp) = tb[jt];
                    let c = engine.eval(
                        &SpacetimeEvent::new(t, xa[ja].0.clone()),
                        &SpacetimeEvent::new(tp, xb[jb].0.clone()),
                    )?;
                    let phase = Complex64::from_polar(1.0, fa * t + fb * tp);
                    Ok(c.value * phase * (wt * wtp * xa[ja].1 * xb[jb].1))
                })
                .collect()
        };
        let values: Vec<Complex64> = results.into_iter().collect::<Result<_>>()?;
        Ok(sum_indexed(values.len(), self.cfg.opts().summation, |i| values[i]))
    }
}

/// `𝓒(t, t') = ∫∫ F_A F_B ⟨[φ(t, x), φ(t', x')]⟩`.
pub fn smeared_commutator(
    cfg: &CheckedConfig,
    a: &DetectorSpec,
    b: &DetectorSpec,
    t: f64,
    t_prime: f64,
) -> Result<KernelValue> {
    SwitchedKernel::with_profiles(
        cfg,
        a,
        b,
        Profile::delta(t),
        Profile::delta(t_prime),
        EstimatorMethod::Auto,
    )?
    .eval(0.0, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorResult {
    /// `𝓔 = |K(0, 0)|`.
    pub value: f64,
    pub kernel: Complex64,
    pub error_estimate: f64,
    pub modes_summed: usize,
    pub route: Route,
}

pub fn estimator_e(cfg: &CheckedConfig, a: &DetectorSpec, b: &DetectorSpec) -> Result<EstimatorResult> {
    estimator_e_with(cfg, a, b, Profile::switching(a), Profile::switching(b), EstimatorMethod::Auto)
}

pub fn estimator_e_with(
    cfg: &CheckedConfig,
    a: &DetectorSpec,
    b: &DetectorSpec,
    chi_a: Profile,
    chi_b: Profile,
    method: EstimatorMethod,
) -> Result<EstimatorResult> {
    a.validate(cfg.dim())?;
    b.validate(cfg.dim())?;
    if !check_nonoverlap(cfg.bc(), a, b) {
        return Err(Error::OverlappingSupports(format!(
            "A on [{}, {}] at {:?}, B on [{}, {}] at {:?}",
            a.t_on, a.t_off, a.center, b.t_on, b.t_off, b.center
        )));
    }
    let kernel = SwitchedKernel::with_profiles(cfg, a, b, chi_a, chi_b, method)?;
    let k = kernel.eval(0.0, 0.0)?;
    Ok(EstimatorResult {
        value: k.value.norm(),
        kernel: k.value,
        error_estimate: k.error_estimate,
        modes_summed: k.modes_summed,
        route: kernel.route(),
    })
}

/// 𝓔 on a periodic line without the zero mode, for a family of lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthScan {
    pub lengths: Vec<f64>,
    pub dts: Vec<f64>,
    /// `curves[i][j]` = 𝓔 at `lengths[i]`, `dts[j]`.
    pub curves: Vec<Vec<f64>>,
    pub spacelike_dt: f64,
    pub timelike_dt: f64,
    pub spacelike: Vec<f64>,
    pub timelike: Vec<f64>,
    /// Least-squares slope of `ln 𝓔` against `ln L` on the spacelike branch.
    pub fit_exponent: f64,
    /// `(max - min) / max` of the timelike branch over `L ≥ (L_min + L_max)/2`.
    pub timelike_variation: f64,
}

/// Delta-switched pointlike detectors a distance `dx` apart on periodic lines
/// of each length, zero mode excluded.
pub fn estimator_vs_l(
    lengths: &[f64],
    dx: f64,
    dts: &[f64],
    spacelike_dt: f64,
    timelike_dt: f64,
    epsilon: f64,
) -> Result<LengthScan> {
    use crate::types::{validate_config, CommutatorOptions};
    let e = |len: f64, dt: f64| -> Result<f64> {
        let bc = BoundaryConfig::torus(1, len);
        let opts = CommutatorOptions::new(&bc, 1).with_zero_mode(false).with_epsilon(epsilon);
        let cfg = validate_config(&bc, &opts)?;
        let a = DetectorSpec::delta(0.0, vec![0.0]);
        let b = DetectorSpec::delta(dt, vec![dx]);
        Ok(estimator_e(&cfg, &a, &b)?.value)
    };
    let curves = lengths
        .iter()
        .map(|&l| dts.iter().map(|&t| e(l, t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let spacelike = lengths.iter().map(|&l| e(l, spacelike_dt)).collect::<Result<Vec<_>>>()?;
    let timelike = lengths.iter().map(|&l| e(l, timelike_dt)).collect::<Result<Vec<_>>>()?;
    let fit_exponent = log_log_slope(lengths, &spacelike);
    let (lo, hi) = lengths.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &l| (a.min(l), b.max(l)));
    let mid = 0.5 * (lo + hi);
    let top: Vec<f64> = lengths.iter().zip(&timelike).filter(|(l, _)| **l >= mid).map(|(_, v)| *v).collect();
    let max = top.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = top.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(LengthScan {
        lengths: lengths.to_vec(),
        dts: dts.to_vec(),
        curves,
        spacelike_dt,
        timelike_dt,
        spacelike,
        timelike,
        fit_exponent,
        timelike_variation: (max - min) / max,
    })
}

fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
