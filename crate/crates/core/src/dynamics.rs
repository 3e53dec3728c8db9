//! Second-order signalling contribution to detector B's density matrix.
//!
//! With `Re(β_A e^{iΩ_A t}) = (β_A e^{iΩ_A t} + β̄_A e^{-iΩ_A t})/2` the time
//! integrals reduce to the switched kernel `K` of [`crate::estimator`]:
//! `X(b) = (β_A/2) K(Ω_A, b) + (β̄_A/2) K(-Ω_A, b)` and, with `c = 1 - 2α_B`,
//!
//! ```text
//! m11 =  2i (β_B X(Ω_B) - β̄_B X(-Ω_B))     m12 = -2i c X(-Ω_B)
//! m21 =  2i c X(-Ω_B)                      m22 = -m11
//! ```
//!
//! all multiplied by `λ_A λ_B`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{check_nonoverlap, EstimatorMethod, SwitchedKernel};
use crate::types::{CheckedConfig, DetectorSpec};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `ρ = [[α, β], [β̄, 1-α]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitState {
    pub alpha: f64,
    pub beta: Complex64,
}

impl QubitState {
    pub fn new(alpha: f64, beta: Complex64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidState(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        if beta.norm_sqr() > alpha * (1.0 - alpha) + 1e-15 {
            return Err(Error::InvalidState(format!(
                "|beta|^2 = {} exceeds alpha(1 - alpha) = {}",
                beta.norm_sqr(),
                alpha * (1.0 - alpha)
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn ground() -> Self {
        Self { alpha: 0.0, beta: Complex64::new(0.0, 0.0) }
    }

    /// `(|0⟩ + e^{iφ}|1⟩)/√2`.
    pub fn plus(phase: f64) -> Self {
        Self { alpha: 0.5, beta: Complex64::from_polar(0.5, phase) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalBlock {
    pub m: [[Complex64; 2]; 2],
    /// `‖M - M†‖_F / ‖M‖_F` (0 for the zero matrix).
    pub hermiticity_defect: f64,
}

impl SignalBlock {
    fn from_entries(m: [[Complex64; 2]; 2]) -> Self {
        let frob = frobenius(&m);
        let diff: f64 = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(r, c)| (m[r][c] - m[c][r].conj()).norm_sqr())
            .sum();
        let hermiticity_defect = if frob > 0.0 { diff.sqrt() / frob } else { 0.0 };
        Self { m, hermiticity_defect }
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn max_entry(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn frobenius(m: &[[Complex64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Assembles the block from any kernel `K(a, b)`.
pub fn signal_block_with_kernel<F>(
    a: &DetectorSpec,
    state_a: &QubitState,
    b: &DetectorSpec,
    state_b: &QubitState,
    kernel: F,
) -> Result<SignalBlock>
where
    F: Fn(f64, f64) -> Result<Complex64>,
{
    let (wa, wb) = (a.omega, b.omega);
    let beta_a = state_a.beta;
    let x = |fb: f64| -> Result<Complex64> {
        Ok(beta_a * 0.5 * kernel(wa, fb)? + beta_a.conj() * 0.5 * kernel(-wa, fb)?)
    };
    let (xp, xm) = (x(wb)?, x(-wb)?);
    let c = 1.0 - 2.0 * state_b.alpha;
    let lam = a.coupling * b.coupling;
    let m11 = 2.0 * I * (state_b.beta * xp - state_b.beta.conj() * xm) * lam;
    let m12 = -2.0 * I * c * xm * lam;
    let m21 = 2.0 * I * c * xm * lam;
    Ok(SignalBlock::from_entries([[m11, m12], [m21, -m11]]))
}

/// The `λ_A λ_B` block of B's reduced state after both detectors interact.
pub fn signal_block(
    cfg: &CheckedConfig,
    a: &DetectorSpec,
    state_a: &QubitState,
    b: &DetectorSpec,
    state_b: &QubitState,
    method: EstimatorMethod,
) -> Result<SignalBlock> {
    if !check_nonoverlap(cfg.bc(), a, b) {
        return Err(Error::OverlappingSupports("signal block needs separated detectors".into()));
    }
    let k = SwitchedKernel::new(cfg, a, b, method)?;
    signal_block_with_kernel(a, state_a, b, state_b, |fa, fb| Ok(k.eval(fa, fb)?.value))
}

/// Largest singular value of the block.
pub fn signal_magnitude(block: &SignalBlock) -> f64 {
    let m = &block.m;
    let f2 = frobenius(m).powi(2);
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
    (0.5 * (f2 + disc)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{validate_config, BoundaryConfig, CommutatorOptions};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn state_positivity_enforced() {
        assert!(QubitState::new(0.5, c(0.5, 0.0)).is_ok());
        assert!(QubitState::new(0.5, c(0.6, 0.0)).is_err());
        assert!(QubitState::new(1.2, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn magnitude_examples() {
        let zero = SignalBlock::from_entries([[c(0.0, 0.0); 2]; 2]);
        assert_eq!(signal_magnitude(&zero), 0.0);
        let d = SignalBlock::from_entries([[c(-3.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(3.0, 0.0)]]);
        assert_abs_diff_eq!(signal_magnitude(&d), 3.0, epsilon = 1e-15);
        let m = SignalBlock::from_entries([[c(1.0, 2.0), c(0.5, -1.0)], [c(-0.3, 0.2), c(-1.0, -2.0)]]);
        // compare with the power method on M†M
        let mut v = [c(1.0, 0.0), c(0.3, 0.1)];
        for _ in 0..500 {
            let w = [m.m[0][0] * v[0] + m.m[0][1] * v[1], m.m[1][0] * v[0] + m.m[1][1] * v[1]];
            let u = [
                m.m[0][0].conj() * w[0] + m.m[1][0].conj() * w[1],
                m.m[0][1].conj() * w[0] + m.m[1][1].conj() * w[1],
            ];
            let n = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
            v = [u[0] / n, u[1] / n];
        }
        let w = [m.m[0][0] * v[0] + m.m[0][1] * v[1], m.m[1][0] * v[0] + m.m[1][1] * v[1]];
        let power = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
        assert_abs_diff_eq!(signal_magnitude(&m), power, epsilon = 1e-12);
    }

    #[test]
    fn zero_coherence_in_a_gives_zero_block() {
        let bc = BoundaryConfig::torus(1, 10.0);
        let cfg = validate_config(&bc, &CommutatorOptions::new(&bc, 50)).unwrap();
        let a = DetectorSpec::top_hat(0.0, 1.0, vec![0.0], 0.5).with_gap(2.0);
        let b = DetectorSpec::top_hat(2.0, 3.0, vec![1.0], 0.5).with_gap(1.0);
        let blk = signal_block(
            &cfg,
            &a,
            &QubitState::new(0.3, c(0.0, 0.0)).unwrap(),
            &b,
            &QubitState::plus(0.4),
            EstimatorMethod::Auto,
        )
        .unwrap();
        assert_eq!(blk.max_entry(), 0.0);
    }

    #[test]
    fn kernel_linearity_and_zero_trace() {
        let a = DetectorSpec::delta(0.0, vec![0.0]).with_gap(1.3);
        let b = DetectorSpec::delta(2.0, vec![5.0]).with_gap(0.7);
        let k = |fa: f64, fb: f64| Ok(c(0.2 + fa, -0.1 * fb));
        let k2 = |fa: f64, fb: f64| Ok(2.0 * c(0.2 + fa, -0.1 * fb));
        let sa = QubitState::plus(0.3);
        let sb = QubitState::new(0.2, c(0.1, 0.3)).unwrap();
        let one = signal_block_with_kernel(&a, &sa, &b, &sb, k).unwrap();
        let two = signal_block_with_kernel(&a, &sa, &b, &sb, k2).unwrap();
        for r in 0..2 {
            for col in 0..2 {
                assert_eq!(two.m[r][col], 2.0 * one.m[r][col]);
            }
        }
        assert_eq!(one.trace(), c(0.0, 0.0));
    }
}
