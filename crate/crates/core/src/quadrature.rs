//! Gauss–Legendre rules, composite panels and adaptive bisection.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on [-1, 1]; nodes by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<T, F>(&self, a: f64, b: f64, f: F) -> T
    where
        T: Default + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        self.mapped(a, b).fold(T::default(), |acc, (x, w)| acc + f(x) * w)
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn integrate_panels<T, F>(&self, a: f64, b: f64, panels: usize, f: F) -> T
    where
        T: Default + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let h = (b - a) / panels as f64;
        (0..panels).fold(T::default(), |acc, p| {
            let lo = a + p as f64 * h;
            let hi = if p + 1 == panels { b } else { lo + h };
            acc + self.integrate(lo, hi, &f)
        })
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = if n == 0 { 0.0 } else { n as f64 * (x * p1 - p0) / (x * x - 1.0) };
    (p, d)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Adaptive bisection with a fixed Gauss–Legendre rule: a panel is accepted
/// when the one-panel and two-half-panel estimates agree to within its share
/// of `tol`.
pub struct Adaptive {
    rule: GaussLegendre,
    pub tol: f64,
    pub max_depth: u32,
}

impl Adaptive {
    pub fn new(points: usize, tol: f64, max_depth: u32) -> Self {
        Self { rule: GaussLegendre::new(points), tol, max_depth }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: &F) -> Result<Integral> {
        let whole = self.rule.integrate(a, b, f);
        let mut out = Integral { value: 0.0, error_estimate: 0.0, evaluations: self.rule.len() };
        let ok = self.refine(a, b, whole, self.tol, 0, f, &mut out);
        if ok {
            Ok(out)
        } else {
            Err(Error::QuadratureNonConvergence { estimate: out.error_estimate, tolerance: self.tol })
        }
    }

    /// Integrates over consecutive panels `edges[i]..edges[i+1]`, sharing the
    /// tolerance in proportion to panel width.
    pub fn integrate_over<F: Fn(f64) -> f64>(&self, edges: &[f64], f: &F) -> Result<Integral> {
        let span = edges.last().unwrap_or(&0.0) - edges.first().unwrap_or(&0.0);
        let mut total = Integral { value: 0.0, error_estimate: 0.0, evaluations: 0 };
        let mut ok = true;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let tol = if span > 0.0 { self.tol * (b - a) / span } else { self.tol };
            let whole = self.rule.integrate(a, b, f);
            total.evaluations += self.rule.len();
            ok &= self.refine(a, b, whole, tol, 0, f, &mut total);
        }
        if ok {
            Ok(total)
        } else {
            Err(Error::QuadratureNonConvergence {
                estimate: total.error_estimate,
                tolerance: self.tol,
            })
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F: Fn(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        f: &F,
        out: &mut Integral,
    ) -> bool {
        let m = 0.5 * (a + b);
        let left = self.rule.integrate(a, m, f);
        let right = self.rule.integrate(m, b, f);
        out.evaluations += 2 * self.rule.len();
        let err = (left + right - whole).abs();
        if err <= tol || depth >= self.max_depth {
            out.value += left + right;
            out.error_estimate += err;
            return err <= tol;
        }
        let l = self.refine(a, m, left, 0.5 * tol, depth + 1, f, out);
        let r = self.refine(m, b, right, 0.5 * tol, depth + 1, f, out);
        l && r
    }
}
