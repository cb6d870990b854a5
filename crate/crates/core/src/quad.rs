//! Quadrature on (0, ∞) and on finite intervals.
//!
//! Everything reduces to one primitive: the trapezoidal rule in the
//! logarithmic coordinate `u = ln t` over the whole real line. For the
//! integrands of this crate (power laws at 0, exponential or power decay at
//! ∞, poles no closer than a fixed distance from the real `u` axis) the rule
//! converges exponentially in the node density, and endpoint power-law
//! singularities become exponentially decaying tails in `u`. The range is
//! found by walking outwards until the exponential extrapolation of the
//! remaining tail has settled; the node density is then refined by halving
//! the step.
//!
//! Finite intervals use the logistic map `t = a + (b − a)/(1 + e^{−u})`,
//! which hands the integrand both `t − a` and `b − t` without cancellation.

use crate::error::{Error, Result};

/// Tolerances for the adaptive rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinements: u32,
    /// Power-law order γ of the integrand at the left end: f(t) ~ t^γ.
    pub endpoint_exponent_hint: Option<f64>,
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_refinements: u32) -> Result<Self> {
        for (name, v) in [("abs_tol", abs_tol), ("rel_tol", rel_tol)] {
            if !(v > 0.0 && v <= 1e-4) {
                return Err(Error::Parameter(format!("{name} must lie in (0, 1e-4], got {v}")));
            }
        }
        if max_refinements > 30 {
            return Err(Error::Parameter(format!(
                "max_refinements must be at most 30, got {max_refinements}"
            )));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_refinements,
            endpoint_exponent_hint: None,
        })
    }

    pub fn with_hint(mut self, gamma: f64) -> Self {
        self.endpoint_exponent_hint = Some(gamma);
        self
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-12,
            max_refinements: 10,
            endpoint_exponent_hint: None,
        }
    }
}

/// An integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

const START_STEP: f64 = 0.5;
const U_LIMIT: f64 = 740.0;
const MAX_NODES: usize = 4_000_000;

/// End of a walk: last node kept, sum of g over the walk (excluding `start`),
/// value of g at the last node and its exponential decay rate beyond it.
struct WalkEnd {
    u: f64,
    sum: f64,
    last: f64,
    rate: f64,
}

impl WalkEnd {
    /// h·Σ_{k≥1} g(u + kh) for the extrapolated tail.
    fn tail_sum(&self, h: f64) -> f64 {
        if self.last == 0.0 || self.rate.is_infinite() {
            return 0.0;
        }
        let q = (-self.rate * h).exp();
        h * self.last * q / (1.0 - q)
    }
}

/// Walk from `start` in direction `dir` until the integral beyond the current
/// node is known to tolerance. Beyond the last node g is extrapolated as an
/// exponential in u, whose rate is either `decay_hint` or the local ratio of
/// successive nodes; the walk stops once that extrapolation has settled.
fn walk<G: Fn(f64) -> f64>(
    g: &G,
    start: f64,
    dir: f64,
    decay_hint: Option<f64>,
    scale: f64,
    cfg: &QuadratureConfig,
    evals: &mut usize,
) -> Result<WalkEnd> {
    let mut u = start;
    let mut sum = 0.0;
    let mut prev = g(start);
    let mut prev_rate: Option<f64> = None;
    let mut quiet = 0;
    loop {
        u += dir * START_STEP;
        if u.abs() > U_LIMIT {
            return Err(Error::NonConvergence {
                estimate: sum * START_STEP,
                error: prev.abs() * START_STEP,
            });
        }
        let v = g(u);
        *evals += 1;
        if !v.is_finite() {
            return Err(Error::NonConvergence {
                estimate: sum * START_STEP,
                error: f64::INFINITY,
            });
        }
        sum += v;
        let total = (scale + sum * START_STEP).abs();
        let observed = if v == 0.0 {
            Some(f64::INFINITY)
        } else {
            let ratio = v / prev;
            (ratio > 0.0 && ratio < 1.0).then(|| -ratio.ln() / START_STEP)
        };
        let rate = match decay_hint {
            Some(r) if r > 0.0 && observed.is_some() => Some(r),
            _ => observed,
        };
        let tail = rate.map_or(f64::INFINITY, |r| v / r);
        let settled = match (rate, observed, prev_rate) {
            (Some(r), Some(o), Some(p)) => {
                let tol = 0.1 * cfg.tolerance(total);
                (v / o - v / p).abs() <= tol && (v / r - v / o).abs() <= tol
            }
            _ => false,
        };
        if settled && tail.abs() <= total.max(cfg.abs_tol) || v == 0.0 && prev == 0.0 {
            quiet += 1;
        } else {
            quiet = 0;
        }
        prev = v;
        prev_rate = observed;
        if quiet >= 3 {
            return Ok(WalkEnd {
                u,
                sum,
                last: v,
                rate: rate.unwrap_or(f64::INFINITY),
            });
        }
    }
}

/// ∫ g(u) du over the real line, for g decaying at both ends.
pub fn real_line<G: Fn(f64) -> f64>(
    g: G,
    center: f64,
    left_decay: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let mut evals = 1;
    let g0 = g(center);
    if !g0.is_finite() {
        return Err(Error::NonConvergence {
            estimate: f64::NAN,
            error: f64::INFINITY,
        });
    }
    let right = walk(&g, center, 1.0, None, g0 * START_STEP, cfg, &mut evals)?;
    let left = walk(&g, center, -1.0, left_decay, (g0 + right.sum) * START_STEP, cfg, &mut evals)?;
    let (lo, hi) = (left.u, right.u);
    // trapezoid over the whole line, nodes beyond [lo, hi] extrapolated
    let tails = |h: f64| right.tail_sum(h) + left.tail_sum(h);

    let mut sum = g0 + right.sum + left.sum;
    let mut h = START_STEP;
    let mut value = sum * h + tails(h);
    let mut n_nodes = ((hi - lo) / h).round() as usize;
    for _ in 0..cfg.max_refinements.max(1) {
        let mut add = 0.0;
        for k in 0..n_nodes {
            add += g(lo + (k as f64 + 0.5) * h);
        }
        evals += n_nodes;
        sum += add;
        h *= 0.5;
        n_nodes *= 2;
        let next = sum * h + tails(h);
        let err = (next - value).abs();
        value = next;
        if !value.is_finite() {
            break;
        }
        if err <= cfg.tolerance(value) {
            return Ok(Estimate {
                value,
                error: err,
                evals,
            });
        }
        if n_nodes > MAX_NODES {
            break;
        }
    }
    Err(Error::NonConvergence {
        estimate: value,
        error: f64::NAN,
    })
}

/// ∫₀^∞ f(t) dt.
pub fn half_line<F: Fn(f64) -> f64>(f: F, cfg: &QuadratureConfig) -> Result<Estimate> {
    half_line_centered(f, 1.0, cfg)
}

/// ∫₀^∞ f(t) dt, starting the range search at `t0` (where f has most of its mass).
pub fn half_line_centered<F: Fn(f64) -> f64>(
    f: F,
    t0: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let g = |u: f64| {
        let t = u.exp();
        if t == 0.0 {
            0.0
        } else {
            f(t) * t
        }
    };
    let decay = cfg.endpoint_exponent_hint.map(|gam| gam + 1.0);
    if let Some(rate) = decay {
        if rate <= 0.0 {
            return Err(Error::Domain(format!(
                "integrand ~ t^{} is not integrable at 0",
                rate - 1.0
            )));
        }
    }
    real_line(g, t0.ln(), decay, cfg)
}

/// ∫₀¹ f(v, 1 − v) dv, the second argument being the exact complement.
pub fn unit_interval<F: Fn(f64, f64) -> f64>(f: F, cfg: &QuadratureConfig) -> Result<Estimate> {
    let g = |u: f64| {
        // v = 1/(1+e^{-u}), 1 − v = 1/(1+e^{u}), dv = v(1 − v) du
        let (v, vc) = if u >= 0.0 {
            let e = (-u).exp();
            (1.0 / (1.0 + e), e / (1.0 + e))
        } else {
            let e = u.exp();
            (e / (1.0 + e), 1.0 / (1.0 + e))
        };
        if v == 0.0 || vc == 0.0 {
            return 0.0;
        }
        f(v, vc) * v * vc
    };
    let decay = cfg.endpoint_exponent_hint.map(|gam| gam + 1.0);
    real_line(g, 0.0, decay, cfg)
}

/// ∫ₐᵇ f(t) dt over a finite interval.
pub fn finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("finite interval needs a < b, got [{a}, {b}]")));
    }
    let w = b - a;
    let est = unit_interval(|v, vc| f(if v < 0.5 { a + w * v } else { b - w * vc }), cfg)?;
    Ok(Estimate {
        value: est.value * w,
        error: est.error * w,
        evals: est.evals,
    })
}
