//! Mittag-Leffler functions, the operator L_β, and the scalar functions built
//! from them.
//!
//! Notation: F_{α,β}(x) = E_{α,β}(x^α), L_βF(x) = x^{α−1}E_{α,α+β−1}(x^α),
//! D_{α,β} = L_βF − F and D̄ = −D.
//!
//! For moderate x everything is summed from the power series. For large x
//! the series loses about e^x·2^{−52} absolutely to cancellation while the
//! functions of interest stay of order one, so the differences are evaluated
//! from their algebraic large-x expansions (the exponential parts x^{1−β}e^x/α
//! cancel exactly), or, for D with 0 < α, β < 2, from the Hankel-contour
//! Laplace integral, which is accurate at every x.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{self, QuadratureConfig};
use crate::specfun::{self, ln_gamma_pos, rgamma, sinpi, CompensatedSum, PrecisionConfig};

/// A validated parameter pair (α, β).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBeta {
    pub alpha: f64,
    pub beta: f64,
}

impl AlphaBeta {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameter(format!(
                "alpha and beta must be positive and finite, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Inside the necktie domain (0, 4] × (0, 2] studied by the classifier.
    pub fn in_necktie_domain(&self) -> bool {
        self.alpha <= 4.0 && self.beta <= 2.0
    }
}

/// Series trust radius for negative arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalDomain {
    pub max_abs_arg: f64,
}

impl EvalDomain {
    pub fn new(max_abs_arg: f64) -> Result<Self> {
        if !(max_abs_arg > 0.0 && max_abs_arg <= 40.0) {
            return Err(Error::Parameter(format!(
                "max_abs_arg must lie in (0, 40], got {max_abs_arg}"
            )));
        }
        Ok(Self { max_abs_arg })
    }
}

impl Default for EvalDomain {
    fn default() -> Self {
        Self { max_abs_arg: 30.0 }
    }
}

/// Largest x at which D and the Theorem B differences are summed from the series.
pub const SERIES_MAX_X: f64 = 10.0;
/// From here on the algebraic expansions are used when no integral representation applies.
pub const ASYMPTOTIC_MIN_X: f64 = 16.0;
/// Relative accuracy demanded of the alternating series at negative arguments.
const ALTERNATING_REL_TOL: f64 = 1e-10;
/// Positive series arguments are allowed while the largest term stays finite.
const MAX_EXP_ARG: f64 = 700.0;

/// A series value with the sum of the absolute values of its terms.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesValue {
    pub value: f64,
    pub magnitude: f64,
}

/// Σ_{n≥0} c_n · rgamma(β + αn) with c_n = sign^n · exp(n·ln_z), for any real β.
fn ml_series_core(
    alpha: f64,
    beta: f64,
    ln_abs_z: f64,
    negative: bool,
    prec: &PrecisionConfig,
) -> Result<SeriesValue> {
    if ln_abs_z == f64::NEG_INFINITY {
        let v = rgamma(beta);
        return Ok(SeriesValue {
            value: v,
            magnitude: v.abs(),
        });
    }
    // Terms decrease once Γ(β+α(n+1))/Γ(β+αn) ≈ (β+αn)^α exceeds |z|.
    let peak = ((ln_abs_z / alpha).exp() - beta) / alpha;
    let peak = if peak.is_finite() { peak.max(0.0) } else { f64::INFINITY };
    let mut sum = CompensatedSum::new();
    let mut mag = 0.0;
    for n in 0..prec.max_terms {
        let nf = n as f64;
        let arg = beta + alpha * nf;
        let term = if arg <= 150.0 {
            (nf * ln_abs_z).exp() * rgamma(arg)
        } else {
            (nf * ln_abs_z - ln_gamma_pos(arg)).exp()
        };
        let term = if negative && n % 2 == 1 { -term } else { term };
        sum.add(term);
        mag += term.abs();
        if nf > peak + 1.0 && term.abs() <= prec.series_tol * sum.value().abs().max(f64::MIN_POSITIVE) {
            return Ok(SeriesValue {
                value: sum.value(),
                magnitude: mag,
            });
        }
    }
    Err(Error::NonConvergence {
        estimate: sum.value(),
        error: f64::NAN,
    })
}

fn check_positive_arg(alpha: f64, z: f64) -> Result<()> {
    if z > 0.0 && z.ln() / alpha > MAX_EXP_ARG.ln() {
        return Err(Error::Domain(format!(
            "E_alpha({z}) overflows for alpha = {alpha}"
        )));
    }
    Ok(())
}

/// E_{α,β}(z) for any real β, with the trust radius applied to negative z.
pub(crate) fn ml_raw(alpha: f64, beta: f64, z: f64, dom: &EvalDomain, prec: &PrecisionConfig) -> Result<SeriesValue> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("argument must be finite, got {z}")));
    }
    if z < -dom.max_abs_arg {
        return Err(Error::OutOfTrustRadius {
            arg: z,
            radius: dom.max_abs_arg,
        });
    }
    check_positive_arg(alpha, z)?;
    let s = ml_series_core(alpha, beta, z.abs().ln(), z < 0.0, prec)?;
    let bound = 16.0 * f64::EPSILON * s.magnitude;
    if z < 0.0 && bound > ALTERNATING_REL_TOL * s.value.abs() {
        return Err(Error::PrecisionLoss {
            value: s.value,
            bound,
        });
    }
    Ok(s)
}

/// The generalized Mittag-Leffler function E_{α,β}(z) = Σ zⁿ/Γ(β+αn).
///
/// Negative arguments are limited to the trust radius, and rejected inside it
/// when the alternating series cannot deliver 1e-10 relative accuracy.
/// Positive arguments are limited only by the range where terms stay finite.
pub fn ml(ab: AlphaBeta, z: f64) -> Result<f64> {
    ml_with(ab, z, &EvalDomain::default(), &PrecisionConfig::default())
}

pub fn ml_with(ab: AlphaBeta, z: f64, dom: &EvalDomain, prec: &PrecisionConfig) -> Result<f64> {
    Ok(ml_raw(ab.alpha, ab.beta, z, dom, prec)?.value)
}

/// E'_α(z) = Σ_{n≥1} n z^{n−1}/Γ(1+αn).
pub fn ml_deriv(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let dom = EvalDomain::default();
    let prec = PrecisionConfig::default();
    if z < -dom.max_abs_arg {
        return Err(Error::OutOfTrustRadius {
            arg: z,
            radius: dom.max_abs_arg,
        });
    }
    check_positive_arg(alpha, z)?;
    let peak = (z.abs().powf(1.0 / alpha) - 1.0) / alpha;
    let mut sum = CompensatedSum::new();
    for n in 1..prec.max_terms {
        let nf = n as f64;
        let term = nf * z.powi(n as i32 - 1) * rgamma(1.0 + alpha * nf);
        sum.add(term);
        if nf > peak + 2.0 && term.abs() <= prec.series_tol * sum.value().abs().max(f64::MIN_POSITIVE) {
            return Ok(sum.value());
        }
    }
    Err(Error::NonConvergence {
        estimate: sum.value(),
        error: f64::NAN,
    })
}

fn check_x(x: f64, strict: bool) -> Result<()> {
    let ok = if strict { x > 0.0 } else { x >= 0.0 };
    if !ok || !x.is_finite() {
        return Err(Error::Domain(format!(
            "x must be {} and finite, got {x}",
            if strict { "positive" } else { "non-negative" }
        )));
    }
    Ok(())
}

fn big_f_series(alpha: f64, beta: f64, x: f64) -> Result<SeriesValue> {
    if x == 0.0 {
        let v = rgamma(beta);
        return Ok(SeriesValue {
            value: v,
            magnitude: v.abs(),
        });
    }
    if x > MAX_EXP_ARG {
        return Err(Error::Domain(format!("F(x) overflows at x = {x}")));
    }
    ml_series_core(alpha, beta, alpha * x.ln(), false, &PrecisionConfig::default())
}

fn lb_big_f_series(alpha: f64, beta: f64, x: f64) -> Result<SeriesValue> {
    if x > MAX_EXP_ARG {
        return Err(Error::Domain(format!("L_beta F(x) overflows at x = {x}")));
    }
    let s = ml_series_core(alpha, alpha + beta - 1.0, alpha * x.ln(), false, &PrecisionConfig::default())?;
    let p = x.powf(alpha - 1.0);
    Ok(SeriesValue {
        value: p * s.value,
        magnitude: p * s.magnitude,
    })
}

/// F_{α,β}(x) = E_{α,β}(x^α).
pub fn big_f(ab: AlphaBeta, x: f64) -> Result<f64> {
    check_x(x, false)?;
    Ok(big_f_series(ab.alpha, ab.beta, x)?.value)
}

/// L_βF_{α,β}(x) = x^{α−1}E_{α,α+β−1}(x^α).
pub fn lb_big_f(ab: AlphaBeta, x: f64) -> Result<f64> {
    check_x(x, true)?;
    Ok(lb_big_f_series(ab.alpha, ab.beta, x)?.value)
}

/// Evaluation route for D and the Theorem B differences beyond the series range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LargeX {
    /// Hankel-contour Laplace integral when 0 < α < 2, α ≠ 1, β < min(2, 1+α);
    /// algebraic expansion otherwise.
    Hankel,
    /// Algebraic expansion only.
    Asymptotic,
}

/// D_{α,β}(x) = L_βF(x) − F(x).
pub fn d_func(ab: AlphaBeta, x: f64) -> Result<f64> {
    d_func_with(ab, x, LargeX::Hankel)
}

pub fn d_func_with(ab: AlphaBeta, x: f64, route: LargeX) -> Result<f64> {
    check_x(x, true)?;
    let AlphaBeta { alpha, beta } = ab;
    if alpha == 1.0 {
        return Ok(0.0);
    }
    if x <= SERIES_MAX_X {
        return d_series(alpha, beta, x);
    }
    if route == LargeX::Hankel && hankel_applies(alpha, beta) {
        return Ok(-dbar_hankel(alpha, beta, x)?);
    }
    if alpha > 2.0 || x <= ASYMPTOTIC_MIN_X {
        return d_series(alpha, beta, x);
    }
    Ok(d_asymptotic(alpha, beta, x))
}

fn d_series(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    Ok(lb_big_f_series(alpha, beta, x)?.value - big_f_series(alpha, beta, x)?.value)
}

fn hankel_applies(alpha: f64, beta: f64) -> bool {
    alpha < 2.0 && alpha != 1.0 && beta < 2.0 && beta < 1.0 + alpha
}

/// D̄_{α,β}(x) from the Hankel-contour Laplace representation.
pub fn dbar_hankel(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    if !hankel_applies(alpha, beta) || !(beta > 0.0) {
        return Err(Error::Domain(format!(
            "Hankel representation needs 0 < alpha < 2, alpha != 1, 0 < beta < min(2, 1 + alpha); got ({alpha}, {beta})"
        )));
    }
    check_x(x, true)?;
    let (sb, sab, samb) = (sinpi(beta), sinpi(alpha + beta), sinpi(alpha - beta));
    let c = 2.0 * specfun::cospi(alpha);
    let rho = move |t: f64| {
        let ta = t.powf(alpha);
        let num = sb * t.powf(1.0 - beta) * (t.powf(2.0 * alpha - 1.0) - 1.0)
            + sab * t.powf(alpha + 1.0 - beta)
            + samb * t.powf(alpha - beta);
        num / (ta * ta - c * ta + 1.0)
    };
    let hint = (alpha - beta).min(1.0 - beta);
    let cfg = QuadratureConfig::default().with_hint(hint);
    let est = quad::half_line_centered(|t| (-x * t).exp() * rho(t), 1.0 / x, &cfg)?;
    Ok(x.powf(1.0 - beta) / PI * est.value)
}

/// A term −scale·x^{−e}/Γ(β − e) of an algebraic expansion.
#[derive(Debug, Clone, Copy)]
struct AlgTerm {
    e: f64,
    scale: f64,
}

/// Sum the terms in order of increasing e up to the optimal truncation e ≤ x.
fn algebraic_sum(mut terms: Vec<AlgTerm>, beta: f64, x: f64) -> f64 {
    terms.sort_by(|a, b| a.e.total_cmp(&b.e));
    let lx = x.ln();
    let mut s = CompensatedSum::new();
    for t in terms {
        if t.e > x.max(1.0) {
            break;
        }
        s.add(rgamma_scaled(beta - t.e, -t.scale, t.e, lx));
    }
    s.value()
}

/// scale·x^{−e}/Γ(arg), in log form when arg is far below zero and 1/Γ overflows.
fn rgamma_scaled(arg: f64, scale: f64, e: f64, lx: f64) -> f64 {
    if arg > -150.0 {
        return scale * rgamma(arg) * (-e * lx).exp();
    }
    // 1/Γ(a) = sin(πa)Γ(1−a)/π
    let s = sinpi(arg);
    if s == 0.0 {
        return 0.0;
    }
    scale * s.signum() * (ln_gamma_pos(1.0 - arg) + (s.abs() / PI).ln() - e * lx).exp()
}

fn n_terms(alpha: f64, x: f64) -> usize {
    ((x / alpha).ceil() as usize + 2).min(4000)
}

/// Large-x expansion of F − x^{1−β}e^x/α.
fn alg_f(alpha: f64, x: f64) -> Vec<AlgTerm> {
    (1..n_terms(alpha, x))
        .map(|k| AlgTerm {
            e: alpha * k as f64,
            scale: 1.0,
        })
        .collect()
}

/// Large-x expansion of L_βF − x^{1−β}e^x/α.
fn alg_lbf(alpha: f64, x: f64) -> Vec<AlgTerm> {
    (0..n_terms(alpha, x))
        .map(|j| AlgTerm {
            e: 1.0 + alpha * j as f64,
            scale: 1.0,
        })
        .collect()
}

/// Large-x expansion of the incomplete-Gamma term minus x^{1−β}e^x/α.
fn alg_term(alpha: f64, x: f64) -> Vec<AlgTerm> {
    (1..n_terms(1.0, x))
        .map(|k| AlgTerm {
            e: k as f64,
            scale: 1.0 / alpha,
        })
        .collect()
}

fn negated(v: Vec<AlgTerm>) -> Vec<AlgTerm> {
    v.into_iter()
        .map(|t| AlgTerm {
            e: t.e,
            scale: -t.scale,
        })
        .collect()
}

/// Algebraic large-x expansion of D_{α,β}, for 0 < α ≤ 2.
pub fn d_asymptotic(alpha: f64, beta: f64, x: f64) -> f64 {
    let mut t = alg_lbf(alpha, x);
    t.extend(negated(alg_f(alpha, x)));
    algebraic_sum(t, beta, x)
}

/// The integer n with 1/(n+1) < α ≤ 1/n.
pub fn n_alpha(alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("n_alpha needs 0 < alpha < 1, got {alpha}")));
    }
    let mut n = (1.0 / alpha).floor().max(1.0) as usize;
    // Correct the float quotient against the exact comparisons n·α ≤ 1 < (n+1)·α.
    while n > 1 && (n as f64) * alpha > 1.0 {
        n -= 1;
    }
    while ((n + 1) as f64) * alpha <= 1.0 {
        n += 1;
    }
    if is_reciprocal(alpha, n + 1) {
        n += 1;
    }
    Ok(n)
}

/// α equals 1/n up to rounding of the literal 1.0/n.
fn is_reciprocal(alpha: f64, n: usize) -> bool {
    alpha == 1.0 / n as f64
}

/// D̃_{α,1−α} = D_{α,1−α} − Σ_{k=2}^{n_α−1} x^{αk−1}/Γ(α(k−1)).
pub fn tilde_d(alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::Domain(format!("tilde_d needs 0 < alpha <= 1/2, got {alpha}")));
    }
    check_x(x, true)?;
    let n = n_alpha(alpha)?;
    if is_reciprocal(alpha, n) {
        return Ok(0.0);
    }
    let ab = AlphaBeta::new(alpha, 1.0 - alpha)?;
    let d = d_func(ab, x)?;
    let sub: CompensatedSum = (2..n)
        .map(|k| {
            let k = k as f64;
            x.powf(alpha * k - 1.0) * rgamma(alpha * (k - 1.0))
        })
        .collect();
    Ok(d - sub.value())
}

/// x^{1−β}e^xγ(β−1, x)/(αΓ(β−1)), continuous at β = 1 where it equals e^x/α.
pub fn inc_term(ab: AlphaBeta, x: f64) -> Result<f64> {
    check_x(x, true)?;
    if ab.beta < 1.0 {
        return Err(Error::Domain(format!("inc_term needs beta >= 1, got {}", ab.beta)));
    }
    let p = specfun::regularized_lower_gamma(ab.beta - 1.0, x)?;
    Ok(((1.0 - ab.beta) * x.ln() + x).exp() * p / ab.alpha)
}

/// The four signed differences of Theorem B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThmBDiff {
    FMinusTerm,
    TermMinusF,
    LbfMinusTerm,
    TermMinusLbf,
}

impl ThmBDiff {
    pub const ALL: [ThmBDiff; 4] = [
        ThmBDiff::FMinusTerm,
        ThmBDiff::TermMinusF,
        ThmBDiff::LbfMinusTerm,
        ThmBDiff::TermMinusLbf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ThmBDiff::FMinusTerm => "F_minus_term",
            ThmBDiff::TermMinusF => "term_minus_F",
            ThmBDiff::LbfMinusTerm => "lbF_minus_term",
            ThmBDiff::TermMinusLbf => "term_minus_lbF",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|w| w.name().eq_ignore_ascii_case(s))
    }

    fn sign(self) -> f64 {
        match self {
            ThmBDiff::FMinusTerm | ThmBDiff::LbfMinusTerm => 1.0,
            ThmBDiff::TermMinusF | ThmBDiff::TermMinusLbf => -1.0,
        }
    }

    fn uses_lbf(self) -> bool {
        matches!(self, ThmBDiff::LbfMinusTerm | ThmBDiff::TermMinusLbf)
    }
}

/// One of F − term, term − F, L_βF − term, term − L_βF.
pub fn thmb_diff(ab: AlphaBeta, x: f64, which: ThmBDiff) -> Result<f64> {
    check_x(x, true)?;
    let AlphaBeta { alpha, beta } = ab;
    if beta < 1.0 {
        return Err(Error::Domain(format!("thmb_diff needs beta >= 1, got {beta}")));
    }
    if alpha == 1.0 {
        return Ok(0.0);
    }
    let large = alpha <= 2.0 && x > ASYMPTOTIC_MIN_X;
    let v = if large {
        let mut t = if which.uses_lbf() {
            alg_lbf(alpha, x)
        } else {
            alg_f(alpha, x)
        };
        t.extend(negated(alg_term(alpha, x)));
        algebraic_sum(t, beta, x)
    } else {
        let f = if which.uses_lbf() {
            lb_big_f_series(alpha, beta, x)?.value
        } else {
            big_f_series(alpha, beta, x)?.value
        };
        f - inc_term(ab, x)?
    };
    Ok(which.sign() * v)
}

/// Σ_{k=1}^{n} (x^{−k}/(αΓ(β−k)) − x^{−αk}/Γ(β−αk)), the truncated large-x
/// expansion of F − term.
pub fn tail_expansion(ab: AlphaBeta, x: f64, n: usize) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("tail_expansion needs x > 1, got {x}")));
    }
    if n == 0 {
        return Err(Error::Parameter("tail_expansion needs n >= 1".into()));
    }
    let AlphaBeta { alpha, beta } = ab;
    if alpha == 1.0 {
        return Ok(0.0);
    }
    let s: CompensatedSum = (1..=n)
        .map(|k| {
            let k = k as f64;
            x.powf(-k) * rgamma(beta - k) / alpha - x.powf(-alpha * k) * rgamma(beta - alpha * k)
        })
        .collect();
    Ok(s.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ab(a: f64, b: f64) -> AlphaBeta {
        AlphaBeta::new(a, b).unwrap()
    }

    #[test]
    fn elementary_cases() {
        let e = std::f64::consts::E;
        assert_relative_eq!(ml(ab(1.0, 1.0), 1.0).unwrap(), e, max_relative = 1e-15);
        assert_relative_eq!(ml(ab(2.0, 1.0), 1.0).unwrap(), 1f64.cosh(), max_relative = 1e-15);
        assert_relative_eq!(ml(ab(1.0, 2.0), 1.0).unwrap(), e - 1.0, max_relative = 1e-15);
        assert_relative_eq!(ml(ab(1.0, 1.0), -2.0).unwrap(), (-2f64).exp(), max_relative = 1e-13);
        assert!(matches!(ml(ab(1.0, 1.0), -20.0), Err(Error::PrecisionLoss { .. })));
        assert_relative_eq!(ml_deriv(1.0, 1.0).unwrap(), e, max_relative = 1e-15);
        assert_relative_eq!(ml_deriv(2.0, 1.0).unwrap(), 1f64.sinh() / 2.0, max_relative = 1e-15);
        assert_relative_eq!(big_f(ab(2.0, 1.0), 1.0).unwrap(), 1f64.cosh(), max_relative = 1e-15);
        assert_relative_eq!(lb_big_f(ab(2.0, 1.0), 1.0).unwrap(), 1f64.sinh(), max_relative = 1e-15);
        assert_relative_eq!(-d_func(ab(2.0, 1.0), 1.0).unwrap(), (-1f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn trust_radius_applies_to_negative_arguments() {
        assert!(matches!(
            ml(ab(0.5, 1.0), -31.0),
            Err(Error::OutOfTrustRadius { .. })
        ));
        assert!(ml(ab(4.0, 1.0), 625.0).is_ok());
        assert!(ml(ab(1.0, 1.0), 800.0).is_err());
    }

    #[test]
    fn n_alpha_boundaries() {
        assert_eq!(n_alpha(0.5).unwrap(), 2);
        assert_eq!(n_alpha(1.0 / 3.0).unwrap(), 3);
        assert_eq!(n_alpha(0.34).unwrap(), 2);
        assert_eq!(n_alpha(0.9).unwrap(), 1);
        assert_eq!(n_alpha(0.1).unwrap(), 10);
        assert_eq!(n_alpha(1.0 / 7.0).unwrap(), 7);
        assert!(n_alpha(1.0).is_err());
    }

    #[test]
    fn inc_term_closed_forms() {
        for &x in &[0.1, 1.0, 4.0] {
            assert_relative_eq!(inc_term(ab(0.7, 1.0), x).unwrap(), x.exp() / 0.7, max_relative = 1e-15);
            assert_relative_eq!(
                inc_term(ab(0.7, 2.0), x).unwrap(),
                x.exp_m1() / (0.7 * x),
                max_relative = 1e-13
            );
        }
        // continuity at β = 1
        let a = inc_term(ab(0.7, 1.0 + 1e-9), 2.0).unwrap();
        assert_relative_eq!(a, 2f64.exp() / 0.7, max_relative = 1e-7);
    }

    #[test]
    fn hankel_matches_series_in_overlap() {
        for &(a, b) in &[(0.3, 0.7), (0.4, 1.2), (0.75, 0.5), (1.5, 0.5), (1.9, 1.0), (0.6, 1.0)] {
            for &x in &[0.5, 3.0, 8.0] {
                let s = d_series(a, b, x).unwrap();
                let h = -dbar_hankel(a, b, x).unwrap();
                assert_relative_eq!(s, h, max_relative = 1e-9, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn asymptotic_matches_hankel_at_large_x() {
        for &(a, b) in &[(0.3, 0.7), (0.95, 0.9), (1.5, 0.5)] {
            for &x in &[30.0, 100.0, 1e4] {
                let h = -dbar_hankel(a, b, x).unwrap();
                let s = d_asymptotic(a, b, x);
                assert_relative_eq!(s, h, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn thmb_large_x_continuity() {
        for &a in &[0.5, 0.75, 1.5] {
            for w in ThmBDiff::ALL {
                let lo = thmb_diff(ab(a, 1.5), ASYMPTOTIC_MIN_X, w).unwrap();
                let hi = thmb_diff(ab(a, 1.5), ASYMPTOTIC_MIN_X * (1.0 + 1e-12), w).unwrap();
                assert_relative_eq!(lo, hi, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn thmb_names_round_trip() {
        for w in ThmBDiff::ALL {
            assert_eq!(ThmBDiff::parse(w.name()), Some(w));
        }
        assert_eq!(ThmBDiff::parse("nope"), None);
    }
}
