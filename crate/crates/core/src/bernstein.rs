//! Bernstein densities, signed Laplace integrands, Mellin transforms,
//! multiplicative convolution and the positive stable density.
//!
//! Mellin transforms integrate against t^s (not t^{s−1}) throughout.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mlcore::{n_alpha, AlphaBeta};
use crate::quad::{self, QuadratureConfig};
use crate::specfun::{chebyshev_u, cospi, gamma, rgamma, sinpi};

/// How a density is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Probability,
    /// Nonnegative, possibly of infinite total mass.
    SigmaFinite,
    /// No sign claim.
    Signed,
}

/// Symbolic description of a density on (0, ∞).
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    /// f_α, α ∈ (0,1).
    FAlpha(f64),
    /// t·f_α(t)/(1+t), α ∈ (0,1).
    FHat(f64),
    /// Bernstein density of e^x/α − E_α(x^α), α ∈ (0,1).
    ExaDensity(f64),
    /// Density of T_α, α ∈ (1,2]; α = 2 is the unit point mass at 1.
    TAlpha(f64),
    /// Bernstein density of E_α(x^α) − e^x/α, α ∈ (1,2).
    EaxxDensity(f64),
    /// Density of U_{α−1}^{1/α}, α ∈ (1,2).
    UPowDensity(f64),
    /// Size bias of order one of `UPowDensity`, α ∈ (1,2).
    UPowSizeBias(f64),
    /// f̃_α, α ∈ (0,1/2].
    TildeFAlpha(f64),
    /// h_{α,β} = (1−β)f_α + t f_α′.
    HAlphaBeta { alpha: f64, beta: f64 },
    /// The signed integrand of the Hankel-contour representation of D̄_{α,β}.
    HankelBracket { alpha: f64, beta: f64 },
    /// g_α, α ∈ (1/2,1).
    GAlpha(f64),
    /// g̃_α, α ∈ (0,1/2).
    TildeGAlpha(f64),
    /// (1 − t²)/(√t(t³ + 1)).
    Remark2Line1,
    /// Re√(e^{iπ/3} − t)/√(t² − t + 1), times 2/√(3π).
    Remark2Line3,
    /// Σ c_k t^{−γ_k}, stored as (c_k, γ_k).
    MonomialSum(Vec<(f64, f64)>),
    /// Beta(a, b) probability density on (0,1).
    BetaKernel { a: f64, b: f64 },
    /// Gamma(shape) probability density with unit scale.
    GammaDensity(f64),
    /// weight·δ_at.
    PointMass { at: f64, weight: f64 },
    /// The zero measure.
    Zero,
    /// h_α = g_α ⊙ f_{Y_α}: known only through its Mellin transform.
    HAlpha(f64),
    /// h̃_α: known only through its Mellin transform.
    HTildeAlpha(f64),
    /// factor · spec.
    Scaled { factor: f64, inner: Box<DensitySpec> },
    /// prefactor · (kernel ⊙ base).
    Composite {
        prefactor: f64,
        kernel: Box<DensitySpec>,
        base: Box<DensitySpec>,
    },
    /// Sum of densities.
    Sum(Vec<DensitySpec>),
}

/// Open interval of exponents s with ∫ t^s f(t) dt finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinStrip {
    pub lo: f64,
    pub hi: f64,
}

impl MellinStrip {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Parameter(format!("empty Mellin strip ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, s: f64) -> bool {
        self.lo < s && s < self.hi
    }

    pub fn check(&self, s: f64) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::StripViolation {
                s,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }

    fn intersect(self, other: MellinStrip) -> Option<MellinStrip> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(MellinStrip { lo, hi })
    }

    const ALL: MellinStrip = MellinStrip {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
}

fn need(cond: bool, what: &str, v: f64) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{what}, got {v}")))
    }
}

fn unit_alpha(alpha: f64) -> Result<()> {
    need(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)", alpha)
}

fn upper_alpha(alpha: f64) -> Result<()> {
    need(alpha > 1.0 && alpha < 2.0, "alpha must lie in (1, 2)", alpha)
}

/// t^{2α} − 2cos(πα)t^α + 1, written as (t^α − cos πα)² + sin²(πα).
fn denom(alpha: f64, t: f64) -> f64 {
    let d = t.powf(alpha) - cospi(alpha);
    let s = sinpi(alpha);
    d * d + s * s
}

/// f_α(t).
pub fn f_alpha(alpha: f64, t: f64) -> f64 {
    sinpi(alpha) * t.powf(alpha - 1.0) * (1.0 + t) / (PI * denom(alpha, t))
}

/// Analytic derivative of f_α.
pub fn f_alpha_prime(alpha: f64, t: f64) -> Result<f64> {
    unit_alpha(alpha)?;
    need(t > 0.0, "t must be positive", t)?;
    let ta = t.powf(alpha);
    let c = cospi(alpha);
    let q = denom(alpha, t);
    let dq = 2.0 * alpha * (ta - c) * ta / t;
    let n = t.powf(alpha - 1.0) * (1.0 + t);
    let dn = ((alpha - 1.0) * (1.0 + t) + t) * t.powf(alpha - 2.0);
    Ok(sinpi(alpha) / PI * (dn * q - n * dq) / (q * q))
}

/// Numerator of h_{α,β} over sin(πα)/(π·denominator²).
pub fn htilde_poly(alpha: f64, beta: f64, t: f64) -> f64 {
    let c = cospi(alpha);
    let p = |e: f64| t.powf(e);
    (1.0 - alpha - beta) * p(3.0 * alpha) - 2.0 * (1.0 - beta) * c * p(2.0 * alpha)
        + (1.0 + alpha - beta) * p(alpha)
        - (alpha + beta) * p(3.0 * alpha - 1.0)
        + 2.0 * beta * c * p(2.0 * alpha - 1.0)
        + (alpha - beta) * p(alpha - 1.0)
}

/// h_{α,β}(t) from the polynomial form.
fn h_alpha_beta(alpha: f64, beta: f64, t: f64) -> f64 {
    let q = denom(alpha, t);
    sinpi(alpha) * htilde_poly(alpha, beta, t) / (PI * q * q)
}

fn tilde_f_alpha(alpha: f64, t: f64) -> Result<f64> {
    let n = n_alpha(alpha)? as f64;
    let c = cospi(alpha);
    let u2 = chebyshev_u((n - 2.0) as usize, c);
    let u1 = chebyshev_u((n - 1.0) as usize, c);
    let num = t.powf(alpha - 1.0) - u2 * t.powf(-alpha * (n - 1.0)) + u1 * t.powf(-alpha * (n - 2.0));
    Ok(sinpi(alpha) * num / (PI * denom(alpha, t)))
}

fn hankel_bracket(alpha: f64, beta: f64, t: f64) -> f64 {
    let num = sinpi(beta) * t.powf(1.0 - beta) * (t.powf(2.0 * alpha - 1.0) - 1.0)
        + sinpi(alpha + beta) * t.powf(alpha + 1.0 - beta)
        + sinpi(alpha - beta) * t.powf(alpha - beta);
    num / denom(alpha, t)
}

fn remark2_line3(t: f64) -> f64 {
    // Re√(a + ib) = √((|z| + a)/2) with a = 1/2 − t, b = √3/2, |z| = √(t² − t + 1)
    let m = (t * t - t + 1.0).sqrt();
    let re = ((m + 0.5 - t) / 2.0).sqrt();
    2.0 / (3.0 * PI).sqrt() * re / m
}

fn beta_density(a: f64, b: f64, v: f64, vc: f64) -> f64 {
    let ln_b = crate::specfun::ln_gamma(a).unwrap_or(f64::NAN) + crate::specfun::ln_gamma(b).unwrap_or(f64::NAN)
        - crate::specfun::ln_gamma(a + b).unwrap_or(f64::NAN);
    ((a - 1.0) * v.ln() + (b - 1.0) * vc.ln() - ln_b).exp()
}

fn g_alpha(alpha: f64, t: f64) -> f64 {
    let u = t.powf(-alpha);
    (1.0 - alpha) * u * (-u).exp() * rgamma(2.0 - 1.0 / alpha)
}

fn tilde_g_alpha(alpha: f64, t: f64) -> Result<f64> {
    let n = n_alpha(alpha)? as f64;
    Ok((1.0 - n * alpha) * t.powf(-n * alpha) * (-t.powf(-alpha)).exp() * rgamma(n + 1.0 - 1.0 / alpha))
}

fn is_reciprocal_integer(alpha: f64) -> bool {
    n_alpha(alpha).map(|n| alpha == 1.0 / n as f64).unwrap_or(false)
}

impl DensitySpec {
    /// Checks the kind's parameter constraints.
    pub fn validate(&self) -> Result<()> {
        use DensitySpec::*;
        match self {
            FAlpha(a) | FHat(a) | ExaDensity(a) => unit_alpha(*a),
            TAlpha(a) => need(*a > 1.0 && *a <= 2.0, "alpha must lie in (1, 2]", *a),
            EaxxDensity(a) | UPowDensity(a) | UPowSizeBias(a) => upper_alpha(*a),
            TildeFAlpha(a) | HTildeAlpha(a) => need(*a > 0.0 && *a <= 0.5, "alpha must lie in (0, 1/2]", *a),
            HAlphaBeta { alpha, beta } => {
                unit_alpha(*alpha)?;
                need(beta.is_finite(), "beta must be finite", *beta)
            }
            HankelBracket { alpha, beta } => {
                need(*alpha > 0.0 && *alpha < 2.0, "alpha must lie in (0, 2)", *alpha)?;
                need(*beta > 0.0 && *beta < 2.0, "beta must lie in (0, 2)", *beta)
            }
            GAlpha(a) | HAlpha(a) => need(*a > 0.5 && *a < 1.0, "alpha must lie in (1/2, 1)", *a),
            TildeGAlpha(a) => {
                need(*a > 0.0 && *a < 0.5, "alpha must lie in (0, 1/2)", *a)?;
                need(!is_reciprocal_integer(*a), "alpha must not be the reciprocal of an integer", *a)
            }
            Remark2Line1 | Remark2Line3 | Zero => Ok(()),
            MonomialSum(terms) => {
                for &(c, g) in terms {
                    need(c.is_finite() && g.is_finite(), "monomial terms must be finite", c)?;
                }
                Ok(())
            }
            BetaKernel { a, b } => {
                need(*a > 0.0, "Beta parameter a must be positive", *a)?;
                need(*b > 0.0, "Beta parameter b must be positive", *b)
            }
            GammaDensity(c) => need(*c > 0.0, "Gamma shape must be positive", *c),
            PointMass { at, weight } => {
                need(*at > 0.0, "point mass location must be positive", *at)?;
                need(weight.is_finite(), "point mass weight must be finite", *weight)
            }
            Scaled { factor, inner } => {
                need(factor.is_finite(), "factor must be finite", *factor)?;
                inner.validate()
            }
            Composite { prefactor, kernel, base } => {
                need(prefactor.is_finite(), "prefactor must be finite", *prefactor)?;
                if !matches!(**kernel, BetaKernel { .. } | PointMass { .. }) {
                    return Err(Error::Parameter("composite kernels must be Beta kernels or point masses".into()));
                }
                kernel.validate()?;
                base.validate()
            }
            Sum(parts) => parts.iter().try_for_each(|p| p.validate()),
        }
    }

    pub fn normalization(&self) -> Normalization {
        use DensitySpec::*;
        match self {
            TAlpha(_) | UPowDensity(_) | UPowSizeBias(_) | BetaKernel { .. } | GammaDensity(_) => {
                Normalization::Probability
            }
            PointMass { weight, .. } if *weight == 1.0 => Normalization::Probability,
            PointMass { weight, .. } if *weight >= 0.0 => Normalization::SigmaFinite,
            FAlpha(_) | FHat(_) | ExaDensity(_) | EaxxDensity(_) | TildeFAlpha(_) | GAlpha(_) | TildeGAlpha(_)
            | Remark2Line3 | HAlpha(_) | HTildeAlpha(_) | Zero => Normalization::SigmaFinite,
            HAlphaBeta { alpha, beta } if *beta <= alpha.min(1.0 - alpha) => Normalization::SigmaFinite,
            MonomialSum(t) if t.iter().all(|&(c, _)| c >= 0.0) => Normalization::SigmaFinite,
            Scaled { factor, inner } if *factor >= 0.0 => nonneg(inner.normalization()),
            Composite { prefactor, kernel, base } if *prefactor >= 0.0 => {
                match (kernel.normalization(), base.normalization()) {
                    (Normalization::Signed, _) | (_, Normalization::Signed) => Normalization::Signed,
                    _ => Normalization::SigmaFinite,
                }
            }
            Sum(parts) if parts.iter().all(|p| p.normalization() != Normalization::Signed) => {
                Normalization::SigmaFinite
            }
            _ => Normalization::Signed,
        }
    }

    /// Whether the spec has a pointwise density everywhere in its tree.
    pub fn is_evaluable(&self) -> bool {
        use DensitySpec::*;
        match self {
            HAlpha(_) => false,
            HTildeAlpha(a) => is_reciprocal_integer(*a),
            PointMass { .. } => false,
            Scaled { inner, .. } => inner.is_evaluable(),
            Composite { kernel, base, .. } => {
                matches!(**kernel, PointMass { .. }) && base.is_evaluable() || kernel.is_evaluable() && base.is_evaluable()
            }
            Sum(parts) => parts.iter().all(|p| p.is_evaluable()),
            _ => true,
        }
    }

    /// Support (lo, hi) of the density.
    pub fn support(&self) -> (f64, f64) {
        match self {
            DensitySpec::BetaKernel { .. } => (0.0, 1.0),
            DensitySpec::PointMass { at, .. } => (*at, *at),
            DensitySpec::Composite { kernel, base, .. } => {
                let (a, b) = kernel.support();
                let (c, d) = base.support();
                (a * c, b * d)
            }
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Power-law order γ with f(t) ~ t^γ as t → 0, when there is one.
    pub fn exponent_at_zero(&self) -> Option<f64> {
        use DensitySpec::*;
        match self {
            FAlpha(a) | ExaDensity(a) | TAlpha(a) | EaxxDensity(a) | UPowDensity(a) => Some(a - 1.0),
            HAlphaBeta { alpha, .. } => Some(alpha - 1.0),
            FHat(a) | UPowSizeBias(a) => Some(*a),
            TildeFAlpha(a) => {
                let n = n_alpha(*a).ok()? as f64;
                Some((a - 1.0).min(-a * (n - 1.0)))
            }
            HankelBracket { alpha, beta } => Some((alpha - beta).min(1.0 - beta)),
            Remark2Line1 => Some(-0.5),
            Remark2Line3 => Some(0.0),
            BetaKernel { a, .. } => Some(a - 1.0),
            GammaDensity(c) => Some(c - 1.0),
            MonomialSum(t) => t.iter().map(|&(_, g)| -g).reduce(f64::min),
            _ => None,
        }
    }

    /// Pointwise value of the density.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.validate()?;
        let (lo, hi) = self.support();
        if !(t > 0.0 && t.is_finite()) || t < lo || t > hi {
            return Err(Error::Domain(format!("t = {t} outside the support ({lo}, {hi})")));
        }
        self.eval_unchecked(t)
    }

    fn eval_unchecked(&self, t: f64) -> Result<f64> {
        use DensitySpec::*;
        let v = match self {
            FAlpha(a) => f_alpha(*a, t),
            FHat(a) => sinpi(*a) * t.powf(*a) / (PI * denom(*a, t)),
            ExaDensity(a) => sinpi(*a) * t.powf(a - 1.0) / (PI * denom(*a, t)),
            TAlpha(a) if *a == 2.0 => return Err(Error::NotEvaluable("the point mass T_2")),
            TAlpha(a) => -sinpi(*a) * t.powf(a - 1.0) * (1.0 + t) / (PI * denom(*a, t)),
            EaxxDensity(a) => -sinpi(*a) * t.powf(a - 1.0) / (PI * denom(*a, t)),
            UPowDensity(a) => -a * sinpi(*a) * t.powf(a - 1.0) / (PI * (a - 1.0) * denom(*a, t)),
            UPowSizeBias(a) => -a * sinpi(*a) * t.powf(*a) / (PI * denom(*a, t)),
            TildeFAlpha(a) => tilde_f_alpha(*a, t)?,
            HAlphaBeta { alpha, beta } => h_alpha_beta(*alpha, *beta, t),
            HankelBracket { alpha, beta } => hankel_bracket(*alpha, *beta, t),
            GAlpha(a) => g_alpha(*a, t),
            TildeGAlpha(a) => tilde_g_alpha(*a, t)?,
            Remark2Line1 => (1.0 - t * t) / (t.sqrt() * (t * t * t + 1.0)),
            Remark2Line3 => remark2_line3(t),
            MonomialSum(terms) => terms.iter().map(|&(c, g)| c * t.powf(-g)).sum(),
            BetaKernel { a, b } => {
                if t >= 1.0 {
                    0.0
                } else {
                    beta_density(*a, *b, t, 1.0 - t)
                }
            }
            GammaDensity(c) => ((c - 1.0) * t.ln() - t).exp() * rgamma(*c),
            Zero => 0.0,
            HTildeAlpha(a) if is_reciprocal_integer(*a) => 0.0,
            HAlpha(_) => return Err(Error::NotEvaluable("h_alpha")),
            HTildeAlpha(_) => return Err(Error::NotEvaluable("the tilde h_alpha")),
            PointMass { .. } => return Err(Error::NotEvaluable("a point mass")),
            Scaled { factor, inner } => factor * inner.eval_unchecked(t)?,
            Composite { prefactor, kernel, base } => prefactor * kernel_conv(kernel, base, t, &QuadratureConfig::default())?,
            Sum(parts) => {
                let mut s = 0.0;
                for p in parts {
                    s += p.eval_unchecked(t)?;
                }
                s
            }
        };
        Ok(v)
    }

    /// The Mellin strip of the spec, or None when it is empty.
    pub fn mellin_strip(&self) -> Option<MellinStrip> {
        use DensitySpec::*;
        let s = |lo: f64, hi: f64| (lo < hi).then_some(MellinStrip { lo, hi });
        match self {
            FAlpha(a) | HAlphaBeta { alpha: a, .. } | HAlpha(a) => s(-a, a - 1.0),
            FHat(a) | UPowSizeBias(a) => s(-a - 1.0, a - 1.0),
            ExaDensity(a) | EaxxDensity(a) | UPowDensity(a) => s(-a, *a),
            TAlpha(a) if *a == 2.0 => Some(MellinStrip::ALL),
            TAlpha(a) => s(-a, a - 2.0),
            TildeFAlpha(a) | HTildeAlpha(a) => {
                let n = n_alpha(*a).ok()? as f64;
                s(-a, n * a - 1.0)
            }
            HankelBracket { alpha, beta } => {
                let at_inf = (-beta).max(1.0 - alpha - beta);
                s(-1.0 - (alpha - beta).min(1.0 - beta), -1.0 - at_inf)
            }
            GAlpha(a) => s(f64::NEG_INFINITY, a - 1.0),
            TildeGAlpha(a) => {
                let n = n_alpha(*a).ok()? as f64;
                s(f64::NEG_INFINITY, n * a - 1.0)
            }
            Remark2Line1 => s(-0.5, 0.5),
            Remark2Line3 => s(-1.0, 0.5),
            MonomialSum(t) if t.is_empty() => Some(MellinStrip::ALL),
            MonomialSum(_) => None,
            BetaKernel { a, .. } => s(-a, f64::INFINITY),
            GammaDensity(c) => s(-c, f64::INFINITY),
            PointMass { .. } | Zero => Some(MellinStrip::ALL),
            Scaled { inner, .. } => inner.mellin_strip(),
            Composite { kernel, base, .. } => kernel.mellin_strip()?.intersect(base.mellin_strip()?),
            Sum(parts) => parts
                .iter()
                .try_fold(MellinStrip::ALL, |acc, p| acc.intersect(p.mellin_strip()?)),
        }
    }
}

fn nonneg(n: Normalization) -> Normalization {
    match n {
        Normalization::Signed => Normalization::Signed,
        _ => Normalization::SigmaFinite,
    }
}

/// (kernel ⊙ base)(t) for a kernel supported in (0, 1].
fn kernel_conv(kernel: &DensitySpec, base: &DensitySpec, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    match kernel {
        DensitySpec::PointMass { at, weight } => Ok(weight * base.eval_unchecked(t / at)? / at),
        DensitySpec::BetaKernel { a, b } => {
            let (a, b) = (*a, *b);
            // base(t/v) vanishes unless v > t/sup(base)
            let vlo = (t / base.support().1).min(1.0);
            if vlo >= 1.0 {
                return Ok(0.0);
            }
            let width = 1.0 - vlo;
            let failure = std::cell::RefCell::new(None);
            let est = quad::unit_interval(
                |w, wc| {
                    let (v, vc) = (vlo + width * w, width * wc);
                    match base.eval_unchecked(t / v) {
                        Ok(f) if f != 0.0 => beta_density(a, b, v, vc) * f / v,
                        Ok(_) => 0.0,
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            0.0
                        }
                    }
                },
                cfg,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            Ok(est?.value * width)
        }
        _ => Err(Error::Parameter("composite kernels must be Beta kernels or point masses".into())),
    }
}

/// (f ⊙ g)(x) = ∫ f(t) g(x/t) dt/t.
pub fn mconv(f: &DensitySpec, g: &DensitySpec, x: f64) -> Result<f64> {
    mconv_with(f, g, x, &QuadratureConfig::default())
}

pub fn mconv_with(f: &DensitySpec, g: &DensitySpec, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    f.validate()?;
    g.validate()?;
    need(x > 0.0 && x.is_finite(), "x must be positive", x)?;
    if matches!(f, DensitySpec::BetaKernel { .. } | DensitySpec::PointMass { .. }) {
        return kernel_conv(f, g, x, cfg);
    }
    if matches!(g, DensitySpec::BetaKernel { .. } | DensitySpec::PointMass { .. }) {
        return kernel_conv(g, f, x, cfg);
    }
    let (flo, fhi) = f.support();
    let (glo, ghi) = g.support();
    // t must satisfy flo < t < fhi and glo < x/t < ghi.
    let lo = flo.max(if ghi.is_finite() { x / ghi } else { 0.0 });
    let hi = fhi.min(if glo > 0.0 { x / glo } else { f64::INFINITY });
    if !(lo < hi) {
        return Ok(0.0);
    }
    let integrand = |t: f64| -> f64 {
        match (f.eval_unchecked(t), g.eval_unchecked(x / t)) {
            (Ok(a), Ok(b)) => a * b / t,
            _ => f64::NAN,
        }
    };
    let est = if lo == 0.0 && hi.is_infinite() {
        quad::half_line_centered(integrand, x.sqrt(), cfg)?
    } else if hi.is_infinite() {
        quad::half_line(|u| integrand(lo + u), cfg)?
    } else {
        quad::finite(integrand, lo, hi, cfg)?
    };
    Ok(est.value)
}

/// ∫₀^∞ e^{−xt} f(t) dt for any spec, with composites handled by the kernel
/// swap ∫ k(v) L_base(xv) dv and monomials in closed form.
pub fn laplace(spec: &DensitySpec, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    spec.validate()?;
    need(x > 0.0 && x.is_finite(), "x must be positive", x)?;
    laplace_inner(spec, x, cfg)
}

fn laplace_inner(spec: &DensitySpec, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    use DensitySpec::*;
    match spec {
        Zero => Ok(0.0),
        TAlpha(a) if *a == 2.0 => Ok((-x).exp()),
        PointMass { at, weight } => Ok(weight * (-x * at).exp()),
        MonomialSum(terms) => {
            let mut s = 0.0;
            for &(c, g) in terms {
                if !(g < 1.0) {
                    return Err(Error::Domain(format!("t^-{g} has no Laplace transform")));
                }
                s += c * gamma(1.0 - g) * x.powf(g - 1.0);
            }
            Ok(s)
        }
        Scaled { factor, inner } => Ok(factor * laplace_inner(inner, x, cfg)?),
        Sum(parts) => {
            let mut s = 0.0;
            for p in parts {
                s += laplace_inner(p, x, cfg)?;
            }
            Ok(s)
        }
        HTildeAlpha(a) if is_reciprocal_integer(*a) => Ok(0.0),
        HAlpha(_) => Err(Error::NotEvaluable("h_alpha")),
        HTildeAlpha(_) => Err(Error::NotEvaluable("the tilde h_alpha")),
        Composite { prefactor, kernel, base } => {
            let inner_cfg = QuadratureConfig {
                rel_tol: (cfg.rel_tol * 0.1).max(1e-13),
                ..*cfg
            };
            let v = match &**kernel {
                PointMass { at, weight } => weight * laplace_inner(base, x * at, &inner_cfg)?,
                BetaKernel { a, b } => {
                    let (a, b) = (*a, *b);
                    let failure = RefCell::new(None);
                    let est = quad::unit_interval(
                        |v, vc| match laplace_inner(base, x * v, &inner_cfg) {
                            Ok(l) => beta_density(a, b, v, vc) * l,
                            Err(e) => {
                                failure.borrow_mut().get_or_insert(e);
                                0.0
                            }
                        },
                        &QuadratureConfig {
                            endpoint_exponent_hint: None,
                            ..*cfg
                        },
                    );
                    if let Some(e) = failure.into_inner() {
                        return Err(e);
                    }
                    est?.value
                }
                _ => unreachable!("validated"),
            };
            Ok(prefactor * v)
        }
        _ => {
            let hint = spec.exponent_at_zero();
            let c = QuadratureConfig {
                endpoint_exponent_hint: hint,
                ..*cfg
            };
            let failure = RefCell::new(None);
            let est = quad::half_line_centered(
                |t| match spec.eval_unchecked(t) {
                    Ok(f) => (-x * t).exp() * f,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                },
                1.0 / x,
                &c,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            Ok(est?.value)
        }
    }
}

/// ∫₀^∞ f(t)/(s + t) dt.
pub fn stieltjes(spec: &DensitySpec, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    spec.validate()?;
    need(s > 0.0 && s.is_finite(), "s must be positive", s)?;
    let c = QuadratureConfig {
        endpoint_exponent_hint: spec.exponent_at_zero(),
        ..*cfg
    };
    let est = quad::half_line_centered(|t| spec.eval_unchecked(t).unwrap_or(f64::NAN) / (s + t), s, &c)?;
    Ok(est.value)
}

/// ∫₀^∞ t^s f(t) dt by quadrature.
pub fn mellin(spec: &DensitySpec, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    spec.validate()?;
    let strip = spec
        .mellin_strip()
        .ok_or_else(|| Error::Domain("the Mellin transform is nowhere finite".into()))?;
    strip.check(s)?;
    match spec {
        DensitySpec::PointMass { at, weight } => return Ok(weight * at.powf(s)),
        DensitySpec::TAlpha(a) if *a == 2.0 => return Ok(1.0),
        DensitySpec::Zero => return Ok(0.0),
        _ => {}
    }
    if !spec.is_evaluable() {
        return Err(Error::NotEvaluable("a Mellin-only density"));
    }
    let c = QuadratureConfig {
        endpoint_exponent_hint: spec.exponent_at_zero().map(|g| g + s),
        ..*cfg
    };
    let (lo, hi) = spec.support();
    let est = if let DensitySpec::BetaKernel { a, b } = spec {
        quad::unit_interval(|v, vc| v.powf(s) * beta_density(*a, *b, v, vc), &c)?
    } else if hi.is_finite() {
        quad::finite(|t| t.powf(s) * spec.eval_unchecked(t).unwrap_or(f64::NAN), lo, hi, &c)?
    } else {
        quad::half_line(|t| t.powf(s) * spec.eval_unchecked(t).unwrap_or(f64::NAN), &c)?
    };
    Ok(est.value)
}

/// −sin(π/α)sin(πs)/(α sin(πs/α) sin(π(s+1)/α)), the Mellin transform of f_α
/// (plain) or f̃_α (tilde) inside its strip.
pub fn mellin_closed(alpha: f64, s: f64, tilde: bool) -> Result<f64> {
    let spec = if tilde {
        need(alpha > 0.0 && alpha < 0.5, "tilde Mellin needs alpha in (0, 1/2)", alpha)?;
        DensitySpec::TildeFAlpha(alpha)
    } else {
        need(alpha > 0.5 && alpha < 1.0, "Mellin transform of f_alpha needs alpha in (1/2, 1)", alpha)?;
        DensitySpec::FAlpha(alpha)
    };
    let strip = spec.mellin_strip().expect("nonempty for these alpha");
    strip.check(s)?;
    let ratio = if s == 0.0 { alpha } else { sinpi(s) / sinpi(s / alpha) };
    Ok(-sinpi(1.0 / alpha) * ratio / (alpha * sinpi((s + 1.0) / alpha)))
}

/// Mellin transform of h_α, from f_α = f_{B_{α,1−α}} ⊙ h_α.
pub fn mellin_h_alpha(alpha: f64, s: f64) -> Result<f64> {
    let m = mellin_closed(alpha, s, false)?;
    Ok(m * gamma(1.0 + s) * gamma(alpha) * rgamma(alpha + s))
}

/// Result of the polynomial minimum search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyMin {
    pub min_value: f64,
    pub argmin: f64,
}

/// Minimum of `htilde_poly(α, β, ·)` over a log grid in [1e-6, 1e6] with local refinement.
pub fn poly_nonneg(alpha: f64, beta: f64) -> Result<PolyMin> {
    unit_alpha(alpha)?;
    need(
        beta > 0.0 && beta <= alpha.min(1.0 - alpha) + 1e-15,
        "beta must lie in (0, min(alpha, 1 - alpha)]",
        beta,
    )?;
    Ok(grid_min(|t| htilde_poly(alpha, beta, t), 1e-6, 1e6, 4096))
}

fn grid_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> PolyMin {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / (n - 1) as f64;
    let mut best = (f64::INFINITY, lo);
    let mut best_i = 0;
    for i in 0..n {
        let t = (llo + step * i as f64).exp();
        let v = f(t);
        if v < best.0 {
            best = (v, t);
            best_i = i;
        }
    }
    // golden-section refinement in ln t around the best node
    let mut a = llo + step * (best_i as f64 - 1.0).max(0.0);
    let mut b = llo + step * ((best_i + 1).min(n - 1) as f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c.exp()) < f(d.exp()) {
            b = d;
        } else {
            a = c;
        }
    }
    let t = (0.5 * (a + b)).exp();
    let v = f(t);
    if v < best.0 {
        best = (v, t);
    }
    PolyMin {
        min_value: best.0,
        argmin: best.1,
    }
}

/// Outcome of the threshold lemma: a t^{1+ρ} − bt + c ≥ 0 on t > 0 iff a ≥ threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaThreshold {
    pub holds: bool,
    pub threshold: f64,
    pub grid_min: f64,
    pub grid_argmin: f64,
}

pub fn lemma_threshold(a: f64, b: f64, c: f64, rho: f64) -> Result<LemmaThreshold> {
    for (name, v) in [("a", a), ("b", b), ("c", c), ("rho", rho)] {
        need(v > 0.0 && v.is_finite(), &format!("{name} must be positive"), v)?;
    }
    let threshold = (rho / c).powf(rho) * (b / (1.0 + rho)).powf(1.0 + rho);
    // the minimizer of a t^{1+ρ} − bt is (b/(a(1+ρ)))^{1/ρ}
    let t_star = (b / (a * (1.0 + rho))).powf(1.0 / rho);
    let m = grid_min(
        |t| a * t.powf(1.0 + rho) - b * t + c,
        t_star * 1e-3,
        t_star * 1e3,
        4096,
    );
    Ok(LemmaThreshold {
        holds: a >= threshold,
        threshold,
        grid_min: m.min_value,
        grid_argmin: m.argmin,
    })
}

/// Kanter's function A(φ) = [sin(αφ)^α sin((1−α)φ)^{1−α}/sin φ]^{1/(1−α)}, with
/// the complement π − φ supplied separately for accuracy near π.
pub(crate) fn kanter(alpha: f64, phi: f64, phi_c: f64) -> f64 {
    let s = (alpha * phi).sin();
    let s1 = ((1.0 - alpha) * phi).sin();
    let sp = phi_c.sin();
    ((alpha * s.ln() + (1.0 - alpha) * s1.ln() - sp.ln()) / (1.0 - alpha)).exp()
}

/// Density of the positive α-stable law with Laplace transform e^{−λ^α}.
pub fn stable_density(alpha: f64, x: f64) -> Result<f64> {
    unit_alpha(alpha)?;
    need(x > 0.0 && x.is_finite(), "x must be positive", x)?;
    let r = 1.0 / (1.0 - alpha);
    let w = x.powf(-alpha * r);
    let est = quad::unit_interval(
        |v, vc| {
            let a = kanter(alpha, PI * v, PI * vc);
            let e = w * a;
            if e > 745.0 {
                0.0
            } else {
                a * (-e).exp()
            }
        },
        &QuadratureConfig::default(),
    )?;
    Ok(alpha * r * x.powf(-r) * est.value)
}

/// ∫₀^∞ e^{−ut} g(t) dt for g_α (plain) or g̃_α (tilde).
pub fn laplace_of_g(alpha: f64, u: f64, tilde: bool) -> Result<f64> {
    laplace_of_g_with(alpha, u, tilde, &QuadratureConfig::default())
}

pub fn laplace_of_g_with(alpha: f64, u: f64, tilde: bool, cfg: &QuadratureConfig) -> Result<f64> {
    let spec = if tilde {
        DensitySpec::TildeGAlpha(alpha)
    } else {
        DensitySpec::GAlpha(alpha)
    };
    spec.validate()?;
    need(u > 0.0 && u.is_finite(), "u must be positive", u)?;
    // in ln t the essential singularity at 0 becomes a doubly exponential tail
    let est = quad::half_line_centered(
        |t| (-u * t).exp() * spec.eval_unchecked(t).unwrap_or(f64::NAN),
        1.0 / u,
        cfg,
    )?;
    Ok(est.value)
}

/// Classification of the CM regions in which a Bernstein density exists.
fn region_error(ab: AlphaBeta) -> Error {
    Error::Region {
        alpha: ab.alpha,
        beta: ab.beta,
    }
}

/// The Bernstein density of |D_{α,β}| as a symbolic spec.
pub fn compose_bernstein(ab: AlphaBeta) -> Result<DensitySpec> {
    use DensitySpec::*;
    let AlphaBeta { alpha, beta } = ab;
    if alpha == 1.0 || (alpha == 0.5 && beta == 0.5) {
        return Ok(Zero);
    }
    let beta_kernel = |a: f64, b: f64| Box::new(BetaKernel { a, b });
    if alpha > 1.0 && alpha <= 2.0 && beta >= 1.0 {
        let t = TAlpha(alpha);
        if beta == 1.0 {
            return Ok(t);
        }
        return Ok(Composite {
            prefactor: rgamma(beta),
            kernel: beta_kernel(1.0, beta - 1.0),
            base: Box::new(t),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(region_error(ab));
    }
    if beta >= alpha.max(1.0 - alpha) {
        if beta == 1.0 {
            return Ok(FAlpha(alpha));
        }
        if beta > 1.0 {
            return Ok(Composite {
                prefactor: rgamma(beta),
                kernel: beta_kernel(1.0, beta - 1.0),
                base: Box::new(FAlpha(alpha)),
            });
        }
        if alpha > 0.5 {
            let h = HAlpha(alpha);
            if beta == alpha {
                return Ok(Scaled {
                    factor: rgamma(alpha),
                    inner: Box::new(h),
                });
            }
            return Ok(Composite {
                prefactor: rgamma(beta),
                kernel: beta_kernel(alpha, beta - alpha),
                base: Box::new(h),
            });
        }
        // α ≤ 1/2, β ∈ [1−α, 1)
        let n = n_alpha(alpha)?;
        let ht = if is_reciprocal_integer(alpha) {
            Zero
        } else {
            HTildeAlpha(alpha)
        };
        let (head, first_k) = if beta == 1.0 - alpha {
            let head = match ht {
                Zero => Zero,
                h => Scaled {
                    factor: rgamma(1.0 - alpha),
                    inner: Box::new(h),
                },
            };
            (head, 2)
        } else {
            let head = match ht {
                Zero => Zero,
                h => Composite {
                    prefactor: rgamma(beta),
                    kernel: beta_kernel(1.0 - alpha, alpha + beta - 1.0),
                    base: Box::new(h),
                },
            };
            (head, 1)
        };
        let monomials: Vec<(f64, f64)> = (first_k..n)
            .map(|k| {
                let ak = alpha * k as f64;
                let second = if beta == 1.0 - alpha {
                    rgamma(alpha * (k as f64 - 1.0))
                } else {
                    rgamma(ak + beta - 1.0)
                };
                (rgamma(1.0 - ak) * second, ak)
            })
            .collect();
        let mut parts = Vec::new();
        if head != Zero {
            parts.push(head);
        }
        if !monomials.is_empty() {
            parts.push(MonomialSum(monomials));
        }
        return Ok(match parts.len() {
            0 => Zero,
            1 => parts.pop().expect("one part"),
            _ => Sum(parts),
        });
    }
    if beta <= alpha.min(1.0 - alpha) {
        return Ok(Composite {
            prefactor: rgamma(beta + 1.0),
            kernel: beta_kernel(1.0, beta),
            base: Box::new(HAlphaBeta { alpha, beta }),
        });
    }
    Err(region_error(ab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn f_half_is_inverse_sqrt() {
        for &t in &[0.1, 1.0, 7.0] {
            assert_relative_eq!(f_alpha(0.5, t), 1.0 / (PI * t.sqrt()), max_relative = 1e-15);
        }
    }

    #[test]
    fn remark2_line3_is_positive() {
        for i in 0..200 {
            let t = 1e-3 * 1.07f64.powi(i);
            assert!(remark2_line3(t) > 0.0);
        }
    }

    #[test]
    fn strips() {
        assert_eq!(DensitySpec::FAlpha(0.75).mellin_strip(), Some(MellinStrip { lo: -0.75, hi: -0.25 }));
        assert_eq!(DensitySpec::FAlpha(0.4).mellin_strip(), None);
        assert!(DensitySpec::TildeFAlpha(0.3).mellin_strip().unwrap().contains(-0.15));
        assert!(MellinStrip::new(1.0, 0.0).is_err());
    }
}
