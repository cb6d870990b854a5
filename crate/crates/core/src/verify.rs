//! Quadrature transforms, the complete-monotonicity checker, the necktie
//! classifier, and checks tying series values to Bernstein densities.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::bernstein::{self, compose_bernstein, DensitySpec};
use crate::error::{Error, Result};
use crate::mlcore::{
    big_f, d_func, inc_term, lb_big_f, ml, thmb_diff, AlphaBeta, ThmBDiff,
};
use crate::quad::{self, QuadratureConfig};
use crate::specfun::{gamma, rgamma, sinpi};

/// Strictly increasing positive abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Parameter("grid must not be empty".into()));
        }
        if points.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::Parameter("grid points must be finite and positive".into()));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter("grid points must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// n equally spaced points from a to b inclusive.
    pub fn linear(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::spaced(a, b, n, |a, b, f| a + (b - a) * f)
    }

    /// n geometrically spaced points from a to b inclusive.
    pub fn log(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Parameter(format!("log grid needs a > 0, got {a}")));
        }
        Self::spaced(a, b, n, |a, b, f| (a.ln() + (b.ln() - a.ln()) * f).exp())
    }

    fn spaced(a: f64, b: f64, n: usize, at: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        match n {
            0 => Err(Error::Parameter("grid needs at least one point".into())),
            1 if a == b => Self::new(vec![a]),
            1 => Err(Error::Parameter("a one-point grid needs a = b".into())),
            _ => {
                let mut pts: Vec<f64> = (0..n).map(|i| at(a, b, i as f64 / (n - 1) as f64)).collect();
                pts[0] = a;
                pts[n - 1] = b;
                Self::new(pts)
            }
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// ∫₀^∞ e^{−xt} spec(t) dt.
pub fn laplace_quad(spec: &DensitySpec, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    bernstein::laplace(spec, x, cfg)
}

/// ∫₀^∞ spec(t)/(s + t) dt.
pub fn stieltjes_quad(spec: &DensitySpec, s: f64) -> Result<f64> {
    bernstein::stieltjes(spec, s, &QuadratureConfig::default())
}

/// ∫₀^∞ t^s spec(t) dt inside the convergence strip.
pub fn mellin_quad(spec: &DensitySpec, s: f64) -> Result<f64> {
    bernstein::mellin(spec, s, &QuadratureConfig::default())
}

/// Where and how badly the alternating-sign pattern broke.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmWitness {
    pub x: f64,
    pub order: usize,
    /// How far (−1)^k Δᵏ fell below zero.
    pub violation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmReport {
    pub max_order_tested: usize,
    pub passed: bool,
    pub witness: Option<CmWitness>,
}

/// Relative noise floor of the undivided differences, per unit of 2^k.
pub const CM_NOISE_REL: f64 = 1e-10;

/// Step of the forward differences at x.
pub fn cm_step(x: f64) -> f64 {
    (1e-2 * x).max(1e-3)
}

/// Checks (−1)^k Δₕᵏ f(x) ≥ −tol_k for k = 0..=order at every grid point,
/// with h = max(x/100, 1e-3) and tol_k = CM_NOISE_REL·2^k·max_j |f(x + jh)|.
pub fn cm_check<F: Fn(f64) -> Result<f64>>(f: F, grid: &Grid, order: usize) -> Result<CmReport> {
    cm_check_with(f, grid, order, CM_NOISE_REL)
}

pub fn cm_check_with<F: Fn(f64) -> Result<f64>>(
    f: F,
    grid: &Grid,
    order: usize,
    noise_rel: f64,
) -> Result<CmReport> {
    if order > 10 {
        return Err(Error::Parameter(format!("cm_check order must be at most 10, got {order}")));
    }
    for &x in grid.points() {
        let h = cm_step(x);
        let mut diff = (0..=order).map(|j| f(x + j as f64 * h)).collect::<Result<Vec<f64>>>()?;
        let scale = diff.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..=order {
            if k > 0 {
                for j in 0..=order - k {
                    diff[j] = diff[j + 1] - diff[j];
                }
            }
            let signed = if k % 2 == 0 { diff[0] } else { -diff[0] };
            let tol = noise_rel * (1u64 << k) as f64 * scale;
            if signed < -tol {
                return Ok(CmReport {
                    max_order_tested: order,
                    passed: false,
                    witness: Some(CmWitness {
                        x,
                        order: k,
                        violation: -signed,
                    }),
                });
            }
        }
    }
    Ok(CmReport {
        max_order_tested: order,
        passed: true,
        witness: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictTag {
    DCm,
    DbarCm,
    ZeroFunction,
    Neither,
    NeitherOpenRegion,
}

impl VerdictTag {
    pub fn name(self) -> &'static str {
        match self {
            VerdictTag::DCm => "D_CM",
            VerdictTag::DbarCm => "Dbar_CM",
            VerdictTag::ZeroFunction => "ZeroFunction",
            VerdictTag::Neither => "Neither",
            VerdictTag::NeitherOpenRegion => "NeitherOpenRegion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NecktieVerdict {
    pub tag: VerdictTag,
    /// β (or α) lies on a region boundary within one ulp of 1.
    pub boundary: bool,
}

/// Equal within one ulp of 1: the boundaries 1 − α inherit the rounding of α.
fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= f64::EPSILON * a.abs().max(b.abs()).max(1.0)
}

fn ge(a: f64, b: f64) -> bool {
    a >= b || near(a, b)
}

fn le(a: f64, b: f64) -> bool {
    a <= b || near(a, b)
}

/// Which of D_{α,β} and D̄_{α,β} is completely monotone.
pub fn classify(ab: AlphaBeta) -> NecktieVerdict {
    let AlphaBeta { alpha: a, beta: b } = ab;
    let verdict = |tag, boundary| NecktieVerdict { tag, boundary };
    if a == 1.0 {
        return verdict(VerdictTag::ZeroFunction, false);
    }
    if a < 1.0 {
        let (hi, lo) = (a.max(1.0 - a), a.min(1.0 - a));
        let boundary = near(b, hi) || near(b, lo);
        if near(a, 0.5) && near(b, 0.5) {
            return verdict(VerdictTag::ZeroFunction, true);
        }
        if ge(b, hi) {
            return verdict(VerdictTag::DCm, boundary);
        }
        if le(b, lo) {
            return verdict(VerdictTag::DbarCm, boundary);
        }
        return verdict(VerdictTag::Neither, false);
    }
    if a <= 2.0 {
        let boundary = near(b, 1.0) || a == 2.0;
        if ge(b, 1.0) {
            return verdict(VerdictTag::DbarCm, boundary);
        }
        return verdict(VerdictTag::Neither, boundary);
    }
    if a <= 4.0 {
        return verdict(VerdictTag::NeitherOpenRegion, false);
    }
    verdict(VerdictTag::Neither, false)
}

/// Numeric sign profile of one parameter pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignScan {
    pub ab: AlphaBeta,
    pub verdict: NecktieVerdict,
    /// min D and min D̄ over the window [0.05, 5].
    pub min_d: f64,
    pub min_dbar: f64,
    /// Points where D, respectively D̄, is below −SIGN_TOL.
    pub d_witness: Option<f64>,
    pub dbar_witness: Option<f64>,
    pub consistent: bool,
}

/// Tolerance on the sign of D and D̄.
pub const SIGN_TOL: f64 = 1e-10;
/// Window on which claimed signs are checked.
pub const SIGN_WINDOW: (f64, f64) = (0.05, 5.0);
/// Range searched for sign witnesses of the Neither cells.
pub const WITNESS_RANGE: (f64, f64) = (1e-8, 1e12);

/// Evaluates the claimed sign on the window and, for Neither, searches for
/// points where D and D̄ are each negative.
pub fn sign_scan(ab: AlphaBeta) -> Result<SignScan> {
    let verdict = classify(ab);
    let window = Grid::log(SIGN_WINDOW.0, SIGN_WINDOW.1, 61)?;
    let (mut min_d, mut min_dbar) = (f64::INFINITY, f64::INFINITY);
    let (mut d_witness, mut dbar_witness) = (None, None);
    let mut note = |x: f64, d: f64| {
        min_d = min_d.min(d);
        min_dbar = min_dbar.min(-d);
        if d < -SIGN_TOL && d_witness.is_none() {
            d_witness = Some(x);
        }
        if d > SIGN_TOL && dbar_witness.is_none() {
            dbar_witness = Some(x);
        }
    };
    for &x in window.points() {
        note(x, d_func(ab, x)?);
    }
    let (min_d, min_dbar) = (min_d, min_dbar);
    if verdict.tag == VerdictTag::Neither && (d_witness.is_none() || dbar_witness.is_none()) {
        let wide = Grid::log(WITNESS_RANGE.0, WITNESS_RANGE.1, 401)?;
        for &x in wide.points() {
            let d = d_func(ab, x)?;
            if d < -SIGN_TOL && d_witness.is_none() {
                d_witness = Some(x);
            }
            if d > SIGN_TOL && dbar_witness.is_none() {
                dbar_witness = Some(x);
            }
            if d_witness.is_some() && dbar_witness.is_some() {
                break;
            }
        }
    }
    let consistent = match verdict.tag {
        VerdictTag::DCm => min_d >= -SIGN_TOL,
        VerdictTag::DbarCm => min_dbar >= -SIGN_TOL,
        VerdictTag::ZeroFunction => min_d >= -SIGN_TOL && min_dbar >= -SIGN_TOL,
        VerdictTag::Neither => d_witness.is_some() && dbar_witness.is_some(),
        VerdictTag::NeitherOpenRegion => true,
    };
    Ok(SignScan {
        ab,
        verdict,
        min_d,
        min_dbar,
        d_witness,
        dbar_witness,
        consistent,
    })
}

/// The 40×40 grid α, β ∈ {1/20, …, 2}, α-major.
pub fn necktie_grid() -> Vec<AlphaBeta> {
    let mut out = Vec::with_capacity(1600);
    for i in 1..=40 {
        for j in 1..=40 {
            out.push(AlphaBeta {
                alpha: i as f64 / 20.0,
                beta: j as f64 / 20.0,
            });
        }
    }
    out
}

/// |a − b| relative to max(|a|, |b|), zero when both vanish.
pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Laplace representations of series functions, checked pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// D_{α,1} = L[f_α], α ∈ (0,1).
    B1,
    /// e^x/α − E_α(x^α) = L[Exa density], α ∈ (0,1).
    Exa,
    /// αx^{α−1}E'_α(x^α) − e^x/α = L[f̂_α], α ∈ (0,1).
    FHat,
    /// E_α(x^α) − e^x/α = L[Eaxx density], α ∈ (1,2).
    Eaxx,
    /// E_α(x^α) − e^x/α = (1 − 1/α)E[e^{−xU}], α ∈ (1,2).
    UPow,
    /// e^x/α − αx^{α−1}E'_α(x^α) = (1/α)E[e^{−xV}] with V size-biased, α ∈ (1,2).
    SizeBias,
    /// D̄_{α,1} = L[T_α density], α ∈ (1,2].
    B2,
    /// |D_{α,β}| = L[composed density] for every pair with an evaluable composition.
    Composite,
    /// D̄_{α,β}(x) = x^{1−β}/π·L[Hankel bracket], 0 < α, β < 2.
    Bracket,
    /// D̄_{3/2,3/2}(x) = (π√x)^{−1}L[(1−t²)/(√t(t³+1))].
    Remark2Line1,
    /// D̄_{3/2,3/2} = L[2/√(3π)·Re√(e^{iπ/3} − t)/√(t²−t+1)].
    Remark2Line3,
    /// D̄_{4,1}(x) = (e^{−x} + cos x + sin x)/2.
    Dbar41,
    /// D_{α,β} against its Abel average of D_{α,α} (α > 1/2) or of D̃_{α,1−α}
    /// (α < 1/2), taken at x^{1/α}.
    Rescaled,
    /// e^{x^{1/α}}/α − E_α(x) = L[Exa density](x^{1/α}).
    Prop1,
}

impl Representation {
    pub const ALL: [Representation; 14] = [
        Representation::B1,
        Representation::Exa,
        Representation::FHat,
        Representation::Eaxx,
        Representation::UPow,
        Representation::SizeBias,
        Representation::B2,
        Representation::Composite,
        Representation::Bracket,
        Representation::Remark2Line1,
        Representation::Remark2Line3,
        Representation::Dbar41,
        Representation::Rescaled,
        Representation::Prop1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Representation::B1 => "b1",
            Representation::Exa => "Exa",
            Representation::FHat => "FHat",
            Representation::Eaxx => "Eaxx",
            Representation::UPow => "UPow",
            Representation::SizeBias => "SizeBias",
            Representation::B2 => "b2",
            Representation::Composite => "composite",
            Representation::Bracket => "bracket",
            Representation::Remark2Line1 => "remark2_line1",
            Representation::Remark2Line3 => "remark2_line3",
            Representation::Dbar41 => "Dbar41",
            Representation::Rescaled => "rescaled",
            Representation::Prop1 => "Prop1",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name().eq_ignore_ascii_case(s))
    }
}

/// One compared pair of values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub error: f64,
}

/// Maximum of the errors, NaN-propagating.
pub fn max_error(rows: &[Comparison]) -> f64 {
    rows.iter().fold(0.0, |m, c| if c.error.is_nan() || m.is_nan() { f64::NAN } else { m.max(c.error) })
}

fn need(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(what.to_string()))
    }
}

fn ab1(alpha: f64) -> Result<AlphaBeta> {
    AlphaBeta::new(alpha, 1.0)
}

/// Both sides of a representation at each grid point, series side first.
pub fn representation_rows(rep: Representation, ab: AlphaBeta, grid: &Grid) -> Result<Vec<Comparison>> {
    let cfg = QuadratureConfig::default();
    let AlphaBeta { alpha: a, beta: b } = ab;
    let unit = a > 0.0 && a < 1.0;
    let upper = a > 1.0 && a < 2.0;
    // each arm yields a pointwise pair evaluator
    let pair: Box<dyn Fn(f64) -> Result<(f64, f64)>> = match rep {
        Representation::B1 => {
            need(unit, "b1 needs alpha in (0,1)")?;
            let spec = DensitySpec::FAlpha(a);
            Box::new(move |x| Ok((d_func(ab1(a)?, x)?, laplace_quad(&spec, x, &cfg)?)))
        }
        Representation::Exa | Representation::FHat => {
            need(unit, "this representation needs alpha in (0,1)")?;
            let (spec, which) = if rep == Representation::Exa {
                (DensitySpec::ExaDensity(a), ThmBDiff::TermMinusF)
            } else {
                (DensitySpec::FHat(a), ThmBDiff::LbfMinusTerm)
            };
            Box::new(move |x| Ok((thmb_diff(ab1(a)?, x, which)?, laplace_quad(&spec, x, &cfg)?)))
        }
        Representation::Eaxx | Representation::UPow | Representation::SizeBias => {
            need(upper, "this representation needs alpha in (1,2)")?;
            let (spec, factor, which) = match rep {
                Representation::Eaxx => (DensitySpec::EaxxDensity(a), 1.0, ThmBDiff::FMinusTerm),
                Representation::UPow => (DensitySpec::UPowDensity(a), 1.0 - 1.0 / a, ThmBDiff::FMinusTerm),
                _ => (DensitySpec::UPowSizeBias(a), 1.0 / a, ThmBDiff::TermMinusLbf),
            };
            Box::new(move |x| Ok((thmb_diff(ab1(a)?, x, which)?, factor * laplace_quad(&spec, x, &cfg)?)))
        }
        Representation::B2 => {
            need(a > 1.0 && a <= 2.0, "b2 needs alpha in (1,2]")?;
            let spec = DensitySpec::TAlpha(a);
            Box::new(move |x| Ok((-d_func(ab1(a)?, x)?, laplace_quad(&spec, x, &cfg)?)))
        }
        Representation::Composite => {
            let spec = compose_bernstein(ab)?;
            if !spec.is_evaluable() {
                return Err(Error::NotEvaluable("this composition"));
            }
            let sign = if classify(ab).tag == VerdictTag::DCm { 1.0 } else { -1.0 };
            Box::new(move |x| Ok((sign * d_func(ab, x)?, laplace_quad(&spec, x, &cfg)?)))
        }
        Representation::Bracket => {
            let spec = DensitySpec::HankelBracket { alpha: a, beta: b };
            spec.validate()?;
            Box::new(move |x| {
                let rhs = x.powf(1.0 - b) / PI * laplace_quad(&spec, x, &cfg)?;
                Ok((-d_func(ab, x)?, rhs))
            })
        }
        Representation::Remark2Line1 | Representation::Remark2Line3 => {
            let line1 = rep == Representation::Remark2Line1;
            let spec = if line1 {
                DensitySpec::Remark2Line1
            } else {
                DensitySpec::Remark2Line3
            };
            let ab = AlphaBeta::new(1.5, 1.5)?;
            Box::new(move |x| {
                let l = laplace_quad(&spec, x, &cfg)?;
                let rhs = if line1 { l / (PI * x.sqrt()) } else { l };
                Ok((-d_func(ab, x)?, rhs))
            })
        }
        Representation::Dbar41 => {
            let ab = AlphaBeta::new(4.0, 1.0)?;
            Box::new(move |x| Ok((-d_func(ab, x)?, 0.5 * ((-x).exp() + x.cos() + x.sin()))))
        }
        Representation::Rescaled => {
            need(unit, "rescaled needs alpha in (0,1)")?;
            Box::new(move |x| {
                let y = x.powf(1.0 / a);
                Ok((d_func(ab, y)?, abel_average(ab, y)?))
            })
        }
        Representation::Prop1 => {
            // below 1/2 the series side cancels e^{x^{1/α}} beyond recovery on x ≤ 5
            need((0.5..1.0).contains(&a), "Prop1 needs alpha in [1/2, 1)")?;
            let spec = DensitySpec::ExaDensity(a);
            Box::new(move |x| {
                let y = x.powf(1.0 / a);
                let lhs = y.exp() / a - ml(ab1(a)?, x)?;
                Ok((lhs, laplace_quad(&spec, y, &cfg)?))
            })
        }
    };
    grid.points()
        .iter()
        .map(|&x| {
            let (lhs, rhs) = pair(x)?;
            Ok(Comparison {
                x,
                lhs,
                rhs,
                error: rel_err(lhs, rhs),
            })
        })
        .collect()
}

/// Max relative error of a representation over the grid.
pub fn verify_representation(rep: Representation, ab: AlphaBeta, grid: &Grid) -> Result<f64> {
    Ok(max_error(&representation_rows(rep, ab, grid)?))
}

/// D_{α,β}(y) rebuilt from D_{α,α} (α > 1/2, β > α), from D̃_{α,1−α}
/// (α < 1/2, β > 1−α), or from the closed form at α = 1/2.
pub fn abel_average(ab: AlphaBeta, y: f64) -> Result<f64> {
    let AlphaBeta { alpha: a, beta: b } = ab;
    if a == 0.5 {
        need(b > 0.5, "alpha = 1/2 needs beta > 1/2")?;
        return Ok(rgamma(b - 0.5) / y.sqrt());
    }
    let cfg = QuadratureConfig::default();
    let failure = RefCell::new(None);
    let keep = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let value = if a > 0.5 && a < 1.0 {
        need(b > a, "the Abel average needs beta > alpha")?;
        let daa = AlphaBeta::new(a, a)?;
        let est = quad::unit_interval(
            |t, tc| tc.powf(b - a - 1.0) * t.powf(a - 1.0) * keep(d_func(daa, y * t)),
            &cfg,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        est?.value * rgamma(b - a)
    } else if a > 0.0 && a < 0.5 {
        need(b > 1.0 - a, "the Abel average needs beta > 1 - alpha")?;
        let n = crate::mlcore::n_alpha(a)?;
        let est = quad::unit_interval(
            |t, tc| tc.powf(a + b - 2.0) * t.powf(-a) * keep(crate::mlcore::tilde_d(a, y * t)),
            &cfg,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let poly: f64 = (1..n)
            .map(|k| y.powf(a * k as f64 - 1.0) * rgamma(a * k as f64 + b - 1.0))
            .sum();
        est?.value * rgamma(a + b - 1.0) + poly
    } else {
        return Err(Error::Domain(format!("Abel average needs alpha in (0,1), got {a}")));
    };
    Ok(value)
}

/// Identities with elementary right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedIdentity {
    /// D_{1,β} ≡ 0.
    DAlphaOne,
    /// F − term and L_βF − term vanish at α = 1 (β ≥ 1).
    ThmBAlphaOne,
    /// D_{1/2,β}(x) = x^{−1/2}/Γ(β − 1/2).
    DHalf,
    /// D̄_{2,1}(x) = e^{−x}.
    Dbar21,
    /// D̄_{4,1}(x) = (e^{−x} + cos x + sin x)/2.
    Dbar41,
    /// E_{1/2}(−√x) + E_{1/2}(√x) = 2e^x.
    EHalfSum,
    /// E_{1,β}(x) = x^{1−β}e^xγ(β−1, x)/Γ(β−1).
    IncTerm,
}

impl ClosedIdentity {
    pub const ALL: [ClosedIdentity; 7] = [
        ClosedIdentity::DAlphaOne,
        ClosedIdentity::ThmBAlphaOne,
        ClosedIdentity::DHalf,
        ClosedIdentity::Dbar21,
        ClosedIdentity::Dbar41,
        ClosedIdentity::EHalfSum,
        ClosedIdentity::IncTerm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClosedIdentity::DAlphaOne => "D1",
            ClosedIdentity::ThmBAlphaOne => "thmB1",
            ClosedIdentity::DHalf => "Dhalf",
            ClosedIdentity::Dbar21 => "Dbar21",
            ClosedIdentity::Dbar41 => "Dbar41",
            ClosedIdentity::EHalfSum => "EhalfSum",
            ClosedIdentity::IncTerm => "IncTerm",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name().eq_ignore_ascii_case(s))
    }
}

/// Both sides of a closed identity; `beta` is ignored where the identity fixes it.
///
/// The identically-zero ones compare the difference against zero relative to
/// the size of the cancelling terms.
pub fn identity_rows(id: ClosedIdentity, beta: f64, grid: &Grid) -> Result<Vec<Comparison>> {
    grid.points()
        .iter()
        .map(|&x| {
            let (lhs, rhs, scale) = match id {
                ClosedIdentity::DAlphaOne => {
                    let ab = AlphaBeta::new(1.0, beta)?;
                    let (l, f) = (lb_big_f(ab, x)?, big_f(ab, x)?);
                    (l - f, 0.0, l.abs().max(f.abs()))
                }
                ClosedIdentity::ThmBAlphaOne => {
                    let ab = AlphaBeta::new(1.0, beta)?;
                    let term = inc_term(ab, x)?;
                    let (l, f) = (lb_big_f(ab, x)?, big_f(ab, x)?);
                    let worst = if (f - term).abs() > (l - term).abs() { f - term } else { l - term };
                    (worst, 0.0, term.abs().max(f.abs()).max(l.abs()))
                }
                ClosedIdentity::DHalf => {
                    let ab = AlphaBeta::new(0.5, beta)?;
                    let d = d_func(ab, x)?;
                    let c = rgamma(beta - 0.5) / x.sqrt();
                    (d, c, d.abs().max(c.abs()))
                }
                ClosedIdentity::Dbar21 => {
                    let d = -d_func(AlphaBeta::new(2.0, 1.0)?, x)?;
                    let c = (-x).exp();
                    (d, c, d.abs().max(c.abs()))
                }
                ClosedIdentity::Dbar41 => {
                    let d = -d_func(AlphaBeta::new(4.0, 1.0)?, x)?;
                    let c = 0.5 * ((-x).exp() + x.cos() + x.sin());
                    (d, c, d.abs().max(c.abs()))
                }
                ClosedIdentity::EHalfSum => {
                    let ab = AlphaBeta::new(0.5, 1.0)?;
                    let s = ml(ab, -x.sqrt())? + ml(ab, x.sqrt())?;
                    let c = 2.0 * x.exp();
                    (s, c, s.abs().max(c.abs()))
                }
                ClosedIdentity::IncTerm => {
                    let ab = AlphaBeta::new(1.0, beta)?;
                    need(beta > 1.0, "IncTerm needs beta > 1")?;
                    let e = ml(ab, x)?;
                    let c = inc_term(ab, x)?;
                    (e, c, e.abs().max(c.abs()))
                }
            };
            let error = if lhs == rhs { 0.0 } else { (lhs - rhs).abs() / scale };
            Ok(Comparison { x, lhs, rhs, error })
        })
        .collect()
}

/// Closed-form Laplace transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedLaplace {
    /// ∫e^{−sx}D_{α,1}(x)dx = (1 − s^{α−1})/(s^α − 1).
    DA1,
    /// ∫e^{−sx}(e^x/α − E_α(x^α))dx = 1/(α(s−1)) − s^{α−1}/(s^α − 1).
    ThmBA,
}

impl ClosedLaplace {
    pub fn name(self) -> &'static str {
        match self {
            ClosedLaplace::DA1 => "D_a1",
            ClosedLaplace::ThmBA => "thmB_a",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [ClosedLaplace::DA1, ClosedLaplace::ThmBA]
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

/// Radius around s = 1 inside which the closed forms are replaced by their series.
const S_ONE_RADIUS: f64 = 1e-4;

/// The closed form at s > 0, with the removable singularity at s = 1 taken
/// from the expansion in L = ln s.
pub fn closed_laplace(which: ClosedLaplace, alpha: f64, s: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("closed_laplace needs s > 0, got {s}")));
    }
    if alpha == 1.0 {
        return Ok(0.0);
    }
    let a = alpha;
    if (s - 1.0).abs() < S_ONE_RADIUS {
        let l = s.ln();
        let c = (a - 1.0) / a;
        let (c0, c1, c2) = match which {
            ClosedLaplace::DA1 => (-c, c / 2.0, c * (a - 2.0) / 12.0),
            ClosedLaplace::ThmBA => (-c / 2.0, -c * (a - 5.0) / 12.0, c * (a - 2.0) / 12.0),
        };
        return Ok(c0 + l * (c1 + l * c2));
    }
    let (sa1, sa) = (s.powf(a - 1.0), s.powf(a));
    Ok(match which {
        ClosedLaplace::DA1 => (1.0 - sa1) / (sa - 1.0),
        ClosedLaplace::ThmBA => 1.0 / (a * (s - 1.0)) - sa1 / (sa - 1.0),
    })
}

/// ∫₀^∞ e^{−sx}g(x)dx for the series function behind a closed form.
pub fn numeric_laplace(which: ClosedLaplace, alpha: f64, s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("numeric_laplace needs s > 0, got {s}")));
    }
    let ab = ab1(alpha)?;
    let hint = match which {
        ClosedLaplace::DA1 => alpha - 1.0,
        ClosedLaplace::ThmBA => 0.0,
    };
    let cfg = QuadratureConfig::new(1e-14, 1e-10, 12)?.with_hint(hint.min(0.0));
    let failure = RefCell::new(None);
    let est = quad::half_line_centered(
        |x| {
            let g = match which {
                ClosedLaplace::DA1 => d_func(ab, x),
                ClosedLaplace::ThmBA => thmb_diff(ab, x, ThmBDiff::TermMinusF),
            };
            match g {
                Ok(v) => (-s * x).exp() * v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        1.0 / s,
        &cfg,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(est?.value)
}

/// Functions claimed completely monotone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CmFamily {
    D(AlphaBeta),
    Dbar(AlphaBeta),
    ThmB(AlphaBeta, ThmBDiff),
    /// x ↦ D_{α,β}(x^{1/α}).
    Rescaled(AlphaBeta),
    /// x ↦ e^{x^{1/α}}/α − E_α(x).
    Prop1(f64),
}

impl CmFamily {
    pub fn label(&self) -> String {
        match self {
            CmFamily::D(ab) => format!("D({},{})", ab.alpha, ab.beta),
            CmFamily::Dbar(ab) => format!("Dbar({},{})", ab.alpha, ab.beta),
            CmFamily::ThmB(ab, w) => format!("{}({},{})", w.name(), ab.alpha, ab.beta),
            CmFamily::Rescaled(ab) => format!("rescaled({},{})", ab.alpha, ab.beta),
            CmFamily::Prop1(a) => format!("Prop1({a})"),
        }
    }

    /// Pointwise value. Prop1 is taken from the Laplace integral of the Exa
    /// density at x^{1/α}, which avoids the cancellation in e^{x^{1/α}}/α − E_α(x).
    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            CmFamily::D(ab) => d_func(ab, x),
            CmFamily::Dbar(ab) => Ok(-d_func(ab, x)?),
            CmFamily::ThmB(ab, w) => thmb_diff(ab, x, w),
            CmFamily::Rescaled(ab) => d_func(ab, x.powf(1.0 / ab.alpha)),
            CmFamily::Prop1(a) => {
                need(a > 0.0 && a < 1.0, "Prop1 needs alpha in (0,1)")?;
                laplace_quad(&DensitySpec::ExaDensity(a), x.powf(1.0 / a), &QuadratureConfig::default())
            }
        }
    }
}

/// cm_check of a family.
pub fn cm_check_family(family: &CmFamily, grid: &Grid, order: usize) -> Result<CmReport> {
    cm_check(|x| family.eval(x), grid, order)
}

/// Both sides of the three-factor Mellin identity for f_α = f_{B_{α,1−α}} ⊙ h_α:
/// the Mellin transform of h_α against the product of the closed moments of
/// Z_α, X_α and Γ_{1/α}^{1/α} ⊙ g_α, each from its own formula.
pub fn three_factor_mellin(alpha: f64, s: f64) -> Result<(f64, f64)> {
    let lhs = bernstein::mellin_h_alpha(alpha, s)?;
    let z = gamma(1.0 - s / alpha) * rgamma(1.0 - s);
    let x = gamma(1.0 + s / alpha) * gamma(alpha) * rgamma(alpha + s);
    let gamma_moment = gamma((1.0 + s) / alpha) * rgamma(1.0 / alpha);
    let g = (1.0 - alpha) * gamma(1.0 - (1.0 + s) / alpha) * rgamma(2.0 - 1.0 / alpha) / alpha;
    let direct = -sinpi(1.0 / alpha) / sinpi((s + 1.0) / alpha);
    if rel_err(gamma_moment * g, direct) > 1e-10 {
        return Err(Error::Domain(format!("third factor inconsistent at s = {s}")));
    }
    Ok((lhs, z * x * gamma_moment * g))
}
