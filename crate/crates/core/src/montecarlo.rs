//! Seeded samplers for the random variables of the stable-law factorizations,
//! and Monte Carlo checks of the Laplace-transform identities they satisfy.
//!
//! Notation: Z_α is positive α-stable with E[e^{−λZ_α}] = e^{−λ^α} (Z_1 = 1),
//! B_{a,b} and Γ_c are Beta and Gamma variables, L is unit exponential, and
//! products are of independent factors.

use std::f64::consts::PI;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Beta, Distribution, Exp1, Gamma};

use crate::bernstein::{kanter, laplace_of_g_with};
use crate::error::{Error, Result};
use crate::mlcore::{d_func, ml, thmb_diff, AlphaBeta, ThmBDiff};
use crate::quad::QuadratureConfig;
use crate::specfun::{gamma, rgamma, CompensatedSum};
use crate::verify::{closed_laplace, numeric_laplace, ClosedLaplace, CmFamily, Grid};

/// Default seed, overridable from the command line.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
/// Largest batch accepted by `sample`.
pub const MAX_SAMPLES: usize = 100_000_000;

/// Generator seed: distinct (value, stream) pairs give independent ChaCha20 streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub value: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(value: u64, stream: u64) -> Self {
        Self { value, stream }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.value);
        rng.set_stream(self.stream);
        rng
    }

    /// The k-th stream after this one.
    pub fn offset(&self, k: u64) -> Self {
        Self {
            value: self.value,
            stream: self.stream.wrapping_add(k),
        }
    }
}

impl Default for Seed {
    fn default() -> Self {
        Self::new(DEFAULT_SEED, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplerSpec {
    /// Z_α, α ∈ (0,1).
    Stable(f64),
    Beta(f64, f64),
    Gamma(f64),
    /// U^p.
    UniformPow(f64),
    /// X_{p,q} with E[X^s] = Γ(1+s/α)Γ(α)/Γ(α+s), α = p/q.
    XRational(u32, u32),
    /// Y_α = Z_α × X_α × Γ_{1/α}^{1/α}, α = p/q.
    YAlpha(u32, u32),
    /// (Z_γ/Z′_γ)^γ, γ ∈ (0,1].
    RatioPow(f64),
    /// (Z_{(1−α)/α}/Z_{1−α})^{1−α}, α ∈ [1/2, 1).
    WAlpha(f64),
    /// L^{1/α} × Z_α, α ∈ (0,1].
    ML(f64),
    /// Z_α^{−α}, α ∈ (0,1).
    MAlpha(f64),
}

fn bad(msg: String) -> Error {
    Error::Parameter(msg)
}

fn check_rational(p: u32, q: u32) -> Result<()> {
    if !(p >= 1 && q > p && q <= 12) {
        return Err(bad(format!("rational alpha = p/q needs 1 <= p < q <= 12, got {p}/{q}")));
    }
    Ok(())
}

impl SamplerSpec {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |a: f64, what: &str| {
            if a > 0.0 && a < 1.0 {
                Ok(())
            } else {
                Err(bad(format!("{what} needs alpha in (0,1), got {a}")))
            }
        };
        match *self {
            SamplerSpec::Stable(a) => open_unit(a, "Stable"),
            SamplerSpec::MAlpha(a) => open_unit(a, "MAlpha"),
            SamplerSpec::Beta(a, b) if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() => Ok(()),
            SamplerSpec::Beta(a, b) => Err(bad(format!("Beta needs positive parameters, got ({a}, {b})"))),
            SamplerSpec::Gamma(c) if c > 0.0 && c.is_finite() => Ok(()),
            SamplerSpec::Gamma(c) => Err(bad(format!("Gamma needs a positive shape, got {c}"))),
            SamplerSpec::UniformPow(p) if p > 0.0 && p.is_finite() => Ok(()),
            SamplerSpec::UniformPow(p) => Err(bad(format!("UniformPow needs p > 0, got {p}"))),
            SamplerSpec::XRational(p, q) | SamplerSpec::YAlpha(p, q) => check_rational(p, q),
            SamplerSpec::RatioPow(g) if g > 0.0 && g <= 1.0 => Ok(()),
            SamplerSpec::RatioPow(g) => Err(bad(format!("RatioPow needs gamma in (0,1], got {g}"))),
            SamplerSpec::WAlpha(a) if (0.5..1.0).contains(&a) => Ok(()),
            SamplerSpec::WAlpha(a) => Err(bad(format!("WAlpha needs alpha in [1/2,1), got {a}"))),
            SamplerSpec::ML(a) if a > 0.0 && a <= 1.0 => Ok(()),
            SamplerSpec::ML(a) => Err(bad(format!("ML needs alpha in (0,1], got {a}"))),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            SamplerSpec::Stable(a) => stable(a, rng),
            SamplerSpec::Beta(a, b) => Beta::new(a, b).expect("validated").sample(rng),
            SamplerSpec::Gamma(c) => Gamma::new(c, 1.0).expect("validated").sample(rng),
            SamplerSpec::UniformPow(p) => rng.sample::<f64, _>(Open01).powf(p),
            SamplerSpec::XRational(p, q) => x_rational(p, q, rng),
            SamplerSpec::YAlpha(p, q) => {
                let a = p as f64 / q as f64;
                let g: f64 = Gamma::new(1.0 / a, 1.0).expect("positive").sample(rng);
                stable(a, rng) * x_rational(p, q, rng) * g.powf(1.0 / a)
            }
            SamplerSpec::RatioPow(g) => ratio_pow(g, rng),
            SamplerSpec::WAlpha(a) => {
                let z1 = stable(((1.0 - a) / a).min(1.0), rng);
                let z2 = stable(1.0 - a, rng);
                (z1 / z2).powf(1.0 - a)
            }
            SamplerSpec::ML(a) => {
                let l: f64 = rng.sample(Exp1);
                l.powf(1.0 / a) * stable(a, rng)
            }
            SamplerSpec::MAlpha(a) => stable(a, rng).powf(-a),
        }
    }
}

/// Z_α by Kanter's construction (A(U)/L)^{(1−α)/α}, U uniform on (0, π); Z_1 = 1.
fn stable<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    if alpha == 1.0 {
        return 1.0;
    }
    let v: f64 = rng.sample(Open01);
    let l: f64 = rng.sample(Exp1);
    let a = kanter(alpha, PI * v, PI * (1.0 - v));
    (a / l).powf((1.0 - alpha) / alpha)
}

fn ratio_pow<R: Rng>(g: f64, rng: &mut R) -> f64 {
    let z1 = stable(g, rng);
    let z2 = stable(g, rng);
    (z1 / z2).powf(g)
}

/// (q^{q/p}/p) × (Π_{i=2}^{p} B_{i/q,(i−1)(1/p−1/q)} × Π_{j=p+1}^{q} Γ_{j/q})^{1/p}.
fn x_rational<R: Rng>(p: u32, q: u32, rng: &mut R) -> f64 {
    let (pf, qf) = (p as f64, q as f64);
    let mut prod = 1.0;
    for i in 2..=p {
        let i = i as f64;
        prod *= Beta::new(i / qf, (i - 1.0) * (1.0 / pf - 1.0 / qf))
            .expect("positive")
            .sample(rng);
    }
    for j in p + 1..=q {
        let g: f64 = Gamma::new(j as f64 / qf, 1.0).expect("positive").sample(rng);
        prod *= g;
    }
    qf.powf(qf / pf) / pf * prod.powf(1.0 / pf)
}

/// n i.i.d. draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub n: usize,
    pub values: Vec<f64>,
    pub seed: Seed,
}

pub fn sample(spec: SamplerSpec, n: usize, seed: Seed) -> Result<SampleBatch> {
    spec.validate()?;
    if n == 0 || n > MAX_SAMPLES {
        return Err(bad(format!("sample size must lie in [1, {MAX_SAMPLES}], got {n}")));
    }
    let mut rng = seed.rng();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let v = spec.draw(&mut rng);
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{spec:?} produced the non-positive or infinite draw {v}")));
        }
        values.push(v);
    }
    Ok(SampleBatch { n, values, seed })
}

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Mean and standard error of the mean.
pub fn mean_se<I: IntoIterator<Item = f64>>(values: I) -> MeanEstimate {
    let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
    for v in values {
        n += 1;
        let d = v - mean;
        mean += d / n as f64;
        m2 += d * (v - mean);
    }
    let std_error = if n > 1 {
        (m2 / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    MeanEstimate {
        estimate: mean,
        std_error,
    }
}

/// Mean of e^{−λX} over the batch.
pub fn empirical_laplace(batch: &SampleBatch, lambda: f64) -> Result<MeanEstimate> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be non-negative, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(MeanEstimate {
            estimate: 1.0,
            std_error: 0.0,
        });
    }
    Ok(mean_se(batch.values.iter().map(|v| (-lambda * v).exp())))
}

/// Distributional identities checked by Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McIdentity {
    /// E[e^{−λZ_α}] = e^{−λ^α}.
    StableLT(f64),
    /// E[e^{−λML_α}] = 1/(1 + λ^α).
    MLLT(f64),
    /// E[e^{−λM̃L_α}] = (λ^{α−1} − 1)/(λ^α − 1), α ∈ (1,2], against the Laplace
    /// integral of D̄_{α,1}.
    ML2LT(f64),
    /// E_α(−λ) = E[e^{−λM_α}].
    Pollard(f64),
    /// E_{α,α}(−λ) = αE[M_α e^{−λM_α}].
    SizeBias(f64),
    /// M_α =d B_{α,1−α}^α × M̃_α, compared through Laplace transforms.
    MABFactor(f64),
    /// D̄_{α,β}(x) = Γ(β)^{−1}E[e^{−x B_{1,β−1}T_α}].
    Sabb(f64, f64),
    /// e^x/α − E_α(x^α) = (1/α − 1)E[e^{−xU_{1−α}^{1/α}}].
    Exx(f64),
    /// E_α(x^α) − e^x/α = (1 − 1/α)E[e^{−xU_{α−1}^{1/α}}].
    Eaxx(f64),
    /// e^{x^{1/α}}/α − E_α(x) = (1/α − 1)E[e^{−xW_α}].
    Prop1(f64),
    /// D_{α,α}(x) = Γ(α)^{−1}E[Lg_α(xY_α)], α = p/q.
    FactorDaa(u32, u32),
    /// E[X_{p,q}] = Γ(1 + q/p)Γ(p/q)/Γ(p/q + 1).
    XMean(u32, u32),
}

impl McIdentity {
    pub fn name(&self) -> &'static str {
        match self {
            McIdentity::StableLT(_) => "StableLT",
            McIdentity::MLLT(_) => "MLLT",
            McIdentity::ML2LT(_) => "ML2LT",
            McIdentity::Pollard(_) => "Pollard",
            McIdentity::SizeBias(_) => "SizeBias",
            McIdentity::MABFactor(_) => "MABFactor",
            McIdentity::Sabb(..) => "Sabb",
            McIdentity::Exx(_) => "Exx",
            McIdentity::Eaxx(_) => "Eaxx",
            McIdentity::Prop1(_) => "Prop1",
            McIdentity::FactorDaa(..) => "Factor_daa",
            McIdentity::XMean(..) => "XMean",
        }
    }

    /// Builds an identity from its name; `alpha` is p/q for the rational ones
    /// (denominator at most 12) and `beta` is used by Sabb only.
    pub fn parse(name: &str, alpha: f64, beta: f64) -> Result<Self> {
        let n = name.to_ascii_lowercase();
        Ok(match n.as_str() {
            "stablelt" => McIdentity::StableLT(alpha),
            "mllt" => McIdentity::MLLT(alpha),
            "ml2lt" => McIdentity::ML2LT(alpha),
            "pollard" => McIdentity::Pollard(alpha),
            "sizebias" => McIdentity::SizeBias(alpha),
            "mabfactor" => McIdentity::MABFactor(alpha),
            "sabb" => McIdentity::Sabb(alpha, beta),
            "exx" => McIdentity::Exx(alpha),
            "eaxx" => McIdentity::Eaxx(alpha),
            "prop1" => McIdentity::Prop1(alpha),
            "factor_daa" | "xmean" => {
                let (p, q) = as_rational(alpha)?;
                if n == "xmean" {
                    McIdentity::XMean(p, q)
                } else {
                    McIdentity::FactorDaa(p, q)
                }
            }
            _ => return Err(bad(format!("unknown Monte Carlo identity '{name}'"))),
        })
    }

    /// Parameter label for reports.
    pub fn params(&self) -> String {
        match *self {
            McIdentity::Sabb(a, b) => format!("{a};{b}"),
            McIdentity::FactorDaa(p, q) | McIdentity::XMean(p, q) => format!("{p}/{q}"),
            McIdentity::StableLT(a)
            | McIdentity::MLLT(a)
            | McIdentity::ML2LT(a)
            | McIdentity::Pollard(a)
            | McIdentity::SizeBias(a)
            | McIdentity::MABFactor(a)
            | McIdentity::Exx(a)
            | McIdentity::Eaxx(a)
            | McIdentity::Prop1(a) => format!("{a}"),
        }
    }
}

/// The fraction p/q with q ≤ 12 equal to x up to 1e-12.
pub fn as_rational(x: f64) -> Result<(u32, u32)> {
    for q in 2..=12u32 {
        let p = (x * q as f64).round();
        if p >= 1.0 && (p as u32) < q && (p / q as f64 - x).abs() <= 1e-12 {
            let p = p as u32;
            let g = gcd(p, q);
            return Ok((p / g, q / g));
        }
    }
    Err(bad(format!("{x} is not p/q with q <= 12; irrational alpha has no X_alpha sampler")))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// One row of a Monte Carlo comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McRow {
    /// λ (or x); absent for moment checks.
    pub lambda: Option<f64>,
    /// Monte Carlo estimate.
    pub lhs: f64,
    /// Deterministic (or independent Monte Carlo) side.
    pub rhs: f64,
    pub std_error: f64,
    /// (lhs − rhs) over the floored standard error.
    pub sigmas: f64,
    /// Allowed |lhs − rhs|.
    pub band: f64,
    pub passed: bool,
}

/// Acceptance band in standard errors.
pub const SIGMA_BAND: f64 = 4.0;

/// Standard errors are floored at this multiple of max(1, |rhs|), the accuracy
/// of the deterministic side, so that degenerate (zero-variance) estimators
/// compare at rounding level rather than at zero.
pub const SE_FLOOR_REL: f64 = 1e-10;

fn row(lambda: Option<f64>, lhs: MeanEstimate, rhs: f64, rel_floor: f64) -> McRow {
    let dev = lhs.estimate - rhs;
    let se = lhs.std_error.max(SE_FLOOR_REL * rhs.abs().max(1.0));
    let band = (SIGMA_BAND * se).max(rel_floor * rhs.abs());
    McRow {
        lambda,
        lhs: lhs.estimate,
        rhs,
        std_error: lhs.std_error,
        sigmas: dev / se,
        band,
        passed: dev.abs() <= band,
    }
}

/// Runs an identity with n draws per sampled factor at each λ of the grid.
pub fn mc_verify(id: McIdentity, n: usize, seed: Seed, lambdas: &Grid) -> Result<Vec<McRow>> {
    mc_verify_perturbed(id, n, seed, lambdas, 0.0)
}

fn in_unit(a: f64, what: &str) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(bad(format!("{what} needs alpha in (0,1), got {a}")))
    }
}

fn in_upper(a: f64, what: &str, closed: bool) -> Result<()> {
    if a > 1.0 && (a < 2.0 || (closed && a == 2.0)) {
        Ok(())
    } else {
        Err(bad(format!("{what} needs alpha in (1,2{}, got {a}", if closed { "]" } else { ")" })))
    }
}

/// As `mc_verify`, with the samplers' α shifted by `shift` while the
/// deterministic side keeps the nominal α (a sensitivity control). Factor_daa
/// shifts the kernel g_α instead, since Y_α needs a rational α; XMean has no
/// α to shift.
pub fn mc_verify_perturbed(id: McIdentity, n: usize, seed: Seed, lambdas: &Grid, shift: f64) -> Result<Vec<McRow>> {
    let ls = lambdas.points();
    let lt = |batch: &SampleBatch, f: &dyn Fn(f64) -> Result<f64>| -> Result<Vec<McRow>> {
        ls.iter()
            .map(|&l| Ok(row(Some(l), empirical_laplace(batch, l)?, f(l)?, 0.0)))
            .collect()
    };
    match id {
        McIdentity::StableLT(a) => {
            in_unit(a, "StableLT")?;
            let b = sample(SamplerSpec::Stable(a + shift), n, seed)?;
            lt(&b, &|l| Ok((-l.powf(a)).exp()))
        }
        McIdentity::MLLT(a) => {
            if !(a > 0.0 && a <= 1.0) {
                return Err(bad(format!("MLLT needs alpha in (0,1], got {a}")));
            }
            let b = sample(SamplerSpec::ML(a + shift), n, seed)?;
            lt(&b, &|l| Ok(1.0 / (1.0 + l.powf(a))))
        }
        McIdentity::ML2LT(a) => {
            in_upper(a, "ML2LT", true)?;
            // E[h(T_α)] = ((α−1)/α)E[(1 + V)h(V)] with V = U_{α−1}^{1/α}; the
            // Laplace transform of M̃L_α is the Stieltjes transform of T_α.
            let v = sample(SamplerSpec::RatioPow(a + shift - 1.0), n, seed)?;
            let w = (a - 1.0) / a;
            ls.iter()
                .map(|&l| {
                    let est = mean_se(v.values.iter().map(|&x| {
                        let t = x.powf(1.0 / (a + shift));
                        w * (1.0 + t) / (t + l)
                    }));
                    let closed = -closed_laplace(ClosedLaplace::DA1, a, l)?;
                    let numeric = -numeric_laplace(ClosedLaplace::DA1, a, l)?;
                    if (closed - numeric).abs() > 1e-6 * closed.abs() {
                        return Err(Error::Domain(format!(
                            "closed form {closed} and quadrature {numeric} disagree at lambda = {l}"
                        )));
                    }
                    Ok(row(Some(l), est, numeric, 0.0))
                })
                .collect()
        }
        McIdentity::Pollard(a) => {
            in_unit(a, "Pollard")?;
            let b = sample(SamplerSpec::MAlpha(a + shift), n, seed)?;
            let ab = AlphaBeta::new(a, 1.0)?;
            lt(&b, &|l| ml(ab, -l))
        }
        McIdentity::SizeBias(a) => {
            in_unit(a, "SizeBias")?;
            let b = sample(SamplerSpec::MAlpha(a + shift), n, seed)?;
            let ab = AlphaBeta::new(a, a)?;
            ls.iter()
                .map(|&l| {
                    let est = mean_se(b.values.iter().map(|&m| a * m * (-l * m).exp()));
                    Ok(row(Some(l), est, ml(ab, -l)?, 0.0))
                })
                .collect()
        }
        McIdentity::MABFactor(a) => {
            in_unit(a, "MABFactor")?;
            // M̃_α is M_α size-biased by M_α itself: E[h(M̃)] = Γ(1+α)E[M h(M)].
            let m = sample(SamplerSpec::MAlpha(a + shift), n, seed)?;
            let m2 = sample(SamplerSpec::MAlpha(a), n, seed.offset(1))?;
            let bb = sample(SamplerSpec::Beta(a, 1.0 - a), n, seed.offset(2))?;
            let c = gamma(1.0 + a);
            ls.iter()
                .map(|&l| {
                    let lhs = empirical_laplace(&m, l)?;
                    let rhs = mean_se(
                        m2.values
                            .iter()
                            .zip(&bb.values)
                            .map(|(&x, &b)| c * x * (-l * b.powf(a) * x).exp()),
                    );
                    let se = lhs.std_error.hypot(rhs.std_error);
                    let lhs = MeanEstimate {
                        estimate: lhs.estimate,
                        std_error: se,
                    };
                    Ok(row(Some(l), lhs, rhs.estimate, 0.0))
                })
                .collect()
        }
        McIdentity::Sabb(a, beta) => {
            in_upper(a, "Sabb", false)?;
            if !(beta > 1.0) {
                return Err(bad(format!("Sabb needs beta > 1, got {beta}")));
            }
            let v = sample(SamplerSpec::RatioPow(a + shift - 1.0), n, seed)?;
            let bb = sample(SamplerSpec::Beta(1.0, beta - 1.0), n, seed.offset(1))?;
            let ab = AlphaBeta::new(a, beta)?;
            let c = (a - 1.0) / a * rgamma(beta);
            ls.iter()
                .map(|&x| {
                    let est = mean_se(v.values.iter().zip(&bb.values).map(|(&u, &b)| {
                        let t = u.powf(1.0 / (a + shift));
                        c * (1.0 + t) * (-x * b * t).exp()
                    }));
                    Ok(row(Some(x), est, -d_func(ab, x)?, 0.0))
                })
                .collect()
        }
        McIdentity::Exx(a) => {
            in_unit(a, "Exx")?;
            let u = sample(SamplerSpec::RatioPow(1.0 - a - shift), n, seed)?;
            let ab = AlphaBeta::new(a, 1.0)?;
            let c = 1.0 / a - 1.0;
            ls.iter()
                .map(|&x| {
                    let p = 1.0 / (a + shift);
                    let est = mean_se(u.values.iter().map(|&v| c * (-x * v.powf(p)).exp()));
                    Ok(row(Some(x), est, thmb_diff(ab, x, ThmBDiff::TermMinusF)?, 0.0))
                })
                .collect()
        }
        McIdentity::Eaxx(a) => {
            in_upper(a, "Eaxx", false)?;
            let u = sample(SamplerSpec::RatioPow(a + shift - 1.0), n, seed)?;
            let ab = AlphaBeta::new(a, 1.0)?;
            let c = 1.0 - 1.0 / a;
            ls.iter()
                .map(|&x| {
                    let p = 1.0 / (a + shift);
                    let est = mean_se(u.values.iter().map(|&v| c * (-x * v.powf(p)).exp()));
                    Ok(row(Some(x), est, thmb_diff(ab, x, ThmBDiff::FMinusTerm)?, 0.0))
                })
                .collect()
        }
        McIdentity::Prop1(a) => {
            let w = sample(SamplerSpec::WAlpha(a + shift), n, seed)?;
            let c = 1.0 / a - 1.0;
            let f = CmFamily::Prop1(a);
            ls.iter()
                .map(|&x| {
                    let est = mean_se(w.values.iter().map(|&v| c * (-x * v).exp()));
                    Ok(row(Some(x), est, f.eval(x)?, 0.0))
                })
                .collect()
        }
        McIdentity::FactorDaa(p, q) => {
            check_rational(p, q)?;
            let a = p as f64 / q as f64;
            let y = sample(SamplerSpec::YAlpha(p, q), n, seed)?;
            let ab = AlphaBeta::new(a, a)?;
            let cfg = QuadratureConfig::new(1e-30, 1e-9, 10)?;
            let c = rgamma(a);
            ls.iter()
                .map(|&x| {
                    let vals = y
                        .values
                        .iter()
                        .map(|&v| laplace_of_g_with(a + shift, x * v, false, &cfg).map(|l| c * l))
                        .collect::<Result<Vec<f64>>>()?;
                    Ok(row(Some(x), mean_se(vals), d_func(ab, x)?, 0.01))
                })
                .collect()
        }
        McIdentity::XMean(p, q) => {
            check_rational(p, q)?;
            if shift != 0.0 {
                return Err(bad("XMean has no alpha to perturb".into()));
            }
            let a = p as f64 / q as f64;
            let b = sample(SamplerSpec::XRational(p, q), n, seed)?;
            let mut s = CompensatedSum::new();
            for v in &b.values {
                s.add(*v);
            }
            let est = mean_se(b.values.iter().copied());
            let est = MeanEstimate {
                estimate: s.value() / n as f64,
                ..est
            };
            Ok(vec![row(None, est, gamma(1.0 + 1.0 / a) * gamma(a) * rgamma(a + 1.0), 0.0)])
        }
    }
}

/// Binned comparison of a batch against known bin probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramCheck {
    /// Per bin: (lower edge, upper edge, observed count, expected count, deviation in σ).
    pub bins: Vec<(f64, f64, usize, f64, f64)>,
    pub max_sigmas: f64,
}

/// Counts the batch on log-spaced bins over [lo, hi] and compares with
/// n·P(bin), P(bin) = `prob(a, b)`, using the binomial standard deviation.
pub fn log_histogram<F>(batch: &SampleBatch, lo: f64, hi: f64, nbins: usize, prob: F) -> Result<HistogramCheck>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if nbins == 0 {
        return Err(bad("histogram needs at least one bin".into()));
    }
    let mut edges = Grid::log(lo, hi, nbins + 1)?.points().to_vec();
    edges[0] = lo;
    edges[nbins] = hi;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut counts = vec![0usize; nbins];
    for &v in &batch.values {
        if v >= lo && v < hi {
            let k = (((v.ln() - llo) / (lhi - llo)) * nbins as f64) as usize;
            // rounding may put v on the wrong side of a computed edge
            let k = k.min(nbins - 1);
            let k = if v < edges[k] && k > 0 { k - 1 } else if v >= edges[k + 1] && k + 1 < nbins { k + 1 } else { k };
            counts[k] += 1;
        }
    }
    let n = batch.n as f64;
    let mut bins = Vec::with_capacity(nbins);
    let mut max_sigmas: f64 = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let p = prob(edges[k], edges[k + 1])?;
        let expected = n * p;
        let sd = (n * p * (1.0 - p)).sqrt();
        let dev = (c as f64 - expected) / sd;
        max_sigmas = max_sigmas.max(dev.abs());
        bins.push((edges[k], edges[k + 1], c, expected, dev));
    }
    Ok(HistogramCheck { bins, max_sigmas })
}
