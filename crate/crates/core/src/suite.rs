//! The full verification suite as CSV rows, grouped by acceptance criterion.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::bernstein::{f_alpha, f_alpha_prime, lemma_threshold, mellin, mellin_closed, poly_nonneg, DensitySpec};
use crate::error::Result;
use crate::mlcore::{AlphaBeta, ThmBDiff};
use crate::montecarlo::{mc_verify, mc_verify_perturbed, McIdentity, McRow, Seed};
use crate::quad::QuadratureConfig;
use crate::specfun::{cospi, sinpi};
use crate::verify::{
    classify, closed_laplace, cm_check_family, identity_rows, necktie_grid, numeric_laplace, rel_err,
    representation_rows, sign_scan, three_factor_mellin, ClosedIdentity, ClosedLaplace, CmFamily, Comparison,
    Grid, Representation, VerdictTag, SIGN_TOL,
};

pub const CSV_HEADER: &str = "criterion,check,params,x,lhs,rhs,error,tol,status,note";

/// Number of criteria produced by `run_criterion`.
pub const CRITERIA: u8 = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub criterion: u8,
    pub check: String,
    pub params: String,
    pub x: Option<f64>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub error: Option<f64>,
    pub tol: Option<f64>,
    pub passed: bool,
    pub note: String,
}

impl SuiteRow {
    fn new(criterion: u8, check: &str, params: String) -> Self {
        Self {
            criterion,
            check: check.to_string(),
            params,
            x: None,
            lhs: None,
            rhs: None,
            error: None,
            tol: None,
            passed: false,
            note: String::new(),
        }
    }

    fn failed(criterion: u8, check: &str, params: String, err: crate::Error) -> Self {
        let mut r = Self::new(criterion, check, params);
        r.note = err.to_string();
        r
    }

    pub fn status(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            self.criterion,
            clean(&self.check),
            clean(&self.params),
            num(self.x),
            num(self.lhs),
            num(self.rhs),
            num(self.error),
            num(self.tol),
            self.status(),
            clean(&self.note)
        );
        s
    }
}

/// 17 significant digits; NaN, infinities and absent values become empty fields.
pub fn num(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        _ => String::new(),
    }
}

fn clean(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

fn ab(a: f64, b: f64) -> AlphaBeta {
    AlphaBeta { alpha: a, beta: b }
}

fn ab_params(a: f64, b: f64) -> String {
    format!("alpha={a};beta={b}")
}

/// Suite settings; the defaults are the acceptance settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub mc_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: crate::montecarlo::DEFAULT_SEED,
            mc_samples: 1_000_000,
        }
    }
}

fn comparisons(criterion: u8, check: &str, params: String, res: Result<Vec<Comparison>>, tol: f64) -> Vec<SuiteRow> {
    match res {
        Ok(rows) => rows
            .into_iter()
            .map(|c| SuiteRow {
                x: Some(c.x),
                lhs: Some(c.lhs),
                rhs: Some(c.rhs),
                error: Some(c.error),
                tol: Some(tol),
                passed: c.error <= tol,
                ..SuiteRow::new(criterion, check, params.clone())
            })
            .collect(),
        Err(e) => vec![SuiteRow::failed(criterion, check, params, e)],
    }
}

fn pair(criterion: u8, check: &str, params: String, x: Option<f64>, res: Result<(f64, f64)>, tol: f64) -> SuiteRow {
    match res {
        Ok((lhs, rhs)) => {
            let error = rel_err(lhs, rhs);
            SuiteRow {
                x,
                lhs: Some(lhs),
                rhs: Some(rhs),
                error: Some(error),
                tol: Some(tol),
                passed: error <= tol,
                ..SuiteRow::new(criterion, check, params)
            }
        }
        Err(e) => SuiteRow::failed(criterion, check, params, e),
    }
}

/// Rows of one criterion (1 through 9).
pub fn run_criterion(k: u8, cfg: &SuiteConfig) -> Result<Vec<SuiteRow>> {
    Ok(match k {
        1 => closed_identities()?,
        2 => representations()?,
        3 => mellin_checks()?,
        4 => necktie_scan(),
        5 => cm_families()?,
        6 => polynomials()?,
        7 => laplace_transforms(),
        8 => monte_carlo(cfg)?,
        9 => factorization(cfg)?,
        _ => {
            return Err(crate::Error::Parameter(format!(
                "criteria are numbered 1 to {CRITERIA}, got {k}"
            )))
        }
    })
}

/// All rows in criterion order.
pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<SuiteRow>> {
    let mut out = Vec::new();
    for k in 1..=CRITERIA {
        out.extend(run_criterion(k, cfg)?);
    }
    Ok(out)
}

/// Header plus one line per row, '\n'-terminated.
pub fn to_csv(rows: &[SuiteRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

fn closed_identities() -> Result<Vec<SuiteRow>> {
    let g = Grid::new((1..=50).map(|i| i as f64 / 10.0).collect())?;
    let tol = 1e-10;
    let mut out = Vec::new();
    let cases: [(ClosedIdentity, &[f64]); 7] = [
        (ClosedIdentity::DAlphaOne, &[0.5, 1.0, 1.5, 2.0]),
        (ClosedIdentity::ThmBAlphaOne, &[1.5, 2.0, 3.0]),
        (ClosedIdentity::DHalf, &[0.75, 1.0, 1.5]),
        (ClosedIdentity::Dbar21, &[1.0]),
        (ClosedIdentity::Dbar41, &[1.0]),
        (ClosedIdentity::EHalfSum, &[1.0]),
        (ClosedIdentity::IncTerm, &[1.5, 2.0, 3.0]),
    ];
    for (id, betas) in cases {
        for &b in betas {
            out.extend(comparisons(1, id.name(), format!("beta={b}"), identity_rows(id, b, &g), tol));
        }
    }
    Ok(out)
}

fn representations() -> Result<Vec<SuiteRow>> {
    let g = Grid::linear(0.1, 5.0, 20)?;
    let tol = 1e-6;
    let mut cases = Vec::new();
    for a in [0.6, 0.75, 0.9] {
        cases.push((Representation::B1, ab(a, 1.0)));
    }
    for a in [0.3, 0.5, 0.7] {
        cases.push((Representation::Exa, ab(a, 1.0)));
        cases.push((Representation::FHat, ab(a, 1.0)));
    }
    for a in [1.25, 1.5, 1.75] {
        for r in [Representation::Eaxx, Representation::UPow, Representation::SizeBias, Representation::B2] {
            cases.push((r, ab(a, 1.0)));
        }
    }
    for (a, b) in [(1.5, 2.0), (0.7, 1.4)] {
        cases.push((Representation::Composite, ab(a, b)));
    }
    for (a, b) in [(0.7, 0.5), (1.5, 1.5), (0.4, 1.2)] {
        cases.push((Representation::Bracket, ab(a, b)));
    }
    cases.push((Representation::Remark2Line1, ab(1.5, 1.5)));
    cases.push((Representation::Remark2Line3, ab(1.5, 1.5)));
    cases.push((Representation::Dbar41, ab(4.0, 1.0)));
    cases.push((Representation::Rescaled, ab(0.7, 0.9)));
    cases.push((Representation::Rescaled, ab(0.4, 0.7)));
    cases.push((Representation::Prop1, ab(0.6, 1.0)));
    let mut out = Vec::new();
    for (r, p) in cases {
        out.extend(comparisons(
            2,
            r.name(),
            ab_params(p.alpha, p.beta),
            representation_rows(r, p, &g),
            tol,
        ));
    }
    Ok(out)
}

fn mellin_checks() -> Result<Vec<SuiteRow>> {
    let cfg = QuadratureConfig::default();
    let mut out = Vec::new();
    let kinds = [
        (false, [0.6, 0.75, 0.9].as_slice()),
        (true, [0.3, 0.45].as_slice()),
    ];
    for (tilde, alphas) in kinds {
        for &a in alphas {
            let spec = if tilde {
                DensitySpec::TildeFAlpha(a)
            } else {
                DensitySpec::FAlpha(a)
            };
            let strip = spec.mellin_strip().expect("strip exists for these alpha");
            for k in 1..=5 {
                let s = strip.lo + (strip.hi - strip.lo) * k as f64 / 6.0;
                let res = (|| Ok((mellin_closed(a, s, tilde)?, mellin(&spec, s, &cfg)?)))();
                let check = if tilde { "mellin_tilde" } else { "mellin" };
                out.push(pair(3, check, format!("alpha={a}"), Some(s), res, 1e-7));
            }
        }
    }
    for a in [0.6, 0.75, 0.9] {
        let strip = DensitySpec::FAlpha(a).mellin_strip().expect("strip exists");
        for k in 1..10 {
            let s = strip.lo + (strip.hi - strip.lo) * k as f64 / 10.0;
            out.push(pair(3, "three_factor", format!("alpha={a}"), Some(s), three_factor_mellin(a, s), 1e-10));
        }
    }
    let want = 8.0 * 3f64.sqrt() / 9.0;
    out.push(pair(
        3,
        "M_3/4_closed",
        "alpha=0.75".into(),
        Some(-0.5),
        mellin_closed(0.75, -0.5, false).map(|v| (v, want)),
        1e-14,
    ));
    out.push(pair(
        3,
        "M_3/4_quadrature",
        "alpha=0.75".into(),
        Some(-0.5),
        mellin(&DensitySpec::FAlpha(0.75), -0.5, &cfg).map(|v| (v, want)),
        1e-7,
    ));
    Ok(out)
}

fn necktie_scan() -> Vec<SuiteRow> {
    necktie_grid()
        .into_iter()
        .map(|p| {
            let params = ab_params(p.alpha, p.beta);
            match sign_scan(p) {
                Ok(s) => {
                    let mut note = s.verdict.tag.name().to_string();
                    if s.verdict.boundary {
                        note.push_str(" boundary");
                    }
                    if s.verdict.tag == VerdictTag::Neither {
                        let _ = write!(
                            note,
                            " D<0 at {} Dbar<0 at {}",
                            num(s.d_witness),
                            num(s.dbar_witness)
                        );
                    }
                    SuiteRow {
                        lhs: Some(s.min_d),
                        rhs: Some(s.min_dbar),
                        tol: Some(SIGN_TOL),
                        passed: s.consistent,
                        note,
                        ..SuiteRow::new(4, "necktie_sign", params)
                    }
                }
                Err(e) => SuiteRow::failed(4, "necktie_sign", params, e),
            }
        })
        .collect()
}

fn cm_families() -> Result<Vec<SuiteRow>> {
    let g = Grid::linear(0.2, 4.0, 12)?;
    let mut fams = vec![
        CmFamily::D(ab(0.6, 0.7)),
        CmFamily::D(ab(0.8, 1.5)),
        CmFamily::D(ab(0.6, 0.6)),
        CmFamily::D(ab(0.3, 0.7)),
        CmFamily::Dbar(ab(0.3, 0.2)),
        CmFamily::Dbar(ab(0.3, 0.3)),
        CmFamily::Dbar(ab(0.7, 0.3)),
        CmFamily::Dbar(ab(1.5, 1.5)),
        CmFamily::Dbar(ab(1.5, 1.0)),
        CmFamily::Dbar(ab(2.0, 1.0)),
        CmFamily::ThmB(ab(0.7, 1.0), ThmBDiff::TermMinusF),
        CmFamily::ThmB(ab(0.7, 1.5), ThmBDiff::TermMinusF),
        CmFamily::ThmB(ab(0.3, 1.0), ThmBDiff::LbfMinusTerm),
        CmFamily::ThmB(ab(0.6, 2.0), ThmBDiff::LbfMinusTerm),
        CmFamily::ThmB(ab(1.5, 1.0), ThmBDiff::FMinusTerm),
        CmFamily::ThmB(ab(1.5, 2.0), ThmBDiff::FMinusTerm),
        CmFamily::ThmB(ab(1.5, 1.0), ThmBDiff::TermMinusLbf),
        CmFamily::ThmB(ab(1.75, 2.0), ThmBDiff::TermMinusLbf),
        CmFamily::Rescaled(ab(0.7, 0.7)),
        CmFamily::Rescaled(ab(0.4, 0.6)),
    ];
    fams.extend([0.5, 0.6, 0.8].map(CmFamily::Prop1));
    let mut out = Vec::new();
    for f in fams.into_iter().chain([CmFamily::Prop1(0.4)]) {
        let expect_fail = f == CmFamily::Prop1(0.4);
        let check = if expect_fail { "cm_order8_expect_witness" } else { "cm_order8" };
        out.push(match cm_check_family(&f, &g, 8) {
            Ok(r) => {
                let mut row = SuiteRow {
                    passed: r.passed != expect_fail,
                    ..SuiteRow::new(5, check, f.label())
                };
                if let Some(w) = r.witness {
                    row.x = Some(w.x);
                    row.error = Some(w.violation);
                    row.note = format!("witness order {}", w.order);
                }
                row
            }
            Err(e) => SuiteRow::failed(5, check, f.label(), e),
        });
    }
    Ok(out)
}

fn polynomials() -> Result<Vec<SuiteRow>> {
    let mut out = Vec::new();
    for (case, alphas) in [("case_i", [0.1, 0.2, 0.3, 0.4, 0.5]), ("case_ii", [0.5, 0.6, 0.7, 0.8, 0.9])] {
        for a in alphas {
            let b = if case == "case_i" { a } else { 1.0 - a };
            let params = ab_params(a, b);
            out.push(match poly_nonneg(a, b) {
                Ok(m) => SuiteRow {
                    x: Some(m.argmin),
                    lhs: Some(m.min_value),
                    tol: Some(-1e-12),
                    passed: m.min_value >= -1e-12,
                    ..SuiteRow::new(6, case, params)
                },
                Err(e) => SuiteRow::failed(6, case, params, e),
            });
        }
    }
    let ts = Grid::log(0.05, 20.0, 40)?;
    for (a, b) in [(0.3, 0.2), (0.7, 0.25), (0.5, 0.5)] {
        // (1/2)f + tf′ vanishes identically at α = β = 1/2, so that pair is
        // measured against the size of its two terms
        let zero = classify(ab(a, b)).tag == VerdictTag::ZeroFunction;
        let rows = ts
            .points()
            .iter()
            .map(|&t| {
                let f = f_alpha(a, t);
                let fp = f_alpha_prime(a, t)?;
                let direct = (1.0 - b) * f + t * fp;
                let q = t.powf(2.0 * a) - 2.0 * t.powf(a) * cospi(a) + 1.0;
                let poly = sinpi(a) * crate::bernstein::htilde_poly(a, b, t) / (PI * q * q);
                let scale = if zero {
                    ((1.0 - b) * f).abs().max((t * fp).abs())
                } else {
                    direct.abs().max(poly.abs())
                };
                let error = if poly == direct { 0.0 } else { (poly - direct).abs() / scale };
                Ok(Comparison {
                    x: t,
                    lhs: poly,
                    rhs: direct,
                    error,
                })
            })
            .collect();
        out.extend(comparisons(6, "htilde_vs_direct", ab_params(a, b), rows, 1e-9));
    }
    for (a, b, c, rho, want, holds) in [
        (1.0, 2.0, 1.0, 1.0, 1.0, true),
        (0.99, 2.0, 1.0, 1.0, 1.0, false),
        (4.0, 3.0, 1.0, 2.0, 4.0, true),
    ] {
        let params = format!("a={a};b={b};c={c};rho={rho}");
        out.push(match lemma_threshold(a, b, c, rho) {
            Ok(r) => SuiteRow {
                x: Some(r.grid_argmin),
                lhs: Some(r.threshold),
                rhs: Some(want),
                error: Some((r.threshold - want).abs()),
                tol: Some(0.0),
                passed: r.threshold == want && r.holds == holds && (r.grid_min >= -1e-12) == holds,
                note: format!("holds={}", r.holds),
                ..SuiteRow::new(6, "lemma_threshold", params)
            },
            Err(e) => SuiteRow::failed(6, "lemma_threshold", params, e),
        });
    }
    Ok(out)
}

fn laplace_transforms() -> Vec<SuiteRow> {
    let mut out = Vec::new();
    for which in [ClosedLaplace::DA1, ClosedLaplace::ThmBA] {
        for a in [0.3, 0.6, 0.75] {
            for s in [0.5, 1.0, 2.0, 4.0] {
                let res = (|| Ok((closed_laplace(which, a, s)?, numeric_laplace(which, a, s)?)))();
                out.push(pair(7, which.name(), format!("alpha={a}"), Some(s), res, 1e-6));
            }
        }
    }
    out
}

fn mc_rows(criterion: u8, id: McIdentity, rows: Result<Vec<McRow>>) -> Vec<SuiteRow> {
    let params = id.params();
    match rows {
        Ok(rows) => rows
            .into_iter()
            .map(|r| SuiteRow {
                x: r.lambda,
                lhs: Some(r.lhs),
                rhs: Some(r.rhs),
                error: Some((r.lhs - r.rhs).abs()),
                tol: Some(r.band),
                passed: r.passed,
                note: format!("se={} sigmas={}", num(Some(r.std_error)), num(Some(r.sigmas))),
                ..SuiteRow::new(criterion, id.name(), params.clone())
            })
            .collect(),
        Err(e) => vec![SuiteRow::failed(criterion, id.name(), params, e)],
    }
}

/// Identities of the Monte Carlo criterion, in run order.
pub fn mc_identities() -> Vec<McIdentity> {
    let mut ids = vec![
        McIdentity::StableLT(0.3),
        McIdentity::StableLT(0.5),
        McIdentity::StableLT(0.8),
        McIdentity::MLLT(0.5),
        McIdentity::MLLT(0.7),
        McIdentity::ML2LT(1.5),
        McIdentity::ML2LT(2.0),
    ];
    for a in [0.4, 0.6, 0.8] {
        ids.push(McIdentity::Pollard(a));
        ids.push(McIdentity::SizeBias(a));
    }
    ids.extend([
        McIdentity::MABFactor(0.4),
        McIdentity::MABFactor(0.6),
        McIdentity::MABFactor(0.8),
        McIdentity::Sabb(1.5, 2.0),
        McIdentity::Exx(0.4),
        McIdentity::Exx(0.7),
        McIdentity::Eaxx(1.5),
        McIdentity::Prop1(0.6),
        McIdentity::XMean(1, 2),
    ]);
    ids
}

/// λ values of the Monte Carlo criterion.
pub fn mc_lambdas() -> Grid {
    Grid::new(vec![0.5, 1.0, 1.5]).expect("valid grid")
}

/// Streams are spaced so that the auxiliary streams of one identity never
/// reach the next.
fn stream(k: usize) -> u64 {
    16 * k as u64
}

fn monte_carlo(cfg: &SuiteConfig) -> Result<Vec<SuiteRow>> {
    let g = mc_lambdas();
    let mut out = Vec::new();
    let ids = mc_identities();
    for (k, &id) in ids.iter().enumerate() {
        let seed = Seed::new(cfg.seed, stream(k));
        out.extend(mc_rows(8, id, mc_verify(id, cfg.mc_samples, seed, &g)));
    }
    // the same checks with the sampler's α moved by 0.05 must fail clearly
    for (k, id) in [McIdentity::Pollard(0.6), McIdentity::StableLT(0.5)].into_iter().enumerate() {
        let seed = Seed::new(cfg.seed, stream(ids.len() + k));
        let params = format!("{};shift=0.05", id.params());
        let check = format!("{}_perturbed", id.name());
        out.push(match mc_verify_perturbed(id, cfg.mc_samples, seed, &g, 0.05) {
            Ok(rows) => {
                let worst = rows.iter().map(|r| r.sigmas.abs()).fold(0.0, f64::max);
                SuiteRow {
                    lhs: Some(worst),
                    tol: Some(10.0),
                    passed: worst > 10.0,
                    note: "max sigmas over lambda".into(),
                    ..SuiteRow::new(8, &check, params)
                }
            }
            Err(e) => SuiteRow::failed(8, &check, params, e),
        });
    }
    Ok(out)
}

fn factorization(cfg: &SuiteConfig) -> Result<Vec<SuiteRow>> {
    let id = McIdentity::FactorDaa(2, 3);
    let g = Grid::new(vec![0.5, 1.0, 2.0])?;
    let seed = Seed::new(cfg.seed, stream(mc_identities().len() + 2));
    Ok(mc_rows(9, id, mc_verify(id, cfg.mc_samples, seed, &g)))
}
