use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use necktie::bernstein::{compose_bernstein, stable_density, DensitySpec};
use necktie::mlcore::{big_f, d_func, inc_term, lb_big_f, ml, thmb_diff, AlphaBeta, ThmBDiff};
use necktie::montecarlo::{
    empirical_laplace, mc_verify, mc_verify_perturbed, sample, McIdentity, SamplerSpec, Seed, DEFAULT_SEED,
};
use necktie::quad::QuadratureConfig;
use necktie::suite::{self, num, SuiteConfig};
use necktie::verify::{
    classify, closed_laplace, cm_check_family, identity_rows, max_error, necktie_grid, numeric_laplace, rel_err,
    representation_rows, sign_scan, ClosedIdentity, ClosedLaplace, CmFamily, Comparison, Grid, Representation,
};
use necktie::Error;

/// Mittag-Leffler differences, their Bernstein densities and complete monotonicity checks.
///
/// Numeric output is CSV with a header row, 17 significant digits and empty
/// fields for absent values. Exit status: 0 success, 1 a check out of
/// tolerance, 2 usage or evaluation error. NECKTIE_SEED overrides the default
/// Monte Carlo seed.
#[derive(Parser, Debug)]
#[command(name = "necktie", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pointwise values: E, F, LbF, D, Dbar, term, or a difference against the
    /// incomplete term (F_minus_term, term_minus_F, lbF_minus_term, term_minus_lbF).
    /// Columns: x,value.
    Eval(EvalArgs),
    /// Necktie verdict of (alpha, beta).
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
    },
    /// Sign scan of the 40x40 grid. Columns: alpha,beta,verdict,boundary,
    /// min_d,min_dbar,d_witness,dbar_witness,status.
    Scan {
        #[arg(long)]
        out: Option<String>,
    },
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Monte Carlo identity or sampler check. Identity columns:
    /// lambda,lhs,rhs,std_error,sigmas,band,status; sampler columns:
    /// lambda,estimate,std_error.
    Mc(McArgs),
    /// Tabulates a density. Kinds: FAlpha, FHat, ExaDensity, TAlpha,
    /// EaxxDensity, UPowDensity, UPowSizeBias, TildeFAlpha, HAlphaBeta,
    /// HankelBracket, GAlpha, TildeGAlpha, Remark2Line1, Remark2Line3,
    /// BetaKernel (a = alpha, b = beta), GammaDensity, Stable, Composed
    /// (the Bernstein density of |D_{alpha,beta}|). Columns: t,value.
    Densities {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value = "0.1:5:50")]
        grid: String,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// A single point; prints the bare value.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "grid")]
    x: Option<f64>,
    /// a:b:n, or a:b:n:log.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value = "D")]
    what: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Closed identity (D1, thmB1, Dhalf, Dbar21, Dbar41, EhalfSum, IncTerm).
    /// Prints "name,beta,max_error,tol,status"; --out gets x,lhs,rhs,error.
    Identity {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value = "0.1:5:50")]
        grid: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Laplace representation (b1, Exa, FHat, Eaxx, UPow, SizeBias, b2,
    /// composite, bracket, remark2_line1, remark2_line3, Dbar41, rescaled,
    /// Prop1). Same output as identity.
    Representation {
        #[arg(long)]
        name: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value = "0.1:5:20")]
        grid: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Closed Mellin transform of f_alpha (or its tilde variant) against
    /// quadrature. Columns: s,closed,quadrature,error,tol,status.
    Mellin {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long)]
        tilde: bool,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Closed Laplace transform (D_a1 or thmB_a) against quadrature of the
    /// series function. Columns: s,closed,quadrature,error,tol,status.
    Laplace {
        #[arg(long)]
        name: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value = "0.5:4:4:log")]
        grid: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Forward-difference complete monotonicity check of D, Dbar, an incomplete-term
    /// difference, rescaled or Prop1. Prints
    /// "family,order,status,witness_x,witness_order,violation".
    Cm {
        #[arg(long)]
        family: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value = "0.2:4:12")]
        grid: String,
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// The whole acceptance suite. Columns: criterion,check,params,x,lhs,rhs,
    /// error,tol,status,note.
    All {
        /// Run a single criterion (1 to 9).
        #[arg(long)]
        criterion: Option<u8>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Args, Debug)]
struct McArgs {
    /// StableLT, MLLT, ML2LT, Pollard, SizeBias, MABFactor, Sabb, Exx, Eaxx,
    /// Prop1, Factor_daa, XMean.
    #[arg(long, conflicts_with = "sampler", required_unless_present = "sampler")]
    identity: Option<String>,
    /// Stable, MAlpha, ML, RatioPow, WAlpha, Gamma, UniformPow, Beta,
    /// XRational, YAlpha (the last two take alpha = p/q).
    #[arg(long)]
    sampler: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    #[arg(long, default_value = "0.5:1.5:3")]
    lambdas: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Shift of the sampler's alpha (sensitivity control).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    perturb: f64,
    #[arg(long)]
    out: Option<String>,
}

/// Failure modes of a command, mapped to exit codes.
enum Failure {
    Usage(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("necktie: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Eval(a) => eval(a),
        Command::Classify { alpha, beta } => {
            let v = classify(AlphaBeta::new(alpha, beta)?);
            println!("{}", v.tag.name());
            Ok(())
        }
        Command::Scan { out } => scan(out),
        Command::Verify(v) => verify(v),
        Command::Mc(a) => mc(a),
        Command::Densities {
            kind,
            alpha,
            beta,
            grid,
            out,
        } => densities(&kind, alpha, beta, &grid, out),
    }
}

fn parse_grid(spec: &str) -> std::result::Result<Grid, Failure> {
    let bad = || Failure::Usage(format!("grid must be a:b:n or a:b:n:log, got '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    if !(parts.len() == 3 || parts.len() == 4) {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if n > 1_000_000 {
        return Err(Failure::Usage(format!("grid count must be at most 1e6, got {n}")));
    }
    let g = match parts.get(3) {
        None => Grid::linear(a, b, n)?,
        Some(&"log") => Grid::log(a, b, n)?,
        Some(_) => return Err(bad()),
    };
    Ok(g)
}

fn seed_value(flag: Option<u64>) -> std::result::Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("NECKTIE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("NECKTIE_SEED must be a decimal 64-bit integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn emit(out: &Option<String>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn eval_one(what: &str, ab: AlphaBeta, x: f64) -> necktie::Result<f64> {
    match what {
        "E" => ml(ab, x),
        "F" => big_f(ab, x),
        "LbF" => lb_big_f(ab, x),
        "D" => d_func(ab, x),
        "Dbar" => Ok(-d_func(ab, x)?),
        "term" => inc_term(ab, x),
        other => match ThmBDiff::parse(other) {
            Some(w) => thmb_diff(ab, x, w),
            None => Err(Error::Parameter(format!("unknown quantity '{other}'"))),
        },
    }
}

fn eval(a: EvalArgs) -> Outcome {
    let ab = AlphaBeta::new(a.alpha, a.beta)?;
    match (a.x, &a.grid) {
        (Some(x), _) => {
            let v = eval_one(&a.what, ab, x)?;
            emit(&a.out, &format!("{}\n", num(Some(v))))?;
        }
        (None, Some(g)) => {
            let g = parse_grid(g)?;
            let mut s = String::from("x,value\n");
            for &x in g.points() {
                let v = eval_one(&a.what, ab, x)?;
                s.push_str(&format!("{},{}\n", num(Some(x)), num(Some(v))));
            }
            emit(&a.out, &s)?;
        }
        (None, None) => return Err(Failure::Usage("eval needs --x or --grid".into())),
    }
    Ok(())
}

fn scan(out: Option<String>) -> Outcome {
    let mut s = String::from("alpha,beta,verdict,boundary,min_d,min_dbar,d_witness,dbar_witness,status\n");
    let mut ok = true;
    for p in necktie_grid() {
        let r = sign_scan(p)?;
        ok &= r.consistent;
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            num(Some(p.alpha)),
            num(Some(p.beta)),
            r.verdict.tag.name(),
            r.verdict.boundary,
            num(Some(r.min_d)),
            num(Some(r.min_dbar)),
            num(r.d_witness),
            num(r.dbar_witness),
            status(r.consistent)
        ));
    }
    emit(&out, &s)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn comparison_report(label: &str, rows: &[Comparison], tol: f64, out: &Option<String>) -> Outcome {
    let worst = max_error(rows);
    let ok = worst <= tol;
    if let Some(path) = out {
        let mut s = String::from("x,lhs,rhs,error\n");
        for r in rows {
            s.push_str(&format!(
                "{},{},{},{}\n",
                num(Some(r.x)),
                num(Some(r.lhs)),
                num(Some(r.rhs)),
                num(Some(r.error))
            ));
        }
        fs::write(path, s)?;
    }
    println!("{label},{},{},{}", num(Some(worst)), num(Some(tol)), status(ok));
    if ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn verify(cmd: VerifyCommand) -> Outcome {
    match cmd {
        VerifyCommand::Identity {
            name,
            beta,
            grid,
            tol,
            out,
        } => {
            let id = ClosedIdentity::parse(&name)
                .ok_or_else(|| Failure::Usage(format!("unknown identity '{name}'")))?;
            let rows = identity_rows(id, beta, &parse_grid(&grid)?)?;
            comparison_report(&format!("{},beta={beta}", id.name()), &rows, tol, &out)
        }
        VerifyCommand::Representation {
            name,
            alpha,
            beta,
            grid,
            tol,
            out,
        } => {
            let rep = Representation::parse(&name)
                .ok_or_else(|| Failure::Usage(format!("unknown representation '{name}'")))?;
            let rows = representation_rows(rep, AlphaBeta::new(alpha, beta)?, &parse_grid(&grid)?)?;
            comparison_report(&format!("{},alpha={alpha};beta={beta}", rep.name()), &rows, tol, &out)
        }
        VerifyCommand::Mellin { alpha, s, tilde, tol } => {
            let closed = necktie::bernstein::mellin_closed(alpha, s, tilde)?;
            let spec = if tilde {
                DensitySpec::TildeFAlpha(alpha)
            } else {
                DensitySpec::FAlpha(alpha)
            };
            let quad = necktie::bernstein::mellin(&spec, s, &QuadratureConfig::default())?;
            let err = rel_err(closed, quad);
            println!("s,closed,quadrature,error,tol,status");
            println!(
                "{},{},{},{},{},{}",
                num(Some(s)),
                num(Some(closed)),
                num(Some(quad)),
                num(Some(err)),
                num(Some(tol)),
                status(err <= tol)
            );
            if err <= tol {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        VerifyCommand::Laplace { name, alpha, grid, tol } => {
            let which = ClosedLaplace::parse(&name)
                .ok_or_else(|| Failure::Usage(format!("unknown closed Laplace transform '{name}'")))?;
            let mut ok = true;
            println!("s,closed,quadrature,error,tol,status");
            for &s in parse_grid(&grid)?.points() {
                let c = closed_laplace(which, alpha, s)?;
                let q = numeric_laplace(which, alpha, s)?;
                let err = rel_err(c, q);
                ok &= err <= tol;
                println!(
                    "{},{},{},{},{},{}",
                    num(Some(s)),
                    num(Some(c)),
                    num(Some(q)),
                    num(Some(err)),
                    num(Some(tol)),
                    status(err <= tol)
                );
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        VerifyCommand::Cm {
            family,
            alpha,
            beta,
            grid,
            order,
        } => {
            let ab = AlphaBeta::new(alpha, beta)?;
            let fam = match family.as_str() {
                "D" => CmFamily::D(ab),
                "Dbar" => CmFamily::Dbar(ab),
                "rescaled" => CmFamily::Rescaled(ab),
                "Prop1" => CmFamily::Prop1(alpha),
                other => CmFamily::ThmB(
                    ab,
                    ThmBDiff::parse(other).ok_or_else(|| Failure::Usage(format!("unknown family '{other}'")))?,
                ),
            };
            let r = cm_check_family(&fam, &parse_grid(&grid)?, order)?;
            println!("family,order,status,witness_x,witness_order,violation");
            let w = r.witness;
            println!(
                "{},{},{},{},{},{}",
                fam.label().replace(',', ";"),
                order,
                status(r.passed),
                num(w.map(|w| w.x)),
                w.map(|w| w.order.to_string()).unwrap_or_default(),
                num(w.map(|w| w.violation))
            );
            if r.passed {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        VerifyCommand::All {
            criterion,
            seed,
            samples,
            out,
        } => {
            let cfg = SuiteConfig {
                seed: seed_value(seed)?,
                mc_samples: samples,
            };
            let rows = match criterion {
                Some(k) => suite::run_criterion(k, &cfg)?,
                None => suite::run_all(&cfg)?,
            };
            emit(&out, &suite::to_csv(&rows))?;
            if rows.iter().all(|r| r.passed) {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
    }
}

fn sampler_spec(name: &str, alpha: f64, beta: f64) -> std::result::Result<SamplerSpec, Failure> {
    let rational = || necktie::montecarlo::as_rational(alpha);
    Ok(match name.to_ascii_lowercase().as_str() {
        "stable" => SamplerSpec::Stable(alpha),
        "malpha" => SamplerSpec::MAlpha(alpha),
        "ml" => SamplerSpec::ML(alpha),
        "ratiopow" => SamplerSpec::RatioPow(alpha),
        "walpha" => SamplerSpec::WAlpha(alpha),
        "gamma" => SamplerSpec::Gamma(alpha),
        "uniformpow" => SamplerSpec::UniformPow(alpha),
        "beta" => SamplerSpec::Beta(alpha, beta),
        "xrational" => {
            let (p, q) = rational()?;
            SamplerSpec::XRational(p, q)
        }
        "yalpha" => {
            let (p, q) = rational()?;
            SamplerSpec::YAlpha(p, q)
        }
        _ => return Err(Failure::Usage(format!("unknown sampler '{name}'"))),
    })
}

fn mc(a: McArgs) -> Outcome {
    let seed = Seed::new(seed_value(a.seed)?, a.stream);
    let lambdas = parse_grid(&a.lambdas)?;
    if let Some(name) = &a.sampler {
        let batch = sample(sampler_spec(name, a.alpha, a.beta)?, a.n, seed)?;
        let mut s = String::from("lambda,estimate,std_error\n");
        for &l in lambdas.points() {
            let e = empirical_laplace(&batch, l)?;
            s.push_str(&format!("{},{},{}\n", num(Some(l)), num(Some(e.estimate)), num(Some(e.std_error))));
        }
        emit(&a.out, &s)?;
        return Ok(());
    }
    let name = a.identity.as_deref().unwrap_or_default();
    let id = McIdentity::parse(name, a.alpha, a.beta)?;
    let rows = if a.perturb == 0.0 {
        mc_verify(id, a.n, seed, &lambdas)?
    } else {
        mc_verify_perturbed(id, a.n, seed, &lambdas, a.perturb)?
    };
    let mut s = String::from("lambda,lhs,rhs,std_error,sigmas,band,status\n");
    for r in &rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            num(r.lambda),
            num(Some(r.lhs)),
            num(Some(r.rhs)),
            num(Some(r.std_error)),
            num(Some(r.sigmas)),
            num(Some(r.band)),
            status(r.passed)
        ));
    }
    emit(&a.out, &s)?;
    if rows.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn density_spec(kind: &str, alpha: f64, beta: f64) -> std::result::Result<DensitySpec, Failure> {
    use DensitySpec::*;
    let spec = match kind.to_ascii_lowercase().as_str() {
        "falpha" => FAlpha(alpha),
        "fhat" => FHat(alpha),
        "exadensity" => ExaDensity(alpha),
        "talpha" => TAlpha(alpha),
        "eaxxdensity" => EaxxDensity(alpha),
        "upowdensity" => UPowDensity(alpha),
        "upowsizebias" => UPowSizeBias(alpha),
        "tildefalpha" => TildeFAlpha(alpha),
        "halphabeta" => HAlphaBeta { alpha, beta },
        "hankelbracket" => HankelBracket { alpha, beta },
        "galpha" => GAlpha(alpha),
        "tildegalpha" => TildeGAlpha(alpha),
        "remark2line1" => Remark2Line1,
        "remark2line3" => Remark2Line3,
        "betakernel" => BetaKernel { a: alpha, b: beta },
        "gammadensity" => GammaDensity(alpha),
        "composed" => compose_bernstein(AlphaBeta::new(alpha, beta)?)?,
        _ => return Err(Failure::Usage(format!("unknown density kind '{kind}'"))),
    };
    spec.validate()?;
    Ok(spec)
}

fn densities(kind: &str, alpha: f64, beta: f64, grid: &str, out: Option<String>) -> Outcome {
    let g = parse_grid(grid)?;
    let stable = kind.eq_ignore_ascii_case("stable");
    let spec = if stable { None } else { Some(density_spec(kind, alpha, beta)?) };
    let mut s = String::from("t,value\n");
    for &t in g.points() {
        let v = match &spec {
            Some(spec) => spec.eval(t)?,
            None => stable_density(alpha, t)?,
        };
        s.push_str(&format!("{},{}\n", num(Some(t)), num(Some(v))));
    }
    emit(&out, &s)?;
    Ok(())
}
