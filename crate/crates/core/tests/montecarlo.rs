use approx::assert_relative_eq;
use necktie::bernstein::DensitySpec;
use necktie::montecarlo::*;
use necktie::quad::{self, QuadratureConfig};
use necktie::specfun::regularized_lower_gamma;
use necktie::verify::Grid;
use necktie::Error;
use proptest::prelude::*;

const N: usize = 1_000_000;

fn seed() -> Seed {
    Seed::default()
}

fn lambdas() -> Grid {
    Grid::new(vec![0.5, 1.0, 1.5]).unwrap()
}

fn within(est: MeanEstimate, target: f64, k: f64) {
    assert!(
        (est.estimate - target).abs() <= k * est.std_error,
        "{} vs {target}, se {}",
        est.estimate,
        est.std_error
    );
}

#[test]
fn stable_laplace_normalization() {
    for a in [0.3, 0.5, 0.8] {
        let b = sample(SamplerSpec::Stable(a), N, seed()).unwrap();
        within(empirical_laplace(&b, 1.0).unwrap(), (-1.0f64).exp(), 4.0);
    }
}

#[test]
fn x_rational_one_half_has_mean_four() {
    let b = sample(SamplerSpec::XRational(1, 2), N, seed()).unwrap();
    within(mean_se(b.values.iter().copied()), 4.0, 4.0);
    let r = mc_verify(McIdentity::XMean(2, 3), N, seed(), &lambdas()).unwrap();
    assert!(r[0].passed, "{:?}", r[0]);
}

#[test]
fn ml_one_is_exponential() {
    let b = sample(SamplerSpec::ML(1.0), N, seed()).unwrap();
    for l in [0.5, 1.0, 3.0] {
        within(empirical_laplace(&b, l).unwrap(), 1.0 / (1.0 + l), 4.0);
    }
    let b = sample(SamplerSpec::ML(0.7), N, seed()).unwrap();
    within(empirical_laplace(&b, 1.0).unwrap(), 0.5, 4.0);
}

#[test]
fn ratio_pow_median_is_one() {
    for g in [0.3, 0.5, 0.8] {
        let mut v = sample(SamplerSpec::RatioPow(g), 200_001, seed()).unwrap().values;
        v.sort_by(f64::total_cmp);
        let below = v.iter().filter(|&&x| x < 1.0).count() as f64 / v.len() as f64;
        // binomial sd of the fraction is about 0.0011
        assert!((below - 0.5).abs() < 0.0045, "gamma {g}: {below}");
    }
}

#[test]
fn empirical_laplace_at_zero() {
    let b = sample(SamplerSpec::Gamma(2.0), 10, seed()).unwrap();
    let e = empirical_laplace(&b, 0.0).unwrap();
    assert_eq!(e.estimate, 1.0);
    assert_eq!(e.std_error, 0.0);
    assert!(matches!(empirical_laplace(&b, -1.0), Err(Error::Domain(_))));
}

#[test]
fn beta_gamma_and_uniform_power_moments() {
    let b = sample(SamplerSpec::Beta(2.0, 3.0), N, seed()).unwrap();
    within(mean_se(b.values.iter().copied()), 0.4, 4.0);
    let b = sample(SamplerSpec::Gamma(2.5), N, seed()).unwrap();
    within(mean_se(b.values.iter().copied()), 2.5, 4.0);
    let b = sample(SamplerSpec::UniformPow(3.0), N, seed()).unwrap();
    within(mean_se(b.values.iter().copied()), 0.25, 4.0);
}

#[test]
fn stable_half_histogram_matches_density() {
    let b = sample(SamplerSpec::Stable(0.5), N, seed()).unwrap();
    // P(Z_{1/2} ≤ x) = erfc(1/(2√x)) = 1 − P(1/2, 1/(4x))
    let cdf = |x: f64| 1.0 - regularized_lower_gamma(0.5, 0.25 / x).unwrap();
    let h = log_histogram(&b, 0.03, 1e4, 50, |a, c| Ok(cdf(c) - cdf(a))).unwrap();
    assert!(h.max_sigmas <= 5.0, "{}", h.max_sigmas);
}

#[test]
fn upow_histogram_matches_density() {
    let a = 1.5;
    let mut b = sample(SamplerSpec::RatioPow(a - 1.0), N, seed()).unwrap();
    for v in &mut b.values {
        *v = v.powf(1.0 / a);
    }
    let spec = DensitySpec::UPowDensity(a);
    let cfg = QuadratureConfig::default();
    let h = log_histogram(&b, 1e-3, 1e3, 50, |lo, hi| {
        Ok(quad::finite(|t| spec.eval(t).unwrap(), lo, hi, &cfg)?.value)
    })
    .unwrap();
    assert!(h.max_sigmas <= 5.0, "{}", h.max_sigmas);
}

#[test]
fn histogram_detects_wrong_law() {
    let b = sample(SamplerSpec::Stable(0.55), N, seed()).unwrap();
    let cdf = |x: f64| 1.0 - regularized_lower_gamma(0.5, 0.25 / x).unwrap();
    let h = log_histogram(&b, 0.03, 1e4, 50, |a, c| Ok(cdf(c) - cdf(a))).unwrap();
    assert!(h.max_sigmas > 10.0);
}

#[test]
fn sampling_is_deterministic() {
    let specs = [
        SamplerSpec::Stable(0.6),
        SamplerSpec::YAlpha(2, 3),
        SamplerSpec::WAlpha(0.6),
        SamplerSpec::ML(0.4),
    ];
    for s in specs {
        let a = sample(s, 1000, Seed::new(7, 3)).unwrap();
        let b = sample(s, 1000, Seed::new(7, 3)).unwrap();
        assert_eq!(a, b);
        let c = sample(s, 1000, Seed::new(7, 4)).unwrap();
        assert_ne!(a.values, c.values);
    }
}

#[test]
fn sampler_parameter_errors() {
    let bad = [
        SamplerSpec::Stable(1.0),
        SamplerSpec::Stable(0.0),
        SamplerSpec::Beta(0.0, 1.0),
        SamplerSpec::Gamma(-1.0),
        SamplerSpec::UniformPow(0.0),
        SamplerSpec::XRational(2, 2),
        SamplerSpec::YAlpha(1, 13),
        SamplerSpec::RatioPow(1.5),
        SamplerSpec::WAlpha(0.4),
        SamplerSpec::ML(1.2),
        SamplerSpec::MAlpha(1.0),
    ];
    for s in bad {
        assert!(matches!(sample(s, 10, seed()), Err(Error::Parameter(_))), "{s:?}");
    }
    assert!(sample(SamplerSpec::Gamma(1.0), 0, seed()).is_err());
    assert!(sample(SamplerSpec::Gamma(1.0), MAX_SAMPLES + 1, seed()).is_err());
}

#[test]
fn rational_alpha_parsing() {
    assert_eq!(as_rational(2.0 / 3.0).unwrap(), (2, 3));
    assert_eq!(as_rational(0.5).unwrap(), (1, 2));
    assert_eq!(as_rational(0.75).unwrap(), (3, 4));
    assert!(matches!(as_rational(std::f64::consts::FRAC_1_SQRT_2), Err(Error::Parameter(_))));
    assert!(matches!(
        McIdentity::parse("Factor_daa", 0.7072, 0.0),
        Err(Error::Parameter(_))
    ));
    assert_eq!(McIdentity::parse("sabb", 1.5, 2.0).unwrap(), McIdentity::Sabb(1.5, 2.0));
}

#[test]
fn pollard_identity() {
    let r = mc_verify(McIdentity::Pollard(0.6), N, seed(), &Grid::new(vec![1.0]).unwrap()).unwrap();
    assert!(r[0].passed && r[0].sigmas.abs() <= 4.0, "{:?}", r[0]);
    // E_{0.6}(-1), mpmath
    assert_relative_eq!(r[0].rhs, 0.413327340943106297, max_relative = 1e-12);
}

#[test]
fn identities_hold_within_band() {
    let ids = [
        McIdentity::StableLT(0.5),
        McIdentity::MLLT(0.7),
        McIdentity::ML2LT(1.5),
        McIdentity::ML2LT(2.0),
        McIdentity::SizeBias(0.4),
        McIdentity::MABFactor(0.6),
        McIdentity::Sabb(1.5, 2.0),
        McIdentity::Exx(0.7),
        McIdentity::Eaxx(1.5),
        McIdentity::Prop1(0.6),
    ];
    for id in ids {
        for r in mc_verify(id, N, seed(), &lambdas()).unwrap() {
            assert!(r.passed, "{id:?}: {r:?}");
        }
    }
}

#[test]
fn ml2_at_two_is_exact() {
    for r in mc_verify(McIdentity::ML2LT(2.0), 1000, seed(), &lambdas()).unwrap() {
        let l = r.lambda.unwrap();
        assert_relative_eq!(r.lhs, 1.0 / (1.0 + l), max_relative = 1e-14);
        assert_relative_eq!(r.rhs, 1.0 / (1.0 + l), max_relative = 1e-9);
    }
}

#[test]
fn factorization_small_sample() {
    let r = mc_verify(McIdentity::FactorDaa(2, 3), 20_000, seed(), &Grid::new(vec![1.0]).unwrap()).unwrap();
    assert!(r[0].passed, "{:?}", r[0]);
}

#[test]
fn corrupted_sampler_is_detected() {
    let g = lambdas();
    for id in [McIdentity::Pollard(0.6), McIdentity::SizeBias(0.6), McIdentity::StableLT(0.5)] {
        let r = mc_verify_perturbed(id, N, seed(), &g, 0.05).unwrap();
        let worst = r.iter().map(|r| r.sigmas.abs()).fold(0.0, f64::max);
        assert!(worst > 10.0, "{id:?}: {worst}");
    }
}

#[test]
fn identity_parameter_errors() {
    let g = lambdas();
    for id in [
        McIdentity::Pollard(1.0),
        McIdentity::ML2LT(2.5),
        McIdentity::Sabb(1.5, 0.5),
        McIdentity::Exx(1.2),
        McIdentity::Eaxx(0.5),
        McIdentity::Prop1(0.4),
        McIdentity::FactorDaa(3, 3),
    ] {
        assert!(matches!(mc_verify(id, 10, seed(), &g), Err(Error::Parameter(_))), "{id:?}");
    }
    assert!(mc_verify_perturbed(McIdentity::XMean(1, 2), 10, seed(), &g, 0.05).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn draws_are_positive_and_finite(a in 0.05f64..0.95, v in any::<u64>(), st in 0u64..1000) {
        for s in [SamplerSpec::Stable(a), SamplerSpec::MAlpha(a), SamplerSpec::ML(a), SamplerSpec::RatioPow(a)] {
            let b = sample(s, 200, Seed::new(v, st)).unwrap();
            prop_assert!(b.values.iter().all(|x| x.is_finite() && *x > 0.0));
        }
    }

    #[test]
    fn empirical_laplace_is_decreasing_in_lambda(a in 0.1f64..0.9, l in 0.01f64..5.0) {
        let b = sample(SamplerSpec::Stable(a), 500, seed()).unwrap();
        let e1 = empirical_laplace(&b, l).unwrap().estimate;
        let e2 = empirical_laplace(&b, 1.1 * l).unwrap().estimate;
        prop_assert!(e2 <= e1 && e1 <= 1.0 && e2 > 0.0);
    }
}
