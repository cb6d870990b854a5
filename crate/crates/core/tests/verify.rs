use approx::assert_relative_eq;
use necktie::bernstein::DensitySpec;
use necktie::mlcore::{d_func, ml, AlphaBeta, ThmBDiff};
use necktie::quad::QuadratureConfig;
use necktie::verify::*;
use necktie::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

fn ab(a: f64, b: f64) -> AlphaBeta {
    AlphaBeta::new(a, b).unwrap()
}

fn x_grid() -> Grid {
    Grid::linear(0.1, 5.0, 20).unwrap()
}

#[test]
fn grid_construction() {
    let g = Grid::linear(0.1, 5.0, 20).unwrap();
    assert_eq!(g.len(), 20);
    assert_eq!(g.points()[0], 0.1);
    assert_eq!(g.points()[19], 5.0);
    let l = Grid::log(1e-3, 1e3, 7).unwrap();
    assert_relative_eq!(l.points()[3], 1.0, max_relative = 1e-14);
    assert!(Grid::new(vec![]).is_err());
    assert!(Grid::new(vec![1.0, 1.0]).is_err());
    assert!(Grid::new(vec![-1.0, 1.0]).is_err());
    assert!(Grid::log(0.0, 1.0, 3).is_err());
}

#[test]
fn laplace_quad_examples() {
    let cfg = QuadratureConfig::default();
    let v = laplace_quad(&DensitySpec::FAlpha(0.5), 1.0, &cfg).unwrap();
    assert_relative_eq!(v, 1.0 / PI.sqrt(), max_relative = 1e-12);
    let v = laplace_quad(&DensitySpec::TAlpha(2.0), 1.7, &cfg).unwrap();
    assert_relative_eq!(v, (-1.7f64).exp(), max_relative = 1e-15);
    let v = laplace_quad(&DensitySpec::GammaDensity(1.0), 3.0, &cfg).unwrap();
    assert_relative_eq!(v, 0.25, max_relative = 1e-12);
}

#[test]
fn stieltjes_and_mellin_examples() {
    assert_relative_eq!(stieltjes_quad(&DensitySpec::ExaDensity(0.5), 4.0).unwrap(), 1.0 / 6.0, max_relative = 1e-10);
    assert!(stieltjes_quad(&DensitySpec::ExaDensity(0.5), 1e12).unwrap() < 1e-10);
    let m = mellin_quad(&DensitySpec::FAlpha(0.75), -0.5).unwrap();
    assert_relative_eq!(m, 8.0 * 3f64.sqrt() / 9.0, max_relative = 1e-10);
    let m = mellin_quad(&DensitySpec::BetaKernel { a: 2.0, b: 3.0 }, 1.0).unwrap();
    assert_relative_eq!(m, 0.4, max_relative = 1e-12);
    // s = −0.1 is the right edge of the strip (−0.3, 3·0.3 − 1)
    assert!(matches!(
        mellin_quad(&DensitySpec::TildeFAlpha(0.3), -0.1),
        Err(Error::StripViolation { .. })
    ));
}

#[test]
fn cm_check_examples() {
    let g = Grid::linear(0.2, 4.0, 12).unwrap();
    let r = cm_check(|x| Ok((-x).exp()), &g, 8).unwrap();
    assert!(r.passed && r.witness.is_none());
    assert_eq!(r.max_order_tested, 8);
    let r = cm_check(|x| Ok(x.sin()), &g, 8).unwrap();
    assert!(!r.passed);
    assert!(r.witness.is_some());
    // E_{0.6}(−x) leaves the 1e-10 cancellation budget of the series near x = 4
    let near = Grid::linear(0.2, 2.5, 12).unwrap();
    let r = cm_check(|x| ml(ab(0.6, 1.0), -x), &near, 8).unwrap();
    assert!(r.passed);
    assert!(cm_check(Ok, &g, 11).is_err());
}

#[test]
fn cm_check_reports_first_witness() {
    // 1/x − 0.5 turns negative at x = 2
    let g = Grid::new(vec![1.0, 1.5, 2.5, 3.0]).unwrap();
    let w = cm_check(|x| Ok(1.0 / x - 0.5), &g, 4).unwrap().witness.unwrap();
    assert_eq!((w.x, w.order), (2.5, 0));
    assert_relative_eq!(w.violation, 0.1, max_relative = 1e-12);
}

#[test]
fn classify_examples() {
    assert_eq!(classify(ab(0.6, 0.7)).tag, VerdictTag::DCm);
    assert_eq!(classify(ab(1.5, 1.2)).tag, VerdictTag::DbarCm);
    assert_eq!(classify(ab(0.3, 0.3)).tag, VerdictTag::DbarCm);
    assert_eq!(classify(ab(0.6, 0.5)).tag, VerdictTag::Neither);
    assert_eq!(classify(ab(1.0, 7.0)).tag, VerdictTag::ZeroFunction);
    assert_eq!(classify(ab(0.5, 0.5)).tag, VerdictTag::ZeroFunction);
    assert_eq!(classify(ab(3.0, 1.0)).tag, VerdictTag::NeitherOpenRegion);
    assert_eq!(classify(ab(1.5, 0.5)).tag, VerdictTag::Neither);
    assert_eq!(VerdictTag::DCm.name(), "D_CM");
}

#[test]
fn classify_boundaries() {
    let v = classify(ab(0.7, 0.7));
    assert_eq!(v.tag, VerdictTag::DCm);
    assert!(v.boundary);
    // 0.2 and 1 − 0.8 differ in the last bit
    let v = classify(ab(0.8, 0.2));
    assert_eq!(v.tag, VerdictTag::DbarCm);
    assert!(v.boundary);
    let v = classify(ab(1.5, 1.0));
    assert_eq!(v.tag, VerdictTag::DbarCm);
    assert!(v.boundary);
    assert!(!classify(ab(0.6, 0.9)).boundary);
}

#[test]
fn necktie_grid_shape() {
    let g = necktie_grid();
    assert_eq!(g.len(), 1600);
    assert_eq!(g[0], ab(0.05, 0.05));
    assert_eq!(g[1599], ab(2.0, 2.0));
}

#[test]
fn neither_witnesses() {
    // mpmath at 40 digits
    let s = sign_scan(ab(0.6, 0.5)).unwrap();
    let x = s.d_witness.unwrap();
    assert_eq!(x, 0.6294627058970838);
    assert_relative_eq!(d_func(ab(0.6, 0.5), x).unwrap(), -0.001119209829384008377, max_relative = 1e-10);
    assert!(s.dbar_witness.is_some() && s.consistent);

    let s = sign_scan(ab(1.5, 0.5)).unwrap();
    let x = s.dbar_witness.unwrap();
    assert_relative_eq!(d_func(ab(1.5, 0.5), x).unwrap(), 0.007824937747571172816, max_relative = 1e-10);
    assert!(s.consistent);

    // the positive part of D_{0.05,0.1} only shows up past x ≈ 10^5
    let s = sign_scan(ab(0.05, 0.1)).unwrap();
    let x = s.dbar_witness.unwrap();
    assert!(x > 1e5);
    assert_relative_eq!(d_func(ab(0.05, 0.1), x).unwrap(), 0.0005124922031167690045, max_relative = 1e-8);
    assert!(s.consistent);
}

#[test]
fn sign_scan_cm_cells() {
    for (a, b) in [(0.6, 0.7), (0.3, 0.2), (1.5, 1.5), (2.0, 1.0), (0.5, 0.5)] {
        let s = sign_scan(ab(a, b)).unwrap();
        assert!(s.consistent, "({a}, {b})");
    }
}

#[test]
fn representation_examples() {
    let g = x_grid();
    assert!(verify_representation(Representation::B1, ab(0.7, 1.0), &g).unwrap() < 1e-6);
    let rows = representation_rows(Representation::Exa, ab(0.5, 1.0), &g).unwrap();
    for r in &rows {
        let e = ml(ab(0.5, 1.0), -r.x.sqrt()).unwrap();
        assert_relative_eq!(r.lhs, e, max_relative = 1e-9);
        assert_relative_eq!(r.rhs, e, max_relative = 1e-9);
    }
    assert!(verify_representation(Representation::Dbar41, ab(4.0, 1.0), &g).unwrap() < 1e-10);
}

#[test]
fn representations_at_acceptance_parameters() {
    let g = x_grid();
    let cases = [
        (Representation::B1, ab(0.6, 1.0)),
        (Representation::B1, ab(0.9, 1.0)),
        (Representation::Exa, ab(0.3, 1.0)),
        (Representation::FHat, ab(0.7, 1.0)),
        (Representation::B2, ab(1.25, 1.0)),
        (Representation::Eaxx, ab(1.5, 1.0)),
        (Representation::UPow, ab(1.75, 1.0)),
        (Representation::SizeBias, ab(1.5, 1.0)),
        (Representation::Composite, ab(1.5, 2.0)),
        (Representation::Composite, ab(0.7, 1.4)),
        (Representation::Bracket, ab(0.7, 0.5)),
        (Representation::Bracket, ab(1.5, 1.5)),
        (Representation::Bracket, ab(0.4, 1.2)),
        (Representation::Remark2Line1, ab(1.5, 1.5)),
        (Representation::Remark2Line3, ab(1.5, 1.5)),
        (Representation::Rescaled, ab(0.7, 0.9)),
        (Representation::Rescaled, ab(0.4, 0.7)),
        (Representation::Prop1, ab(0.6, 1.0)),
    ];
    for (rep, p) in cases {
        let e = verify_representation(rep, p, &g).unwrap();
        assert!(e < 1e-6, "{} {:?}: {e:e}", rep.name(), p);
    }
}

#[test]
fn representation_domain_errors() {
    let g = x_grid();
    assert!(verify_representation(Representation::B1, ab(1.5, 1.0), &g).is_err());
    assert!(verify_representation(Representation::Eaxx, ab(0.5, 1.0), &g).is_err());
    assert!(matches!(
        verify_representation(Representation::Composite, ab(0.6, 0.5), &g),
        Err(Error::Region { .. })
    ));
    assert!(matches!(
        verify_representation(Representation::Composite, ab(0.7, 0.8), &g),
        Err(Error::NotEvaluable(_))
    ));
    assert_eq!(Representation::parse("dbar41"), Some(Representation::Dbar41));
}

#[test]
fn closed_identities() {
    let g = x_grid();
    for b in [0.75, 1.0, 1.5] {
        assert!(max_error(&identity_rows(ClosedIdentity::DHalf, b, &g).unwrap()) < 1e-10);
    }
    for id in [ClosedIdentity::Dbar21, ClosedIdentity::Dbar41, ClosedIdentity::EHalfSum] {
        assert!(max_error(&identity_rows(id, 1.0, &g).unwrap()) < 1e-10, "{}", id.name());
    }
    for b in [1.5, 2.0] {
        assert!(max_error(&identity_rows(ClosedIdentity::ThmBAlphaOne, b, &g).unwrap()) < 1e-10);
        assert!(max_error(&identity_rows(ClosedIdentity::IncTerm, b, &g).unwrap()) < 1e-10);
    }
    assert!(identity_rows(ClosedIdentity::IncTerm, 1.0, &g).is_err());
}

#[test]
fn closed_laplace_examples() {
    assert_relative_eq!(closed_laplace(ClosedLaplace::DA1, 0.5, 4.0).unwrap(), 0.5, max_relative = 1e-15);
    assert_relative_eq!(closed_laplace(ClosedLaplace::DA1, 0.3, 1.0).unwrap(), 7.0 / 3.0, max_relative = 1e-15);
    assert_eq!(closed_laplace(ClosedLaplace::ThmBA, 1.0, 2.0).unwrap(), 0.0);
    // limit (1 − α)/(2α) at s = 1
    assert_relative_eq!(closed_laplace(ClosedLaplace::ThmBA, 0.6, 1.0).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
    assert!(closed_laplace(ClosedLaplace::DA1, 0.5, 0.0).is_err());
    let n = numeric_laplace(ClosedLaplace::DA1, 0.5, 4.0).unwrap();
    assert_relative_eq!(n, 0.5, max_relative = 1e-9);
}

#[test]
fn closed_laplace_matches_quadrature() {
    for which in [ClosedLaplace::DA1, ClosedLaplace::ThmBA] {
        for a in [0.3, 0.6, 0.75] {
            for s in [0.5, 1.0, 2.0, 4.0] {
                let c = closed_laplace(which, a, s).unwrap();
                let n = numeric_laplace(which, a, s).unwrap();
                assert!(rel_err(c, n) < 1e-6, "{} {a} {s}: {c} vs {n}", which.name());
            }
        }
    }
}

#[test]
fn cm_families() {
    let g = Grid::linear(0.2, 4.0, 12).unwrap();
    let fams = [
        CmFamily::D(ab(0.6, 0.7)),
        CmFamily::D(ab(0.3, 0.7)),
        CmFamily::Dbar(ab(0.3, 0.3)),
        CmFamily::Dbar(ab(1.5, 1.0)),
        CmFamily::ThmB(ab(0.7, 1.5), ThmBDiff::TermMinusF),
        CmFamily::ThmB(ab(0.3, 1.0), ThmBDiff::LbfMinusTerm),
        CmFamily::ThmB(ab(1.5, 2.0), ThmBDiff::FMinusTerm),
        CmFamily::ThmB(ab(1.5, 1.0), ThmBDiff::TermMinusLbf),
        CmFamily::Rescaled(ab(0.7, 0.7)),
        CmFamily::Rescaled(ab(0.4, 0.6)),
        CmFamily::Prop1(0.5),
        CmFamily::Prop1(0.8),
    ];
    for f in fams {
        assert!(cm_check_family(&f, &g, 8).unwrap().passed, "{}", f.label());
    }
}

#[test]
fn prop1_fails_below_one_half() {
    // −Δ³ at x = 0.2, h = 0.002 from mpmath at 50 digits
    let g = Grid::linear(0.2, 4.0, 12).unwrap();
    let r = cm_check_family(&CmFamily::Prop1(0.4), &g, 8).unwrap();
    assert!(!r.passed);
    let w = r.witness.unwrap();
    assert_eq!(w.order, 3);
    assert_eq!(w.x, 0.2);
    assert_relative_eq!(w.violation, 2.4485024664449573e-8, max_relative = 1e-6);
}

#[test]
fn d_not_cm_outside_region() {
    let g = Grid::linear(0.2, 4.0, 12).unwrap();
    assert!(!cm_check_family(&CmFamily::D(ab(0.6, 0.5)), &g, 8).unwrap().passed);
    assert!(!cm_check_family(&CmFamily::Dbar(ab(0.6, 0.5)), &g, 8).unwrap().passed);
}

proptest! {
    #[test]
    fn verdict_regions_are_exclusive(a in 0.01f64..4.0, b in 0.01f64..2.0) {
        let v = classify(ab(a, b));
        let d_region = a < 1.0 && b >= a.max(1.0 - a);
        let dbar_region = (a > 1.0 && a <= 2.0 && b >= 1.0) || (a < 1.0 && b <= a.min(1.0 - a));
        prop_assume!(!v.boundary);
        match v.tag {
            VerdictTag::DCm => prop_assert!(d_region),
            VerdictTag::DbarCm => prop_assert!(dbar_region),
            VerdictTag::NeitherOpenRegion => prop_assert!(a > 2.0),
            VerdictTag::ZeroFunction => prop_assert!(a == 1.0),
            VerdictTag::Neither => prop_assert!(!d_region && !dbar_region),
        }
    }

    #[test]
    fn closed_laplace_continuous_at_one(a in 0.1f64..0.95, e in 1e-6f64..5e-4) {
        for which in [ClosedLaplace::DA1, ClosedLaplace::ThmBA] {
            let lo = closed_laplace(which, a, 1.0 - e).unwrap();
            let hi = closed_laplace(which, a, 1.0 + e).unwrap();
            let mid = closed_laplace(which, a, 1.0).unwrap();
            prop_assert!((lo - mid).abs() < 2e-3 * mid.abs() && (hi - mid).abs() < 2e-3 * mid.abs());
        }
    }

    #[test]
    fn cm_check_accepts_exponential_mixtures(c in 0.0f64..1.0, r1 in 0.1f64..3.0, r2 in 0.1f64..3.0) {
        let g = Grid::linear(0.2, 4.0, 12).unwrap();
        let rep = cm_check(|x| Ok(c * (-r1 * x).exp() + (1.0 - c) * (-r2 * x).exp()), &g, 8).unwrap();
        prop_assert!(rep.passed);
    }
}
