use approx::assert_relative_eq;
use necktie::mlcore::*;
use necktie::specfun::rgamma;
use proptest::prelude::*;

fn ab(a: f64, b: f64) -> AlphaBeta {
    AlphaBeta::new(a, b).unwrap()
}

// Reference values from 60-digit series sums.
#[test]
fn series_reference_values() {
    assert_relative_eq!(ml(ab(0.5, 1.0), -1.0).unwrap(), 0.427583576155807, max_relative = 1e-13);
    assert_relative_eq!(ml_deriv(0.5, 1.0).unwrap(), 11.14633932862008, max_relative = 1e-13);
    assert_relative_eq!(big_f(ab(0.5, 0.5), 1.0).unwrap(), 5.5731696643100398, max_relative = 1e-13);
    assert_relative_eq!(lb_big_f(ab(0.6, 0.8), 1.0).unwrap(), 4.6994592018427854, max_relative = 1e-13);
    assert_relative_eq!(tilde_d(0.3, 1.0).unwrap(), 0.18875341963364034, max_relative = 1e-12);
    for &(a, b, x, want) in &[
        (0.3, 0.7, 2.0, 0.41588489701234472),
        (0.75, 1.5, 3.0, 0.18765054494640083),
        (1.5, 0.5, 4.0, 0.053085077025973717),
        (0.4, 1.2, 7.0, 0.46292634782520901),
        (3.0, 1.5, 2.0, -0.53388814603467147),
    ] {
        assert_relative_eq!(d_func(ab(a, b), x).unwrap(), want, max_relative = 1e-11);
    }
}

#[test]
fn large_x_reference_values() {
    for &(a, b, x, want) in &[
        (0.3, 0.7, 25.0, 0.18401579697636652),
        (0.3, 0.7, 60.0, 0.1395620029907346),
        (1.5, 0.5, 40.0, 0.0070344203476313423),
        (0.4, 0.6, 12.0, 0.070211234044264132),
        (0.4, 0.6, 20.0, 0.058315616266170631),
        (0.95, 0.9, 1e5, 7.3743546204818304e-8),
        (0.3, 0.7, 1000.0, 0.058268977348119906),
    ] {
        assert_relative_eq!(d_func(ab(a, b), x).unwrap(), want, max_relative = 1e-9);
    }
    // no integral representation at α = 2: algebraic expansion
    assert_relative_eq!(d_func(ab(2.0, 0.5), 50.0).unwrap(), 0.0058202680349559122, max_relative = 1e-12);
    for &(a, b, x, w, want) in &[
        (0.5, 1.5, 20.0, ThmBDiff::FMinusTerm, -0.19605532316876763),
        (1.5, 1.5, 30.0, ThmBDiff::LbfMinusTerm, -0.0064667644496630779),
        (0.75, 1.0, 25.0, ThmBDiff::FMinusTerm, -0.022591275432587345),
    ] {
        assert_relative_eq!(thmb_diff(ab(a, b), x, w).unwrap(), want, max_relative = 1e-7);
    }
}

#[test]
fn closed_forms() {
    for i in 1..=50 {
        let x = i as f64 / 10.0;
        for &b in &[0.3, 1.0, 1.7] {
            assert_eq!(d_func(ab(1.0, b), x).unwrap(), 0.0);
        }
        for &b in &[0.75, 1.0, 1.5] {
            let want = x.powf(-0.5) * rgamma(b - 0.5);
            assert_relative_eq!(d_func(ab(0.5, b), x).unwrap(), want, max_relative = 1e-10);
        }
        assert!(d_func(ab(0.5, 0.5), x).unwrap().abs() < 1e-12);
        assert_relative_eq!(-d_func(ab(2.0, 1.0), x).unwrap(), (-x).exp(), max_relative = 1e-10);
        let want = ((-x).exp() + x.cos() + x.sin()) / 2.0;
        assert_relative_eq!(-d_func(ab(4.0, 1.0), x).unwrap(), want, max_relative = 1e-10);
        let s = x.sqrt();
        let sum = ml(ab(0.5, 1.0), -s).unwrap() + ml(ab(0.5, 1.0), s).unwrap();
        assert_relative_eq!(sum, 2.0 * x.exp(), max_relative = 1e-12);
        assert_relative_eq!(big_f(ab(2.0, 1.0), x).unwrap(), x.cosh(), max_relative = 1e-12);
        assert_relative_eq!(big_f(ab(2.0, 2.0), x).unwrap(), x.sinh() / x, max_relative = 1e-12);
        assert_relative_eq!(
            thmb_diff(ab(0.5, 1.0), x, ThmBDiff::TermMinusF).unwrap(),
            ml(ab(0.5, 1.0), -s).unwrap(),
            max_relative = 1e-10
        );
        for &b in &[1.0, 1.5, 2.0] {
            assert_relative_eq!(
                inc_term(ab(1.0, b), x).unwrap(),
                ml(ab(1.0, b), x).unwrap(),
                max_relative = 1e-12
            );
        }
        for w in ThmBDiff::ALL {
            assert_eq!(thmb_diff(ab(1.0, 1.3), x, w).unwrap(), 0.0);
        }
    }
    assert_relative_eq!(
        thmb_diff(ab(2.0, 1.0), 1.0, ThmBDiff::FMinusTerm).unwrap(),
        (-1f64).exp() / 2.0,
        max_relative = 1e-13
    );
}

#[test]
fn tilde_d_cases() {
    for &x in &[0.2, 1.0, 3.0] {
        assert_eq!(tilde_d(1.0 / 3.0, x).unwrap(), 0.0);
        assert_eq!(tilde_d(0.45, x).unwrap(), d_func(ab(0.45, 0.55), x).unwrap());
    }
    assert!(tilde_d(0.6, 1.0).is_err());
}

#[test]
fn tail_expansion_behaviour() {
    assert_eq!(tail_expansion(ab(1.0, 1.7), 5.0, 4).unwrap(), 0.0);
    // dominant summand for α = 1/2, β = 2 is −x^{−1/2}/Γ(3/2) < 0
    assert!(tail_expansion(ab(0.5, 2.0), 100.0, 1).unwrap() < 0.0);
    let exact = 0.048856654350090964;
    assert_relative_eq!(
        thmb_diff(ab(1.5, 2.0), 10.0, ThmBDiff::FMinusTerm).unwrap(),
        exact,
        max_relative = 1e-10
    );
    let approx3 = tail_expansion(ab(1.5, 2.0), 10.0, 3).unwrap();
    assert!((approx3 - exact).abs() < 10f64.powi(-4));
    for &(a, b) in &[(1.5, 2.0), (0.5, 2.0), (0.75, 1.5), (1.25, 1.0)] {
        let exact = thmb_diff(ab(a, b), 10.0, ThmBDiff::FMinusTerm).unwrap();
        let errs: Vec<f64> = (1..=4)
            .map(|n| (exact - tail_expansion(ab(a, b), 10.0, n).unwrap()).abs())
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0], "({a}, {b}): {errs:?}");
        }
        assert!(errs[3] < errs[0]);
    }
}

#[test]
fn theorem_b_signs() {
    for i in 0..=99 {
        let x = 0.05 + i as f64 * 0.05;
        for &b in &[1.0, 1.5, 2.0] {
            for &a in &[0.3, 0.5, 0.7] {
                assert!(thmb_diff(ab(a, b), x, ThmBDiff::TermMinusF).unwrap() >= -1e-12);
                assert!(thmb_diff(ab(a, b), x, ThmBDiff::LbfMinusTerm).unwrap() >= -1e-12);
            }
            for &a in &[1.25, 1.5, 2.0] {
                assert!(thmb_diff(ab(a, b), x, ThmBDiff::FMinusTerm).unwrap() >= -1e-12);
                assert!(thmb_diff(ab(a, b), x, ThmBDiff::TermMinusLbf).unwrap() >= -1e-12);
            }
        }
    }
}

fn lb_by_difference(p: AlphaBeta, x: f64) -> f64 {
    let h = 1e-4 * x;
    let d = (big_f(p, x + h).unwrap() - big_f(p, x - h).unwrap()) / (2.0 * h);
    d + (p.beta - 1.0) * (big_f(p, x).unwrap() - big_f(p, 0.0).unwrap()) / x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn d_is_lb_minus_f(a in 0.05f64..4.0, b in 0.05f64..2.0, x in 0.05f64..5.0) {
        prop_assume!(a != 1.0);
        let p = ab(a, b);
        let d = d_func(p, x).unwrap();
        prop_assert_eq!(d, lb_big_f(p, x).unwrap() - big_f(p, x).unwrap());
    }

    #[test]
    fn lb_matches_difference_quotient(a in 0.1f64..3.0, b in 0.1f64..2.0, x in 0.2f64..5.0) {
        let p = ab(a, b);
        let exact = lb_big_f(p, x).unwrap();
        let approx = lb_by_difference(p, x);
        prop_assert!((exact - approx).abs() <= 1e-6 * exact.abs().max(1.0), "{} vs {}", exact, approx);
    }

    #[test]
    fn hankel_and_series_agree(a in 0.1f64..1.95, b in 0.1f64..1.95, x in 0.5f64..8.0) {
        prop_assume!((a - 1.0).abs() > 1e-3 && b < 1.0 + a - 0.05);
        let s = lb_big_f(ab(a, b), x).unwrap() - big_f(ab(a, b), x).unwrap();
        let h = -dbar_hankel(a, b, x).unwrap();
        // the series loses about x·e^x·2^{−52} absolutely near the top of its range
        prop_assert!((s - h).abs() <= 1e-9 * s.abs().max(0.1), "{} vs {}", s, h);
    }
}
