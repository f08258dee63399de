//! Statistics checked against reference values from tests/oracle/fixtures.py
//! and against closed forms.

use emi_core::stats::{
    adf_test, hac_se, jarque_bera, kpss_test, lagged_crosscorr, mann_whitney, ols_xy, pearson, pearson_ci, roc_auc,
    vif, PValueMethod, StatsError, UnitRootTables,
};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn hac_five_points_bandwidth_one() {
    let x = [1.0, 2.0, 4.0, 3.0, 5.0];
    let y = [1.2, 1.9, 4.1, 2.8, 5.3];
    let fit = ols_xy(&y, &[("x", &x)], true).unwrap();
    let h = hac_se(&fit, Some(1)).unwrap();
    let want = [0.18478095139921688, 0.050754310161797836];
    for j in 0..2 {
        assert!(close(h.se[j], want[j], 1e-10), "{} vs {}", h.se[j], want[j]);
    }
    assert!(close(fit.coefficients[0], -0.06, 1e-10));
    assert!(close(fit.coefficients[1], 1.04, 1e-10));
}

#[test]
fn ols_six_rows_normal_equations() {
    let x1 = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let x2 = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0];
    let y = [3.0, 5.0, 4.0, 9.0, 8.0, 12.0];
    let fit = ols_xy(&y, &[("x1", &x1), ("x2", &x2)], true).unwrap();
    // exact rational solution 19/12, 31/12, -13/12
    let want = [19.0 / 12.0, 31.0 / 12.0, -13.0 / 12.0];
    for j in 0..3 {
        assert!(close(fit.coefficients[j], want[j], 1e-10));
    }
    // residuals orthogonal to every regressor
    for col in [&[1.0; 6][..], &x1, &x2] {
        let dot: f64 = col.iter().zip(&fit.residuals).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-9);
    }
}

#[test]
fn kpss_ten_points() {
    let x = [0.3, -0.1, 0.8, 1.1, 0.4, 0.9, 1.5, 1.2, 0.7, 1.9];
    let r = kpss_test(&x, None, &UnitRootTables::shipped()).unwrap();
    assert_eq!(r.bandwidth, 2);
    assert!(close(r.stat, 0.47006434041930895, 1e-10));
    // between the 0.463 and 0.574 critical values
    assert_eq!((r.band.p_low, r.band.p_high), (Some(0.025), Some(0.05)));
}

#[test]
fn kpss_constant_series_is_degenerate() {
    assert!(matches!(
        kpss_test(&[1.5; 20], None, &UnitRootTables::shipped()),
        Err(StatsError::ZeroVariance(_))
    ));
}

fn ar_fixture() -> Vec<f64> {
    let mut a = vec![0.0; 60];
    for t in 1..60 {
        let tf = t as f64;
        a[t] = 0.6 * a[t - 1] + (1.7 * tf).sin() + 0.3 * (0.9 * tf * tf).cos();
    }
    a
}

#[test]
fn adf_matches_reference_with_aic_lag_selection() {
    let r = adf_test(&ar_fixture(), Some(10), &UnitRootTables::shipped()).unwrap();
    assert_eq!(r.used_lag, 8);
    assert_eq!(r.nobs, 51);
    assert!(close(r.stat, -1.7886352609122778, 1e-9), "{}", r.stat);
    assert!(close(r.p, 0.3861183895686005, 1e-9), "{}", r.p);
    let want = [-3.5656240522121956, -2.920142229157715, -2.598014675124952];
    for (c, w) in r.critical.iter().zip(want) {
        assert!(close(c.1, w, 1e-12));
    }
}

#[test]
fn adf_default_lag_matches_explicit_rule() {
    // floor(12 * 0.6^(1/4)) = 10
    let a = adf_test(&ar_fixture(), None, &UnitRootTables::shipped()).unwrap();
    let b = adf_test(&ar_fixture(), Some(10), &UnitRootTables::shipped()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn adf_on_walk() {
    let mut s = 0.0;
    let walk: Vec<f64> = (0..80)
        .map(|i| {
            let i = i as f64;
            s += (0.7 * i * i).sin() + 0.2 * (1.3 * i).cos();
            s
        })
        .collect();
    let r = adf_test(&walk, Some(3), &UnitRootTables::shipped()).unwrap();
    assert_eq!(r.used_lag, 0);
    assert!(close(r.stat, -1.7636366058956772, 1e-9));
    assert!(close(r.p, 0.39865861793686824, 1e-9));
}

#[test]
fn adf_needs_ten_points() {
    assert!(matches!(
        adf_test(&[1.0, 2.0, 0.5], None, &UnitRootTables::shipped()),
        Err(StatsError::InsufficientData { .. })
    ));
}

#[test]
fn adf_pvalue_surface_edges() {
    let t = UnitRootTables::shipped();
    assert_eq!(t.adf_pvalue(3.0), 1.0);
    assert_eq!(t.adf_pvalue(-20.0), 0.0);
    // continuous enough across the branch point
    assert!((t.adf_pvalue(-1.61) - t.adf_pvalue(-1.6099999)).abs() < 1e-3);
}

#[test]
fn jarque_bera_reference() {
    let x = [0.1, -1.3, 2.2, 0.4, 0.0, 3.1, -0.7, 0.9, 1.6, -2.5, 0.2];
    let r = jarque_bera(&x).unwrap();
    assert!(close(r.stat, 0.08540505833627195, 1e-10));
    assert!(close(r.p, 0.9581963831515493, 1e-10));
}

#[test]
fn jarque_bera_two_point_closed_form() {
    for n in [8usize, 20, 100] {
        let x: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(jarque_bera(&x).unwrap().stat, n as f64 / 6.0);
    }
}

#[test]
fn mann_whitney_exact_reference() {
    let a = [1.1, 3.4, 2.2, 5.9, 0.3, 4.4];
    let b = [2.8, 6.1, 7.3, 3.9, 5.2, 8.8, 6.6];
    let r = mann_whitney(&a, &b).unwrap();
    assert_eq!(r.method, PValueMethod::Exact);
    assert_eq!(r.u, 6.0);
    assert!(close(r.p, 0.03496503496503496, 1e-12));
    assert_eq!(r.median_a, 2.8);
    assert_eq!(r.median_b, 6.1);
}

#[test]
fn mann_whitney_normal_reference() {
    let a: Vec<f64> = (0..25).map(|i| ((i * 7) % 13) as f64).collect();
    let b: Vec<f64> = (0..30).map(|i| ((i * 5) % 11 + 1) as f64).collect();
    let r = mann_whitney(&a, &b).unwrap();
    assert_eq!(r.method, PValueMethod::Normal);
    assert_eq!(r.u, 372.5);
    assert!(close(r.p, 0.9729427791164632, 1e-10));
}

#[test]
fn pearson_reference() {
    let x = [0.5, 1.9, 2.2, 3.8, 4.1, 5.5, 6.3, 7.0];
    let y = [1.0, 1.7, 3.5, 3.1, 5.2, 4.8, 7.9, 6.6];
    let c = pearson_ci(&x, &y, 0.95).unwrap();
    assert!(close(c.r, 0.919540019304782, 1e-12));
    assert!(close(c.p, 0.0012248891828524969, 1e-9));
    assert!(close(c.ci_low, 0.6103744488769297, 1e-9));
    assert!(close(c.ci_high, 0.9855810852232114, 1e-9));
}

#[test]
fn vif_orthogonal_design_is_exactly_one() {
    // centered, mutually orthogonal columns
    let a = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
    let b = [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
    let c = [1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0];
    for e in vif(&[("a", &a), ("b", &b), ("c", &c)]).unwrap() {
        assert_eq!(e.vif, 1.0);
    }
}

fn finite_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, n)
}

proptest! {
    #[test]
    fn auc_is_normalized_u(scores in finite_vec(30), labels in prop::collection::vec(any::<bool>(), 30)) {
        prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
        let pos: Vec<f64> = scores.iter().zip(&labels).filter(|(_, &l)| l).map(|(s, _)| *s).collect();
        let neg: Vec<f64> = scores.iter().zip(&labels).filter(|(_, &l)| !l).map(|(s, _)| *s).collect();
        let u = mann_whitney(&pos, &neg).unwrap().u;
        prop_assert_eq!(roc_auc(&scores, &labels).unwrap(), u / (pos.len() * neg.len()) as f64);
    }

    #[test]
    fn crosscorr_is_lag_antisymmetric(x in finite_vec(25), y in finite_vec(25)) {
        let xy = lagged_crosscorr(&x, &y, 5, 0.95).unwrap();
        let yx = lagged_crosscorr(&y, &x, 5, 0.95).unwrap();
        for l in &xy.lags {
            let m = yx.at(-l.lag).unwrap();
            prop_assert_eq!(l.r, m.r);
        }
    }

    #[test]
    fn pearson_invariant_to_positive_affine_maps(x in finite_vec(12), y in finite_vec(12), a in 0.1f64..10.0, b in -5.0f64..5.0) {
        let r = pearson(&x, &y);
        prop_assume!(r.is_ok());
        let xs: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        prop_assert!((pearson(&xs, &y).unwrap() - r.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn unit_root_stats_invariant_to_scaling(x in finite_vec(40), a in 0.01f64..100.0) {
        let t = UnitRootTables::shipped();
        let xs: Vec<f64> = x.iter().map(|v| a * v).collect();
        let (k1, k2) = (kpss_test(&x, None, &t).unwrap(), kpss_test(&xs, None, &t).unwrap());
        prop_assert!((k1.stat - k2.stat).abs() <= 1e-8 * k1.stat.abs().max(1.0));
        let (a1, a2) = (adf_test(&x, None, &t).unwrap(), adf_test(&xs, None, &t).unwrap());
        prop_assert_eq!(a1.used_lag, a2.used_lag);
        prop_assert!((a1.stat - a2.stat).abs() <= 1e-7 * a1.stat.abs().max(1.0));
    }

    #[test]
    fn r2_grows_with_regressors(y in finite_vec(20), x1 in finite_vec(20), x2 in finite_vec(20)) {
        let small = ols_xy(&y, &[("x1", &x1)], true);
        let big = ols_xy(&y, &[("x1", &x1), ("x2", &x2)], true);
        if let (Ok(s), Ok(b)) = (small, big) {
            prop_assert!(b.r2 >= s.r2 - 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&b.r2));
        }
    }
}
