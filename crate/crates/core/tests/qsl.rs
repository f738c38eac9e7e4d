use std::f64::consts::PI;

use coherent_transport::qsl::{bbb_asymptote, bbb_vs_bounds, default_r_grid, log_grid, qsl_report, QslRow};
use proptest::prelude::*;

fn reports(omega: f64, d: f64, grid: &[f64]) -> Vec<coherent_transport::qsl::QslReport> {
    bbb_vs_bounds(omega, d, grid)
        .unwrap()
        .into_iter()
        .filter_map(|row| match row {
            QslRow::Report(r) => Some(r),
            QslRow::Skipped { .. } => None,
        })
        .collect()
}

#[test]
fn bbb_respects_both_bounds_over_default_grid() {
    let d = 3.0;
    let rows = reports(1.0, d, &default_r_grid(d).unwrap());
    assert_eq!(rows.len(), 500);
    assert!((rows[0].tau_bbb - 2.0 * PI / 3.0).abs() < 1e-12);
    for r in &rows {
        assert!(r.tau_bbb > r.tau_mt && r.tau_mt > r.tau_ml, "R = {}", r.r);
        assert!(r.tau_bbb > r.tau_mt_exact);
        assert!((r.amplitude - r.r).abs() < 1e-9 * r.r);
        if r.r >= 50.0 * d {
            assert!((r.tau_bbb / r.asymptote - 1.0).abs() < 0.01, "R = {}", r.r);
        }
    }
    assert!(rows.windows(2).all(|w| w[1].tau_bbb < w[0].tau_bbb));
}

#[test]
fn asymptote_reached_far_out() {
    for d in [1.0, 3.0, 10.0] {
        let r = 1e3 * d;
        let t = qsl_report(2.0, r, d).unwrap().tau_bbb;
        assert!((t * r.sqrt() / (2.0 * d.sqrt() / 2.0) - 1.0).abs() < 1e-3);
        assert!((t / bbb_asymptote(2.0, r, d) - 1.0).abs() < 1e-3);
    }
}

#[test]
fn infeasible_rows_are_skipped() {
    let rows = bbb_vs_bounds(1.0, 8.0, &log_grid(0.5, 80.0, 50).unwrap()).unwrap();
    let skipped = rows.iter().filter(|r| matches!(r, QslRow::Skipped { .. })).count();
    assert!(skipped > 0 && skipped < rows.len());
}

proptest! {
    #[test]
    fn exact_ordering_holds_above_unit_displacement(d in 0.01..50.0f64, omega in 0.1..10.0f64, k in 0.0..1.0f64) {
        let r = (d / 4.0).max(1.0) * (100.0f64).powf(k);
        let rep = qsl_report(omega, r, d).unwrap();
        prop_assert!(rep.tau_bbb >= rep.tau_mt_exact && rep.tau_mt_exact >= rep.tau_ml_exact);
        prop_assert!(rep.tau_mt_exact <= rep.tau_mt && rep.tau_ml_exact <= rep.tau_ml);
    }

    #[test]
    fn approximate_ordering_holds_once_states_are_orthogonal(d in 3.0..50.0f64, omega in 0.1..10.0f64, k in 0.0..1.0f64) {
        // The pi/2 form assumes near-orthogonal endpoints, which needs D of a few widths.
        let r = (d / 4.0).max(1.0) * (100.0f64).powf(k);
        let rep = qsl_report(omega, r, d).unwrap();
        prop_assert!(rep.tau_bbb >= rep.tau_mt && rep.tau_mt >= rep.tau_ml);
    }
}

#[test]
fn approximate_bound_fails_for_overlapping_endpoints() {
    let rep = qsl_report(1.0, 1.0, 0.1).unwrap();
    assert!(rep.tau_bbb < rep.tau_mt);
    assert!(rep.tau_bbb > rep.tau_mt_exact);
}
