//! Printed figures this implementation does not reproduce. They are kept as
//! strict checks and ignored; `cargo test -- --ignored` shows the gap.
//! The derived values are pinned by the passing tests below.

use confprop::fixtures;
use confprop::measures::{EvalConfig, Registry};
use confprop::negev::{self, Window};
use confprop::replay::ReplayPolicy;

fn value(id: &str, l: &str, m: &str) -> f64 {
    let r = Registry::standard();
    r.get(id).unwrap().eval(&fixtures::log(l), &fixtures::model(m), &EvalConfig::default()).unwrap().value().unwrap()
}

fn counts(l: &str) -> (f64, f64, f64) {
    let nl = negev::induce_negatives(&fixtures::log(l), Window::Max, false);
    let (c, _) = negev::confusion_replay(&nl, &fixtures::model("m10"), ReplayPolicy::default()).unwrap();
    (c.tp, c.fp, c.tn)
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-3
}

#[test]
#[ignore = "footprint tables of l8 and m4 differ in 6 cells, not 4"]
fn rec_a_l8_printed() {
    assert!(near(value("rec_A", "l8", "m4"), 0.88));
}

#[test]
#[ignore = "1 - 7/19 is 0.6316"]
fn rec_c_l12_printed() {
    assert!(near(value("rec_C", "l12", "m4"), 0.64));
}

#[test]
#[ignore = "derived escaping-edge counts give 30/36"]
fn prec_l_l16_printed() {
    assert!(near(value("prec_L", "l16_etc", "m1_se"), 31.0 / 37.0));
}

#[test]
#[ignore = "derived FP count for l17 is 23"]
fn prec_n_l17_printed() {
    assert!(near(value("prec_N", "l17", "m10"), 17.0 / 48.0));
}

#[test]
#[ignore = "derived TN for l16 is 12, FP for l17 is 23"]
fn negev_counts_printed() {
    assert_eq!(counts("l16").2, 8.0);
    assert_eq!(counts("l17").1, 31.0);
}

#[test]
fn derived_values() {
    assert!((value("rec_A", "l8", "m4") - 30.0 / 36.0).abs() < 1e-12);
    assert!((value("rec_C", "l12", "m4") - 12.0 / 19.0).abs() < 1e-12);
    assert!((value("prec_L", "l16_etc", "m1_se") - 30.0 / 36.0).abs() < 1e-12);
    assert!((value("prec_N", "l17", "m10") - 17.0 / 40.0).abs() < 1e-12);
    assert_eq!(counts("l16"), (8.0, 10.0, 12.0));
    assert_eq!(counts("l17"), (17.0, 23.0, 23.0));
}
