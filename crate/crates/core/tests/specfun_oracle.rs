//! Cylinder functions against a 40-digit reference table and the Wronskian.

use std::f64::consts::PI;

use rtm_core::specfun::{bessel_j0, bessel_j1, bessel_y0, bessel_y1, order0, order1};

fn table() -> Vec<[f64; 5]> {
    include_str!("data/bessel_oracle.csv")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let v: Vec<f64> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3], v[4]]
        })
        .collect()
}

#[test]
fn agrees_with_reference_table() {
    let rows = table();
    assert!(rows.len() >= 200);
    let mut worst = 0.0f64;
    for [t, j0, y0, j1, y1] in rows {
        let got = [bessel_j0(t).unwrap(), bessel_y0(t).unwrap(), bessel_j1(t).unwrap(), bessel_y1(t).unwrap()];
        for (g, r) in got.iter().zip([j0, y0, j1, y1]) {
            worst = worst.max((g - r).abs() / r.abs().max(1.0));
        }
    }
    assert!(worst <= 1e-11, "{worst:e}");
}

#[test]
fn wronskian_on_log_spaced_points() {
    for k in 0..200 {
        let t = 0.1 * 1000f64.powf(k as f64 / 199.0);
        let (a, b) = (order0(t).unwrap(), order1(t).unwrap());
        let w = b.j * a.y - a.j * b.y;
        let expected = 2.0 / (PI * t);
        assert!(((w - expected) / expected).abs() <= 1e-12, "t = {t}: {w} vs {expected}");
    }
}

#[test]
fn zeros_and_bad_arguments() {
    let first_zero = 2.404_825_557_695_773;
    assert!(bessel_j0(first_zero).unwrap().abs() < 1e-15);
    assert!(bessel_y0(0.0).is_err());
    assert!(bessel_j0(-1.0).is_err() || bessel_j0(-1.0).unwrap() == bessel_j0(1.0).unwrap());
    assert!(bessel_y1(f64::NAN).is_err());
}
