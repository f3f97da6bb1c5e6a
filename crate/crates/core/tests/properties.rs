//! Randomized invariants.

use proptest::prelude::*;
use rtm_core::forward::ScatteringDataset;
use rtm_core::geometry::{chi, example1_spline_profile, example2_gaussian_profile, example3_piecewise_profile, Acquisition, SamplingGrid};
use rtm_core::green::GreenEvaluator;
use rtm_core::linalg::Matrix;
use rtm_core::noise::add_noise;
use rtm_core::rtm::indicator_from_tables;
use rtm_core::{c64, MediumConfig, Point};

fn matrix(rows: usize, cols: usize, seed: &[f64]) -> Matrix {
    let data = (0..rows * cols)
        .map(|k| {
            let a = seed[k % seed.len()] + 0.37 * k as f64;
            c64::new(a.sin(), (1.7 * a).cos())
        })
        .collect();
    Matrix::from_row_major(rows, cols, data).unwrap()
}

fn dataset(values: Matrix) -> ScatteringDataset {
    let (nr, ns) = (values.rows(), values.cols());
    ScatteringDataset::new(values, Acquisition::new(20.0, ns, nr).unwrap(), MediumConfig::default()).unwrap()
}

proptest! {
    #[test]
    fn chi_is_odd_under_negation(x in -6.0f64..6.0, y in -1.0f64..1.0, which in 0usize..3) {
        let profile = [example1_spline_profile(), example2_gaussian_profile(), example3_piecewise_profile()][which].clone();
        let p = Point::new(x, y);
        prop_assert_eq!(chi(&profile.negated(), p), -chi(&profile, Point::new(x, -y)));
    }

    #[test]
    fn indicator_is_real_linear_in_the_data(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        s1 in prop::collection::vec(-5.0f64..5.0, 1..6),
        s2 in prop::collection::vec(-5.0f64..5.0, 1..6),
    ) {
        let (nr, ns, npts) = (6, 5, 4);
        let grid = SamplingGrid::new(-1.0, 1.0, -1.0, 1.0, 2, 2).unwrap();
        let green = GreenEvaluator::new(MediumConfig::default());
        let gs = matrix(npts, ns, &[0.3, 1.1]);
        let gr = matrix(npts, nr, &[2.9]);
        let v1 = matrix(nr, ns, &s1);
        let v2 = matrix(nr, ns, &s2);
        let mixed: Vec<c64> = v1.as_slice().iter().zip(v2.as_slice()).map(|(p, q)| a * p + b * q).collect();
        let mixed = Matrix::from_row_major(nr, ns, mixed).unwrap();
        let i1 = indicator_from_tables(&dataset(v1), grid, &green, &gs, &gr).unwrap();
        let i2 = indicator_from_tables(&dataset(v2), grid, &green, &gs, &gr).unwrap();
        let im = indicator_from_tables(&dataset(mixed), grid, &green, &gs, &gr).unwrap();
        for k in 0..npts {
            let expected = a * i1.values[k] + b * i2.values[k];
            let scale = 1.0 + i1.values[k].abs() + i2.values[k].abs();
            prop_assert!((im.values[k] - expected).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn noise_has_the_requested_relative_norm(tau in 0.0f64..0.5, seed in any::<u64>(), s in prop::collection::vec(-5.0f64..5.0, 1..4)) {
        let clean = dataset(matrix(7, 3, &s));
        let noisy = add_noise(&clean, tau, seed).unwrap();
        let diff: f64 = noisy.values.as_slice().iter().zip(clean.values.as_slice()).map(|(p, q)| (p - q).norm_sqr()).sum();
        prop_assert!((diff.sqrt() - tau * clean.values.norm_fro()).abs() <= 1e-12 * clean.values.norm_fro());
        prop_assert_eq!(noisy.noise_tau, tau);
    }
}
