//! Properties of the forward solver on the preset scenes.

use rtm_core::forward::{generate_dataset, Discretization, ForwardSystem};
use rtm_core::geometry::{
    example1_spline_profile, preset_scene, Acquisition, InterfaceProfile, Preset, Scene, SplineBump,
};
use rtm_core::green::GreenEvaluator;
use rtm_core::{c64, MediumConfig, Point};

fn system(scene: &Scene, resolution: f64) -> ForwardSystem {
    let green = GreenEvaluator::new(scene.medium);
    ForwardSystem::assemble(scene, Discretization::new(scene, resolution).unwrap(), &green).unwrap()
}

#[test]
fn no_scatterer_gives_zero_data() {
    let scene = Scene { profile: InterfaceProfile::Flat, obstacle: None, medium: MediumConfig::default() };
    let sys = system(&scene, 6.0);
    let data = generate_dataset(&sys, &scene, &Acquisition::new(20.0, 8, 8).unwrap()).unwrap();
    assert!(data.values.as_slice().iter().all(|v| v.norm() <= 1e-12));
}

#[test]
fn sound_soft_condition_off_the_nodes() {
    let scene = preset_scene(Preset::Ex1FlatCircle);
    let sys = system(&scene, 6.0);
    let green = sys.green().clone();
    let obstacle = scene.obstacle.as_ref().unwrap();
    let center = obstacle.shape().center();
    for source in [Point::new(15.0, 12.0), Point::new(-3.0, -19.0)] {
        let sol = sys.solve_source(source).unwrap();
        let near = (0..64)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 64.0;
                let p = center + Point::new(t.cos(), t.sin());
                (sys.evaluate_v(&sol, p).unwrap() + green.green(p, source).unwrap()).norm()
            })
            .fold(0.0, f64::max);
        for k in 0..64 {
            let t = std::f64::consts::TAU * (k as f64 + 0.5) / 64.0;
            let u = sys.boundary_total_field(&sol, t).unwrap();
            assert!(u.norm() <= 1e-3 * near, "|u| = {:e} at t = {t}", u.norm());
        }
    }
}

#[test]
fn data_is_reciprocal() {
    for preset in [Preset::Ex1FlatCircle, Preset::Ex3PiecewiseTriangle] {
        let scene = preset_scene(preset);
        let data = generate_dataset(&system(&scene, 6.0), &scene, &Acquisition::new(20.0, 16, 16).unwrap()).unwrap();
        let defect = data.reciprocity_defect().unwrap();
        assert!(defect <= 1e-3, "{preset}: {defect:e}");
    }
}

#[test]
fn evaluation_matches_dataset_entries() {
    let scene = preset_scene(Preset::Ex3PiecewiseTriangle);
    let sys = system(&scene, 6.0);
    let acq = Acquisition::new(20.0, 6, 6).unwrap();
    let data = generate_dataset(&sys, &scene, &acq).unwrap();
    let sol = sys.solve_source(acq.sources[4]).unwrap();
    for (r, &x) in acq.receivers.iter().enumerate() {
        assert_eq!(sys.evaluate_v(&sol, x).unwrap(), data.value(r, 4));
    }
}

#[test]
fn scattered_field_radiates() {
    let scene = preset_scene(Preset::Ex3PiecewiseTriangle);
    let sys = system(&scene, 6.0);
    let sol = sys.solve_source(Point::new(0.0, 15.0)).unwrap();
    let k2 = scene.medium.kappa2();
    let pattern = |r: f64, angle: f64| {
        let v = sys.evaluate_v(&sol, Point::new(r * angle.cos(), r * angle.sin())).unwrap();
        v * r.sqrt() * c64::new(0.0, -k2 * r).exp()
    };
    let angles = [-0.9f64, -1.4, -1.9, -2.4];
    let near: Vec<c64> = angles.iter().map(|&t| pattern(200.0, t)).collect();
    let far: Vec<c64> = angles.iter().map(|&t| pattern(800.0, t)).collect();
    let scale = far.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for ((t, a), b) in angles.iter().zip(&near).zip(&far) {
        assert!((a - b).norm() <= 0.12 * scale, "{t}: {a} vs {b}");
    }
}

#[test]
fn volume_operator_is_a_contraction_for_weak_contrast() {
    let profile = match example1_spline_profile() {
        InterfaceProfile::SplineBumps(bumps) => InterfaceProfile::SplineBumps(
            bumps.iter().map(|b| SplineBump { amplitude: 0.1 * b.amplitude, ..*b }).collect(),
        ),
        _ => unreachable!(),
    };
    let scene = Scene { profile, obstacle: None, medium: MediumConfig::new(1.1, 1.0).unwrap() };
    let block = system(&scene, 6.0).volume_block();
    let n = block.rows();
    let mut v: Vec<c64> = (0..n).map(|k| c64::new(1.0 + (k as f64).sin(), 0.3)).collect();
    let mut rate = 0.0;
    for _ in 0..200 {
        let w = block.matvec(&v);
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        rate = norm / v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v = w.into_iter().map(|x| x / norm).collect();
    }
    assert!(rate < 1.0, "{rate}");
}

#[test]
fn refinement_changes_decrease() {
    let mut scene = preset_scene(Preset::Ex3PiecewiseTriangle);
    scene.obstacle = None;
    scene.medium = MediumConfig::new(10.0, 9.5).unwrap();
    let acq = Acquisition::new(20.0, 8, 8).unwrap();
    let data: Vec<_> = [4.0, 8.0, 16.0]
        .iter()
        .map(|&r| generate_dataset(&system(&scene, r), &scene, &acq).unwrap().values)
        .collect();
    let change = |a: &rtm_core::linalg::Matrix, b: &rtm_core::linalg::Matrix| {
        let d: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(p, q)| (p - q).norm_sqr()).sum();
        d.sqrt() / b.norm_fro()
    };
    let (first, second) = (change(&data[0], &data[1]), change(&data[1], &data[2]));
    assert!(second <= 0.5 * first && second <= 2e-2, "{first:e} then {second:e}");
}
