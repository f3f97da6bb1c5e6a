//! Residual suites behind `rtm verify`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rtm_core::forward::{Discretization, ForwardSystem};
use rtm_core::geometry::{preset_scene, Acquisition, InterfaceProfile, ObstacleBoundary, ObstacleShape, Preset, Scene};
use rtm_core::green::{phi, GreenEvaluator};
use rtm_core::specfun::{self, order0, order1};
use rtm_core::{c64, MediumConfig, Point};

use crate::config::{Scale, DEFAULT_RESOLUTION};
use crate::dataio::CheckRow;
use crate::error::Result;
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Specfun,
    Green,
    Hk,
    Zeta,
    Forward,
}

pub fn run(suite: Suite) -> Result<Vec<CheckRow>> {
    match suite {
        Suite::Specfun => specfun_suite(),
        Suite::Green => green_suite(),
        Suite::Hk => hk_suite(),
        Suite::Zeta => zeta_suite(),
        Suite::Forward => forward_suite(),
    }
}

const SEED: u64 = 20240611;

fn relative(a: c64, b: c64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Largest relative Wronskian defect `|J1 Y0 - J0 Y1 - 2/(πt)| πt/2` over
/// 200 log-spaced points of `[0.1, 100]`.
pub fn wronskian_defect() -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..200 {
        let t = 0.1 * 1000f64.powf(k as f64 / 199.0);
        let (a, b) = (order0(t)?, order1(t)?);
        let expected = 2.0 / (PI * t);
        worst = worst.max(((b.j * a.y - a.j * b.y) - expected).abs() / expected);
    }
    Ok(worst)
}

const REFERENCE: [[f64; 5]; 5] = [
    [0.5, 0.938_469_807_240_812_9, -0.444_518_733_506_706_56, 0.242_268_457_674_873_9, -1.471_472_392_670_243],
    [3.0, -0.260_051_954_901_933_44, 0.376_850_010_012_790_4, 0.339_058_958_525_936_46, 0.324_674_424_791_8],
    [12.5, 0.146_884_054_700_421_1, -0.171_214_306_844_669_3, -0.165_483_804_614_759_72, -0.153_838_256_537_501_18],
    [47.25, -0.091_558_156_867_235_44, 0.071_342_725_244_192_98, 0.070_377_955_847_710_13, 0.092_318_144_638_792_55],
    [100.0, 0.019_985_850_304_223_122, -0.077_244_313_365_083_15, -0.077_145_352_014_112_16, -0.020_372_312_002_759_793],
];

fn specfun_suite() -> Result<Vec<CheckRow>> {
    let mut rows = vec![CheckRow::at_most("wronskian", "200 points, t in [0.1, 100]", wronskian_defect()?, 1e-12)];
    for [t, j0, y0, j1, y1] in REFERENCE {
        let got = [specfun::bessel_j0(t)?, specfun::bessel_y0(t)?, specfun::bessel_j1(t)?, specfun::bessel_y1(t)?];
        let err = got.iter().zip([j0, y0, j1, y1]).map(|(g, r)| (g - r).abs() / r.abs().max(1.0)).fold(0.0, f64::max);
        rows.push(CheckRow::at_most("reference values", format!("J0 Y0 J1 Y1 at t = {t}"), err, 1e-12));
    }
    Ok(rows)
}

/// Random pairs `(x, z)` with `|x - z|` uniform in `[lo, hi]`.
fn separated_pairs(rng: &mut ChaCha20Rng, n: usize, lo: f64, hi: f64) -> Vec<(Point, Point)> {
    (0..n)
        .map(|_| {
            let x = Point::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let (d, a) = (rng.random_range(lo..=hi), rng.random_range(0.0..TAU));
            (x, Point::new(x.x + d * a.cos(), x.y + d * a.sin()))
        })
        .collect()
}

/// A point at least `gap` away from the flat line on the given side.
fn point_on_side(rng: &mut ChaCha20Rng, upper: bool, reach: f64, gap: f64) -> Point {
    let y = rng.random_range(gap..reach);
    Point::new(rng.random_range(-reach..reach), if upper { y } else { -y })
}

/// Largest `|G - Φ| / |Φ|` for equal wavenumbers 7 over 100 random pairs.
pub fn degenerate_defect() -> Result<f64> {
    let green = GreenEvaluator::new(MediumConfig::new(7.0, 7.0)?);
    let mut rng = ChaCha20Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for (x, z) in separated_pairs(&mut rng, 100, 0.05, 5.0) {
        worst = worst.max(relative(green.green(x, z)?, phi(7.0, x, z)?));
    }
    Ok(worst)
}

/// Largest `|G(x,z) - G(z,x)| / |G(x,z)|` over 25 cross-layer and 25
/// same-layer pairs for wavenumbers 10 and 5.
pub fn reciprocity_defect() -> Result<f64> {
    let green = GreenEvaluator::new(MediumConfig::new(10.0, 5.0)?);
    let mut rng = ChaCha20Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let x_up = k % 2 == 0;
        let z_up = if k < 25 { !x_up } else { x_up };
        let x = point_on_side(&mut rng, x_up, 3.0, 0.01);
        let z = point_on_side(&mut rng, z_up, 3.0, 0.01);
        worst = worst.max(relative(green.green(x, z)?, green.green(z, x)?));
    }
    Ok(worst)
}

/// One-sided limits of `G(·, z)` and `∂G/∂x2` at `(t, 0±)` by linear
/// extrapolation from the offsets `h` and `2h`.
fn one_sided(green: &GreenEvaluator, t: f64, side: f64, h: f64, z: Point) -> Result<(c64, c64)> {
    let near = green.evaluate(Point::new(t, side * h), z, true)?;
    let far = green.evaluate(Point::new(t, side * 2.0 * h), z, true)?;
    Ok((2.0 * near.value - far.value, 2.0 * near.grad[1] - far.grad[1]))
}

/// Largest relative jumps `(value, normal derivative)` of `G(·, z)` across
/// the flat interface at 20 abscissae in `[-3, 3]`, `h = 1e-4`.
pub fn continuity_defects() -> Result<(f64, f64)> {
    let green = GreenEvaluator::new(MediumConfig::new(10.0, 5.0)?);
    let (h, z) = (1e-4, Point::new(0.2, 0.6));
    let (mut value, mut normal) = (0.0f64, 0.0f64);
    for k in 0..20 {
        let t = -3.0 + 6.0 * k as f64 / 19.0;
        let (vu, du) = one_sided(&green, t, 1.0, h, z)?;
        let (vd, dd) = one_sided(&green, t, -1.0, h, z)?;
        value = value.max(relative(vd, vu));
        normal = normal.max(relative(dd, du));
    }
    Ok((value, normal))
}

fn green_suite() -> Result<Vec<CheckRow>> {
    let (value, normal) = continuity_defects()?;
    Ok(vec![
        CheckRow::at_most("degenerate media", "kappa = 7, 100 pairs, |x - z| in [0.05, 5]", degenerate_defect()?, 1e-8),
        CheckRow::at_most("reciprocity", "kappa = 10/5, 50 pairs", reciprocity_defect()?, 1e-6),
        CheckRow::at_most("continuity of G", "20 abscissae, h = 1e-4", value, 1e-5),
        CheckRow::at_most("continuity of dG/dx2", "20 abscissae, h = 1e-4", normal, 1e-5),
    ])
}

/// Relative Helmholtz–Kirchhoff residuals at `n` and `2n` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HkResidual {
    pub x: Point,
    pub z: Point,
    pub coarse: f64,
    pub fine: f64,
}

/// Helmholtz–Kirchhoff residuals on the circle of radius 10 for 10 random
/// pairs in the disc of radius 2, off the flat line, relative to `|G(x, z)|`.
pub fn hk_residuals(n_quad: usize) -> Result<Vec<HkResidual>> {
    let green = GreenEvaluator::new(MediumConfig::new(10.0, 5.0)?);
    let mut rng = ChaCha20Rng::seed_from_u64(SEED + 2);
    let pick = |rng: &mut ChaCha20Rng| loop {
        let p = Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if p.norm() < 2.0 && p.y.abs() > 0.05 {
            break p;
        }
    };
    let pairs: Vec<(Point, Point)> = (0..10).map(|_| (pick(&mut rng), pick(&mut rng))).collect();
    parallel::install(|| {
        use rayon::prelude::*;
        pairs
            .par_iter()
            .map(|&(x, z)| {
                let scale = green.green(x, z)?.norm();
                Ok(HkResidual {
                    x,
                    z,
                    coarse: green.verify_helmholtz_kirchhoff(x, z, 10.0, n_quad)? / scale,
                    fine: green.verify_helmholtz_kirchhoff(x, z, 10.0, 2 * n_quad)? / scale,
                })
            })
            .collect::<Result<Vec<_>>>()
    })
}

fn show(p: Point) -> String {
    format!("({:.3}, {:.3})", p.x, p.y)
}

fn hk_suite() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for r in hk_residuals(1024)? {
        let pair = format!("x = {}, z = {}", show(r.x), show(r.z));
        rows.push(CheckRow::at_most("hk residual / |G|", format!("{pair}, R = 10, n = 1024"), r.coarse, 1e-3));
        let mut refine = CheckRow::at_most("hk refinement ratio", format!("{pair}, n = 2048 vs 1024"), r.fine / r.coarse, 1.0);
        refine.pass = r.fine < r.coarse || r.fine <= 1e-12;
        rows.push(refine);
    }
    Ok(rows)
}

/// `|ζ(x, z)|` on circles of radius 20 and 40 for 5 fixed pairs.
pub fn zeta_ratios() -> Result<Vec<(Point, Point, f64, f64)>> {
    let green = GreenEvaluator::new(MediumConfig::new(10.0, 5.0)?);
    let pairs = [
        (Point::new(0.4, 0.6), Point::new(-0.5, -0.3)),
        (Point::new(1.0, 1.0), Point::new(-1.0, -1.0)),
        (Point::new(1.5, 0.2), Point::new(-1.2, 0.8)),
        (Point::new(-0.7, -1.1), Point::new(0.3, -0.4)),
        (Point::new(0.0, 1.3), Point::new(0.9, 0.5)),
    ];
    parallel::install(|| {
        use rayon::prelude::*;
        pairs
            .par_iter()
            .map(|&(x, z)| {
                let at = |r: f64| -> Result<f64> { Ok(green.zeta_remainder(x, z, r, (100.0 * r) as usize)?.norm()) };
                Ok((x, z, at(20.0)?, at(40.0)?))
            })
            .collect()
    })
}

pub const ZETA_BAND: (f64, f64) = (0.35, 0.65);

fn zeta_suite() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (x, z, a, b) in zeta_ratios()? {
        let (ratio, pair) = (b / a, format!("x = {}, z = {}, R = 20 -> 40", show(x), show(z)));
        let mut band =
            CheckRow::at_most("zeta R-doubling ratio", format!("{pair}, band [{}, {}]", ZETA_BAND.0, ZETA_BAND.1), ratio, ZETA_BAND.1);
        band.pass = (ZETA_BAND.0..=ZETA_BAND.1).contains(&ratio);
        rows.push(band);
        rows.push(CheckRow::at_most("zeta R^-1 bound", pair, ratio, 0.5));
    }
    Ok(rows)
}

/// `J_0..=J_order` (Miller's backward recurrence) and `Y_0..=Y_order`
/// (forward recurrence).
fn bessel_tables(order: usize, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let start = 2 * ((order.max(t as usize) + 30) / 2) + 20;
    let mut j = vec![0.0; start + 2];
    j[start] = 1e-300;
    for k in (1..=start).rev() {
        j[k - 1] = 2.0 * k as f64 / t * j[k] - j[k + 1];
        if j[k - 1].abs() > 1e250 {
            j.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    let norm = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
    j.truncate(order + 1);
    j.iter_mut().for_each(|v| *v /= norm);
    let mut y = vec![specfun::bessel_y0(t)?, specfun::bessel_y1(t)?];
    for n in 1..order {
        y.push(2.0 * n as f64 / t * y[n] - y[n - 1]);
    }
    y.truncate(order + 1);
    Ok((j, y))
}

/// Scattered field of the point source `Φ(·, source)` by a sound-soft disc
/// in free space, as a 50-term separation-of-variables series.
pub fn disc_series(kappa: f64, center: Point, radius: f64, source: Point, x: Point) -> Result<c64> {
    let terms = 50;
    let hankel = |t: f64| -> Result<Vec<c64>> {
        let (j, y) = bessel_tables(terms, t)?;
        Ok(j.into_iter().zip(y).map(|(a, b)| c64::new(a, b)).collect())
    };
    let ha = hankel(kappa * radius)?;
    let (ds, dx) = (source - center, x - center);
    let (hs, hx) = (hankel(kappa * ds.norm())?, hankel(kappa * dx.norm())?);
    let angle = dx.y.atan2(dx.x) - ds.y.atan2(ds.x);
    let mut sum = c64::default();
    for n in 0..=terms {
        let weight = if n == 0 { 1.0 } else { 2.0 * (n as f64 * angle).cos() };
        sum += weight * ha[n].re / ha[n] * hs[n] * hx[n];
    }
    Ok(c64::new(0.0, -0.25) * sum)
}

/// Largest relative deviation of the solver from [`disc_series`] at 16
/// points around a disc, equal wavenumbers 5, flat interface.
pub fn disc_defect() -> Result<f64> {
    let (kappa, center, radius) = (5.0, Point::new(0.3, -3.0), 0.6);
    let medium = MediumConfig::new(kappa, kappa)?;
    let scene = Scene {
        profile: InterfaceProfile::Flat,
        obstacle: Some(ObstacleBoundary::new(ObstacleShape::Circle { center, radius }, 64)?),
        medium,
    };
    let green = GreenEvaluator::new(medium);
    let system = ForwardSystem::assemble(&scene, Discretization::new(&scene, DEFAULT_RESOLUTION)?, &green)?;
    let source = Point::new(4.0, 2.5);
    let solution = system.solve_source(source)?;
    let mut worst = 0.0f64;
    for k in 0..16 {
        let a = TAU * k as f64 / 16.0;
        let x = Point::new(center.x + 1.5 * a.cos(), center.y + 1.5 * a.sin());
        worst = worst.max(relative(system.evaluate_v(&solution, x)?, disc_series(kappa, center, radius, source, x)?));
    }
    Ok(worst)
}

/// Largest `|u|` on the obstacle boundary between the Nyström nodes,
/// relative to the largest total field on a circle one unit around the
/// obstacle center, over a few sources.
pub fn sound_soft_defect(system: &ForwardSystem, scene: &Scene, sources: &[Point]) -> Result<f64> {
    let Some(obstacle) = &scene.obstacle else { return Ok(0.0) };
    let center = obstacle.shape().center();
    let n = obstacle.node_count();
    let mut worst = 0.0f64;
    for &source in sources {
        let solution = system.solve_source(source)?;
        let mut near = 0.0f64;
        for k in 0..n {
            let a = TAU * k as f64 / n as f64;
            let p = Point::new(center.x + a.cos(), center.y + a.sin());
            near = near.max((system.evaluate_v(&solution, p)? + system.green().green(p, source)?).norm());
        }
        for k in 0..n {
            let t = TAU * (k as f64 + 0.5) / n as f64;
            worst = worst.max(system.boundary_total_field(&solution, t)?.norm() / near);
        }
    }
    Ok(worst)
}

fn forward_suite() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();

    let mut flat = preset_scene(Preset::Ex1FlatCircle);
    flat.obstacle = None;
    let green = GreenEvaluator::new(flat.medium);
    let system = ForwardSystem::assemble(&flat, Discretization::new(&flat, DEFAULT_RESOLUTION)?, &green)?;
    let (null, _) = parallel::generate_dataset(&system, &flat, &Acquisition::new(20.0, 16, 16)?)?;
    let sup = null.values.as_slice().iter().map(|v| v.norm()).fold(0.0, f64::max);
    rows.push(CheckRow::at_most("null data", "flat interface, no obstacle, 16 x 16", sup, 1e-12));

    rows.push(CheckRow::at_most("disc series", "kappa = 5, 16 probes, 50 terms", disc_defect()?, 1e-6));

    let scene = preset_scene(Preset::Ex1FlatCircle);
    let system = ForwardSystem::assemble(&scene, Discretization::new(&scene, DEFAULT_RESOLUTION)?, &green)?;
    let acq = Acquisition::new(Scale::Desk.radius(), Scale::Desk.transducers(), Scale::Desk.transducers())?;
    let probes = [acq.sources[0], acq.sources[37], acq.sources[90]];
    rows.push(CheckRow::at_most(
        "sound-soft residual",
        "ex1_flat_circle, 3 sources",
        sound_soft_defect(&system, &scene, &probes)?,
        1e-3,
    ));
    let (data, _) = parallel::generate_dataset(&system, &scene, &acq)?;
    rows.push(CheckRow::at_most("data reciprocity", "ex1_flat_circle, desk scale", data.reciprocity_defect()?, 1e-3));
    Ok(rows)
}
