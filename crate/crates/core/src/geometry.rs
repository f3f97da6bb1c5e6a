//! Scatterer geometry and acquisition layout.
//!
//! The interface is the graph `x2 = f(x1)` of a compactly supported profile.
//! Where it departs from the flat line `x2 = 0` it creates two perturbation
//! regions: `B1` (above the flat line, below the graph; filled with the lower
//! medium) and `B2` (below the flat line, above the graph; filled with the
//! upper medium). The signed indicator `chi` is `+1` on `B1`, `-1` on `B2`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::ops::{Add, Mul, Sub};
use core::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Wavenumbers of the upper (`kappa1`) and lower (`kappa2`) half-planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumConfig {
    kappa1: f64,
    kappa2: f64,
    beta: f64,
}

impl MediumConfig {
    pub fn new(kappa1: f64, kappa2: f64) -> Result<Self> {
        if !(kappa1 > 0.0 && kappa2 > 0.0 && kappa1.is_finite() && kappa2.is_finite()) {
            return Err(Error::Config(format!(
                "wavenumbers must be positive, got kappa1 = {kappa1}, kappa2 = {kappa2}"
            )));
        }
        Ok(Self { kappa1, kappa2, beta: kappa1 * kappa1 - kappa2 * kappa2 })
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    /// Contrast `kappa1^2 - kappa2^2`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Background wavenumber at `x`: `kappa1` for `x2 > 0`, else `kappa2`.
    pub fn kappa_at(&self, x: Point) -> f64 {
        if x.y > 0.0 {
            self.kappa1
        } else {
            self.kappa2
        }
    }

    pub fn max_kappa(&self) -> f64 {
        self.kappa1.max(self.kappa2)
    }

    pub fn min_kappa(&self) -> f64 {
        self.kappa1.min(self.kappa2)
    }
}

impl Default for MediumConfig {
    fn default() -> Self {
        Self { kappa1: 10.0, kappa2: 5.0, beta: 75.0 }
    }
}

/// Cardinal cubic B-spline, supported on `(-2, 2)` with unit integral.
pub fn cubic_bspline(t: f64) -> f64 {
    let a = libm::fabs(t);
    if a <= 1.0 {
        0.5 * a * a * a - a * a + 2.0 / 3.0
    } else if a < 2.0 {
        -a * a * a / 6.0 + a * a - 2.0 * a + 4.0 / 3.0
    } else {
        0.0
    }
}

/// Smooth cutoff: 1 on `|t| <= 4`, 0 on `|t| >= 5`, exponential blend between.
pub fn smooth_cutoff(t: f64) -> f64 {
    let a = libm::fabs(t);
    if a <= 4.0 {
        1.0
    } else if a < 5.0 {
        1.0 / (1.0 + libm::exp(1.0 / (5.0 - a) + 1.0 / (4.0 - a)))
    } else {
        0.0
    }
}

/// `amplitude * cubic_bspline(scale * t + shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplineBump {
    pub amplitude: f64,
    pub scale: f64,
    pub shift: f64,
}

/// `amplitude * exp(-rate * (t - center)^2)`, multiplied by [`smooth_cutoff`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBump {
    pub amplitude: f64,
    pub rate: f64,
    pub center: f64,
}

/// Constant `value` on `inner <= |t| <= outer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub value: f64,
    pub inner: f64,
    pub outer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Flat,
    SplineBumps,
    GaussianBumps,
    PiecewiseConstant,
}

impl FromStr for ProfileKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(Self::Flat),
            "spline_bumps" => Ok(Self::SplineBumps),
            "gaussian_bumps" => Ok(Self::GaussianBumps),
            "piecewise_constant" => Ok(Self::PiecewiseConstant),
            other => Err(Error::Config(format!("unknown interface kind '{other}'"))),
        }
    }
}

/// Locally rough interface `x2 = f(x1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum InterfaceProfile {
    Flat,
    SplineBumps(Vec<SplineBump>),
    GaussianBumps(Vec<GaussianBump>),
    PiecewiseConstant(Vec<Plateau>),
}

impl InterfaceProfile {
    /// Build a profile from a kind and a flat list of parameters, taken in
    /// triples: `(amplitude, scale, shift)` for spline bumps,
    /// `(amplitude, rate, center)` for Gaussian bumps and
    /// `(value, inner, outer)` for plateaus.
    pub fn from_params(kind: ProfileKind, params: &[f64]) -> Result<Self> {
        if kind == ProfileKind::Flat {
            return Ok(Self::Flat);
        }
        if params.is_empty() || !params.len().is_multiple_of(3) {
            return Err(Error::Config(format!(
                "interface parameters must come in triples, got {} values",
                params.len()
            )));
        }
        let triples = params.chunks_exact(3);
        let profile = match kind {
            ProfileKind::Flat => unreachable!(),
            ProfileKind::SplineBumps => {
                let bumps: Vec<_> = triples
                    .map(|p| SplineBump { amplitude: p[0], scale: p[1], shift: p[2] })
                    .collect();
                if bumps.iter().any(|b| b.scale == 0.0) {
                    return Err(Error::Config("spline bump scale must be nonzero".into()));
                }
                Self::SplineBumps(bumps)
            }
            ProfileKind::GaussianBumps => {
                let bumps: Vec<_> = triples
                    .map(|p| GaussianBump { amplitude: p[0], rate: p[1], center: p[2] })
                    .collect();
                if bumps.iter().any(|b| !(b.rate > 0.0)) {
                    return Err(Error::Config("gaussian bump rate must be positive".into()));
                }
                Self::GaussianBumps(bumps)
            }
            ProfileKind::PiecewiseConstant => {
                let plateaus: Vec<_> = triples
                    .map(|p| Plateau { value: p[0], inner: p[1], outer: p[2] })
                    .collect();
                if plateaus.iter().any(|p| !(p.inner >= 0.0 && p.outer > p.inner)) {
                    return Err(Error::Config("plateaus need 0 <= inner < outer".into()));
                }
                Self::PiecewiseConstant(plateaus)
            }
        };
        Ok(profile)
    }

    pub fn kind(&self) -> ProfileKind {
        match self {
            Self::Flat => ProfileKind::Flat,
            Self::SplineBumps(_) => ProfileKind::SplineBumps,
            Self::GaussianBumps(_) => ProfileKind::GaussianBumps,
            Self::PiecewiseConstant(_) => ProfileKind::PiecewiseConstant,
        }
    }

    /// Parameters in the triple layout accepted by [`Self::from_params`].
    pub fn params(&self) -> Vec<f64> {
        match self {
            Self::Flat => Vec::new(),
            Self::SplineBumps(b) => b.iter().flat_map(|b| [b.amplitude, b.scale, b.shift]).collect(),
            Self::GaussianBumps(b) => {
                b.iter().flat_map(|b| [b.amplitude, b.rate, b.center]).collect()
            }
            Self::PiecewiseConstant(p) => p.iter().flat_map(|p| [p.value, p.inner, p.outer]).collect(),
        }
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        match self {
            Self::Flat => 0.0,
            Self::SplineBumps(bumps) => bumps
                .iter()
                .map(|b| b.amplitude * cubic_bspline(b.scale * t + b.shift))
                .sum(),
            Self::GaussianBumps(bumps) => {
                let cut = smooth_cutoff(t);
                if cut == 0.0 {
                    return 0.0;
                }
                let s: f64 = bumps
                    .iter()
                    .map(|b| b.amplitude * libm::exp(-b.rate * (t - b.center) * (t - b.center)))
                    .sum();
                s * cut
            }
            Self::PiecewiseConstant(plateaus) => {
                let a = libm::fabs(t);
                plateaus
                    .iter()
                    .find(|p| p.inner <= a && a <= p.outer)
                    .map_or(0.0, |p| p.value)
            }
        }
    }

    /// `R` such that `f(t) = 0` for `|t| > R`.
    pub fn support_radius(&self) -> f64 {
        match self {
            Self::Flat => 0.0,
            Self::SplineBumps(bumps) => bumps
                .iter()
                .flat_map(|b| [(-2.0 - b.shift) / b.scale, (2.0 - b.shift) / b.scale])
                .map(libm::fabs)
                .fold(0.0, f64::max),
            Self::GaussianBumps(_) => 5.0,
            Self::PiecewiseConstant(p) => p.iter().map(|p| p.outer).fold(0.0, f64::max),
        }
    }

    /// Abscissae where the profile is not smooth (knots and jumps), sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = match self {
            Self::Flat => Vec::new(),
            Self::SplineBumps(bumps) => bumps
                .iter()
                .flat_map(|b| (-2..=2).map(move |k| (k as f64 - b.shift) / b.scale))
                .collect(),
            Self::GaussianBumps(_) => alloc::vec![-5.0, -4.0, 4.0, 5.0],
            Self::PiecewiseConstant(p) => p
                .iter()
                .flat_map(|p| [-p.outer, -p.inner, p.inner, p.outer])
                .collect(),
        };
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| libm::fabs(*a - *b) < 1e-14);
        pts
    }

    /// The mirrored profile `-f`.
    pub fn negated(&self) -> Self {
        match self {
            Self::Flat => Self::Flat,
            Self::SplineBumps(b) => Self::SplineBumps(
                b.iter().map(|b| SplineBump { amplitude: -b.amplitude, ..*b }).collect(),
            ),
            Self::GaussianBumps(b) => Self::GaussianBumps(
                b.iter().map(|b| GaussianBump { amplitude: -b.amplitude, ..*b }).collect(),
            ),
            Self::PiecewiseConstant(p) => Self::PiecewiseConstant(
                p.iter().map(|p| Plateau { value: -p.value, ..*p }).collect(),
            ),
        }
    }
}

/// Signed indicator of the perturbation region: `+1` on `B1`, `-1` on `B2`,
/// `0` elsewhere including on the boundaries.
pub fn chi(profile: &InterfaceProfile, x: Point) -> i8 {
    let f = profile.evaluate(x.x);
    if x.y > 0.0 && x.y < f {
        1
    } else if x.y < 0.0 && x.y > f {
        -1
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObstacleShape {
    Circle { center: Point, radius: f64 },
    /// `center + scale (cos^3 + cos, sin^3 + sin)`.
    RoundedSquare { center: Point, scale: f64 },
    /// `center + (radius + wobble cos 3θ) (cos θ, sin θ)`.
    RoundedTriangle { center: Point, radius: f64, wobble: f64 },
}

impl ObstacleShape {
    pub fn from_params(kind: &str, params: &[f64]) -> Result<Option<Self>> {
        let need = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "obstacle '{kind}' expects {n} parameters, got {}",
                    params.len()
                )))
            }
        };
        let shape = match kind {
            "none" => return Ok(None),
            "circle" => {
                need(3)?;
                Self::Circle { center: Point::new(params[0], params[1]), radius: params[2] }
            }
            "rounded_square" => {
                need(3)?;
                Self::RoundedSquare { center: Point::new(params[0], params[1]), scale: params[2] }
            }
            "rounded_triangle" => {
                need(4)?;
                Self::RoundedTriangle {
                    center: Point::new(params[0], params[1]),
                    radius: params[2],
                    wobble: params[3],
                }
            }
            other => return Err(Error::Config(format!("unknown obstacle kind '{other}'"))),
        };
        Ok(Some(shape))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Circle { .. } => "circle",
            Self::RoundedSquare { .. } => "rounded_square",
            Self::RoundedTriangle { .. } => "rounded_triangle",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Self::Circle { center, radius } => alloc::vec![center.x, center.y, radius],
            Self::RoundedSquare { center, scale } => alloc::vec![center.x, center.y, scale],
            Self::RoundedTriangle { center, radius, wobble } => {
                alloc::vec![center.x, center.y, radius, wobble]
            }
        }
    }

    pub fn center(&self) -> Point {
        match *self {
            Self::Circle { center, .. }
            | Self::RoundedSquare { center, .. }
            | Self::RoundedTriangle { center, .. } => center,
        }
    }

    /// Position, first and second derivative with respect to the parameter.
    pub fn trace(&self, theta: f64) -> [Point; 3] {
        let (s, c) = libm::sincos(theta);
        match *self {
            Self::Circle { center, radius: a } => [
                center + Point::new(a * c, a * s),
                Point::new(-a * s, a * c),
                Point::new(-a * c, -a * s),
            ],
            Self::RoundedSquare { center, scale: k } => [
                center + Point::new(k * (c * c * c + c), k * (s * s * s + s)),
                Point::new(k * (-3.0 * c * c * s - s), k * (3.0 * s * s * c + c)),
                Point::new(
                    k * (6.0 * c * s * s - 3.0 * c * c * c - c),
                    k * (6.0 * s * c * c - 3.0 * s * s * s - s),
                ),
            ],
            Self::RoundedTriangle { center, radius, wobble } => {
                let (s3, c3) = libm::sincos(3.0 * theta);
                let r = radius + wobble * c3;
                let r1 = -3.0 * wobble * s3;
                let r2 = -9.0 * wobble * c3;
                [
                    center + Point::new(r * c, r * s),
                    Point::new(r1 * c - r * s, r1 * s + r * c),
                    Point::new(r2 * c - 2.0 * r1 * s - r * c, r2 * s + 2.0 * r1 * c - r * s),
                ]
            }
        }
    }

    pub fn position(&self, theta: f64) -> Point {
        self.trace(theta)[0]
    }
}

/// Boundary node of an obstacle discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub theta: f64,
    pub position: Point,
    pub tangent: Point,
    pub second: Point,
}

impl BoundaryNode {
    /// `|z'(θ)|`.
    pub fn speed(&self) -> f64 {
        self.tangent.norm()
    }

    /// Unit normal pointing out of the obstacle (counterclockwise curve).
    pub fn outward_normal(&self) -> Point {
        let s = self.speed();
        Point::new(self.tangent.y / s, -self.tangent.x / s)
    }
}

/// Counterclockwise obstacle curve with an equispaced Nyström node set.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleBoundary {
    shape: ObstacleShape,
    node_count: usize,
}

impl ObstacleBoundary {
    pub fn new(shape: ObstacleShape, node_count: usize) -> Result<Self> {
        if node_count < 4 || !node_count.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "obstacle node count must be even and >= 4, got {node_count}"
            )));
        }
        Ok(Self { shape, node_count })
    }

    pub fn shape(&self) -> &ObstacleShape {
        &self.shape
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn with_node_count(&self, node_count: usize) -> Result<Self> {
        Self::new(self.shape, node_count)
    }

    pub fn position(&self, theta: f64) -> Point {
        self.shape.position(theta)
    }

    pub fn node_at(&self, theta: f64) -> BoundaryNode {
        let [position, tangent, second] = self.shape.trace(theta);
        BoundaryNode { theta, position, tangent, second }
    }

    /// Nodes at `θ_j = 2πj / node_count`.
    pub fn nodes(&self) -> Vec<BoundaryNode> {
        (0..self.node_count)
            .map(|j| self.node_at(TAU * j as f64 / self.node_count as f64))
            .collect()
    }
}

/// One quadrature cell of the perturbation region: an axis-aligned rectangle
/// with its node at the center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeCell {
    pub center: Point,
    pub half_width: f64,
    pub half_height: f64,
    pub sign: i8,
}

impl VolumeCell {
    pub fn area(&self) -> f64 {
        4.0 * self.half_width * self.half_height
    }
}

/// Signed quadrature cells covering `B = B1 ∪ B2`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PerturbationRegion {
    pub cells: Vec<VolumeCell>,
}

impl PerturbationRegion {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn signed_area(&self) -> f64 {
        self.cells.iter().map(|c| c.sign as f64 * c.area()).sum()
    }

    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        self.cells.iter().map(|c| c.center)
    }
}

/// Cells thinner than this are dropped (they carry no measurable weight).
const MIN_CELL_HEIGHT: f64 = 1e-10;

/// Tile the perturbation region with rectangles of size about one
/// `resolution`-th of the shortest wavelength.
///
/// The support is cut into columns aligned with the profile's breakpoints.
/// Each column is filled from `x2 = 0` to the profile height at its
/// midpoint, split into equal rows, so the column areas form a midpoint rule
/// for `∫ f` and jumps of piecewise-constant profiles are reproduced exactly.
pub fn build_region(
    profile: &InterfaceProfile,
    medium: &MediumConfig,
    resolution: f64,
) -> Result<PerturbationRegion> {
    if !(resolution >= 4.0) {
        return Err(Error::Config(format!(
            "volume resolution must be at least 4 points per wavelength, got {resolution}"
        )));
    }
    let radius = profile.support_radius();
    if !radius.is_finite() {
        return Err(Error::Config("interface profile has no finite support".into()));
    }
    if profile.kind() == ProfileKind::Flat || radius == 0.0 {
        return Ok(PerturbationRegion::default());
    }
    let h = TAU / medium.max_kappa() / resolution;

    let mut edges: Vec<f64> = alloc::vec![-radius];
    edges.extend(profile.breakpoints().into_iter().filter(|&b| b > -radius && b < radius));
    edges.push(radius);

    let mut cells = Vec::new();
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let columns = libm::ceil((b - a) / h).max(1.0) as usize;
        let width = (b - a) / columns as f64;
        for c in 0..columns {
            let mid = a + (c as f64 + 0.5) * width;
            let height = profile.evaluate(mid);
            let depth = libm::fabs(height);
            if depth < MIN_CELL_HEIGHT {
                continue;
            }
            let sign: i8 = if height > 0.0 { 1 } else { -1 };
            let rows = libm::ceil(depth / h).max(1.0) as usize;
            let dy = depth / rows as f64;
            for r in 0..rows {
                let y = sign as f64 * (r as f64 + 0.5) * dy;
                cells.push(VolumeCell {
                    center: Point::new(mid, y),
                    half_width: 0.5 * width,
                    half_height: 0.5 * dy,
                    sign,
                });
            }
        }
    }
    Ok(PerturbationRegion { cells })
}

/// Sources and receivers equiangularly placed on the circle of radius `R`.
///
/// Angles are offset by half a step, `θ_j = 2π (j + 1/2) / N`, so that for
/// even `N` no transducer sits exactly on the flat interface.
#[derive(Debug, Clone, PartialEq)]
pub struct Acquisition {
    pub radius: f64,
    pub sources: Vec<Point>,
    pub receivers: Vec<Point>,
}

impl Acquisition {
    pub fn new(radius: f64, n_sources: usize, n_receivers: usize) -> Result<Self> {
        if !(radius > 0.0) || n_sources == 0 || n_receivers == 0 {
            return Err(Error::Config(format!(
                "acquisition needs R > 0 and at least one source and receiver \
                 (R = {radius}, ns = {n_sources}, nr = {n_receivers})"
            )));
        }
        Ok(Self {
            radius,
            sources: circle_points(radius, n_sources),
            receivers: circle_points(radius, n_receivers),
        })
    }

    pub fn n_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn n_receivers(&self) -> usize {
        self.receivers.len()
    }

    /// Whether sources and receivers are the same point set.
    pub fn coincident(&self) -> bool {
        self.sources == self.receivers
    }

    /// Circle length `|Γ| = 2πR`.
    pub fn circumference(&self) -> f64 {
        TAU * self.radius
    }

    /// Checks that every point lies strictly inside the measurement circle.
    pub fn check_inside<'a>(&self, points: impl IntoIterator<Item = &'a Point>) -> Result<()> {
        for p in points {
            if !(p.norm() < self.radius) {
                return Err(Error::Config(format!(
                    "point ({}, {}) is not inside the measurement circle of radius {}",
                    p.x, p.y, self.radius
                )));
            }
        }
        Ok(())
    }
}

fn circle_points(radius: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|j| {
            let (s, c) = libm::sincos(TAU * (j as f64 + 0.5) / n as f64);
            Point::new(radius * c, radius * s)
        })
        .collect()
}

/// Rectangular sampling grid including its corner points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGrid {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl SamplingGrid {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(x1 > x0 && y1 > y0) || nx < 2 || ny < 2 {
            return Err(Error::Config(format!(
                "sampling grid needs x0 < x1, y0 < y1 and at least 2 points per axis \
                 (got [{x0}, {x1}] x [{y0}, {y1}], {nx} x {ny})"
            )));
        }
        Ok(Self { x0, x1, y0, y1, nx, ny })
    }

    /// The default imaging rectangle `[-5, 5] x [-8.95, 1.05]` at `n x n`.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(-5.0, 5.0, -8.95, 1.05, n, n)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y1 - self.y0) / (self.ny - 1) as f64
    }

    pub fn point(&self, i: usize, j: usize) -> Point {
        let x = if i + 1 == self.nx { self.x1 } else { self.x0 + i as f64 * self.dx() };
        let y = if j + 1 == self.ny { self.y1 } else { self.y0 + j as f64 * self.dy() };
        Point::new(x, y)
    }

    /// All points, row-major: index `j * nx + i` holds `(x_i, y_j)`.
    pub fn points(&self) -> Vec<Point> {
        let mut pts = Vec::with_capacity(self.len());
        for j in 0..self.ny {
            for i in 0..self.nx {
                pts.push(self.point(i, j));
            }
        }
        pts
    }
}

/// A complete scatterer description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub profile: InterfaceProfile,
    pub obstacle: Option<ObstacleBoundary>,
    pub medium: MediumConfig,
}

impl Scene {
    /// Checks that the obstacle lies strictly below both the interface and
    /// the flat line, i.e. inside the lower medium and away from `B`.
    pub fn validate(&self) -> Result<()> {
        let Some(obstacle) = &self.obstacle else {
            return Ok(());
        };
        // Probe more densely than the Nyström nodes.
        let probes = (4 * obstacle.node_count()).max(256);
        for k in 0..probes {
            let p = obstacle.position(TAU * k as f64 / probes as f64);
            let ceiling = self.profile.evaluate(p.x).min(0.0);
            if !(p.y < ceiling) {
                return Err(Error::Config(format!(
                    "obstacle point ({:.4}, {:.4}) is not strictly below the interface",
                    p.x, p.y
                )));
            }
        }
        Ok(())
    }

    /// Points used to check that the scatterers sit inside the measurement circle.
    pub fn extent_points(&self) -> Vec<Point> {
        let mut pts = Vec::new();
        let r = self.profile.support_radius();
        if r > 0.0 {
            let n = 200;
            for k in 0..=n {
                let t = -r + 2.0 * r * k as f64 / n as f64;
                pts.push(Point::new(t, self.profile.evaluate(t)));
            }
        }
        if let Some(ob) = &self.obstacle {
            pts.extend(ob.nodes().iter().map(|n| n.position));
        }
        pts
    }
}

/// Experiment presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Ex1FlatCircle,
    Ex1SplineNoObstacle,
    Ex2GaussSquare,
    Ex2GaussSquareUp4,
    Ex2GaussSquareUp5,
    Ex3PiecewiseTriangle,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Ex1FlatCircle,
        Preset::Ex1SplineNoObstacle,
        Preset::Ex2GaussSquare,
        Preset::Ex2GaussSquareUp4,
        Preset::Ex2GaussSquareUp5,
        Preset::Ex3PiecewiseTriangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ex1FlatCircle => "ex1_flat_circle",
            Self::Ex1SplineNoObstacle => "ex1_spline_no_obstacle",
            Self::Ex2GaussSquare => "ex2_gauss_square",
            Self::Ex2GaussSquareUp4 => "ex2_gauss_square_up4",
            Self::Ex2GaussSquareUp5 => "ex2_gauss_square_up5",
            Self::Ex3PiecewiseTriangle => "ex3_piecewise_triangle",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset '{s}'")))
    }
}

impl core::fmt::Display for Preset {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Default number of Nyström nodes on preset obstacles.
pub const DEFAULT_OBSTACLE_NODES: usize = 64;

pub fn example1_spline_profile() -> InterfaceProfile {
    InterfaceProfile::SplineBumps(alloc::vec![
        SplineBump { amplitude: 1.0, scale: 2.0, shift: 4.0 },
        SplineBump { amplitude: -0.6, scale: 2.0, shift: -5.0 },
    ])
}

pub fn example2_gaussian_profile() -> InterfaceProfile {
    InterfaceProfile::GaussianBumps(alloc::vec![
        GaussianBump { amplitude: 0.6, rate: 6.0, center: -3.0 },
        GaussianBump { amplitude: 0.5, rate: 7.0, center: 0.0 },
        GaussianBump { amplitude: 0.5, rate: 8.0, center: 3.0 },
    ])
}

pub fn example3_piecewise_profile() -> InterfaceProfile {
    InterfaceProfile::PiecewiseConstant(alloc::vec![
        Plateau { value: 0.2, inner: 0.0, outer: 1.0 },
        Plateau { value: 0.3, inner: 3.0, outer: 4.0 },
    ])
}

/// Scene of a named preset with the default medium `kappa1 = 10`, `kappa2 = 5`.
pub fn preset_scene(preset: Preset) -> Scene {
    let obstacle = |shape| Some(ObstacleBoundary { shape, node_count: DEFAULT_OBSTACLE_NODES });
    let square = |dy: f64| ObstacleShape::RoundedSquare { center: Point::new(3.0, -6.0 + dy), scale: 0.3 };
    let (profile, obstacle) = match preset {
        Preset::Ex1FlatCircle => (
            InterfaceProfile::Flat,
            obstacle(ObstacleShape::Circle { center: Point::new(0.0, -4.0), radius: 0.5 }),
        ),
        Preset::Ex1SplineNoObstacle => (example1_spline_profile(), None),
        Preset::Ex2GaussSquare => (example2_gaussian_profile(), obstacle(square(0.0))),
        Preset::Ex2GaussSquareUp4 => (example2_gaussian_profile(), obstacle(square(4.0))),
        Preset::Ex2GaussSquareUp5 => (example2_gaussian_profile(), obstacle(square(5.0))),
        Preset::Ex3PiecewiseTriangle => (
            example3_piecewise_profile(),
            obstacle(ObstacleShape::RoundedTriangle {
                center: Point::new(-3.0, -6.0),
                radius: 0.5,
                wobble: 0.1,
            }),
        ),
    };
    Scene { profile, obstacle, medium: MediumConfig::default() }
}

/// Distance from `p` to the closed region `B` (zero inside) and its boundary
/// curve, sampled on the profile.
pub fn distance_to_region(profile: &InterfaceProfile, p: Point) -> f64 {
    if chi(profile, p) != 0 {
        return 0.0;
    }
    let r = profile.support_radius();
    if r == 0.0 {
        return f64::INFINITY;
    }
    // The closure of B is bounded by the graph and the flat segment under it.
    let n = 4000;
    let mut best = f64::INFINITY;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=n {
        let t = -r + 2.0 * r * k as f64 / n as f64;
        let f = profile.evaluate(t);
        if f != 0.0 {
            // vertical segment from (t, 0) to (t, f)
            let (lo, hi) = if f > 0.0 { (0.0, f) } else { (f, 0.0) };
            let y = p.y.clamp(lo, hi);
            best = best.min(Point::new(t, y).distance(p));
        } else if let Some((_, pf)) = prev {
            if pf != 0.0 {
                best = best.min(Point::new(t, 0.0).distance(p));
            }
        }
        prev = Some((t, f));
    }
    best
}

/// Distance from `p` to the closed obstacle (zero inside), using a dense
/// sampling of its boundary and a winding test for inclusion.
pub fn distance_to_obstacle(obstacle: &ObstacleBoundary, p: Point) -> f64 {
    let n = 2048;
    let pts: Vec<Point> = (0..n).map(|k| obstacle.position(TAU * k as f64 / n as f64)).collect();
    let mut winding = 0.0;
    let mut best = f64::INFINITY;
    for k in 0..n {
        let a = pts[k];
        let b = pts[(k + 1) % n];
        best = best.min(segment_distance(a, b, p));
        let (u, v) = (a - p, b - p);
        winding += libm::atan2(u.x * v.y - u.y * v.x, u.dot(v));
    }
    if libm::fabs(winding) > PI {
        0.0
    } else {
        best
    }
}

/// Distance from `p` to the obstacle curve `∂D`.
pub fn distance_to_obstacle_boundary(obstacle: &ObstacleBoundary, p: Point) -> f64 {
    let n = 2048;
    let pts: Vec<Point> = (0..n).map(|k| obstacle.position(TAU * k as f64 / n as f64)).collect();
    (0..n).map(|k| segment_distance(pts[k], pts[(k + 1) % n], p)).fold(f64::INFINITY, f64::min)
}

fn segment_distance(a: Point, b: Point, p: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 { ((p - a).dot(ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (a + ab * t).distance(p)
}

/// Distance from `p` to `∂D ∪ closure(B)` for a scene.
pub fn distance_to_scatterers(scene: &Scene, p: Point) -> f64 {
    let mut d = distance_to_region(&scene.profile, p);
    if let Some(ob) = &scene.obstacle {
        d = d.min(distance_to_obstacle_boundary(ob, p));
    }
    d
}

impl core::fmt::Display for InterfaceProfile {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let name = match self.kind() {
            ProfileKind::Flat => "flat",
            ProfileKind::SplineBumps => "spline_bumps",
            ProfileKind::GaussianBumps => "gaussian_bumps",
            ProfileKind::PiecewiseConstant => "piecewise_constant",
        };
        f.write_str(name)
    }
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Flat => "flat",
            Self::SplineBumps => "spline_bumps",
            Self::GaussianBumps => "gaussian_bumps",
            Self::PiecewiseConstant => "piecewise_constant",
        }
    }
}
