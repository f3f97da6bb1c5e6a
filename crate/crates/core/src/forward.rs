//! Forward scattering solver.
//!
//! The difference field `V = u - G` is represented as
//!
//! ```text
//! V(x) = P[ϕ](x) - β Σ_k w_k χ_k G(x, ξ_k) u(ξ_k),
//! P[ϕ](x) = ∫_{∂D} [∂G(x, y)/∂ν(y) - iη G(x, y)] ϕ(y) ds(y),
//! ```
//!
//! with `ν` the normal pointing into the obstacle, `ξ_k` the volume nodes of
//! the perturbation region and `ϕ` a density on the obstacle boundary. The
//! unknowns `u(ξ_k)` and `ϕ(y_i)` solve
//!
//! ```text
//! u(ξ_j) + β Σ_k w_k χ_k G(ξ_j, ξ_k) u_k - P[ϕ](ξ_j) = G(ξ_j, x_s)
//! ϕ/2 + Kϕ + iηSϕ + β Σ_k w_k χ_k G(y_i, ξ_k) u_k  = G(y_i, x_s)
//! ```
//!
//! where `K`, `S` are the double- and single-layer operators of the layered
//! kernel with the outward normal (the exterior trace of `P[ϕ]` is
//! `-(ϕ/2 + Kϕ + iηSϕ)`). The boundary operators split off the logarithmic
//! singularity of the free-space part and integrate it with the periodic
//! product rule on the equispaced nodes; the layered remainder is smooth on
//! the obstacle and uses the trapezoid rule. The volume self-cell integrates
//! the free-space part in polar coordinates.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::complex::{c64, I};
use crate::error::{Error, Result};
use crate::geometry::{
    build_region, Acquisition, BoundaryNode, MediumConfig, ObstacleBoundary, PerturbationRegion, Point, Scene,
    VolumeCell,
};
use crate::green::GreenEvaluator;
use crate::linalg::{relative_residual, LuFactorization, Matrix};
use crate::quadrature::GaussLegendre;
use crate::specfun;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Node sets of the volume and boundary unknowns.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub region: PerturbationRegion,
    pub boundary: Option<ObstacleBoundary>,
    /// Combined-field coupling `η`.
    pub eta: f64,
}

impl Discretization {
    /// Volume cells at `resolution` points per shortest wavelength and the
    /// obstacle nodes of the scene.
    pub fn new(scene: &Scene, resolution: f64) -> Result<Self> {
        scene.validate()?;
        let region = build_region(&scene.profile, &scene.medium, resolution)?;
        Ok(Self { region, boundary: scene.obstacle.clone(), eta: scene.medium.kappa2().max(1.0) })
    }

    pub fn n_volume(&self) -> usize {
        self.region.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.as_ref().map_or(0, |b| b.node_count())
    }

    pub fn len(&self) -> usize {
        self.n_volume() + self.n_boundary()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Solution of one point-source problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardSolution {
    pub source: Point,
    /// Total field at the volume nodes.
    pub u_volume: Vec<c64>,
    /// Combined-field density at the obstacle nodes.
    pub density: Vec<c64>,
    /// Relative residual of the linear solve.
    pub residual: f64,
}

impl ForwardSolution {
    fn unknowns(&self) -> impl Iterator<Item = &c64> {
        self.u_volume.iter().chain(&self.density)
    }
}

/// Synthetic data `V(x_r, x_s)`, stored as an `N_r x N_s` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringDataset {
    pub values: Matrix,
    pub acquisition: Acquisition,
    pub medium: MediumConfig,
    pub noise_tau: f64,
    pub seed: u64,
}

impl ScatteringDataset {
    pub fn new(values: Matrix, acquisition: Acquisition, medium: MediumConfig) -> Result<Self> {
        if values.rows() != acquisition.n_receivers() || values.cols() != acquisition.n_sources() {
            return Err(Error::Contract(format!(
                "data matrix is {} x {} but the acquisition has {} receivers and {} sources",
                values.rows(),
                values.cols(),
                acquisition.n_receivers(),
                acquisition.n_sources()
            )));
        }
        Ok(Self { values, acquisition, medium, noise_tau: 0.0, seed: 0 })
    }

    /// `V(x_r, x_s)`.
    pub fn value(&self, r: usize, s: usize) -> c64 {
        self.values[(r, s)]
    }

    /// `‖V - Vᵀ‖_F / ‖V‖_F`, meaningful when sources and receivers coincide.
    pub fn reciprocity_defect(&self) -> Result<f64> {
        if !self.acquisition.coincident() {
            return Err(Error::Contract("reciprocity needs coincident sources and receivers".into()));
        }
        let v = &self.values;
        let norm = v.norm_fro();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let diff = v.transpose();
        let d: f64 = v.as_slice().iter().zip(diff.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok(libm::sqrt(d) / norm)
    }
}

/// Row of weights mapping the unknowns to `V(x)` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRow(pub Vec<c64>);

impl ObservationRow {
    pub fn apply(&self, solution: &ForwardSolution) -> c64 {
        self.0.iter().zip(solution.unknowns()).map(|(w, u)| w * u).sum()
    }
}

/// The assembled and factorized forward system of one scene.
///
/// The matrix does not depend on the source, so one factorization serves
/// every source; only the right-hand side changes.
#[derive(Debug, Clone)]
pub struct ForwardSystem {
    green: GreenEvaluator,
    disc: Discretization,
    nodes: Vec<BoundaryNode>,
    matrix: Matrix,
    lu: Option<LuFactorization>,
}

impl ForwardSystem {
    pub fn assemble(scene: &Scene, disc: Discretization, green: &GreenEvaluator) -> Result<Self> {
        if green.medium() != &scene.medium {
            return Err(Error::Contract("Green evaluator and scene use different media".into()));
        }
        scene.validate()?;
        let nodes = disc.boundary.as_ref().map(|b| b.nodes()).unwrap_or_default();
        let mut system = Self { green: green.clone(), disc, nodes, matrix: Matrix::zeros(0, 0), lu: None };
        system.matrix = system.build_matrix()?;
        if !system.disc.is_empty() {
            system.lu = Some(LuFactorization::new(&system.matrix)?);
        }
        Ok(system)
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn green(&self) -> &GreenEvaluator {
        &self.green
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// The volume block `β w_k χ_k ∫_{cell_k} G(ξ_j, ·)` (without the identity).
    pub fn volume_block(&self) -> Matrix {
        let nv = self.disc.n_volume();
        let mut m = Matrix::zeros(nv, nv);
        for j in 0..nv {
            for k in 0..nv {
                m[(j, k)] = self.matrix[(j, k)] - if j == k { c64::new(1.0, 0.0) } else { c64::default() };
            }
        }
        m
    }

    fn beta(&self) -> f64 {
        self.green.medium().beta()
    }

    fn cell_weight(cell: &VolumeCell) -> f64 {
        cell.sign as f64 * cell.area()
    }

    fn build_matrix(&self) -> Result<Matrix> {
        let nv = self.disc.n_volume();
        let nb = self.disc.n_boundary();
        let mut a = Matrix::identity(nv + nb);
        let beta = self.beta();
        let cells = &self.disc.region.cells;
        let self_rule = GaussLegendre::new(16);
        let near_rule = GaussLegendre::new(8);

        for (j, cj) in cells.iter().enumerate() {
            for (k, ck) in cells.iter().enumerate() {
                let integral = if j == k {
                    self.self_cell_integral(cj, &self_rule)?
                } else if is_near(cj, ck) && GreenEvaluator::same_side(cj.center, ck.center) {
                    self.near_cell_integral(cj.center, ck, &near_rule)?
                } else {
                    ck.area() * self.green.green(cj.center, ck.center)?
                };
                a[(j, k)] += beta * ck.sign as f64 * integral;
            }
            if nb > 0 {
                let row = self.boundary_potential_row(cj.center)?;
                for (l, w) in row.into_iter().enumerate() {
                    a[(j, nv + l)] = -w;
                }
            }
        }

        if nb > 0 {
            let boundary = self.boundary_block()?;
            for i in 0..nb {
                for l in 0..nb {
                    a[(nv + i, nv + l)] = boundary[(i, l)];
                }
                let y = self.nodes[i].position;
                for (k, ck) in cells.iter().enumerate() {
                    a[(nv + i, k)] = beta * Self::cell_weight(ck) * self.green.green(y, ck.center)?;
                }
            }
        }
        Ok(a)
    }

    /// `∫_cell G(center, ξ) dξ`: the free-space part in polar coordinates
    /// around the center, the smooth remainder by the midpoint rule.
    fn self_cell_integral(&self, cell: &VolumeCell, rule: &GaussLegendre) -> Result<c64> {
        let kappa = self.green.kappa_at(cell.center);
        let (hw, hh) = (cell.half_width, cell.half_height);
        let radial = |rho: f64| -> c64 {
            let h1 = specfun::hankel1_1(kappa * rho).expect("positive argument");
            rho * h1 / kappa + c64::new(0.0, 2.0 / (PI * kappa * kappa))
        };
        // four triangles: (distance to edge, half-angle spanned)
        let mut total = c64::default();
        for (d, other) in [(hw, hh), (hw, hh), (hh, hw), (hh, hw)] {
            let half_angle = libm::atan2(other, d);
            total += rule
                .mapped(-half_angle, half_angle)
                .map(|(t, w)| radial(d / libm::cos(t)) * w)
                .sum::<c64>();
        }
        let free = 0.25 * I * total;
        Ok(free + cell.area() * self.green.green_scattered(cell.center, cell.center)?)
    }

    /// `∫_cell G(x, ξ) dξ` for `x` outside but close to the cell: tensor
    /// Gauss–Legendre for the free-space part, midpoint rule for the rest.
    fn near_cell_integral(&self, x: Point, cell: &VolumeCell, rule: &GaussLegendre) -> Result<c64> {
        let kappa = self.green.kappa_at(cell.center);
        let c = cell.center;
        let mut free = c64::default();
        for (sx, wx) in rule.mapped(c.x - cell.half_width, c.x + cell.half_width) {
            for (sy, wy) in rule.mapped(c.y - cell.half_height, c.y + cell.half_height) {
                free += wx * wy * crate::green::phi(kappa, x, Point::new(sx, sy))?;
            }
        }
        Ok(free + cell.area() * self.green.green_scattered(x, c)?)
    }

    /// Weights of `P[ϕ](x) = Σ_l w_l ϕ_l` for `x` away from the obstacle.
    fn boundary_potential_row(&self, x: Point) -> Result<Vec<c64>> {
        let n = self.nodes.len();
        let h = TAU / n as f64;
        let eta = self.disc.eta;
        self.nodes
            .iter()
            .map(|node| {
                let g = self.green.evaluate(node.position, x, true)?;
                let normal = node.outward_normal();
                let dn = g.grad[0] * normal.x + g.grad[1] * normal.y;
                Ok((-dn - I * eta * g.value) * node.speed() * h)
            })
            .collect()
    }

    /// `1/2 + K + iηS` on the obstacle nodes.
    fn boundary_block(&self) -> Result<Matrix> {
        let nb = self.nodes.len();
        let kappa = self.green.medium().kappa2();
        let eta = self.disc.eta;
        let h = TAU / nb as f64;
        let log_weights: Vec<f64> = (0..nb).map(|d| log_weight(nb, h * d as f64)).collect();
        let mut m = Matrix::zeros(nb, nb);
        for i in 0..nb {
            for l in 0..nb {
                let (k1, k2, s1, s2) = free_kernels(kappa, &self.nodes[i], &self.nodes[l]);
                let rw = log_weights[(i + nb - l) % nb];
                let smooth = self.green.green_scattered_full(self.nodes[l].position, self.nodes[i].position)?;
                let normal = self.nodes[l].outward_normal();
                let speed = self.nodes[l].speed();
                let ks = (smooth.grad[0] * normal.x + smooth.grad[1] * normal.y) * speed;
                let ss = smooth.value * speed;
                let dl = rw * k1 + h * (k2 + ks);
                let sl = rw * s1 + h * (s2 + ss);
                m[(i, l)] = dl + I * eta * sl + if i == l { c64::new(0.5, 0.0) } else { c64::default() };
            }
        }
        Ok(m)
    }

    /// Right-hand side `[G(ξ_j, x_s); G(y_i, x_s)]`.
    pub fn rhs(&self, source: Point) -> Result<Vec<c64>> {
        self.disc
            .region
            .nodes()
            .chain(self.nodes.iter().map(|n| n.position))
            .map(|p| self.green.green(p, source))
            .collect()
    }

    pub fn solve_source(&self, source: Point) -> Result<ForwardSolution> {
        let rhs = self.rhs(source)?;
        let x = match &self.lu {
            Some(lu) => lu.solve(&rhs),
            None => Vec::new(),
        };
        let residual = relative_residual(&self.matrix, &x, &rhs);
        if residual > 1e-10 {
            return Err(Error::Solver {
                message: format!("linear residual {residual:e} for source ({}, {})", source.x, source.y),
                condition: self.lu.as_ref().map_or(1.0, |lu| lu.condition_estimate()),
            });
        }
        let nv = self.disc.n_volume();
        Ok(ForwardSolution { source, u_volume: x[..nv].to_vec(), density: x[nv..].to_vec(), residual })
    }

    /// Weights mapping the unknowns to `V(x)` for a point off the scatterers.
    pub fn observation_row(&self, x: Point) -> Result<ObservationRow> {
        if let Some(b) = &self.disc.boundary {
            if crate::geometry::distance_to_obstacle(b, x) == 0.0 {
                return Err(Error::Domain(format!(
                    "({}, {}) is on or inside the obstacle; use the boundary trace",
                    x.x, x.y
                )));
            }
        }
        let beta = self.beta();
        let mut row = Vec::with_capacity(self.disc.len());
        for cell in &self.disc.region.cells {
            row.push(-beta * Self::cell_weight(cell) * self.green.green(x, cell.center)?);
        }
        if !self.nodes.is_empty() {
            row.extend(self.boundary_potential_row(x)?);
        }
        Ok(ObservationRow(row))
    }

    /// `V(x, x_s)` for a point off the scatterers.
    pub fn evaluate_v(&self, solution: &ForwardSolution, x: Point) -> Result<c64> {
        Ok(self.observation_row(x)?.apply(solution))
    }

    /// Total field `u = G + V` on the obstacle boundary at parameter `t`,
    /// from the trace of the representation (zero for an exact solution).
    pub fn boundary_total_field(&self, solution: &ForwardSolution, t: f64) -> Result<c64> {
        let Some(boundary) = &self.disc.boundary else {
            return Err(Error::Contract("scene has no obstacle".into()));
        };
        let nb = self.nodes.len();
        let h = TAU / nb as f64;
        let kappa = self.green.medium().kappa2();
        let target = boundary.node_at(t);
        let mut trace = c64::default();
        let mut density_at_t = c64::default();
        for (l, node) in self.nodes.iter().enumerate() {
            let offset = t - node.theta;
            let (k1, k2, s1, s2) = free_kernels(kappa, &target, node);
            let rw = log_weight(nb, offset);
            let smooth = self.green.green_scattered_full(node.position, target.position)?;
            let normal = node.outward_normal();
            let ks = (smooth.grad[0] * normal.x + smooth.grad[1] * normal.y) * node.speed();
            let ss = smooth.value * node.speed();
            let weight = rw * k1 + h * (k2 + ks) + I * self.disc.eta * (rw * s1 + h * (s2 + ss));
            trace += weight * solution.density[l];
            density_at_t += trig_cardinal(nb, offset) * solution.density[l];
        }
        let beta = self.beta();
        let mut volume = c64::default();
        for (k, cell) in self.disc.region.cells.iter().enumerate() {
            volume += beta * Self::cell_weight(cell) * self.green.green(target.position, cell.center)? * solution.u_volume[k];
        }
        let v = -(0.5 * density_at_t + trace) - volume;
        Ok(self.green.green(target.position, solution.source)? + v)
    }
}

/// Observation rows of all receivers, after checking that the scatterers
/// lie inside the measurement circle.
pub fn receiver_rows(system: &ForwardSystem, scene: &Scene, acquisition: &Acquisition) -> Result<Vec<ObservationRow>> {
    acquisition.check_inside(&scene.extent_points())?;
    acquisition.receivers.iter().map(|&x| system.observation_row(x)).collect()
}

/// One column `V(·, x_s)` of the data matrix.
pub fn dataset_column(system: &ForwardSystem, rows: &[ObservationRow], source: Point) -> Result<Vec<c64>> {
    let solution = system.solve_source(source)?;
    Ok(rows.iter().map(|row| row.apply(&solution)).collect())
}

/// Assembles the data matrix from its columns.
pub fn dataset_from_columns(columns: Vec<Vec<c64>>, acquisition: &Acquisition, medium: MediumConfig) -> Result<ScatteringDataset> {
    let (nr, ns) = (acquisition.n_receivers(), acquisition.n_sources());
    if columns.len() != ns || columns.iter().any(|c| c.len() != nr) {
        return Err(Error::Contract("data columns do not match the acquisition".into()));
    }
    let mut values = Matrix::zeros(nr, ns);
    for (s, column) in columns.into_iter().enumerate() {
        for (r, v) in column.into_iter().enumerate() {
            values[(r, s)] = v;
        }
    }
    ScatteringDataset::new(values, acquisition.clone(), medium)
}

/// Synthetic data for every source of the acquisition (sequential).
pub fn generate_dataset(system: &ForwardSystem, scene: &Scene, acquisition: &Acquisition) -> Result<ScatteringDataset> {
    let rows = receiver_rows(system, scene, acquisition)?;
    let columns = acquisition
        .sources
        .iter()
        .enumerate()
        .map(|(s, &x)| dataset_column(system, &rows, x).map_err(|e| annotate(e, s)))
        .collect::<Result<Vec<_>>>()?;
    dataset_from_columns(columns, acquisition, scene.medium)
}

/// Prefixes an error message with the source index.
pub fn annotate(error: Error, source: usize) -> Error {
    match error {
        Error::Solver { message, condition } => Error::Solver { message: format!("source {source}: {message}"), condition },
        Error::Accuracy { context, residual } => Error::Accuracy { context: format!("source {source}: {context}"), residual },
        Error::Domain(m) => Error::Domain(format!("source {source}: {m}")),
        Error::Singularity(m) => Error::Singularity(format!("source {source}: {m}")),
        Error::Config(m) => Error::Config(format!("source {source}: {m}")),
        Error::Contract(m) => Error::Contract(format!("source {source}: {m}")),
    }
}

/// Whether two cells are close enough for the midpoint rule to lose accuracy
/// on the logarithmic kernel.
fn is_near(a: &VolumeCell, b: &VolumeCell) -> bool {
    let size = a.half_width.max(a.half_height).max(b.half_width).max(b.half_height);
    a.center.distance(b.center) < 6.0 * size
}

/// Weight `R_j(t)` of the periodic product rule for
/// `∫_0^{2π} ln(4 sin²((t-τ)/2)) f(τ) dτ ≈ Σ_j R_j(t) f(τ_j)` on `2n` nodes,
/// as a function of `t - τ_j`.
pub fn log_weight(nodes: usize, offset: f64) -> f64 {
    let n = nodes / 2;
    let nf = n as f64;
    let mut sum = 0.0;
    for m in 1..n {
        sum += libm::cos(m as f64 * offset) / m as f64;
    }
    -2.0 * PI / nf * sum - PI / (nf * nf) * libm::cos(nf * offset)
}

/// Trigonometric cardinal function of the `2n` equispaced nodes.
fn trig_cardinal(nodes: usize, offset: f64) -> f64 {
    let n = nodes / 2;
    let mut sum = 1.0 + libm::cos(n as f64 * offset);
    for m in 1..n {
        sum += 2.0 * libm::cos(m as f64 * offset);
    }
    sum / nodes as f64
}

/// Free-space double- and single-layer kernels split as
/// `L = L1 ln(4 sin²((t-τ)/2)) + L2`, `M = M1 ln(...) + M2`, with the
/// parametrization speed at `τ` included. Returns `(L1, L2, M1, M2)`.
fn free_kernels(kappa: f64, x: &BoundaryNode, y: &BoundaryNode) -> (c64, c64, c64, c64) {
    let d = x.position - y.position;
    let r = d.norm();
    let speed = y.speed();
    let offset = x.theta - y.theta;
    let log_term = libm::log(4.0 * libm::sin(0.5 * offset).powi(2));
    if r < 1e-13 * speed.max(1.0) {
        let curvature = y.tangent.y * y.second.x - y.tangent.x * y.second.y;
        let l2 = c64::new(curvature / (4.0 * PI * speed * speed), 0.0);
        let m2 = c64::new(-(EULER_GAMMA + libm::log(0.5 * kappa * speed)) / (2.0 * PI), 0.25) * speed;
        let m1 = c64::new(-speed / (4.0 * PI), 0.0);
        return (c64::default(), l2, m1, m2);
    }
    let c = y.tangent.y * d.x - y.tangent.x * d.y;
    let (h0, h1) = specfun::hankel01_unchecked(kappa * r);
    let (j0, j1) = (h0.re, h1.re);
    let l = 0.25 * I * kappa * h1 * c / r;
    let l1 = c64::new(-kappa / (4.0 * PI) * c * j1 / r, 0.0);
    let m = 0.25 * I * h0 * speed;
    let m1 = c64::new(-j0 * speed / (4.0 * PI), 0.0);
    (l1, l - l1 * log_term, m1, m - m1 * log_term)
}
