//! Background Green's function of the two-layer medium.
//!
//! `G(x, z)` is the outgoing solution of `ΔG + κ0(x)² G = -δ_z` where
//! `κ0 = kappa1` above the flat line `x2 = 0` and `kappa2` below. With
//! `β_j(ξ) = sqrt(κ_j² - ξ²)` (branch `Im β_j >= 0`) and a source `z` in the
//! upper half-plane it is given by the Sommerfeld integrals
//!
//! ```text
//! x2 >= 0:  G = Φ_κ1(x, z) + i/(4π) ∫ r(ξ)/β1 · e^{iξ(x1-z1)} e^{iβ1 (x2+z2)} dξ,  r = (β1-β2)/(β1+β2)
//! x2 <  0:  G =              i/(4π) ∫ 2/(β1+β2) · e^{iξ(x1-z1)} e^{iβ1 z2 - iβ2 x2} dξ
//! ```
//!
//! and for a source below the line by the same formulas with the two media
//! exchanged and `x2, z2` mirrored.
//!
//! The integrand depends on `ξ` only through `ξ²`, so the integral folds to
//! `∫_0^∞ F(ξ) (e^{iξa} + e^{-iξa}) dξ` with `a = |x1 - z1|`. The two halves
//! are integrated on different contours:
//!
//! * `e^{-iξa}`: the physical sheet is analytic in the closed lower-right
//!   quadrant, so the whole half-line is replaced by a ray from the origin
//!   pointing down at the steepest-descent angle of the far-field phase.
//! * `e^{+iξa}`: the real axis is kept up to a point `ξ_a` just past the
//!   branch points (split at `κ1`, `κ2` with a cosine map that removes the
//!   square-root endpoint behavior), followed by a ray from `ξ_a` rising at
//!   the steepest-descent angle.
//!
//! Both rays decay exponentially at rate `sqrt(a² + H²)` where `H` is the
//! total distance of the two points from the flat line, so no truncation of
//! a slowly decaying real-axis tail is ever needed.

use alloc::format;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::complex::{c64, cexp, cis, I};
use crate::error::{Error, Result};
use crate::geometry::{MediumConfig, Point};
use crate::quadrature::GaussLegendre;
use crate::specfun;

/// Free-space fundamental solution `Φ_κ(x, z) = (i/4) H_0^{(1)}(κ|x - z|)`.
pub fn phi(kappa: f64, x: Point, z: Point) -> Result<c64> {
    let r = x.distance(z);
    if r == 0.0 {
        return Err(Error::Singularity("Φ evaluated at x = z".into()));
    }
    Ok(0.25 * I * specfun::order0_unchecked(kappa * r).hankel1())
}

/// `∇_x Φ_κ(x, z) = -(iκ/4) H_1^{(1)}(κr) (x - z)/r`.
pub fn phi_gradient(kappa: f64, x: Point, z: Point) -> Result<[c64; 2]> {
    let d = x - z;
    let r = d.norm();
    if r == 0.0 {
        return Err(Error::Singularity("∇Φ evaluated at x = z".into()));
    }
    let s = -0.25 * I * kappa * specfun::order1_unchecked(kappa * r).hankel1() / r;
    Ok([s * d.x, s * d.y])
}

/// Value and gradient (in `x`) of a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GreenValue {
    pub value: c64,
    pub grad: [c64; 2],
}

impl core::ops::Add for GreenValue {
    type Output = GreenValue;
    fn add(self, o: GreenValue) -> GreenValue {
        GreenValue {
            value: self.value + o.value,
            grad: [self.grad[0] + o.grad[0], self.grad[1] + o.grad[1]],
        }
    }
}

/// Quadrature parameters of the Sommerfeld integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SommerfeldConfig {
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Largest phase change (radians) allowed across one panel.
    pub max_panel_phase: f64,
    /// Distance of the real-axis end point `ξ_a` past the largest branch
    /// point, as a fraction of the largest wavenumber (upper bound).
    pub detour: f64,
    /// Smallest angle below the real axis of the ray from the origin.
    pub min_ray_angle: f64,
    /// Rays stop once the remaining tail is below this fraction of the
    /// accumulated integral.
    pub tail_tolerance: f64,
    /// Safeguard on the number of panels per contour piece.
    pub max_panels: usize,
}

impl Default for SommerfeldConfig {
    fn default() -> Self {
        Self {
            order: 16,
            max_panel_phase: 5.0 * PI,
            detour: 0.5,
            min_ray_angle: PI / 6.0,
            tail_tolerance: 1e-13,
            max_panels: 4000,
        }
    }
}

impl SommerfeldConfig {
    /// Same contours with twice as many panels (for error estimates).
    pub fn refined(&self) -> Self {
        Self { max_panel_phase: 0.5 * self.max_panel_phase, ..*self }
    }
}

/// Evaluator of the two-layer Green's function and its gradient.
///
/// Immutable after construction; evaluation takes `&self` and is safe to
/// share between threads.
#[derive(Debug, Clone)]
pub struct GreenEvaluator {
    medium: MediumConfig,
    config: SommerfeldConfig,
    rule: GaussLegendre,
}

/// Which side of the flat line the evaluation point sits on, relative to the
/// source after mirroring the source into the upper half-plane.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    /// Wavenumber on the source side.
    ks: f64,
    /// Wavenumber on the other side.
    ko: f64,
    cross: bool,
    /// Exponent is `i β_s hs + i β_o ho`, both heights non-negative.
    hs: f64,
    ho: f64,
}

impl Kernel {
    /// Returns `(A(ξ) e^{i(β_s hs + β_o ho)}, ∂_{x2}-multiplier)`.
    #[inline]
    fn eval(&self, bs: c64, bo: c64) -> (c64, c64) {
        let phase = I * (bs * self.hs + bo * self.ho);
        let e = cexp(phase);
        if self.cross {
            (2.0 * e / (bs + bo), -I * bo)
        } else {
            ((bs - bo) * e / ((bs + bo) * bs), I * bs)
        }
    }

    fn height(&self) -> f64 {
        self.hs + self.ho
    }
}

/// Physical `β = sqrt(κ² - ξ²)` on the real axis.
#[inline]
fn beta_real(kappa: f64, xi: f64) -> c64 {
    let d = (kappa - xi) * (kappa + xi);
    if d >= 0.0 {
        c64::new(libm::sqrt(d), 0.0)
    } else {
        c64::new(0.0, libm::sqrt(-d))
    }
}

/// Continuation of the physical `β` off the real axis, valid in the closed
/// lower-right quadrant and in `Re ξ > κ`.
#[inline]
fn beta_complex(kappa: f64, xi: c64) -> c64 {
    I * (xi - kappa).sqrt() * (xi + kappa).sqrt()
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    v: c64,
    d1: c64,
    d2: c64,
}

impl GreenEvaluator {
    pub fn new(medium: MediumConfig) -> Self {
        Self::with_config(medium, SommerfeldConfig::default())
    }

    pub fn with_config(medium: MediumConfig, config: SommerfeldConfig) -> Self {
        let rule = GaussLegendre::new(config.order);
        Self { medium, config, rule }
    }

    pub fn medium(&self) -> &MediumConfig {
        &self.medium
    }

    pub fn config(&self) -> &SommerfeldConfig {
        &self.config
    }

    /// Background wavenumber at `x`.
    pub fn kappa_at(&self, x: Point) -> f64 {
        self.medium.kappa_at(x)
    }

    /// `G(x, z)`.
    pub fn green(&self, x: Point, z: Point) -> Result<c64> {
        Ok(self.evaluate(x, z, false)?.value)
    }

    /// `∇_x G(x, z)`.
    pub fn green_gradient(&self, x: Point, z: Point) -> Result<[c64; 2]> {
        Ok(self.evaluate(x, z, true)?.grad)
    }

    /// `G(x, z)` together with `∇_x G(x, z)`.
    pub fn evaluate(&self, x: Point, z: Point, with_gradient: bool) -> Result<GreenValue> {
        if x == z {
            return Err(Error::Singularity("G evaluated at x = z".into()));
        }
        let (smooth, same_side, ks) = self.smooth_part(x, z, with_gradient)?;
        if !same_side {
            return Ok(smooth);
        }
        let mut direct = GreenValue { value: phi(ks, x, z)?, grad: [c64::default(); 2] };
        if with_gradient {
            direct.grad = phi_gradient(ks, x, z)?;
        }
        Ok(direct + smooth)
    }

    /// `G(x, z)` minus the free-space term of the source side when `x` and
    /// `z` are on the same side of the flat line; `G` itself otherwise.
    /// Smooth in `x` near `z`, and defined at `x = z`.
    pub fn green_scattered(&self, x: Point, z: Point) -> Result<c64> {
        Ok(self.smooth_part(x, z, false)?.0.value)
    }

    /// Value and gradient of [`Self::green_scattered`].
    pub fn green_scattered_full(&self, x: Point, z: Point) -> Result<GreenValue> {
        Ok(self.smooth_part(x, z, true)?.0)
    }

    /// Whether `x` is treated as being on the same side as the source `z`.
    pub fn same_side(x: Point, z: Point) -> bool {
        if z.y >= 0.0 {
            x.y >= 0.0
        } else {
            x.y <= 0.0
        }
    }

    /// Difference between the default evaluation and one with twice the
    /// panel count.
    pub fn error_estimate(&self, x: Point, z: Point) -> Result<f64> {
        let fine = GreenEvaluator::with_config(self.medium, self.config.refined());
        Ok((self.green(x, z)? - fine.green(x, z)?).norm())
    }

    /// Evaluates `G` and fails with a numerical-accuracy error if the
    /// panel-halving estimate exceeds `tolerance`.
    pub fn green_checked(&self, x: Point, z: Point, tolerance: f64) -> Result<c64> {
        let fine = GreenEvaluator::with_config(self.medium, self.config.refined());
        let coarse = self.green(x, z)?;
        let better = fine.green(x, z)?;
        let residual = (coarse - better).norm();
        if residual > tolerance {
            return Err(Error::Accuracy {
                context: format!("G(({}, {}), ({}, {}))", x.x, x.y, z.x, z.y),
                residual,
            });
        }
        Ok(better)
    }

    /// Sommerfeld integral part. Returns the value, whether `x` is on the
    /// source side, and the source-side wavenumber.
    fn smooth_part(&self, x: Point, z: Point, grad: bool) -> Result<(GreenValue, bool, f64)> {
        let (k1, k2) = (self.medium.kappa1(), self.medium.kappa2());
        let mirrored = z.y < 0.0;
        let (ks, ko, xs, zs) = if mirrored { (k2, k1, -x.y, -z.y) } else { (k1, k2, x.y, z.y) };
        let same = Self::same_side(x, z);
        let kernel = if same {
            Kernel { ks, ko, cross: false, hs: xs + zs, ho: 0.0 }
        } else {
            Kernel { ks, ko, cross: true, hs: zs, ho: -xs }
        };
        let delta = x.x - z.x;
        let (plus, minus) = self.sommerfeld(kernel, libm::fabs(delta), grad, (x, z))?;
        let pref = I / (4.0 * PI);
        let sign1 = if delta > 0.0 {
            1.0
        } else if delta < 0.0 {
            -1.0
        } else {
            0.0
        };
        let mut out = GreenValue { value: pref * (plus.v + minus.v), grad: [c64::default(); 2] };
        if grad {
            let d2 = pref * (plus.d2 + minus.d2);
            out.grad = [pref * sign1 * (plus.d1 - minus.d1), if mirrored { -d2 } else { d2 }];
        }
        Ok((out, same, ks))
    }

    /// The two half-line integrals `∫_0^∞ F e^{±iξa}` (with their gradient
    /// companions).
    fn sommerfeld(&self, k: Kernel, a: f64, grad: bool, pts: (Point, Point)) -> Result<(Acc, Acc)> {
        let height = k.height();
        let rho = libm::hypot(a, height);
        let (lo, hi) = if k.ks <= k.ko { (k.ks, k.ko) } else { (k.ko, k.ks) };

        // e^{+iξa}: real axis up to ξ_a, then a rising ray.
        let mut plus = Acc::default();
        let gap = if rho > 0.0 { (4.0 / rho).min(self.config.detour * hi) } else { self.config.detour * hi };
        let xi_a = hi + gap.max(0.05 * hi);
        let mut segments = [(0.0, lo), (lo, hi), (hi, xi_a)];
        let count = if lo == hi {
            segments[1] = (hi, xi_a);
            2
        } else {
            3
        };
        for &(s0, s1) in &segments[..count] {
            self.real_segment(k, a, s0, s1, grad, &mut plus);
        }
        let alpha = libm::atan2(height, a);
        let up = cis(FRAC_PI_2 - alpha);
        self.ray(k, a, 1.0, c64::new(xi_a, 0.0), up, (lo, hi), grad, &mut plus, pts)?;

        // e^{-iξa}: ray from the origin into the lower-right quadrant.
        let mut minus = Acc::default();
        let alpha_m = libm::atan2(a, height);
        let down = cis(-alpha_m.max(self.config.min_ray_angle));
        self.ray(k, a, -1.0, c64::default(), down, (lo, hi), grad, &mut minus, pts)?;
        Ok((plus, minus))
    }

    /// `∫_{s0}^{s1} F(ξ) e^{iξa}` on the real axis with `ξ = mid - half cos θ`.
    fn real_segment(&self, k: Kernel, a: f64, s0: f64, s1: f64, grad: bool, acc: &mut Acc) {
        if s1 <= s0 {
            return;
        }
        let (bs0, bs1) = (beta_real(k.ks, s0), beta_real(k.ks, s1));
        let (bo0, bo1) = (beta_real(k.ko, s0), beta_real(k.ko, s1));
        let phase = (s1 - s0) * a
            + (bs0.re - bs1.re).abs() * k.hs
            + (bo0.re - bo1.re).abs() * k.ho
            + (bs1.im * k.hs + bo1.im * k.ho) / 3.0;
        let panels = (libm::ceil(phase * FRAC_PI_2 / self.config.max_panel_phase) as usize).max(2);
        let (mid, half) = (0.5 * (s0 + s1), 0.5 * (s1 - s0));
        let dtheta = PI / panels as f64;
        for p in 0..panels {
            for (theta, w) in self.rule.mapped(p as f64 * dtheta, (p + 1) as f64 * dtheta) {
                let (st, ct) = libm::sincos(theta);
                let xi = mid - half * ct;
                let jac = half * st * w;
                let (ae, m2) = k.eval(beta_real(k.ks, xi), beta_real(k.ko, xi));
                let f = ae * cis(xi * a) * jac;
                acc.v += f;
                if grad {
                    acc.d1 += f * c64::new(0.0, xi);
                    acc.d2 += f * m2;
                }
            }
        }
    }

    /// `∫ F(ξ) e^{i dir ξ a} dξ` along `ξ = start + s·unit`, `s ∈ [0, ∞)`.
    #[allow(clippy::too_many_arguments)]
    fn ray(
        &self,
        k: Kernel,
        a: f64,
        dir: f64,
        start: c64,
        unit: c64,
        branch: (f64, f64),
        grad: bool,
        acc: &mut Acc,
        pts: (Point, Point),
    ) -> Result<()> {
        let integrand = |xi: c64| -> (c64, c64) {
            let (ae, m2) = k.eval(beta_complex(k.ks, xi), beta_complex(k.ko, xi));
            (ae * cexp(I * dir * a * xi), m2)
        };
        let branch_distance = |xi: c64| (xi - branch.0).norm().min((xi - branch.1).norm());
        // local rate of change of the exponent along the ray
        let rate = |xi: c64| -> (f64, f64) {
            let bs = beta_complex(k.ks, xi);
            let bo = beta_complex(k.ko, xi);
            let dphase = unit * I * (dir * a - (xi / bs) * k.hs - (xi / bo) * k.ho);
            (dphase.norm(), -dphase.re)
        };
        let mut s = 0.0;
        let mut scale = 0.0f64;
        let mut tail = f64::INFINITY;
        for _ in 0..self.config.max_panels {
            let xi0 = start + unit * s;
            let mut len = branch_distance(xi0).max(1e-3 * (1.0 + s));
            for _ in 0..8 {
                let r = rate(xi0).0.max(rate(xi0 + unit * (0.5 * len)).0).max(rate(xi0 + unit * len).0);
                if r * len <= self.config.max_panel_phase {
                    break;
                }
                len = self.config.max_panel_phase / r;
            }
            let s1 = s + len;
            for (t, w) in self.rule.mapped(s, s1) {
                let xi = start + unit * t;
                let (f, m2) = integrand(xi);
                let fw = f * unit * w;
                scale = scale.max(f.norm() * len);
                acc.v += fw;
                if grad {
                    acc.d1 += fw * I * xi;
                    acc.d2 += fw * m2;
                    scale = scale.max(fw.norm() * (xi.norm() + m2.norm()));
                }
            }
            s = s1;
            let xi1 = start + unit * s;
            let (f1, m21) = integrand(xi1);
            let decay1 = rate(xi1).1;
            let mut mag = f1.norm();
            if grad {
                mag *= 1.0 + xi1.norm() + m21.norm();
            }
            // remaining tail: exponential decay length or, when the decay is
            // weak, algebraic decay over the scale s
            let reach = if decay1 > 0.0 { (1.0 / decay1).min(s) } else { s };
            tail = mag * reach;
            if tail <= self.config.tail_tolerance * scale {
                return Ok(());
            }
        }
        Err(Error::Accuracy {
            context: format!(
                "Sommerfeld ray for G(({}, {}), ({}, {})) did not converge",
                pts.0.x, pts.0.y, pts.1.x, pts.1.y
            ),
            residual: tail,
        })
    }

    /// Helmholtz–Kirchhoff residual
    /// `|∮ (conj G(ξ,x) ∂_ν G(ξ,z) - conj ∂_ν G(ξ,x) G(ξ,z)) ds - 2i Im G(x,z)|`
    /// on the circle of radius `radius`, using the `n_quad`-point trapezoid rule.
    pub fn verify_helmholtz_kirchhoff(&self, x: Point, z: Point, radius: f64, n_quad: usize) -> Result<f64> {
        check_circle_inputs(x, z, radius, n_quad, true)?;
        let mut integral = c64::default();
        let ds = TAU * radius / n_quad as f64;
        for q in 0..n_quad {
            let (s, c) = libm::sincos(TAU * (q as f64 + 0.5) / n_quad as f64);
            let xi = Point::new(radius * c, radius * s);
            let normal = Point::new(c, s);
            let gx = self.evaluate(xi, x, true)?;
            let gz = self.evaluate(xi, z, true)?;
            let dgx = gx.grad[0] * normal.x + gx.grad[1] * normal.y;
            let dgz = gz.grad[0] * normal.x + gz.grad[1] * normal.y;
            integral += (gx.value.conj() * dgz - dgx.conj() * gz.value) * ds;
        }
        let expected = c64::new(0.0, 2.0 * self.green(x, z)?.im);
        Ok((integral - expected).norm())
    }

    /// Remainder `ζ(x, z) = ∮ κ(ξ) conj G(x,ξ) G(ξ,z) ds - Im G(x,z)` on the
    /// circle of radius `radius` (trapezoid rule with `n_quad` points).
    pub fn zeta_remainder(&self, x: Point, z: Point, radius: f64, n_quad: usize) -> Result<c64> {
        check_circle_inputs(x, z, radius, n_quad, false)?;
        let mut integral = c64::default();
        let ds = TAU * radius / n_quad as f64;
        for q in 0..n_quad {
            let (s, c) = libm::sincos(TAU * (q as f64 + 0.5) / n_quad as f64);
            let xi = Point::new(radius * c, radius * s);
            let kappa = self.kappa_at(xi);
            integral += kappa * self.green(x, xi)?.conj() * self.green(xi, z)? * ds;
        }
        Ok(integral - self.green(x, z)?.im)
    }
}

fn check_circle_inputs(x: Point, z: Point, radius: f64, n_quad: usize, strict: bool) -> Result<()> {
    if n_quad < 4 {
        return Err(Error::Domain(format!("need at least 4 quadrature points, got {n_quad}")));
    }
    if !(x.norm() < radius && z.norm() < radius) {
        return Err(Error::Domain(format!("points must lie inside the circle of radius {radius}")));
    }
    if strict {
        if x.y == 0.0 || z.y == 0.0 {
            return Err(Error::Domain("points must not lie on the flat interface".into()));
        }
        if !(radius > 2.0 * x.norm().max(z.norm())) {
            return Err(Error::Domain(format!(
                "radius {radius} must exceed twice the larger point norm"
            )));
        }
    }
    Ok(())
}
