//! Bessel functions of the first and second kind, and Hankel functions of
//! the first kind, for orders 0 and 1 and real non-negative arguments.
//!
//! Arguments up to 8 use the ascending power series (with the logarithmic
//! term for `Y`). Beyond 8 the functions are written in modulus/phase form
//!
//! ```text
//! J_n(t) = sqrt(2/(pi t)) (P_n(t) cos chi - Q_n(t) sin chi)
//! Y_n(t) = sqrt(2/(pi t)) (P_n(t) sin chi + Q_n(t) cos chi),  chi = t - (2n+1) pi/4
//! ```
//!
//! with `P_n` and `Q_n` given by Chebyshev expansions in `8/t` that are
//! accurate to about 1e-18 on the whole half-line `t >= 8`.

use alloc::format;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_2_PI, PI};

use crate::complex::c64;
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 8.0;

/// Value pair `(J_n(t), Y_n(t))` for a fixed order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderValue {
    pub j: f64,
    pub y: f64,
}

impl CylinderValue {
    /// `J + iY`.
    pub fn hankel1(self) -> c64 {
        c64::new(self.j, self.y)
    }

    /// `J - iY`.
    pub fn hankel2(self) -> c64 {
        c64::new(self.j, -self.y)
    }
}

/// `J_0(t)` for `t >= 0`.
pub fn bessel_j0(t: f64) -> Result<f64> {
    check_nonnegative(t)?;
    Ok(j0_unchecked(t))
}

/// `J_1(t)` for `t >= 0`.
pub fn bessel_j1(t: f64) -> Result<f64> {
    check_nonnegative(t)?;
    Ok(j1_unchecked(t))
}

/// `Y_0(t)` for `t > 0`.
pub fn bessel_y0(t: f64) -> Result<f64> {
    Ok(order0(t)?.y)
}

/// `Y_1(t)` for `t > 0`.
pub fn bessel_y1(t: f64) -> Result<f64> {
    Ok(order1(t)?.y)
}

/// `(J_0(t), Y_0(t))` for `t > 0`.
pub fn order0(t: f64) -> Result<CylinderValue> {
    check_positive(t)?;
    Ok(order0_unchecked(t))
}

/// `(J_1(t), Y_1(t))` for `t > 0`.
pub fn order1(t: f64) -> Result<CylinderValue> {
    check_positive(t)?;
    Ok(order1_unchecked(t))
}

/// `H_0^{(1)}(t) = J_0(t) + i Y_0(t)` for `t > 0`.
pub fn hankel1_0(t: f64) -> Result<c64> {
    Ok(order0(t)?.hankel1())
}

/// `H_1^{(1)}(t) = J_1(t) + i Y_1(t)` for `t > 0`. Note `d/dt H_0 = -H_1`.
pub fn hankel1_1(t: f64) -> Result<c64> {
    Ok(order1(t)?.hankel1())
}

fn check_nonnegative(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Bessel argument must be finite and >= 0, got {t}")))
    }
}

fn check_positive(t: f64) -> Result<()> {
    check_nonnegative(t)?;
    if t == 0.0 {
        return Err(Error::Singularity("Y_n diverges at t = 0".into()));
    }
    Ok(())
}

pub(crate) fn j0_unchecked(t: f64) -> f64 {
    if t <= SERIES_LIMIT {
        series0(t).0
    } else {
        asymptotic0(t).j
    }
}

pub(crate) fn j1_unchecked(t: f64) -> f64 {
    if t <= SERIES_LIMIT {
        series1(t).0
    } else {
        asymptotic1(t).j
    }
}

pub(crate) fn order0_unchecked(t: f64) -> CylinderValue {
    if t <= SERIES_LIMIT {
        let (j, tail) = series0(t);
        let y = FRAC_2_PI * ((libm::log(0.5 * t) + EULER_GAMMA) * j + tail);
        CylinderValue { j, y }
    } else {
        asymptotic0(t)
    }
}

pub(crate) fn order1_unchecked(t: f64) -> CylinderValue {
    if t <= SERIES_LIMIT {
        let (j, tail) = series1(t);
        let y = FRAC_2_PI * libm::log(0.5 * t) * j - FRAC_2_PI / t - tail / PI;
        CylinderValue { j, y }
    } else {
        asymptotic1(t)
    }
}

/// `(H_0^{(1)}(t), H_1^{(1)}(t))` for `t > 0`, sharing the trigonometry.
pub(crate) fn hankel01_unchecked(t: f64) -> (c64, c64) {
    if t <= SERIES_LIMIT {
        (order0_unchecked(t).hankel1(), order1_unchecked(t).hankel1())
    } else {
        let u = SERIES_LIMIT / t;
        let amp = libm::sqrt(FRAC_2_PI / t);
        let (s, c) = libm::sincos(t);
        let (p0, q0) = (chebyshev(&CHEB_P0, u), u * chebyshev(&CHEB_Q0, u));
        let (p1, q1) = (chebyshev(&CHEB_P1, u), u * chebyshev(&CHEB_Q1, u));
        // chi_0 = t - pi/4, chi_1 = t - 3pi/4
        let (c0, s0) = ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2);
        let (c1, s1) = ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2);
        let h0 = c64::new(amp * (p0 * c0 - q0 * s0), amp * (p0 * s0 + q0 * c0));
        let h1 = c64::new(amp * (p1 * c1 - q1 * s1), amp * (p1 * s1 + q1 * c1));
        (h0, h1)
    }
}

/// Ascending series: returns `J_0(t)` and `sum_{k>=1} (-1)^{k+1} H_k (t^2/4)^k / (k!)^2`.
fn series0(t: f64) -> (f64, f64) {
    let q = 0.25 * t * t;
    let mut term = 1.0;
    let mut j = 1.0;
    let mut tail = 0.0;
    let mut harmonic = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        j += term;
        tail -= harmonic * term;
        if libm::fabs(term) * (1.0 + harmonic) < 1e-18 * (1.0 + libm::fabs(j)) {
            break;
        }
    }
    (j, tail)
}

/// Ascending series: returns `J_1(t)` and
/// `(t/2) sum_{k>=0} (-1)^k (psi(k+1) + psi(k+2)) (t^2/4)^k / (k! (k+1)!)`.
fn series1(t: f64) -> (f64, f64) {
    let half = 0.5 * t;
    let q = half * half;
    let mut term = 1.0;
    let mut j = 1.0;
    // psi(1) + psi(2) = 1 - 2 gamma
    let mut hk = 0.0;
    let mut hk1 = 1.0;
    let mut tail = hk + hk1 - 2.0 * EULER_GAMMA;
    for k in 1..60 {
        let kf = k as f64;
        term *= -q / (kf * (kf + 1.0));
        hk += 1.0 / kf;
        hk1 += 1.0 / (kf + 1.0);
        let weight = hk + hk1 - 2.0 * EULER_GAMMA;
        j += term;
        tail += weight * term;
        if libm::fabs(term) * (1.0 + libm::fabs(weight)) < 1e-18 * (1.0 + libm::fabs(j)) {
            break;
        }
    }
    (half * j, half * tail)
}

fn asymptotic0(t: f64) -> CylinderValue {
    let u = SERIES_LIMIT / t;
    let p = chebyshev(&CHEB_P0, u);
    let q = u * chebyshev(&CHEB_Q0, u);
    let amp = libm::sqrt(FRAC_2_PI / t);
    let (s, c) = libm::sincos(t);
    let (cc, sc) = ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2);
    CylinderValue { j: amp * (p * cc - q * sc), y: amp * (p * sc + q * cc) }
}

fn asymptotic1(t: f64) -> CylinderValue {
    let u = SERIES_LIMIT / t;
    let p = chebyshev(&CHEB_P1, u);
    let q = u * chebyshev(&CHEB_Q1, u);
    let amp = libm::sqrt(FRAC_2_PI / t);
    let (s, c) = libm::sincos(t);
    let (cc, sc) = ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2);
    CylinderValue { j: amp * (p * cc - q * sc), y: amp * (p * sc + q * cc) }
}

/// Clenshaw evaluation of `sum c_j T_j(2u - 1)` for `u` in `[0, 1]`.
fn chebyshev(coeffs: &[f64], u: f64) -> f64 {
    let x = 2.0 * u - 1.0;
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs[1..].iter().rev() {
        let b0 = 2.0 * x * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + coeffs[0]
}

const CHEB_P0: [f64; 16] = [
    9.99595064768672881e-01,
    -5.38079561396069181e-04,
    -1.31796771233615704e-04,
    1.51422497048644466e-06,
    1.58468617920632462e-07,
    -8.56069553945711599e-09,
    -2.95723433548996980e-10,
    6.57355625370264570e-11,
    -2.23749702830775714e-12,
    -4.48211403626645881e-13,
    6.95482663742998968e-14,
    -1.51339811722018871e-15,
    -9.24221554278006272e-16,
    1.55577164302524635e-16,
    -4.75760601749108484e-18,
    -2.73847300662492379e-18,
];

const CHEB_Q0: [f64; 16] = [
    -1.55730928402455625e-02,
    6.87629036698392113e-05,
    1.65306345335394367e-05,
    -3.62526119686234391e-07,
    -3.46383581785108144e-08,
    2.86290407810320836e-09,
    5.69580491942551543e-11,
    -2.62360607575377031e-11,
    1.54158475649129854e-12,
    1.69309751843503382e-13,
    -4.03412920907269330e-14,
    2.18575956158322641e-15,
    4.54166721125973258e-16,
    -1.14232323523138528e-16,
    8.18731628004090152e-18,
    1.46240286475806283e-18,
];

const CHEB_P1: [f64; 16] = [
    1.00067753586591346e+00,
    9.01007251959081855e-04,
    2.21724349185994539e-04,
    -1.96575946319104395e-06,
    -2.08895311432702157e-07,
    1.02814435089397333e-08,
    3.75970547893048883e-10,
    -7.63889135778614031e-11,
    2.38734669890693134e-12,
    5.18254887330572804e-13,
    -7.69396893726268900e-14,
    1.44008107309725796e-15,
    1.03294199637664276e-15,
    -1.68205783973175648e-16,
    4.58677674598225159e-18,
    3.01752643734978904e-18,
];

const CHEB_Q1: [f64; 16] = [
    4.68020311211197748e-02,
    -9.67422970963389750e-05,
    -2.33727538645728471e-05,
    4.47381189429376564e-07,
    4.34655060090039155e-08,
    -3.35643807379319296e-09,
    -7.35960587604439996e-11,
    3.00749764849891917e-11,
    -1.67681441540558411e-12,
    -1.95524211123076124e-13,
    4.44872204298543876e-14,
    -2.28149250525257262e-15,
    -5.09007067931170956e-16,
    1.23600746756407252e-16,
    -8.48761804640743123e-18,
    -1.62588823048000370e-18,
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_and_domain() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        assert!(matches!(bessel_j0(-1.0), Err(Error::Domain(_))));
        assert!(matches!(hankel1_0(0.0), Err(Error::Singularity(_))));
        assert!(matches!(hankel1_1(0.0), Err(Error::Singularity(_))));
    }

    #[test]
    fn spot_values() {
        assert!((bessel_j0(1.0).unwrap() - 0.765_197_686_6).abs() < 1e-10);
        assert!(bessel_j0(2.404_825_557_7).unwrap().abs() < 1e-9);
        let h0 = hankel1_0(1.0).unwrap();
        assert!((h0.re - 0.765_197_686_6).abs() < 1e-10);
        assert!((h0.im - 0.088_256_964_2).abs() < 1e-10);
        let h1 = hankel1_1(1.0).unwrap();
        assert!((h1.re - 0.440_050_585_7).abs() < 1e-10);
        assert!((h1.im + 0.781_212_821_3).abs() < 1e-10);
    }

    #[test]
    fn conjugation_gives_second_kind() {
        let v = order0(3.0).unwrap();
        assert_eq!(v.hankel1().conj(), v.hankel2());
    }

    #[test]
    fn derivative_identity() {
        let (t, h) = (2.0, 1e-5);
        let d = (hankel1_0(t + h).unwrap() - hankel1_0(t - h).unwrap()) / (2.0 * h);
        assert!((d + hankel1_1(t).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn wronskian_at_five() {
        let (a, b) = (order0(5.0).unwrap(), order1(5.0).unwrap());
        let w = a.j * b.y - b.j * a.y;
        assert!((w + 2.0 / (5.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn joint_hankel_matches_single() {
        for &t in &[0.3, 4.0, 8.0, 8.5, 33.0, 400.0] {
            let (h0, h1) = hankel01_unchecked(t);
            assert!((h0 - hankel1_0(t).unwrap()).norm() < 1e-15);
            assert!((h1 - hankel1_1(t).unwrap()).norm() < 1e-15);
        }
    }
}
