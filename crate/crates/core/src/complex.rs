use num_complex::Complex64;

/// Complex double used throughout the crate.
#[allow(non_camel_case_types)]
pub type c64 = Complex64;

pub(crate) const I: c64 = c64::new(0.0, 1.0);

/// `e^{i t}` for real `t`.
#[inline]
pub(crate) fn cis(t: f64) -> c64 {
    let (s, c) = libm::sincos(t);
    c64::new(c, s)
}

/// `e^{w}` for complex `w`.
#[inline]
pub(crate) fn cexp(w: c64) -> c64 {
    let m = libm::exp(w.re);
    let (s, c) = libm::sincos(w.im);
    c64::new(m * c, m * s)
}
