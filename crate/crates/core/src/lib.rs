//! Numerical core for reverse-time-migration imaging of a locally rough
//! interface between two homogeneous half-planes with a sound-soft obstacle
//! buried below it.
//!
//! The crate is `no_std` (it needs `alloc`). It contains:
//!
//! * [`specfun`]: Bessel and Hankel functions of order 0 and 1;
//! * [`geometry`]: interface profiles, obstacle curves, perturbation regions,
//!   acquisition circles, sampling grids and the experiment presets;
//! * [`green`]: the two-layer background Green's function via Sommerfeld
//!   integrals, plus the Helmholtz–Kirchhoff residual checks;
//! * [`forward`]: the coupled volume/boundary integral equation solver that
//!   produces the difference-field data matrix;
//! * [`noise`]: reproducible Gaussian noise;
//! * [`rtm`]: the imaging indicator, back-propagation and peak statistics.
//!
//! Everything here is single-threaded. The `rtm` companion crate adds file
//! formats, the command line runner and parallel drivers.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

mod complex;
mod error;
pub mod forward;
pub mod geometry;
pub mod green;
pub mod linalg;
pub mod noise;
pub mod quadrature;
pub mod rtm;
pub mod specfun;

pub use complex::c64;
pub use error::{Error, Result};
pub use geometry::{MediumConfig, Point};
