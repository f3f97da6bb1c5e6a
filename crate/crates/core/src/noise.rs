//! Seeded Gaussian noise for synthetic data.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::complex::c64;
use crate::error::{Error, Result};
use crate::forward::ScatteringDataset;
use crate::linalg::Matrix;

/// `n` standard normal draws: ChaCha20 seeded with `seed`, Box–Muller pairs.
pub fn seeded_normals(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let scale = 1.0 / (1u64 << 53) as f64;
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let u1 = ((rng.next_u64() >> 11) + 1) as f64 * scale;
        let u2 = (rng.next_u64() >> 11) as f64 * scale;
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let (s, c) = libm::sincos(TAU * u2);
        out.push(r * c);
        out.push(r * s);
    }
    out.truncate(n);
    out
}

/// `V_τ = V + τ ‖V‖_F λ / ‖λ‖_F` with `λ = λ1 + iλ2` entrywise standard
/// normal (entry `k` of the row-major matrix uses draws `2k`, `2k + 1`).
pub fn add_noise(dataset: &ScatteringDataset, tau: f64, seed: u64) -> Result<ScatteringDataset> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("noise level must be non-negative, got {tau}")));
    }
    let values = &dataset.values;
    let count = values.rows() * values.cols();
    let draws = seeded_normals(seed, 2 * count);
    let lambda: Vec<c64> = draws.chunks_exact(2).map(|p| c64::new(p[0], p[1])).collect();
    let lambda_norm = libm::sqrt(lambda.iter().map(|v| v.norm_sqr()).sum());
    let factor = if lambda_norm > 0.0 { tau * values.norm_fro() / lambda_norm } else { 0.0 };
    let noisy: Vec<c64> = values.as_slice().iter().zip(&lambda).map(|(v, l)| v + factor * l).collect();
    let mut out = dataset.clone();
    out.values = Matrix::from_row_major(values.rows(), values.cols(), noisy)?;
    out.noise_tau = tau;
    out.seed = seed;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        assert_eq!(seeded_normals(3, 17), seeded_normals(3, 17));
        assert_ne!(seeded_normals(3, 10), seeded_normals(4, 10));
        assert_eq!(seeded_normals(3, 5)[..], seeded_normals(3, 6)[..5]);
    }

    #[test]
    fn moments() {
        let v = seeded_normals(11, 1_000_000);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / v.len() as f64;
        assert!(mean.abs() <= 0.005, "{mean}");
        assert!((var - 1.0).abs() <= 0.01, "{var}");
    }
}
