//! Reverse-time-migration imaging indicator.
//!
//! ```text
//! Ind(z) = -Im{ (|Γs|/Ns)(|Γr|/Nr) Σ_s Σ_r κ(x_s) κ(x_r) G(z, x_s) G(z, x_r) conj V(x_r, x_s) }
//! ```
//!
//! with `|Γs| = |Γr| = 2πR`. Green tables `G(z, x)` over grid points and
//! transducers are computed once and shared between sources and receivers
//! when the two circles coincide.

use alloc::format;
use alloc::vec::Vec;

use crate::complex::c64;
use crate::error::{Error, Result};
use crate::forward::ScatteringDataset;
use crate::geometry::{distance_to_scatterers, Point, SamplingGrid, Scene};
use crate::green::GreenEvaluator;
use crate::linalg::Matrix;

/// Imaging function sampled on a grid, row-major (`j * nx + i`).
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField {
    pub grid: SamplingGrid,
    pub values: Vec<f64>,
}

impl IndicatorField {
    pub fn new(grid: SamplingGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Contract(format!(
                "{} values for a {} x {} grid",
                values.len(),
                grid.nx,
                grid.ny
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    /// Index of the largest `|Ind|` (first one on ties).
    pub fn argmax_abs(&self) -> usize {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if v.abs() > self.values[best].abs() {
                best = k;
            }
        }
        best
    }

    pub fn point(&self, index: usize) -> Point {
        self.grid.point(index % self.grid.nx, index / self.grid.nx)
    }
}

/// `G(z, x)` for every grid point `z` (rows) and transducer `x` (columns).
pub fn green_table(green: &GreenEvaluator, points: &[Point], transducers: &[Point]) -> Result<Matrix> {
    let mut table = Matrix::zeros(points.len(), transducers.len());
    for (k, &z) in points.iter().enumerate() {
        table.row_mut(k).copy_from_slice(&green_table_row(green, z, transducers)?);
    }
    Ok(table)
}

/// One row of [`green_table`].
pub fn green_table_row(green: &GreenEvaluator, z: Point, transducers: &[Point]) -> Result<Vec<c64>> {
    transducers.iter().map(|&x| green.green(z, x)).collect()
}

/// Wavenumber weights `κ(x)` of the transducers.
pub fn kappa_weights(green: &GreenEvaluator, transducers: &[Point]) -> Vec<f64> {
    transducers.iter().map(|&x| green.kappa_at(x)).collect()
}

/// The indicator at one grid point from its Green table rows
/// `gs[s] = G(z, x_s)`, `gr[r] = G(z, x_r)`. Summation order is fixed:
/// receivers inside, sources outside.
pub fn indicator_point(dataset: &ScatteringDataset, gs: &[c64], gr: &[c64], ks: &[f64], kr: &[f64]) -> f64 {
    let acq = &dataset.acquisition;
    let cs = acq.circumference() / acq.n_sources() as f64;
    let cr = acq.circumference() / acq.n_receivers() as f64;
    let v = &dataset.values;
    let weighted: Vec<c64> = gr.iter().zip(kr).map(|(g, k)| g * *k).collect();
    let mut total = c64::default();
    for s in 0..acq.n_sources() {
        let mut inner = c64::default();
        for (r, w) in weighted.iter().enumerate() {
            inner += w * v[(r, s)].conj();
        }
        total += ks[s] * gs[s] * inner;
    }
    -(cs * cr * total).im
}

fn check_shapes(dataset: &ScatteringDataset, green: &GreenEvaluator) -> Result<()> {
    if dataset.medium != *green.medium() {
        return Err(Error::Contract("dataset and Green evaluator use different media".into()));
    }
    let v = &dataset.values;
    if v.rows() != dataset.acquisition.n_receivers() || v.cols() != dataset.acquisition.n_sources() {
        return Err(Error::Contract("data matrix does not match the acquisition".into()));
    }
    Ok(())
}

/// `Ind` from precomputed tables (`gs` rows over grid points, columns over
/// sources; `gr` likewise over receivers).
pub fn indicator_from_tables(
    dataset: &ScatteringDataset,
    grid: SamplingGrid,
    green: &GreenEvaluator,
    gs: &Matrix,
    gr: &Matrix,
) -> Result<IndicatorField> {
    check_shapes(dataset, green)?;
    let acq = &dataset.acquisition;
    if gs.rows() != grid.len() || gr.rows() != grid.len() || gs.cols() != acq.n_sources() || gr.cols() != acq.n_receivers() {
        return Err(Error::Contract("Green tables do not match the grid and acquisition".into()));
    }
    let ks = kappa_weights(green, &acq.sources);
    let kr = kappa_weights(green, &acq.receivers);
    let values = (0..grid.len()).map(|k| indicator_point(dataset, gs.row(k), gr.row(k), &ks, &kr)).collect();
    IndicatorField::new(grid, values)
}

/// The imaging function on `grid`.
pub fn indicator(dataset: &ScatteringDataset, grid: SamplingGrid, green: &GreenEvaluator) -> Result<IndicatorField> {
    check_shapes(dataset, green)?;
    let points = grid.points();
    let acq = &dataset.acquisition;
    let gs = green_table(green, &points, &acq.sources)?;
    if acq.coincident() {
        indicator_from_tables(dataset, grid, green, &gs, &gs)
    } else {
        let gr = green_table(green, &points, &acq.receivers)?;
        indicator_from_tables(dataset, grid, green, &gs, &gr)
    }
}

fn back_propagate_impl(
    dataset: &ScatteringDataset,
    s: usize,
    points: &[Point],
    green: &GreenEvaluator,
    weighted: bool,
) -> Result<Vec<c64>> {
    check_shapes(dataset, green)?;
    let acq = &dataset.acquisition;
    if s >= acq.n_sources() {
        return Err(Error::Contract(format!("source index {s} out of range ({} sources)", acq.n_sources())));
    }
    let cr = acq.circumference() / acq.n_receivers() as f64;
    points
        .iter()
        .map(|&z| {
            let mut sum = c64::default();
            for (r, &x) in acq.receivers.iter().enumerate() {
                let k = if weighted { green.kappa_at(x) } else { 1.0 };
                sum += k * green.green(z, x)? * dataset.values[(r, s)].conj();
            }
            Ok(-cr * sum)
        })
        .collect()
}

/// Back-propagated field `W(z, x_s) = -(|Γr|/Nr) Σ_r G(z, x_r) conj V(x_r, x_s)`.
pub fn back_propagate(dataset: &ScatteringDataset, s: usize, points: &[Point], green: &GreenEvaluator) -> Result<Vec<c64>> {
    back_propagate_impl(dataset, s, points, green, false)
}

/// [`back_propagate`] with `κ(x_r)` applied to each receiver term.
pub fn back_propagate_weighted(
    dataset: &ScatteringDataset,
    s: usize,
    points: &[Point],
    green: &GreenEvaluator,
) -> Result<Vec<c64>> {
    back_propagate_impl(dataset, s, points, green, true)
}

/// Cross-correlation `Im{(|Γs|/Ns) Σ_s κ(x_s) G(z, x_s) W(z, x_s)}` of the
/// weighted back-propagated fields, one per source.
pub fn cross_correlate(
    dataset: &ScatteringDataset,
    fields: &[Vec<c64>],
    points: &[Point],
    green: &GreenEvaluator,
) -> Result<Vec<f64>> {
    let acq = &dataset.acquisition;
    if fields.len() != acq.n_sources() || fields.iter().any(|f| f.len() != points.len()) {
        return Err(Error::Contract("back-propagated fields do not match sources and points".into()));
    }
    let cs = acq.circumference() / acq.n_sources() as f64;
    points
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            let mut sum = c64::default();
            for (s, &x) in acq.sources.iter().enumerate() {
                sum += green.kappa_at(x) * green.green(z, x)? * fields[s][k];
            }
            Ok((cs * sum).im)
        })
        .collect()
}

/// Affine rescale to `[0, 1]`.
pub fn normalize(field: &IndicatorField) -> Result<IndicatorField> {
    let (lo, hi) = field.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(hi > lo) {
        return Err(Error::Domain("cannot normalize a constant field".into()));
    }
    let values = field.values.iter().map(|v| (v - lo) / (hi - lo)).collect();
    IndicatorField::new(field.grid, values)
}

/// Localization summary of an indicator field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakReport {
    pub argmax: Point,
    pub peak: f64,
    /// Distance from the argmax of `|Ind|` to `∂D ∪ closure(B)`.
    pub distance: f64,
    /// Largest `|Ind|` within 0.5 of the scatterers over the largest at
    /// distance above 1.5 (infinite when the far set is empty or zero).
    pub contrast: f64,
}

pub fn peak_report(field: &IndicatorField, scene: &Scene) -> PeakReport {
    let best = field.argmax_abs();
    let argmax = field.point(best);
    let (mut near, mut far) = (0.0f64, 0.0f64);
    for (k, v) in field.values.iter().enumerate() {
        let d = distance_to_scatterers(scene, field.point(k));
        if d <= 0.5 {
            near = near.max(v.abs());
        } else if d > 1.5 {
            far = far.max(v.abs());
        }
    }
    let contrast = if far > 0.0 { near / far } else { f64::INFINITY };
    PeakReport { argmax, peak: field.values[best], distance: distance_to_scatterers(scene, argmax), contrast }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset_scene, Acquisition, MediumConfig, Preset};

    fn dataset(entries: &[((usize, usize), c64)], n: usize) -> ScatteringDataset {
        let mut values = Matrix::zeros(n, n);
        for &((r, s), v) in entries {
            values[(r, s)] = v;
        }
        ScatteringDataset::new(values, Acquisition::new(20.0, n, n).unwrap(), MediumConfig::default()).unwrap()
    }

    #[test]
    fn zero_data_gives_zero_field() {
        let green = GreenEvaluator::new(MediumConfig::default());
        let grid = SamplingGrid::new(-1.0, 1.0, -1.5, 0.5, 3, 3).unwrap();
        let field = indicator(&dataset(&[], 8), grid, &green).unwrap();
        assert!(field.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_entry_matches_hand_evaluation() {
        let green = GreenEvaluator::new(MediumConfig::default());
        let grid = SamplingGrid::new(-1.0, 1.0, -1.5, 0.5, 2, 1 + 1).unwrap();
        let data = dataset(&[((2, 5), c64::new(1.0, 0.0))], 8);
        let field = indicator(&data, grid, &green).unwrap();
        let acq = &data.acquisition;
        let c = acq.circumference() / 8.0;
        for (k, z) in grid.points().into_iter().enumerate() {
            let (xr, xs) = (acq.receivers[2], acq.sources[5]);
            let expected = -(c * c * green.kappa_at(xr) * green.kappa_at(xs) * green.green(z, xs).unwrap()
                * green.green(z, xr).unwrap())
            .im;
            assert!((field.values[k] - expected).abs() <= 1e-13 * expected.abs());
        }
    }

    #[test]
    fn normalize_maps_to_unit_interval() {
        let grid = SamplingGrid::new(0.0, 1.0, 0.0, 1.0, 2, 2).unwrap();
        let field = IndicatorField::new(grid, alloc::vec![-2.0, 6.0, 0.0, 2.0]).unwrap();
        let n = normalize(&field).unwrap();
        assert_eq!(n.values, alloc::vec![0.0, 1.0, 0.25, 0.5]);
        assert_eq!(normalize(&n).unwrap(), n);
        assert_eq!(n.argmax_abs(), field.argmax_abs());
        let flat = IndicatorField::new(grid, alloc::vec![1.0; 4]).unwrap();
        assert!(normalize(&flat).is_err());
    }

    #[test]
    fn peak_report_on_constructed_field() {
        let scene = preset_scene(Preset::Ex1FlatCircle);
        let grid = SamplingGrid::new(-2.0, 2.0, -6.0, -2.0, 41, 41).unwrap();
        let values = grid
            .points()
            .iter()
            .map(|p| {
                let d = distance_to_scatterers(&scene, *p);
                libm::exp(-10.0 * d * d)
            })
            .collect();
        let report = peak_report(&IndicatorField::new(grid, values).unwrap(), &scene);
        assert!(report.distance < 0.05);
        assert!(report.contrast > 1e8);
    }

    #[test]
    fn back_propagate_checks_index() {
        let green = GreenEvaluator::new(MediumConfig::default());
        let data = dataset(&[], 4);
        assert!(back_propagate(&data, 4, &[Point::new(0.0, -1.0)], &green).is_err());
        assert_eq!(back_propagate(&data, 0, &[Point::new(0.0, -1.0)], &green).unwrap()[0], c64::default());
    }
}
