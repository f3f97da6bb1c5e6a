//! Multi-threaded versions of the expensive loops. Each task writes a fixed
//! slot of the output, so results are identical for any thread count.

use rayon::prelude::*;
use rtm_core::forward::{annotate, dataset_from_columns, ForwardSystem, ScatteringDataset};
use rtm_core::geometry::{Acquisition, SamplingGrid, Scene};
use rtm_core::green::GreenEvaluator;
use rtm_core::linalg::Matrix;
use rtm_core::rtm::{green_table_row, indicator_point, kappa_weights, IndicatorField};
use rtm_core::{c64, Point};

use crate::error::Result;

/// Worker count: `RTM_THREADS` when set to a positive integer, else the
/// number of available cores.
pub fn thread_count() -> usize {
    std::env::var("RTM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f` on a pool of [`thread_count`] workers.
pub fn install<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(thread_count()).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Per-source solve summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveSummary {
    pub max_residual: f64,
    pub mean_residual: f64,
}

/// Synthetic data, one source per task.
pub fn generate_dataset(
    system: &ForwardSystem,
    scene: &Scene,
    acquisition: &Acquisition,
) -> Result<(ScatteringDataset, SolveSummary)> {
    acquisition.check_inside(&scene.extent_points())?;
    let rows = install(|| {
        acquisition.receivers.par_iter().map(|&x| system.observation_row(x)).collect::<rtm_core::Result<Vec<_>>>()
    })?;
    let solved = install(|| {
        acquisition
            .sources
            .par_iter()
            .enumerate()
            .map(|(s, &x)| {
                let solution = system.solve_source(x).map_err(|e| annotate(e, s))?;
                let column: Vec<c64> = rows.iter().map(|row| row.apply(&solution)).collect();
                Ok((column, solution.residual))
            })
            .collect::<rtm_core::Result<Vec<_>>>()
    })?;
    let n = solved.len().max(1) as f64;
    let summary = SolveSummary {
        max_residual: solved.iter().map(|c| c.1).fold(0.0, f64::max),
        mean_residual: solved.iter().map(|c| c.1).sum::<f64>() / n,
    };
    let columns = solved.into_iter().map(|c| c.0).collect();
    Ok((dataset_from_columns(columns, acquisition, scene.medium)?, summary))
}

/// `G(z, x)` for every point `z` (rows) and transducer `x` (columns).
pub fn green_table(green: &GreenEvaluator, points: &[Point], transducers: &[Point]) -> Result<Matrix> {
    let rows = install(|| {
        points.par_iter().map(|&z| green_table_row(green, z, transducers)).collect::<rtm_core::Result<Vec<_>>>()
    })?;
    let data = rows.into_iter().flatten().collect();
    Ok(Matrix::from_row_major(points.len(), transducers.len(), data)?)
}

/// Green tables of a grid for the sources and receivers of an acquisition.
#[derive(Debug, Clone)]
pub struct GreenTables {
    pub grid: SamplingGrid,
    pub sources: Matrix,
    /// `None` when receivers coincide with sources.
    pub receivers: Option<Matrix>,
}

impl GreenTables {
    pub fn new(green: &GreenEvaluator, grid: SamplingGrid, acquisition: &Acquisition) -> Result<Self> {
        let points = grid.points();
        let sources = green_table(green, &points, &acquisition.sources)?;
        let receivers =
            if acquisition.coincident() { None } else { Some(green_table(green, &points, &acquisition.receivers)?) };
        Ok(Self { grid, sources, receivers })
    }

    pub fn receivers(&self) -> &Matrix {
        self.receivers.as_ref().unwrap_or(&self.sources)
    }
}

/// The imaging function from precomputed tables, one grid point per task.
pub fn indicator_with_tables(dataset: &ScatteringDataset, green: &GreenEvaluator, tables: &GreenTables) -> Result<IndicatorField> {
    let acq = &dataset.acquisition;
    let (gs, gr) = (&tables.sources, tables.receivers());
    if dataset.medium != *green.medium() {
        return Err(rtm_core::Error::Contract("dataset and Green evaluator use different media".into()).into());
    }
    if dataset.values.rows() != acq.n_receivers()
        || dataset.values.cols() != acq.n_sources()
        || gs.rows() != tables.grid.len()
        || gs.cols() != acq.n_sources()
        || gr.cols() != acq.n_receivers()
    {
        return Err(rtm_core::Error::Contract("Green tables do not match the dataset".into()).into());
    }
    let ks = kappa_weights(green, &acq.sources);
    let kr = kappa_weights(green, &acq.receivers);
    let values = install(|| {
        (0..tables.grid.len())
            .into_par_iter()
            .map(|k| indicator_point(dataset, gs.row(k), gr.row(k), &ks, &kr))
            .collect::<Vec<f64>>()
    });
    Ok(IndicatorField::new(tables.grid, values)?)
}

/// The imaging function on `grid`.
pub fn indicator(dataset: &ScatteringDataset, grid: SamplingGrid, green: &GreenEvaluator) -> Result<IndicatorField> {
    let tables = GreenTables::new(green, grid, &dataset.acquisition)?;
    indicator_with_tables(dataset, green, &tables)
}
