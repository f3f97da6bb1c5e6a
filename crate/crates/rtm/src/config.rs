//! Run configuration files: `key = value` lines, `#` comments.
//!
//! Recognized keys:
//!
//! | key | value |
//! |---|---|
//! | `preset` | preset name, supplies the scene |
//! | `interface.kind` | `flat`, `spline_bumps`, `gaussian_bumps`, `piecewise_constant` |
//! | `interface.params` | comma-separated reals, in triples |
//! | `obstacle.kind` | `none`, `circle`, `rounded_square`, `rounded_triangle` |
//! | `obstacle.params` | comma-separated reals |
//! | `obstacle.nodes` | Nyström node count (even) |
//! | `medium.kappa1`, `medium.kappa2` | wavenumbers |
//! | `acquisition.R`, `acquisition.ns`, `acquisition.nr` | measurement circle |
//! | `grid.x0`, `grid.x1`, `grid.y0`, `grid.y1`, `grid.nx`, `grid.ny` | sampling grid |
//! | `forward.resolution` | volume cells per shortest wavelength |
//! | `noise.tau`, `seed` | noise level and generator seed |
//! | `output_dir` | directory for outputs |

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rtm_core::geometry::{
    preset_scene, Acquisition, InterfaceProfile, ObstacleBoundary, ObstacleShape, Preset, ProfileKind, SamplingGrid,
    Scene, DEFAULT_OBSTACLE_NODES,
};
use rtm_core::MediumConfig;

use crate::error::{Error, Result};

/// Problem size profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    /// 128 sources and receivers on a circle of radius 20.
    Desk,
    /// 1024 sources and receivers on a circle of radius 100.
    #[default]
    Full,
}

impl Scale {
    pub fn transducers(self) -> usize {
        match self {
            Self::Desk => 128,
            Self::Full => 1024,
        }
    }

    pub fn radius(self) -> f64 {
        match self {
            Self::Desk => 20.0,
            Self::Full => 100.0,
        }
    }
}

pub const DEFAULT_GRID_POINTS: usize = 100;
pub const DEFAULT_RESOLUTION: f64 = 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scene: Scene,
    pub acquisition: Acquisition,
    pub grid: SamplingGrid,
    pub resolution: f64,
    pub noise_tau: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Defaults for a preset scene at the given scale.
    pub fn preset(preset: Preset, scale: Scale) -> Self {
        Self {
            scene: preset_scene(preset),
            acquisition: Acquisition::new(scale.radius(), scale.transducers(), scale.transducers())
                .expect("scale profiles are valid"),
            grid: SamplingGrid::standard(DEFAULT_GRID_POINTS).expect("standard grid is valid"),
            resolution: DEFAULT_RESOLUTION,
            noise_tau: 0.0,
            seed: 0,
            output_dir: PathBuf::from("."),
        }
    }

    /// Text that [`parse_config`] reads back to the same configuration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let scene = &self.scene;
        let kind = match scene.profile.kind() {
            ProfileKind::Flat => "flat",
            ProfileKind::SplineBumps => "spline_bumps",
            ProfileKind::GaussianBumps => "gaussian_bumps",
            ProfileKind::PiecewiseConstant => "piecewise_constant",
        };
        let _ = writeln!(out, "interface.kind = {kind}");
        let _ = writeln!(out, "interface.params = {}", join(&scene.profile.params()));
        match &scene.obstacle {
            None => {
                let _ = writeln!(out, "obstacle.kind = none");
            }
            Some(ob) => {
                let _ = writeln!(out, "obstacle.kind = {}", ob.shape().kind_name());
                let _ = writeln!(out, "obstacle.params = {}", join(&ob.shape().params()));
                let _ = writeln!(out, "obstacle.nodes = {}", ob.node_count());
            }
        }
        let acq = &self.acquisition;
        let g = &self.grid;
        let _ = writeln!(out, "medium.kappa1 = {:?}", scene.medium.kappa1());
        let _ = writeln!(out, "medium.kappa2 = {:?}", scene.medium.kappa2());
        let _ = writeln!(out, "acquisition.R = {:?}", acq.radius);
        let _ = writeln!(out, "acquisition.ns = {}", acq.n_sources());
        let _ = writeln!(out, "acquisition.nr = {}", acq.n_receivers());
        let _ = writeln!(out, "grid.x0 = {:?}\ngrid.x1 = {:?}\ngrid.y0 = {:?}\ngrid.y1 = {:?}", g.x0, g.x1, g.y0, g.y1);
        let _ = writeln!(out, "grid.nx = {}\ngrid.ny = {}", g.nx, g.ny);
        let _ = writeln!(out, "forward.resolution = {:?}", self.resolution);
        let _ = writeln!(out, "noise.tau = {:?}", self.noise_tau);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "output_dir = {}", self.output_dir.display());
        out
    }
}

const KEYS: &[&str] = &[
    "preset",
    "interface.kind",
    "interface.params",
    "obstacle.kind",
    "obstacle.params",
    "obstacle.nodes",
    "medium.kappa1",
    "medium.kappa2",
    "acquisition.R",
    "acquisition.ns",
    "acquisition.nr",
    "grid.x0",
    "grid.x1",
    "grid.y0",
    "grid.y1",
    "grid.nx",
    "grid.ny",
    "forward.resolution",
    "noise.tau",
    "seed",
    "output_dir",
];

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

struct Entries<'a>(Vec<(&'a str, Entry<'a>)>);

impl<'a> Entries<'a> {
    fn get(&self, key: &str) -> Option<&Entry<'a>> {
        self.0.iter().rev().find(|(k, _)| *k == key).map(|(_, e)| e)
    }

    fn parsed<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<(T, usize)>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(|v| Some((v, e.line)))
                .map_err(|_| Error::Parse { line: e.line, message: format!("{key}: '{}' is not {what}", e.value) }),
        }
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        Ok(self.parsed::<f64>(key, "a real number")?.map(|(v, _)| v))
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        Ok(self.parsed::<usize>(key, "a non-negative integer")?.map(|(v, _)| v))
    }

    fn list(&self, key: &str) -> Result<Option<(Vec<f64>, usize)>> {
        let Some(e) = self.get(key) else { return Ok(None) };
        if e.value.is_empty() {
            return Ok(Some((Vec::new(), e.line)));
        }
        e.value
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: e.line,
                    message: format!("{key}: '{}' is not a real number", s.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(|v| Some((v, e.line)))
    }
}

fn at_line(line: usize, error: rtm_core::Error) -> Error {
    Error::Parse { line, message: error.to_string() }
}

/// Parses configuration text. The scene comes from `preset` (argument or
/// key) or from the `interface.*` keys; every other value has a default
/// taken from `scale`.
pub fn parse_config(text: &str, preset: Option<Preset>, scale: Scale) -> Result<RunConfig> {
    let mut entries = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Parse { line, message: format!("expected 'key = value', got '{content}'") });
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Parse { line, message: format!("unknown key '{key}'") });
        }
        entries.push((key, Entry { line, value: value.trim() }));
    }
    let entries = Entries(entries);

    let preset = match (preset, entries.get("preset")) {
        (Some(p), _) => Some(p),
        (None, Some(e)) => Some(e.value.parse::<Preset>().map_err(|err| at_line(e.line, err))?),
        (None, None) => None,
    };
    let mut config = match preset {
        Some(p) => RunConfig::preset(p, scale),
        None => {
            if entries.get("interface.kind").is_none() {
                return Err(Error::Core(rtm_core::Error::Config(
                    "no scene given: set a preset or interface.kind".into(),
                )));
            }
            let mut c = RunConfig::preset(Preset::Ex1FlatCircle, scale);
            c.scene.obstacle = None;
            c
        }
    };

    if let Some(e) = entries.get("interface.kind") {
        let kind: ProfileKind = e.value.parse().map_err(|err| at_line(e.line, err))?;
        let (params, line) = entries.list("interface.params")?.unwrap_or((Vec::new(), e.line));
        config.scene.profile = InterfaceProfile::from_params(kind, &params).map_err(|err| at_line(line, err))?;
    } else if let Some(e) = entries.get("interface.params") {
        return Err(Error::Parse { line: e.line, message: "interface.params needs interface.kind".into() });
    }

    let nodes = entries.count("obstacle.nodes")?;
    if let Some(e) = entries.get("obstacle.kind") {
        let (params, line) = entries.list("obstacle.params")?.unwrap_or((Vec::new(), e.line));
        let shape = ObstacleShape::from_params(e.value, &params).map_err(|err| at_line(line, err))?;
        config.scene.obstacle = match shape {
            None => None,
            Some(shape) => Some(
                ObstacleBoundary::new(shape, nodes.unwrap_or(DEFAULT_OBSTACLE_NODES))
                    .map_err(|err| at_line(e.line, err))?,
            ),
        };
    } else if let Some(e) = entries.get("obstacle.params") {
        return Err(Error::Parse { line: e.line, message: "obstacle.params needs obstacle.kind".into() });
    } else if let (Some(n), Some(ob)) = (nodes, &config.scene.obstacle) {
        config.scene.obstacle = Some(ob.with_node_count(n)?);
    }

    let medium = config.scene.medium;
    let k1 = entries.real("medium.kappa1")?.unwrap_or(medium.kappa1());
    let k2 = entries.real("medium.kappa2")?.unwrap_or(medium.kappa2());
    config.scene.medium = MediumConfig::new(k1, k2)?;

    let acq = &config.acquisition;
    let radius = entries.real("acquisition.R")?.unwrap_or(acq.radius);
    let ns = entries.count("acquisition.ns")?.unwrap_or(acq.n_sources());
    let nr = entries.count("acquisition.nr")?.unwrap_or(acq.n_receivers());
    config.acquisition = Acquisition::new(radius, ns, nr)?;

    let g = config.grid;
    config.grid = SamplingGrid::new(
        entries.real("grid.x0")?.unwrap_or(g.x0),
        entries.real("grid.x1")?.unwrap_or(g.x1),
        entries.real("grid.y0")?.unwrap_or(g.y0),
        entries.real("grid.y1")?.unwrap_or(g.y1),
        entries.count("grid.nx")?.unwrap_or(g.nx),
        entries.count("grid.ny")?.unwrap_or(g.ny),
    )?;

    if let Some(r) = entries.real("forward.resolution")? {
        config.resolution = r;
    }
    if let Some(tau) = entries.real("noise.tau")? {
        if !(tau >= 0.0) {
            let line = entries.get("noise.tau").map_or(0, |e| e.line);
            return Err(Error::Parse { line, message: format!("noise.tau must be non-negative, got {tau}") });
        }
        config.noise_tau = tau;
    }
    if let Some((seed, _)) = entries.parsed::<u64>("seed", "a non-negative integer")? {
        config.seed = seed;
    }
    if let Some(e) = entries.get("output_dir") {
        config.output_dir = PathBuf::from(e.value);
    }
    config.scene.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_with_preset_gives_defaults() {
        let c = parse_config("", Some(Preset::Ex1FlatCircle), Scale::Full).unwrap();
        assert_eq!(c, RunConfig::preset(Preset::Ex1FlatCircle, Scale::Full));
        assert_eq!(c.acquisition.n_sources(), 1024);
        assert_eq!(c.acquisition.radius, 100.0);
        let d = parse_config("# nothing\n\n", Some(Preset::Ex1FlatCircle), Scale::Desk).unwrap();
        assert_eq!((d.acquisition.n_sources(), d.acquisition.n_receivers(), d.acquisition.radius), (128, 128, 20.0));
    }

    #[test]
    fn medium_keys() {
        let c = parse_config("preset = ex3_piecewise_triangle\nmedium.kappa1 = 10\nmedium.kappa2 = 5 # lower", None, Scale::Desk)
            .unwrap();
        assert_eq!(c.scene.medium.beta(), 75.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_config("preset = ex1_flat_circle\n\nmedium.kappa1 = ten\n", None, Scale::Desk).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_config("preset = ex1_flat_circle\nmedium.kappa3 = 1\n", None, Scale::Desk).unwrap_err();
        assert!(err.to_string().contains("medium.kappa3") && matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_config("just words\n", None, Scale::Desk).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_config("interface.params = 1, x, 3\ninterface.kind = spline_bumps\n", None, Scale::Desk).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn scene_is_required() {
        let err = parse_config("seed = 3\n", None, Scale::Desk).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("no scene"));
    }

    #[test]
    fn custom_scene() {
        let text = "interface.kind = gaussian_bumps\ninterface.params = 0.5, 7, 0\n\
                    obstacle.kind = circle\nobstacle.params = 1, -5, 0.4\nobstacle.nodes = 32\n\
                    grid.nx = 20\ngrid.ny = 30\nnoise.tau = 0.05\nseed = 11\n";
        let c = parse_config(text, None, Scale::Desk).unwrap();
        assert_eq!(c.scene.profile.params(), vec![0.5, 7.0, 0.0]);
        let ob = c.scene.obstacle.as_ref().unwrap();
        assert_eq!((ob.node_count(), ob.shape().params()), (32, vec![1.0, -5.0, 0.4]));
        assert_eq!((c.grid.nx, c.grid.ny, c.noise_tau, c.seed), (20, 30, 0.05, 11));
    }

    #[test]
    fn obstacle_above_interface_is_rejected() {
        let text = "preset = ex1_flat_circle\nobstacle.kind = circle\nobstacle.params = 0, 0.5, 0.2\n";
        assert!(matches!(parse_config(text, None, Scale::Desk), Err(Error::Core(rtm_core::Error::Config(_)))));
    }

    #[test]
    fn text_round_trip() {
        for preset in Preset::ALL {
            let mut c = RunConfig::preset(preset, Scale::Desk);
            c.noise_tau = 0.1 + 1e-17;
            c.seed = u64::MAX;
            c.grid = SamplingGrid::new(-1.0 / 3.0, 2.0f64.sqrt(), -7.1, 0.3, 17, 9).unwrap();
            let back = parse_config(&c.to_text(), None, Scale::Full).unwrap();
            assert_eq!(back, c, "{preset}");
        }
    }
}
