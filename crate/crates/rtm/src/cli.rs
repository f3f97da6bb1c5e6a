//! The `rtm` command line runner.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rtm_core::forward::{Discretization, ForwardSystem};
use rtm_core::geometry::{Preset, SamplingGrid};
use rtm_core::green::GreenEvaluator;
use rtm_core::noise::add_noise;
use rtm_core::rtm::peak_report;

use crate::config::{parse_config, RunConfig, Scale, DEFAULT_GRID_POINTS};
use crate::dataio::{self, format_report};
use crate::error::{Error, Result};
use crate::parallel;
use crate::verify::{self, Suite};

#[derive(Debug, Parser)]
#[command(name = "rtm", version, about = "Reverse-time-migration imaging of a rough two-layer interface")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the scattering data of a scene and write a dataset file.
    Forward(ForwardArgs),
    /// Compute the imaging function from a dataset.
    Image(ImageArgs),
    /// Run a residual suite and print its report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
pub struct ScaleArgs {
    /// 128 sources and receivers on a circle of radius 20.
    #[arg(long)]
    pub desk: bool,
    /// 1024 sources and receivers on a circle of radius 100 (default).
    #[arg(long)]
    pub full: bool,
}

impl ScaleArgs {
    fn scale(&self) -> Scale {
        if self.desk {
            Scale::Desk
        } else {
            Scale::Full
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SceneArgs {
    /// Run configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named experiment preset.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
pub struct OptionalSceneArgs {
    /// Run configuration file (scene for the peak report, grid).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named experiment preset (scene for the peak report).
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub scale: ScaleArgs,
    /// Relative noise level.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Noise generator seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Volume cells per shortest wavelength.
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Output dataset file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImageArgs {
    /// Dataset file written by `forward`.
    #[arg(long)]
    pub data: PathBuf,
    /// Sampling grid `x0,x1,y0,y1,nx,ny`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub scene: OptionalSceneArgs,
    #[command(flatten)]
    pub scale: ScaleArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
}

fn preset(name: &str) -> Result<Preset> {
    Ok(name.parse::<Preset>()?)
}

fn load_config(config: &Option<PathBuf>, preset_name: &Option<String>, scale: Scale) -> Result<Option<RunConfig>> {
    match (config, preset_name) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_config(&text, None, scale).map(Some).map_err(|e| match e {
                Error::Parse { line, message } => {
                    Error::Parse { line, message: format!("{}: {message}", path.display()) }
                }
                other => other,
            })
        }
        (None, Some(name)) => Ok(Some(RunConfig::preset(preset(name)?, scale))),
        (None, None) => Ok(None),
    }
}

fn parse_grid(text: &str) -> Result<SamplingGrid> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Error::Parse { line: 0, message: format!("--grid expects x0,x1,y0,y1,nx,ny, got '{text}'") };
    if parts.len() != 6 {
        return Err(bad());
    }
    let reals: Vec<f64> = parts[..4].iter().map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
    let counts: Vec<usize> = parts[4..].iter().map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
    Ok(SamplingGrid::new(reals[0], reals[1], reals[2], reals[3], counts[0], counts[1])?)
}

fn forward(args: &ForwardArgs, out: &mut impl Write) -> Result<()> {
    let mut config = load_config(&args.scene.config, &args.scene.preset, args.scale.scale())?
        .expect("clap requires a scene");
    if let Some(tau) = args.tau {
        if !(tau >= 0.0) {
            return Err(rtm_core::Error::Config(format!("--tau must be non-negative, got {tau}")).into());
        }
        config.noise_tau = tau;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(r) = args.resolution {
        config.resolution = r;
    }
    let scene = &config.scene;
    let green = GreenEvaluator::new(scene.medium);
    let disc = Discretization::new(scene, config.resolution)?;
    let _ = writeln!(out, "unknowns: {} volume cells, {} boundary nodes", disc.n_volume(), disc.n_boundary());
    let system = ForwardSystem::assemble(scene, disc, &green)?;
    let (clean, summary) = parallel::generate_dataset(&system, scene, &config.acquisition)?;
    let _ = writeln!(
        out,
        "solved {} sources: relative residual max {:.3e}, mean {:.3e}",
        config.acquisition.n_sources(),
        summary.max_residual,
        summary.mean_residual
    );
    let dataset = if config.noise_tau > 0.0 {
        let noisy = add_noise(&clean, config.noise_tau, config.seed)?;
        let diff: f64 =
            noisy.values.as_slice().iter().zip(clean.values.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum();
        let ratio = if clean.values.norm_fro() > 0.0 { diff.sqrt() / clean.values.norm_fro() } else { 0.0 };
        let _ = writeln!(out, "noise: tau {}, seed {}, |V_noisy - V| / |V| = {ratio:.4}", config.noise_tau, config.seed);
        noisy
    } else {
        clean
    };
    dataio::save_dataset(&args.out, &dataset)?;
    let acq = &dataset.acquisition;
    let _ = writeln!(
        out,
        "wrote {} (ns {} nr {} R {})",
        args.out.display(),
        acq.n_sources(),
        acq.n_receivers(),
        acq.radius
    );
    Ok(())
}

fn image(args: &ImageArgs, out: &mut impl Write, err: &mut impl Write) -> Result<()> {
    let dataset = dataio::load_dataset(&args.data)?;
    let config = load_config(&args.scene.config, &args.scene.preset, args.scale.scale())?;
    if let (Some(c), Some(_)) = (&config, &args.scene.config) {
        let (acq, data) = (&c.acquisition, &dataset.acquisition);
        if acq.n_sources() != data.n_sources() || acq.n_receivers() != data.n_receivers() || acq.radius != data.radius {
            return Err(rtm_core::Error::Contract(format!(
                "dataset has ns {} nr {} R {} but the configuration has ns {} nr {} R {}",
                data.n_sources(),
                data.n_receivers(),
                data.radius,
                acq.n_sources(),
                acq.n_receivers(),
                acq.radius
            ))
            .into());
        }
    }
    let grid = match (&args.grid, &config) {
        (Some(text), _) => parse_grid(text)?,
        (None, Some(c)) => c.grid,
        (None, None) => SamplingGrid::standard(DEFAULT_GRID_POINTS)?,
    };
    let green = GreenEvaluator::new(dataset.medium);
    let field = parallel::indicator(&dataset, grid, &green)?;

    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let matrix = args.out.join("indicator.txt");
    dataio::save_indicator(&matrix, &field)?;
    let _ = writeln!(out, "wrote {}", matrix.display());
    for (name, f) in [("indicator.pgm", field.clone()), ("indicator_abs.pgm", dataio::magnitude(&field))] {
        let path = args.out.join(name);
        match dataio::save_pgm(&path, &f) {
            Ok(()) => {
                let _ = writeln!(out, "wrote {}", path.display());
            }
            Err(Error::Format(message)) => {
                let _ = writeln!(err, "warning: {name} not written: {message}");
            }
            Err(e) => return Err(e),
        }
    }

    let best = field.argmax_abs();
    let p = field.point(best);
    let _ = writeln!(out, "peak |Ind| at ({:.4}, {:.4}), Ind = {:.6e}", p.x, p.y, field.values[best]);
    if let Some(c) = &config {
        let report = peak_report(&field, &c.scene);
        let _ = writeln!(out, "distance to scatterers {:.4}, contrast {:.3}", report.distance, report.contrast);
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs, out: &mut impl Write) -> Result<bool> {
    let rows = verify::run(args.suite)?;
    let _ = write!(out, "{}", format_report(&rows));
    let failed = rows.iter().filter(|r| !r.pass).count();
    let _ = writeln!(out, "{} of {} checks passed", rows.len() - failed, rows.len());
    Ok(failed == 0)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Forward(a) => forward(a, out).map(|()| true),
        Command::Image(a) => image(a, out, err).map(|()| true),
        Command::Verify(a) => run_verify(a, out),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

