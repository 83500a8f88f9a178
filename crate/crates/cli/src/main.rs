//! `riesz-tiler`: verify a lattice multi-tiling, split it, choose shifts,
//! compute Riesz constants and check them on a sample grid.
//!
//! Exit codes: 0 success, 1 parse/validation/IO, 2 not a tiling,
//! 3 shift selection failure, 4 resolution.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use riesz_tiler::report::{
    coefficients_to_json, read_grid_function, render_svg, InstanceSpec, Pipeline, PipelineError, PipelineOptions,
    Stage, DEFAULT_TRIALS,
};

#[derive(Parser, Debug)]
#[command(name = "riesz-tiler", version, about = "Riesz bases of exponentials for lattice multi-tiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact tiling verdict and multiplicity of every cell.
    Verify(Common),
    /// Split the region into k fundamental domains.
    Split(Common),
    /// Distinct translate profiles.
    Profiles(Common),
    /// Choose shift vectors a_1..a_k.
    Select(Common),
    /// Riesz constants from the profile matrices.
    Bounds(Common),
    /// Analysis/synthesis round trip on the sample grid.
    Roundtrip {
        #[command(flatten)]
        common: Common,
        /// Grid function to analyze (JSON or CSV of point, re, im).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Write the coefficients of --input here as JSON.
        #[arg(long, requires = "input")]
        coefficients: Option<PathBuf>,
    },
    /// Full pipeline report.
    Report(Common),
    /// SVG figure of a planar instance.
    Render(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Common {
    /// Instance JSON.
    #[arg(short = 'g', long = "geometry")]
    geometry: PathBuf,
    /// Shift selection seed
    #[arg(long)]
    seed: Option<u64>,
    /// Random restarts for shift selection
    #[arg(long)]
    restarts: Option<usize>,
    /// Minimum acceptable smallest singular value
    #[arg(long = "tol")]
    tolerance: Option<f64>,
    /// Sample grid resolution M per axis
    #[arg(long)]
    resolution: Option<usize>,
    /// Expected tiling level.
    #[arg(long)]
    level: Option<usize>,
    /// Random test functions in the round trip.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    /// Include per-stage wall-clock seconds (breaks byte-identical output).
    #[arg(long)]
    timings: bool,
    /// Output file; stdout when absent.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl Common {
    fn load(&self) -> Result<InstanceSpec, PipelineError> {
        let text = std::fs::read_to_string(&self.geometry).map_err(|e| PipelineError::Io {
            path: self.geometry.clone(),
            message: e.to_string(),
        })?;
        let mut spec = InstanceSpec::from_json(&text)?;
        spec.seed = self.seed.or(spec.seed);
        spec.restarts = self.restarts.or(spec.restarts);
        spec.tolerance = self.tolerance.or(spec.tolerance);
        spec.resolution = self.resolution.or(spec.resolution);
        spec.level = self.level.or(spec.level);
        Ok(spec)
    }

    fn options(&self) -> PipelineOptions {
        PipelineOptions { trials: self.trials, timings: self.timings }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), PipelineError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| PipelineError::Io { path: path.into(), message: e.to_string() }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render_stage(p: &Pipeline, stage: Stage, format: Format) -> String {
    match format {
        Format::Json => p.report().to_json(),
        Format::Csv => p.table(stage).to_csv(),
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let (common, stage) = match &cli.command {
        Command::Verify(c) => (c, Stage::Verify),
        Command::Split(c) => (c, Stage::Split),
        Command::Profiles(c) => (c, Stage::Profiles),
        Command::Select(c) => (c, Stage::Select),
        Command::Bounds(c) => (c, Stage::Bounds),
        Command::Roundtrip { common, .. } => (common, Stage::RoundTrip),
        Command::Report(c) => (c, Stage::RoundTrip),
        Command::Render(c) => (c, Stage::Profiles),
    };
    let spec = common.load()?;
    let mut pipeline = Pipeline::prepare(&spec, common.options())?;
    let out = common.output.as_deref();

    if let Command::Render(_) = cli.command {
        let svg = render_svg(&mut pipeline)?;
        return emit(out, &svg);
    }

    if let Err(err) = pipeline.run_until(stage) {
        // the stages that did complete are still reported
        let failed_at = if matches!(err, PipelineError::NotATiling { .. }) { Stage::Verify } else { stage };
        emit(out, &render_stage(&pipeline, failed_at, common.format))?;
        return Err(err);
    }

    if let Command::Roundtrip { input: Some(input), coefficients, .. } = &cli.command {
        let t = pipeline.transform.as_ref().expect("round-trip stage ran");
        let f = read_grid_function(t, input)?;
        let c = t.analyze(&f).map_err(|e| PipelineError::Io { path: input.clone(), message: e.to_string() })?;
        let back = t.synthesize(&c).expect("coefficients match the grid");
        log::info!("input function: max relative reconstruction error {:e}", f.max_relative_error(&back));
        if let Some(path) = coefficients {
            std::fs::write(path, coefficients_to_json(&c))
                .map_err(|e| PipelineError::Io { path: path.clone(), message: e.to_string() })?;
        }
    }
    emit(out, &render_stage(&pipeline, stage, common.format))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RIESZ_TILER_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
