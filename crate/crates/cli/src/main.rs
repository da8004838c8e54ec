//! `nlclip` command-line harness: denoise PGM files, inject speckle noise,
//! generate synthetic test images, and run PSNR sweeps.

use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nlclip::bench::{
    profile_to_csv, records_to_csv, render_svg, run_profile, run_sweep, BenchConfig, ImageSource,
    ProfileConfig,
};
use nlclip::filter::{
    default_h, denoise, FilterParams, Method, PatchDistance, DEFAULT_PATCH_SIZE,
    DEFAULT_SEARCH_SIZE,
};
use nlclip::noise::{add_speckle, NoiseDistribution, NoiseSpec};
use nlclip::synth::{generate_checker, generate_step_edge};
use nlclip::{read_pgm, write_pgm, Image};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Lib(#[from] nlclip::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Lib(
                nlclip::Error::InvalidParameter(_) | nlclip::Error::RowOutOfRange { .. },
            ) => 1,
            CliError::Io { .. } | CliError::Lib(_) => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "nlclip",
    version,
    about = "Non-local means denoising with sigma clipping"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Denoise a PGM image.
    Denoise(DenoiseArgs),
    /// Add seeded speckle noise to a PGM image.
    Noise(NoiseArgs),
    /// Run a noise sweep and write PSNR records as CSV.
    Bench(BenchArgs),
    /// Write a checkerboard PGM.
    Checker(CheckerArgs),
    /// Write a vertical step-edge PGM.
    Edge(EdgeArgs),
    /// Write a constant PGM.
    Flat(FlatArgs),
    /// Write one scanline of clean, noisy and denoised images as CSV.
    Profile(ProfileArgs),
}

#[derive(Args, Debug)]
struct FilterArgs {
    /// Search window size; the window is (2*floor(s/2)+1) pixels square.
    #[arg(long, default_value_t = DEFAULT_SEARCH_SIZE)]
    s: usize,
    /// Patch side (odd).
    #[arg(long, default_value_t = DEFAULT_PATCH_SIZE)]
    r: usize,
    /// Patch distance normalization.
    #[arg(long, default_value = "mean")]
    distance: PatchDistance,
}

#[derive(Args, Debug)]
struct DenoiseArgs {
    input: PathBuf,
    #[arg(long, default_value = "nlacm")]
    method: Method,
    #[command(flatten)]
    filter: FilterArgs,
    /// Smoothing parameter.
    #[arg(long)]
    h: Option<f64>,
    /// Derive h from this noise variance.
    #[arg(long, value_name = "VAR")]
    auto_h: Option<f64>,
    /// Output PGM (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Distribution {
    Uniform,
    Gaussian,
}

impl From<Distribution> for NoiseDistribution {
    fn from(d: Distribution) -> Self {
        match d {
            Distribution::Uniform => NoiseDistribution::Uniform,
            Distribution::Gaussian => NoiseDistribution::Gaussian,
        }
    }
}

#[derive(Args, Debug)]
struct NoiseArgs {
    input: PathBuf,
    #[arg(long)]
    variance: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Distribution::Uniform)]
    distribution: Distribution,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// `checker`, `edge`, or a PGM path.
    #[arg(long, default_value = "checker")]
    image: String,
    /// Side of the generated image.
    #[arg(long, default_value_t = 256)]
    size: usize,
    /// Checker square side.
    #[arg(long, default_value_t = 32)]
    square: usize,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.01,0.02,0.03,0.04,0.05,0.06,0.07,0.08,0.09,0.1"
    )]
    variances: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "nlm,nlscem,nlacm")]
    methods: Vec<Method>,
    #[command(flatten)]
    filter: FilterArgs,
    /// Fixed h for every variance instead of the variance rule.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, value_enum, default_value_t = Distribution::Uniform)]
    distribution: Distribution,
    /// Fill the wall_ms column.
    #[arg(long)]
    timing: bool,
    /// CSV output (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a PSNR-vs-variance SVG plot.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckerArgs {
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long, default_value_t = 32)]
    square: usize,
    #[arg(long, default_value_t = 0.0)]
    low: f64,
    #[arg(long, default_value_t = 1.0)]
    high: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EdgeArgs {
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long, default_value_t = 64)]
    height: usize,
    #[arg(long, default_value_t = 0.0)]
    low: f64,
    #[arg(long, default_value_t = 1.0)]
    high: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FlatArgs {
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    value: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    /// `edge`, `checker`, or a PGM path.
    #[arg(long, default_value = "edge")]
    image: String,
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[arg(long, default_value_t = 32)]
    square: usize,
    #[arg(long, default_value_t = 0.08)]
    variance: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Scanline to extract (middle row if omitted).
    #[arg(long)]
    row: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "nlm,nlscem,nlacm")]
    methods: Vec<Method>,
    #[command(flatten)]
    filter: FilterArgs,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, value_enum, default_value_t = Distribution::Uniform)]
    distribution: Distribution,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn warn(message: &str) {
    let color =
        std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && io::stderr().is_terminal();
    if color {
        eprintln!("\x1b[33mwarning:\x1b[0m {message}");
    } else {
        eprintln!("warning: {message}");
    }
}

fn image_source(name: &str, size: usize, square: usize) -> ImageSource {
    match name {
        "checker" => ImageSource::Checker { size, square },
        "edge" => ImageSource::Edge {
            width: size,
            height: size,
        },
        path => ImageSource::File(PathBuf::from(path)),
    }
}

fn read_image(path: &Path) -> CliResult<Image<f64>> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(read_pgm(&bytes)?)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn resolve_h(h: Option<f64>, auto_h: Option<f64>) -> CliResult<f64> {
    match (h, auto_h) {
        (Some(h), Some(_)) => {
            warn("both --h and --auto-h given; using --h");
            Ok(h)
        }
        (Some(h), None) => Ok(h),
        (None, Some(var)) => Ok(default_h(var)?),
        (None, None) => Err(CliError::Usage("one of --h or --auto-h is required".into())),
    }
}

fn run_denoise(args: DenoiseArgs) -> CliResult<()> {
    let h = resolve_h(args.h, args.auto_h)?;
    let params = FilterParams::new(args.filter.s, args.filter.r, h, args.method)?
        .with_distance(args.filter.distance);
    let img = read_image(&args.input)?;
    emit(args.out.as_deref(), &write_pgm(&denoise(&img, &params)))
}

fn run_noise(args: NoiseArgs) -> CliResult<()> {
    let spec =
        NoiseSpec::new(args.variance, args.seed)?.with_distribution(args.distribution.into());
    let img = read_image(&args.input)?;
    emit(args.out.as_deref(), &write_pgm(&add_speckle(&img, &spec)))
}

fn run_bench(args: BenchArgs) -> CliResult<()> {
    let cfg = BenchConfig {
        variances: args.variances,
        seeds: args.seeds,
        methods: args.methods,
        source: image_source(&args.image, args.size, args.square),
        s: args.filter.s,
        r: args.filter.r,
        h: args.h,
        distance: args.filter.distance,
        distribution: args.distribution.into(),
        timing: args.timing,
    };
    let records = run_sweep(&cfg)?;
    if let Some(svg) = &args.svg {
        emit(Some(svg), render_svg(&records).as_bytes())?;
    }
    emit(args.out.as_deref(), records_to_csv(&records).as_bytes())
}

fn run_profile_cmd(args: ProfileArgs) -> CliResult<()> {
    let source = image_source(&args.image, args.size, args.square);
    let row = match args.row {
        Some(row) => row,
        None => source.load()?.height() / 2,
    };
    let cfg = ProfileConfig {
        source,
        variance: args.variance,
        seed: args.seed,
        row,
        methods: args.methods,
        s: args.filter.s,
        r: args.filter.r,
        h: args.h,
        distance: args.filter.distance,
        distribution: args.distribution.into(),
    };
    emit(
        args.out.as_deref(),
        profile_to_csv(&run_profile(&cfg)?).as_bytes(),
    )
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Denoise(args) => run_denoise(args),
        Command::Noise(args) => run_noise(args),
        Command::Bench(args) => run_bench(args),
        Command::Checker(a) => {
            let (w, h) = (a.width.unwrap_or(a.size), a.height.unwrap_or(a.size));
            let img: Image<f64> = generate_checker(w, h, a.square, a.low, a.high)?;
            emit(a.out.as_deref(), &write_pgm(&img))
        }
        Command::Edge(a) => {
            let img: Image<f64> = generate_step_edge(a.width, a.height, a.low, a.high)?;
            emit(a.out.as_deref(), &write_pgm(&img))
        }
        Command::Flat(a) => {
            let img = Image::filled(
                a.width.unwrap_or(a.size),
                a.height.unwrap_or(a.size),
                a.value,
            )?;
            emit(a.out.as_deref(), &write_pgm(&img))
        }
        Command::Profile(args) => run_profile_cmd(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlclip: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
