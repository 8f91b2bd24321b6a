//! Command-line driver: seeded synthetic generation, per-series metric
//! analysis, the five-segment benchmark, sensitivity sweeps, and the
//! full hierarchy report. All outputs are deterministic files under
//! `--out`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use forecastability::experiments::{run_sweep_with, segment_metrics, SweepSpec};
use forecastability::ingest_report::{
    aggregate_levels, build_report, load_error_csv, load_long_csv, HierarchySpec, LevelSpec,
    ReportOptions, SchemaMapping, SERIES_DIM,
};
use forecastability::lyapunov::EmbeddingConfig;
use forecastability::spectral::SpectralConfig;
use forecastability::synth::{five_segment_benchmark, SignalKind, SignalSpec, DEFAULT_SINE};
use forecastability::timeseries::{Frequency, TimeSeries, WindowPlan};
use forecastability::{Error, Result};

#[derive(Parser)]
#[command(name = "forecastability", version, about = "Time-series forecastability diagnostics")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Seed for synthetic generation; overrides any seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON config file; sections mirror the library configuration
    /// types (spectral, embedding, schema, hierarchy, sweep, report).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    out: PathBuf,
    /// Format of generated series files; reports always emit both.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic series.
    Synth(SynthArgs),
    /// Compute per-series metrics for a long-format CSV, keeping raw
    /// series ids (a total row is added for context).
    Analyze(IngestArgs),
    /// Run the five-segment benchmark and its windowed segment metrics.
    Benchmark(BenchmarkArgs),
    /// Run the length-by-sparsity sweep declared in the config file.
    Sweep,
    /// Build the full hierarchy metric report with optional error joins.
    Report(IngestArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Generator family.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Number of samples.
    #[arg(long)]
    length: usize,
    /// Tone frequency in cycles per sample, within (0, 0.5).
    #[arg(long)]
    frequency: Option<f64>,
    /// Tone amplitude.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Noise standard deviation (noisy-multisine and white-noise).
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Sine,
    Multisine,
    #[value(alias = "noisy_multisine")]
    NoisyMultisine,
    Lorenz,
    #[value(alias = "white_noise")]
    WhiteNoise,
}

impl From<KindArg> for SignalKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Sine => SignalKind::Sine,
            KindArg::Multisine => SignalKind::Multisine,
            KindArg::NoisyMultisine => SignalKind::NoisyMultisine,
            KindArg::Lorenz => SignalKind::Lorenz,
            KindArg::WhiteNoise => SignalKind::WhiteNoise,
        }
    }
}

#[derive(Args)]
struct IngestArgs {
    /// Long-format series CSV: header `series_id,<dims...>,t,value`.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Forecast error CSV to join: header `series_id,model,wape`.
    #[arg(long, value_name = "FILE")]
    errors: Option<PathBuf>,
    /// Sampling frequency of the input rows.
    #[arg(long, value_enum, default_value_t = FrequencyArg::Daily)]
    frequency: FrequencyArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrequencyArg {
    Daily,
    Weekly,
    Unitless,
}

impl From<FrequencyArg> for Frequency {
    fn from(freq: FrequencyArg) -> Self {
        match freq {
            FrequencyArg::Daily => Frequency::Daily,
            FrequencyArg::Weekly => Frequency::Weekly,
            FrequencyArg::Unitless => Frequency::Unitless,
        }
    }
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Length of each of the five segments.
    #[arg(long, default_value_t = 500)]
    segment_length: usize,
    /// Moving-window size for spectral predictability.
    #[arg(long, default_value_t = 200)]
    omega_window: usize,
    /// Moving-window size for the Lyapunov exponent.
    #[arg(long, default_value_t = 300)]
    lambda_window: usize,
}

/// Declarative configuration document. Section contents deserialize
/// directly into the library types, so field names match them exactly.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    spectral: SpectralConfig,
    embedding: EmbeddingConfig,
    schema: SchemaMapping,
    hierarchy: Option<HierarchySpec>,
    sweep: Option<SweepSpec>,
    report: ReportOptions,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests land here too; only real parse
            // failures are usage errors.
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_class(&err))
        }
    }
}

/// Usage errors exit 1, data errors 2, computation errors 3.
fn exit_class(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) => 1,
        Error::Io(_)
        | Error::MalformedCsv { .. }
        | Error::UnmappedColumn(_)
        | Error::DuplicateKey { .. }
        | Error::NonContiguousTimestamps { .. }
        | Error::InvalidHierarchy(_)
        | Error::MisalignedSeries { .. }
        | Error::NonFiniteValue { .. }
        | Error::DegenerateInput(_) => 2,
        Error::SeriesTooShort { .. }
        | Error::InvalidFrequency { .. }
        | Error::WindowTooLarge { .. }
        | Error::WindowTooSmall { .. }
        | Error::DegenerateSpectrum
        | Error::EmbeddingInfeasible { .. }
        | Error::EstimationImpossible
        | Error::Aliasing(_)
        | Error::DivergentTrajectory(_)
        | Error::UndefinedDenominator
        | Error::UndefinedCorrelation(_) => 3,
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(cli.global.config.as_deref())?;
    fs::create_dir_all(&cli.global.out)?;
    match &cli.command {
        Command::Synth(args) => run_synth(&cli.global, args),
        Command::Analyze(args) => run_ingest(&cli.global, &config, args, true),
        Command::Benchmark(args) => run_benchmark(&cli.global, &config, args),
        Command::Sweep => run_sweep(&cli.global, &config),
        Command::Report(args) => run_ingest(&cli.global, &config, args, false),
    }
}

/// A missing or malformed config file is a usage error, not a data
/// error: the path came from the command line.
fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("config {}: {e}", path.display())))
}

fn run_synth(global: &GlobalArgs, args: &SynthArgs) -> Result<()> {
    let mut spec = SignalSpec::new(args.kind.into(), args.length, global.seed.unwrap_or(0));
    if args.frequency.is_some() || args.amplitude.is_some() {
        spec.params.components = vec![(
            args.frequency.unwrap_or(DEFAULT_SINE.0),
            args.amplitude.unwrap_or(DEFAULT_SINE.1),
        )];
    }
    if let Some(sigma) = args.sigma {
        spec.params.noise_sigma = sigma;
        spec.params.sigma = sigma;
    }
    let series = spec.generate()?;
    match global.format {
        Format::Csv => write_file(&global.out, "series.csv", &series_csv(&series)),
        Format::Json => {
            let json = serde_json::to_string_pretty(&series)
                .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))?;
            write_file(&global.out, "series.json", &(json + "\n"))
        }
    }
}

fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("t,value\n");
    for (i, v) in series.values().iter().enumerate() {
        out.push_str(&format!("{},{v}\n", series.start_index() + i as i64));
    }
    out
}

fn run_benchmark(global: &GlobalArgs, config: &ConfigFile, args: &BenchmarkArgs) -> Result<()> {
    let (series, boundaries) = five_segment_benchmark(args.segment_length, global.seed.unwrap_or(0))?;
    let metrics = segment_metrics(
        &series,
        &boundaries,
        &WindowPlan::new(args.omega_window),
        &WindowPlan::new(args.lambda_window),
        &config.spectral,
        &config.embedding,
    )?;
    write_file(&global.out, "benchmark.csv", &metrics.to_csv_string())?;
    write_file(&global.out, "benchmark.json", &metrics.to_json_string()?)
}

fn run_sweep(global: &GlobalArgs, config: &ConfigFile) -> Result<()> {
    let mut spec = config.sweep.clone().ok_or_else(|| {
        Error::InvalidConfig("sweep requires a config file with a `sweep` section".into())
    })?;
    if let Some(seed) = global.seed {
        spec.base_seed = seed;
    }
    let result = run_sweep_with(&spec, &config.spectral, &config.embedding)?;
    write_file(&global.out, "sweep.csv", &result.to_csv_string())?;
    write_file(&global.out, "sweep.json", &result.to_json_string()?)
}

fn run_ingest(
    global: &GlobalArgs,
    config: &ConfigFile,
    args: &IngestArgs,
    analyze: bool,
) -> Result<()> {
    let dataset = load_long_csv(&args.input, &config.schema).map_err(|e| name_path(e, &args.input))?;
    let hierarchy = if analyze {
        // Two levels keep every input series under its raw id.
        HierarchySpec {
            levels: vec![
                LevelSpec {
                    name: "total".into(),
                    dims: Vec::new(),
                },
                LevelSpec {
                    name: "series".into(),
                    dims: vec![SERIES_DIM.into()],
                },
            ],
        }
    } else {
        config
            .hierarchy
            .clone()
            .unwrap_or_else(|| HierarchySpec::default_for(dataset.dims()))
    };
    let levels = aggregate_levels(&dataset, &hierarchy, args.frequency.into())?;
    let errors = match &args.errors {
        Some(path) => Some(load_error_csv(path).map_err(|e| name_path(e, path))?),
        None => None,
    };
    let report = build_report(
        &levels,
        &config.spectral,
        &config.embedding,
        errors.as_deref(),
        &config.report,
    )?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    write_file(&global.out, "report.csv", &report.to_csv_string()?)?;
    write_file(&global.out, "report.json", &report.to_json_string()?)
}

/// Prefixes bare I/O errors with the offending path.
fn name_path(err: Error, path: &Path) -> Error {
    match err {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        other => other,
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}
