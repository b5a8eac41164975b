use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use select_core::config::{parse_override, resolve_params};
use select_core::eval::{aggregate, build_system, write_summary_csv, write_summary_json};
use select_core::generators::build_stream;
use select_core::stream::{load_csv_stream, write_csv_stream};
use select_core::{prequential_run, Error, RunConfig, RunResult, SelectParams, Stream, StreamSpec, SystemKind};

#[derive(Parser)]
#[command(name = "select", version, about = "State selection for streams with recurring concept drift")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic stream as CSV with a ground-truth concept column.
    Generate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate one system on a CSV stream and write the result as JSON.
    Run {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "select")]
        system: SystemKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the per-observation trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Regenerate a dataset per seed, run each system and aggregate.
    Sweep {
        /// Inclusive range such as `1..45`.
        #[arg(long, value_parser = parse_seed_range)]
        seeds: SeedRange,
        #[arg(long, value_delimiter = ',', default_value = "select,lb,ub")]
        systems: Vec<SystemKind>,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Dataset {
    Stagger,
    Tree,
    Wind,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long, value_enum)]
    dataset: Dataset,
    /// RandomTree depth complexity.
    #[arg(long)]
    complexity: Option<usize>,
    #[arg(long)]
    drift_width: Option<usize>,
    /// Class-label noise rate.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    transition_noise: Option<f64>,
    #[arg(long)]
    segments: Option<usize>,
    #[arg(long)]
    segment_length: Option<usize>,
    #[arg(long)]
    concepts: Option<usize>,
}

impl DataArgs {
    fn spec(&self, seed: u64) -> Result<StreamSpec, CliError> {
        if self.complexity.is_some() && !matches!(self.dataset, Dataset::Tree) {
            return Err(CliError::Usage("--complexity only applies to --dataset tree".into()));
        }
        let mut spec = match self.dataset {
            Dataset::Stagger => StreamSpec::stagger(seed),
            Dataset::Tree => StreamSpec::tree(seed, self.complexity.unwrap_or(2)),
            Dataset::Wind => StreamSpec::wind(seed),
        };
        if let Some(v) = self.drift_width {
            spec.drift_width = v;
        }
        if let Some(v) = self.noise {
            spec.class_noise = v;
        }
        if let Some(v) = self.transition_noise {
            spec.transition_noise = v;
        }
        if let Some(v) = self.segments {
            spec.segments = Some(v);
        }
        if let Some(v) = self.segment_length {
            spec.segment_length = v;
        }
        if let Some(v) = self.concepts {
            spec.concepts = v;
        }
        spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(spec)
    }

    fn name(&self) -> &'static str {
        match self.dataset {
            Dataset::Stagger => "stagger",
            Dataset::Tree => "tree",
            Dataset::Wind => "wind",
        }
    }
}

#[derive(Args)]
struct ParamArgs {
    /// Override an engine parameter, e.g. `--param window=80`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Flat `key = value` file applied before `--param`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report runtime as 0 so outputs are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

impl ParamArgs {
    fn resolve(&self) -> Result<SelectParams, CliError> {
        let overrides = self
            .params
            .iter()
            .map(|s| parse_override(s))
            .collect::<select_core::Result<Vec<_>>>()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        resolve_params(self.config.as_deref(), &overrides).map_err(|e| match e {
            Error::Io(_) => CliError::Runtime(e),
            other => CliError::Usage(other.to_string()),
        })
    }
}

#[derive(Clone, Copy)]
struct SeedRange(u64, u64);

fn parse_seed_range(s: &str) -> Result<SeedRange, String> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let a: u64 = a.trim().parse().map_err(|_| format!("bad seed `{a}`"))?;
    let b: u64 = b.trim().parse().map_err(|_| format!("bad seed `{b}`"))?;
    if a > b {
        return Err(format!("empty seed range {a}..{b}"));
    }
    Ok(SeedRange(a, b))
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Generate { data, seed, out } => generate(&data, seed, &out),
        Command::Run {
            input,
            system,
            seed,
            out,
            trace,
            params,
        } => run(&input, system, seed, &out, trace.as_deref(), &params),
        Command::Sweep {
            seeds,
            systems,
            data,
            jobs,
            out_dir,
            params,
        } => sweep(seeds, &systems, &data, jobs, &out_dir, &params),
    }
}

fn generate(data: &DataArgs, seed: u64, out: &Path) -> Result<(), CliError> {
    let spec = data.spec(seed)?;
    let stream = build_stream(&spec)?;
    write_csv_stream(&stream, out)?;
    // The CSV cannot carry the recipe, so it goes next to it.
    let manifest: BTreeMap<String, String> = spec.to_kv().into_iter().collect();
    fs::write(sidecar(out), serde_json::to_string_pretty(&manifest).map_err(Error::from)?)?;
    println!(
        "rows={} features={} concepts={} seed={}",
        stream.len(),
        stream.n_features,
        stream.n_concepts(),
        seed
    );
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn run_config(system: SystemKind, seed: u64, dataset: &str, params: &SelectParams, extra: &[(String, String)], timing: bool) -> RunConfig {
    let mut config: BTreeMap<String, String> = system.effective_params(params).to_kv().into_iter().collect();
    for (k, v) in extra {
        config.insert(format!("data.{k}"), v.clone());
    }
    RunConfig {
        seed,
        system: system.name().to_string(),
        dataset: dataset.to_string(),
        config,
        timing,
    }
}

fn evaluate(system: SystemKind, stream: &Stream, params: &SelectParams, config: &RunConfig) -> select_core::Result<RunResult> {
    let mut sys = build_system(system, stream, params)?;
    prequential_run(sys.as_mut(), stream, config)
}

fn run(input: &Path, system: SystemKind, seed: u64, out: &Path, trace: Option<&Path>, args: &ParamArgs) -> Result<(), CliError> {
    let params = args.resolve()?;
    let stream = load_csv_stream(input)?;
    let dataset = input.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
    let extra = [("input".to_string(), input.display().to_string())];
    let config = run_config(system, seed, dataset, &params, &extra, !args.no_timing);
    let result = evaluate(system, &stream, &params, &config)?;
    fs::write(out, result.to_json()?)?;
    if let Some(path) = trace {
        result.write_trace_csv(path)?;
    }
    println!(
        "system={} kappa={:.4} c_f1={} transitions={} repo_size={}",
        result.system,
        result.kappa,
        result.c_f1.map(|c| format!("{c:.4}")).unwrap_or_else(|| "n/a".into()),
        result.transitions,
        result.repo_size
    );
    Ok(())
}

fn sweep(seeds: SeedRange, systems: &[SystemKind], data: &DataArgs, jobs: usize, out_dir: &Path, args: &ParamArgs) -> Result<(), CliError> {
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let params = args.resolve()?;
    // Validate the recipe once up front so flag mistakes are usage errors.
    data.spec(seeds.0)?;
    let runs_dir = out_dir.join("runs");
    fs::create_dir_all(&runs_dir)?;

    let tasks: Vec<(u64, SystemKind)> = (seeds.0..=seeds.1)
        .flat_map(|s| systems.iter().map(move |&k| (s, k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Runtime(Error::Input(e.to_string())))?;
    let name = data.name();
    let outcomes: Vec<(u64, SystemKind, select_core::Result<RunResult>)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(seed, kind)| {
                let res = data
                    .spec(seed)
                    .map_err(|e| Error::InvalidSpec(format!("{e:?}")))
                    .and_then(|spec| {
                        let stream = build_stream(&spec)?;
                        let config = run_config(kind, seed, name, &params, &spec.to_kv(), !args.no_timing);
                        evaluate(kind, &stream, &params, &config)
                    });
                (seed, kind, res)
            })
            .collect()
    });

    let mut results = Vec::new();
    let mut failures = csv_failures();
    for (seed, kind, res) in outcomes {
        match res {
            Ok(r) => {
                fs::write(runs_dir.join(format!("{name}_{}_{seed}.json", kind.name())), r.to_json()?)?;
                results.push(r);
            }
            Err(e) => {
                eprintln!("seed {seed} system {}: {e}", kind.name());
                failures.push_str(&format!("{seed},{},\"{}\"\n", kind.name(), e.to_string().replace('"', "'")));
            }
        }
    }
    let rows = aggregate(&results);
    write_summary_csv(&rows, &out_dir.join("summary.csv"))?;
    write_summary_json(&rows, &out_dir.join("summary.json"))?;
    fs::write(out_dir.join("failures.csv"), failures)?;
    let mut echo: BTreeMap<String, String> = params.to_kv().into_iter().collect();
    for (k, v) in data.spec(seeds.0)?.to_kv() {
        if k != "seed" {
            echo.insert(format!("data.{k}"), v);
        }
    }
    echo.insert("seeds".into(), format!("{}..{}", seeds.0, seeds.1));
    echo.insert("systems".into(), systems.iter().map(|k| k.name()).collect::<Vec<_>>().join(","));
    fs::write(out_dir.join("sweep_config.json"), serde_json::to_string_pretty(&echo).map_err(Error::from)?)?;
    println!("runs={} failed={} summary={}", results.len(), tasks.len() - results.len(), out_dir.join("summary.csv").display());
    Ok(())
}

fn csv_failures() -> String {
    "seed,system,error\n".to_string()
}
