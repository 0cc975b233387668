mod config;
mod error;
mod output;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use caaoi::analysis::{kernel_whittle, numeric_whittle};
use caaoi::bounds::lower_bound_partial;
use caaoi::policies::{whittle_index_csi, whittle_index_no_csi};
use caaoi::sim::sweep;
use caaoi::{Channel, Csi, MetricKind};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{Config, SweepEntry};
use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "caaoi", version, about = "Channel-aware age of information experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment (and its sweep, if it has one).
    Run(RunArgs),
    /// Run an experiment's sweep; --path/--values replace the configured one.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        path: Option<String>,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
    /// Lower bounds of the experiment's system(s).
    Bounds {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Index of one sensor for ages 0..=x-max.
    IndexTable {
        #[arg(long, value_enum)]
        csi: CsiArg,
        #[arg(long, default_value_t = 1.0)]
        weight: f64,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        x_max: u64,
        #[arg(long, value_enum, default_value = "ca-aoi")]
        metric: MetricArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Show what a preset runs (all presets when none is named).
    Describe {
        #[arg(long)]
        preset: Option<String>,
    },
}

#[derive(Args)]
struct Source {
    /// TOML experiment file, or a results sidecar (.json).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment, fig3 to fig12.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    reps: Option<u32>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// CSV destination; the JSON sidecar goes beside it. Stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CsiArg {
    Known,
    Unknown,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    CaAoi,
    Aoi,
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
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Run(args) => run(args, None),
        Command::Sweep { run: args, path, values } => {
            let over = match (path, values) {
                (None, None) => None,
                (Some(path), Some(values)) => Some(SweepEntry { path, values }),
                _ => {
                    return Err(CliError::Validation(
                        "sweep: --path and --values go together".into(),
                    ))
                }
            };
            run(args, Some(over))
        }
        Command::Bounds { source, seed, out } => bounds(&source, seed, out),
        Command::IndexTable {
            csi,
            weight,
            p,
            x_max,
            metric,
            out,
        } => index_table(csi, weight, p, x_max, metric, out),
        Command::Describe { preset } => describe(preset.as_deref()),
    }
}

fn load(source: &Source) -> CliResult<(Config, Option<String>)> {
    match (&source.config, &source.preset) {
        (Some(path), None) => Ok((config::load(path)?, None)),
        (None, Some(name)) => {
            let preset = presets::find(name)
                .ok_or_else(|| CliError::Validation(format!("preset: no preset named `{name}`")))?;
            Ok(((preset.build)(), Some(preset.name.to_string())))
        }
        _ => Err(CliError::Validation("give --config or --preset".into())),
    }
}

/// `sweep_override` is `Some` for the `sweep` subcommand.
fn run(args: RunArgs, sweep_override: Option<Option<SweepEntry>>) -> CliResult<()> {
    let (mut cfg, preset) = load(&args.source)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(h) = args.horizon {
        cfg.horizon = h;
    }
    if let Some(r) = args.reps {
        cfg.replications = r;
    }
    if let Some(over) = sweep_override {
        if let Some(entry) = over {
            cfg.sweep = Some(entry);
        }
        if cfg.sweep.is_none() {
            return Err(CliError::Validation("sweep: the experiment has no sweep".into()));
        }
    }
    let out = args.out.clone().or_else(|| cfg.output.clone());
    let plan = cfg.validate()?;

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = args.jobs {
            if j == 0 {
                return Err(CliError::Validation("jobs: must be at least 1".into()));
            }
            b = b.num_threads(j);
        }
        b.build().map_err(|e| CliError::Runtime(e.to_string()))?
    };
    let rows = pool
        .install(|| sweep(&plan.experiment, plan.sweep_ref()))
        .map_err(|e| CliError::from_core("", e))?;

    let csv = output::results_csv(&rows, cfg.horizon, cfg.replications, cfg.seed)?;
    output::emit(out.as_deref(), &csv)?;
    if let Some(path) = &out {
        let side = output::sidecar_json(&cfg, preset.as_deref(), &rows)?;
        output::emit(Some(&output::sidecar_path(path)), &side)?;
    }
    Ok(())
}

fn bounds(source: &Source, seed: Option<u64>, out: Option<PathBuf>) -> CliResult<()> {
    let (mut cfg, _) = load(source)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let plan = cfg.validate()?;
    let points: Vec<(Option<f64>, caaoi::sim::SystemSource)> = match &plan.sweep {
        None => vec![(None, plan.experiment.source.clone())],
        Some((path, values)) => values
            .iter()
            .map(|&v| Ok((Some(v), plan.experiment.source.with(*path, v)?)))
            .collect::<caaoi::Result<_>>()
            .map_err(|e| CliError::from_core("sweep", e))?,
    };
    let mut rows = Vec::new();
    for (value, src) in points {
        let system = src
            .resolve(cfg.seed)
            .validate()
            .map_err(|e| CliError::from_core("system", e))?;
        let b = lower_bound_partial(&system);
        rows.push(vec![
            value.map(|v| v.to_string()).unwrap_or_default(),
            b.no_csi.to_string(),
            b.csi.to_string(),
            b.value.to_string(),
        ]);
    }
    let csv = output::table_csv(&["sweep_value", "bound_no_csi", "bound_csi", "total"], &rows)?;
    output::emit(out.as_deref(), &csv)
}

fn index_table(csi: CsiArg, w: f64, p: f64, x_max: u64, metric: MetricArg, out: Option<PathBuf>) -> CliResult<()> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(CliError::Validation(format!("weight: must be positive, got {w}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(CliError::Validation(format!("p: must lie in [0, 1], got {p}")));
    }
    if x_max < 1 {
        return Err(CliError::Validation("x-max: must be at least 1".into()));
    }
    let csi = match csi {
        CsiArg::Known => Csi::Known,
        CsiArg::Unknown => Csi::Unknown,
    };
    let metric = match metric {
        MetricArg::CaAoi => MetricKind::CaAoi,
        MetricArg::Aoi => MetricKind::VanillaAoi,
    };
    let mut rows = Vec::new();
    for x in 0..=x_max {
        // the kernel column needs a channel that can turn ON
        let kernel = if p > 0.0 {
            kernel_whittle(csi, metric, w, p, x)
                .map(|k| k.to_string())
                .map_err(|e| CliError::from_core("index-table", e))?
        } else {
            String::new()
        };
        let row = match metric {
            MetricKind::CaAoi => {
                let closed = match csi {
                    Csi::Unknown => whittle_index_no_csi(x, p, w),
                    Csi::Known => whittle_index_csi(x, Channel::On, w),
                };
                let numeric = numeric_whittle(csi, x, w, p).map_err(|e| CliError::from_core("index-table", e))?;
                vec![
                    x.to_string(),
                    closed.to_string(),
                    numeric.to_string(),
                    (closed - numeric).abs().to_string(),
                    kernel,
                ]
            }
            MetricKind::VanillaAoi => vec![x.to_string(), String::new(), String::new(), String::new(), kernel],
        };
        rows.push(row);
    }
    let csv = output::table_csv(&["x", "closed_form", "numeric", "abs_diff", "kernel"], &rows)?;
    output::emit(out.as_deref(), &csv)
}

fn describe(name: Option<&str>) -> CliResult<()> {
    let text = match name {
        Some(n) => {
            let p = presets::find(n)
                .ok_or_else(|| CliError::Validation(format!("preset: no preset named `{n}`")))?;
            presets::describe(p)
        }
        None => presets::PRESETS
            .iter()
            .map(presets::describe)
            .collect::<Vec<_>>()
            .join("\n"),
    };
    print!("{text}");
    Ok(())
}
