use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use leadlag_core::experiments::{run, write_outputs, ExperimentConfig, ExperimentKind};
use leadlag_core::rde::{ito_integral, solve_leadlag_ode, strat_integral, BuiltinField};
use leadlag_core::timeseries::{root_seed_from_env, DEFAULT_SEED};
use leadlag_core::{
    build_hoff, hoff_lift, load_csv, pvar_dist, pvar_norm, save_csv, simulate, Error,
    GroupPathSkeleton, Partition, SampledSeries, SimKind, SimSpec,
};

/// Lead-lag paths, their level-2 lifts and Monte Carlo experiments.
#[derive(Parser, Debug)]
#[command(name = "leadlag", version, about)]
struct Cli {
    /// Root seed (default: LEADLAG_SEED, else the built-in seed)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file, or output directory for `experiment`
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a series on the uniform grid with n intervals
    Simulate(SimulateArgs),
    /// Hoff lead-lag path of a series, sampled at its breakpoints
    Leadlag(LeadlagArgs),
    /// Level-2 lift of the Hoff path as a skeleton CSV; prints its p-variation norm
    Lift(LiftArgs),
    /// p-variation distance between two skeleton CSVs
    Pvar(PvarArgs),
    /// Solve dY = f(lag) d(lead) and print Y_1 with Ito and Stratonovich references
    Ode(OdeArgs),
    /// Run a Monte Carlo experiment and write its table and manifest
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// brownian, drift-linear:r, drift-sine:a,f, linear, quadratic or sine[:f]
    #[arg(long, default_value = "brownian")]
    kind: String,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Number of grid intervals
    #[arg(long, default_value_t = 1024)]
    n: usize,
}

#[derive(Args, Debug)]
struct LeadlagArgs {
    /// Input series CSV
    #[arg(long = "in")]
    input: PathBuf,
    /// Restrict to the uniform partition with n intervals
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct LiftArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2.5)]
    p: f64,
}

#[derive(Args, Debug)]
struct PvarArgs {
    /// First skeleton CSV
    #[arg(long)]
    a: PathBuf,
    /// Second skeleton CSV, on the same time grid
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = 2.5)]
    p: f64,
}

#[derive(Args, Debug)]
struct OdeArgs {
    /// Input series CSV; references are computed on its full grid
    #[arg(long = "in")]
    input: PathBuf,
    /// Solve on the uniform partition with n intervals
    #[arg(long)]
    n: Option<usize>,
    /// constant[:c], linear, sin, poly:c0,c1,.. or tanh-poly:c0,c1,..
    #[arg(long, default_value = "linear")]
    field: String,
    /// Initial value, comma separated (default: zeros)
    #[arg(long)]
    y0: Option<String>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// hoff-convergence, pointwise-rate, ito-recovery, holder-blowup or tightness-probe
    #[arg(long)]
    name: String,
    /// key = value file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra key=value overrides, applied after the config file
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn report_config(command: &str, pairs: &[(&str, String)]) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[{command}]");
    for (k, v) in pairs {
        let _ = writeln!(err, "{k} = {v}");
    }
}

fn read_series(path: &Path) -> CliResult<SampledSeries<f64>> {
    if !path.is_file() {
        return Err(Failure::Usage(format!(
            "--in: no such file '{}'",
            path.display()
        )));
    }
    Ok(load_csv(path)?)
}

fn read_skeleton(flag: &str, path: &Path) -> CliResult<GroupPathSkeleton<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("--{flag}: '{}': {e}", path.display())))?;
    GroupPathSkeleton::from_csv_str(&text).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn restrict(series: SampledSeries<f64>, n: Option<usize>) -> CliResult<SampledSeries<f64>> {
    match n {
        None => Ok(series),
        Some(n) => {
            let part = Partition::uniform(n).map_err(|e| Failure::Usage(format!("--n: {e}")))?;
            series
                .restrict(&part)
                .map_err(|e| Failure::Usage(format!("--n {n}: {e}")))
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Runtime(format!("--out '{}': {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn opt_path(p: Option<&Path>) -> String {
    p.map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

fn opt_n(n: Option<usize>) -> String {
    n.map_or_else(|| "all".to_string(), |n| n.to_string())
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_simulate(a: &SimulateArgs, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let kind: SimKind = a
        .kind
        .parse()
        .map_err(|e: Error| Failure::Usage(format!("--kind: {e}")))?;
    report_config(
        "simulate",
        &[
            ("kind", kind.to_string()),
            ("dim", a.dim.to_string()),
            ("n", a.n.to_string()),
            ("seed", seed.to_string()),
            ("out", opt_path(out)),
        ],
    );
    let grid = Partition::<f64>::uniform(a.n).map_err(|e| Failure::Usage(format!("--n: {e}")))?;
    let sim = simulate(&SimSpec::new(kind, a.dim, seed, grid))
        .map_err(|e| Failure::Usage(format!("--dim: {e}")))?;
    match out {
        Some(path) => save_csv(&sim.series, path)
            .map_err(|e| Failure::Runtime(format!("--out '{}': {e}", path.display()))),
        None => emit(None, &sim.series.to_csv_string()),
    }
}

fn cmd_leadlag(a: &LeadlagArgs, out: Option<&Path>) -> CliResult<()> {
    report_config(
        "leadlag",
        &[
            ("in", a.input.display().to_string()),
            ("n", opt_n(a.n)),
            ("out", opt_path(out)),
        ],
    );
    let series = restrict(read_series(&a.input)?, a.n)?;
    let hoff = build_hoff(&series)?;
    emit(out, &hoff.to_csv_string(None)?)
}

fn cmd_lift(a: &LiftArgs, out: Option<&Path>) -> CliResult<()> {
    report_config(
        "lift",
        &[
            ("in", a.input.display().to_string()),
            ("n", opt_n(a.n)),
            ("p", a.p.to_string()),
            ("out", opt_path(out)),
        ],
    );
    let series = restrict(read_series(&a.input)?, a.n)?;
    let skel = hoff_lift(&series)?;
    let norm = pvar_norm(&skel, a.p).map_err(|e| Failure::Usage(format!("--p: {e}")))?;
    match out {
        Some(_) => {
            emit(out, &skel.to_csv_string())?;
            println!("pvar_norm = {norm}");
        }
        None => {
            print!("{}", skel.to_csv_string());
            eprintln!("pvar_norm = {norm}");
        }
    }
    Ok(())
}

fn cmd_pvar(a: &PvarArgs) -> CliResult<()> {
    report_config(
        "pvar",
        &[
            ("a", a.a.display().to_string()),
            ("b", a.b.display().to_string()),
            ("p", a.p.to_string()),
        ],
    );
    let x = read_skeleton("a", &a.a)?;
    let y = read_skeleton("b", &a.b)?;
    println!("{}", pvar_dist(&x, &y, a.p)?);
    Ok(())
}

fn cmd_ode(a: &OdeArgs) -> CliResult<()> {
    let fine = read_series(&a.input)?;
    let d = fine.dim();
    let field =
        BuiltinField::parse(&a.field, d).map_err(|e| Failure::Usage(format!("--field: {e}")))?;
    let y0: Vec<f64> = match &a.y0 {
        None => vec![0.0; d],
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Usage(format!("--y0 '{s}': {e}")))?,
    };
    report_config(
        "ode",
        &[
            ("in", a.input.display().to_string()),
            ("n", opt_n(a.n)),
            ("field", a.field.clone()),
            ("y0", fmt_vec(&y0)),
        ],
    );
    let coarse = restrict(fine.clone(), a.n)?;
    let hoff = build_hoff(&coarse)?;
    let run =
        solve_leadlag_ode(&hoff, &field, &y0).map_err(|e| Failure::Usage(format!("--y0: {e}")))?;
    let shift = |v: Vec<f64>| -> Vec<f64> { v.iter().zip(&y0).map(|(a, b)| a + b).collect() };
    println!("Y = {}", fmt_vec(run.terminal()));
    println!("ito = {}", fmt_vec(&shift(ito_integral(&fine, &field)?)));
    println!(
        "strat = {}",
        fmt_vec(&shift(strat_integral(&fine, &field)?))
    );
    Ok(())
}

fn cmd_experiment(a: &ExperimentArgs, seed: Option<u64>, out: Option<&Path>) -> CliResult<()> {
    let kind: ExperimentKind = a
        .name
        .parse()
        .map_err(|e: Error| Failure::Usage(format!("--name: {e}")))?;
    let mut cfg = ExperimentConfig::new(kind);
    cfg.root_seed = root_seed_from_env(cfg.root_seed).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("--config '{}': {e}", path.display())))?;
        cfg.apply_file_str(&text)
            .map_err(|e| Failure::Usage(format!("--config '{}': {e}", path.display())))?;
        if cfg.experiment != kind {
            return Err(Failure::Usage(format!(
                "--name {kind} disagrees with experiment = {} in the config file",
                cfg.experiment
            )));
        }
    }
    for kv in &a.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--set '{kv}': expected KEY=VALUE")))?;
        cfg.set(k.trim(), v.trim())
            .map_err(|e| Failure::Usage(format!("--set '{kv}': {e}")))?;
    }
    if let Some(s) = seed {
        cfg.root_seed = s;
    }
    if let Some(dir) = out {
        cfg.out_dir = Some(dir.to_path_buf());
    }
    report_config("experiment", &cfg.key_values());
    cfg.validate()?;
    let table = run(&cfg)?;
    let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let (csv, manifest) = write_outputs(&cfg, &table, &dir)?;
    println!("{}", csv.display());
    println!("{}", manifest.display());
    Ok(())
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Simulate(a) => {
            let seed = match cli.seed {
                Some(s) => s,
                None => {
                    root_seed_from_env(DEFAULT_SEED).map_err(|e| Failure::Usage(e.to_string()))?
                }
            };
            cmd_simulate(a, seed, out)
        }
        Command::Leadlag(a) => cmd_leadlag(a, out),
        Command::Lift(a) => cmd_lift(a, out),
        Command::Pvar(a) => cmd_pvar(a),
        Command::Ode(a) => cmd_ode(a),
        Command::Experiment(a) => cmd_experiment(a, cli.seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
