use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use clinr::analytics::{single_block_bound, BoundReport, LogBase, Scheme};
use clinr::clinr::{CheckStrategy, IdleScope};
use clinr::experiments::{
    append_csv, random_clifford_circuit, random_sequence_circuit, run_bounds, run_grid,
    run_single, run_sweep, to_csv, CircuitSource, ExperimentConfig, Mode, CSV_HEADER,
    GRID_HEADER,
};
use clinr::{serialize_circuit, NoiseMode};

/// Shots used by `--desk`.
const DESK_SHOTS: u64 = 10_000;
/// Largest sweep width kept by `--desk`.
const DESK_MAX_N: usize = 15;

#[derive(Parser)]
#[command(name = "clinr", version, about = "Clifford and CZ noise reduction: simulation and bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random Clifford (or gate sequence) and write its circuit.
    Sample(SampleArgs),
    /// Simulate one circuit in one mode.
    Run(RunArgs),
    /// Evaluate the analytic bounds.
    Bounds(BoundsArgs),
    /// Direct vs protocol over (p2, n) on random circuits.
    Sweep(SweepArgs),
    /// Direct minus CliNR error rate over (n, alpha) on random gate sequences.
    Grid(SweepArgs),
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draw round(n^alpha) gates from {H, S, CX} instead of a uniform Clifford.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliNoiseMode {
    Uniform,
    Realistic,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliStrategy {
    Uniform,
    Bell,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliIdleScope {
    Register,
    Resource,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliLogBase {
    Two,
    Natural,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Direct,
    Clinr,
    Cznr,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Self {
        match m {
            CliMode::Direct => Mode::Direct,
            CliMode::Clinr => Mode::Clinr,
            CliMode::Cznr => Mode::Cznr,
        }
    }
}

/// Options shared by every simulating subcommand; each one overrides the
/// matching config field.
#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    noise: Option<CliNoiseMode>,
    /// Rate of every location (uniform noise).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p_meas: Option<f64>,
    #[arg(long)]
    p_idle: Option<f64>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Pick the smallest t whose gate overhead is at most this.
    #[arg(long)]
    omega_budget: Option<f64>,
    #[arg(long, value_enum)]
    strategy: Option<CliStrategy>,
    #[arg(long)]
    batch_size: Option<u64>,
    #[arg(long)]
    max_restarts: Option<u32>,
    #[arg(long, value_enum)]
    idle_scope: Option<CliIdleScope>,
    #[arg(long, value_enum)]
    log_base: Option<CliLogBase>,
    /// CSV output path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON output path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    mode: Option<CliMode>,
    /// Circuit text file.
    #[arg(long, conflicts_with_all = ["graph", "random_n"])]
    circuit: Option<PathBuf>,
    /// Graph edge-list file.
    #[arg(long, conflicts_with = "random_n")]
    graph: Option<PathBuf>,
    /// Width of a random Clifford (or gate sequence with --alpha).
    #[arg(long)]
    random_n: Option<usize>,
    #[arg(long, requires = "random_n")]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0)]
    circuit_seed: u64,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scheme: Option<CliScheme>,
    /// Comma-separated values; several values in any list produce CSV.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    s: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    t: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    r: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Use the sharper single-sub-circuit overhead estimate (t = 1).
    #[arg(long)]
    single_block: bool,
    /// Write CSV here instead of JSON to stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliScheme {
    Clinr,
    Cznr,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    p2_axis: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',')]
    modes: Vec<CliMode>,
    #[arg(long)]
    circuits_per_point: Option<usize>,
    /// Desk-scale profile: 10^4 shots and widths up to 15.
    #[arg(long)]
    desk: bool,
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::from_json(&text).with_context(|| format!("in {}", p.display()))
        }
        None => Ok(ExperimentConfig::default()),
    }
}

fn apply_common(cfg: &mut ExperimentConfig, c: &Common) {
    macro_rules! set {
        ($dst:expr, $src:expr) => {
            if let Some(v) = $src {
                $dst = v;
            }
        };
        (opt $dst:expr, $src:expr) => {
            if $src.is_some() {
                $dst = $src;
            }
        };
    }
    set!(cfg.shots, c.shots);
    set!(cfg.seed, c.seed);
    if let Some(m) = c.noise {
        cfg.noise.mode = Some(match m {
            CliNoiseMode::Uniform => NoiseMode::Uniform,
            CliNoiseMode::Realistic => NoiseMode::Realistic,
        });
    }
    set!(opt cfg.noise.p, c.p);
    set!(opt cfg.noise.p2, c.p2);
    set!(opt cfg.noise.p1, c.p1);
    set!(opt cfg.noise.p_meas, c.p_meas);
    set!(opt cfg.noise.p_idle, c.p_idle);
    set!(opt cfg.protocol.t, c.t);
    set!(opt cfg.protocol.r, c.r);
    set!(opt cfg.protocol.omega_budget, c.omega_budget);
    if let Some(s) = c.strategy {
        cfg.protocol.strategy = match s {
            CliStrategy::Uniform => CheckStrategy::Uniform,
            CliStrategy::Bell => CheckStrategy::Bell,
        };
    }
    set!(cfg.protocol.batch_size, c.batch_size);
    set!(cfg.protocol.max_restarts, c.max_restarts);
    if let Some(s) = c.idle_scope {
        cfg.protocol.idle_scope = match s {
            CliIdleScope::Register => IdleScope::Register,
            CliIdleScope::Resource => IdleScope::Resource,
        };
    }
    if let Some(b) = c.log_base {
        cfg.protocol.log_base = match b {
            CliLogBase::Two => LogBase::Two,
            CliLogBase::Natural => LogBase::Natural,
        };
    }
    set!(opt cfg.output.csv, c.csv.clone());
    set!(opt cfg.output.json, c.json.clone());
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn warn_aborts(aborts: u64, shots: u64, what: &str) {
    if aborts > 0 {
        eprintln!(
            "warning: {what}: {aborts} of {shots} shots aborted after exhausting the restart cap; \
             they are excluded from plog"
        );
    }
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    let n = a.n as usize;
    let circuit = match a.alpha {
        Some(alpha) => random_sequence_circuit(n, alpha, a.seed)?,
        None => random_clifford_circuit(n, a.seed)?,
    };
    fs::write(&a.output, serialize_circuit(&circuit))
        .with_context(|| format!("writing {}", a.output.display()))?;
    println!("{}", circuit.size());
    Ok(())
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let mut cfg = load_config(a.common.config.as_deref())?;
    apply_common(&mut cfg, &a.common);
    if let Some(m) = a.mode {
        cfg.mode = m.into();
    }
    if let Some(path) = a.circuit {
        cfg.circuit = Some(CircuitSource::File { path });
    } else if let Some(path) = a.graph {
        cfg.circuit = Some(CircuitSource::Graph { path });
    } else if let Some(n) = a.random_n {
        cfg.circuit = Some(match a.alpha {
            Some(alpha) => CircuitSource::RandomSequence { n, alpha, seed: a.circuit_seed },
            None => CircuitSource::RandomClifford { n, seed: a.circuit_seed },
        });
    }
    if cfg.mode == Mode::Bounds {
        println!("{}", serde_json::to_string_pretty(&run_bounds(&cfg)?)?);
        return Ok(());
    }
    let out = run_single(&cfg)?;
    warn_aborts(out.row.aborts, out.row.shots, cfg.mode.as_str());
    let rows = [out.row];
    match &cfg.output.csv {
        Some(path) => append_csv(path, &rows, CSV_HEADER)?,
        None => print!("{}", to_csv(&rows, CSV_HEADER)?),
    }
    if let Some(path) = &cfg.output.json {
        write_json(path, &rows)?;
    }
    Ok(())
}

fn cmd_bounds(a: BoundsArgs) -> Result<()> {
    let cfg = load_config(a.config.as_deref())?;
    let scheme = match a.scheme {
        Some(CliScheme::Clinr) => Scheme::Clinr,
        Some(CliScheme::Cznr) => Scheme::Cznr,
        None => cfg.bounds.scheme.unwrap_or(Scheme::Clinr),
    };
    let axis = |v: &[usize], c: Option<usize>| -> Vec<Option<usize>> {
        if v.is_empty() {
            vec![c]
        } else {
            v.iter().map(|&x| Some(x)).collect()
        }
    };
    let b = &cfg.bounds;
    let ns = axis(&a.n, b.n);
    let ss = axis(&a.s, b.s);
    let ts = axis(&a.t, b.t);
    let rs = axis(&a.r, b.r);
    let ps: Vec<Option<f64>> = if a.p.is_empty() { vec![b.p] } else { a.p.iter().map(|&x| Some(x)).collect() };
    let mut reports: Vec<BoundReport> = Vec::new();
    for &n in &ns {
        for &s in &ss {
            for &t in &ts {
                for &r in &rs {
                    for &p in &ps {
                        let mut c = cfg.clone();
                        c.bounds.scheme = Some(scheme);
                        c.bounds.n = n;
                        c.bounds.s = s;
                        c.bounds.t = t;
                        c.bounds.r = r;
                        c.bounds.p = p;
                        let rep = if a.single_block {
                            let first = run_bounds(&c)?;
                            single_block_bound(first.n, first.s, first.r, first.p)?
                        } else {
                            run_bounds(&c)?
                        };
                        reports.push(rep);
                    }
                }
            }
        }
    }
    match (&a.csv, reports.as_slice()) {
        (Some(path), _) => {
            let header = "scheme,n,s,t,r,p,s0,m0,undetected_term,tail_term,restart_factor,\
                          p_log_bound,p_log_bound_clamped,omega_q,omega_g_bound";
            fs::write(path, to_csv(&reports, header)?)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        (None, [one]) => println!("{}", serde_json::to_string_pretty(one)?),
        (None, many) => println!("{}", serde_json::to_string_pretty(many)?),
    }
    Ok(())
}

fn sweep_config(a: &SweepArgs) -> Result<ExperimentConfig> {
    let mut cfg = load_config(a.common.config.as_deref())?;
    apply_common(&mut cfg, &a.common);
    if !a.n.is_empty() {
        cfg.sweep.n = a.n.clone();
    }
    if !a.p2_axis.is_empty() {
        cfg.sweep.p2 = a.p2_axis.clone();
    }
    if !a.alpha.is_empty() {
        cfg.sweep.alpha = a.alpha.clone();
    }
    if !a.modes.is_empty() {
        cfg.sweep.modes = a.modes.iter().map(|&m| m.into()).collect();
    }
    if let Some(k) = a.circuits_per_point {
        cfg.sweep.circuits_per_point = k;
    }
    if a.desk {
        if a.common.shots.is_none() {
            cfg.shots = DESK_SHOTS;
        }
        cfg.sweep.n.retain(|&n| n <= DESK_MAX_N);
        if cfg.sweep.n.is_empty() {
            bail!("--desk keeps widths up to {DESK_MAX_N}; none remain in sweep.n");
        }
    }
    Ok(cfg)
}

fn emit<T: serde::Serialize>(cfg: &ExperimentConfig, rows: &[T], header: &str) -> Result<()> {
    let text = to_csv(rows, header)?;
    match &cfg.output.csv {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if let Some(path) = &cfg.output.json {
        write_json(path, &rows)?;
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let cfg = sweep_config(&a)?;
    let rows = run_sweep(&cfg)?;
    for r in rows.iter().filter(|r| r.circuit_idx >= 0) {
        warn_aborts(r.aborts, r.shots, &format!("{} n={} p2={} circuit {}", r.mode.as_str(), r.n, r.p2, r.circuit_idx));
    }
    emit(&cfg, &rows, CSV_HEADER)
}

fn cmd_grid(a: SweepArgs) -> Result<()> {
    let cfg = sweep_config(&a)?;
    emit(&cfg, &run_grid(&cfg)?, GRID_HEADER)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("CLINR_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("CLINR_THREADS = {v:?} is not a thread count"))?;
        if n == 0 {
            bail!("CLINR_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Run(a) => cmd_run(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Grid(a) => cmd_grid(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
