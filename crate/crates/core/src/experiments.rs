//! Experiment configuration, orchestration and result files.
//!
//! A run is fully determined by its [`ExperimentConfig`]: every circuit and
//! every Monte-Carlo run draws from a sub-seed hashed from the master seed
//! and the run's coordinates, and rows are emitted in a fixed order.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{bound, choose_t_for_budget, default_params_with, LogBase, Scheme};
use crate::circuit::Circuit;
use crate::clifford::{sample_clifford, sample_gate_sequence, synthesize};
use crate::clinr::{CheckStrategy, ClinrParams, ClinrProtocol, IdleScope};
use crate::cznr::{graph_to_circuit, parse_graph, CznrProtocol, Graph};
use crate::error::{Error, Result};
use crate::frame::{run_protocol, DirectProtocol};
use crate::noise::{NoiseConfig, NoiseMode, NoiseModel};
use crate::seed::{derive, DOMAIN_CIRCUIT, DOMAIN_RUN};
use crate::stats::{wilson_interval, RunStats, Z95};
use crate::text::parse_circuit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Direct,
    Clinr,
    Cznr,
    Bounds,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Direct => "direct",
            Mode::Clinr => "clinr",
            Mode::Cznr => "cznr",
            Mode::Bounds => "bounds",
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

/// Where the logical circuit comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CircuitSource {
    /// A circuit text file.
    File { path: PathBuf },
    /// A graph edge-list file, run as its CZ circuit.
    Graph { path: PathBuf },
    /// A uniformly random Clifford, synthesized.
    RandomClifford { n: usize, seed: u64 },
    /// `round(n^alpha)` gates drawn uniformly from `{H, S, CX}`.
    RandomSequence { n: usize, alpha: f64, seed: u64 },
    /// One CZ on every pair of qubits.
    CompleteGraph { n: usize },
    /// A CZ on each pair of qubits independently with probability 1/2
    /// (at least one edge).
    RandomGraph { n: usize, seed: u64 },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// `round(n^alpha)`.
pub fn sequence_size(n: usize, alpha: f64) -> usize {
    (n as f64).powf(alpha).round() as usize
}

pub fn random_clifford_circuit(n: usize, seed: u64) -> Result<Circuit> {
    Ok(synthesize(&sample_clifford(n, &mut ChaCha8Rng::seed_from_u64(seed))?))
}

pub fn random_sequence_circuit(n: usize, alpha: f64, seed: u64) -> Result<Circuit> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
    }
    sample_gate_sequence(n, sequence_size(n, alpha), &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_graph_circuit(n: usize, seed: u64) -> Result<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<bool>() {
                g.toggle_edge(u, v)?;
            }
        }
    }
    if g.num_edges() == 0 && n >= 2 {
        g.toggle_edge(0, 1)?;
    }
    Ok(graph_to_circuit(&g))
}

impl CircuitSource {
    pub fn build(&self) -> Result<Circuit> {
        match self {
            CircuitSource::File { path } => parse_circuit(&read(path)?),
            CircuitSource::Graph { path } => Ok(graph_to_circuit(&parse_graph(&read(path)?)?)),
            CircuitSource::RandomClifford { n, seed } => random_clifford_circuit(*n, *seed),
            CircuitSource::RandomSequence { n, alpha, seed } => {
                random_sequence_circuit(*n, *alpha, *seed)
            }
            CircuitSource::CompleteGraph { n } => Ok(graph_to_circuit(&Graph::complete(*n))),
            CircuitSource::RandomGraph { n, seed } => random_graph_circuit(*n, *seed),
        }
    }
}

/// Whose gate overhead is compared against `omega_budget`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetSource {
    /// Mean executed operations of short pilot runs.
    #[default]
    Measured,
    /// The closed-form overhead bound.
    Analytic,
}

/// Protocol parameters. Unset `t` and `r` follow the default rules; with
/// `omega_budget` set, `t` is the smallest value meeting the budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub t: Option<usize>,
    pub r: Option<usize>,
    pub omega_budget: Option<f64>,
    pub budget_source: BudgetSource,
    pub pilot_shots: u64,
    pub strategy: CheckStrategy,
    pub batch_size: u64,
    pub max_restarts: u32,
    pub idle_scope: IdleScope,
    pub log_base: LogBase,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        let p = ClinrParams::default();
        Self {
            t: None,
            r: None,
            omega_budget: None,
            budget_source: BudgetSource::default(),
            pilot_shots: 1000,
            strategy: p.strategy,
            batch_size: p.batch_size,
            max_restarts: p.max_restarts,
            idle_scope: p.idle_scope,
            log_base: LogBase::default(),
        }
    }
}

/// Sweep axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n: Vec<usize>,
    pub p2: Vec<f64>,
    pub alpha: Vec<f64>,
    pub circuits_per_point: usize,
    pub modes: Vec<Mode>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n: Vec::new(),
            p2: Vec::new(),
            alpha: Vec::new(),
            circuits_per_point: 10,
            modes: vec![Mode::Direct, Mode::Clinr],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

/// Bound-evaluation inputs for `bounds` mode.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub scheme: Option<Scheme>,
    pub n: Option<usize>,
    pub s: Option<usize>,
    pub t: Option<usize>,
    pub r: Option<usize>,
    pub p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub noise: NoiseConfig,
    pub circuit: Option<CircuitSource>,
    pub shots: u64,
    pub seed: u64,
    pub protocol: ProtocolConfig,
    pub sweep: SweepConfig,
    pub bounds: BoundsConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Clinr,
            noise: NoiseConfig::default(),
            circuit: None,
            shots: 100_000,
            seed: 0,
            protocol: ProtocolConfig::default(),
            sweep: SweepConfig::default(),
            bounds: BoundsConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks the fields needed by single runs.
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if let Some(b) = self.protocol.omega_budget {
            if b.is_nan() || b <= 1.0 {
                return Err(Error::Config(format!("protocol.omega_budget = {b} must exceed 1")));
            }
        }
        if self.protocol.pilot_shots == 0 {
            return Err(Error::Config("protocol.pilot_shots must be at least 1".into()));
        }
        self.clinr_params(1, 0).validate()
    }

    /// Checks the axes needed by `sweep` (`grid = false`) or `grid`.
    pub fn validate_axes(&self, grid: bool) -> Result<()> {
        self.validate()?;
        let sw = &self.sweep;
        if sw.n.is_empty() {
            return Err(Error::Config("sweep.n must not be empty".into()));
        }
        if sw.circuits_per_point == 0 {
            return Err(Error::Config("sweep.circuits_per_point must be at least 1".into()));
        }
        if grid {
            if sw.alpha.is_empty() {
                return Err(Error::Config("sweep.alpha must not be empty".into()));
            }
            if let Some(a) = sw.alpha.iter().find(|&&a| !(a > 0.0 && a <= 2.0)) {
                return Err(Error::Config(format!("sweep.alpha value {a} outside (0, 2]")));
            }
            if sw.n.iter().any(|&n| n < 2) {
                return Err(Error::Config("grid circuits need n ≥ 2".into()));
            }
        } else {
            if sw.p2.is_empty() {
                return Err(Error::Config("sweep.p2 must not be empty".into()));
            }
            if sw.modes.is_empty() || sw.modes.contains(&Mode::Bounds) {
                return Err(Error::Config("sweep.modes must list direct, clinr or cznr".into()));
            }
        }
        Ok(())
    }

    fn clinr_params(&self, t: usize, r: usize) -> ClinrParams {
        ClinrParams {
            t,
            r,
            strategy: self.protocol.strategy,
            batch_size: self.protocol.batch_size,
            max_restarts: self.protocol.max_restarts,
            idle_scope: self.protocol.idle_scope,
        }
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        self.noise.build()
    }

    /// The noise model with its two-qubit rate replaced by `p2`.
    pub fn noise_at(&self, p2: f64) -> Result<NoiseModel> {
        let mut cfg = self.noise.clone();
        match cfg.mode.unwrap_or(NoiseMode::Realistic) {
            NoiseMode::Uniform => cfg.p = Some(p2),
            NoiseMode::Realistic => {
                cfg.p = None;
                cfg.p2 = Some(p2);
            }
        }
        cfg.build()
    }
}

/// Chooses `(t, r)` for `circuit` under `model`.
pub fn resolve_params(
    cfg: &ExperimentConfig,
    scheme: Scheme,
    circuit: &Circuit,
    model: &NoiseModel,
    seed: u64,
) -> Result<ClinrParams> {
    let (n, s) = (circuit.num_qubits(), circuit.size().max(1));
    let (t_default, r_default) = default_params_with(n, s, cfg.protocol.log_base);
    let r = cfg.protocol.r.unwrap_or(r_default);
    let t = match (cfg.protocol.t, cfg.protocol.omega_budget) {
        (Some(t), _) => t,
        (None, None) => t_default,
        (None, Some(budget)) => match cfg.protocol.budget_source {
            BudgetSource::Analytic => {
                let p = model.p2.max(model.p1);
                choose_t_for_budget(scheme, n, s, r, p, budget)?.ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "no t meets the analytic overhead budget {budget} (n = {n}, s = {s}, r = {r})"
                    ))
                })?
            }
            BudgetSource::Measured => {
                choose_t_measured(cfg, scheme, circuit, model, r, budget, t_default, seed)?
            }
        },
    };
    let params = cfg.clinr_params(t, r);
    params.validate()?;
    Ok(params)
}

/// Smallest `t` whose pilot-run gate overhead is within `budget`; when no
/// `t` up to `max(2·t_default, 4)` qualifies, the one with the lowest
/// measured overhead.
#[allow(clippy::too_many_arguments)]
fn choose_t_measured(
    cfg: &ExperimentConfig,
    scheme: Scheme,
    circuit: &Circuit,
    model: &NoiseModel,
    r: usize,
    budget: f64,
    t_default: usize,
    seed: u64,
) -> Result<usize> {
    let t_max = (2 * t_default).max(4).min(circuit.size().max(1));
    let mut best = (f64::INFINITY, 1);
    for t in 1..=t_max {
        let params = cfg.clinr_params(t, r);
        let pilot_seed = derive(seed, &[0x5049_4c54, t as u64]);
        let stats = run_scheme(scheme, circuit, params, model, cfg.protocol.pilot_shots, pilot_seed)?;
        let omega = stats.omega_g();
        if omega <= budget {
            return Ok(t);
        }
        if omega < best.0 {
            best = (omega, t);
        }
    }
    Ok(best.1)
}

fn run_scheme(
    scheme: Scheme,
    circuit: &Circuit,
    params: ClinrParams,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<RunStats> {
    match scheme {
        Scheme::Clinr => run_protocol(&ClinrProtocol::new(circuit, params)?, model, shots, seed),
        Scheme::Cznr => run_protocol(&CznrProtocol::new(circuit, params)?, model, shots, seed),
    }
}

/// One CSV row. Empty cells stand for "not applicable"; aggregate rows
/// carry `circuit_idx = -1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub mode: Mode,
    pub n: usize,
    pub alpha: Option<f64>,
    pub s: usize,
    pub t: Option<usize>,
    pub r: Option<usize>,
    pub p2: f64,
    pub p1: f64,
    pub shots: u64,
    pub seed: u64,
    pub circuit_idx: i64,
    pub plog: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_ops: f64,
    pub omega_g: f64,
    pub restart_rate: f64,
    pub aborts: u64,
}

pub const CSV_HEADER: &str =
    "mode,n,alpha,s,t,r,p2,p1,shots,seed,circuit_idx,plog,ci_lo,ci_hi,mean_ops,omega_g,restart_rate,aborts";

/// Result of running one mode on one circuit.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub row: ResultRow,
    pub stats: RunStats,
    pub params: Option<ClinrParams>,
}

/// Runs `mode` on `circuit` with `shots` shots from `seed`.
pub fn run_mode(
    cfg: &ExperimentConfig,
    mode: Mode,
    circuit: &Circuit,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<RunOutcome> {
    let (stats, params) = match mode {
        Mode::Direct => (run_protocol(&DirectProtocol::new(circuit)?, model, shots, seed)?, None),
        Mode::Clinr | Mode::Cznr => {
            let scheme = if mode == Mode::Clinr { Scheme::Clinr } else { Scheme::Cznr };
            let params = resolve_params(cfg, scheme, circuit, model, seed)?;
            (run_scheme(scheme, circuit, params, model, shots, seed)?, Some(params))
        }
        Mode::Bounds => {
            return Err(Error::Config("bounds mode does not simulate".into()));
        }
    };
    let (ci_lo, ci_hi) = stats.wilson();
    let row = ResultRow {
        mode,
        n: circuit.num_qubits(),
        alpha: None,
        s: circuit.size(),
        t: params.map(|p| p.t),
        r: params.map(|p| p.r),
        p2: model.p2,
        p1: model.p1,
        shots,
        seed,
        circuit_idx: 0,
        plog: stats.p_log(),
        ci_lo,
        ci_hi,
        mean_ops: stats.mean_ops(),
        omega_g: stats.omega_g(),
        restart_rate: stats.restart_rate(),
        aborts: stats.aborts,
    };
    Ok(RunOutcome { row, stats, params })
}

/// `run`: the configured mode on the configured circuit.
pub fn run_single(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let source = cfg
        .circuit
        .as_ref()
        .ok_or_else(|| Error::Config("circuit source is required".into()))?;
    let circuit = source.build()?;
    let model = cfg.noise_model()?;
    let mut out = run_mode(cfg, cfg.mode, &circuit, &model, cfg.shots, cfg.seed)?;
    if let CircuitSource::RandomSequence { alpha, .. } = source {
        out.row.alpha = Some(*alpha);
    }
    Ok(out)
}

/// Per-circuit rows of one sweep point folded into an aggregate row: the
/// mean of every per-circuit rate, with a Wilson interval on the pooled
/// counts.
pub fn aggregate_rows(rows: &[ResultRow], seed: u64) -> Result<ResultRow> {
    let first = rows
        .first()
        .ok_or_else(|| Error::InvalidParameter("nothing to aggregate".into()))?;
    let k = rows.len() as f64;
    let mean = |f: &dyn Fn(&ResultRow) -> f64| rows.iter().map(f).sum::<f64>() / k;
    let failures: u64 = rows
        .iter()
        .map(|r| (r.plog * (r.shots - r.aborts) as f64).round() as u64)
        .sum();
    let completed: u64 = rows.iter().map(|r| r.shots - r.aborts).sum();
    let (ci_lo, ci_hi) = if completed > 0 {
        wilson_interval(failures, completed)?
    } else {
        (0.0, 1.0)
    };
    let same = |f: &dyn Fn(&ResultRow) -> Option<usize>| {
        let v = f(first);
        rows.iter().all(|r| f(r) == v).then_some(v).flatten()
    };
    Ok(ResultRow {
        mode: first.mode,
        n: first.n,
        alpha: first.alpha,
        s: mean(&|r| r.s as f64).round() as usize,
        t: same(&|r| r.t),
        r: same(&|r| r.r),
        p2: first.p2,
        p1: first.p1,
        shots: rows.iter().map(|r| r.shots).sum(),
        seed,
        circuit_idx: -1,
        plog: mean(&|r| r.plog),
        ci_lo,
        ci_hi,
        mean_ops: mean(&|r| r.mean_ops),
        omega_g: mean(&|r| r.omega_g),
        restart_rate: mean(&|r| r.restart_rate),
        aborts: rows.iter().map(|r| r.aborts).sum(),
    })
}

/// Seed of circuit `idx` at width `n`; shared by all noise rates and modes
/// so that they are compared on the same circuits.
pub fn circuit_seed(master: u64, n: usize, idx: usize) -> u64 {
    derive(master, &[DOMAIN_CIRCUIT, n as u64, idx as u64])
}

/// Seed of one Monte-Carlo run of a sweep.
pub fn run_seed(master: u64, p2: f64, n: usize, alpha: f64, idx: usize, mode: Mode) -> u64 {
    derive(
        master,
        &[DOMAIN_RUN, p2.to_bits(), n as u64, alpha.to_bits(), idx as u64, mode.tag()],
    )
}

/// `sweep`: random Cliffords over the `(p2, n)` axes; when CZNR is among
/// the modes, the dense CZ block with one CZ on every pair of qubits. For each point, one
/// row per (circuit, mode) followed by one aggregate row per mode.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate_axes(false)?;
    let sw = &cfg.sweep;
    let mut rows = Vec::new();
    for &p2 in &sw.p2 {
        let model = cfg.noise_at(p2)?;
        for &n in &sw.n {
            let circuits: Vec<Circuit> = (0..sw.circuits_per_point)
                .into_par_iter()
                .map(|idx| {
                    if sw.modes.contains(&Mode::Cznr) {
                        Ok(graph_to_circuit(&Graph::complete(n)))
                    } else {
                        random_clifford_circuit(n, circuit_seed(cfg.seed, n, idx))
                    }
                })
                .collect::<Result<_>>()?;
            let per_circuit: Vec<Vec<ResultRow>> = circuits
                .par_iter()
                .enumerate()
                .map(|(idx, c)| {
                    sw.modes
                        .iter()
                        .map(|&mode| {
                            let seed = run_seed(cfg.seed, p2, n, 0.0, idx, mode);
                            let mut row = run_mode(cfg, mode, c, &model, cfg.shots, seed)?.row;
                            row.circuit_idx = idx as i64;
                            Ok(row)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            for rs in &per_circuit {
                rows.extend(rs.iter().cloned());
            }
            for (m, _) in sw.modes.iter().enumerate() {
                let of_mode: Vec<ResultRow> = per_circuit.iter().map(|rs| rs[m].clone()).collect();
                rows.push(aggregate_rows(&of_mode, cfg.seed)?);
            }
        }
    }
    Ok(rows)
}

/// One `(n, alpha)` cell of the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub n: usize,
    pub alpha: f64,
    pub s: usize,
    pub t: Option<usize>,
    pub r: Option<usize>,
    pub p2: f64,
    pub p1: f64,
    pub shots: u64,
    pub seed: u64,
    pub circuits: usize,
    pub plog_direct: f64,
    pub ci_lo_direct: f64,
    pub ci_hi_direct: f64,
    pub plog_clinr: f64,
    pub ci_lo_clinr: f64,
    pub ci_hi_clinr: f64,
    /// `plog_direct - plog_clinr`.
    pub delta: f64,
    pub delta_lo: f64,
    pub delta_hi: f64,
}

pub const GRID_HEADER: &str = "n,alpha,s,t,r,p2,p1,shots,seed,circuits,plog_direct,ci_lo_direct,ci_hi_direct,plog_clinr,ci_lo_clinr,ci_hi_clinr,delta,delta_lo,delta_hi";

/// 95% interval for a difference of two independent proportions, combining
/// their Wilson intervals (Newcombe's hybrid score method).
pub fn difference_interval(a: (u64, u64), b: (u64, u64)) -> Result<(f64, f64, f64)> {
    let (pa, pb) = (a.0 as f64 / a.1 as f64, b.0 as f64 / b.1 as f64);
    let (la, ua) = wilson_interval(a.0, a.1)?;
    let (lb, ub) = wilson_interval(b.0, b.1)?;
    let d = pa - pb;
    let lo = d - ((pa - la).powi(2) + (ub - pb).powi(2)).sqrt();
    let hi = d + ((ua - pa).powi(2) + (pb - lb).powi(2)).sqrt();
    Ok((d, lo, hi))
}

/// `grid`: random gate sequences of size `round(n^alpha)` over the
/// `(n, alpha)` axes at the first `p2` of the sweep (or the configured
/// noise), comparing direct and CliNR on pooled counts.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<Vec<GridRow>> {
    cfg.validate_axes(true)?;
    let sw = &cfg.sweep;
    let model = match sw.p2.first() {
        Some(&p2) => cfg.noise_at(p2)?,
        None => cfg.noise_model()?,
    };
    let mut cells = Vec::new();
    for &n in &sw.n {
        for &alpha in &sw.alpha {
            cells.push((n, alpha));
        }
    }
    cells
        .iter()
        .map(|&(n, alpha)| {
            let results: Vec<(RunOutcome, RunOutcome)> = (0..sw.circuits_per_point)
                .into_par_iter()
                .map(|idx| {
                    let cseed = derive(cfg.seed, &[DOMAIN_CIRCUIT, n as u64, alpha.to_bits(), idx as u64]);
                    let c = random_sequence_circuit(n, alpha, cseed)?;
                    let d = run_mode(cfg, Mode::Direct, &c, &model, cfg.shots,
                        run_seed(cfg.seed, model.p2, n, alpha, idx, Mode::Direct))?;
                    let k = run_mode(cfg, Mode::Clinr, &c, &model, cfg.shots,
                        run_seed(cfg.seed, model.p2, n, alpha, idx, Mode::Clinr))?;
                    Ok((d, k))
                })
                .collect::<Result<_>>()?;
            let pool = |f: &dyn Fn(&(RunOutcome, RunOutcome)) -> &RunStats| {
                results.iter().map(f).fold((0u64, 0u64), |(x, y), s| {
                    (x + s.logical_failures, y + s.completed())
                })
            };
            let direct = pool(&|r| &r.0.stats);
            let clinr = pool(&|r| &r.1.stats);
            let (delta, delta_lo, delta_hi) = difference_interval(direct, clinr)?;
            let (lo_d, hi_d) = wilson_interval(direct.0, direct.1)?;
            let (lo_c, hi_c) = wilson_interval(clinr.0, clinr.1)?;
            let same = |f: &dyn Fn(&ClinrParams) -> usize| {
                let v: Vec<usize> = results.iter().filter_map(|r| r.1.params.as_ref().map(f)).collect();
                v.first().copied().filter(|x| v.iter().all(|y| y == x))
            };
            Ok(GridRow {
                n,
                alpha,
                s: sequence_size(n, alpha),
                t: same(&|p| p.t),
                r: same(&|p| p.r),
                p2: model.p2,
                p1: model.p1,
                shots: cfg.shots,
                seed: cfg.seed,
                circuits: sw.circuits_per_point,
                plog_direct: direct.0 as f64 / direct.1 as f64,
                ci_lo_direct: lo_d,
                ci_hi_direct: hi_d,
                plog_clinr: clinr.0 as f64 / clinr.1 as f64,
                ci_lo_clinr: lo_c,
                ci_hi_clinr: hi_c,
                delta,
                delta_lo,
                delta_hi,
            })
        })
        .collect()
}

/// `bounds`: evaluates the configured bound.
pub fn run_bounds(cfg: &ExperimentConfig) -> Result<crate::analytics::BoundReport> {
    let b = &cfg.bounds;
    let need = |v: Option<usize>, name: &str| {
        v.ok_or_else(|| Error::Config(format!("bounds.{name} is required")))
    };
    let n = need(b.n, "n")?;
    let s = need(b.s, "s")?;
    let (t0, r0) = default_params_with(n, s, cfg.protocol.log_base);
    let p = b
        .p
        .ok_or_else(|| Error::Config("bounds.p is required".into()))?;
    bound(
        b.scheme.unwrap_or(Scheme::Clinr),
        n,
        s,
        b.t.unwrap_or(t0),
        b.r.unwrap_or(r0),
        p,
    )
}

/// Serializes rows as CSV with a header line.
pub fn to_csv<T: Serialize>(rows: &[T], header: &str) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    let mut out = String::with_capacity(header.len() + body.len() + 1);
    out.push_str(header);
    out.push('\n');
    out.push_str(std::str::from_utf8(&body).expect("csv output is UTF-8"));
    Ok(out)
}

/// Parses CSV produced by [`to_csv`].
pub fn from_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse { line: 0, message: e.to_string() }))
        .collect()
}

/// Appends rows to a CSV file, writing the header when the file is new or
/// empty.
pub fn append_csv<T: Serialize>(path: &Path, rows: &[T], header: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let text = to_csv(rows, header)?;
    let body = if fresh {
        text.as_str()
    } else {
        text.split_once('\n').map_or("", |(_, b)| b)
    };
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    f.write_all(body.as_bytes()).map_err(io)
}

/// Half-width of a 95% normal interval, for reporting.
pub fn normal_half_width(std_err: f64) -> f64 {
    Z95 * std_err
}
