//! Seeded Monte Carlo experiments on Hoff lifts, their limit and the lead-lag ODE.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]: path `s`
//! is drawn from ChaCha8 stream `s` under the root seed, all resolutions `n`
//! restrict that same fine path, and per-seed results are reduced in seed
//! order, so reruns give identical bytes.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::csvfmt::fmt_num;
use crate::error::{Error, Result};
use crate::leadlag::build_hoff;
use crate::rde::{ito_integral, solve_leadlag_ode, strat_integral, BuiltinField, FieldKind};
use crate::roughlift::{
    build_limit_on, hoff_lift, holder_norm, lift_piecewise_linear, pvar_dist, pvar_norm,
    refine_grid, window_sup_norm, QvMode,
};
use crate::timeseries::{
    simulate, Partition, SimKind, SimSpec, Simulation, DEFAULT_SEED, MAX_HALFSPLIT_LEVEL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    HoffConvergence,
    PointwiseRate,
    ItoRecovery,
    HolderBlowup,
    TightnessProbe,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::HoffConvergence,
        ExperimentKind::PointwiseRate,
        ExperimentKind::ItoRecovery,
        ExperimentKind::HolderBlowup,
        ExperimentKind::TightnessProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::HoffConvergence => "hoff-convergence",
            ExperimentKind::PointwiseRate => "pointwise-rate",
            ExperimentKind::ItoRecovery => "ito-recovery",
            ExperimentKind::HolderBlowup => "holder-blowup",
            ExperimentKind::TightnessProbe => "tightness-probe",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                Error::invalid(format!(
                    "unknown experiment '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

impl fmt::Display for QvMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QvMode::Analytic => "analytic",
            QvMode::Realized => "realized",
        })
    }
}

impl FromStr for QvMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "analytic" => Ok(QvMode::Analytic),
            "realized" => Ok(QvMode::Realized),
            _ => Err(Error::invalid(format!(
                "unknown qv mode '{s}' (expected analytic or realized)"
            ))),
        }
    }
}

/// Parameters of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seeds: usize,
    /// Sampling resolutions: uniform `n`, or half-split levels for the Hölder run.
    pub n_values: Vec<usize>,
    pub p: f64,
    pub qv_mode: QvMode,
    pub root_seed: u64,
    pub kind: SimKind,
    pub dim: usize,
    /// The fine grid has `2^fine_log2` intervals.
    pub fine_log2: u32,
    pub field: FieldKind,
    pub alpha: f64,
    /// Window sizes of the tightness probe.
    pub deltas: Vec<f64>,
    /// `n` of the partitions `{0, 1/n, 1}` in the tightness probe.
    pub counter_n: Vec<usize>,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        let (seeds, n_values) = match experiment {
            ExperimentKind::HoffConvergence => (200, vec![16, 64, 256]),
            ExperimentKind::PointwiseRate => (200, (4..=10).map(|k| 1 << k).collect()),
            ExperimentKind::ItoRecovery => (200, vec![16, 64, 256, 1024]),
            ExperimentKind::HolderBlowup => (100, vec![1, 2, 3, 4]),
            ExperimentKind::TightnessProbe => (100, vec![16, 64, 256]),
        };
        ExperimentConfig {
            experiment,
            seeds,
            n_values,
            p: 2.5,
            qv_mode: QvMode::Analytic,
            root_seed: DEFAULT_SEED,
            kind: SimKind::Brownian,
            dim: 1,
            fine_log2: 14,
            field: FieldKind::Linear,
            alpha: 0.4,
            deltas: (2..=8).map(|k| 2f64.powi(-k)).collect(),
            counter_n: vec![4, 16, 64, 256],
            out_dir: None,
        }
    }

    pub const KEYS: [&'static str; 14] = [
        "experiment",
        "seeds",
        "n_values",
        "p",
        "qv_mode",
        "seed",
        "kind",
        "dim",
        "fine_log2",
        "field",
        "alpha",
        "deltas",
        "counter_n",
        "out",
    ];

    /// Sets one `key = value` setting; see [`ExperimentConfig::KEYS`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| Error::invalid(format!("invalid value '{value}' for {key}: {what}"));
        match key.trim() {
            "experiment" => self.experiment = value.parse()?,
            "seeds" => self.seeds = value.parse().map_err(|_| bad("expected a count"))?,
            "n_values" => {
                self.n_values =
                    parse_list(value).map_err(|_| bad("expected comma-separated counts"))?
            }
            "p" => self.p = value.parse().map_err(|_| bad("expected a number"))?,
            "qv_mode" => self.qv_mode = value.parse()?,
            "seed" => {
                self.root_seed = value
                    .parse()
                    .map_err(|_| bad("expected an unsigned integer"))?
            }
            "kind" => self.kind = value.parse()?,
            "dim" => self.dim = value.parse().map_err(|_| bad("expected a count"))?,
            "fine_log2" => {
                self.fine_log2 = value.parse().map_err(|_| bad("expected a small integer"))?
            }
            "field" => self.field = value.parse()?,
            "alpha" => self.alpha = value.parse().map_err(|_| bad("expected a number"))?,
            "deltas" => {
                self.deltas =
                    parse_list(value).map_err(|_| bad("expected comma-separated numbers"))?
            }
            "counter_n" => {
                self.counter_n =
                    parse_list(value).map_err(|_| bad("expected comma-separated counts"))?
            }
            "out" => self.out_dir = Some(PathBuf::from(value)),
            other => {
                return Err(Error::invalid(format!(
                    "unknown config key '{other}' (known: {})",
                    Self::KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies a `key = value` file; blank lines and `#` comments are skipped.
    pub fn apply_file_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(Error::Parse {
                line: i + 1,
                message: format!("expected key = value, found '{line}'"),
            })?;
            self.set(k, v).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// Settings as ordered `(key, value)` text pairs.
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        vec![
            ("experiment", self.experiment.to_string()),
            ("seeds", self.seeds.to_string()),
            ("n_values", join(&self.n_values)),
            ("p", self.p.to_string()),
            ("qv_mode", self.qv_mode.to_string()),
            ("seed", self.root_seed.to_string()),
            ("kind", self.kind.to_string()),
            ("dim", self.dim.to_string()),
            ("fine_log2", self.fine_log2.to_string()),
            ("field", self.field.to_string()),
            ("alpha", self.alpha.to_string()),
            (
                "deltas",
                self.deltas
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("counter_n", join(&self.counter_n)),
            (
                "out",
                self.out_dir
                    .as_ref()
                    .map_or(String::new(), |p| p.display().to_string()),
            ),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return Err(Error::invalid("seeds must be at least 1"));
        }
        if self.dim == 0 {
            return Err(Error::invalid("dim must be at least 1"));
        }
        if !(self.p > 2.0 && self.p.is_finite()) {
            return Err(Error::invalid(format!("p must exceed 2, got {}", self.p)));
        }
        if self.n_values.is_empty() {
            return Err(Error::invalid("n_values must not be empty"));
        }
        if self.experiment == ExperimentKind::HolderBlowup {
            let max = MAX_HALFSPLIT_LEVEL as usize;
            if let Some(&n) = self.n_values.iter().find(|&&n| n == 0 || n > max) {
                return Err(Error::invalid(format!(
                    "half-split level {n} outside 1..={max}"
                )));
            }
            if !(self.alpha > 0.0 && self.alpha < 1.0) {
                return Err(Error::invalid(format!(
                    "alpha must lie in (0, 1), got {}",
                    self.alpha
                )));
            }
            return Ok(());
        }
        if !(1..=24).contains(&self.fine_log2) {
            return Err(Error::invalid(format!(
                "fine_log2 must lie in 1..=24, got {}",
                self.fine_log2
            )));
        }
        let fine = 1usize << self.fine_log2;
        // Hoff midpoints must be fine-grid points as well
        let nested = |n: usize| n > 0 && fine.is_multiple_of(2 * n);
        let extra = if self.experiment == ExperimentKind::TightnessProbe {
            &self.counter_n[..]
        } else {
            &[]
        };
        if let Some(&n) = self.n_values.iter().chain(extra).find(|&&n| !nested(n)) {
            return Err(Error::invalid(format!(
                "n = {n} is not nested in the fine grid of 2^{} intervals (need 2n to divide it)",
                self.fine_log2
            )));
        }
        match self.experiment {
            ExperimentKind::PointwiseRate if !matches!(self.kind, SimKind::Brownian) => {
                Err(Error::invalid(format!(
                    "pointwise-rate needs a Brownian signal, got kind {}",
                    self.kind
                )))
            }
            ExperimentKind::TightnessProbe
                if self.deltas.is_empty()
                    || self.deltas.iter().any(|&d| !(d > 0.0 && d <= 1.0)) =>
            {
                Err(Error::invalid("deltas must be nonempty and lie in (0, 1]"))
            }
            _ => Ok(()),
        }
    }

    fn fine_grid(&self) -> Result<Partition<f64>> {
        Partition::uniform(1usize << self.fine_log2)
    }

    fn simulate_seed(&self, grid: &Partition<f64>, seed: usize) -> Result<Simulation<f64>> {
        simulate(
            &SimSpec::new(self.kind.clone(), self.dim, self.root_seed, grid.clone())
                .with_stream(seed as u64),
        )
    }
}

fn parse_list<V: FromStr>(s: &str) -> std::result::Result<Vec<V>, V::Err> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse())
        .collect()
}

/// One statistic at one resolution, aggregated over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub statistic: String,
    pub n: usize,
    pub mesh: f64,
    pub mean: f64,
    pub std_error: f64,
    pub seeds: usize,
    /// Per-seed values in seed order (not written to CSV).
    pub samples: Vec<f64>,
}

impl TableRow {
    fn from_samples(statistic: &str, n: usize, mesh: f64, samples: Vec<f64>) -> Self {
        let (mean, std_error) = mean_se(&samples);
        TableRow {
            statistic: statistic.into(),
            n,
            mesh,
            mean,
            std_error,
            seeds: samples.len(),
            samples,
        }
    }
}

fn mean_se(x: &[f64]) -> (f64, f64) {
    let k = x.len() as f64;
    let mean = x.iter().sum::<f64>() / k;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub experiment: ExperimentKind,
    pub rows: Vec<TableRow>,
}

impl ConvergenceTable {
    pub const HEADER: &'static str = "statistic,n,mesh,mean,std_error,seeds";

    /// Rows of `statistic`, sorted by `n`.
    pub fn series(&self, statistic: &str) -> Vec<&TableRow> {
        let mut rows: Vec<_> = self
            .rows
            .iter()
            .filter(|r| r.statistic == statistic)
            .collect();
        rows.sort_by_key(|r| r.n);
        rows
    }

    pub fn row(&self, statistic: &str, n: usize) -> Option<&TableRow> {
        self.rows
            .iter()
            .find(|r| r.statistic == statistic && r.n == n)
    }

    pub fn statistics(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.statistic.as_str()) {
                names.push(&r.statistic);
            }
        }
        names
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for name in self.statistics() {
            for r in self.series(name) {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.statistic,
                    r.n,
                    fmt_num(r.mesh),
                    fmt_num(r.mean),
                    fmt_num(r.std_error),
                    r.seeds
                ));
            }
        }
        out
    }
}

/// Runs `f` for every seed on the rayon pool and returns results in seed order.
fn per_seed<R: Send>(seeds: usize, f: impl Fn(usize) -> Result<R> + Sync + Send) -> Result<Vec<R>> {
    (0..seeds).into_par_iter().map(f).collect()
}

/// Column `k` of per-seed result vectors.
fn column(per_seed: &[Vec<f64>], k: usize) -> Vec<f64> {
    per_seed.iter().map(|v| v[k]).collect()
}

/// `d_{p-var}(𝐗^D, 𝐗^∞)` on the Hoff breakpoints of the `n`-uniform partitions.
pub fn run_hoff_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let fine = cfg.fine_grid()?;
    let coarse: Vec<Partition<f64>> = cfg
        .n_values
        .iter()
        .map(|&n| Partition::uniform(n))
        .collect::<Result<_>>()?;
    let results = per_seed(cfg.seeds, |s| {
        let sim = cfg.simulate_seed(&fine, s)?;
        coarse
            .iter()
            .map(|part| {
                let sk = hoff_lift(&sim.series.restrict(part)?)?;
                let lim =
                    build_limit_on(&sim.series, sk.times(), cfg.qv_mode, sim.bracket.as_ref())?;
                pvar_dist(&sk, &lim, cfg.p)
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    let rows = cfg
        .n_values
        .iter()
        .enumerate()
        .map(|(k, &n)| TableRow::from_samples("pvar-dist", n, 1.0 / n as f64, column(&results, k)))
        .collect();
    Ok(ConvergenceTable {
        experiment: ExperimentKind::HoffConvergence,
        rows,
    })
}

/// `E[d(𝐗^D_{0,1}, 𝐗^∞_{0,1})^p]^{1/p}` against the envelope
/// `E[S^{p/2}]^{(p−2)/(2p²)} ∨ E[S^{p/2}]^{(p−2)/p²}`, where `S` is the largest
/// realised bracket (trace) over one interval of `D`.
///
/// Rows: `pointwise`, `envelope` and their quotient `ratio`. Samples hold
/// `d^p` and `S^{p/2}` respectively.
pub fn run_pointwise_rate(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let fine = cfg.fine_grid()?;
    let p = cfg.p;
    let d = cfg.dim;
    let coarse: Vec<Partition<f64>> = cfg
        .n_values
        .iter()
        .map(|&n| Partition::uniform(n))
        .collect::<Result<_>>()?;
    let results = per_seed(cfg.seeds, |s| {
        let sim = cfg.simulate_seed(&fine, s)?;
        let lim =
            build_limit_on(&sim.series, &[0.0, 1.0], cfg.qv_mode, sim.bracket.as_ref())?.total();
        let mut out = Vec::with_capacity(2 * coarse.len());
        for part in &coarse {
            let g = hoff_lift(&sim.series.restrict(part)?)?.total();
            out.push(g.dist(&lim)?.powf(p));
            let idx = fine.embed(part)?;
            let sup = idx
                .windows(2)
                .map(|w| {
                    (w[0]..w[1])
                        .map(|k| {
                            let (a, b) = (sim.series.value(k), sim.series.value(k + 1));
                            (0..d).map(|i| (b[i] - a[i]).powi(2)).sum::<f64>()
                        })
                        .sum::<f64>()
                })
                .fold(0.0, f64::max);
            out.push(sup.powf(p / 2.0));
        }
        Ok(out)
    })?;
    let e_small = (p - 2.0) / (2.0 * p * p);
    let e_large = (p - 2.0) / (p * p);
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for (k, &n) in cfg.n_values.iter().enumerate() {
        let h = 1.0 / n as f64;
        let mut stat = TableRow::from_samples("pointwise", n, h, column(&results, 2 * k));
        let m = stat.mean;
        stat.mean = m.powf(1.0 / p);
        stat.std_error = if m > 0.0 {
            stat.mean / (p * m) * stat.std_error
        } else {
            0.0
        };

        let mut env = TableRow::from_samples("envelope", n, h, column(&results, 2 * k + 1));
        let q = env.mean;
        let (v, slope) = if q.powf(e_small) >= q.powf(e_large) {
            (q.powf(e_small), e_small)
        } else {
            (q.powf(e_large), e_large)
        };
        env.std_error = if q > 0.0 {
            v * slope / q * env.std_error
        } else {
            0.0
        };
        env.mean = v;

        let r = stat.mean / env.mean;
        let rel =
            ((stat.std_error / stat.mean).powi(2) + (env.std_error / env.mean).powi(2)).sqrt();
        ratios.push(TableRow {
            statistic: "ratio".into(),
            n,
            mesh: h,
            mean: r,
            std_error: r * rel,
            seeds: cfg.seeds,
            samples: Vec::new(),
        });
        rows.push(stat);
        rows.push(env);
    }
    rows.extend(ratios);
    Ok(ConvergenceTable {
        experiment: ExperimentKind::PointwiseRate,
        rows,
    })
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Terminal gaps `|Y^n_1 − Itô|` and `|Y^n_1 − Stratonovich|`, references from
/// fine-grid left-point and midpoint sums (`ito-gap`, `strat-gap`). For the
/// linear field the closed forms `½(X_1² − ⟨X⟩_1)` and `½X_1²` are reported as
/// well (`ito-gap-closed`, `strat-gap-closed`).
pub fn run_ito_recovery(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let fine = cfg.fine_grid()?;
    let field = BuiltinField::new(cfg.field.clone(), cfg.dim);
    let closed = cfg.field == FieldKind::Linear;
    let coarse: Vec<Partition<f64>> = cfg
        .n_values
        .iter()
        .map(|&n| Partition::uniform(n))
        .collect::<Result<_>>()?;
    let y0 = vec![0.0; cfg.dim];
    let results = per_seed(cfg.seeds, |s| {
        let sim = cfg.simulate_seed(&fine, s)?;
        let ito = ito_integral(&sim.series, &field)?;
        let strat = strat_integral(&sim.series, &field)?;
        let rate = sim.bracket.map_or(0.0, |b| b.rate);
        let x1 = sim.series.last_value();
        let ito_closed: Vec<f64> = x1.iter().map(|x| 0.5 * (x * x - rate)).collect();
        let strat_closed: Vec<f64> = x1.iter().map(|x| 0.5 * x * x).collect();
        let mut out = Vec::new();
        for part in &coarse {
            let hoff = build_hoff(&sim.series.restrict(part)?)?;
            let run = solve_leadlag_ode(&hoff, &field, &y0)?;
            let y = run.terminal();
            out.push(norm_diff(y, &ito));
            out.push(norm_diff(y, &strat));
            out.push(norm_diff(y, &ito_closed));
            out.push(norm_diff(y, &strat_closed));
        }
        Ok(out)
    })?;
    let mut names = vec!["ito-gap", "strat-gap"];
    if closed {
        names.extend(["ito-gap-closed", "strat-gap-closed"]);
    }
    let mut rows = Vec::new();
    for (j, name) in names.iter().enumerate() {
        for (k, &n) in cfg.n_values.iter().enumerate() {
            rows.push(TableRow::from_samples(
                name,
                n,
                1.0 / n as f64,
                column(&results, 4 * k + j),
            ));
        }
    }
    Ok(ConvergenceTable {
        experiment: ExperimentKind::ItoRecovery,
        rows,
    })
}

/// Hölder (`holder`) and `p`-variation (`pvar`) norms of the Hoff lift on the
/// half-split dyadic partitions `D_n`. The signal is sampled once per seed on the
/// finest requested `D_n`, which contains all coarser ones.
pub fn run_holder_blowup(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let levels: Vec<u32> = cfg.n_values.iter().map(|&n| n as u32).collect();
    let top = Partition::dyadic_halfsplit(*levels.iter().max().expect("nonempty n_values"))?;
    let parts: Vec<Partition<f64>> = levels
        .iter()
        .map(|&n| Partition::dyadic_halfsplit(n))
        .collect::<Result<_>>()?;
    let results = per_seed(cfg.seeds, |s| {
        let sim = cfg.simulate_seed(&top, s)?;
        let mut out = Vec::new();
        for part in &parts {
            let sk = hoff_lift(&sim.series.restrict(part)?)?;
            out.push(holder_norm(&sk, cfg.alpha)?);
            out.push(pvar_norm(&sk, cfg.p)?);
        }
        Ok(out)
    })?;
    let mut rows = Vec::new();
    for (j, name) in ["holder", "pvar"].iter().enumerate() {
        for (k, part) in parts.iter().enumerate() {
            rows.push(TableRow::from_samples(
                name,
                cfg.n_values[k],
                part.mesh(),
                column(&results, 2 * k + j),
            ));
        }
    }
    Ok(ConvergenceTable {
        experiment: ExperimentKind::HolderBlowup,
        rows,
    })
}

/// `sup_n E[sup_{|t−s|≤δ} ‖𝐗^{D_n}_{s,t}‖^p]` for each `δ`, over the uniform
/// partitions (`window-uniform`) and over `{0, 1/n, 1}` (`window-counterexample`).
/// Rows carry `n = round(1/δ)` and `mesh = δ`. Sub-segment windows are resolved
/// by refining each lift to a spacing of at most `δ_min / 4`.
pub fn run_tightness_probe(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let fine = cfg.fine_grid()?;
    let p = cfg.p;
    let mut deltas = cfg.deltas.clone();
    deltas.sort_by(|a, b| b.total_cmp(a));
    let d_min = deltas[deltas.len() - 1];
    let uniform: Vec<Partition<f64>> = cfg
        .n_values
        .iter()
        .map(|&n| Partition::uniform(n))
        .collect::<Result<_>>()?;
    let counter: Vec<Partition<f64>> = cfg
        .counter_n
        .iter()
        .map(|&n| {
            if n == 1 {
                Partition::uniform(1)
            } else {
                Partition::new(vec![0.0, 1.0 / n as f64, 1.0])
            }
        })
        .collect::<Result<_>>()?;
    let families = [uniform, counter];
    let results = per_seed(cfg.seeds, |s| {
        let sim = cfg.simulate_seed(&fine, s)?;
        let mut out = Vec::new();
        for part in families.iter().flatten() {
            let hoff = build_hoff(&sim.series.restrict(part)?)?;
            let bp = hoff.breakpoints();
            let widest = bp.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            let refine = ((4.0 * widest / d_min).ceil() as usize).max(1);
            let sk = lift_piecewise_linear(hoff.segments(), &refine_grid(&bp, refine))?;
            out.extend(deltas.iter().map(|&d| window_sup_norm(&sk, d).powf(p)));
        }
        Ok(out)
    })?;
    let mut rows = Vec::new();
    let mut offset = 0;
    for (name, fam) in ["window-uniform", "window-counterexample"]
        .iter()
        .zip(&families)
    {
        for (j, &delta) in deltas.iter().enumerate() {
            let best = (0..fam.len())
                .map(|m| {
                    TableRow::from_samples(
                        name,
                        (1.0 / delta).round() as usize,
                        delta,
                        column(&results, offset + m * deltas.len() + j),
                    )
                })
                .max_by(|a, b| a.mean.total_cmp(&b.mean))
                .expect("nonempty family");
            rows.push(best);
        }
        offset += fam.len() * deltas.len();
    }
    Ok(ConvergenceTable {
        experiment: ExperimentKind::TightnessProbe,
        rows,
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    match cfg.experiment {
        ExperimentKind::HoffConvergence => run_hoff_convergence(cfg),
        ExperimentKind::PointwiseRate => run_pointwise_rate(cfg),
        ExperimentKind::ItoRecovery => run_ito_recovery(cfg),
        ExperimentKind::HolderBlowup => run_holder_blowup(cfg),
        ExperimentKind::TightnessProbe => run_tightness_probe(cfg),
    }
}

/// Run metadata as pretty-printed JSON.
pub fn manifest_json(cfg: &ExperimentConfig) -> String {
    let settings: serde_json::Map<String, serde_json::Value> = cfg
        .key_values()
        .into_iter()
        .map(|(k, v)| (k.to_string(), serde_json::Value::String(v)))
        .collect();
    let doc = serde_json::json!({
        "experiment": cfg.experiment.name(),
        "library": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "root_seed": cfg.root_seed,
        "generator": "ChaCha8, stream = seed index, standard normal increments",
        "config": settings,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("manifest serialises");
    s.push('\n');
    s
}

/// Writes `<dir>/<experiment>.csv` and `<dir>/<experiment>.manifest.json`,
/// returning both paths.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    table: &ConvergenceTable,
    dir: &Path,
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{}.csv", cfg.experiment.name()));
    let manifest = dir.join(format!("{}.manifest.json", cfg.experiment.name()));
    std::fs::write(&csv, table.to_csv_string())?;
    std::fs::write(&manifest, manifest_json(cfg))?;
    Ok((csv, manifest))
}
