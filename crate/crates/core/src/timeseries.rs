//! Partitions of `[0, 1]`, sampled series, seeded simulators and CSV ingestion.
//!
//! Time is always normalised to `[0, 1]` and every series starts at the origin.
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with a root
//! seed, with one independent ChaCha stream per Monte Carlo path, and Gaussian
//! variates from the `rand_distr` ziggurat `StandardNormal` sampler.

use std::cmp::Ordering;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::csvfmt::{parse_table, write_row};
use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

/// Default root seed when neither a flag nor `LEADLAG_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_140_624;

/// Environment variable overriding the default root seed.
pub const SEED_ENV: &str = "LEADLAG_SEED";

/// Root seed from `LEADLAG_SEED`, falling back to `default`.
pub fn root_seed_from_env(default: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("{SEED_ENV}='{v}' is not a u64"))),
        Err(_) => Ok(default),
    }
}

/// Largest accepted level of [`Partition::dyadic_halfsplit`].
pub const MAX_HALFSPLIT_LEVEL: u32 = 5;

/// Strictly increasing points of `[0, 1]` containing both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition<T> {
    points: Vec<T>,
}

impl<T: Scalar> Partition<T> {
    pub fn new(points: Vec<T>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid(
                "a partition needs at least the two endpoints",
            ));
        }
        if points[0] != T::zero() || points[points.len() - 1] != T::one() {
            return Err(Error::invalid("a partition must start at 0 and end at 1"));
        }
        if let Some(k) = points
            .windows(2)
            .position(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
        {
            return Err(Error::invalid(format!(
                "partition points not strictly increasing at index {}",
                k + 1
            )));
        }
        Ok(Partition { points })
    }

    /// `{k/n : k = 0..=n}`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("uniform partition needs n >= 1"));
        }
        let nn = T::from_usize(n).expect("n representable");
        let points = (0..=n)
            .map(|k| T::from_usize(k).expect("k representable") / nn)
            .collect();
        Ok(Partition { points })
    }

    /// Dyadic points of level `2^n` on `[0, ½]` joined with dyadic points of level
    /// `n` on `[½, 1]`.
    ///
    /// The left half has `2^(2^n − 1)` intervals, so level 5 already needs about
    /// 2³¹ points; levels above [`MAX_HALFSPLIT_LEVEL`] are rejected.
    pub fn dyadic_halfsplit(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_HALFSPLIT_LEVEL {
            return Err(Error::invalid(format!(
                "dyadic half-split level must be in 1..={MAX_HALFSPLIT_LEVEL}, got {n}"
            )));
        }
        let fine_level = 1u32 << n;
        let left_intervals = 1usize << (fine_level - 1);
        let fine = (2.0f64).powi(-(fine_level as i32));
        let coarse = (2.0f64).powi(-(n as i32));
        let right_intervals = 1usize << (n - 1);
        let mut points = Vec::with_capacity(left_intervals + right_intervals + 1);
        points.extend((0..=left_intervals).map(|k| T::lit(k as f64 * fine)));
        points.extend((1..=right_intervals).map(|k| T::lit(0.5 + k as f64 * coarse)));
        Partition::new(points)
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    /// Largest gap between consecutive points.
    pub fn mesh(&self) -> T {
        self.points
            .windows(2)
            .fold(T::zero(), |acc, w| acc.max(w[1] - w[0]))
    }

    /// Index of `t` among the points, tolerating last-bit rounding.
    pub fn index_of(&self, t: T) -> Option<usize> {
        let tol = T::epsilon() * T::lit(16.0);
        let i = self.points.partition_point(|&p| p < t);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&k| k < self.points.len())
            .find(|&k| (self.points[k] - t).abs() <= tol)
    }

    /// Indices of `coarse` inside `self`; fails unless `coarse ⊂ self`.
    pub fn embed(&self, coarse: &Partition<T>) -> Result<Vec<usize>> {
        coarse
            .points
            .iter()
            .map(|&t| {
                self.index_of(t).ok_or_else(|| {
                    Error::invalid(format!(
                        "partition point {t} is not a sampling time of the series"
                    ))
                })
            })
            .collect()
    }
}

/// Observations `(t_i, X_{t_i})` on a partition, with `X_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries<T> {
    partition: Partition<T>,
    dim: usize,
    values: Vec<T>,
}

impl<T: Scalar> SampledSeries<T> {
    /// `values` holds one row of length `dim` per partition point; row 0 must be 0.
    pub fn new(partition: Partition<T>, values: Vec<Vec<T>>) -> Result<Self> {
        check_dim(partition.len(), values.len())?;
        let dim = values[0].len();
        if dim == 0 {
            return Err(Error::invalid("series dimension must be at least 1"));
        }
        let mut flat = Vec::with_capacity(dim * values.len());
        for row in &values {
            check_dim(dim, row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("series values must be finite"));
            }
            flat.extend_from_slice(row);
        }
        if flat[..dim].iter().any(|v| !v.is_zero()) {
            return Err(Error::invalid("series must start at the origin"));
        }
        Ok(SampledSeries {
            partition,
            dim,
            values: flat,
        })
    }

    /// Like [`SampledSeries::new`] but first translates every row by `-values[0]`.
    pub fn translated(partition: Partition<T>, mut values: Vec<Vec<T>>) -> Result<Self> {
        if let Some(first) = values.first().cloned() {
            for row in values.iter_mut() {
                for (v, &o) in row.iter_mut().zip(&first) {
                    *v -= o;
                }
            }
        }
        Self::new(partition, values)
    }

    pub fn partition(&self) -> &Partition<T> {
        &self.partition
    }

    pub fn times(&self) -> &[T] {
        self.partition.points()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> &[T] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last_value(&self) -> &[T] {
        self.value(self.len() - 1)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.values.chunks(self.dim)
    }

    /// Subsamples at the points of `coarse`, which must be nested in this series'
    /// partition.
    pub fn restrict(&self, coarse: &Partition<T>) -> Result<Self> {
        let idx = self.partition.embed(coarse)?;
        let mut values = Vec::with_capacity(idx.len() * self.dim);
        for &i in &idx {
            values.extend_from_slice(self.value(i));
        }
        Ok(SampledSeries {
            partition: coarse.clone(),
            dim: self.dim,
            values,
        })
    }

    /// CSV text with header `t,x1,...,xd`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("t");
        for k in 1..=self.dim {
            out.push_str(&format!(",x{k}"));
        }
        out.push('\n');
        for (i, &t) in self.times().iter().enumerate() {
            write_row(
                &mut out,
                std::iter::once(t).chain(self.value(i).iter().copied()),
            );
        }
        out
    }

    /// Parses CSV text, rescaling time affinely onto `[0, 1]` and translating so
    /// that the first row is the origin.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let table = parse_table::<T>(text)?;
        if table.header.first().map(String::as_str) != Some("t") || table.header.len() < 2 {
            return Err(Error::Parse {
                line: 1,
                message: "header must be t,x1,...,xd".into(),
            });
        }
        if table.rows.len() < 2 {
            return Err(Error::Parse {
                line: 1,
                message: "need at least two observations".into(),
            });
        }
        for w in table.rows.windows(2) {
            if w[0].1[0].partial_cmp(&w[1].1[0]) != Some(Ordering::Less) {
                return Err(Error::Parse {
                    line: w[1].0,
                    message: "times must be strictly increasing".into(),
                });
            }
        }
        let t0 = table.rows[0].1[0];
        let span = table.rows[table.rows.len() - 1].1[0] - t0;
        let last = table.rows.len() - 1;
        let times: Vec<T> = table
            .rows
            .iter()
            .enumerate()
            .map(|(i, (_, r))| match i {
                0 => T::zero(),
                i if i == last => T::one(),
                _ => (r[0] - t0) / span,
            })
            .collect();
        let partition = Partition::new(times).map_err(|e| Error::Parse {
            line: 2,
            message: format!("times do not rescale to a partition: {e}"),
        })?;
        let values = table
            .rows
            .into_iter()
            .map(|(_, r)| r[1..].to_vec())
            .collect();
        Self::translated(partition, values)
    }
}

/// Writes `series` as CSV.
pub fn save_csv<T: Scalar>(series: &SampledSeries<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, series.to_csv_string())?;
    Ok(())
}

/// Reads a CSV series (see [`SampledSeries::from_csv_str`]).
pub fn load_csv<T: Scalar>(path: impl AsRef<Path>) -> Result<SampledSeries<T>> {
    SampledSeries::from_csv_str(&std::fs::read_to_string(path)?)
}

pub fn uniform_partition<T: Scalar>(n: usize) -> Result<Partition<T>> {
    Partition::uniform(n)
}

pub fn dyadic_halfsplit_partition<T: Scalar>(n: u32) -> Result<Partition<T>> {
    Partition::dyadic_halfsplit(n)
}

/// Smooth bounded-variation drift `V` with `V_0 = 0`, applied to every coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drift {
    /// `V_t = rate · t`
    Linear { rate: f64 },
    /// `V_t = amplitude · sin(2π · frequency · t)`
    Sine { amplitude: f64, frequency: f64 },
}

impl Drift {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Drift::Linear { rate } => rate * t,
            Drift::Sine {
                amplitude,
                frequency,
            } => amplitude * (2.0 * std::f64::consts::PI * frequency * t).sin(),
        }
    }
}

/// Deterministic signal `t ↦ x_t ∈ ℝ^d`.
#[derive(Clone)]
pub enum PathFn {
    /// `x^k_t = t`
    Linear,
    /// `x^k_t = t²`
    Quadratic,
    /// `x^k_t = sin(2π · frequency · t)`
    Sine { frequency: f64 },
    /// `(t, k) ↦ x^k_t`
    Custom(Arc<dyn Fn(f64, usize) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for PathFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathFn::Linear => write!(f, "Linear"),
            PathFn::Quadratic => write!(f, "Quadratic"),
            PathFn::Sine { frequency } => write!(f, "Sine {{ frequency: {frequency} }}"),
            PathFn::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl PathFn {
    pub fn eval(&self, t: f64, coord: usize) -> f64 {
        match self {
            PathFn::Linear => t,
            PathFn::Quadratic => t * t,
            PathFn::Sine { frequency } => (2.0 * std::f64::consts::PI * frequency * t).sin(),
            PathFn::Custom(f) => f(t, coord),
        }
    }
}

#[derive(Debug, Clone)]
pub enum SimKind {
    Brownian,
    BrownianPlusDrift(Drift),
    Deterministic(PathFn),
}

impl std::fmt::Display for SimKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimKind::Brownian => write!(f, "brownian"),
            SimKind::BrownianPlusDrift(Drift::Linear { rate }) => write!(f, "drift-linear:{rate}"),
            SimKind::BrownianPlusDrift(Drift::Sine {
                amplitude,
                frequency,
            }) => {
                write!(f, "drift-sine:{amplitude},{frequency}")
            }
            SimKind::Deterministic(PathFn::Linear) => write!(f, "linear"),
            SimKind::Deterministic(PathFn::Quadratic) => write!(f, "quadratic"),
            SimKind::Deterministic(PathFn::Sine { frequency }) => write!(f, "sine:{frequency}"),
            SimKind::Deterministic(PathFn::Custom(_)) => write!(f, "custom"),
        }
    }
}

/// Accepts `brownian`, `drift-linear:r`, `drift-sine:a,f`, `linear`,
/// `quadratic` and `sine[:f]`.
impl std::str::FromStr for SimKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let nums = |want: usize| -> Result<Vec<f64>> {
            let a = args.ok_or_else(|| {
                Error::invalid(format!("signal kind '{name}' needs {want} parameter(s)"))
            })?;
            let v = a
                .split(',')
                .map(|x| x.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<_>>>()
                .filter(|v| v.len() == want)
                .ok_or_else(|| {
                    Error::invalid(format!("bad parameters '{a}' for signal kind '{name}'"))
                })?;
            Ok(v)
        };
        match (name, args) {
            ("brownian", None) => Ok(SimKind::Brownian),
            ("drift-linear", _) => Ok(SimKind::BrownianPlusDrift(Drift::Linear { rate: nums(1)?[0] })),
            ("drift-sine", _) => {
                let v = nums(2)?;
                Ok(SimKind::BrownianPlusDrift(Drift::Sine { amplitude: v[0], frequency: v[1] }))
            }
            ("linear", None) => Ok(SimKind::Deterministic(PathFn::Linear)),
            ("quadratic", None) => Ok(SimKind::Deterministic(PathFn::Quadratic)),
            ("sine", None) => Ok(SimKind::Deterministic(PathFn::Sine { frequency: 1.0 })),
            ("sine", Some(_)) => Ok(SimKind::Deterministic(PathFn::Sine { frequency: nums(1)?[0] })),
            _ => Err(Error::invalid(format!(
                "unknown signal kind '{s}' (expected brownian, drift-linear:r, drift-sine:a,f, linear, quadratic, sine[:f])"
            ))),
        }
    }
}

/// What to simulate, on which grid, from which generator state.
#[derive(Debug, Clone)]
pub struct SimSpec<T> {
    pub kind: SimKind,
    pub dim: usize,
    pub seed: u64,
    /// ChaCha stream, normally the Monte Carlo path index.
    pub stream: u64,
    pub fine_grid: Partition<T>,
}

impl<T: Scalar> SimSpec<T> {
    pub fn new(kind: SimKind, dim: usize, seed: u64, fine_grid: Partition<T>) -> Self {
        SimSpec {
            kind,
            dim,
            seed,
            stream: 0,
            fine_grid,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }
}

/// Closed-form bracket `⟨X⟩_{s,t} = rate · (t − s) · I_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnownBracket<T> {
    pub rate: T,
}

impl<T: Scalar> KnownBracket<T> {
    /// `⟨X⟩_{s,t}` as a row-major `d×d` matrix.
    pub fn over(&self, s: T, t: T, dim: usize) -> Vec<T> {
        let mut m = vec![T::zero(); dim * dim];
        for k in 0..dim {
            m[k * dim + k] = self.rate * (t - s);
        }
        m
    }
}

/// Simulated series plus its analytic bracket when one is known.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    pub series: SampledSeries<T>,
    pub bracket: Option<KnownBracket<T>>,
}

/// Generator for the path `(seed, stream)`.
pub fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Samples the signal of `spec` on its fine grid.
///
/// Brownian increments over `[t_k, t_{k+1}]` are `√(t_{k+1} − t_k) · Z` with
/// independent standard normal `Z` per coordinate, drawn interval by interval.
pub fn simulate<T: Scalar>(spec: &SimSpec<T>) -> Result<Simulation<T>> {
    if spec.dim == 0 {
        return Err(Error::invalid("simulation dimension must be at least 1"));
    }
    let d = spec.dim;
    let times: Vec<f64> = spec.fine_grid.points().iter().map(|t| t.as_f64()).collect();
    let mut rows = Vec::with_capacity(times.len());
    let bracket = match &spec.kind {
        SimKind::Brownian | SimKind::BrownianPlusDrift(_) => {
            let drift = match &spec.kind {
                SimKind::BrownianPlusDrift(v) => Some(*v),
                _ => None,
            };
            let mut rng = path_rng(spec.seed, spec.stream);
            let mut b = vec![0.0f64; d];
            rows.push(vec![T::zero(); d]);
            for w in times.windows(2) {
                let sd = (w[1] - w[0]).sqrt();
                for bk in b.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *bk += sd * z;
                }
                let v = drift.map_or(0.0, |v| v.eval(w[1]) - v.eval(0.0));
                rows.push(b.iter().map(|&x| T::lit(x + v)).collect());
            }
            Some(KnownBracket { rate: T::one() })
        }
        SimKind::Deterministic(f) => {
            for &t in &times {
                rows.push(
                    (0..d)
                        .map(|k| T::lit(f.eval(t, k) - f.eval(0.0, k)))
                        .collect(),
                );
            }
            Some(KnownBracket { rate: T::zero() })
        }
    };
    let series = SampledSeries::new(spec.fine_grid.clone(), rows)?;
    Ok(Simulation { series, bracket })
}
