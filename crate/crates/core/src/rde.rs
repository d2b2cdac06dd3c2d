//! The random ODE `dY = f(X^b) dX^f` driven by a Hoff path, solved exactly
//! segment by segment, with Itô and Stratonovich reference sums on fine data.
//!
//! On a lag-moving segment `dX^f = 0`, so `Y` stands still; on a lead-moving
//! segment `X^b` is frozen, so `ΔY = f(X^b) ΔX^f` exactly.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::leadlag::{HoffPath, Mover};
use crate::scalar::Scalar;
use crate::timeseries::SampledSeries;

/// A family `f = (f_1, …, f_d)` of maps `ℝ^d → ℝ^e`.
///
/// Fields are assumed smooth with bounded derivatives on the region the driver
/// visits; nothing checks this.
pub trait VectorFieldSet<T>: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    /// Writes `f(x)` as a row-major `e×d` matrix: `out[r * d + i] = f_i^r(x)`.
    fn eval(&self, x: &[T], out: &mut [T]);
}

/// Scalar profile `φ` of a diagonal built-in field, `f_i(x) = φ(x_i) e_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    /// `φ ≡ c`.
    Constant(f64),
    /// `φ(x) = x`. Grows linearly; fine on bounded drivers.
    Linear,
    /// `φ(x) = sin x`. Bounded with all derivatives bounded.
    Sin,
    /// `φ(x) = Σ c_k x^k`, coefficients from degree 0 up.
    Polynomial(Vec<f64>),
    /// `φ(x) = tanh(Σ c_k x^k)`: a polynomial saturated to `(−1, 1)`.
    TanhPolynomial(Vec<f64>),
}

impl FieldKind {
    pub fn profile(&self, x: f64) -> f64 {
        match self {
            FieldKind::Constant(c) => *c,
            FieldKind::Linear => x,
            FieldKind::Sin => x.sin(),
            FieldKind::Polynomial(c) => horner(c, x),
            FieldKind::TanhPolynomial(c) => horner(c, x).tanh(),
        }
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |c: &[f64]| {
            c.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            FieldKind::Constant(c) => write!(f, "constant:{c}"),
            FieldKind::Linear => write!(f, "linear"),
            FieldKind::Sin => write!(f, "sin"),
            FieldKind::Polynomial(c) => write!(f, "poly:{}", join(c)),
            FieldKind::TanhPolynomial(c) => write!(f, "tanh-poly:{}", join(c)),
        }
    }
}

/// Accepts `constant[:c]`, `linear`, `sin`, `poly:c0,c1,…` and `tanh-poly:c0,c1,…`.
impl FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let coeffs = |a: Option<&str>| -> Result<Vec<f64>> {
            let a = a.ok_or_else(|| {
                Error::invalid(format!(
                    "field '{name}' needs coefficients, e.g. {name}:0,1"
                ))
            })?;
            let c = a
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| {
                            Error::invalid(format!("bad coefficient '{}' in field '{s}'", v.trim()))
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(c)
        };
        match (name, args) {
            ("constant", None) => Ok(FieldKind::Constant(1.0)),
            ("constant", Some(_)) => Ok(FieldKind::Constant(coeffs(args)?[0])),
            ("linear", None) => Ok(FieldKind::Linear),
            ("sin", None) => Ok(FieldKind::Sin),
            ("poly", _) => Ok(FieldKind::Polynomial(coeffs(args)?)),
            ("tanh-poly", _) => Ok(FieldKind::TanhPolynomial(coeffs(args)?)),
            _ => Err(Error::invalid(format!(
                "unknown vector field '{s}' (expected constant[:c], linear, sin, poly:..., tanh-poly:...)"
            ))),
        }
    }
}

/// Diagonal built-in field with `e = d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinField {
    pub kind: FieldKind,
    pub dim: usize,
}

impl BuiltinField {
    pub fn new(kind: FieldKind, dim: usize) -> Self {
        BuiltinField { kind, dim }
    }

    pub fn parse(spec: &str, dim: usize) -> Result<Self> {
        Ok(BuiltinField::new(spec.parse()?, dim))
    }
}

impl<T: Scalar> VectorFieldSet<T> for BuiltinField {
    fn dim_in(&self) -> usize {
        self.dim
    }

    fn dim_out(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[T], out: &mut [T]) {
        let d = self.dim;
        out.iter_mut().for_each(|v| *v = T::zero());
        for i in 0..d {
            out[i * d + i] = T::lit(self.kind.profile(x[i].as_f64()));
        }
    }
}

type FieldFn<T> = dyn Fn(&[T], &mut [T]) + Send + Sync;

/// Field given by a closure with the [`VectorFieldSet::eval`] contract.
#[derive(Clone)]
pub struct FnField<T> {
    dim_in: usize,
    dim_out: usize,
    f: Arc<FieldFn<T>>,
}

impl<T> FnField<T> {
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        f: impl Fn(&[T], &mut [T]) + Send + Sync + 'static,
    ) -> Self {
        FnField {
            dim_in,
            dim_out,
            f: Arc::new(f),
        }
    }
}

impl<T> fmt::Debug for FnField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnField({} -> {})", self.dim_in, self.dim_out)
    }
}

impl<T: Scalar> VectorFieldSet<T> for FnField<T> {
    fn dim_in(&self) -> usize {
        self.dim_in
    }

    fn dim_out(&self) -> usize {
        self.dim_out
    }

    fn eval(&self, x: &[T], out: &mut [T]) {
        (self.f)(x, out)
    }
}

/// Trajectory of the lead-lag ODE on the Hoff breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeRun<T> {
    pub times: Vec<T>,
    pub y: Vec<Vec<T>>,
    pub y0: Vec<T>,
    pub driver_id: String,
    pub ito_ref: Option<Vec<T>>,
    pub strat_ref: Option<Vec<T>>,
}

impl<T: Scalar> OdeRun<T> {
    pub fn terminal(&self) -> &[T] {
        &self.y[self.y.len() - 1]
    }

    /// Attaches Itô and Stratonovich reference values computed on `fine`.
    pub fn with_references<F: VectorFieldSet<T> + ?Sized>(
        mut self,
        fine: &SampledSeries<T>,
        f: &F,
    ) -> Result<Self> {
        let ito = ito_integral(fine, f)?;
        let strat = strat_integral(fine, f)?;
        self.ito_ref = Some(self.y0.iter().zip(ito).map(|(&a, b)| a + b).collect());
        self.strat_ref = Some(self.y0.iter().zip(strat).map(|(&a, b)| a + b).collect());
        Ok(self)
    }
}

fn check_field<T: Scalar, F: VectorFieldSet<T> + ?Sized>(d: usize, f: &F, y0: &[T]) -> Result<()> {
    check_dim(d, f.dim_in())?;
    check_dim(f.dim_out(), y0.len())
}

fn driver_id<T: Scalar>(hoff: &HoffPath<T>) -> String {
    format!(
        "hoff(d={}, n={})",
        hoff.signal_dim(),
        hoff.segments().len() / 2
    )
}

/// `y += M · dx` for a row-major `e×d` matrix `M`.
fn apply<T: Scalar>(m: &[T], dx: &[T], y: &mut [T]) {
    let d = dx.len();
    for (r, yr) in y.iter_mut().enumerate() {
        let row = &m[r * d..(r + 1) * d];
        *yr += row
            .iter()
            .zip(dx)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
    }
}

/// Exact solution of `dY = f(X^b) dX^f`, `Y_0 = y0`, one field evaluation per
/// lead-moving segment.
pub fn solve_leadlag_ode<T: Scalar, F: VectorFieldSet<T> + ?Sized>(
    hoff: &HoffPath<T>,
    f: &F,
    y0: &[T],
) -> Result<OdeRun<T>> {
    let d = hoff.signal_dim();
    check_field(d, f, y0)?;
    let mut m = vec![T::zero(); y0.len() * d];
    let mut y = y0.to_vec();
    let mut traj = Vec::with_capacity(hoff.segments().len() + 1);
    traj.push(y.clone());
    for (k, s) in hoff.segments().iter().enumerate() {
        if hoff.mover(k) == Mover::Lead {
            f.eval(&s.start[..d], &mut m);
            let dx: Vec<T> = (d..2 * d).map(|c| s.end[c] - s.start[c]).collect();
            apply(&m, &dx, &mut y);
        }
        traj.push(y.clone());
    }
    Ok(OdeRun {
        times: hoff.breakpoints(),
        y: traj,
        y0: y0.to_vec(),
        driver_id: driver_id(hoff),
        ito_ref: None,
        strat_ref: None,
    })
}

/// The same ODE integrated by classical RK4 with `substeps` equal steps per
/// segment, evaluating the driver along each segment.
pub fn solve_leadlag_ode_rk<T: Scalar, F: VectorFieldSet<T> + ?Sized>(
    hoff: &HoffPath<T>,
    f: &F,
    y0: &[T],
    substeps: usize,
) -> Result<OdeRun<T>> {
    if substeps == 0 {
        return Err(Error::invalid("substeps must be at least 1"));
    }
    let d = hoff.signal_dim();
    check_field(d, f, y0)?;
    let e = y0.len();
    let mut m = vec![T::zero(); e * d];
    let mut y = y0.to_vec();
    let mut traj = Vec::with_capacity(hoff.segments().len() + 1);
    traj.push(y.clone());
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let steps = T::from_usize(substeps).expect("substeps representable");
    for s in hoff.segments() {
        let len = s.t_end - s.t_start;
        if len > T::zero() {
            // dX^f/du is constant along the segment
            let rate: Vec<T> = (d..2 * d).map(|c| (s.end[c] - s.start[c]) / len).collect();
            let h = len / steps;
            let slope = |u: T, m: &mut [T]| -> Vec<T> {
                let x = s.value_at(u);
                f.eval(&x[..d], m);
                let mut k = vec![T::zero(); e];
                apply(m, &rate, &mut k);
                k
            };
            for step in 0..substeps {
                let u = s.t_start + h * T::from_usize(step).expect("step representable");
                // the field depends on time only, so the stages share y
                let k1 = slope(u, &mut m);
                let k2 = slope(u + h * T::half(), &mut m);
                let k3 = k2.clone();
                let k4 = slope(u + h, &mut m);
                for r in 0..e {
                    y[r] += h / six * (k1[r] + two * k2[r] + two * k3[r] + k4[r]);
                }
            }
        }
        traj.push(y.clone());
    }
    Ok(OdeRun {
        times: hoff.breakpoints(),
        y: traj,
        y0: y0.to_vec(),
        driver_id: driver_id(hoff),
        ito_ref: None,
        strat_ref: None,
    })
}

fn riemann_sum<T: Scalar, F: VectorFieldSet<T> + ?Sized>(
    series: &SampledSeries<T>,
    f: &F,
    midpoint: bool,
) -> Result<Vec<T>> {
    let d = series.dim();
    check_dim(d, f.dim_in())?;
    let e = f.dim_out();
    let mut m = vec![T::zero(); e * d];
    let mut acc = vec![T::zero(); e];
    let mut x = vec![T::zero(); d];
    for k in 0..series.len() - 1 {
        let a = series.value(k);
        let b = series.value(k + 1);
        for i in 0..d {
            x[i] = if midpoint {
                T::half() * (a[i] + b[i])
            } else {
                a[i]
            };
        }
        f.eval(&x, &mut m);
        let dx: Vec<T> = b.iter().zip(a).map(|(&q, &p)| q - p).collect();
        apply(&m, &dx, &mut acc);
    }
    Ok(acc)
}

/// Left-point sums `Σ f(X_{t_k}) ΔX_k`.
pub fn ito_integral<T: Scalar, F: VectorFieldSet<T> + ?Sized>(
    series: &SampledSeries<T>,
    f: &F,
) -> Result<Vec<T>> {
    riemann_sum(series, f, false)
}

/// Midpoint-value sums `Σ f(½(X_{t_k} + X_{t_{k+1}})) ΔX_k`, a second-order
/// consistent approximation of the Stratonovich integral.
pub fn strat_integral<T: Scalar, F: VectorFieldSet<T> + ?Sized>(
    series: &SampledSeries<T>,
    f: &F,
) -> Result<Vec<T>> {
    riemann_sum(series, f, true)
}

/// Solution of the augmented system on `ℝ^d ⊕ ℝ^e`:
/// `dz = Σ_i Q_i(z) dX^{b;i} + W_i(z) dX^{f;i}` with `Q_i(z) = (e_i, 0)` and
/// `W_i(z) = (0, f_i(ẑ))`, started at `(0, y0)` and recorded on the breakpoints.
pub fn solve_augmented<T: Scalar, F: VectorFieldSet<T> + ?Sized>(
    hoff: &HoffPath<T>,
    f: &F,
    y0: &[T],
) -> Result<Vec<Vec<T>>> {
    let d = hoff.signal_dim();
    check_field(d, f, y0)?;
    let mut m = vec![T::zero(); y0.len() * d];
    let mut z: Vec<T> = hoff.segments()[0].start[..d]
        .iter()
        .copied()
        .chain(y0.iter().copied())
        .collect();
    let mut traj = Vec::with_capacity(hoff.segments().len() + 1);
    traj.push(z.clone());
    for (k, s) in hoff.segments().iter().enumerate() {
        match hoff.mover(k) {
            Mover::Lag => {
                for (zi, (e, b)) in z.iter_mut().zip(s.end.iter().zip(&s.start)).take(d) {
                    *zi += *e - *b;
                }
            }
            Mover::Lead => {
                let (hat, bar) = z.split_at_mut(d);
                f.eval(hat, &mut m);
                let dx: Vec<T> = (d..2 * d).map(|c| s.end[c] - s.start[c]).collect();
                apply(&m, &dx, bar);
            }
            Mover::Neither => {}
        }
        traj.push(z.clone());
    }
    Ok(traj)
}

/// Projection `ρ(ẑ, z̄) = z̄`.
pub fn rho<T: Copy>(z: &[T], d: usize) -> Vec<T> {
    z[d..].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leadlag::build_hoff;
    use crate::timeseries::{simulate, Partition, PathFn, SimKind, SimSpec};
    use proptest::prelude::*;

    fn series(values: &[f64]) -> SampledSeries<f64> {
        let n = values.len() - 1;
        SampledSeries::new(
            Partition::uniform(n).unwrap(),
            values.iter().map(|&v| vec![v]).collect(),
        )
        .unwrap()
    }

    fn linear_signal(n: usize) -> SampledSeries<f64> {
        simulate(&SimSpec::new(
            SimKind::Deterministic(PathFn::Linear),
            1,
            0,
            Partition::uniform(n).unwrap(),
        ))
        .unwrap()
        .series
    }

    fn lin() -> BuiltinField {
        BuiltinField::new(FieldKind::Linear, 1)
    }

    #[test]
    fn constant_field_integrates_the_driver() {
        let s = series(&[0.0, 0.7, -0.2, 1.3]);
        let run = solve_leadlag_ode(
            &build_hoff(&s).unwrap(),
            &BuiltinField::new(FieldKind::Constant(1.0), 1),
            &[2.0],
        )
        .unwrap();
        assert_eq!(run.y[0], vec![2.0]);
        assert!((run.terminal()[0] - 2.0 - 1.3).abs() < 1e-15);
        assert_eq!(run.times.len(), run.y.len());
    }

    #[test]
    fn linear_field_on_linear_signal() {
        // the lead moves over [t_i*, t_{i+1}] with the lag frozen at X_i; the
        // first lead step sees a zero lag
        let n = 4;
        let s = linear_signal(n);
        let run = solve_leadlag_ode(&build_hoff(&s).unwrap(), &lin(), &[0.0]).unwrap();
        let x: Vec<f64> = s.rows().map(|r| r[0]).collect();
        let shifted: f64 = (0..n - 1).map(|i| x[i] * (x[i + 2] - x[i + 1])).sum();
        assert!((run.terminal()[0] - shifted).abs() < 1e-15);
        assert!((shifted - 0.1875).abs() < 1e-15);

        let run = solve_leadlag_ode(
            &build_hoff(&linear_signal(1 << 10)).unwrap(),
            &lin(),
            &[0.0],
        )
        .unwrap();
        assert!((run.terminal()[0] - 0.5).abs() < 1e-2);
    }

    #[test]
    fn brownian_solution_is_near_ito() {
        let grid = Partition::<f64>::uniform(1 << 12).unwrap();
        let seeds = 32;
        let (mut gap_ito, mut gap_strat) = (0.0, 0.0);
        for stream in 0..seeds {
            let s =
                simulate(&SimSpec::new(SimKind::Brownian, 1, 11, grid.clone()).with_stream(stream))
                    .unwrap()
                    .series;
            let b1 = s.last_value()[0];
            let y = solve_leadlag_ode(&build_hoff(&s).unwrap(), &lin(), &[0.0])
                .unwrap()
                .terminal()[0];
            gap_ito += (y - 0.5 * (b1 * b1 - 1.0)).abs();
            gap_strat += (y - 0.5 * b1 * b1).abs();
        }
        assert!(gap_ito / (seeds as f64) < 0.05);
        assert!((gap_strat / seeds as f64 - 0.5).abs() < 0.1);
    }

    #[test]
    fn reference_integrals() {
        let n = 1 << 14;
        let det = linear_signal(n);
        assert!((ito_integral(&det, &lin()).unwrap()[0] - 0.5).abs() < 1e-3);
        assert!((strat_integral(&det, &lin()).unwrap()[0] - 0.5).abs() < 1e-3);

        let grid = Partition::<f64>::uniform(n).unwrap();
        let seeds = 64;
        let (mut sq, mut corr) = (0.0, 0.0);
        for stream in 0..seeds {
            let s =
                simulate(&SimSpec::new(SimKind::Brownian, 1, 12, grid.clone()).with_stream(stream))
                    .unwrap()
                    .series;
            let b1 = s.last_value()[0];
            let ito = ito_integral(&s, &lin()).unwrap()[0];
            let strat = strat_integral(&s, &lin()).unwrap()[0];
            sq += (ito - 0.5 * (b1 * b1 - 1.0)).powi(2);
            corr += strat - ito;
        }
        assert!((sq / seeds as f64).sqrt() <= 3.0 / (n as f64).sqrt());
        assert!((corr / seeds as f64 - 0.5).abs() <= 0.05);
    }

    #[test]
    fn references_are_offset_by_y0() {
        let s = series(&[0.0, 1.0, 3.0]);
        let hoff = build_hoff(&s).unwrap();
        let run = solve_leadlag_ode(&hoff, &lin(), &[1.0])
            .unwrap()
            .with_references(&s, &lin())
            .unwrap();
        // left sums: 0·1 + 1·2; midpoint sums: ½·1 + 2·2
        assert_eq!(run.ito_ref, Some(vec![3.0]));
        assert_eq!(run.strat_ref, Some(vec![5.5]));
    }

    #[test]
    fn dimension_checks() {
        let s = series(&[0.0, 1.0]);
        let hoff = build_hoff(&s).unwrap();
        let f2 = BuiltinField::new(FieldKind::Sin, 2);
        assert!(matches!(
            solve_leadlag_ode(&hoff, &f2, &[0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(solve_leadlag_ode(&hoff, &lin(), &[0.0, 0.0]).is_err());
        assert!(solve_augmented(&hoff, &f2, &[0.0]).is_err());
        assert!(ito_integral(&s, &f2).is_err());
        assert!(solve_leadlag_ode_rk(&hoff, &lin(), &[0.0], 0).is_err());
    }

    #[test]
    fn field_strings() {
        assert_eq!("linear".parse::<FieldKind>().unwrap(), FieldKind::Linear);
        assert_eq!(
            "constant".parse::<FieldKind>().unwrap(),
            FieldKind::Constant(1.0)
        );
        assert_eq!(
            "constant:2.5".parse::<FieldKind>().unwrap(),
            FieldKind::Constant(2.5)
        );
        assert_eq!(
            "poly:1,0,2".parse::<FieldKind>().unwrap(),
            FieldKind::Polynomial(vec![1.0, 0.0, 2.0])
        );
        let t = "tanh-poly:0,1,-0.5".parse::<FieldKind>().unwrap();
        assert_eq!(t.to_string().parse::<FieldKind>().unwrap(), t);
        assert!((FieldKind::Polynomial(vec![1.0, 0.0, 2.0]).profile(3.0) - 19.0).abs() < 1e-15);
        for bad in ["", "cos", "poly", "poly:1,x", "linear:3", "tanh-poly:nan"] {
            assert!(bad.parse::<FieldKind>().is_err(), "{bad}");
        }
    }

    #[test]
    fn custom_field_couples_coordinates() {
        // f_1(x) = (x_2, 0), f_2(x) = (0, 1): Y^1 accumulates ∫ X^{b,2} dX^{f,1}
        let f = FnField::new(2, 2, |x: &[f64], out: &mut [f64]| {
            out.copy_from_slice(&[x[1], 0.0, 0.0, 1.0]);
        });
        let s = SampledSeries::new(
            Partition::uniform(2).unwrap(),
            vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![3.0, 1.0]],
        )
        .unwrap();
        let run = solve_leadlag_ode(&build_hoff(&s).unwrap(), &f, &[0.0, 0.0]).unwrap();
        // both lead steps happen while the lag is still at X_0 = 0
        assert_eq!(run.terminal(), &[0.0, 1.0]);
    }

    #[test]
    fn augmented_first_block_is_the_lag() {
        let spec = SimSpec::new(
            SimKind::Brownian,
            2,
            4,
            Partition::<f64>::uniform(9).unwrap(),
        );
        let s = simulate(&spec).unwrap().series;
        let hoff = build_hoff(&s).unwrap();
        let f = BuiltinField::new(FieldKind::Sin, 2);
        let z = solve_augmented(&hoff, &f, &[0.5, -1.0]).unwrap();
        let times = hoff.breakpoints();
        for (zk, &t) in z.iter().zip(&times) {
            let x = hoff.eval(t).unwrap();
            for i in 0..2 {
                assert!((zk[i] - x[i]).abs() < 1e-12);
            }
        }
        let zero = BuiltinField::new(FieldKind::Constant(0.0), 2);
        for zk in solve_augmented(&hoff, &zero, &[0.5, -1.0]).unwrap() {
            assert_eq!(rho(&zk, 2), vec![0.5, -1.0]);
        }
    }

    fn arb_case() -> impl Strategy<Value = (SampledSeries<f64>, FieldKind)> {
        let series = (1usize..=2, 1usize..=8).prop_flat_map(|(d, n)| {
            prop::collection::vec(prop::collection::vec(-2.0..2.0f64, d), n).prop_map(move |rows| {
                let mut values = vec![vec![0.0; d]];
                values.extend(rows);
                SampledSeries::new(Partition::uniform(n).unwrap(), values).unwrap()
            })
        });
        let field = prop_oneof![
            Just(FieldKind::Linear),
            Just(FieldKind::Sin),
            prop::collection::vec(-1.0..1.0f64, 1..5).prop_map(FieldKind::Polynomial),
            prop::collection::vec(-1.0..1.0f64, 1..4).prop_map(FieldKind::TanhPolynomial),
        ];
        (series, field)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn exact_matches_rk4((s, kind) in arb_case(), y0 in -1.0..1.0f64) {
            let hoff = build_hoff(&s).unwrap();
            let f = BuiltinField::new(kind, s.dim());
            let y0 = vec![y0; s.dim()];
            let exact = solve_leadlag_ode(&hoff, &f, &y0).unwrap();
            let rk = solve_leadlag_ode_rk(&hoff, &f, &y0, 1).unwrap();
            for (a, b) in exact.y.iter().zip(&rk.y) {
                for (u, v) in a.iter().zip(b) {
                    prop_assert!((u - v).abs() <= 1e-10);
                }
            }
        }

        #[test]
        fn projection_of_augmented_is_the_solution((s, kind) in arb_case()) {
            let hoff = build_hoff(&s).unwrap();
            let f = BuiltinField::new(kind, s.dim());
            let y0 = vec![0.25; s.dim()];
            let y = solve_leadlag_ode(&hoff, &f, &y0).unwrap();
            let z = solve_augmented(&hoff, &f, &y0).unwrap();
            for (zk, yk) in z.iter().zip(&y.y) {
                for (u, v) in rho(zk, s.dim()).iter().zip(yk) {
                    prop_assert!((u - v).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn rk_agreement_examples() {
        let s = series(&[0.0, 0.3, -0.4, 1.1, 0.9]);
        let hoff = build_hoff(&s).unwrap();
        for (kind, tol) in [
            (FieldKind::Constant(1.5), 1e-14),
            (FieldKind::Linear, 1e-12),
            (FieldKind::Sin, 1e-12),
        ] {
            let f = BuiltinField::new(kind, 1);
            let a = solve_leadlag_ode(&hoff, &f, &[0.0]).unwrap();
            let b = solve_leadlag_ode_rk(&hoff, &f, &[0.0], 3).unwrap();
            assert!((a.terminal()[0] - b.terminal()[0]).abs() <= tol);
        }
    }
}
