//! The Hoff (lead-lag) path of a sampled series.
//!
//! For samples `X_0 = 0, X_1, …, X_n` at `t_0 < … < t_n` and midpoints
//! `t_i* = ½(t_i + t_{i+1})`, the path lives in `ℝ^{2d}` as `(lag; lead)`:
//!
//! ```text
//! [0, t_0*)            (0; 0 → X_1)
//! [t_i*, t_{i+1})      (X_i; X_{i+1} → X_{i+2})        i = 0..n-2
//! [t_i, t_i*)          (X_{i-1} → X_i; X_{i+1})        i = 1..n-1
//! [t_{n-1}*, t_n]      (X_{n-1} → X_n; X_n)
//! ```
//!
//! so every sampling interval contributes two axis-directed segments and only one
//! of the two blocks moves at a time. Intervals are closed on the left; the very
//! last one is closed on both sides.

use crate::csvfmt::write_row;
use crate::error::{Error, Result};
use crate::roughlift::LinearSegment;
use crate::scalar::Scalar;
use crate::timeseries::SampledSeries;

/// Which coordinate block of the Hoff path a segment moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mover {
    Lag,
    Lead,
    /// Degenerate segment: both blocks stand still.
    Neither,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoffPath<T> {
    dim: usize,
    segments: Vec<LinearSegment<T>>,
    midpoints: Vec<T>,
}

impl<T: Scalar> HoffPath<T> {
    /// Dimension `d` of the underlying signal; the path itself is `2d`-dimensional.
    pub fn signal_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        2 * self.dim
    }

    pub fn segments(&self) -> &[LinearSegment<T>] {
        &self.segments
    }

    /// The midpoints `t_i*`.
    pub fn midpoints(&self) -> &[T] {
        &self.midpoints
    }

    /// Segment breakpoints: `t_0, t_0*, t_1, t_1*, …, t_n`.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut t: Vec<T> = self.segments.iter().map(|s| s.t_start).collect();
        t.push(self.segments[self.segments.len() - 1].t_end);
        t
    }

    /// Block moved by segment `k`.
    pub fn mover(&self, k: usize) -> Mover {
        let s = &self.segments[k];
        let d = self.dim;
        let moves = |r: std::ops::Range<usize>| r.into_iter().any(|c| s.start[c] != s.end[c]);
        match (moves(0..d), moves(d..2 * d)) {
            (false, false) => Mover::Neither,
            (true, false) => Mover::Lag,
            (false, true) => Mover::Lead,
            (true, true) => unreachable!("Hoff segments are axis-directed"),
        }
    }

    /// Value at time `u ∈ [0, 1]`.
    pub fn eval(&self, u: T) -> Result<Vec<T>> {
        if !(u >= T::zero() && u <= T::one()) {
            return Err(Error::invalid(format!(
                "evaluation time {u} outside [0, 1]"
            )));
        }
        let k = self
            .segments
            .partition_point(|s| s.t_start <= u)
            .saturating_sub(1);
        Ok(self.segments[k].value_at(u))
    }

    /// Lag component `X^{D,b}` as a `d`-dimensional piecewise-linear path.
    pub fn lag(&self) -> Vec<LinearSegment<T>> {
        self.project(0)
    }

    /// Lead component `X^{D,f}`.
    pub fn lead(&self) -> Vec<LinearSegment<T>> {
        self.project(self.dim)
    }

    fn project(&self, offset: usize) -> Vec<LinearSegment<T>> {
        let d = self.dim;
        self.segments
            .iter()
            .map(|s| LinearSegment {
                t_start: s.t_start,
                t_end: s.t_end,
                start: s.start[offset..offset + d].to_vec(),
                end: s.end[offset..offset + d].to_vec(),
            })
            .collect()
    }

    /// CSV `t,b1..bd,f1..fd` sampled at `grid`, or at the breakpoints when `None`.
    pub fn to_csv_string(&self, grid: Option<&[T]>) -> Result<String> {
        let mut out = String::from("t");
        for k in 1..=self.dim {
            out.push_str(&format!(",b{k}"));
        }
        for k in 1..=self.dim {
            out.push_str(&format!(",f{k}"));
        }
        out.push('\n');
        let times = match grid {
            Some(g) => g.to_vec(),
            None => self.breakpoints(),
        };
        for t in times {
            let v = self.eval(t)?;
            write_row(&mut out, std::iter::once(t).chain(v));
        }
        Ok(out)
    }
}

/// Builds the Hoff path of `series`: exactly `2n` segments for `n` intervals,
/// degenerate ones included.
pub fn build_hoff<T: Scalar>(series: &SampledSeries<T>) -> Result<HoffPath<T>> {
    let n = series.len() - 1;
    if n == 0 {
        return Err(Error::invalid(
            "the Hoff path needs at least one sampling interval",
        ));
    }
    let d = series.dim();
    let t = series.times();
    let x = |i: usize| series.value(i);
    let zero = vec![T::zero(); d];
    let half = T::half();
    let midpoints: Vec<T> = t.windows(2).map(|w| half * (w[0] + w[1])).collect();
    let point = |lag: &[T], lead: &[T]| -> Vec<T> { lag.iter().chain(lead).copied().collect() };
    let seg = |t_start: T, t_end: T, start: Vec<T>, end: Vec<T>| LinearSegment {
        t_start,
        t_end,
        start,
        end,
    };

    let mut segments = Vec::with_capacity(2 * n);
    segments.push(seg(
        t[0],
        midpoints[0],
        point(&zero, &zero),
        point(&zero, x(1)),
    ));
    if n == 1 {
        segments.push(seg(
            midpoints[0],
            t[1],
            point(x(0), x(1)),
            point(x(1), x(1)),
        ));
    } else {
        for i in 0..(n - 1) {
            segments.push(seg(
                midpoints[i],
                t[i + 1],
                point(x(i), x(i + 1)),
                point(x(i), x(i + 2)),
            ));
            let j = i + 1;
            if j < n - 1 {
                segments.push(seg(
                    t[j],
                    midpoints[j],
                    point(x(j - 1), x(j + 1)),
                    point(x(j), x(j + 1)),
                ));
            }
        }
        segments.push(seg(
            t[n - 1],
            midpoints[n - 1],
            point(x(n - 2), x(n)),
            point(x(n - 1), x(n)),
        ));
        segments.push(seg(
            midpoints[n - 1],
            t[n],
            point(x(n - 1), x(n)),
            point(x(n), x(n)),
        ));
    }
    debug_assert_eq!(segments.len(), 2 * n);
    Ok(HoffPath {
        dim: d,
        segments,
        midpoints,
    })
}

pub fn eval_hoff<T: Scalar>(path: &HoffPath<T>, u: T) -> Result<Vec<T>> {
    path.eval(u)
}

pub fn lag_of<T: Scalar>(path: &HoffPath<T>) -> Vec<LinearSegment<T>> {
    path.lag()
}

pub fn lead_of<T: Scalar>(path: &HoffPath<T>) -> Vec<LinearSegment<T>> {
    path.lead()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::Partition;

    fn series(times: &[f64], xs: &[f64]) -> SampledSeries<f64> {
        SampledSeries::new(
            Partition::new(times.to_vec()).unwrap(),
            xs.iter().map(|&v| vec![v]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn three_point_evaluations() {
        let h = build_hoff(&series(&[0.0, 0.5, 1.0], &[0.0, 1.0, 3.0])).unwrap();
        let cases = [
            (0.125, [0.0, 0.5]),
            (0.375, [0.0, 2.0]),
            (0.625, [0.5, 3.0]),
            (1.0, [3.0, 3.0]),
        ];
        for (u, want) in cases {
            let got = h.eval(u).unwrap();
            assert!(
                (got[0] - want[0]).abs() <= 1e-14 && (got[1] - want[1]).abs() <= 1e-14,
                "u={u}: {got:?}"
            );
        }
        assert_eq!(h.eval(0.0).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn single_interval_shape() {
        let h = build_hoff(&series(&[0.0, 1.0], &[0.0, 1.0])).unwrap();
        let s = h.segments();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].t_start, s[0].t_end), (0.0, 0.5));
        assert_eq!(
            (s[0].start.as_slice(), s[0].end.as_slice()),
            (&[0.0, 0.0][..], &[0.0, 1.0][..])
        );
        assert_eq!((s[1].t_start, s[1].t_end), (0.5, 1.0));
        assert_eq!(
            (s[1].start.as_slice(), s[1].end.as_slice()),
            (&[0.0, 1.0][..], &[1.0, 1.0][..])
        );
        assert_eq!(h.mover(0), Mover::Lead);
        assert_eq!(h.mover(1), Mover::Lag);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let h = build_hoff(&series(&[0.0, 0.25, 0.5, 1.0], &[0.0; 4])).unwrap();
        assert_eq!(h.segments().len(), 6);
        for (k, s) in h.segments().iter().enumerate() {
            assert!(s.start.iter().chain(&s.end).all(|&v| v == 0.0));
            assert_eq!(h.mover(k), Mover::Neither);
        }
    }

    /// Segment lists for n = 2 and n = 3 written out by hand.
    #[test]
    fn small_segment_lists() {
        let h = build_hoff(&series(&[0.0, 0.5, 1.0], &[0.0, 1.0, 3.0])).unwrap();
        let got: Vec<_> = h
            .segments()
            .iter()
            .map(|s| (s.t_start, s.t_end, s.start.clone(), s.end.clone()))
            .collect();
        let want = vec![
            (0.0, 0.25, vec![0.0, 0.0], vec![0.0, 1.0]),
            (0.25, 0.5, vec![0.0, 1.0], vec![0.0, 3.0]),
            (0.5, 0.75, vec![0.0, 3.0], vec![1.0, 3.0]),
            (0.75, 1.0, vec![1.0, 3.0], vec![3.0, 3.0]),
        ];
        assert_eq!(got, want);

        let h = build_hoff(&series(&[0.0, 0.25, 0.5, 1.0], &[0.0, 1.0, 3.0, 2.0])).unwrap();
        let got: Vec<_> = h
            .segments()
            .iter()
            .map(|s| (s.t_start, s.t_end, s.start.clone(), s.end.clone()))
            .collect();
        let want = vec![
            (0.0, 0.125, vec![0.0, 0.0], vec![0.0, 1.0]),
            (0.125, 0.25, vec![0.0, 1.0], vec![0.0, 3.0]),
            (0.25, 0.375, vec![0.0, 3.0], vec![1.0, 3.0]),
            (0.375, 0.5, vec![1.0, 3.0], vec![1.0, 2.0]),
            (0.5, 0.75, vec![1.0, 2.0], vec![3.0, 2.0]),
            (0.75, 1.0, vec![3.0, 2.0], vec![2.0, 2.0]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn lag_and_lead_visit_the_samples() {
        let h = build_hoff(&series(&[0.0, 0.5, 1.0], &[0.0, 1.0, 3.0])).unwrap();
        let visits = |segs: Vec<LinearSegment<f64>>| {
            let mut v = vec![segs[0].start[0]];
            for s in segs {
                if s.end[0] != *v.last().unwrap() {
                    v.push(s.end[0]);
                }
            }
            v
        };
        let lag = h.lag();
        let lead = h.lead();
        assert_eq!(lag.last().unwrap().end, vec![3.0]);
        assert!(lead[0].end[0] > lead[0].start[0]);
        assert_eq!(visits(lag.clone()), vec![0.0, 1.0, 3.0]);
        assert_eq!(visits(lead.clone()), vec![0.0, 1.0, 3.0]);
        // the lead reaches 3 at t = ½, the lag only at t = 1
        let first_time = |segs: &[LinearSegment<f64>], v: f64| {
            segs.iter().find(|s| s.end[0] == v).unwrap().t_end
        };
        assert!(first_time(&lead, 3.0) < first_time(&lag, 3.0));
    }

    #[test]
    fn eval_rejects_outside_unit_interval() {
        let h = build_hoff(&series(&[0.0, 1.0], &[0.0, 1.0])).unwrap();
        assert!(h.eval(-0.1).is_err());
        assert!(h.eval(1.5).is_err());
        assert!(h.eval(f64::NAN).is_err());
    }

    #[test]
    fn csv_has_lag_and_lead_columns() {
        let h = build_hoff(&series(&[0.0, 1.0], &[0.0, 1.0])).unwrap();
        let csv = h.to_csv_string(None).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,b1,f1");
        assert_eq!(lines.len(), 4);
        let grid = [0.0, 0.25, 1.0];
        assert_eq!(h.to_csv_string(Some(&grid)).unwrap().lines().count(), 4);
    }
}
