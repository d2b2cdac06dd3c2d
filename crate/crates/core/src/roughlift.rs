//! Exact level-2 lifts of piecewise-linear paths, the limit rough path of the
//! Hoff lifts, and `p`-variation / Hölder functionals on group-valued skeletons.
//!
//! A straight segment has zero Lévy area, so the lift of a piecewise-linear path
//! is the Chen product of `exp₂` of its increments and carries no quadrature
//! error. Paths are represented by [`GroupPathSkeleton`]s: absolute values
//! `𝐗_{0,t}` on a finite time grid, increments being `𝐗_{0,s}⁻¹ 𝐗_{0,t}`.

use std::cmp::Ordering;

use crate::csvfmt::{parse_table, write_row};
use crate::error::{check_dim, Error, Result};
use crate::leadlag::build_hoff;
use crate::scalar::Scalar;
use crate::tensor_group::Level2Group;
use crate::timeseries::{KnownBracket, SampledSeries};

/// Affine piece of a path on `[t_start, t_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSegment<T> {
    pub t_start: T,
    pub t_end: T,
    pub start: Vec<T>,
    pub end: Vec<T>,
}

impl<T: Scalar> LinearSegment<T> {
    pub fn dim(&self) -> usize {
        self.start.len()
    }

    pub fn displacement(&self) -> Vec<T> {
        self.end
            .iter()
            .zip(&self.start)
            .map(|(&b, &a)| b - a)
            .collect()
    }

    /// Linear interpolation, returning the stored endpoints exactly at the ends.
    pub fn value_at(&self, u: T) -> Vec<T> {
        if u <= self.t_start {
            return self.start.clone();
        }
        if u >= self.t_end {
            return self.end.clone();
        }
        let w = (u - self.t_start) / (self.t_end - self.t_start);
        self.start
            .iter()
            .zip(&self.end)
            .map(|(&a, &b)| a + w * (b - a))
            .collect()
    }
}

/// Standard piecewise-linear interpolation of a series.
pub fn piecewise_linear<T: Scalar>(series: &SampledSeries<T>) -> Vec<LinearSegment<T>> {
    let t = series.times();
    (0..series.len() - 1)
        .map(|k| LinearSegment {
            t_start: t[k],
            t_end: t[k + 1],
            start: series.value(k).to_vec(),
            end: series.value(k + 1).to_vec(),
        })
        .collect()
}

/// Group-valued path `t ↦ 𝐗_{0,t}` sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPathSkeleton<T> {
    dim: usize,
    times: Vec<T>,
    elements: Vec<Level2Group<T>>,
}

impl<T: Scalar> GroupPathSkeleton<T> {
    pub fn new(times: Vec<T>, elements: Vec<Level2Group<T>>) -> Result<Self> {
        check_dim(times.len(), elements.len())?;
        if times.is_empty() {
            return Err(Error::invalid("a skeleton needs at least one time"));
        }
        check_strictly_increasing(&times)?;
        let dim = elements[0].dim();
        for g in &elements {
            check_dim(dim, g.dim())?;
        }
        Ok(GroupPathSkeleton {
            dim,
            times,
            elements,
        })
    }

    /// Constant path at the identity.
    pub fn identity(times: Vec<T>, dim: usize) -> Result<Self> {
        let elements = vec![Level2Group::identity(dim); times.len()];
        Self::new(times, elements)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn elements(&self) -> &[Level2Group<T>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Level2Group<T> {
        &self.elements[i]
    }

    /// `𝐗_{t_i, t_j} = 𝐗_{0,t_i}⁻¹ 𝐗_{0,t_j}`.
    pub fn increment(&self, i: usize, j: usize) -> Level2Group<T> {
        self.elements[i].inv().mul_unchecked(&self.elements[j])
    }

    /// Increment over the whole grid.
    pub fn total(&self) -> Level2Group<T> {
        self.increment(0, self.len() - 1)
    }

    /// Sub-skeleton at `times`, each of which must be (up to last-bit rounding) a
    /// time of this skeleton.
    pub fn restrict_to(&self, times: &[T]) -> Result<Self> {
        check_strictly_increasing(times)?;
        let tol = T::epsilon() * T::lit(16.0);
        let mut elements = Vec::with_capacity(times.len());
        let mut cursor = 0;
        for &t in times {
            while cursor < self.times.len() && self.times[cursor] < t - tol {
                cursor += 1;
            }
            if cursor == self.times.len() || (self.times[cursor] - t).abs() > tol {
                return Err(Error::invalid(format!(
                    "time {t} is not on the skeleton grid"
                )));
            }
            elements.push(self.elements[cursor].clone());
        }
        Ok(GroupPathSkeleton {
            dim: self.dim,
            times: times.to_vec(),
            elements,
        })
    }

    /// Column header of the skeleton CSV: `t,x1..xm,a_i_j` for `i < j`.
    pub fn csv_header(dim: usize) -> String {
        let mut h = String::from("t");
        for k in 1..=dim {
            h.push_str(&format!(",x{k}"));
        }
        for i in 1..=dim {
            for j in (i + 1)..=dim {
                h.push_str(&format!(",a_{i}_{j}"));
            }
        }
        h
    }

    pub fn to_csv_string(&self) -> String {
        let m = self.dim;
        let mut out = Self::csv_header(m);
        out.push('\n');
        for (t, g) in self.times.iter().zip(&self.elements) {
            let upper = (0..m)
                .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
                .map(|(i, j)| g.area_at(i, j));
            write_row(
                &mut out,
                std::iter::once(*t)
                    .chain(g.increment().iter().copied())
                    .chain(upper),
            );
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let table = parse_table::<T>(text)?;
        let cols = table.header.len();
        // 1 + m + m(m-1)/2 columns
        let m = (1..=64)
            .find(|&m| 1 + m + m * (m - 1) / 2 == cols)
            .ok_or(Error::Parse {
                line: 1,
                message: format!("{cols} columns do not match any skeleton dimension"),
            })?;
        if table.header.join(",") != Self::csv_header(m) {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header {}", Self::csv_header(m)),
            });
        }
        let mut times = Vec::with_capacity(table.rows.len());
        let mut elements = Vec::with_capacity(table.rows.len());
        for (line, row) in table.rows {
            times.push(row[0]);
            let mut area = vec![T::zero(); m * m];
            let mut c = 1 + m;
            for i in 0..m {
                for j in (i + 1)..m {
                    area[i * m + j] = row[c];
                    area[j * m + i] = -row[c];
                    c += 1;
                }
            }
            let g = Level2Group::new(row[1..=m].to_vec(), area).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            elements.push(g);
        }
        Self::new(times, elements).map_err(|e| Error::Parse {
            line: 2,
            message: e.to_string(),
        })
    }
}

fn check_strictly_increasing<T: Scalar>(times: &[T]) -> Result<()> {
    if let Some(k) = times
        .windows(2)
        .position(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
    {
        return Err(Error::invalid(format!(
            "grid is not strictly increasing at index {}",
            k + 1
        )));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("grid times must be finite"));
    }
    Ok(())
}

/// Exact level-2 lift of a piecewise-linear path, sampled at `grid`.
///
/// `grid` must be strictly increasing and lie within the time span of the
/// segments; points may fall on breakpoints or inside segments. Elements are
/// absolute values measured from the path start.
pub fn lift_piecewise_linear<T: Scalar>(
    segments: &[LinearSegment<T>],
    grid: &[T],
) -> Result<GroupPathSkeleton<T>> {
    let first = segments
        .first()
        .ok_or_else(|| Error::invalid("cannot lift an empty path"))?;
    let m = first.dim();
    for s in segments {
        check_dim(m, s.start.len())?;
        check_dim(m, s.end.len())?;
    }
    check_strictly_increasing(grid)?;
    let t_lo = first.t_start;
    let t_hi = segments[segments.len() - 1].t_end;
    if let (Some(&g0), Some(&g1)) = (grid.first(), grid.last()) {
        if g0 < t_lo || g1 > t_hi {
            return Err(Error::invalid("grid extends beyond the path"));
        }
    }

    let mut elements = Vec::with_capacity(grid.len());
    let mut acc = Level2Group::identity(m);
    let mut seg = 0;
    for &u in grid {
        // absorb every segment that ends at or before u
        while seg < segments.len() && segments[seg].t_end <= u {
            acc = acc.mul_unchecked(&Level2Group::from_increment(segments[seg].displacement()));
            seg += 1;
        }
        if seg < segments.len() && u > segments[seg].t_start {
            let s = &segments[seg];
            let partial: Vec<T> = s
                .value_at(u)
                .iter()
                .zip(&s.start)
                .map(|(&v, &a)| v - a)
                .collect();
            elements.push(acc.mul_unchecked(&Level2Group::from_increment(partial)));
        } else {
            elements.push(acc.clone());
        }
    }
    Ok(GroupPathSkeleton {
        dim: m,
        times: grid.to_vec(),
        elements,
    })
}

/// Lift of the Hoff path of `series` on its breakpoints `t_0, t_0*, t_1, …, t_n`.
pub fn hoff_lift<T: Scalar>(series: &SampledSeries<T>) -> Result<GroupPathSkeleton<T>> {
    let hoff = build_hoff(series)?;
    lift_piecewise_linear(hoff.segments(), &hoff.breakpoints())
}

/// Per-interval realised brackets `Σ ΔX ΔXᵀ`, one row-major `d×d` matrix for
/// each interval of the series.
pub fn realized_qv<T: Scalar>(series: &SampledSeries<T>) -> Vec<Vec<T>> {
    let d = series.dim();
    (0..series.len() - 1)
        .map(|k| {
            let a = series.value(k);
            let b = series.value(k + 1);
            let dx: Vec<T> = b.iter().zip(a).map(|(&y, &x)| y - x).collect();
            let mut q = vec![T::zero(); d * d];
            for i in 0..d {
                for j in 0..d {
                    q[i * d + j] = dx[i] * dx[j];
                }
            }
            q
        })
        .collect()
}

/// Realised bracket `⟨X⟩_{0,1}`.
pub fn realized_qv_total<T: Scalar>(series: &SampledSeries<T>) -> Vec<T> {
    let d = series.dim();
    realized_qv(series)
        .into_iter()
        .fold(vec![T::zero(); d * d], |mut acc, q| {
            acc.iter_mut().zip(q).for_each(|(a, v)| *a += v);
            acc
        })
}

/// Source of the bracket `⟨X⟩` entering the limit rough path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QvMode {
    /// Closed-form bracket of a simulated signal.
    Analytic,
    /// Realised bracket on the fine grid.
    Realized,
}

/// Per-interval ingredients of the limit rough path `𝐗^∞` on a grid.
#[derive(Debug, Clone)]
pub struct LimitSpec<T> {
    pub dim: usize,
    pub times: Vec<T>,
    /// `X_{s,t}` per grid interval.
    pub increments: Vec<Vec<T>>,
    /// Lévy area `A^X_{s,t}` of the fine piecewise-linear interpolation.
    pub areas: Vec<Vec<T>>,
    /// `⟨X⟩_{s,t}`, symmetric positive semidefinite.
    pub brackets: Vec<Vec<T>>,
}

impl<T: Scalar> LimitSpec<T> {
    /// Absolute values `𝐗^∞_{0,t}` where each interval contributes
    /// `exp₂((X, X) + [[A, A − ½⟨X⟩], [A + ½⟨X⟩, A]])`.
    pub fn to_skeleton(&self) -> GroupPathSkeleton<T> {
        let d = self.dim;
        let m = 2 * d;
        let half = T::half();
        let mut acc = Level2Group::identity(m);
        let mut elements = Vec::with_capacity(self.times.len());
        elements.push(acc.clone());
        for k in 0..self.increments.len() {
            let x = &self.increments[k];
            let a = &self.areas[k];
            let q = &self.brackets[k];
            let inc: Vec<T> = x.iter().chain(x.iter()).copied().collect();
            let mut area = vec![T::zero(); m * m];
            for i in 0..d {
                for j in 0..d {
                    let aij = a[i * d + j];
                    let qij = q[i * d + j];
                    area[i * m + j] = aij;
                    area[(d + i) * m + (d + j)] = aij;
                    area[i * m + (d + j)] = aij - half * qij;
                    area[(d + i) * m + j] = aij + half * qij;
                }
            }
            let step = Level2Group::new(inc, area).expect("limit area block is antisymmetric");
            acc = acc.mul_unchecked(&step);
            elements.push(acc.clone());
        }
        GroupPathSkeleton {
            dim: m,
            times: self.times.clone(),
            elements,
        }
    }
}

/// Ingredients of `𝐗^∞` on the sub-grid `grid` of the fine series.
pub fn limit_spec<T: Scalar>(
    series: &SampledSeries<T>,
    grid: &[T],
    mode: QvMode,
    bracket: Option<&KnownBracket<T>>,
) -> Result<LimitSpec<T>> {
    let d = series.dim();
    let known = match mode {
        QvMode::Analytic => Some(bracket.ok_or_else(|| {
            Error::invalid("analytic bracket requested for data without a known bracket")
        })?),
        QvMode::Realized => None,
    };
    check_strictly_increasing(grid)?;
    let idx: Vec<usize> =
        grid.iter()
            .map(|&t| {
                series.partition().index_of(t).ok_or_else(|| {
                    Error::invalid(format!("grid time {t} is not a fine-grid point"))
                })
            })
            .collect::<Result<_>>()?;
    let half = T::half();
    let mut increments = Vec::new();
    let mut areas = Vec::new();
    let mut brackets = Vec::new();
    for w in idx.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let base = series.value(lo);
        let mut area = vec![T::zero(); d * d];
        let mut q = vec![T::zero(); d * d];
        for k in lo..hi {
            let a = series.value(k);
            let b = series.value(k + 1);
            for i in 0..d {
                let xi = a[i] - base[i];
                let dxi = b[i] - a[i];
                for j in 0..d {
                    let xj = a[j] - base[j];
                    let dxj = b[j] - a[j];
                    area[i * d + j] += half * (xi * dxj - xj * dxi);
                    q[i * d + j] += dxi * dxj;
                }
            }
        }
        if let Some(kb) = known {
            q = kb.over(series.times()[lo], series.times()[hi], d);
        }
        increments.push(
            series
                .value(hi)
                .iter()
                .zip(base)
                .map(|(&b, &a)| b - a)
                .collect(),
        );
        areas.push(area);
        brackets.push(q);
    }
    Ok(LimitSpec {
        dim: d,
        times: grid.to_vec(),
        increments,
        areas,
        brackets,
    })
}

/// The limit rough path `𝐗^∞` on the full fine grid of `series`.
pub fn build_limit<T: Scalar>(
    series: &SampledSeries<T>,
    mode: QvMode,
    bracket: Option<&KnownBracket<T>>,
) -> Result<GroupPathSkeleton<T>> {
    Ok(limit_spec(series, series.times(), mode, bracket)?.to_skeleton())
}

/// `𝐗^∞` restricted to `grid` (which must consist of fine-grid points).
pub fn build_limit_on<T: Scalar>(
    series: &SampledSeries<T>,
    grid: &[T],
    mode: QvMode,
    bracket: Option<&KnownBracket<T>>,
) -> Result<GroupPathSkeleton<T>> {
    Ok(limit_spec(series, grid, mode, bracket)?.to_skeleton())
}

fn check_p<T: Scalar>(p: T) -> Result<()> {
    if p.partial_cmp(&T::one()) != Some(Ordering::Greater) || !p.is_finite() {
        return Err(Error::invalid(format!(
            "p-variation exponent must exceed 1, got {p}"
        )));
    }
    Ok(())
}

fn check_same_grid<T: Scalar>(a: &GroupPathSkeleton<T>, b: &GroupPathSkeleton<T>) -> Result<()> {
    check_dim(a.dim, b.dim)?;
    if a.times != b.times {
        return Err(Error::invalid("skeletons must share the same time grid"));
    }
    Ok(())
}

struct Node {
    lo: usize,
    hi: usize,
    center: usize,
    radius: f64,
    children: Option<(usize, usize)>,
}

const LEAF: usize = 8;

fn build_tree<T: Scalar>(
    g: &[Level2Group<T>],
    lo: usize,
    hi: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let center = (lo + hi) / 2;
    let radius = (lo..=hi)
        .map(|i| g[center].dist_unchecked(&g[i]).as_f64())
        .fold(0.0, f64::max);
    let id = nodes.len();
    nodes.push(Node {
        lo,
        hi,
        center,
        radius,
        children: None,
    });
    if hi - lo + 1 > LEAF {
        let l = build_tree(g, lo, center, nodes);
        let r = build_tree(g, center + 1, hi, nodes);
        nodes[id].children = Some((l, r));
    }
    id
}

/// `‖𝐗‖_{p-var}` over partitions made of skeleton times.
///
/// Exact dynamic programme `best[j] = max_{i<j} best[i] + d(g_i, g_j)^p`. Since
/// `d` is a metric and `best` is nondecreasing, blocks of candidate `i` are
/// discarded with the bound `best[hi] + (d(c, g_j) + r)^p` from a ball of radius
/// `r` around a centre `c`.
pub fn pvar_norm<T: Scalar>(skel: &GroupPathSkeleton<T>, p: T) -> Result<T> {
    check_p(p)?;
    let k = skel.len();
    if k < 2 {
        return Ok(T::zero());
    }
    let g = &skel.elements;
    let pf = p.as_f64();
    let mut nodes = Vec::new();
    let root = build_tree(g, 0, k - 1, &mut nodes);
    let mut best = vec![0.0f64; k];
    let mut stack = Vec::new();
    for j in 1..k {
        let mut cur = best[j - 1] + g[j - 1].dist_unchecked(&g[j]).as_f64().powf(pf);
        stack.clear();
        stack.push(root);
        while let Some(id) = stack.pop() {
            let node = &nodes[id];
            if node.lo >= j {
                continue;
            }
            let top = node.hi.min(j - 1);
            let reach = g[node.center].dist_unchecked(&g[j]).as_f64() + node.radius;
            if best[top] + reach.powf(pf) <= cur * (1.0 - 1e-13) {
                continue;
            }
            match node.children {
                Some((l, r)) => {
                    stack.push(l);
                    stack.push(r);
                }
                None => {
                    for i in node.lo..=top {
                        let v = best[i] + g[i].dist_unchecked(&g[j]).as_f64().powf(pf);
                        if v > cur {
                            cur = v;
                        }
                    }
                }
            }
        }
        best[j] = cur;
    }
    Ok(T::lit(best[k - 1].powf(1.0 / pf)))
}

/// `d_{p-var}(𝐚, 𝐛)` over partitions made of the (shared) skeleton times.
///
/// Between two different paths this is a lower bound for the supremum over all
/// partitions of `[0, 1]`.
pub fn pvar_dist<T: Scalar>(a: &GroupPathSkeleton<T>, b: &GroupPathSkeleton<T>, p: T) -> Result<T> {
    check_p(p)?;
    check_same_grid(a, b)?;
    let k = a.len();
    if k < 2 {
        return Ok(T::zero());
    }
    let a_inv: Vec<Level2Group<T>> = a.elements.iter().map(Level2Group::inv).collect();
    let b_inv: Vec<Level2Group<T>> = b.elements.iter().map(Level2Group::inv).collect();
    let pf = p.as_f64();
    let mut best = vec![0.0f64; k];
    for j in 1..k {
        let mut cur = 0.0f64;
        for i in 0..j {
            let ia = a_inv[i].mul_unchecked(&a.elements[j]);
            let ib = b_inv[i].mul_unchecked(&b.elements[j]);
            let v = best[i] + ia.dist_unchecked(&ib).as_f64().powf(pf);
            if v > cur {
                cur = v;
            }
        }
        best[j] = cur;
    }
    Ok(T::lit(best[k - 1].powf(1.0 / pf)))
}

/// `sup_{s<t} d(𝐚_{s,t}, 𝐛_{s,t})` over skeleton times.
pub fn d0_dist<T: Scalar>(a: &GroupPathSkeleton<T>, b: &GroupPathSkeleton<T>) -> Result<T> {
    check_same_grid(a, b)?;
    let mut sup = T::zero();
    for i in 0..a.len() {
        let (ai, bi) = (a.elements[i].inv(), b.elements[i].inv());
        for j in (i + 1)..a.len() {
            let d = ai
                .mul_unchecked(&a.elements[j])
                .dist_unchecked(&bi.mul_unchecked(&b.elements[j]));
            sup = sup.max(d);
        }
    }
    Ok(sup)
}

/// `sup_t d(𝐚_{0,t}, 𝐛_{0,t})` over skeleton times.
pub fn dinf_dist<T: Scalar>(a: &GroupPathSkeleton<T>, b: &GroupPathSkeleton<T>) -> Result<T> {
    check_same_grid(a, b)?;
    Ok(a.elements
        .iter()
        .zip(&b.elements)
        .fold(T::zero(), |acc, (x, y)| acc.max(x.dist_unchecked(y))))
}

/// `sup_{s<t} ‖𝐗_{s,t}‖ / |t − s|^α` over skeleton times.
///
/// Exact branch and bound over the same ball tree as [`pvar_norm`]: for a block
/// of later times with centre `c` and radius `r`, `d(g_i, g_j) ≤ d(g_i, g_c) + r`
/// while `t_j − t_i` is at least the gap to the first time of the block.
pub fn holder_norm<T: Scalar>(skel: &GroupPathSkeleton<T>, alpha: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::invalid(format!(
            "Hölder exponent must lie in (0, 1), got {alpha}"
        )));
    }
    let k = skel.len();
    if k < 2 {
        return Ok(T::zero());
    }
    let g = &skel.elements;
    let t: Vec<f64> = skel.times.iter().map(|v| v.as_f64()).collect();
    let a = alpha.as_f64();
    let mut best = (0..k - 1)
        .map(|i| g[i].dist_unchecked(&g[i + 1]).as_f64() / (t[i + 1] - t[i]).powf(a))
        .fold(0.0, f64::max);
    let mut nodes = Vec::new();
    let root = build_tree(g, 0, k - 1, &mut nodes);
    let slack = 1.0 + 1e-12;
    let mut stack = Vec::new();
    for i in 0..k - 1 {
        stack.clear();
        stack.push(root);
        while let Some(id) = stack.pop() {
            let node = &nodes[id];
            if node.hi <= i {
                continue;
            }
            if node.lo > i {
                let reach = g[i].dist_unchecked(&g[node.center]).as_f64() + node.radius;
                if reach / (t[node.lo] - t[i]).powf(a) * slack <= best {
                    continue;
                }
            }
            match node.children {
                Some((l, r)) => {
                    stack.push(r);
                    stack.push(l);
                }
                None => {
                    for j in node.lo.max(i + 1)..=node.hi {
                        let v = g[i].dist_unchecked(&g[j]).as_f64() / (t[j] - t[i]).powf(a);
                        if v > best {
                            best = v;
                        }
                    }
                }
            }
        }
    }
    Ok(T::lit(best))
}

/// `sup {‖𝐗_{s,t}‖ : s < t skeleton times, t − s ≤ δ}`; zero if no pair fits.
pub fn window_sup_norm<T: Scalar>(skel: &GroupPathSkeleton<T>, delta: T) -> T {
    let tol = T::epsilon() * T::lit(16.0);
    let mut sup = T::zero();
    for i in 0..skel.len() {
        for j in (i + 1)..skel.len() {
            if skel.times[j] - skel.times[i] > delta + tol {
                break;
            }
            sup = sup.max(skel.elements[i].dist_unchecked(&skel.elements[j]));
        }
    }
    sup
}

/// Inserts `refine − 1` equally spaced times inside every grid interval.
pub fn refine_grid<T: Scalar>(grid: &[T], refine: usize) -> Vec<T> {
    if refine <= 1 || grid.is_empty() {
        return grid.to_vec();
    }
    let r = T::from_usize(refine).expect("refine representable");
    let mut out = Vec::with_capacity((grid.len() - 1) * refine + 1);
    for w in grid.windows(2) {
        for k in 0..refine {
            let kk = T::from_usize(k).expect("k representable");
            out.push(w[0] + (w[1] - w[0]) * kk / r);
        }
    }
    out.push(grid[grid.len() - 1]);
    out
}
