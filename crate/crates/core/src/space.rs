//! Finite ε-nets of the ambient metric spaces.
//!
//! Every space is a uniform product grid. Axes are either bounded line
//! windows (closed `[lo, hi]`), periodic unit circles (`[0, 1)`), or integer
//! lattice windows. Coordinates are plain `f64`; the grid is never
//! materialized, point coordinates are recomputed from the flat index.
//!
//! A space may additionally carry a restriction (keep only / drop a finite
//! list of coordinates). Restrictions are stored by coordinate so they
//! survive refinement.

use std::fmt;
use std::ops::{Deref, DerefMut};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ambient dimension (products included).
pub const MAX_DIM: usize = 6;

/// Slack used for ball membership and window tests.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// Reduce to `[0, 1)`, snapping values within 1e-12 of an integer to 0.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if !(BOUNDARY_EPS..=1.0 - BOUNDARY_EPS).contains(&r) {
        0.0
    } else {
        r
    }
}

fn circle_gap(a: f64, b: f64) -> f64 {
    let w = (a - b).abs().rem_euclid(1.0);
    w.min(1.0 - w)
}

/// A point with inline storage; dereferences to its coordinate slice.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: u8,
}

impl Point {
    pub fn new(coords: &[f64]) -> Point {
        assert!(coords.len() <= MAX_DIM, "dimension {} exceeds MAX_DIM", coords.len());
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Point { coords: c, dim: coords.len() as u8 }
    }

    pub fn zeros(dim: usize) -> Point {
        assert!(dim <= MAX_DIM);
        Point { coords: [0.0; MAX_DIM], dim: dim as u8 }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.deref().to_vec()
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.coords[..self.dim as usize]
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Point {
        Point::new(v)
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.deref().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Point, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        if v.len() > MAX_DIM {
            return Err(serde::de::Error::custom("point dimension exceeds MAX_DIM"));
        }
        Ok(Point::new(&v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    EuclideanWindow,
    CircleMod1,
    TorusMod1(usize),
    IntegerLattice,
    /// Max of component distances, components laid out consecutively.
    ProductMax(Vec<MetricFn>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricFn {
    pub kind: MetricKind,
    pub dimension: usize,
}

impl MetricFn {
    pub fn new(kind: MetricKind, dimension: usize) -> Result<MetricFn> {
        if dimension == 0 || dimension > MAX_DIM {
            return Err(Error::InvalidParameter(format!("metric dimension {dimension}")));
        }
        let expected = match &kind {
            MetricKind::CircleMod1 => Some(1),
            MetricKind::TorusMod1(d) => Some(*d),
            MetricKind::ProductMax(parts) => Some(parts.iter().map(|m| m.dimension).sum()),
            _ => None,
        };
        if let Some(expected) = expected {
            if expected != dimension {
                return Err(Error::DimensionMismatch { expected, got: dimension });
            }
        }
        Ok(MetricFn { kind, dimension })
    }

    pub fn circle() -> MetricFn {
        MetricFn { kind: MetricKind::CircleMod1, dimension: 1 }
    }

    pub fn torus(d: usize) -> MetricFn {
        MetricFn { kind: MetricKind::TorusMod1(d), dimension: d }
    }

    pub fn euclidean(d: usize) -> MetricFn {
        MetricFn { kind: MetricKind::EuclideanWindow, dimension: d }
    }

    pub fn lattice(d: usize) -> MetricFn {
        MetricFn { kind: MetricKind::IntegerLattice, dimension: d }
    }

    pub fn product(a: MetricFn, b: MetricFn) -> MetricFn {
        let dimension = a.dimension + b.dimension;
        MetricFn { kind: MetricKind::ProductMax(vec![a, b]), dimension }
    }

    /// Checked distance.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        for len in [a.len(), b.len()] {
            if len != self.dimension {
                return Err(Error::DimensionMismatch { expected: self.dimension, got: len });
            }
        }
        Ok(self.dist(a, b))
    }

    /// Unchecked distance; callers guarantee matching dimensions.
    #[inline]
    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.kind {
            MetricKind::EuclideanWindow => {
                if a.len() == 1 {
                    (a[0] - b[0]).abs()
                } else {
                    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
                }
            }
            MetricKind::CircleMod1 => circle_gap(a[0], b[0]),
            MetricKind::TorusMod1(_) => {
                a.iter().zip(b).map(|(x, y)| circle_gap(*x, *y)).fold(0.0, f64::max)
            }
            MetricKind::IntegerLattice => {
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            }
            MetricKind::ProductMax(parts) => {
                let mut off = 0;
                let mut best = 0.0f64;
                for m in parts {
                    let r = off..off + m.dimension;
                    best = best.max(m.dist(&a[r.clone()], &b[r]));
                    off += m.dimension;
                }
                best
            }
        }
    }

    fn axis_kinds(&self, out: &mut Vec<AxisKind>) {
        match &self.kind {
            MetricKind::EuclideanWindow => out.extend((0..self.dimension).map(|_| AxisKind::Line)),
            MetricKind::CircleMod1 | MetricKind::TorusMod1(_) => {
                out.extend((0..self.dimension).map(|_| AxisKind::Periodic))
            }
            MetricKind::IntegerLattice => out.extend((0..self.dimension).map(|_| AxisKind::Lattice)),
            MetricKind::ProductMax(parts) => parts.iter().for_each(|m| m.axis_kinds(out)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisKind {
    Line,
    Periodic,
    Lattice,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub kind: AxisKind,
    pub lo: f64,
    pub step: f64,
    pub count: usize,
}

impl Axis {
    pub fn hi(&self) -> f64 {
        match self.kind {
            AxisKind::Periodic => 1.0,
            _ => self.lo + (self.count - 1) as f64 * self.step,
        }
    }

    fn coord(&self, k: usize) -> f64 {
        let x = self.lo + k as f64 * self.step;
        match self.kind {
            AxisKind::Lattice => x.round(),
            _ => {
                // keep exact zeros and integers exact
                let r = x.round();
                if (x - r).abs() < 1e-12 {
                    r
                } else {
                    x
                }
            }
        }
    }

    /// Inclusive index range covering `[x - r, x + r]`, possibly unwrapped
    /// (negative or past `count`) for periodic axes.
    fn index_span(&self, x: f64, r: f64) -> (i64, i64) {
        let a = ((x - r - self.lo) / self.step - 1e-9).ceil() as i64;
        let b = ((x + r - self.lo) / self.step + 1e-9).floor() as i64;
        match self.kind {
            AxisKind::Periodic => {
                if b - a + 1 >= self.count as i64 {
                    (0, self.count as i64 - 1)
                } else {
                    (a, b)
                }
            }
            _ => (a.max(0), b.min(self.count as i64 - 1)),
        }
    }

    fn nearest(&self, x: f64) -> Option<usize> {
        let k = ((x - self.lo) / self.step).round() as i64;
        match self.kind {
            AxisKind::Periodic => Some(k.rem_euclid(self.count as i64) as usize),
            _ if k < 0 || k >= self.count as i64 => None,
            _ => Some(k as usize),
        }
    }
}

/// Topology metadata, set by construction and consumed by theorem hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyFlags {
    pub compact: bool,
    pub locally_connected: bool,
    pub has_isolated_points: bool,
    pub countable_model: bool,
    pub uncountable_model: bool,
}

impl TopologyFlags {
    pub fn continuum() -> TopologyFlags {
        TopologyFlags {
            compact: true,
            locally_connected: true,
            has_isolated_points: false,
            countable_model: false,
            uncountable_model: true,
        }
    }

    pub fn discrete() -> TopologyFlags {
        TopologyFlags {
            compact: true,
            locally_connected: false,
            has_isolated_points: true,
            countable_model: true,
            uncountable_model: false,
        }
    }
}

#[derive(Clone, Debug)]
struct Restriction {
    keep: bool,
    coords: Arc<Vec<Point>>,
    indices: Arc<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct SampledSpace {
    axes: Vec<Axis>,
    metric: MetricFn,
    spacing: f64,
    flags: TopologyFlags,
    restriction: Option<Restriction>,
}

/// Serializable summary of a space for reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub metric: MetricFn,
    pub spacing: f64,
    pub points: usize,
    pub axes: Vec<Axis>,
    pub flags: TopologyFlags,
    pub restricted: bool,
}

/// Build a uniform grid.
///
/// Line and lattice windows are closed, so `[-5, 5]` at spacing 0.01 has
/// 1001 points. Periodic axes ignore `window` and use `[0, 1)` with
/// `ceil(1 / spacing)` points.
pub fn build_grid(window: &[(f64, f64)], spacing: f64, metric: MetricFn) -> Result<SampledSpace> {
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::InvalidSpacing { spacing, reason: "must be positive and finite".into() });
    }
    let mut kinds = Vec::new();
    if matches!(metric.kind, MetricKind::ProductMax(_)) {
        return Err(Error::InvalidParameter(
            "product spaces are built with SampledSpace::product".into(),
        ));
    }
    metric.axis_kinds(&mut kinds);
    let periodic = kinds.iter().all(|k| *k == AxisKind::Periodic);
    if !periodic && window.len() != metric.dimension {
        if window.is_empty() {
            return Err(Error::InvalidWindow("empty window".into()));
        }
        return Err(Error::DimensionMismatch { expected: metric.dimension, got: window.len() });
    }
    let mut axes = Vec::with_capacity(kinds.len());
    for (d, kind) in kinds.iter().enumerate() {
        let axis = match kind {
            AxisKind::Periodic => {
                if spacing > 1.0 {
                    return Err(Error::InvalidSpacing {
                        spacing,
                        reason: "larger than the unit circle".into(),
                    });
                }
                let count = (1.0 / spacing - 1e-9).ceil().max(1.0) as usize;
                Axis { kind: *kind, lo: 0.0, step: 1.0 / count as f64, count }
            }
            AxisKind::Line | AxisKind::Lattice => {
                let (lo, hi) = window[d];
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::InvalidWindow(format!("non-finite bounds [{lo}, {hi}]")));
                }
                if hi <= lo {
                    return Err(Error::InvalidWindow(format!("empty interval [{lo}, {hi}]")));
                }
                if spacing > hi - lo {
                    return Err(Error::InvalidSpacing {
                        spacing,
                        reason: format!("larger than window extent {}", hi - lo),
                    });
                }
                if *kind == AxisKind::Lattice
                    && (spacing.fract() != 0.0 || lo.fract() != 0.0)
                {
                    return Err(Error::InvalidSpacing {
                        spacing,
                        reason: "lattice windows need integer bounds and spacing".into(),
                    });
                }
                let count = ((hi - lo) / spacing + 1e-9).floor() as usize + 1;
                Axis { kind: *kind, lo, step: spacing, count }
            }
        };
        axes.push(axis);
    }
    let flags = if kinds.contains(&AxisKind::Lattice) {
        TopologyFlags::discrete()
    } else {
        TopologyFlags::continuum()
    };
    let spacing = axes.iter().map(|a| a.step).fold(0.0, f64::max);
    Ok(SampledSpace { axes, metric, spacing, flags, restriction: None })
}

impl SampledSpace {
    pub fn metric(&self) -> &MetricFn {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.dimension
    }

    /// Grid step (largest over axes).
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn flags(&self) -> TopologyFlags {
        self.flags
    }

    pub fn with_flags(mut self, flags: TopologyFlags) -> SampledSpace {
        self.flags = flags;
        self
    }

    pub fn is_restricted(&self) -> bool {
        self.restriction.is_some()
    }

    /// Number of grid points, ignoring any restriction.
    pub fn grid_len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn point(&self, mut idx: usize) -> Point {
        let mut p = Point::zeros(self.axes.len());
        for (d, axis) in self.axes.iter().enumerate().rev() {
            p[d] = axis.coord(idx % axis.count);
            idx /= axis.count;
        }
        p
    }

    pub fn is_member(&self, idx: usize) -> bool {
        match &self.restriction {
            None => idx < self.grid_len(),
            Some(r) => r.indices.binary_search(&idx).is_ok() == r.keep,
        }
    }

    /// Sorted indices of all member points.
    pub fn members(&self) -> Vec<usize> {
        match &self.restriction {
            None => (0..self.grid_len()).collect(),
            Some(r) if r.keep => r.indices.to_vec(),
            Some(r) => (0..self.grid_len()).filter(|i| r.indices.binary_search(i).is_err()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.restriction {
            None => self.grid_len(),
            Some(r) if r.keep => r.indices.len(),
            Some(r) => self.grid_len() - r.indices.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of every member point, in index order.
    pub fn points(&self) -> Vec<Point> {
        self.members().into_iter().map(|i| self.point(i)).collect()
    }

    /// Whether a coordinate tuple lies inside the (closed) window. Periodic
    /// axes never exit.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.axes.iter().zip(p).all(|(a, x)| match a.kind {
            AxisKind::Periodic => true,
            _ => {
                let tol = 1e-9 * a.step;
                *x >= a.lo - tol && *x <= a.hi() + tol
            }
        })
    }

    /// Grid index nearest to `p` (not necessarily a member).
    pub fn nearest_index(&self, p: &[f64]) -> Option<usize> {
        let mut idx = 0usize;
        for (axis, x) in self.axes.iter().zip(p) {
            idx = idx * axis.count + axis.nearest(*x)?;
        }
        Some(idx)
    }

    /// Member index whose coordinates are within `tol` of `p`.
    pub fn locate(&self, p: &[f64], tol: f64) -> Option<usize> {
        let idx = self.nearest_index(p)?;
        (self.is_member(idx) && self.metric.dist(&self.point(idx), p) <= tol).then_some(idx)
    }

    /// Visit every member within metric distance `r` of `center`.
    pub fn for_each_within(&self, center: &[f64], r: f64, mut f: impl FnMut(usize)) {
        let spans: Vec<(i64, i64)> =
            self.axes.iter().zip(center).map(|(a, x)| a.index_span(*x, r)).collect();
        if spans.iter().any(|(a, b)| b < a) {
            return;
        }
        let mut ks: Vec<i64> = spans.iter().map(|s| s.0).collect();
        loop {
            let mut idx = 0usize;
            for (axis, k) in self.axes.iter().zip(&ks) {
                idx = idx * axis.count + k.rem_euclid(axis.count as i64) as usize;
            }
            if self.is_member(idx)
                && self.metric.dist(&self.point(idx), center) <= r + BOUNDARY_EPS
            {
                f(idx);
            }
            // odometer increment, last axis fastest
            let mut d = ks.len();
            loop {
                if d == 0 {
                    return;
                }
                d -= 1;
                if ks[d] < spans[d].1 {
                    ks[d] += 1;
                    break;
                }
                ks[d] = spans[d].0;
            }
        }
    }

    /// Members within distance `r` of `center`, sorted.
    pub fn within(&self, center: &[f64], r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(center, r, |i| out.push(i));
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Walk the grid box `m` steps around `idx` along every axis (clipped at
    /// window edges). Returns true iff every box point is a member and `f`
    /// accepts it; stops at the first rejection.
    pub fn grid_neighborhood(&self, idx: usize, m: usize, mut f: impl FnMut(usize) -> bool) -> bool {
        let mut ks = Vec::with_capacity(self.axes.len());
        let mut rem = idx;
        for axis in self.axes.iter().rev() {
            ks.push((rem % axis.count) as i64);
            rem /= axis.count;
        }
        ks.reverse();
        let m = m as i64;
        let spans: Vec<(i64, i64)> = self
            .axes
            .iter()
            .zip(&ks)
            .map(|(a, k)| match a.kind {
                AxisKind::Periodic if 2 * m + 1 >= a.count as i64 => (0, a.count as i64 - 1),
                AxisKind::Periodic => (k - m, k + m),
                _ => ((k - m).max(0), (k + m).min(a.count as i64 - 1)),
            })
            .collect();
        let mut cur: Vec<i64> = spans.iter().map(|s| s.0).collect();
        loop {
            let mut j = 0usize;
            for (axis, k) in self.axes.iter().zip(&cur) {
                j = j * axis.count + k.rem_euclid(axis.count as i64) as usize;
            }
            if !self.is_member(j) || !f(j) {
                return false;
            }
            let mut d = cur.len();
            loop {
                if d == 0 {
                    return true;
                }
                d -= 1;
                if cur[d] < spans[d].1 {
                    cur[d] += 1;
                    break;
                }
                cur[d] = spans[d].0;
            }
        }
    }

    /// Grid neighbors one step away along a single axis.
    pub fn axis_neighbors(&self, idx: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stride = 1usize;
        for axis in self.axes.iter().rev() {
            let k = (idx / stride) % axis.count;
            let base = idx - k * stride;
            let candidates: [Option<usize>; 2] = match axis.kind {
                AxisKind::Periodic if axis.count > 1 => {
                    [Some((k + axis.count - 1) % axis.count), Some((k + 1) % axis.count)]
                }
                AxisKind::Periodic => [None, None],
                _ => [k.checked_sub(1), (k + 1 < axis.count).then_some(k + 1)],
            };
            for c in candidates.into_iter().flatten() {
                let j = base + c * stride;
                if j != idx && self.is_member(j) {
                    out.push(j);
                }
            }
            stride *= axis.count;
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Step `idx` by `delta` cells along axis `axis`; `None` past a window edge.
    pub fn step_index(&self, idx: usize, axis: usize, delta: i64) -> Option<usize> {
        let stride: usize = self.axes[axis + 1..].iter().map(|a| a.count).product();
        let a = &self.axes[axis];
        let k = ((idx / stride) % a.count) as i64;
        let nk = k + delta;
        let nk = match a.kind {
            AxisKind::Periodic => nk.rem_euclid(a.count as i64),
            _ if nk < 0 || nk >= a.count as i64 => return None,
            _ => nk,
        };
        Some(idx - k as usize * stride + nk as usize * stride)
    }

    /// Halve-by-`factor` refinement. The original points stay grid points.
    pub fn refine(&self, factor: usize) -> Result<SampledSpace> {
        if factor < 2 {
            return Err(Error::InvalidParameter(format!("refinement factor {factor} < 2")));
        }
        if self.axes.iter().any(|a| a.kind == AxisKind::Lattice) {
            return Err(Error::NotRefinable("integer lattices are already exact".into()));
        }
        let axes: Vec<Axis> = self
            .axes
            .iter()
            .map(|a| match a.kind {
                AxisKind::Periodic => Axis { count: a.count * factor, step: a.step / factor as f64, ..*a },
                _ => Axis { count: (a.count - 1) * factor + 1, step: a.step / factor as f64, ..*a },
            })
            .collect();
        let mut out = SampledSpace {
            axes,
            metric: self.metric.clone(),
            spacing: self.spacing / factor as f64,
            flags: self.flags,
            restriction: None,
        };
        if let Some(r) = &self.restriction {
            out.restriction = Some(out.index_restriction(r.keep, r.coords.clone())?);
        }
        Ok(out)
    }

    fn index_restriction(&self, keep: bool, coords: Arc<Vec<Point>>) -> Result<Restriction> {
        let mut indices = Vec::with_capacity(coords.len());
        for p in coords.iter() {
            let idx = self
                .nearest_index(p)
                .filter(|&i| self.metric.dist(&self.point(i), p) <= 1e-9)
                .ok_or_else(|| Error::InvalidParameter(format!("{p:?} is not a grid point")))?;
            indices.push(idx);
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(Restriction { keep, coords, indices: Arc::new(indices) })
    }

    /// Keep only the given grid indices. The result models a finite (hence
    /// countable, discrete) set and keeps those coordinates under refinement.
    pub fn restrict_to(&self, indices: &[usize]) -> Result<SampledSpace> {
        if self.restriction.is_some() {
            return Err(Error::NotApplicable("space is already restricted".into()));
        }
        let coords: Vec<Point> = indices.iter().map(|&i| self.point(i)).collect();
        let mut out = self.clone();
        out.restriction = Some(self.index_restriction(true, Arc::new(coords))?);
        out.flags = TopologyFlags { compact: true, ..TopologyFlags::discrete() };
        Ok(out)
    }

    /// Remove finitely many grid points; flags are unchanged.
    pub fn without(&self, indices: &[usize]) -> Result<SampledSpace> {
        if self.restriction.is_some() {
            return Err(Error::NotApplicable("space is already restricted".into()));
        }
        let coords: Vec<Point> = indices.iter().map(|&i| self.point(i)).collect();
        let mut out = self.clone();
        out.restriction = Some(self.index_restriction(false, Arc::new(coords))?);
        Ok(out)
    }

    /// `X1 × X2` with the max metric.
    pub fn product(a: &SampledSpace, b: &SampledSpace) -> Result<SampledSpace> {
        if a.restriction.is_some() || b.restriction.is_some() {
            return Err(Error::NotApplicable("products of restricted spaces".into()));
        }
        let dim = a.dim() + b.dim();
        if dim > MAX_DIM {
            return Err(Error::InvalidParameter(format!("product dimension {dim} > {MAX_DIM}")));
        }
        let (fa, fb) = (a.flags, b.flags);
        let countable = fa.countable_model && fb.countable_model;
        Ok(SampledSpace {
            axes: a.axes.iter().chain(&b.axes).copied().collect(),
            metric: MetricFn::product(a.metric.clone(), b.metric.clone()),
            spacing: a.spacing.max(b.spacing),
            flags: TopologyFlags {
                compact: fa.compact && fb.compact,
                locally_connected: fa.locally_connected && fb.locally_connected,
                has_isolated_points: fa.has_isolated_points && fb.has_isolated_points,
                countable_model: countable,
                uncountable_model: !countable,
            },
            restriction: None,
        })
    }

    pub fn is_refinable(&self) -> bool {
        self.axes.iter().all(|a| a.kind != AxisKind::Lattice)
    }

    pub fn descriptor(&self) -> SpaceDescriptor {
        SpaceDescriptor {
            metric: self.metric.clone(),
            spacing: self.spacing,
            points: self.len(),
            axes: self.axes.clone(),
            flags: self.flags,
            restricted: self.restriction.is_some(),
        }
    }
}
