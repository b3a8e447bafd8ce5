//! Non-autonomous systems `φ₁, φ₂, …` and their algebra.
//!
//! Maps act in place on exact real coordinates. `φ₁ⁿ = φ_n ∘ … ∘ φ₁`, and the
//! negative-index orbit is the preimage orbit `φ₁⁻ⁿ(x) = (φ₁ⁿ)⁻¹(x) =
//! φ₁⁻¹ ∘ φ₂⁻¹ ∘ … ∘ φ_n⁻¹(x)`, which is not incremental in `n`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::space::{Point, SampledSpace};

/// The n-th map of a sequence (`n ≥ 1`), acting in place.
pub type MapFn = Arc<dyn Fn(usize, &mut [f64]) + Send + Sync>;
/// A single self-map of the ambient space, acting in place.
pub type PointMap = Arc<dyn Fn(&mut [f64]) + Send + Sync>;
/// Declared Lipschitz bound of the n-th map.
pub type ModulusFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct MapSequence {
    name: String,
    dim: usize,
    rule: MapFn,
    inverse: Option<MapFn>,
    equicontinuous: bool,
    autonomous: bool,
    modulus: Option<ModulusFn>,
}

impl fmt::Debug for MapSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapSequence")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("invertible", &self.inverse.is_some())
            .field("equicontinuous", &self.equicontinuous)
            .field("autonomous", &self.autonomous)
            .finish()
    }
}

impl MapSequence {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        rule: impl Fn(usize, &mut [f64]) + Send + Sync + 'static,
    ) -> MapSequence {
        MapSequence {
            name: name.into(),
            dim,
            rule: Arc::new(rule),
            inverse: None,
            equicontinuous: false,
            autonomous: false,
            modulus: None,
        }
    }

    pub fn with_inverse(mut self, inverse: impl Fn(usize, &mut [f64]) + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    pub fn equicontinuous(mut self, flag: bool) -> Self {
        self.equicontinuous = flag;
        self
    }

    pub fn autonomous(mut self, flag: bool) -> Self {
        self.autonomous = flag;
        self
    }

    pub fn with_modulus(mut self, modulus: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        self.modulus = Some(Arc::new(modulus));
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn is_equicontinuous(&self) -> bool {
        self.equicontinuous
    }

    pub fn is_autonomous(&self) -> bool {
        self.autonomous
    }

    pub fn modulus(&self, n: usize) -> Option<f64> {
        self.modulus.as_ref().map(|m| m(n))
    }

    /// Apply `φ_n` in place.
    #[inline]
    pub fn apply(&self, n: usize, x: &mut [f64]) {
        (self.rule)(n, x)
    }

    /// Apply `φ_n⁻¹` in place.
    pub fn apply_inverse(&self, n: usize, x: &mut [f64]) -> Result<()> {
        let inv = self.inverse.as_ref().ok_or_else(|| Error::MissingInverse(self.name.clone()))?;
        inv(n, x);
        Ok(())
    }

    /// `(φ₁ⁱ)⁻¹(x)`, i.e. `φ₁⁻¹ ∘ … ∘ φ_i⁻¹` applied to `x`.
    pub fn preimage(&self, i: usize, x: &[f64]) -> Result<Point> {
        let inv = self.inverse.as_ref().ok_or_else(|| Error::MissingInverse(self.name.clone()))?;
        let mut p = Point::new(x);
        for n in (1..=i).rev() {
            inv(n, &mut p);
        }
        Ok(p)
    }

    /// Checks `φ_n(φ_n⁻¹(x)) ≈ x` for the given points and `n ≤ horizon`.
    pub fn check_inverse(&self, space: &SampledSpace, horizon: usize, tol: f64) -> Result<()> {
        let inv = self.inverse.as_ref().ok_or_else(|| Error::MissingInverse(self.name.clone()))?;
        for p in space.points() {
            for n in 1..=horizon {
                let mut q = p;
                inv(n, &mut q);
                (self.rule)(n, &mut q);
                let err = space.metric().dist(&q, &p);
                if err > tol {
                    return Err(Error::ConjugacyRoundTrip { point: p.to_vec(), error: err });
                }
            }
        }
        Ok(())
    }

    /// Worst ratio `d(φ_n x, φ_n y) / d(x, y)` over adjacent grid pairs,
    /// divided by the declared modulus. Values ≤ 1 mean the declaration holds.
    pub fn continuity_ratio(&self, space: &SampledSpace, horizon: usize) -> Option<f64> {
        let modulus = self.modulus.as_ref()?;
        let mut worst = 0.0f64;
        for i in space.members() {
            let p = space.point(i);
            for j in space.axis_neighbors(i) {
                let q = space.point(j);
                let d0 = space.metric().dist(&p, &q);
                for n in 1..=horizon {
                    let (mut a, mut b) = (p, q);
                    (self.rule)(n, &mut a);
                    (self.rule)(n, &mut b);
                    worst = worst.max(space.metric().dist(&a, &b) / (d0 * modulus(n)));
                }
            }
        }
        Some(worst)
    }
}

/// `φ_i^j(x) = φ_j ∘ … ∘ φ_i (x)`; the identity when `i > j`.
pub fn compose(seq: &MapSequence, i: usize, j: usize, x: &[f64]) -> Point {
    let mut p = Point::new(x);
    for n in i.max(1)..=j {
        seq.apply(n, &mut p);
    }
    p
}

/// `(φ_{1,∞})^k`: the n-th map is the block `φ_{(n-1)k+1}^{nk}`.
pub fn kth_iterate(seq: &MapSequence, k: usize) -> Result<MapSequence> {
    if k == 0 {
        return Err(Error::InvalidParameter("iterate order k must be ≥ 1".into()));
    }
    let base = seq.clone();
    let rule = seq.rule.clone();
    let mut out = MapSequence::new(format!("{}^{k}", seq.name), seq.dim, move |n, x| {
        for m in (n - 1) * k + 1..=n * k {
            rule(m, x);
        }
    });
    if let Some(inv) = base.inverse.clone() {
        out.inverse = Some(Arc::new(move |n, x: &mut [f64]| {
            for m in ((n - 1) * k + 1..=n * k).rev() {
                inv(m, x);
            }
        }));
    }
    if let Some(modulus) = base.modulus.clone() {
        out.modulus =
            Some(Arc::new(move |n| ((n - 1) * k + 1..=n * k).map(|m| modulus(m)).product()));
    }
    out.equicontinuous = base.equicontinuous;
    out.autonomous = base.autonomous;
    Ok(out)
}

/// `{φ_n⁻¹}`.
pub fn inverse_system(seq: &MapSequence) -> Result<MapSequence> {
    let inverse = seq.inverse.clone().ok_or_else(|| Error::MissingInverse(seq.name.clone()))?;
    Ok(MapSequence {
        name: format!("{}^-1", seq.name),
        dim: seq.dim,
        rule: inverse,
        inverse: Some(seq.rule.clone()),
        equicontinuous: seq.equicontinuous,
        autonomous: seq.autonomous,
        modulus: None,
    })
}

/// `ψ_n = h ∘ φ_n ∘ h⁻¹`, after checking that `h` and `h_inv` round-trip on
/// the sample to 1e-9.
pub fn conjugate(
    seq: &MapSequence,
    h: PointMap,
    h_inv: PointMap,
    sample: &SampledSpace,
) -> Result<MapSequence> {
    for p in sample.points() {
        for (f, g) in [(&h, &h_inv), (&h_inv, &h)] {
            let mut q = p;
            g(&mut q);
            f(&mut q);
            let err = sample.metric().dist(&q, &p);
            if !(err <= 1e-9) {
                return Err(Error::ConjugacyRoundTrip { point: p.to_vec(), error: err });
            }
        }
    }
    let rule = seq.rule.clone();
    let (h1, hi1) = (h.clone(), h_inv.clone());
    let mut out = MapSequence::new(format!("conj({})", seq.name), seq.dim, move |n, x| {
        hi1(x);
        rule(n, x);
        h1(x);
    });
    if let Some(inv) = seq.inverse.clone() {
        out.inverse = Some(Arc::new(move |n, x: &mut [f64]| {
            h_inv(x);
            inv(n, x);
            h(x);
        }));
    }
    out.equicontinuous = seq.equicontinuous;
    out.autonomous = seq.autonomous;
    Ok(out)
}

/// `{φ_n × ψ_n}` acting coordinate-wise on `X₁ × X₂`.
pub fn product(a: &MapSequence, b: &MapSequence) -> MapSequence {
    let split = a.dim;
    let (ra, rb) = (a.rule.clone(), b.rule.clone());
    let mut out = MapSequence::new(format!("{}x{}", a.name, b.name), a.dim + b.dim, move |n, x| {
        let (l, r) = x.split_at_mut(split);
        ra(n, l);
        rb(n, r);
    });
    if let (Some(ia), Some(ib)) = (a.inverse.clone(), b.inverse.clone()) {
        out.inverse = Some(Arc::new(move |n, x: &mut [f64]| {
            let (l, r) = x.split_at_mut(split);
            ia(n, l);
            ib(n, r);
        }));
    }
    if let (Some(ma), Some(mb)) = (a.modulus.clone(), b.modulus.clone()) {
        out.modulus = Some(Arc::new(move |n| ma(n).max(mb(n))));
    }
    out.equicontinuous = a.equicontinuous && b.equicontinuous;
    out.autonomous = a.autonomous && b.autonomous;
    out
}

/// Sorted, strictly increasing set of grid indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PointSet {
    indices: Vec<usize>,
}

impl PointSet {
    pub fn new(mut indices: Vec<usize>) -> PointSet {
        indices.sort_unstable();
        indices.dedup();
        PointSet { indices }
    }

    pub fn from_sorted(indices: Vec<usize>) -> Result<PointSet> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("point set indices must strictly increase".into()));
        }
        Ok(PointSet { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.indices.binary_search(&idx).is_ok()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn points(&self, space: &SampledSpace) -> Vec<Point> {
        self.indices.iter().map(|&i| space.point(i)).collect()
    }
}

/// A system together with the sample it has been restricted to.
#[derive(Clone, Debug)]
pub struct RestrictedSystem {
    pub system: MapSequence,
    pub space: SampledSpace,
}

/// Tolerance for "the image is this grid point".
pub fn grid_tolerance(space: &SampledSpace) -> f64 {
    (space.spacing() * 1e-3).max(1e-9)
}

/// `φ|_Y`. The subset must be forward invariant up to the horizon: every
/// image either leaves the window or lands on a subset point.
pub fn restrict(
    seq: &MapSequence,
    space: &SampledSpace,
    subset: &PointSet,
    horizon: usize,
) -> Result<RestrictedSystem> {
    let tol = grid_tolerance(space);
    for &idx in subset.indices() {
        let mut p = space.point(idx);
        for n in 1..=horizon {
            seq.apply(n, &mut p);
            if !space.contains(&p) {
                break;
            }
            match space.locate(&p, tol) {
                Some(j) if subset.contains(j) => {}
                _ => return Err(Error::NotInvariant { point: space.point(idx).to_vec(), step: n }),
            }
        }
    }
    let restricted = if subset.len() == space.len() {
        space.clone()
    } else {
        space.restrict_to(subset.indices())?
    };
    Ok(RestrictedSystem {
        system: seq.clone().renamed(format!("{}|Y", seq.name)),
        space: restricted,
    })
}

/// Escape index meaning "never left the window".
pub const NEVER: u32 = u32::MAX;

/// Orbits of grid points, visited step by step. Escapes are sticky: once an
/// orbit leaves a euclidean/lattice window it stays escaped.
pub trait OrbitSource: Sync {
    fn space(&self) -> &SampledSpace;
    fn system(&self) -> &MapSequence;
    fn horizon(&self) -> usize;
    fn has_backward(&self) -> bool;

    /// Visits `φ₁ⁱ(x_idx)` for `i = 1..=limit`, passing `None` once escaped.
    /// The visitor returns `false` to stop.
    fn walk_forward(&self, idx: usize, limit: usize, visit: &mut dyn FnMut(usize, Option<&[f64]>) -> bool);

    /// Visits `(φ₁ⁱ)⁻¹(x_idx)` for `i = 1..=limit`.
    fn walk_backward(&self, idx: usize, limit: usize, visit: &mut dyn FnMut(usize, Option<&[f64]>) -> bool);
}

/// Forward and backward orbit of an arbitrary point, truncated at the first
/// escape. Entry 0 of both vectors is the point itself.
#[derive(Clone, Debug)]
pub struct PointOrbit {
    pub forward: Vec<Point>,
    pub backward: Vec<Point>,
    pub truncated: bool,
}

pub fn point_orbit(
    seq: &MapSequence,
    space: &SampledSpace,
    x: &[f64],
    horizon: usize,
    bilateral: bool,
) -> Result<PointOrbit> {
    let start = Point::new(x);
    let mut forward = vec![start];
    let mut truncated = false;
    let mut p = start;
    for n in 1..=horizon {
        seq.apply(n, &mut p);
        if !space.contains(&p) {
            truncated = true;
            break;
        }
        forward.push(p);
    }
    let mut backward = vec![start];
    if bilateral {
        for i in 1..=horizon {
            let q = seq.preimage(i, x)?;
            if !space.contains(&q) {
                truncated = true;
                break;
            }
            backward.push(q);
        }
    }
    Ok(PointOrbit { forward, backward, truncated })
}

/// Precomputed `φ₁ⁱ(x)` for every grid point and `0 ≤ i ≤ N`, plus the
/// preimage orbit for `-N ≤ i ≤ -1` when bilateral.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    space: SampledSpace,
    seq: MapSequence,
    horizon: usize,
    dim: usize,
    forward: Vec<f64>,
    backward: Option<Vec<f64>>,
    forward_escape: Vec<u32>,
    backward_escape: Option<Vec<u32>>,
}

pub fn build_orbit_table(
    seq: &MapSequence,
    space: &SampledSpace,
    horizon: usize,
    bilateral: bool,
) -> Result<OrbitTable> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be ≥ 1".into()));
    }
    if seq.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: seq.dim() });
    }
    if bilateral && !seq.is_invertible() {
        return Err(Error::MissingInverse(seq.name().to_string()));
    }
    let dim = space.dim();
    let row = (horizon + 1) * dim;
    let len = space.grid_len();
    let mut forward = vec![0.0; len * row];
    let mut forward_escape = vec![NEVER; len];
    forward
        .par_chunks_mut(row)
        .zip(forward_escape.par_iter_mut())
        .enumerate()
        .for_each(|(idx, (out, esc))| {
            let mut p = space.point(idx);
            out[..dim].copy_from_slice(&p);
            for n in 1..=horizon {
                seq.apply(n, &mut p);
                if *esc == NEVER && !space.contains(&p) {
                    *esc = n as u32;
                }
                out[n * dim..(n + 1) * dim].copy_from_slice(&p);
            }
        });
    let (backward, backward_escape) = if bilateral {
        let mut backward = vec![0.0; len * row];
        let mut escape = vec![NEVER; len];
        backward
            .par_chunks_mut(row)
            .zip(escape.par_iter_mut())
            .enumerate()
            .for_each(|(idx, (out, esc))| {
                let x = space.point(idx);
                out[..dim].copy_from_slice(&x);
                for i in 1..=horizon {
                    let q = seq.preimage(i, &x).expect("inverse checked above");
                    if *esc == NEVER && !space.contains(&q) {
                        *esc = i as u32;
                    }
                    out[i * dim..(i + 1) * dim].copy_from_slice(&q);
                }
            });
        (Some(backward), Some(escape))
    } else {
        (None, None)
    };
    Ok(OrbitTable {
        space: space.clone(),
        seq: seq.clone(),
        horizon,
        dim,
        forward,
        backward,
        forward_escape,
        backward_escape,
    })
}

impl OrbitTable {
    pub fn space(&self) -> &SampledSpace {
        &self.space
    }

    pub fn system(&self) -> &MapSequence {
        &self.seq
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn is_bilateral(&self) -> bool {
        self.backward.is_some()
    }

    /// `φ₁ⁱ(x_idx)` for `-N ≤ i ≤ N` (negative `i` needs a bilateral table).
    pub fn at(&self, idx: usize, i: isize) -> Option<&[f64]> {
        let row = (self.horizon + 1) * self.dim;
        let k = i.unsigned_abs();
        if k > self.horizon {
            return None;
        }
        let data = if i >= 0 { &self.forward } else { self.backward.as_ref()? };
        let start = idx * row + k * self.dim;
        Some(&data[start..start + self.dim])
    }

    /// Whether the orbit of `idx` has escaped by index `i`.
    pub fn escaped(&self, idx: usize, i: isize) -> bool {
        let esc = if i >= 0 {
            self.forward_escape[idx]
        } else {
            match &self.backward_escape {
                Some(e) => e[idx],
                None => return true,
            }
        };
        esc != NEVER && i.unsigned_abs() as u32 >= esc
    }

    /// First escape index of the forward (or backward) orbit.
    pub fn escape_index(&self, idx: usize, backward: bool) -> Option<usize> {
        let e = if backward { self.backward_escape.as_ref()?[idx] } else { self.forward_escape[idx] };
        (e != NEVER).then_some(e as usize)
    }
}

impl OrbitSource for OrbitTable {
    fn space(&self) -> &SampledSpace {
        &self.space
    }
    fn system(&self) -> &MapSequence {
        &self.seq
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn has_backward(&self) -> bool {
        self.backward.is_some()
    }

    fn walk_forward(&self, idx: usize, limit: usize, visit: &mut dyn FnMut(usize, Option<&[f64]>) -> bool) {
        let esc = self.forward_escape[idx];
        for i in 1..=limit.min(self.horizon) {
            let p = if esc != NEVER && i as u32 >= esc { None } else { self.at(idx, i as isize) };
            if !visit(i, p) {
                return;
            }
        }
    }

    fn walk_backward(&self, idx: usize, limit: usize, visit: &mut dyn FnMut(usize, Option<&[f64]>) -> bool) {
        let Some(escape) = &self.backward_escape else { return };
        let esc = escape[idx];
        for i in 1..=limit.min(self.horizon) {
            let p = if esc != NEVER && i as u32 >= esc { None } else { self.at(idx, -(i as isize)) };
            if !visit(i, p) {
                return;
            }
        }
    }
}

/// Orbits computed on demand, for grids too fine to tabulate.
#[derive(Clone, Debug)]
pub struct LazyOrbits {
    pub space: SampledSpace,
    pub seq: MapSequence,
    pub horizon: usize,
    pub bilateral: bool,
}

impl OrbitSource for LazyOrbits {
    fn space(&self) -> &SampledSpace {
        &self.space
    }
    fn system(&self) -> &MapSequence {
        &self.seq
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn has_backward(&self) -> bool {
        self.bilateral
    }

    fn walk_forward(&self, idx: usize, limit: usize, visit: &mut dyn FnMut(usize, Option<&[f64]>) -> bool) {
        let mut p = self.space.point(idx);
        let mut escaped = false;
        for i in 1..=limit.min(self.horizon) {
            if !escaped {
                self.seq.apply(i, &mut p);
                escaped = !self.space.contains(&p);
            }
            if !visit(i, (!escaped).then_some(&p[..])) {
                return;
            }
        }
    }

    fn walk_backward(&self, idx: usize, limit: usize, visit: &mut dyn FnMut(usize, Option<&[f64]>) -> bool) {
        if !self.bilateral {
            return;
        }
        let x = self.space.point(idx);
        let mut escaped = false;
        for i in 1..=limit.min(self.horizon) {
            let q = if escaped {
                None
            } else {
                let q = self.seq.preimage(i, &x).expect("bilateral lazy orbits need an inverse");
                escaped = !self.space.contains(&q);
                (!escaped).then_some(q)
            };
            if !visit(i, q.as_deref()) {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::space::{build_grid, wrap_unit, MetricFn};
    use proptest::prelude::*;

    fn circle(h: f64) -> SampledSpace {
        build_grid(&[], h, MetricFn::circle()).unwrap()
    }

    fn rotation(alpha: f64) -> MapSequence {
        MapSequence::new("rot", 1, move |_, x| x[0] = wrap_unit(x[0] + alpha))
            .with_inverse(move |_, x| x[0] = wrap_unit(x[0] - alpha))
            .equicontinuous(true)
            .autonomous(true)
    }

    #[test]
    fn compose_examples() {
        let e31 = catalog::example_3_1().system;
        for x in [-3.0, 0.5, 7.25] {
            assert_eq!(compose(&e31, 1, 2, &[x])[0], x);
        }
        let e32 = catalog::example_3_2().system;
        assert_eq!(compose(&e32, 5, 3, &[1.5])[0], 1.5);
        assert_eq!(compose(&e32, 1, 3, &[2.0])[0], 8.0);
    }

    #[test]
    fn kth_iterate_examples() {
        let e32 = catalog::example_3_2().system;
        let it1 = kth_iterate(&e32, 1).unwrap();
        for n in 1..6 {
            let (mut a, mut b) = ([0.7], [0.7]);
            e32.apply(n, &mut a);
            it1.apply(n, &mut b);
            assert_eq!(a, b);
        }
        let it2 = kth_iterate(&e32, 2).unwrap();
        let mut x = [0.0];
        it2.apply(1, &mut x);
        assert_eq!(x[0], 3.0);

        let e31 = catalog::example_3_1().system;
        let h = kth_iterate(&e31, 2).unwrap();
        for n in 1..=5 {
            for x in [-8.0, -0.37, 0.0, 2.5, 8.0] {
                let mut p = [x];
                h.apply(n, &mut p);
                assert_eq!(p[0], x);
            }
        }
        assert!(kth_iterate(&e31, 0).is_err());
    }

    #[test]
    fn inverse_system_examples() {
        let e31 = catalog::example_3_1().system;
        let inv = inverse_system(&e31).unwrap();
        // g⁻¹ = h: the inverse system starts h, g, h², ...
        let mut x = [4.0];
        inv.apply(1, &mut x);
        assert_eq!(x[0], 2.0);
        inv.apply(2, &mut x);
        assert_eq!(x[0], 4.0);
        inv.apply(3, &mut x);
        assert_eq!(x[0], 1.0);

        let doubling = catalog::doubling().system;
        assert!(matches!(inverse_system(&doubling), Err(Error::MissingInverse(_))));

        let rot = rotation(0.3819660112501051);
        let space = circle(1.0 / 256.0);
        let inv = inverse_system(&rot).unwrap();
        for p in space.points() {
            let mut q = p;
            rot.apply(1, &mut q);
            inv.apply(1, &mut q);
            assert!(space.metric().dist(&q, &p) < 1e-9);
        }
    }

    #[test]
    fn conjugate_examples() {
        let space = build_grid(&[(-2.0, 2.0)], 0.25, MetricFn::euclidean(1)).unwrap();
        let double = MapSequence::new("2x", 1, |_, x| x[0] *= 2.0);
        let id: PointMap = Arc::new(|_| {});
        let same = conjugate(&double, id.clone(), id, &space).unwrap();
        for p in space.points() {
            let (mut a, mut b) = (p, p);
            double.apply(1, &mut a);
            same.apply(1, &mut b);
            assert_eq!(a, b);
        }
        let psi = conjugate(
            &double,
            Arc::new(|x| x[0] += 1.0),
            Arc::new(|x| x[0] -= 1.0),
            &space,
        )
        .unwrap();
        for p in space.points() {
            let mut q = p;
            psi.apply(1, &mut q);
            assert!((q[0] - (2.0 * p[0] - 1.0)).abs() < 1e-12);
        }
        let bad = conjugate(&double, Arc::new(|x| x[0] += 1.0), Arc::new(|x| x[0] -= 2.0), &space);
        assert!(matches!(bad, Err(Error::ConjugacyRoundTrip { .. })));
    }

    #[test]
    fn product_examples() {
        let e32 = catalog::example_3_2().system;
        let prod = product(&e32, &e32);
        let p = compose(&prod, 1, 3, &[0.0, 0.0]);
        assert_eq!(&p[..], &[6.0, 6.0]);
        let id = MapSequence::new("id", 1, |_, _| {});
        let idid = product(&id, &id);
        assert_eq!(&compose(&idid, 1, 7, &[0.3, 0.4])[..], &[0.3, 0.4]);
    }

    #[test]
    fn restrict_examples() {
        let space = circle(1.0 / 64.0);
        let doubling = catalog::doubling().system;
        let all = PointSet::new(space.members());
        let full = restrict(&doubling, &space, &all, 10).unwrap();
        assert_eq!(full.space.len(), 64);
        assert!(!full.space.is_restricted());

        let half: Vec<usize> = space.members().into_iter().filter(|&i| space.point(i)[0] < 0.5).collect();
        let err = restrict(&doubling, &space, &PointSet::new(half), 10);
        assert!(matches!(err, Err(Error::NotInvariant { .. })));

        let e32 = catalog::example_3_2();
        let window = e32.space("window").unwrap();
        let ints: Vec<usize> =
            window.members().into_iter().filter(|&i| window.point(i)[0].fract() == 0.0).collect();
        let r = restrict(&e32.system, &window, &PointSet::new(ints), 10).unwrap();
        assert_eq!(r.space.len(), 11);
        assert!(r.space.flags().countable_model);
    }

    #[test]
    fn orbit_table_examples() {
        let space = circle(1.0 / 32.0);
        let id = MapSequence::new("id", 1, |_, _| {}).with_inverse(|_, _| {});
        let t = build_orbit_table(&id, &space, 5, true).unwrap();
        for idx in space.members() {
            for i in -5..=5 {
                assert_eq!(t.at(idx, i).unwrap(), &space.point(idx)[..]);
            }
        }

        let e31 = catalog::example_3_1();
        let window = e31.space("window").unwrap();
        let t = build_orbit_table(&e31.system, &window, 20, false).unwrap();
        for idx in window.members() {
            for k in 0..=10 {
                assert_eq!(t.at(idx, 2 * k).unwrap()[0], window.point(idx)[0]);
            }
        }

        let cat = catalog::catmap();
        let torus = build_grid(&[], 1.0 / 64.0, MetricFn::torus(2)).unwrap();
        let t = build_orbit_table(&cat.system, &torus, 10, false).unwrap();
        assert!(torus.members().iter().all(|&i| t.escape_index(i, false).is_none()));

        let doubling = catalog::doubling().system;
        assert!(matches!(build_orbit_table(&doubling, &space, 5, true), Err(Error::MissingInverse(_))));
        assert!(build_orbit_table(&doubling, &space, 0, false).is_err());
    }

    #[test]
    fn lazy_orbits_agree_with_table() {
        let e = catalog::example_4_1();
        let space = build_grid(&[], 1.0 / 8.0, MetricFn::torus(3)).unwrap();
        let t = build_orbit_table(&e.system, &space, 6, true).unwrap();
        let lazy = LazyOrbits { space: space.clone(), seq: e.system.clone(), horizon: 6, bilateral: true };
        for idx in (0..space.grid_len()).step_by(37) {
            let mut a = Vec::new();
            let mut b = Vec::new();
            t.walk_forward(idx, 6, &mut |_, p| {
                a.push(p.map(|p| p.to_vec()));
                true
            });
            lazy.walk_forward(idx, 6, &mut |_, p| {
                b.push(p.map(|p| p.to_vec()));
                true
            });
            t.walk_backward(idx, 6, &mut |_, p| {
                a.push(p.map(|p| p.to_vec()));
                true
            });
            lazy.walk_backward(idx, 6, &mut |_, p| {
                b.push(p.map(|p| p.to_vec()));
                true
            });
            assert_eq!(a, b);
        }
    }

    #[test]
    fn escapes_are_sticky() {
        let e31 = catalog::example_3_1();
        let window = e31.space("window").unwrap();
        let t = build_orbit_table(&e31.system, &window, 20, false).unwrap();
        let idx = window.locate(&[5.0], 1e-9).unwrap();
        // 5 → 10 leaves [-8, 8] at step 1, returns to 5 at step 2
        assert_eq!(t.escape_index(idx, false), Some(1));
        assert!(t.escaped(idx, 2));
        assert!(!t.escaped(idx, 0));
    }

    #[test]
    fn declared_moduli_hold() {
        let space = circle(1.0 / 128.0);
        for entry in [catalog::doubling(), catalog::rotation()] {
            let r = entry.system.continuity_ratio(&space, 8).unwrap();
            assert!(r <= 1.0 + 1e-9, "{} ratio {r}", entry.name);
        }
    }

    proptest! {
        #[test]
        fn iterate_matches_block_composition(k in 1usize..4, n in 1usize..5, x in 0.0f64..1.0) {
            for entry in [catalog::doubling(), catalog::rotation(), catalog::catmap(), catalog::example_4_1()] {
                let seq = entry.system;
                let p: Vec<f64> = vec![x; seq.dim()];
                let direct = compose(&seq, 1, n * k, &p);
                let it = kth_iterate(&seq, k).unwrap();
                let via = compose(&it, 1, n, &p);
                for (a, b) in direct.iter().zip(via.iter()) {
                    prop_assert!((a - b).abs() <= 1e-9);
                }
            }
        }

        #[test]
        fn forward_then_backward_returns(i in 1usize..12, x in 0.0f64..1.0, y in 0.0f64..1.0) {
            // squaring loses the low bits of x after a few steps, so it
            // only joins for short compositions
            let mut entries = vec![catalog::rotation(), catalog::catmap(), catalog::example_4_1()];
            if i <= 3 {
                entries.push(catalog::interval_square());
            }
            for entry in entries {
                let seq = entry.system;
                let p: Vec<f64> = [x, y, x].iter().take(seq.dim()).copied().collect();
                let fwd = compose(&seq, 1, i, &p);
                let back = seq.preimage(i, &fwd).unwrap();
                for (a, b) in back.iter().zip(&p) {
                    let d = (a - b).abs();
                    prop_assert!(d.min(1.0 - d) <= 1e-9, "{} {:?} -> {:?}", seq.name(), p, back);
                }
            }
        }

        #[test]
        fn double_conjugation_is_identity(a in 0.0f64..1.0, x in 0.0f64..1.0, n in 1usize..6) {
            let space = circle(1.0 / 32.0);
            let seq = catalog::doubling().system;
            let h: PointMap = Arc::new(move |p| p[0] = wrap_unit(p[0] + a));
            let hi: PointMap = Arc::new(move |p| p[0] = wrap_unit(p[0] - a));
            let once = conjugate(&seq, h.clone(), hi.clone(), &space).unwrap();
            let back = conjugate(&once, hi, h, &space).unwrap();
            let (mut p, mut q) = ([x], [x]);
            seq.apply(n, &mut p);
            back.apply(n, &mut q);
            prop_assert!(space.metric().dist(&p, &q) <= 1e-9);
        }
    }
}
