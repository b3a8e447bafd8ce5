//! Finite-resolution dynamical balls
//! `S_c(x) = {y : d(φ₁ⁱx, φ₁ⁱy) ≤ c for every i in range}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Point, SampledSpace};
use crate::system::{point_orbit, LazyOrbits, MapSequence, OrbitSource, OrbitTable, PointOrbit, PointSet};

/// Slack added to `c` in membership comparisons.
pub const MEMBERSHIP_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicalBall {
    pub center: Point,
    pub c: f64,
    /// Requested horizon N.
    pub horizon: usize,
    pub members: PointSet,
    pub bilateral: bool,
    /// The center left the window before N (in either direction).
    pub truncated: bool,
    /// Last forward index actually constrained.
    pub forward_horizon: usize,
    /// Last backward index actually constrained (0 for forward balls).
    pub backward_horizon: usize,
}

impl DynamicalBall {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.members.contains(idx)
    }
}

/// Members of the ball around a precomputed center orbit, each with the
/// largest orbit distance to the center seen over the range.
pub(crate) fn ball_profile<O: OrbitSource + ?Sized>(
    src: &O,
    orbit: &PointOrbit,
    c: f64,
    bilateral: bool,
) -> Vec<(usize, f64)> {
    let space = src.space();
    let metric = space.metric();
    let lim = c + MEMBERSHIP_EPS;
    let fwd = orbit.forward.len() - 1;
    let bwd = if bilateral { orbit.backward.len() - 1 } else { 0 };
    let mut out = Vec::new();
    space.for_each_within(&orbit.forward[0], c, |idx| {
        let mut worst = metric.dist(&space.point(idx), &orbit.forward[0]);
        let mut ok = true;
        src.walk_forward(idx, fwd, &mut |i, p| {
            ok = within(metric, p, &orbit.forward[i], lim, &mut worst);
            ok
        });
        if ok && bwd > 0 {
            src.walk_backward(idx, bwd, &mut |i, p| {
                ok = within(metric, p, &orbit.backward[i], lim, &mut worst);
                ok
            });
        }
        if ok {
            out.push((idx, worst));
        }
    });
    out.sort_unstable_by_key(|m| m.0);
    out
}

#[inline]
fn within(metric: &crate::space::MetricFn, p: Option<&[f64]>, target: &[f64], lim: f64, worst: &mut f64) -> bool {
    match p {
        Some(p) => {
            let d = metric.dist(p, target);
            *worst = worst.max(d);
            d <= lim
        }
        None => false,
    }
}

pub(crate) fn check_ball_args<O: OrbitSource + ?Sized>(src: &O, center: &[f64], c: f64, bilateral: bool) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("ball radius c = {c} must be positive")));
    }
    if bilateral && !src.has_backward() {
        return Err(Error::NotApplicable("bilateral ball needs backward orbits".into()));
    }
    if center.len() != src.space().dim() {
        return Err(Error::DimensionMismatch { expected: src.space().dim(), got: center.len() });
    }
    if !src.space().contains(center) {
        return Err(Error::InvalidParameter(format!("center {center:?} lies outside the window")));
    }
    Ok(())
}

/// Ball over any orbit source (tabulated or computed on demand).
pub fn ball_in<O: OrbitSource + ?Sized>(src: &O, center: &[f64], c: f64, bilateral: bool) -> Result<DynamicalBall> {
    check_ball_args(src, center, c, bilateral)?;
    let n = src.horizon();
    let orbit = point_orbit(src.system(), src.space(), center, n, bilateral)?;
    let members = ball_profile(src, &orbit, c, bilateral).into_iter().map(|m| m.0).collect();
    Ok(DynamicalBall {
        center: Point::new(center),
        c,
        horizon: n,
        members: PointSet::from_sorted(members)?,
        bilateral,
        truncated: orbit.truncated,
        forward_horizon: orbit.forward.len() - 1,
        backward_horizon: if bilateral { orbit.backward.len() - 1 } else { 0 },
    })
}

/// Members of `S_c(center)` paired with their largest orbit distance to
/// the center over the constrained indices.
pub fn ball_distances<O: OrbitSource + ?Sized>(
    src: &O,
    center: &[f64],
    c: f64,
    bilateral: bool,
) -> Result<Vec<(usize, f64)>> {
    check_ball_args(src, center, c, bilateral)?;
    let orbit = point_orbit(src.system(), src.space(), center, src.horizon(), bilateral)?;
    Ok(ball_profile(src, &orbit, c, bilateral))
}

/// `S_c(center)` on the table's grid. Indices `0..=N`, plus `-N..=-1` when
/// bilateral. A center that leaves the window at step `i₀` only constrains
/// indices before `i₀`, and the ball is marked truncated.
pub fn dynamical_ball(table: &OrbitTable, center: &[f64], c: f64, bilateral: bool) -> Result<DynamicalBall> {
    ball_in(table, center, c, bilateral)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingEvidence {
    pub center: Point,
    pub spacings: Vec<f64>,
    pub cardinalities: Vec<usize>,
    pub growth_exponent: f64,
    pub truncated: bool,
}

/// Least-squares slope of `ln(card)` against `ln(1/h)`; 0 for one level.
pub fn log_log_slope(spacings: &[f64], cardinalities: &[usize]) -> f64 {
    let n = spacings.len().min(cardinalities.len());
    if n < 2 {
        return 0.0;
    }
    let xs: Vec<f64> = spacings[..n].iter().map(|h| -h.ln()).collect();
    let ys: Vec<f64> = cardinalities[..n].iter().map(|&k| (k.max(1) as f64).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Validates refinement factors and returns the refined spaces, base first.
pub fn refinement_levels(space: &SampledSpace, refinements: &[usize]) -> Result<Vec<SampledSpace>> {
    if refinements.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("refinement factors must strictly increase".into()));
    }
    let mut levels = vec![space.clone()];
    for &f in refinements {
        levels.push(space.refine(f)?);
    }
    Ok(levels)
}

/// Recomputes `S_c(center)` on each refinement of `space`.
pub fn ball_scaling(
    seq: &MapSequence,
    space: &SampledSpace,
    center: &[f64],
    c: f64,
    refinements: &[usize],
    horizon: usize,
    bilateral: bool,
) -> Result<ScalingEvidence> {
    if !space.is_refinable() {
        return Err(Error::NotRefinable("integer lattices are already exact".into()));
    }
    if refinements.is_empty() {
        return Err(Error::InvalidParameter("at least one refinement factor is required".into()));
    }
    let mut spacings = Vec::new();
    let mut cardinalities = Vec::new();
    let mut truncated = false;
    for level in refinement_levels(space, refinements)? {
        spacings.push(level.spacing());
        let src = LazyOrbits { space: level, seq: seq.clone(), horizon, bilateral };
        let ball = ball_in(&src, center, c, bilateral)?;
        truncated |= ball.truncated;
        cardinalities.push(ball.len());
    }
    Ok(ScalingEvidence {
        center: Point::new(center),
        growth_exponent: log_log_slope(&spacings, &cardinalities),
        spacings,
        cardinalities,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::space::{build_grid, MetricFn};
    use crate::system::build_orbit_table;
    use proptest::prelude::*;

    fn identity_circle(h: f64) -> (MapSequence, SampledSpace) {
        let seq = MapSequence::new("id", 1, |_, _| {}).with_inverse(|_, _| {});
        (seq, build_grid(&[], h, MetricFn::circle()).unwrap())
    }

    #[test]
    fn identity_ball_is_metric_ball() {
        let (seq, space) = identity_circle(1.0 / 64.0);
        let t = build_orbit_table(&seq, &space, 5, true).unwrap();
        let ball = dynamical_ball(&t, &[0.5], 0.1, false).unwrap();
        assert_eq!(ball.len(), 13);
        assert_eq!(ball.members.indices(), &space.within(&[0.5], 0.1)[..]);
    }

    #[test]
    fn lattice_translation_ball_is_singleton() {
        let e = catalog::example_3_2();
        let lattice = e.space("lattice").unwrap();
        let t = build_orbit_table(&e.system, &lattice, 10, true).unwrap();
        for x in [-20.0, 0.0, 3.0] {
            let ball = dynamical_ball(&t, &[x], 0.5, true).unwrap();
            assert_eq!(ball.members.points(&lattice), vec![Point::new(&[x])]);
        }
    }

    #[test]
    fn example_4_1_ball_shape() {
        let e = catalog::example_4_1();
        let space = build_grid(&[], 1.0 / 32.0, MetricFn::torus(3)).unwrap();
        let t = build_orbit_table(&e.system, &space, 10, true).unwrap();
        let ball = dynamical_ball(&t, &[0.5, 0.25, 0.25], 0.1, true).unwrap();
        for p in ball.members.points(&space) {
            assert!((p[0] - 0.5).abs() <= 0.1 + 1e-12);
            assert_eq!((p[1], p[2]), (0.25, 0.25));
        }
        // θ ∈ {0.5 ± k/32 : k ≤ 3}
        assert_eq!(ball.len(), 7);
    }

    #[test]
    fn argument_errors() {
        let (seq, space) = identity_circle(1.0 / 16.0);
        let t = build_orbit_table(&seq, &space, 3, false).unwrap();
        assert!(dynamical_ball(&t, &[0.5], 0.0, false).is_err());
        assert!(dynamical_ball(&t, &[0.5], -1.0, false).is_err());
        assert!(matches!(dynamical_ball(&t, &[0.5], 0.1, true), Err(Error::NotApplicable(_))));
        let lattice = catalog::example_3_2().space("lattice").unwrap();
        assert!(matches!(
            ball_scaling(&seq, &lattice, &[0.0], 0.5, &[2], 3, false),
            Err(Error::DimensionMismatch { .. }) | Err(Error::NotRefinable(_))
        ));
    }

    #[test]
    fn translation_window_scaling() {
        let e = catalog::example_3_2();
        let window = e.space("window").unwrap();
        let ev = ball_scaling(&e.system, &window, &[0.0], 0.5, &[2, 4], 10, false).unwrap();
        assert_eq!(ev.cardinalities, vec![101, 201, 401]);
        assert!((ev.growth_exponent - 1.0).abs() < 0.02);
        assert!(ev.truncated);
    }

    #[test]
    fn doubling_scaling_is_flat() {
        let e = catalog::doubling();
        let space = e.default_space().unwrap();
        for x in [0.0, 0.25, 0.7109375] {
            let ev = ball_scaling(&e.system, &space, &[x], 0.2, &[2, 4], 20, false).unwrap();
            assert_eq!(ev.cardinalities, vec![1, 1, 1]);
            assert_eq!(ev.growth_exponent, 0.0);
        }
    }

    #[test]
    fn identity_scaling_tracks_dimension() {
        let seq = MapSequence::new("id2", 2, |_, _| {});
        let space = build_grid(&[], 1.0 / 16.0, MetricFn::torus(2)).unwrap();
        let ev = ball_scaling(&seq, &space, &[0.5, 0.5], 0.2, &[2, 4], 3, false).unwrap();
        assert!((ev.growth_exponent - 2.0).abs() < 0.25, "{ev:?}");
    }

    #[test]
    fn rotation_ball_equals_static_ball() {
        let e = catalog::rotation();
        let space = e.default_space().unwrap();
        let t = build_orbit_table(&e.system, &space, 20, true).unwrap();
        for idx in space.members() {
            let x = space.point(idx);
            let ball = dynamical_ball(&t, &x, 0.1, false).unwrap();
            assert_eq!(ball.members.indices(), &space.within(&x, 0.1)[..]);
        }
    }

    #[test]
    fn slope_of_exact_power_law() {
        let hs = [0.1, 0.05, 0.025];
        assert!((log_log_slope(&hs, &[10, 20, 40]) - 1.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&hs[..1], &[7]), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn monotone_in_c_and_horizon(
            which in 0usize..4, center in 0usize..4096, c1 in 0.01f64..0.3, dc in 0.0f64..0.3,
            n1 in 1usize..8, dn in 0usize..8,
        ) {
            let entry = [catalog::doubling(), catalog::rotation(), catalog::catmap(), catalog::interval_square()][which].clone();
            let space = entry.default_space().unwrap();
            let idx = space.members()[center % space.len()];
            let x = space.point(idx);
            let c2 = c1 + dc;
            let n2 = n1 + dn;
            let t = build_orbit_table(&entry.system, &space, n2, false).unwrap();
            let short = LazyOrbits { space: space.clone(), seq: entry.system.clone(), horizon: n1, bilateral: false };
            let small = dynamical_ball(&t, &x, c1, false).unwrap();
            let big = dynamical_ball(&t, &x, c2, false).unwrap();
            prop_assert!(small.members.is_subset(&big.members));
            prop_assert!(small.contains(idx));
            let early = ball_in(&short, &x, c1, false).unwrap();
            prop_assert!(small.members.is_subset(&early.members));
        }

        #[test]
        fn bilateral_ball_inside_forward_ball(which in 0usize..3, center in 0usize..4096, c in 0.02f64..0.3) {
            let entry = [catalog::rotation(), catalog::catmap(), catalog::interval_square()][which].clone();
            let space = entry.default_space().unwrap();
            let x = space.point(space.members()[center % space.len()]);
            let t = build_orbit_table(&entry.system, &space, 6, true).unwrap();
            let fwd = dynamical_ball(&t, &x, c, false).unwrap();
            let both = dynamical_ball(&t, &x, c, true).unwrap();
            prop_assert!(both.members.is_subset(&fwd.members));
        }
    }
}
