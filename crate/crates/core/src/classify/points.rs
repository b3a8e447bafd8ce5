//! Fix, Per, Stab, ω/α-limit sets and converging semi-orbits on a grid.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::space::SampledSpace;
use crate::system::{OrbitTable, PointSet};

/// `max(1e-9, h·1e-3)`.
pub fn fixtol(space: &SampledSpace) -> f64 {
    crate::system::grid_tolerance(space)
}

fn members_where(space: &SampledSpace, pred: impl Fn(usize) -> bool + Sync) -> PointSet {
    let keep: Vec<usize> = space.members().into_par_iter().filter(|&i| pred(i)).collect();
    PointSet::new(keep)
}

/// `d(φ₁ⁿ p, p) ≤ fixtol` for every `1 ≤ n ≤ N`. Orbit values are used as
/// computed; window exits only matter for ball membership.
pub fn fixed_points(table: &OrbitTable) -> PointSet {
    let space = table.space();
    let tol = fixtol(space);
    let n = table.horizon();
    members_where(space, |i| {
        let p = table.at(i, 0).expect("index 0");
        (1..=n as isize).all(|k| space.metric().dist(table.at(i, k).expect("in range"), p) <= tol)
    })
}

/// Some `n ≤ N / kmax` with `d(φ₁^{nk} p, p) ≤ fixtol` for all `1 ≤ k ≤ kmax`.
pub fn periodic_points(table: &OrbitTable, kmax: usize) -> Result<PointSet> {
    let horizon = table.horizon();
    if kmax == 0 || kmax > horizon {
        return Err(Error::InvalidParameter(format!("kmax = {kmax} must lie in 1..={horizon}")));
    }
    let space = table.space();
    let tol = fixtol(space);
    Ok(members_where(space, |i| {
        let p = table.at(i, 0).expect("index 0");
        (1..=horizon / kmax).any(|n| {
            (1..=kmax).all(|k| space.metric().dist(table.at(i, (n * k) as isize).expect("in range"), p) <= tol)
        })
    }))
}

/// Orbit of `i` stays within `eps` of the orbit of `x` on every index the
/// center `x` keeps inside the window.
fn shadows(table: &OrbitTable, x: usize, y: usize, eps: f64) -> bool {
    let space = table.space();
    let lim = eps + crate::balls::MEMBERSHIP_EPS;
    let mut sides = vec![false];
    if table.is_bilateral() {
        sides.push(true);
    }
    sides.into_iter().all(|backward| {
        let h = table.escape_index(x, backward).map_or(table.horizon(), |e| e - 1);
        (1..=h as isize).all(|k| {
            let k = if backward { -k } else { k };
            !table.escaped(y, k)
                && space.metric().dist(table.at(x, k).expect("in range"), table.at(y, k).expect("in range")) <= lim
        })
    })
}

/// Stable at resolution: for each `ε`, every grid point within `ε′ = h`
/// shadows `x` within `ε` on all table indices (both directions when the
/// table is bilateral). Larger `ε′ = h·2^j` only add constraints, so `h`
/// decides the whole family.
pub fn stable_points(table: &OrbitTable, eps_list: &[f64]) -> Result<PointSet> {
    if eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("stability radii must be positive".into()));
    }
    let space = table.space();
    let h = space.spacing();
    Ok(members_where(space, |x| {
        let near = space.within(&space.point(x), h);
        eps_list.iter().all(|&eps| near.iter().all(|&y| y == x || shadows(table, x, y, eps)))
    }))
}

fn limit_set(table: &OrbitTable, idx: usize, backward: bool) -> PointSet {
    let space = table.space();
    let n = table.horizon();
    let tol = 2.0 * space.spacing();
    let mut hits: BTreeMap<usize, usize> = BTreeMap::new();
    for k in n.div_ceil(2)..=n {
        let k = if backward { -(k as isize) } else { k as isize };
        if k == 0 || table.escaped(idx, k) {
            continue;
        }
        let q = table.at(idx, k).expect("in range");
        space.for_each_within(q, tol, |j| *hits.entry(j).or_default() += 1);
    }
    PointSet::new(hits.into_iter().filter(|&(_, c)| c >= 3).map(|(j, _)| j).collect())
}

/// Grid points within `2h` of at least three orbit points with indices in
/// `[N/2, N]`.
pub fn omega_limit(table: &OrbitTable, idx: usize) -> PointSet {
    limit_set(table, idx, false)
}

/// As [`omega_limit`] over the preimage indices `[-N, -N/2]`.
pub fn alpha_limit(table: &OrbitTable, idx: usize) -> Result<PointSet> {
    if !table.is_bilateral() {
        return Err(Error::NotApplicable("alpha-limit sets need a bilateral table".into()));
    }
    Ok(limit_set(table, idx, true))
}

pub fn cluster_diameter(space: &SampledSpace, set: &PointSet) -> f64 {
    let pts = set.points(space);
    let mut d = 0.0f64;
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            d = d.max(space.metric().dist(&pts[a], &pts[b]));
        }
    }
    d
}

/// Points whose ω- and α-limit sets are each one nonempty cluster of
/// diameter at most twice the `2h` matching tolerance.
pub fn converging_semiorbits(table: &OrbitTable) -> Result<PointSet> {
    if !table.is_bilateral() {
        return Err(Error::NotApplicable("converging semi-orbits need a bilateral table".into()));
    }
    let space = table.space();
    let max_diam = 4.0 * space.spacing() + 1e-12;
    Ok(members_where(space, |i| {
        let w = limit_set(table, i, false);
        let a = limit_set(table, i, true);
        !w.is_empty() && !a.is_empty() && cluster_diameter(space, &w) <= max_diam && cluster_diameter(space, &a) <= max_diam
    }))
}
