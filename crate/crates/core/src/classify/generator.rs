//! Finite covers and bisequence intersections
//! `⋂_{|m| ≤ L} (φ₁ᵐ)⁻¹(B̄_m)` on the grid.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::balls::MEMBERSHIP_EPS;
use crate::error::{Error, Result};
use crate::rng;
use crate::space::{AxisKind, Point, SampledSpace};
use crate::system::OrbitTable;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorWitness {
    /// Anchor point whose orbit chose the bisequence.
    pub anchor: Point,
    /// Centers of `B_m` for `m = -L..=L` (`None` where the anchor escaped).
    pub sequence: Vec<Option<Point>>,
    pub members: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorCover {
    pub centers: Vec<Point>,
    pub radius: f64,
    pub max_intersection_cardinality: usize,
    pub sequences_tested: usize,
    /// The bisequence attaining the maximum.
    pub witness: Option<GeneratorWitness>,
}

/// Cover centers on the sub-grid of every `s`-th point, `s = ⌊r/h⌋`.
fn cover_centers(space: &SampledSpace, radius: f64) -> Vec<usize> {
    let stride = ((radius / space.spacing()) + 1e-9).floor().max(1.0) as usize;
    let axes = space.axes();
    let mut out = Vec::new();
    for idx in 0..space.grid_len() {
        let mut rem = idx;
        let mut on = true;
        for a in axes.iter().rev() {
            let k = rem % a.count;
            rem /= a.count;
            // keep the last point of line axes so window ends are covered
            let last = a.kind != AxisKind::Periodic && k + 1 == a.count;
            on &= k % stride == 0 || last;
        }
        if on {
            out.push(idx);
        }
    }
    out
}

/// Samples bisequences of closed cover balls realized by the orbit of a
/// random anchor `p` (each `B_m` is a random cover ball containing
/// `φ₁ᵐ(p)`), and counts grid points whose orbits follow the same balls.
/// Indices where the anchor has left the window, or lies in no cover ball,
/// are skipped.
pub fn generator_check(
    table: &OrbitTable,
    cover_radius: f64,
    num_sequences: usize,
    seq_length: usize,
    seed: u64,
) -> Result<GeneratorCover> {
    let space = table.space();
    if !table.is_bilateral() {
        return Err(Error::NotApplicable("generator check needs a bilateral table".into()));
    }
    if !space.flags().compact {
        return Err(Error::NotApplicable("generator check needs a compact space".into()));
    }
    if !(cover_radius > 0.0) {
        return Err(Error::InvalidParameter("cover radius must be positive".into()));
    }
    if seq_length > table.horizon() {
        return Err(Error::InvalidParameter(format!(
            "sequence length {seq_length} exceeds horizon {}",
            table.horizon()
        )));
    }
    let metric = space.metric();
    let lim = cover_radius + MEMBERSHIP_EPS;
    let centers: Vec<Point> = cover_centers(space, cover_radius).into_iter().map(|i| space.point(i)).collect();
    for p in space.points() {
        if !centers.iter().any(|c| metric.dist(c, &p) <= lim) {
            return Err(Error::InvalidParameter(format!("cover misses {p:?}")));
        }
    }
    let members = space.members();
    let mut r = rng::stream(seed, "generator");
    let len = seq_length as isize;
    let mut best: Option<(usize, GeneratorWitness)> = None;
    for _ in 0..num_sequences {
        let anchor = members[r.random_range(0..members.len())];
        let mut seq: Vec<Option<usize>> = Vec::with_capacity(2 * seq_length + 1);
        for m in -len..=len {
            if table.escaped(anchor, m) {
                seq.push(None);
                continue;
            }
            let q = table.at(anchor, m).expect("in range");
            let containing: Vec<usize> = (0..centers.len()).filter(|&c| metric.dist(&centers[c], q) <= lim).collect();
            // off-grid orbit points of a lattice model lie in no cover ball
            if containing.is_empty() {
                seq.push(None);
                continue;
            }
            seq.push(Some(containing[r.random_range(0..containing.len())]));
        }
        let b0 = centers[seq[seq_length].expect("anchor is inside at index 0")];
        let mut hits = Vec::new();
        space.for_each_within(&b0, cover_radius, |y| {
            let follows = (-len..=len).zip(&seq).all(|(m, b)| match b {
                None => true,
                Some(b) => {
                    !table.escaped(y, m) && metric.dist(table.at(y, m).expect("in range"), &centers[*b]) <= lim
                }
            });
            if follows {
                hits.push(y);
            }
        });
        if best.as_ref().is_none_or(|(k, _)| hits.len() > *k) {
            hits.sort_unstable();
            best = Some((
                hits.len(),
                GeneratorWitness {
                    anchor: space.point(anchor),
                    sequence: seq.iter().map(|b| b.map(|b| centers[b])).collect(),
                    members: hits.iter().map(|&y| space.point(y)).collect(),
                },
            ));
        }
    }
    Ok(GeneratorCover {
        radius: cover_radius,
        max_intersection_cardinality: best.as_ref().map_or(0, |b| b.0),
        sequences_tested: num_sequences,
        witness: best.map(|b| b.1),
        centers,
    })
}
