//! Small connected grid subsets standing in for subcontinua.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::space::SampledSpace;

/// Segment lengths, in grid cells.
pub const SEGMENT_CELLS: [i64; 3] = [2, 4, 8];

/// Grid points connected through axis neighbors (one spacing apart).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Continuum {
    pub indices: Vec<usize>,
}

/// Axis segments of 2, 4 and 8 cells starting at each center, plus
/// `random` seeded blobs grown by random axis steps.
pub fn generate_continua(space: &SampledSpace, centers: &[usize], random: usize, seed: u64) -> Vec<Continuum> {
    let mut out = Vec::new();
    for &idx in centers {
        for axis in 0..space.dim() {
            for &cells in &SEGMENT_CELLS {
                let seg: Option<Vec<usize>> = (0..=cells).map(|k| space.step_index(idx, axis, k)).collect();
                let Some(mut seg) = seg else { continue };
                seg.sort_unstable();
                seg.dedup();
                if seg.len() >= 2 && seg.iter().all(|&j| space.is_member(j)) {
                    out.push(Continuum { indices: seg });
                }
            }
        }
    }
    let members = space.members();
    if members.len() < 2 {
        return out;
    }
    let mut r = rng::stream(seed, "continua");
    for _ in 0..random {
        let size = r.random_range(2..=12usize);
        let mut blob = vec![members[r.random_range(0..members.len())]];
        let mut tries = 0;
        while blob.len() < size && tries < 64 * size {
            tries += 1;
            let from = blob[r.random_range(0..blob.len())];
            let nbrs = space.axis_neighbors(from);
            if nbrs.is_empty() {
                break;
            }
            let next = nbrs[r.random_range(0..nbrs.len())];
            if !blob.contains(&next) {
                blob.push(next);
            }
        }
        if blob.len() >= 2 {
            blob.sort_unstable();
            out.push(Continuum { indices: blob });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_grid, MetricFn};

    fn connected(space: &SampledSpace, k: &Continuum) -> bool {
        let mut seen = vec![k.indices[0]];
        let mut stack = vec![k.indices[0]];
        while let Some(i) = stack.pop() {
            for j in space.axis_neighbors(i) {
                if k.indices.contains(&j) && !seen.contains(&j) {
                    seen.push(j);
                    stack.push(j);
                }
            }
        }
        seen.len() == k.indices.len()
    }

    #[test]
    fn continua_are_connected_and_nondegenerate() {
        let space = build_grid(&[], 1.0 / 16.0, MetricFn::torus(2)).unwrap();
        let centers: Vec<usize> = (0..space.len()).step_by(7).collect();
        let all = generate_continua(&space, &centers, 100, 3);
        assert!(all.len() >= centers.len() * 6 + 90);
        for k in &all {
            assert!(k.indices.len() >= 2);
            assert!(connected(&space, k));
            for w in k.indices.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
        assert_eq!(all, generate_continua(&space, &centers, 100, 3));
    }

    #[test]
    fn segments_stay_inside_windows() {
        let space = build_grid(&[(0.0, 1.0)], 0.125, MetricFn::euclidean(1)).unwrap();
        let last = space.len() - 1;
        let segs = generate_continua(&space, &[last], 0, 0);
        assert!(segs.is_empty());
        let segs = generate_continua(&space, &[0], 0, 0);
        assert_eq!(segs.iter().map(|k| k.indices.len()).collect::<Vec<_>>(), vec![3, 5, 9]);
    }
}
