//! Expansiveness verdicts from dynamical-ball data.

mod continua;
mod generator;
mod points;

pub use continua::{generate_continua, Continuum};
pub use generator::{generator_check, GeneratorCover, GeneratorWitness};
pub use points::{
    alpha_limit, cluster_diameter, converging_semiorbits, fixed_points, fixtol, omega_limit,
    periodic_points, stable_points,
};

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balls::{ball_profile, log_log_slope, refinement_levels};
use crate::error::{Error, Result};
use crate::rng;
use crate::space::{Point, SampledSpace, SpaceDescriptor};
use crate::system::{build_orbit_table, point_orbit, LazyOrbits, MapSequence, OrbitTable, PointSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub c: f64,
    pub horizon: usize,
    /// Refinement factors for the cardinality-scaling proxy. Empty means
    /// a single ×2 level on refinable spaces.
    pub refinements: Vec<usize>,
    /// Also compute the two-sided variant when the system is invertible.
    pub bilateral: bool,
    pub seed: u64,
    /// Growth exponents below this count as finite/countable.
    pub threshold: f64,
    /// Grid neighborhood radius of the interior-at-resolution test.
    pub interior_m: usize,
    /// Spaces up to this size use every point as a center.
    pub all_centers_below: usize,
    /// Otherwise this many seeded centers are drawn.
    pub sampled_centers: usize,
    pub random_continua: usize,
}

impl ClassifyParams {
    pub fn new(c: f64, horizon: usize) -> ClassifyParams {
        ClassifyParams {
            c,
            horizon,
            refinements: vec![2],
            bilateral: true,
            seed: 0,
            threshold: 0.25,
            interior_m: 2,
            all_centers_below: 2048,
            sampled_centers: 256,
            random_continua: 100,
        }
    }

    pub fn for_entry(entry: &crate::catalog::CatalogEntry) -> ClassifyParams {
        let d = &entry.defaults;
        ClassifyParams { refinements: d.refinements.clone(), bilateral: d.bilateral, ..Self::new(d.c, d.horizon) }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_refinements(mut self, r: Vec<usize>) -> Self {
        self.refinements = r;
        self
    }

    pub fn with_bilateral(mut self, b: bool) -> Self {
        self.bilateral = b;
        self
    }

    pub fn with_horizon(mut self, n: usize) -> Self {
        self.horizon = n;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidParameter(format!("c = {} must be positive", self.c)));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be ≥ 1".into()));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::InvalidParameter("threshold must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    /// Largest ball cardinality when the scaling proxy reports finite balls.
    pub n_expansive: Option<usize>,
    pub aleph0_proxy: bool,
    /// `None` on spaces with isolated points.
    pub cw_expansive: Option<bool>,
    pub meagre_expansive: bool,
}

impl Verdicts {
    /// First broken link of `n ⇒ ℵ₀ ⇒ cw ⇒ meagre`.
    pub fn chain_violation(&self) -> Option<&'static str> {
        if self.n_expansive.is_some() && !self.aleph0_proxy {
            Some("n-expansive but not aleph0")
        } else if self.aleph0_proxy && self.cw_expansive == Some(false) {
            Some("aleph0 but not cw-expansive")
        } else if self.cw_expansive == Some(true) && !self.meagre_expansive {
            Some("cw-expansive but not meagre-expansive")
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSummary {
    pub center: Point,
    /// `|S_c(center)|` at the base grid and each refinement.
    pub cardinalities: Vec<usize>,
    pub growth_exponent: f64,
    /// Normalized count of interior-at-resolution points of the base ball.
    pub interior_measure: f64,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelScaling {
    pub spacings: Vec<f64>,
    /// Largest ball at each level.
    pub max_cardinalities: Vec<usize>,
    pub max_growth_exponent: f64,
    pub exponent_witness: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CardinalityWitness {
    pub center: Point,
    pub cardinality: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteriorWitness {
    pub center: Point,
    /// Its whole grid neighborhood lies in the ball.
    pub interior_point: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuumWitness {
    pub points: Vec<Point>,
    /// Largest image diameter seen over the constrained indices.
    pub max_diameter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub bilateral: bool,
    pub verdicts: Verdicts,
    pub scaling: LevelScaling,
    pub largest_ball: CardinalityWitness,
    pub continua_tested: usize,
    /// A continuum that never grew past `c`.
    pub cw_witness: Option<ContinuumWitness>,
    pub interior_witness: Option<InteriorWitness>,
    pub max_interior_measure: f64,
    pub truncated_centers: usize,
    pub balls: Vec<BallSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub system: String,
    pub space: SpaceDescriptor,
    pub c: f64,
    pub horizon: usize,
    pub refinements: Vec<usize>,
    pub seed: u64,
    pub forward: VariantReport,
    pub bilateral: Option<VariantReport>,
}

impl ClassificationReport {
    /// The two-sided variant when present, else the forward one.
    pub fn primary(&self) -> &VariantReport {
        self.bilateral.as_ref().unwrap_or(&self.forward)
    }

    pub fn verdicts(&self) -> Verdicts {
        self.primary().verdicts
    }

    pub fn variants(&self) -> impl Iterator<Item = &VariantReport> {
        std::iter::once(&self.forward).chain(self.bilateral.as_ref())
    }

    /// Chain violations, only on locally connected spaces without isolated
    /// points (elsewhere the chain is not claimed).
    pub fn chain_violations(&self) -> Vec<(bool, &'static str)> {
        let f = self.space.flags;
        if !f.locally_connected || f.has_isolated_points {
            return Vec::new();
        }
        self.variants().filter_map(|v| v.verdicts.chain_violation().map(|s| (v.bilateral, s))).collect()
    }
}

/// Seeded choice of ball centers, sorted.
pub fn sample_centers(space: &SampledSpace, params: &ClassifyParams) -> Vec<usize> {
    let members = space.members();
    if members.len() <= params.all_centers_below || members.len() <= params.sampled_centers {
        return members;
    }
    let mut r = rng::stream(params.seed, "centers");
    let mut picked: Vec<usize> =
        sample(&mut r, members.len(), params.sampled_centers).into_iter().map(|i| members[i]).collect();
    picked.sort_unstable();
    picked
}

/// Count of ball members whose `m`-step grid neighborhood lies in the ball,
/// and the first such member.
fn interior_of(space: &SampledSpace, members: &[usize], m: usize) -> (usize, Option<usize>) {
    let mut count = 0;
    let mut first = None;
    for &y in members {
        if space.grid_neighborhood(y, m, |j| members.binary_search(&j).is_ok()) {
            count += 1;
            first.get_or_insert(y);
        }
    }
    (count, first)
}

/// Empirical measure of the interior-at-resolution of a point set.
pub fn interior_measure(space: &SampledSpace, set: &PointSet, m: usize) -> f64 {
    if space.is_empty() {
        return 0.0;
    }
    interior_of(space, set.indices(), m).0 as f64 / space.len() as f64
}

/// Holds the orbit table, refined levels and centers for one
/// (system, space, c, N) configuration.
pub struct Classifier {
    seq: MapSequence,
    space: SampledSpace,
    params: ClassifyParams,
    table: OrbitTable,
    levels: Vec<LazyOrbits>,
    centers: Vec<usize>,
    continua: Vec<Continuum>,
}

impl Classifier {
    pub fn new(seq: &MapSequence, space: &SampledSpace, params: &ClassifyParams) -> Result<Classifier> {
        params.validate()?;
        let bilateral = params.bilateral && seq.is_invertible();
        let table = build_orbit_table(seq, space, params.horizon, bilateral)?;
        let levels = if space.is_refinable() {
            let factors = if params.refinements.is_empty() { vec![2] } else { params.refinements.clone() };
            refinement_levels(space, &factors)?
                .into_iter()
                .skip(1)
                .map(|s| LazyOrbits { space: s, seq: seq.clone(), horizon: params.horizon, bilateral })
                .collect()
        } else {
            Vec::new()
        };
        let centers = sample_centers(space, params);
        let continua = if space.flags().has_isolated_points {
            Vec::new()
        } else {
            generate_continua(space, &centers, params.random_continua, params.seed)
        };
        Ok(Classifier {
            seq: seq.clone(),
            space: space.clone(),
            params: params.clone(),
            table,
            levels,
            centers,
            continua,
        })
    }

    pub fn table(&self) -> &OrbitTable {
        &self.table
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn continua(&self) -> &[Continuum] {
        &self.continua
    }

    fn interior_m(&self) -> usize {
        if self.space.flags().has_isolated_points {
            0
        } else {
            self.params.interior_m
        }
    }

    fn check_variant(&self, bilateral: bool) -> Result<()> {
        if bilateral && !self.table.is_bilateral() {
            return Err(Error::MissingInverse(self.seq.name().to_string()));
        }
        Ok(())
    }

    /// Per-center ball data and the first interior point of each base ball.
    fn sweep(&self, bilateral: bool) -> Result<Vec<(BallSummary, Option<usize>)>> {
        self.check_variant(bilateral)?;
        let c = self.params.c;
        let n = self.params.horizon;
        let m = self.interior_m();
        let mut spacings = vec![self.space.spacing()];
        spacings.extend(self.levels.iter().map(|l| l.space.spacing()));
        self.centers
            .par_iter()
            .map(|&idx| {
                let x = self.space.point(idx);
                let orbit = point_orbit(&self.seq, &self.space, &x, n, bilateral)?;
                let members: Vec<usize> =
                    ball_profile(&self.table, &orbit, c, bilateral).into_iter().map(|p| p.0).collect();
                let mut cards = vec![members.len()];
                for level in &self.levels {
                    cards.push(ball_profile(level, &orbit, c, bilateral).len());
                }
                let (inside, first) = interior_of(&self.space, &members, m);
                Ok((
                    BallSummary {
                        center: x,
                        growth_exponent: log_log_slope(&spacings, &cards),
                        cardinalities: cards,
                        interior_measure: inside as f64 / self.space.len() as f64,
                        truncated: orbit.truncated,
                    },
                    first,
                ))
            })
            .collect()
    }

    /// Largest image diameter of a continuum over its constrained indices,
    /// stopping early once it exceeds `c`.
    fn continuum_growth(&self, cont: &Continuum, bilateral: bool) -> f64 {
        let c = self.params.c;
        let metric = self.space.metric();
        let n = self.params.horizon;
        let limit = |backward: bool| {
            cont.indices
                .iter()
                .filter_map(|&j| self.table.escape_index(j, backward))
                .map(|e| e - 1)
                .min()
                .unwrap_or(n)
        };
        let mut worst = 0.0f64;
        let mut ranges: Vec<isize> = (0..=limit(false) as isize).collect();
        if bilateral {
            ranges.extend((1..=limit(true) as isize).map(|i| -i));
        }
        for i in ranges {
            let pts: Vec<&[f64]> = cont.indices.iter().map(|&j| self.table.at(j, i).expect("in range")).collect();
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    worst = worst.max(metric.dist(pts[a], pts[b]));
                }
            }
            if worst > c {
                break;
            }
        }
        worst
    }

    fn cw_result(&self, bilateral: bool) -> (Option<bool>, Option<ContinuumWitness>) {
        if self.space.flags().has_isolated_points {
            return (None, None);
        }
        let c = self.params.c;
        let growth: Vec<f64> = self.continua.par_iter().map(|k| self.continuum_growth(k, bilateral)).collect();
        let witness = self.continua.iter().zip(&growth).find(|(_, g)| **g <= c).map(|(k, g)| ContinuumWitness {
            points: k.indices.iter().map(|&j| self.space.point(j)).collect(),
            max_diameter: *g,
        });
        (Some(witness.is_none()), witness)
    }

    fn variant(&self, bilateral: bool) -> Result<VariantReport> {
        let sweep = self.sweep(bilateral)?;
        let levels = sweep.first().map_or(1, |s| s.0.cardinalities.len());
        let mut spacings = vec![self.space.spacing()];
        spacings.extend(self.levels.iter().map(|l| l.space.spacing()));
        let mut max_cards = vec![0usize; levels];
        let mut max_exp = f64::NEG_INFINITY;
        let mut exp_witness = Point::zeros(self.space.dim());
        let mut largest = CardinalityWitness { center: Point::zeros(self.space.dim()), cardinality: 0 };
        let mut interior_witness = None;
        let mut max_interior = 0.0f64;
        for (s, first) in &sweep {
            for (m, k) in max_cards.iter_mut().zip(&s.cardinalities) {
                *m = (*m).max(*k);
            }
            if s.growth_exponent > max_exp {
                max_exp = s.growth_exponent;
                exp_witness = s.center;
            }
            if s.cardinalities[0] > largest.cardinality {
                largest = CardinalityWitness { center: s.center, cardinality: s.cardinalities[0] };
            }
            max_interior = max_interior.max(s.interior_measure);
            if interior_witness.is_none() {
                if let Some(y) = first {
                    interior_witness = Some(InteriorWitness { center: s.center, interior_point: self.space.point(*y) });
                }
            }
        }
        if sweep.is_empty() {
            max_exp = 0.0;
        }
        let aleph0 = !self.space.is_refinable() || max_exp < self.params.threshold;
        let (cw, cw_witness) = self.cw_result(bilateral);
        Ok(VariantReport {
            bilateral,
            verdicts: Verdicts {
                n_expansive: aleph0.then_some(largest.cardinality),
                aleph0_proxy: aleph0,
                cw_expansive: cw,
                meagre_expansive: interior_witness.is_none(),
            },
            scaling: LevelScaling {
                spacings,
                max_cardinalities: max_cards,
                max_growth_exponent: max_exp,
                exponent_witness: exp_witness,
            },
            largest_ball: largest,
            continua_tested: if cw.is_some() { self.continua.len() } else { 0 },
            cw_witness,
            interior_witness,
            max_interior_measure: max_interior,
            truncated_centers: sweep.iter().filter(|s| s.0.truncated).count(),
            balls: sweep.into_iter().map(|s| s.0).collect(),
        })
    }

    /// Max `|S_c(x)|` over centers, provided the scaling proxy says balls
    /// stay finite; `None` otherwise.
    pub fn n_expansive(&self, bilateral: bool) -> Result<Option<usize>> {
        Ok(self.variant(bilateral)?.verdicts.n_expansive)
    }

    pub fn aleph0(&self, bilateral: bool) -> Result<bool> {
        if !self.space.is_refinable() {
            self.check_variant(bilateral)?;
            return Ok(true);
        }
        Ok(self.variant(bilateral)?.verdicts.aleph0_proxy)
    }

    pub fn meagre(&self, bilateral: bool) -> Result<bool> {
        Ok(self.measure_check(bilateral)?.iter().all(|(_, mu)| *mu == 0.0))
    }

    /// `Some(true)` when every generated continuum grows past `c`.
    pub fn cw(&self, bilateral: bool) -> Result<Option<bool>> {
        self.check_variant(bilateral)?;
        Ok(self.cw_result(bilateral).0)
    }

    /// Normalized counting measure of the interior-at-resolution of each
    /// sampled ball.
    pub fn measure_check(&self, bilateral: bool) -> Result<Vec<(Point, f64)>> {
        self.check_variant(bilateral)?;
        let m = self.interior_m();
        self.centers
            .par_iter()
            .map(|&idx| {
                let x = self.space.point(idx);
                let orbit = point_orbit(&self.seq, &self.space, &x, self.params.horizon, bilateral)?;
                let members: Vec<usize> =
                    ball_profile(&self.table, &orbit, self.params.c, bilateral).into_iter().map(|p| p.0).collect();
                Ok((x, interior_of(&self.space, &members, m).0 as f64 / self.space.len() as f64))
            })
            .collect()
    }

    pub fn report(&self) -> Result<ClassificationReport> {
        let forward = self.variant(false)?;
        let bilateral = if self.table.is_bilateral() { Some(self.variant(true)?) } else { None };
        Ok(ClassificationReport {
            system: self.seq.name().to_string(),
            space: self.space.descriptor(),
            c: self.params.c,
            horizon: self.params.horizon,
            refinements: self.levels.iter().map(|l| (self.space.spacing() / l.space.spacing()).round() as usize).collect(),
            seed: self.params.seed,
            forward,
            bilateral,
        })
    }
}

/// Full report: forward verdicts, plus two-sided ones for invertible
/// systems when `params.bilateral` is set.
pub fn classify(seq: &MapSequence, space: &SampledSpace, params: &ClassifyParams) -> Result<ClassificationReport> {
    Classifier::new(seq, space, params)?.report()
}

pub fn classify_n_expansive(seq: &MapSequence, space: &SampledSpace, params: &ClassifyParams) -> Result<Option<usize>> {
    let k = Classifier::new(seq, space, params)?;
    k.n_expansive(k.table.is_bilateral())
}

pub fn classify_aleph0(seq: &MapSequence, space: &SampledSpace, params: &ClassifyParams) -> Result<bool> {
    let k = Classifier::new(seq, space, params)?;
    k.aleph0(k.table.is_bilateral())
}

pub fn classify_meagre(seq: &MapSequence, space: &SampledSpace, params: &ClassifyParams) -> Result<bool> {
    let k = Classifier::new(seq, space, params)?;
    k.meagre(k.table.is_bilateral())
}

/// Errors on spaces with isolated points, where no continuum is
/// non-degenerate.
pub fn classify_cw(seq: &MapSequence, space: &SampledSpace, params: &ClassifyParams) -> Result<bool> {
    if space.flags().has_isolated_points {
        return Err(Error::NotApplicable("cw-expansiveness on a space with isolated points".into()));
    }
    let k = Classifier::new(seq, space, params)?;
    Ok(k.cw(k.table.is_bilateral())?.expect("no isolated points"))
}

pub fn measure_check(seq: &MapSequence, space: &SampledSpace, params: &ClassifyParams) -> Result<Vec<(Point, f64)>> {
    let k = Classifier::new(seq, space, params)?;
    k.measure_check(k.table.is_bilateral())
}
