//! Named systems with their space recipes and the verdicts they are known
//! to produce at default parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{build_grid, wrap_unit, MetricFn, SampledSpace};
use crate::system::MapSequence;

/// Stable CLI identifiers.
pub const NAMES: &[&str] = &[
    "example3.1",
    "example3.2",
    "example4.1",
    "doubling",
    "catmap",
    "rotation",
    "contraction",
    "interval-square",
    "identity",
];

/// Golden-mean rotation number `(3 − √5)/2`.
pub const GOLDEN_ALPHA: f64 = 0.381_966_011_250_105_1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceRecipe {
    pub label: String,
    /// Closed `[lo, hi]` per axis; ignored on periodic axes.
    pub window: Vec<(f64, f64)>,
    pub spacing: f64,
    pub metric: MetricFn,
    /// Overrides the constructor's `compact` flag (bounded windows standing
    /// in for ℝ are marked non-compact).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compact: Option<bool>,
}

impl SpaceRecipe {
    pub fn build(&self) -> Result<SampledSpace> {
        let space = build_grid(&self.window, self.spacing, self.metric.clone())?;
        Ok(match self.compact {
            Some(compact) => {
                let flags = space.flags();
                space.with_flags(crate::space::TopologyFlags { compact, ..flags })
            }
            None => space,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryDefaults {
    pub c: f64,
    pub horizon: usize,
    pub refinements: Vec<usize>,
    pub bilateral: bool,
}

/// Verdicts of the primary variant (bilateral when the entry is invertible
/// and its defaults ask for it).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedVerdicts {
    pub space: String,
    pub n_expansive: Option<usize>,
    pub aleph0_proxy: bool,
    pub cw_expansive: Option<bool>,
    pub meagre_expansive: bool,
    /// Where the expectation comes from.
    pub basis: String,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub summary: String,
    pub system: MapSequence,
    pub recipes: Vec<SpaceRecipe>,
    pub defaults: EntryDefaults,
    pub expected: Vec<ExpectedVerdicts>,
}

impl CatalogEntry {
    pub fn recipe(&self, label: &str) -> Result<&SpaceRecipe> {
        self.recipes.iter().find(|r| r.label == label).ok_or_else(|| {
            let known: Vec<&str> = self.recipes.iter().map(|r| r.label.as_str()).collect();
            Error::InvalidParameter(format!("{} has no space `{label}` (known: {})", self.name, known.join(", ")))
        })
    }

    pub fn space(&self, label: &str) -> Result<SampledSpace> {
        self.recipe(label)?.build()
    }

    /// The first recipe.
    pub fn default_space(&self) -> Result<SampledSpace> {
        self.recipes[0].build()
    }

    pub fn expected_for(&self, label: &str) -> Option<&ExpectedVerdicts> {
        self.expected.iter().find(|e| e.space == label)
    }
}

fn recipe(label: &str, window: &[(f64, f64)], spacing: f64, metric: MetricFn) -> SpaceRecipe {
    SpaceRecipe { label: label.into(), window: window.to_vec(), spacing, metric, compact: None }
}

fn expect(space: &str, n: Option<usize>, aleph0: bool, cw: Option<bool>, meagre: bool, basis: &str) -> ExpectedVerdicts {
    ExpectedVerdicts {
        space: space.into(),
        n_expansive: n,
        aleph0_proxy: aleph0,
        cw_expansive: cw,
        meagre_expansive: meagre,
        basis: basis.into(),
    }
}

fn defaults(c: f64, horizon: usize, refinements: &[usize], bilateral: bool) -> EntryDefaults {
    EntryDefaults { c, horizon, refinements: refinements.to_vec(), bilateral }
}

/// Integer 2×2 cat matrix `[[2,1],[1,1]]` mod 1.
#[inline]
pub fn cat(z: &mut [f64]) {
    let (a, b) = (z[0], z[1]);
    z[0] = wrap_unit(2.0 * a + b);
    z[1] = wrap_unit(a + b);
}

/// Its inverse `[[1,-1],[-1,2]]` mod 1.
#[inline]
pub fn cat_inverse(z: &mut [f64]) {
    let (a, b) = (z[0], z[1]);
    z[0] = wrap_unit(a - b);
    z[1] = wrap_unit(2.0 * b - a);
}

/// `{g, h, g², h², g³, …}` with `g(x) = 2x`, `h(x) = x/2` on a window of ℝ.
pub fn example_3_1() -> CatalogEntry {
    // φ_n scales by 2^((n+1)/2) for odd n and by 2^(-n/2) for even n
    fn factor(n: usize) -> f64 {
        if n % 2 == 1 {
            2f64.powi(n.div_ceil(2) as i32)
        } else {
            0.5f64.powi((n / 2) as i32)
        }
    }
    let system = MapSequence::new("example3.1", 1, |n, x| x[0] *= factor(n))
        .with_inverse(|n, x| x[0] /= factor(n))
        .with_modulus(factor);
    CatalogEntry {
        name: "example3.1".into(),
        summary: "alternating g(x)=2x, h(x)=x/2 powers on R; every point has period 2".into(),
        system,
        recipes: vec![
            SpaceRecipe { compact: Some(false), ..recipe("window", &[(-8.0, 8.0)], 0.01, MetricFn::euclidean(1)) },
            recipe("lattice", &[(-50.0, 50.0)], 1.0, MetricFn::lattice(1)),
        ],
        defaults: defaults(0.5, 20, &[2], true),
        expected: vec![
            // Orbits of nonzero points leave [-8, 8] within the horizon, so
            // most balls only see a few indices.
            expect("window", None, false, Some(false), false, "truncated balls on the window"),
            expect("lattice", Some(1), true, None, false, "singleton balls on the integer model"),
        ],
    }
}

/// Translations `φ_n(x) = x + n`.
pub fn example_3_2() -> CatalogEntry {
    let system = MapSequence::new("example3.2", 1, |n, x| x[0] += n as f64)
        .with_inverse(|n, x| x[0] -= n as f64)
        .with_modulus(|_| 1.0)
        .equicontinuous(true);
    CatalogEntry {
        name: "example3.2".into(),
        summary: "translations x+n on R, restricted to Z".into(),
        system,
        recipes: vec![
            SpaceRecipe { compact: Some(false), ..recipe("window", &[(-5.0, 5.0)], 0.01, MetricFn::euclidean(1)) },
            recipe("lattice", &[(-50.0, 50.0)], 1.0, MetricFn::lattice(1)),
        ],
        defaults: defaults(0.5, 10, &[2, 4], true),
        expected: vec![
            expect("window", None, false, Some(false), false, "balls are intervals [x-c, x+c]"),
            expect("lattice", Some(1), true, None, false, "lattice gaps exceed c"),
        ],
    }
}

/// `g₁(θ, z) = (θ, g(z))` on odd steps, the identity on even steps, on T³.
pub fn example_4_1() -> CatalogEntry {
    let system = MapSequence::new("example4.1", 3, |n, x| {
        if n % 2 == 1 {
            cat(&mut x[1..3]);
        }
    })
    .with_inverse(|n, x| {
        if n % 2 == 1 {
            cat_inverse(&mut x[1..3]);
        }
    })
    .with_modulus(|n| if n % 2 == 1 { 3.0 } else { 1.0 });
    CatalogEntry {
        name: "example4.1".into(),
        summary: "identity circle times cat map, alternating with the identity on T^3".into(),
        system,
        recipes: vec![recipe("torus", &[], 1.0 / 64.0, MetricFn::torus(3))],
        defaults: defaults(0.1, 10, &[2], true),
        expected: vec![expect("torus", None, false, Some(false), true, "balls are theta-arcs times one cell")],
    }
}

pub fn doubling() -> CatalogEntry {
    let system = MapSequence::new("doubling", 1, |_, x| x[0] = wrap_unit(2.0 * x[0]))
        .with_modulus(|_| 2.0)
        .autonomous(true);
    CatalogEntry {
        name: "doubling".into(),
        summary: "x -> 2x mod 1 on the circle".into(),
        system,
        recipes: vec![recipe("circle", &[], 1.0 / 512.0, MetricFn::circle())],
        defaults: defaults(0.2, 20, &[2, 4], false),
        expected: vec![expect("circle", Some(1), true, Some(true), true, "brute force: separation doubles each step")],
    }
}

pub fn catmap() -> CatalogEntry {
    let system = MapSequence::new("catmap", 2, |_, x| cat(x))
        .with_inverse(|_, x| cat_inverse(x))
        .with_modulus(|_| 3.0)
        .autonomous(true);
    CatalogEntry {
        name: "catmap".into(),
        summary: "autonomous cat map [[2,1],[1,1]] on T^2".into(),
        system,
        recipes: vec![recipe("torus", &[], 1.0 / 64.0, MetricFn::torus(2))],
        defaults: defaults(0.1, 10, &[2], true),
        expected: vec![expect("torus", Some(1), true, Some(true), true, "brute force: hyperbolic splitting")],
    }
}

/// `φ_n(x) = x + nα mod 1`.
pub fn rotation() -> CatalogEntry {
    let shift = |n: usize| (n as f64 * GOLDEN_ALPHA).fract();
    let system = MapSequence::new("rotation", 1, move |n, x| x[0] = wrap_unit(x[0] + shift(n)))
        .with_inverse(move |n, x| x[0] = wrap_unit(x[0] - shift(n)))
        .with_modulus(|_| 1.0)
        .equicontinuous(true);
    CatalogEntry {
        name: "rotation".into(),
        summary: "rotations by n*alpha, alpha the golden mean conjugate".into(),
        system,
        recipes: vec![recipe("circle", &[], 1.0 / 64.0, MetricFn::circle())],
        defaults: defaults(0.1, 20, &[2, 4], true),
        expected: vec![expect("circle", None, false, Some(false), false, "isometries: balls are arcs")],
    }
}

pub fn contraction() -> CatalogEntry {
    let system = MapSequence::new("contraction", 1, |_, x| x[0] *= 0.5)
        .with_modulus(|_| 0.5)
        .equicontinuous(true)
        .autonomous(true);
    CatalogEntry {
        name: "contraction".into(),
        summary: "x -> x/2 on [-1, 1]".into(),
        system,
        recipes: vec![recipe("interval", &[(-1.0, 1.0)], 1.0 / 64.0, MetricFn::euclidean(1))],
        defaults: defaults(0.1, 20, &[2], false),
        expected: vec![expect("interval", None, false, Some(false), false, "contractions keep metric balls")],
    }
}

pub fn interval_square() -> CatalogEntry {
    let system = MapSequence::new("interval-square", 1, |_, x| x[0] *= x[0])
        .with_inverse(|_, x| x[0] = x[0].sqrt())
        .with_modulus(|_| 2.0)
        .autonomous(true);
    CatalogEntry {
        name: "interval-square".into(),
        summary: "x -> x^2 on [0, 1], an increasing homeomorphism".into(),
        system,
        recipes: vec![recipe("interval", &[(0.0, 1.0)], 1.0 / 64.0, MetricFn::euclidean(1))],
        defaults: defaults(0.1, 20, &[2], true),
        expected: vec![expect("interval", None, false, Some(false), false, "balls near the endpoints are intervals")],
    }
}

pub fn identity() -> CatalogEntry {
    let system = MapSequence::new("identity", 1, |_, _| {})
        .with_inverse(|_, _| {})
        .with_modulus(|_| 1.0)
        .equicontinuous(true)
        .autonomous(true);
    CatalogEntry {
        name: "identity".into(),
        summary: "identity on the circle".into(),
        system,
        recipes: vec![recipe("circle", &[], 1.0 / 64.0, MetricFn::circle())],
        defaults: defaults(0.1, 10, &[2], true),
        expected: vec![expect("circle", None, false, Some(false), false, "balls are metric balls")],
    }
}

/// Positive and negative controls besides the three worked examples.
pub fn reference_systems() -> Vec<CatalogEntry> {
    vec![doubling(), catmap(), rotation(), contraction(), interval_square(), identity()]
}

pub fn all() -> Vec<CatalogEntry> {
    let mut out = vec![example_3_1(), example_3_2(), example_4_1()];
    out.extend(reference_systems());
    out
}

pub fn by_name(name: &str) -> Result<CatalogEntry> {
    all().into_iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownSystem(name.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::compose;

    #[test]
    fn names_are_stable() {
        let names: Vec<String> = all().into_iter().map(|e| e.name).collect();
        assert_eq!(names, NAMES);
        assert!(matches!(by_name("tent"), Err(Error::UnknownSystem(_))));
    }

    #[test]
    fn example_3_1_sequence() {
        let s = example_3_1().system;
        let mut x = [1.0];
        s.apply(1, &mut x);
        assert_eq!(x[0], 2.0);
        s.apply(2, &mut x);
        assert_eq!(x[0], 1.0);
        s.apply(3, &mut x);
        assert_eq!(x[0], 4.0);
        let space = example_3_1().default_space().unwrap();
        assert_eq!(space.len(), 1601);
        for p in space.points() {
            for k in 1..=10 {
                assert!((compose(&s, 1, 2 * k, &p)[0] - p[0]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn example_3_2_sequence() {
        let s = example_3_2().system;
        assert_eq!(compose(&s, 1, 4, &[0.0])[0], 10.0);
        let e = example_3_2();
        assert_eq!(e.space("window").unwrap().len(), 1001);
        assert!(!e.space("window").unwrap().flags().compact);
        assert_eq!(e.space("lattice").unwrap().len(), 101);
        assert!(e.space("plane").is_err());
    }

    #[test]
    fn example_4_1_maps() {
        let mut z = [0.5, 0.5];
        cat(&mut z);
        assert_eq!(z, [0.5, 0.0]);
        let s = example_4_1().system;
        let mut p = [0.3, 0.5, 0.5];
        s.apply(1, &mut p);
        assert_eq!(p, [0.3, 0.5, 0.0]);
        s.apply(2, &mut p);
        assert_eq!(p, [0.3, 0.5, 0.0]);
        s.apply_inverse(1, &mut p).unwrap();
        assert_eq!(p, [0.3, 0.5, 0.5]);
        assert_eq!(example_4_1().default_space().unwrap().len(), 64 * 64 * 64);
    }

    #[test]
    fn dyadic_cat_map_is_exact() {
        let space = catmap().default_space().unwrap();
        for p in space.points() {
            let mut q = p;
            for _ in 0..40 {
                cat(&mut q);
            }
            for _ in 0..40 {
                cat_inverse(&mut q);
            }
            assert_eq!(q, p);
            // images stay on the grid
            let mut r = p;
            cat(&mut r);
            assert!(space.locate(&r, 0.0).is_some());
        }
    }

    #[test]
    fn inverses_round_trip() {
        for e in all() {
            if e.system.is_invertible() {
                let space = e.default_space().unwrap();
                e.system.check_inverse(&space, 6, 1e-9).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            }
        }
    }

    #[test]
    fn flags_follow_recipes() {
        assert!(rotation().system.is_equicontinuous());
        assert!(!doubling().system.is_invertible());
        let lattice = example_3_2().space("lattice").unwrap();
        assert!(lattice.flags().has_isolated_points && lattice.flags().countable_model);
        let torus = example_4_1().default_space().unwrap();
        assert!(torus.flags().locally_connected && !torus.flags().has_isolated_points);
    }
}
