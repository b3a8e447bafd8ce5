//! Theorem checks over catalog systems.
//!
//! Each check compares verdict flags between related systems (conjugates,
//! iterates, inverses, restrictions, products) or asserts a verdict on the
//! systems its hypotheses select. Flags are existential over the c-grid:
//! a system "is n-expansive" when some c on the grid yields a finite n.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{self, CatalogEntry};
use crate::classify::{classify, fixed_points, generator_check, interior_measure, ClassificationReport, ClassifyParams};
use crate::error::{Error, Result};
use crate::rng;
use crate::space::{wrap_unit, AxisKind, MetricFn, SampledSpace};
use crate::system::{
    build_orbit_table, conjugate, inverse_system, kth_iterate, product, restrict, MapSequence, PointMap, PointSet,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    HypothesisNotMet,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::HypothesisNotMet => "hypothesis-not-met",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub statement: String,
    pub status: Status,
    /// (system, parameter) instances that met the hypothesis and were run.
    pub instances: usize,
    pub witness: Option<String>,
    pub subjects: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub c_scales: Vec<f64>,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    /// No check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<6} {:<19} {:>9}  {}\n", "check", "status", "instances", "witness");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<6} {:<19} {:>9}  {}",
                c.id,
                c.status.as_str(),
                c.instances,
                c.witness.as_deref().unwrap_or("-")
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    /// Each subject is classified at `c = scale · c_default` for every scale.
    pub c_scales: Vec<f64>,
    pub seed: u64,
    /// Run only these check ids (all when empty).
    pub only: Vec<String>,
    /// Self-test hook: negate the derived-side verdicts inside this check.
    pub inject_fault: Option<String>,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { c_scales: vec![0.5, 1.0], seed: 0, only: Vec::new(), inject_fault: None }
    }
}

/// Check ids with the statement each one exercises.
pub const CHECKS: &[(&str, &str)] = &[
    ("T3.1", "n-expansive homeomorphisms of compact spaces: generator intersections have at most n points"),
    ("T3.3", "uniform conjugacy preserves n-expansiveness"),
    ("T3.4", "uniform conjugacy preserves aleph0-expansiveness"),
    ("T3.5", "equicontinuous systems: n- and aleph0-expansiveness agree with the k-th iterate, k in {2, 3}"),
    ("T3.6", "homeomorphisms of compact spaces: n- and aleph0-expansiveness agree with the inverse system"),
    ("T3.7", "restriction to an invariant subset keeps n- and aleph0-expansiveness"),
    ("T3.8", "products of n-expansive (aleph0-expansive) systems are n-expansive (aleph0-expansive)"),
    ("T3.9", "n-expansive on a compact space: Fix is finite (its size is stable under refinement)"),
    ("T3.10", "aleph0-expansive implies cw-expansive"),
    ("T3.11", "equicontinuous systems on uncountable spaces are never aleph0-expansive"),
    ("T3.12", "n-expansiveness is unchanged by deleting finitely many points"),
    ("T3.13", "monotone homeomorphisms of a compact interval are never aleph0-expansive"),
    ("T4.1", "uniform conjugacy preserves meagre-expansiveness"),
    ("T4.2", "equicontinuous systems: meagre-expansiveness agrees with the k-th iterate"),
    ("T4.3", "homeomorphisms: meagre-expansiveness agrees with the inverse system"),
    ("T4.4", "locally connected, no isolated points: cw-expansive implies meagre-expansive"),
    ("T4.5", "equicontinuous homeomorphisms are never meagre-expansive"),
    ("R4.2", "meagre-expansive homeomorphisms: the interior of Fix has measure zero"),
];

#[derive(Clone, Debug)]
struct Subject {
    key: String,
    system: MapSequence,
    space: SampledSpace,
    params: ClassifyParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Flags {
    n: bool,
    aleph0: bool,
    cw: Option<bool>,
    meagre: bool,
}

impl Flags {
    fn negated(self) -> Flags {
        Flags { n: !self.n, aleph0: !self.aleph0, cw: self.cw.map(|b| !b), meagre: !self.meagre }
    }
}

#[derive(Default)]
struct Outcome {
    instances: usize,
    failure: Option<String>,
    subjects: Vec<String>,
}

impl Outcome {
    fn record(&mut self, subject: &str, ok: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if !self.subjects.iter().any(|s| s == subject) {
            self.subjects.push(subject.to_string());
        }
        if !ok && self.failure.is_none() {
            self.failure = Some(witness());
        }
    }
}

struct Suite<'a> {
    params: &'a SuiteParams,
    subjects: Vec<Subject>,
    entries: Vec<CatalogEntry>,
    cache: Mutex<HashMap<String, Arc<ClassificationReport>>>,
}

impl Suite<'_> {
    fn report(&self, s: &Subject, scale: f64) -> Result<Arc<ClassificationReport>> {
        let key = format!("{}|{scale}", s.key);
        if let Some(r) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(r.clone());
        }
        let params = s.params.clone().with_c(s.params.c * scale).with_seed(self.params.seed);
        let r = Arc::new(classify(&s.system, &s.space, &params)?);
        self.cache.lock().expect("cache lock").insert(key, r.clone());
        Ok(r)
    }

    fn reports(&self, s: &Subject) -> Result<Vec<Arc<ClassificationReport>>> {
        self.params.c_scales.iter().map(|&k| self.report(s, k)).collect()
    }

    fn flags(&self, s: &Subject) -> Result<Flags> {
        let rs = self.reports(s)?;
        let any = |f: &dyn Fn(&ClassificationReport) -> bool| rs.iter().any(|r| f(r));
        Ok(Flags {
            n: any(&|r| r.verdicts().n_expansive.is_some()),
            aleph0: any(&|r| r.verdicts().aleph0_proxy),
            cw: rs[0].verdicts().cw_expansive.map(|_| any(&|r| r.verdicts().cw_expansive == Some(true))),
            meagre: any(&|r| r.verdicts().meagre_expansive),
        })
    }

    /// Flags of the derived side of a comparison, negated under fault
    /// injection for this check.
    fn derived_flags(&self, id: &str, s: &Subject) -> Result<Flags> {
        let f = self.flags(s)?;
        Ok(if self.faulty(id) { f.negated() } else { f })
    }

    fn faulty(&self, id: &str) -> bool {
        self.params.inject_fault.as_deref() == Some(id)
    }

    fn entry(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    fn derived(&self, base: &Subject, key: String, system: MapSequence, space: SampledSpace) -> Subject {
        Subject { key, system, space, params: base.params.clone() }
    }

    fn run(&self, id: &str) -> Result<Outcome> {
        let mut out = Outcome::default();
        match id {
            "T3.1" => self.generator(&mut out)?,
            "T3.3" | "T3.4" | "T4.1" => self.conjugacy(id, &mut out)?,
            "T3.5" | "T4.2" => self.iterates(id, &mut out)?,
            "T3.6" | "T4.3" => self.inverses(id, &mut out)?,
            "T3.7" => self.restrictions(id, &mut out)?,
            "T3.8" => self.products(id, &mut out)?,
            "T3.9" => self.fixed_finite(id, &mut out)?,
            "T3.10" | "T4.4" => self.implications(id, &mut out)?,
            "T3.11" => self.equicontinuous_not_aleph0(id, &mut out)?,
            "T3.12" => self.deletions(id, &mut out)?,
            "T3.13" => self.monotone_interval(id, &mut out)?,
            "T4.5" => self.equicontinuous_not_meagre(id, &mut out)?,
            "R4.2" => self.fix_interior(id, &mut out)?,
            other => return Err(Error::InvalidParameter(format!("unknown check `{other}`"))),
        }
        Ok(out)
    }

    fn generator(&self, out: &mut Outcome) -> Result<()> {
        for s in &self.subjects {
            if !s.system.is_invertible() || !s.space.flags().compact {
                continue;
            }
            for r in self.reports(s)? {
                let Some(n) = r.verdicts().n_expansive else { continue };
                let n = if self.faulty("T3.1") { n.saturating_sub(1) } else { n };
                let table = build_orbit_table(&s.system, &s.space, s.params.horizon, true)?;
                let g = generator_check(&table, r.c / 2.0, 50, s.params.horizon, self.params.seed)?;
                out.record(&s.key, g.max_intersection_cardinality <= n, || {
                    let anchor = g.witness.as_ref().map(|w| format!("{:?}", w.anchor)).unwrap_or_default();
                    format!(
                        "{} c={}: bisequence anchored at {anchor} has {} points, n = {n}",
                        s.key, r.c, g.max_intersection_cardinality
                    )
                });
            }
        }
        Ok(())
    }

    fn conjugacy(&self, id: &str, out: &mut Outcome) -> Result<()> {
        for s in &self.subjects {
            let Some((h, h_inv)) = isometry_for(&s.space) else { continue };
            let conj = conjugate(&s.system, h, h_inv, &s.space)?;
            let t = self.derived(s, format!("conj({})", s.key), conj, s.space.clone());
            let (a, b) = (self.flags(s)?, self.derived_flags(id, &t)?);
            let (x, y) = match id {
                "T3.3" => (a.n, b.n),
                "T3.4" => (a.aleph0, b.aleph0),
                _ => (a.meagre, b.meagre),
            };
            out.record(&s.key, x == y, || format!("{}: flag {x} but its conjugate reports {y}", s.key));
        }
        Ok(())
    }

    fn iterates(&self, id: &str, out: &mut Outcome) -> Result<()> {
        for s in &self.subjects {
            if !(s.system.is_equicontinuous() || s.system.is_autonomous()) {
                continue;
            }
            for k in [2, 3] {
                let it = kth_iterate(&s.system, k)?;
                let mut t = self.derived(s, format!("{}^{k}", s.key), it, s.space.clone());
                t.params.horizon = s.params.horizon.div_ceil(k);
                let (a, b) = (self.flags(s)?, self.derived_flags(id, &t)?);
                let ok = if id == "T3.5" { a.n == b.n && a.aleph0 == b.aleph0 } else { a.meagre == b.meagre };
                out.record(&s.key, ok, || format!("{} vs {}: {a:?} / {b:?}", s.key, t.key));
            }
        }
        Ok(())
    }

    fn inverses(&self, id: &str, out: &mut Outcome) -> Result<()> {
        for s in &self.subjects {
            if !s.system.is_invertible() || !s.params.bilateral {
                continue;
            }
            if id == "T3.6" && !s.space.flags().compact {
                continue;
            }
            let inv = inverse_system(&s.system)?;
            let t = self.derived(s, format!("{}^-1", s.key), inv, s.space.clone());
            let (a, b) = (self.flags(s)?, self.derived_flags(id, &t)?);
            let ok = if id == "T3.6" { a.n == b.n && a.aleph0 == b.aleph0 } else { a.meagre == b.meagre };
            out.record(&s.key, ok, || format!("{} vs its inverse: {a:?} / {b:?}", s.key));
        }
        Ok(())
    }

    fn restrictions(&self, id: &str, out: &mut Outcome) -> Result<()> {
        type Keep = fn(&[f64]) -> bool;
        let cases: [(&str, &str, Keep); 3] = [
            ("example3.2", "window", |p| p[0].fract() == 0.0),
            ("doubling", "circle", |p| (p[0] * 64.0).fract() == 0.0),
            ("catmap", "torus", |p| p.iter().all(|x| (x * 32.0).fract() == 0.0)),
        ];
        for (name, label, keep) in cases {
            let Some(s) = self.subjects.iter().find(|s| s.key == format!("{name}@{label}")) else { continue };
            let a = self.flags(s)?;
            if !a.n && !a.aleph0 {
                continue;
            }
            let subset = PointSet::new(s.space.members().into_iter().filter(|&i| keep(&s.space.point(i))).collect());
            let r = restrict(&s.system, &s.space, &subset, s.params.horizon)?;
            let t = self.derived(s, format!("{}|Y", s.key), r.system, r.space);
            let b = self.derived_flags(id, &t)?;
            let ok = (!a.n || b.n) && (!a.aleph0 || b.aleph0);
            out.record(&s.key, ok, || format!("{} on {} points: {a:?} but restriction {b:?}", s.key, subset.len()));
        }
        Ok(())
    }

    fn products(&self, id: &str, out: &mut Outcome) -> Result<()> {
        let mut pairs: Vec<Subject> = Vec::new();
        if let Some(e) = self.entry("example3.2") {
            let lattice = e.space("lattice")?;
            let p = ClassifyParams::for_entry(e);
            pairs.push(Subject { key: "example3.2@lattice".into(), system: e.system.clone(), space: lattice, params: p });
        }
        if let Some(e) = self.entry("doubling") {
            let circle = crate::space::build_grid(&[], 1.0 / 64.0, MetricFn::circle())?;
            let p = ClassifyParams::for_entry(e).with_refinements(vec![2]);
            pairs.push(Subject { key: "doubling@circle64".into(), system: e.system.clone(), space: circle, params: p });
        }
        for f in &pairs {
            let a = self.flags(f)?;
            if !a.n && !a.aleph0 {
                continue;
            }
            let space = SampledSpace::product(&f.space, &f.space)?;
            let t = self.derived(f, format!("{0}x{0}", f.key), product(&f.system, &f.system), space);
            let b = self.derived_flags(id, &t)?;
            let ok = (!a.n || b.n) && (!a.aleph0 || b.aleph0);
            out.record(&f.key, ok, || format!("{}: factor {a:?} but product {b:?}", t.key));
        }
        Ok(())
    }

    fn fixed_finite(&self, id: &str, out: &mut Outcome) -> Result<()> {
        for s in &self.subjects {
            if !s.space.flags().compact || !s.space.is_refinable() || !self.flags(s)?.n {
                continue;
            }
            let n = s.params.horizon;
            let coarse = fixed_points(&build_orbit_table(&s.system, &s.space, n, false)?).len();
            let fine_space = s.space.refine(2)?;
            let mut fine = fixed_points(&build_orbit_table(&s.system, &fine_space, n, false)?).len();
            if self.faulty(id) {
                fine += 1;
            }
            out.record(&s.key, coarse == fine, || format!("{}: |Fix| = {coarse} but {fine} after refinement", s.key));
        }
        Ok(())
    }

    fn implications(&self, id: &str, out: &mut Outcome) -> Result<()> {
        for s in &self.subjects {
            let f = s.space.flags();
            if !f.locally_connected || f.has_isolated_points {
                continue;
            }
            for r in self.reports(s)? {
                for v in r.variants() {
                    let mut cw = v.verdicts.cw_expansive == Some(true);
                    let mut meagre = v.verdicts.meagre_expansive;
                    if self.faulty(id) {
                        cw = !cw;
                        meagre = !meagre;
                    }
                    let (hyp, concl) =
                        if id == "T3.10" { (v.verdicts.aleph0_proxy, cw) } else { (v.verdicts.cw_expansive == Some(true), meagre) };
                    if !hyp {
                        continue;
                    }
                    out.record(&s.key, concl, || {
                        let detail = if id == "T3.10" {
                            v.cw_witness.as_ref().map(|w| format!("continuum {:?}", w.points)).unwrap_or_default()
                        } else {
                            v.interior_witness
                                .as_ref()
                                .map(|w| format!("center {:?} interior {:?}", w.center, w.interior_point))
                                .unwrap_or_default()
                        };
                        format!("{} c={} bilateral={}: {detail}", s.key, r.c, v.bilateral)
                    });
                }
            }
        }
        Ok(())
    }

    fn equicontinuous_not_aleph0(&self, id: &str, out: &mut Outcome) -> Result<()> {
        for s in &self.subjects {
            if !s.system.is_equicontinuous() || !s.space.flags().uncountable_model {
                continue;
            }
            let f = self.derived_flags(id, s)?;
            out.record(&s.key, !f.aleph0, || format!("{} reports aleph0 on the c-grid", s.key));
        }
        Ok(())
    }

    fn deletions(&self, id: &str, out: &mut Outcome) -> Result<()> {
        for s in &self.subjects {
            let a = self.flags(s)?;
            if !a.n {
                continue;
            }
            let members = s.space.members();
            let mut r = rng::stream(self.params.seed, &format!("delete:{}", s.key));
            let drop: Vec<usize> = sample(&mut r, members.len(), 5.min(members.len() - 1)).into_iter().map(|i| members[i]).collect();
            let t = self.derived(s, format!("{} minus 5", s.key), s.system.clone(), s.space.without(&drop)?);
            let b = self.derived_flags(id, &t)?;
            out.record(&s.key, a.n == b.n, || {
                let pts: Vec<_> = drop.iter().map(|&i| s.space.point(i)).collect();
                format!("{} without {pts:?}: n-flag {} vs {}", s.key, a.n, b.n)
            });
        }
        Ok(())
    }

    fn monotone_interval(&self, id: &str, out: &mut Outcome) -> Result<()> {
        let mut subjects: Vec<Subject> = self.subjects.clone();
        if let Some(e) = self.entry("interval-square") {
            let powers = MapSequence::new("interval-powers", 1, |n, x| x[0] = x[0].powi(if n % 2 == 1 { 2 } else { 3 }))
                .with_inverse(|n, x| x[0] = x[0].powf(if n % 2 == 1 { 0.5 } else { 1.0 / 3.0 }));
            subjects.push(Subject {
                key: "interval-powers@interval".into(),
                system: powers,
                space: e.default_space()?,
                params: ClassifyParams::for_entry(e),
            });
        }
        for s in &subjects {
            if !monotone_interval_homeomorphisms(&s.system, &s.space, s.params.horizon) {
                continue;
            }
            let f = self.derived_flags(id, s)?;
            out.record(&s.key, !f.aleph0, || format!("{} reports aleph0 on the c-grid", s.key));
        }
        Ok(())
    }

    fn equicontinuous_not_meagre(&self, id: &str, out: &mut Outcome) -> Result<()> {
        for s in &self.subjects {
            if !s.system.is_equicontinuous() || !s.system.is_invertible() {
                continue;
            }
            let f = self.derived_flags(id, s)?;
            out.record(&s.key, !f.meagre, || format!("{} reports meagre on the c-grid", s.key));
        }
        Ok(())
    }

    fn fix_interior(&self, id: &str, out: &mut Outcome) -> Result<()> {
        for s in &self.subjects {
            if !s.system.is_invertible() || !self.flags(s)?.meagre {
                continue;
            }
            let fix = fixed_points(&build_orbit_table(&s.system, &s.space, s.params.horizon, false)?);
            let m = if s.space.flags().has_isolated_points { 0 } else { s.params.interior_m };
            let mut mu = interior_measure(&s.space, &fix, m);
            if self.faulty(id) {
                mu += 1.0;
            }
            out.record(&s.key, mu == 0.0, || format!("{}: interior of Fix ({} points) has measure {mu}", s.key, fix.len()));
        }
        Ok(())
    }
}

/// An isometry of the grid onto itself: reflection `x ↦ -x` on symmetric
/// line/lattice windows, translation by five cells on periodic axes.
fn isometry_for(space: &SampledSpace) -> Option<(PointMap, PointMap)> {
    let axes = space.axes().to_vec();
    if axes.iter().any(|a| a.kind != AxisKind::Periodic && (a.lo + a.hi()).abs() > 1e-9) {
        return None;
    }
    let plan: Vec<Option<f64>> =
        axes.iter().map(|a| (a.kind == AxisKind::Periodic).then_some(5.0 * a.step)).collect();
    let back = plan.clone();
    let h: PointMap = Arc::new(move |x: &mut [f64]| {
        for (v, s) in x.iter_mut().zip(&plan) {
            *v = match s {
                Some(s) => wrap_unit(*v + s),
                None => -*v,
            };
        }
    });
    let h_inv: PointMap = Arc::new(move |x: &mut [f64]| {
        for (v, s) in x.iter_mut().zip(&back) {
            *v = match s {
                Some(s) => wrap_unit(*v - s),
                None => -*v,
            };
        }
    });
    Some((h, h_inv))
}

/// One compact line axis, invertible maps, and every `φ_n` (`n ≤ N`) is
/// strictly increasing on the grid for all n, or strictly decreasing for
/// all n, with the window mapped onto itself.
fn monotone_interval_homeomorphisms(seq: &MapSequence, space: &SampledSpace, horizon: usize) -> bool {
    let axes = space.axes();
    if axes.len() != 1 || axes[0].kind != AxisKind::Line || !space.flags().compact || !seq.is_invertible() {
        return false;
    }
    let (lo, hi) = (axes[0].lo, axes[0].hi());
    let pts: Vec<f64> = space.points().iter().map(|p| p[0]).collect();
    let mut direction = 0i8;
    for n in 1..=horizon {
        let img: Vec<f64> = pts
            .iter()
            .map(|&x| {
                let mut p = [x];
                seq.apply(n, &mut p);
                p[0]
            })
            .collect();
        let inc = img.windows(2).all(|w| w[0] < w[1]);
        let dec = img.windows(2).all(|w| w[0] > w[1]);
        let d = if inc { 1 } else if dec { -1 } else { return false };
        if direction != 0 && d != direction {
            return false;
        }
        direction = d;
        let ends = if inc { (img[0], img[img.len() - 1]) } else { (img[img.len() - 1], img[0]) };
        if (ends.0 - lo).abs() > 1e-12 || (ends.1 - hi).abs() > 1e-12 {
            return false;
        }
    }
    true
}

fn base_subjects(entries: &[CatalogEntry]) -> Result<Vec<Subject>> {
    let mut out = Vec::new();
    for e in entries {
        for r in &e.recipes {
            out.push(Subject {
                key: format!("{}@{}", e.name, r.label),
                system: e.system.clone(),
                space: r.build()?,
                params: ClassifyParams::for_entry(e),
            });
        }
    }
    Ok(out)
}

/// Runs the selected checks. Results are deterministic for a given seed,
/// independent of the worker count.
pub fn run_suite(entries: &[CatalogEntry], params: &SuiteParams) -> Result<SuiteReport> {
    for id in &params.only {
        if !CHECKS.iter().any(|(c, _)| c == id) {
            return Err(Error::InvalidParameter(format!("unknown check `{id}`")));
        }
    }
    if params.c_scales.is_empty() || params.c_scales.iter().any(|k| !(*k > 0.0)) {
        return Err(Error::InvalidParameter("c scales must be positive and non-empty".into()));
    }
    let suite = Suite {
        params,
        subjects: base_subjects(entries)?,
        entries: entries.to_vec(),
        cache: Mutex::new(HashMap::new()),
    };
    let selected: Vec<&(&str, &str)> =
        CHECKS.iter().filter(|(id, _)| params.only.is_empty() || params.only.iter().any(|o| o == id)).collect();
    let checks = selected
        .par_iter()
        .map(|(id, statement)| {
            let (status, instances, witness, subjects) = match suite.run(id) {
                Ok(o) => {
                    let status = if o.failure.is_some() {
                        Status::Fail
                    } else if o.instances == 0 {
                        Status::HypothesisNotMet
                    } else {
                        Status::Pass
                    };
                    (status, o.instances, o.failure, o.subjects)
                }
                Err(e) => (Status::Fail, 0, Some(format!("error: {e}")), Vec::new()),
            };
            CheckResult { id: id.to_string(), statement: statement.to_string(), status, instances, witness, subjects }
        })
        .collect();
    Ok(SuiteReport { seed: params.seed, c_scales: params.c_scales.clone(), checks })
}

/// The suite on the full catalog.
pub fn run_default(params: &SuiteParams) -> Result<SuiteReport> {
    run_suite(&catalog::all(), params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isometries_round_trip() {
        let torus = catalog::catmap().default_space().unwrap();
        let (h, hi) = isometry_for(&torus).unwrap();
        for p in torus.points() {
            let mut q = p;
            h(&mut q);
            assert!(torus.locate(&q, 0.0).is_some());
            hi(&mut q);
            assert_eq!(q, p);
        }
        let interval = catalog::interval_square().default_space().unwrap();
        assert!(isometry_for(&interval).is_none());
    }

    #[test]
    fn monotone_filter() {
        let e = catalog::interval_square();
        let space = e.default_space().unwrap();
        assert!(monotone_interval_homeomorphisms(&e.system, &space, 10));
        let c = catalog::contraction();
        assert!(!monotone_interval_homeomorphisms(&c.system, &c.default_space().unwrap(), 10));
        let mixed = MapSequence::new("mixed", 1, |n, x| x[0] = if n % 2 == 1 { x[0] * x[0] } else { 1.0 - x[0] })
            .with_inverse(|n, x| x[0] = if n % 2 == 1 { x[0].sqrt() } else { 1.0 - x[0] });
        assert!(!monotone_interval_homeomorphisms(&mixed, &space, 4));
    }

    #[test]
    fn small_suite_and_filters() {
        let entries = vec![catalog::doubling(), catalog::rotation(), catalog::identity()];
        let params = SuiteParams { only: vec!["T3.10".into(), "T4.5".into(), "T3.13".into()], ..Default::default() };
        let r = run_suite(&entries, &params).unwrap();
        assert_eq!(r.checks.len(), 3);
        let by = |id: &str| r.checks.iter().find(|c| c.id == id).unwrap().clone();
        assert_eq!(by("T3.10").status, Status::Pass);
        assert_eq!(by("T4.5").status, Status::Pass);
        assert_eq!(by("T4.5").instances, 2);
        assert_eq!(by("T3.13").status, Status::HypothesisNotMet);
        assert!(r.passed());
        assert!(r.table().contains("hypothesis-not-met"));

        let bad = SuiteParams { only: vec!["T9.9".into()], ..Default::default() };
        assert!(run_suite(&entries, &bad).is_err());
    }

    #[test]
    fn injected_fault_fails_with_witness() {
        let entries = vec![catalog::rotation()];
        let params = SuiteParams { only: vec!["T4.5".into()], inject_fault: Some("T4.5".into()), ..Default::default() };
        let r = run_suite(&entries, &params).unwrap();
        assert_eq!(r.checks[0].status, Status::Fail);
        assert!(r.checks[0].witness.as_ref().unwrap().contains("rotation@circle"));
        assert!(!r.passed());
    }
}
