//! JSON experiment configs (`"schema": 1`).

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::catalog::{self, CatalogEntry};
use crate::classify::ClassifyParams;
use crate::space::{build_grid, wrap_unit, MetricFn, SampledSpace};
use crate::system::MapSequence;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub system: SystemSpec,
    /// Catalog space label or an explicit grid; defaults to the entry's
    /// first space for catalog systems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    /// Ball radii; one classification per value.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinements: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bilateral: Option<bool>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balls: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Catalog(String),
    Inline(InlineSystem),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InlineSystem {
    /// `φ_n(x) = a_n x + b_n` on one axis, coefficients cycling with
    /// period `len`; taken mod 1 when `mod_one`.
    Affine {
        a: Vec<f64>,
        b: Vec<f64>,
        #[serde(default)]
        mod_one: bool,
    },
    /// The same integer matrix at every step, mod 1 on `T^d`.
    Matrix { matrix: Vec<Vec<i64>> },
    /// `φ_n` is the n-th map of `pattern[(n - 1) % len]`.
    Alternation { pattern: Vec<SystemSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceSpec {
    Label(String),
    Grid(GridSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// `[lo, hi]` per axis; empty for circles and tori.
    #[serde(default)]
    pub window: Vec<[f64; 2]>,
    pub spacing: f64,
    pub metric: MetricName,
    /// Torus dimension (other metrics take it from the window).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compact: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricName {
    Euclidean,
    Circle,
    Torus,
    Lattice,
}

/// Config problem, positioned in the source text when possible.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    fn plain(message: impl Into<String>) -> ConfigError {
        ConfigError { message: message.into(), line: None, column: None }
    }

    fn at_key(text: Option<&str>, key: &str, message: impl Into<String>) -> ConfigError {
        let pos = text.and_then(|t| locate_key(t, key));
        ConfigError { message: message.into(), line: pos.map(|p| p.0), column: pos.map(|p| p.1) }
    }
}

fn strip_position(mut msg: String) -> String {
    if let Some(at) = msg.rfind(" at line ") {
        msg.truncate(at);
    }
    msg
}

/// 1-based line and column of the first `"key"` followed by a colon.
fn locate_key(text: &str, key: &str) -> Option<(usize, usize)> {
    let needle = format!("\"{key}\"");
    for (i, line) in text.lines().enumerate() {
        let mut from = 0;
        while let Some(off) = line[from..].find(&needle) {
            let at = from + off;
            if line[at + needle.len()..].trim_start().starts_with(':') {
                return Some((i + 1, line[..at].chars().count() + 1));
            }
            from = at + needle.len();
        }
    }
    None
}

/// A config resolved against the catalog.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub system: MapSequence,
    pub space: SampledSpace,
    pub params: Vec<ClassifyParams>,
}

impl ExperimentConfig {
    /// A config naming a catalog system with every other field defaulted.
    pub fn for_system(name: &str) -> ExperimentConfig {
        ExperimentConfig {
            schema: SCHEMA,
            system: SystemSpec::Catalog(name.to_string()),
            space: None,
            horizon: None,
            c: Vec::new(),
            refinements: None,
            seed: 0,
            bilateral: None,
            outputs: Outputs::default(),
        }
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError {
            message: strip_position(e.to_string()),
            line: Some(e.line()),
            column: Some(e.column()),
        })?;
        cfg.validate(Some(text))?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Field checks that do not need the catalog. `text` positions errors.
    pub fn validate(&self, text: Option<&str>) -> Result<(), ConfigError> {
        if self.schema != SCHEMA {
            return Err(ConfigError::at_key(text, "schema", format!("unsupported schema {} (expected {SCHEMA})", self.schema)));
        }
        if self.horizon == Some(0) {
            return Err(ConfigError::at_key(text, "horizon", "horizon must be positive"));
        }
        if let Some(bad) = self.c.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(ConfigError::at_key(text, "c", format!("c = {bad} must be positive")));
        }
        if let Some(r) = &self.refinements {
            if r.iter().any(|&f| f < 2) || r.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ConfigError::at_key(text, "refinements", "refinement factors must be >= 2 and strictly increase"));
            }
        }
        if let Some(SpaceSpec::Grid(g)) = &self.space {
            if !(g.spacing > 0.0 && g.spacing.is_finite()) {
                return Err(ConfigError::at_key(text, "spacing", format!("spacing = {} must be positive", g.spacing)));
            }
            if g.window.iter().any(|w| !(w[0] < w[1])) {
                return Err(ConfigError::at_key(text, "window", "window bounds need lo < hi"));
            }
        }
        validate_system(&self.system, text)
    }

    fn entry(&self) -> Option<CatalogEntry> {
        match &self.system {
            SystemSpec::Catalog(name) => catalog::by_name(name).ok(),
            SystemSpec::Inline(_) => None,
        }
    }

    /// Builds the system, space and per-c parameters. Unset fields take the
    /// catalog entry's defaults; inline systems must set space, horizon, c.
    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        self.validate(None)?;
        let entry = self.entry();
        let system = build_system(&self.system)?;
        let space = match (&self.space, &entry) {
            (Some(SpaceSpec::Grid(g)), _) => build_space(g)?,
            (Some(SpaceSpec::Label(l)), Some(e)) => e.space(l).map_err(|err| ConfigError::plain(err.to_string()))?,
            (None, Some(e)) => e.default_space().map_err(|err| ConfigError::plain(err.to_string()))?,
            (Some(SpaceSpec::Label(_)), None) | (None, None) => {
                return Err(ConfigError::plain("inline systems need an explicit space grid"))
            }
        };
        if space.dim() != system.dim() {
            return Err(ConfigError::plain(format!(
                "system acts on dimension {} but the space has dimension {}",
                system.dim(),
                space.dim()
            )));
        }
        let defaults = entry.as_ref().map(|e| e.defaults.clone());
        let horizon = self
            .horizon
            .or(defaults.as_ref().map(|d| d.horizon))
            .ok_or_else(|| ConfigError::plain("horizon is required for inline systems"))?;
        let cs = if self.c.is_empty() {
            vec![defaults.as_ref().map(|d| d.c).ok_or_else(|| ConfigError::plain("c is required for inline systems"))?]
        } else {
            self.c.clone()
        };
        let refinements = self
            .refinements
            .clone()
            .or(defaults.as_ref().map(|d| d.refinements.clone()))
            .unwrap_or_else(|| vec![2]);
        let bilateral = self.bilateral.or(defaults.as_ref().map(|d| d.bilateral)).unwrap_or(system.is_invertible());
        if bilateral && !system.is_invertible() {
            return Err(ConfigError::plain(format!("{} has no inverse; bilateral runs need one", system.name())));
        }
        let params = cs
            .iter()
            .map(|&c| {
                ClassifyParams::new(c, horizon)
                    .with_refinements(refinements.clone())
                    .with_bilateral(bilateral)
                    .with_seed(self.seed)
            })
            .collect();
        Ok(Resolved { system, space, params })
    }
}

fn validate_system(spec: &SystemSpec, text: Option<&str>) -> Result<(), ConfigError> {
    match spec {
        SystemSpec::Catalog(name) => {
            if catalog::by_name(name).is_err() {
                return Err(ConfigError::at_key(
                    text,
                    "system",
                    format!("unknown system `{name}` (known: {})", catalog::NAMES.join(", ")),
                ));
            }
        }
        SystemSpec::Inline(InlineSystem::Affine { a, b, mod_one }) => {
            if a.is_empty() || b.is_empty() || a.iter().chain(b).any(|v| !v.is_finite()) {
                return Err(ConfigError::at_key(text, "a", "affine coefficients must be finite and non-empty"));
            }
            if *mod_one && a.iter().any(|v| v.fract() != 0.0) {
                return Err(ConfigError::at_key(text, "a", "mod-1 affine maps need integer slopes"));
            }
        }
        SystemSpec::Inline(InlineSystem::Matrix { matrix }) => {
            let d = matrix.len();
            if d == 0 || d > crate::space::MAX_DIM || matrix.iter().any(|r| r.len() != d) {
                return Err(ConfigError::at_key(text, "matrix", "matrix must be square with 1..=6 rows"));
            }
        }
        SystemSpec::Inline(InlineSystem::Alternation { pattern }) => {
            if pattern.is_empty() {
                return Err(ConfigError::at_key(text, "pattern", "alternation pattern is empty"));
            }
            for p in pattern {
                validate_system(p, text)?;
            }
        }
    }
    Ok(())
}

fn build_space(g: &GridSpec) -> Result<SampledSpace, ConfigError> {
    let window: Vec<(f64, f64)> = g.window.iter().map(|w| (w[0], w[1])).collect();
    let metric = match g.metric {
        MetricName::Euclidean => MetricFn::euclidean(window.len()),
        MetricName::Lattice => MetricFn::lattice(window.len()),
        MetricName::Circle => MetricFn::circle(),
        MetricName::Torus => MetricFn::torus(g.dimension.unwrap_or(2)),
    };
    let space = build_grid(&window, g.spacing, metric).map_err(|e| ConfigError::plain(e.to_string()))?;
    Ok(match g.compact {
        Some(compact) => {
            let flags = space.flags();
            space.with_flags(crate::space::TopologyFlags { compact, ..flags })
        }
        None => space,
    })
}

fn cycle<T: Copy>(v: &[T], n: usize) -> T {
    v[(n - 1) % v.len()]
}

/// Builds the map sequence of a system spec.
pub fn build_system(spec: &SystemSpec) -> Result<MapSequence, ConfigError> {
    match spec {
        SystemSpec::Catalog(name) => catalog::by_name(name).map(|e| e.system).map_err(|e| ConfigError::plain(e.to_string())),
        SystemSpec::Inline(InlineSystem::Affine { a, b, mod_one }) => Ok(affine(a.clone(), b.clone(), *mod_one)),
        SystemSpec::Inline(InlineSystem::Matrix { matrix }) => matrix_system(matrix),
        SystemSpec::Inline(InlineSystem::Alternation { pattern }) => {
            let parts = pattern.iter().map(build_system).collect::<Result<Vec<_>, _>>()?;
            let dim = parts[0].dim();
            if parts.iter().any(|p| p.dim() != dim) {
                return Err(ConfigError::plain("alternation parts act on different dimensions"));
            }
            let names: Vec<&str> = parts.iter().map(|p| p.name()).collect();
            let name = format!("alternation[{}]", names.join(","));
            let invertible = parts.iter().all(|p| p.is_invertible());
            let single = parts.len() == 1;
            let flags = (parts[0].is_equicontinuous(), parts[0].is_autonomous());
            let fwd = parts.clone();
            let mut seq = MapSequence::new(name, dim, move |n, x| fwd[(n - 1) % fwd.len()].apply(n, x));
            if invertible {
                let inv = parts.clone();
                seq = seq.with_inverse(move |n, x| {
                    inv[(n - 1) % inv.len()].apply_inverse(n, x).expect("every part is invertible")
                });
            }
            Ok(seq.equicontinuous(single && flags.0).autonomous(single && flags.1))
        }
    }
}

fn affine(a: Vec<f64>, b: Vec<f64>, mod_one: bool) -> MapSequence {
    // sup of |a_1 ⋯ a_n| is finite iff one period does not grow
    let gain: f64 = (1..=a.len()).map(|n| cycle(&a, n).abs()).product();
    let invertible = a.iter().all(|&v| v != 0.0) && (!mod_one || a.iter().all(|v| v.abs() == 1.0));
    let autonomous = a.len() == 1 && b.len() == 1;
    let (fa, fb) = (a.clone(), b.clone());
    let mut seq = MapSequence::new("affine", 1, move |n, x| {
        x[0] = cycle(&fa, n) * x[0] + cycle(&fb, n);
        if mod_one {
            x[0] = wrap_unit(x[0]);
        }
    })
    .with_modulus({
        let a = a.clone();
        move |n| cycle(&a, n).abs()
    })
    .autonomous(autonomous)
    .equicontinuous(gain <= 1.0);
    if invertible {
        seq = seq.with_inverse(move |n, x| {
            x[0] = (x[0] - cycle(&b, n)) / cycle(&a, n);
            if mod_one {
                x[0] = wrap_unit(x[0]);
            }
        });
    }
    seq
}

fn det(m: &[Vec<i64>]) -> i64 {
    let d = m.len();
    if d == 1 {
        return m[0][0];
    }
    (0..d)
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

/// Integer inverse of a unimodular matrix via the adjugate.
fn unimodular_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let d = m.len();
    let dt = det(m);
    if dt.abs() != 1 {
        return None;
    }
    if d == 1 {
        return Some(vec![vec![dt]]);
    }
    let mut inv = vec![vec![0i64; d]; d];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            // cofactor of (j, i)
            let minor: Vec<Vec<i64>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != j)
                .map(|(_, r)| r.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            *v = sign * det(&minor) * dt;
        }
    }
    Some(inv)
}

fn apply_matrix(m: &[Vec<i64>], x: &mut [f64]) {
    let mut y = [0.0f64; crate::space::MAX_DIM];
    for (i, row) in m.iter().enumerate() {
        y[i] = wrap_unit(row.iter().zip(x.iter()).map(|(&a, &v)| a as f64 * v).sum());
    }
    x.copy_from_slice(&y[..m.len()]);
}

fn matrix_system(m: &[Vec<i64>]) -> Result<MapSequence, ConfigError> {
    let d = m.len();
    // finite order ⇒ bounded powers
    let mut power = m.to_vec();
    let identity: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    let mut finite_order = power == identity;
    for _ in 1..12 {
        if finite_order {
            break;
        }
        power = (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| power[i][k] * m[k][j]).sum()).collect()).collect();
        finite_order = power == identity;
    }
    let fwd = m.to_vec();
    let mut seq = MapSequence::new("matrix", d, move |_, x| apply_matrix(&fwd, x))
        .autonomous(true)
        .equicontinuous(finite_order);
    if let Some(inv) = unimodular_inverse(m) {
        seq = seq.with_inverse(move |_, x| apply_matrix(&inv, x));
    }
    Ok(seq)
}
