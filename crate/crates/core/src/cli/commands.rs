use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use super::config::{ExperimentConfig, Resolved, SpaceSpec, SystemSpec};
use super::{CatalogAction, Command, Failure, RunArgs};
use crate::balls::{ball_distances, refinement_levels};
use crate::catalog;
use crate::classify::{classify, ClassificationReport};
use crate::system::{point_orbit, LazyOrbits};
use crate::verify::{run_default, SuiteParams, CHECKS};

pub fn run(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Classify { run, out } => cmd_classify(&run, out.as_deref()),
        Command::Verify { config, only, seed, json, out, inject_fault } => {
            cmd_verify(config.as_deref(), only, seed, json, out.as_deref(), inject_fault)
        }
        Command::Ball { run, center, out } => cmd_ball(&run, &center, out.as_deref()),
        Command::Orbit { run, x, out } => cmd_orbit(&run, &x, out.as_deref()),
        Command::Catalog { action: CatalogAction::List { json } } => cmd_catalog_list(json),
    }
}

fn read_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    ExperimentConfig::parse(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// The config file (or a bare catalog config) with flags applied on top.
pub fn load_config(run: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match (&run.config, &run.system) {
        (Some(path), _) => read_config(path)?,
        (None, Some(name)) => ExperimentConfig::for_system(name),
        (None, None) => return Err(Failure::Config("either --config or --system is required".into())),
    };
    if let Some(name) = &run.system {
        cfg.system = SystemSpec::Catalog(name.clone());
    }
    if let Some(label) = &run.space {
        cfg.space = Some(SpaceSpec::Label(label.clone()));
    }
    if !run.c.is_empty() {
        cfg.c = run.c.clone();
    }
    if run.horizon.is_some() {
        cfg.horizon = run.horizon;
    }
    if run.refinements.is_some() {
        cfg.refinements = run.refinements.clone();
    }
    if let Some(seed) = run.seed {
        cfg.seed = seed;
    }
    if run.bilateral.is_some() {
        cfg.bilateral = run.bilateral;
    }
    cfg.validate(None).map_err(|e| Failure::Config(e.to_string()))?;
    Ok(cfg)
}

fn resolve(cfg: &ExperimentConfig) -> Result<Resolved, Failure> {
    cfg.resolve().map_err(|e| Failure::Config(e.to_string()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => write_file(p, bytes),
        None => print_bytes(bytes),
    }
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn print_bytes(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(bytes).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn csv_bytes(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<Vec<u8>, Failure> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&header).context("csv header")?;
    for r in rows {
        w.write_record(&r).context("csv row")?;
    }
    Ok(w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?)
}

#[derive(Serialize)]
struct ReportFile<'a> {
    schema: u32,
    config: &'a ExperimentConfig,
    reports: &'a [ClassificationReport],
}

/// `balls.csv`: one row per (c, variant, sampled center).
pub fn balls_csv(reports: &[ClassificationReport]) -> Result<Vec<u8>, Failure> {
    let dim = reports.first().and_then(|r| r.primary().balls.first()).map_or(0, |b| b.center.dim());
    let levels = reports.iter().flat_map(|r| r.variants()).flat_map(|v| &v.balls).map(|b| b.cardinalities.len()).max();
    let levels = levels.unwrap_or(0);
    let mut header: Vec<String> = vec!["c".into(), "variant".into()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    header.extend((0..levels).map(|i| format!("card_{i}")));
    header.extend(["growth_exponent", "interior_measure", "truncated"].map(String::from));
    let mut rows = Vec::new();
    for r in reports {
        for v in r.variants() {
            for b in &v.balls {
                let mut row = vec![num(r.c), if v.bilateral { "bilateral" } else { "forward" }.to_string()];
                row.extend(b.center.iter().map(|&x| num(x)));
                row.extend((0..levels).map(|i| b.cardinalities.get(i).map_or(String::new(), |c| c.to_string())));
                row.extend([num(b.growth_exponent), num(b.interior_measure), b.truncated.to_string()]);
                rows.push(row);
            }
        }
    }
    csv_bytes(header, rows)
}

fn opt(n: Option<usize>) -> String {
    n.map_or("none".into(), |n| n.to_string())
}

fn cmd_classify(run: &RunArgs, out: Option<&Path>) -> Result<i32, Failure> {
    let cfg = load_config(run)?;
    let r = resolve(&cfg)?;
    let reports = r.params.iter().map(|p| classify(&r.system, &r.space, p)).collect::<crate::Result<Vec<_>>>()?;
    let (report_path, balls_path) = match out {
        Some(dir) => (dir.join("report.json"), dir.join("balls.csv")),
        None => (
            cfg.outputs.report.clone().unwrap_or_else(|| PathBuf::from("report.json")),
            cfg.outputs.balls.clone().unwrap_or_else(|| PathBuf::from("balls.csv")),
        ),
    };
    let mut json = serde_json::to_string_pretty(&ReportFile { schema: 1, config: &cfg, reports: &reports })
        .context("serializing report")?;
    json.push('\n');
    write_file(&report_path, json.as_bytes())?;
    write_file(&balls_path, &balls_csv(&reports)?)?;
    let mut summary = String::new();
    for rep in &reports {
        let v = rep.verdicts();
        summary += &format!(
            "{} c={} N={}: n-expansive={} aleph0={} cw={} meagre={}\n",
            rep.system,
            rep.c,
            rep.horizon,
            opt(v.n_expansive),
            v.aleph0_proxy,
            v.cw_expansive.map_or("n/a".into(), |b| b.to_string()),
            v.meagre_expansive
        );
    }
    print_bytes(summary.as_bytes())?;
    Ok(0)
}

fn cmd_verify(
    config: Option<&Path>,
    only: Vec<String>,
    seed: Option<u64>,
    json: bool,
    out: Option<&Path>,
    inject_fault: Option<String>,
) -> Result<i32, Failure> {
    let base_seed = match config {
        Some(p) => read_config(p)?.seed,
        None => 0,
    };
    for id in only.iter().chain(&inject_fault) {
        if !CHECKS.iter().any(|(c, _)| c == id) {
            let known: Vec<&str> = CHECKS.iter().map(|c| c.0).collect();
            return Err(Failure::Config(format!("unknown check `{id}` (known: {})", known.join(", "))));
        }
    }
    let params = SuiteParams { seed: seed.unwrap_or(base_seed), only, inject_fault, ..SuiteParams::default() };
    let report = run_default(&params)?;
    let mut text = serde_json::to_string_pretty(&report).context("serializing suite report")?;
    text.push('\n');
    if let Some(p) = out {
        write_file(p, text.as_bytes())?;
    }
    if json {
        print_bytes(text.as_bytes())?;
    } else {
        print_bytes(report.table().as_bytes())?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}

/// Ball CSV: `c, spacing, x0.., max_distance`, one row per member per level.
/// The center is snapped to the nearest point of each level.
pub fn ball_csv(r: &Resolved, center: &[f64]) -> Result<Vec<u8>, Failure> {
    if center.len() != r.space.dim() {
        return Err(crate::Error::DimensionMismatch { expected: r.space.dim(), got: center.len() }.into());
    }
    if !r.space.contains(center) {
        return Err(crate::Error::InvalidParameter(format!("center {center:?} lies outside the window")).into());
    }
    let mut header: Vec<String> = vec!["c".into(), "spacing".into()];
    header.extend((0..r.space.dim()).map(|i| format!("x{i}")));
    header.push("max_distance".into());
    let mut rows = Vec::new();
    for p in &r.params {
        let levels =
            if r.space.is_refinable() { refinement_levels(&r.space, &p.refinements)? } else { vec![r.space.clone()] };
        for level in levels {
            let spacing = level.spacing();
            let src = LazyOrbits { space: level, seq: r.system.clone(), horizon: p.horizon, bilateral: p.bilateral };
            let snapped = src.space.nearest_index(center).map(|i| src.space.point(i)).ok_or_else(|| {
                crate::Error::InvalidParameter(format!("no grid point near {center:?}"))
            })?;
            for (idx, d) in ball_distances(&src, &snapped, p.c, p.bilateral)? {
                let mut row = vec![num(p.c), num(spacing)];
                row.extend(src.space.point(idx).iter().map(|&x| num(x)));
                row.push(num(d));
                rows.push(row);
            }
        }
    }
    csv_bytes(header, rows)
}

fn cmd_ball(run: &RunArgs, center: &[f64], out: Option<&Path>) -> Result<i32, Failure> {
    let r = resolve(&load_config(run)?)?;
    emit(out, &ball_csv(&r, center)?)?;
    Ok(0)
}

fn cmd_orbit(run: &RunArgs, x: &[f64], out: Option<&Path>) -> Result<i32, Failure> {
    let r = resolve(&load_config(run)?)?;
    let p = &r.params[0];
    if x.len() != r.space.dim() {
        return Err(crate::Error::DimensionMismatch { expected: r.space.dim(), got: x.len() }.into());
    }
    let orbit = point_orbit(&r.system, &r.space, x, p.horizon, p.bilateral)?;
    let mut header: Vec<String> = vec!["index".into()];
    header.extend((0..r.space.dim()).map(|i| format!("x{i}")));
    let mut rows = Vec::new();
    for (i, q) in orbit.backward.iter().enumerate().skip(1).rev() {
        rows.push(std::iter::once(format!("-{i}")).chain(q.iter().map(|&v| num(v))).collect());
    }
    for (i, q) in orbit.forward.iter().enumerate() {
        rows.push(std::iter::once(i.to_string()).chain(q.iter().map(|&v| num(v))).collect());
    }
    if orbit.truncated {
        eprintln!("note: the orbit leaves the window before index {}", p.horizon);
    }
    emit(out, &csv_bytes(header, rows)?)?;
    Ok(0)
}

fn cmd_catalog_list(json: bool) -> Result<i32, Failure> {
    let entries = catalog::all();
    if json {
        let list: Vec<_> = entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "name": e.name,
                    "summary": e.summary,
                    "spaces": e.recipes.iter().map(|r| r.label.as_str()).collect::<Vec<_>>(),
                    "defaults": e.defaults,
                    "invertible": e.system.is_invertible(),
                })
            })
            .collect();
        let text = serde_json::to_string_pretty(&list).context("serializing catalog")?;
        print_bytes(format!("{text}\n").as_bytes())?;
    } else {
        let mut text = String::new();
        for e in &entries {
            let labels: Vec<&str> = e.recipes.iter().map(|r| r.label.as_str()).collect();
            text += &format!("{:<16} [{}] {}\n", e.name, labels.join(","), e.summary);
        }
        print_bytes(text.as_bytes())?;
    }
    Ok(0)
}
