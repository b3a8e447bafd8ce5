use std::path::Path;
use std::process::{Command, Output};

use expanso_core::cli::config::{ExperimentConfig, GridSpec, InlineSystem, MetricName, Outputs, SpaceSpec, SystemSpec};
use proptest::prelude::*;

fn expanso(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expanso")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn classify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = expanso(&["classify", "--system", "example3.2", "--space", "lattice", "--out", "a"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("c=0.5 N=10: n-expansive=1"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a/report.json")).unwrap()).unwrap();
    assert_eq!(report["reports"][0]["bilateral"]["verdicts"]["n_expansive"], 1);
    let balls = std::fs::read_to_string(dir.path().join("a/balls.csv")).unwrap();
    assert!(balls.starts_with("c,variant,x0,card_0,growth_exponent,interior_measure,truncated\n"));
    assert!(!balls.contains('\r'));

    let o = expanso(&["classify", "--system", "doubling", "--c", "0.2", "--horizon", "20"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n-expansive=1"));
    assert!(dir.path().join("report.json").exists() && dir.path().join("balls.csv").exists());

    let o = expanso(&["classify", "--system", "example4.1", "--c", "0.1", "--out", "b"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("aleph0=false cw=false meagre=true"));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"schema": 1, "system": "identity", "c": [0.05, 0.1], "horizon": 6, "seed": 9}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for (out, threads) in [("r1", "1"), ("r2", "4"), ("r3", "4")] {
        let o = Command::new(env!("CARGO_BIN_EXE_expanso"))
            .args(["classify", "--config", "cfg.json", "--out", out])
            .env("EXPANSO_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        outputs.push((
            std::fs::read(dir.path().join(out).join("balls.csv")).unwrap(),
            std::fs::read(dir.path().join(out).join("report.json")).unwrap(),
        ));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let csv = String::from_utf8(outputs[0].0.clone()).unwrap();
    // 64 centers, two radii, forward and bilateral variants
    assert_eq!(csv.lines().count(), 1 + 64 * 2 * 2);
}

#[test]
fn ball_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = expanso(&["ball", "--system", "identity", "--c", "0.1", "--center", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let base: Vec<f64> = rows.iter().filter(|r| r[1] == 1.0 / 64.0).map(|r| r[2]).collect();
    assert_eq!(base.len(), 13);
    assert!(base.iter().all(|x| (0.4..=0.6).contains(x)));
    assert!(rows.iter().all(|r| r[3] <= 0.1));

    let o = expanso(&["ball", "--system", "example4.1", "--c", "0.1", "--center", "0.5,0.25,0.25"], dir.path());
    let rows = csv_rows(&stdout(&o));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| (0.4..=0.6).contains(&r[2]) && r[3] == 0.25 && r[4] == 0.25));

    let o = expanso(&["ball", "--system", "doubling", "--c", "0.2", "--center", "0.3"], dir.path());
    let rows = csv_rows(&stdout(&o));
    // base grid plus refinements x2 and x4, one member each
    assert_eq!(rows.len(), 3);
    let spacings: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(spacings, vec![1.0 / 512.0, 1.0 / 1024.0, 1.0 / 2048.0]);
}

#[test]
fn orbit_and_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let o = expanso(&["orbit", "--system", "example3.1", "--space", "lattice", "--x", "3", "--horizon", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("index,x0\n-4,3\n"));
    assert!(text.contains("\n3,12\n4,3\n"));
    let o = expanso(&["catalog", "list", "--json"], dir.path());
    let list: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(list.as_array().unwrap().len(), expanso_core::catalog::NAMES.len());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("neg.json"), "{\"schema\": 1,\n \"system\": \"doubling\",\n \"c\": [-1]}").unwrap();
    let o = expanso(&["classify", "--config", "neg.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    std::fs::write(dir.path().join("trunc.json"), "{\"schema\": 1,\n \"system\": ").unwrap();
    let o = expanso(&["classify", "--config", "trunc.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = expanso(&["classify", "--system", "tent"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = expanso(&["classify", "--system", "doubling", "--bilateral", "true"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = expanso(&["ball", "--system", "contraction", "--center", "3.0"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside the window"));
    let o = expanso(&["verify", "--only", "T9.9"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_filter_and_fault_hook() {
    let dir = tempfile::tempdir().unwrap();
    let o = expanso(&["verify", "--only", "T3.10"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains("T3.10  pass"));

    let o = expanso(&["verify", "--only", "T4.5", "--inject-fault", "T4.5", "--json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["checks"][0]["status"], "fail");
    assert!(r["checks"][0]["witness"].as_str().unwrap().contains('@'));
}

fn finite_pos() -> impl Strategy<Value = f64> {
    (1u32..10_000).prop_map(|k| k as f64 / 1024.0)
}

fn system_spec() -> impl Strategy<Value = SystemSpec> {
    let leaf = prop_oneof![
        prop::sample::select(expanso_core::catalog::NAMES).prop_map(|n| SystemSpec::Catalog(n.to_string())),
        (prop::collection::vec(-4.0f64..4.0, 1..4), prop::collection::vec(-4.0f64..4.0, 1..4), any::<bool>())
            .prop_map(|(a, b, mod_one)| SystemSpec::Inline(InlineSystem::Affine { a, b, mod_one })),
        prop::collection::vec(prop::collection::vec(-3i64..4, 2), 2)
            .prop_map(|matrix| SystemSpec::Inline(InlineSystem::Matrix { matrix })),
    ];
    leaf.prop_recursive(2, 6, 3, |inner| {
        prop::collection::vec(inner, 1..3).prop_map(|pattern| SystemSpec::Inline(InlineSystem::Alternation { pattern }))
    })
}

fn space_spec() -> impl Strategy<Value = Option<SpaceSpec>> {
    prop_oneof![
        Just(None),
        "[a-z]{1,8}".prop_map(|l| Some(SpaceSpec::Label(l))),
        (
            prop::collection::vec((-10.0f64..0.0, 0.5f64..10.0).prop_map(|(a, b)| [a, b]), 0..3),
            finite_pos(),
            prop::sample::select(vec![MetricName::Euclidean, MetricName::Circle, MetricName::Torus, MetricName::Lattice]),
            prop::option::of(1usize..4),
            prop::option::of(any::<bool>()),
        )
            .prop_map(|(window, spacing, metric, dimension, compact)| {
                Some(SpaceSpec::Grid(GridSpec { window, spacing, metric, dimension, compact }))
            }),
    ]
}

prop_compose! {
    fn config()(
        system in system_spec(),
        space in space_spec(),
        horizon in prop::option::of(1usize..100),
        c in prop::collection::vec(finite_pos(), 0..4),
        refinements in prop::option::of(prop::collection::vec(2usize..9, 0..3)),
        seed in any::<u64>(),
        bilateral in prop::option::of(any::<bool>()),
        report in prop::option::of("[a-z]{1,6}\\.json"),
    ) -> ExperimentConfig {
        ExperimentConfig {
            schema: 1,
            system,
            space,
            horizon,
            c,
            refinements,
            seed,
            bilateral,
            outputs: Outputs { report: report.map(Into::into), balls: None },
        }
    }
}

proptest! {
    #[test]
    fn config_round_trips(cfg in config()) {
        let text = cfg.to_json();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        if cfg.validate(None).is_ok() {
            prop_assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
        }
    }
}
