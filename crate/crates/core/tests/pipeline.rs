//! End-to-end: traces, experiment runs, bundled configs and the CLI.

use std::path::{Path, PathBuf};
use std::process::Command;

use ddsim::engine::{monte_carlo, FidelityTrace, MonteCarloConfig, PropagatorCache};
use ddsim::experiment::{check_experiment, run_file, ExperimentConfig};
use ddsim::groups::{efficient_group, EfficientKind};
use ddsim::model::{build_hamiltonian, SpinChainParams};
use ddsim::schedule::{ProtocolKind, ProtocolSpec};
use proptest::prelude::*;

const SMALL: &str = r#"
name = "small"
seed = 5
n_realizations = 4
dt = 0.1
horizon = 4.0
group = "GZY"

[system]
n_qubits = 4
alpha = 1.0

[[curve]]
protocol = "PDD"

[[curve]]
protocol = "SRPD"
"#;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn csv_round_trip(rows in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 6), 1..4)) {
        let t = FidelityTrace::from_realizations("x", (0..6).map(|i| 0.37 * i as f64).collect(), rows, 3);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = FidelityTrace::read_csv("x", buf.as_slice()).unwrap();
        prop_assert_eq!(back.n_realizations, t.n_realizations);
        for i in 0..t.len() {
            prop_assert!((back.sample_times[i] - t.sample_times[i]).abs() <= 1e-12);
            prop_assert!((back.mean[i] - t.mean[i]).abs() <= 1e-12);
            prop_assert!((back.stddev[i] - t.stddev[i]).abs() <= 1e-12);
        }
    }
}

#[test]
fn single_realization_has_zero_spread() {
    let cache = PropagatorCache::new(&build_hamiltonian(&SpinChainParams::nn(4, 1.0, 1.0)).unwrap()).unwrap();
    let g = efficient_group(EfficientKind::ZY, 4).unwrap();
    let cfg = MonteCarloConfig::new(ProtocolSpec::new(ProtocolKind::Nrd).with_seed(9), g, 0.1, 40);
    let t = monte_carlo(&cfg, &cache).unwrap();
    assert_eq!(t.n_realizations, 1);
    assert!(t.stddev.iter().all(|&s| s == 0.0));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let m = run_file(&cfg, &a).unwrap();
    run_file(&cfg, &b).unwrap();
    for c in &m.curves {
        let x = std::fs::read(a.join(&c.file)).unwrap();
        let y = std::fs::read(b.join(&c.file)).unwrap();
        assert_eq!(x, y, "{}", c.file);
    }
}

#[test]
fn bundled_configs_validate() {
    let dir = manifest_dir().join("configs");
    let mut n = 0;
    for e in std::fs::read_dir(&dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "toml") {
            let (cfg, _) = ExperimentConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            let plan = check_experiment(&cfg, &dir).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            assert!(!plan.is_empty(), "{}", p.display());
            n += 1;
        }
    }
    assert!(n >= 10);
}

fn ddsim(args: &[&str], cwd: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_ddsim")).args(args).current_dir(cwd).output().unwrap().status.code().unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("small.toml"), SMALL).unwrap();
    std::fs::write(d.join("bad.toml"), "name = 3\n").unwrap();
    assert_eq!(ddsim(&["run", "small.toml", "-o", "out"], d), 0);
    assert_eq!(ddsim(&["plot", "out", "-o", "out/plot.svg"], d), 0);
    assert!(d.join("out/plot.svg").exists());
    assert_eq!(ddsim(&["run", "--check", "small.toml"], d), 0);
    assert_eq!(ddsim(&["verify", "-p", "PH2", "-n", "4"], d), 0);
    assert_eq!(ddsim(&["search", "-n", "4", "--cycles", "2"], d), 0);
    assert_eq!(ddsim(&["table", "-n", "4", "-o", "t.txt"], d), 0);

    assert_eq!(ddsim(&["run", "bad.toml"], d), 1);
    assert_eq!(ddsim(&["run", "missing.toml"], d), 1);
    assert_eq!(ddsim(&["frobnicate"], d), 1);

    assert_eq!(ddsim(&["verify", "-p", "ALGOR_REPLAY", "-n", "4", "--labels", "1234-1234-1234-1234-1234-1234"], d), 2);

    assert_eq!(ddsim(&["verify", "-p", "PDD", "-g", "NESTED(7)", "-n", "4"], d), 3);
    assert_eq!(ddsim(&["search", "-n", "14", "--cycles", "1"], d), 3);
}
