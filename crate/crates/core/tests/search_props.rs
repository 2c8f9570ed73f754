use ddsim::groups::{all_paths, efficient_group, EfficientKind};
use ddsim::model::{build_hamiltonian, SpinChainParams};
use ddsim::search::{greedy_search, stream_fidelities, SearchConfig};

fn cfg(cycles: usize) -> SearchConfig {
    let n = 4;
    let h = build_hamiltonian(&SpinChainParams::nn(n, 1.0, 1.3)).unwrap();
    SearchConfig::new(efficient_group(EfficientKind::ZY, n).unwrap(), h, 0.1, cycles)
}

#[test]
fn deterministic() {
    let c = cfg(5);
    assert_eq!(greedy_search(&c).unwrap(), greedy_search(&c).unwrap());
}

#[test]
fn each_step_is_the_argmax() {
    let c = cfg(4);
    let r = greedy_search(&c).unwrap();
    for (k, step) in r.steps.iter().enumerate() {
        let prefix = &r.stream[..4 * k];
        let mut best = f64::NEG_INFINITY;
        for p in all_paths(4) {
            let mut s = prefix.to_vec();
            s.extend(p.order().iter().map(|i| i + 1));
            best = best.max(stream_fidelities(&c, &s).unwrap()[k]);
        }
        assert!((best - step.fitness).abs() < 1e-12, "cycle {k}: {best} vs {}", step.fitness);
    }
}

#[test]
fn replay_matches_logged_fitness() {
    let c = cfg(6);
    let r = greedy_search(&c).unwrap();
    let f = stream_fidelities(&c, &r.stream).unwrap();
    for (s, f) in r.steps.iter().zip(&f) {
        assert!((s.fitness - f).abs() < 1e-12);
    }
}
