//! Greedy cycle-by-cycle path search with its per-cycle fitness log.

use ddsim::groups::{efficient_group, EfficientKind};
use ddsim::model::{build_hamiltonian, SpinChainParams};
use ddsim::search::{greedy_search, SearchConfig};

fn main() -> ddsim::Result<()> {
    let n = 6;
    let h = build_hamiltonian(&SpinChainParams::nn(n, 1.0, 1.0))?;
    let cfg = SearchConfig::new(efficient_group(EfficientKind::ZY, n)?, h, 0.1, 12);
    let r = greedy_search(&cfg)?;
    println!("stream: {}", r.dash_notation());
    for s in &r.steps {
        println!("cycle {:2} J·T={:4.1} path {:?} fitness {:.8} ({} tied)", s.cycle, s.time, s.path, s.fitness, s.n_tied);
    }
    Ok(())
}
