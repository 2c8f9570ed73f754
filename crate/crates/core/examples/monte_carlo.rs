//! Seeded Monte-Carlo ensemble over randomized protocols; prints mean ± σ.

use ddsim::engine::{monte_carlo, MonteCarloConfig, PropagatorCache};
use ddsim::groups::{efficient_group, EfficientKind};
use ddsim::model::{build_hamiltonian, SpinChainParams};
use ddsim::schedule::{ProtocolKind, ProtocolSpec};

fn main() -> ddsim::Result<()> {
    let n = 6;
    let cache = PropagatorCache::new(&build_hamiltonian(&SpinChainParams::nn(n, 1.0, 1.0))?)?;
    let g = efficient_group(EfficientKind::ZY, n)?;
    for kind in [ProtocolKind::Pdd, ProtocolKind::Nrd, ProtocolKind::Srpd] {
        let mut cfg = MonteCarloConfig::new(ProtocolSpec::new(kind).with_seed(7), g.clone(), 0.1, 200);
        cfg.n_realizations = 20;
        let tr = monte_carlo(&cfg, &cache)?;
        let i = tr.len() - 1;
        println!("{kind:>5}: F(J·T={:.0}) = {:.4} ± {:.4} ({} runs)", tr.sample_times[i], tr.mean[i], tr.stddev[i], tr.n_realizations);
    }
    Ok(())
}
