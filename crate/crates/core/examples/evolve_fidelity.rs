//! Exact propagation of one schedule and the entanglement fidelity of the
//! logical propagator, for ideal and flip-angle-error pulses.

use ddsim::engine::{entanglement_fidelity, evolve_physical, evolve_toggling, ErrorModel, PropagatorCache, Sampling};
use ddsim::groups::{efficient_group, EfficientKind};
use ddsim::model::{build_hamiltonian, SpinChainParams};
use ddsim::schedule::{generate_realization, ProtocolKind, ProtocolSpec};

fn main() -> ddsim::Result<()> {
    let n = 6;
    let h = build_hamiltonian(&SpinChainParams::nn(n, 1.0, 1.0))?;
    let cache = PropagatorCache::new(&h)?;
    let g = efficient_group(EfficientKind::ZY, n)?;
    let s = generate_realization(&ProtocolSpec::new(ProtocolKind::Cdd), &g, 0.1, 160, 0)?;

    let ev = evolve_toggling(&s, &cache, Sampling::Slots(40))?;
    let noisy = evolve_physical(&s, &cache, &ErrorModel::FlipAngle { epsilon: 0.01 }, 40)?;
    println!("J·T      ideal      ε=0.01");
    for ((t, u), p) in ev.samples.iter().zip(&noisy) {
        println!("{t:5.1}  {:.6}  {:.6}", entanglement_fidelity(u.as_ref()), entanglement_fidelity(p.logical.as_ref()));
    }
    Ok(())
}
