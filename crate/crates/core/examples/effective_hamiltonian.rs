//! Numerical effective Hamiltonian `i log(U)/T` of a PDD cycle and its
//! scaling with Δt.

use ddsim::aht::{convergence_order_fit, schedule_effective_hamiltonian};
use ddsim::engine::PropagatorCache;
use ddsim::groups::{efficient_group, EfficientKind};
use ddsim::model::{build_hamiltonian, SpinChainParams};
use ddsim::schedule::{generate_realization, pdd_labels, ProtocolKind, ProtocolSpec};

fn main() -> ddsim::Result<()> {
    let n = 4;
    let h = build_hamiltonian(&SpinChainParams::nn(n, 1.0, 1.0))?;
    let g = efficient_group(EfficientKind::ZY, n)?;
    let cache = PropagatorCache::new(&h)?;
    let s = generate_realization(&ProtocolSpec::new(ProtocolKind::Pdd), &g, 0.05, 4, 0)?;
    let heff = schedule_effective_hamiltonian(&s, &cache)?;
    let norm = (0..heff.nrows()).flat_map(|i| (0..heff.ncols()).map(move |j| (i, j))).map(|(i, j)| heff[(i, j)].norm_sqr()).sum::<f64>().sqrt();
    println!("‖H_eff‖_F at Δt=0.05: {norm:.4e}");
    let labels: Vec<usize> = pdd_labels(4).iter().map(|l| l - 1).collect();
    let fit = convergence_order_fit(&labels, &g, &h, &[0.02, 0.04, 0.08])?;
    println!("{fit:?}");
    Ok(())
}
