//! Build the RH2 completion table: one second-order block per starting path.

use ddsim::aht::build_rh2_completion_table;
use ddsim::groups::{efficient_group, EfficientKind};
use ddsim::model::{build_hamiltonian, SpinChainParams};
use ddsim::schedule::format_labels;

fn main() -> ddsim::Result<()> {
    let n = 6;
    let h = build_hamiltonian(&SpinChainParams::nn(n, 1.0, 1.0))?;
    let t = build_rh2_completion_table(&efficient_group(EfficientKind::ZY, n)?, &h)?;
    println!("{} starts", t.len());
    for (start, block) in t.starts().zip(t.blocks()).take(6) {
        println!("{} -> {}", format_labels(start), format_labels(block));
    }
    Ok(())
}
