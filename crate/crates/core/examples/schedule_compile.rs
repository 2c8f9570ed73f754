//! Compile a few protocols into toggling frames and physical pulses.

use ddsim::groups::{efficient_group, EfficientKind};
use ddsim::schedule::{generate_realization, ProtocolKind, ProtocolSpec};

fn main() -> ddsim::Result<()> {
    let g = efficient_group(EfficientKind::ZY, 4)?;
    for kind in [ProtocolKind::Pdd, ProtocolKind::Cdd, ProtocolKind::Scpd, ProtocolKind::Srpd, ProtocolKind::Ph2] {
        let s = generate_realization(&ProtocolSpec::new(kind).with_seed(1), &g, 0.1, 24, 0)?;
        println!("{kind:>6}: {}", s.label_string());
        let pulses: Vec<String> = s.pulses().iter().take(8).map(|p| p.op.to_string()).collect();
        println!("        first pulses {}", pulses.join(" | "));
    }
    Ok(())
}
