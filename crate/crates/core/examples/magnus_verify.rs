//! Average-Hamiltonian terms of one cycle, checked against closed forms.

use ddsim::groups::Path;
use ddsim::model::SpinChainParams;
use ddsim::schedule::ProtocolKind;
use ddsim::verify::{verify, VerifyRequest};

fn main() -> ddsim::Result<()> {
    for (kind, group) in [(ProtocolKind::Pdd, "GZY"), (ProtocolKind::Sdd, "GXY"), (ProtocolKind::Ph2, "GZY")] {
        let report = verify(&VerifyRequest {
            protocol: kind,
            group: group.into(),
            path: Some(Path::identity(4)),
            system: SpinChainParams::nn(6, 1.0, 1.0),
            dt: 0.1,
            labels: None,
        })?;
        println!("{report}");
    }
    Ok(())
}
