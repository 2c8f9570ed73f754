//! Pauli strings as bitmasks: products with phases, commutation, and
//! commutators of Pauli sums.

use ddsim::model::{build_hamiltonian, SpinChainParams};
use ddsim::pauli::{PauliString, PauliSum};

fn show(name: &str, h: &PauliSum) {
    println!("{name} =");
    for (p, c) in h.iter() {
        println!("  {:+.3} {p}", c.re);
    }
}

fn main() -> ddsim::Result<()> {
    let xy = PauliString::from_letters("XYI")?;
    let zz = PauliString::from_letters("ZZI")?;
    println!("{xy} · {zz} = {}", xy.multiply(&zz)?);
    println!("commute: {}", xy.commutes_with(&zz));

    let h = build_hamiltonian(&SpinChainParams::nn(3, 1.0, 2.0))?;
    show("H0", &h);
    let x0 = PauliSum::from_real(PauliString::from_letters("XII")?, 1.0);
    println!("[H0, X₁] has {} terms", h.commutator(&x0)?.len());
    show("X₁ H0 X₁", &h.conjugate(&PauliString::from_letters("XII")?)?);
    Ok(())
}
