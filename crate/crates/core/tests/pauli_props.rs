use ddsim::pauli::{Letter, PauliString, PauliSum};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

const N: usize = 4;

fn pauli() -> impl Strategy<Value = PauliString> {
    (0u64..16, 0u64..16).prop_map(|(x, z)| PauliString::from_masks(N, x, z))
}

fn sum() -> impl Strategy<Value = PauliSum> {
    prop::collection::vec((pauli(), -2.0f64..2.0), 1..5)
        .prop_map(|v| v.into_iter().map(|(p, c)| (p, C64::new(c, 0.0))).collect())
}

fn dense_diff(a: &PauliSum, b: &PauliSum) -> f64 {
    let (ma, mb) = (a.to_matrix().unwrap(), b.to_matrix().unwrap());
    (0..ma.nrows()).flat_map(|i| (0..ma.ncols()).map(move |j| (i, j))).map(|(i, j)| (ma[(i, j)] - mb[(i, j)]).norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn product_is_associative(a in pauli(), b in pauli(), c in pauli()) {
        let l = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let r = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn adjoint_inverts(a in pauli()) {
        prop_assert!(a.multiply(&a.adjoint()).unwrap().is_identity());
    }

    #[test]
    fn commutation_matches_products(a in pauli(), b in pauli()) {
        let ab = a.multiply(&b).unwrap();
        let ba = b.multiply(&a).unwrap();
        prop_assert_eq!(a.commutes_with(&b), ab == ba);
        prop_assert_eq!(ab.bare(), ba.bare());
    }

    #[test]
    fn product_matches_dense(a in pauli(), b in pauli()) {
        let sa = PauliSum::from_real(a.clone(), 1.0);
        let sb = PauliSum::from_real(b.clone(), 1.0);
        let sym = PauliSum::from_real(a.multiply(&b).unwrap(), 1.0);
        prop_assert!(dense_diff(&sa.try_mul(&sb).unwrap(), &sym) < 1e-14);
    }

    #[test]
    fn commutator_antisymmetric_and_jacobi(a in sum(), b in sum(), c in sum()) {
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        prop_assert!(ab.try_add(&ba).unwrap().equals_zero(1e-12));
        let cyc = |x: &PauliSum, y: &PauliSum, z: &PauliSum| x.commutator(&y.commutator(z).unwrap()).unwrap();
        let j = cyc(&a, &b, &c).try_add(&cyc(&b, &c, &a)).unwrap().try_add(&cyc(&c, &a, &b)).unwrap();
        prop_assert!(j.equals_zero(1e-10));
    }

    #[test]
    fn conjugation_preserves_hermiticity(h in sum(), g in pauli()) {
        let c = h.conjugate(&g.bare()).unwrap();
        prop_assert!(c.is_hermitian(1e-14));
        prop_assert_eq!(c.len(), h.pruned(0.0).len());
    }
}

#[test]
fn letters_round_trip() {
    let p = PauliString::from_letters("XYZI").unwrap();
    assert_eq!(p.letters().collect::<Vec<_>>(), vec![Letter::X, Letter::Y, Letter::Z, Letter::I]);
    assert_eq!(p.weight(), 3);
}
