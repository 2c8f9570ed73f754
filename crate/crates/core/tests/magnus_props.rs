use ddsim::aht::forms::{h1_pdd_family, FormParams};
use ddsim::aht::{magnus0, magnus1, magnus2, toggled};
use ddsim::groups::{all_paths, efficient_group, EfficientKind};
use ddsim::model::{build_hamiltonian, SpinChainParams};
use ddsim::schedule::{pdd_labels, to_group_indices};
use proptest::prelude::*;

const KINDS: [EfficientKind; 3] = [EfficientKind::XY, EfficientKind::XZ, EfficientKind::ZY];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Reversing a block: H̄(0) and H̄(2) are invariant, H̄(1) changes sign.
    #[test]
    fn reversal_symmetry(kind in 0usize..3, p in 0usize..24, alpha in 0.5f64..5.0, dt in 0.01f64..0.2) {
        let g = efficient_group(KINDS[kind], 4).unwrap();
        let h = build_hamiltonian(&SpinChainParams::nn(4, 1.0, alpha)).unwrap();
        let idx = to_group_indices(&pdd_labels(4), &all_paths(4)[p]).unwrap();
        let s = toggled(&h, &g, &idx, dt).unwrap();
        let r = s.reversed();
        prop_assert!(magnus0(&s).unwrap().max_abs_diff(&magnus0(&r).unwrap()).unwrap() < 1e-12);
        prop_assert!(magnus1(&s).unwrap().try_add(&magnus1(&r).unwrap()).unwrap().equals_zero(1e-12));
        prop_assert!(magnus2(&s).unwrap().max_abs_diff(&magnus2(&r).unwrap()).unwrap() < 1e-12);
    }

    // Every PDD path yields one of the six first-order forms, for any (J, α, Δt).
    #[test]
    fn pdd_first_order_classified(kind in 0usize..3, p in 0usize..24, j in 0.2f64..3.0, alpha in 0.2f64..6.0, dt in 0.01f64..0.3) {
        let n = 6;
        let g = efficient_group(KINDS[kind], n).unwrap();
        let h = build_hamiltonian(&SpinChainParams::nn(n, j, alpha)).unwrap();
        let idx = to_group_indices(&pdd_labels(4), &all_paths(4)[p]).unwrap();
        let m1 = magnus1(&toggled(&h, &g, &idx, dt).unwrap()).unwrap();
        let family = h1_pdd_family(&FormParams::new(n, j, alpha, dt)).unwrap();
        let tol = 1e-12 * (1.0 + m1.max_abs());
        prop_assert!(family.iter().any(|(_, f)| m1.max_abs_diff(f).unwrap() <= tol));
    }
}
