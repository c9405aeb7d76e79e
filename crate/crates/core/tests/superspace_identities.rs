use cpi_core::superspace::verify::{
    default_models, lattice_reduction_suite, projector_suite, superfield_expansion_suite, Status,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn expansion_holds_for_any_seed(seed in any::<u64>()) {
        for r in superfield_expansion_suite(&default_models(), 1, seed).unwrap() {
            prop_assert_eq!(r.status, Status::Pass);
            prop_assert_eq!(r.max_residual_coefficient, 0.0);
        }
    }

    #[test]
    fn lattice_reduction_holds_for_any_seed(seed in any::<u64>(), n in 1usize..4) {
        for r in lattice_reduction_suite(&default_models(), &[n], seed).unwrap() {
            prop_assert_eq!(r.max_residual_coefficient, 0.0);
        }
    }

    #[test]
    fn projector_holds_for_any_hbar(seed in any::<u64>(), num in 1i64..7, den in 1i64..7) {
        for r in projector_suite(&default_models(), &[2], &[(num, den)], seed).unwrap() {
            prop_assert_eq!(r.status, Status::Pass);
        }
    }
}
