use proptest::prelude::*;
use sre::state_io::{load_state, save_state, StateFormat};
use sre_core::{StateVector, C64};

fn amplitudes() -> impl Strategy<Value = Vec<C64>> {
    (1u32..=6).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im)), 1usize << n)
    })
}

fn bits(psi: &StateVector) -> Vec<(u64, u64)> {
    psi.amplitudes().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_then_load_is_bit_identical(amps in amplitudes()) {
        prop_assume!(amps.iter().any(|z| z.norm() > 1e-3));
        let psi = StateVector::normalized(amps).unwrap();
        let dir = tempfile::tempdir().unwrap();
        for (name, format) in [("s.bin", StateFormat::Binary), ("s.jsonl", StateFormat::JsonLines)] {
            let path = dir.path().join(name);
            save_state(&path, &psi, format).unwrap();
            prop_assert_eq!(bits(&load_state(&path).unwrap()), bits(&psi));
        }
    }
}
