//! XOR–FWHT engine against brute-force Pauli enumeration, plus the
//! symmetry properties M₂ must satisfy.

use proptest::prelude::*;
use sre_core::engine::sre2_exact_with;
use sre_core::fwht::{fwht_in_place, xor_shift_product};
use sre_core::oracle::{sre2_brute_force_with, OracleOptions};
use sre_core::state::{basis_state, haar_random_state, t_state, tensor_product};
use sre_core::{
    pauli_expectation, pauli_fourth_moment, sre2_batch, sre2_brute_force, sre2_exact, EngineOptions,
    PauliLabel, RngSpec, StateVector, C64,
};

/// Σ_P |⟨P⟩|⁴ over explicit Pauli strings in {I, X, Y, Z}^N, each applied
/// qubit by qubit with its true matrix (including the phases of Y).
fn explicit_fourth_moment(psi: &StateVector) -> f64 {
    let n = psi.n_qubits() as usize;
    let amps = psi.amplitudes();
    let mut total = 0.0;
    for code in 0..4usize.pow(n as u32) {
        let mut v = amps.to_vec();
        for q in 0..n {
            let op = (code / 4usize.pow(q as u32)) % 4;
            let m = 1usize << q;
            let mut w = v.clone();
            for t in 0..v.len() {
                let bit = (t >> q) & 1;
                w[t] = match op {
                    0 => v[t],
                    1 => v[t ^ m],
                    // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩  ⇒  (Yv)[t] = ±i v[t ⊕ m]
                    2 => v[t ^ m] * if bit == 1 { C64::i() } else { -C64::i() },
                    _ => v[t] * if bit == 1 { -1.0 } else { 1.0 },
                };
            }
            v = w;
        }
        let e: C64 = amps.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        total += e.norm_sqr().powi(2);
    }
    total
}

fn state_strategy(max_n: u32) -> impl Strategy<Value = StateVector> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1usize << n).prop_filter_map("nonzero", |v| {
            StateVector::normalized(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).ok()
        })
    })
}

/// `X^x Z^z ψ`: bit flips then sign flips.
fn apply_pauli(psi: &StateVector, x: usize, z: usize) -> StateVector {
    let a = psi.amplitudes();
    let out: Vec<C64> = (0..a.len())
        .map(|t| {
            let src = t ^ x;
            let sign = if (z & src).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            a[src] * sign
        })
        .collect();
    StateVector::new(out).unwrap()
}

#[test]
fn t_state_pins() {
    let t = t_state();
    let r = explicit_fourth_moment(&t);
    assert!((r - 1.5).abs() < 1e-15);
    let want = (4.0f64 / 3.0).log2();
    assert!((want - 0.4150375).abs() < 1e-7);
    assert!((sre2_exact(&t, 1).unwrap().m2 - want).abs() < 1e-12);
    assert!((pauli_fourth_moment(&t).unwrap() - 1.5).abs() < 1e-15);

    // T ⊗ |0⟩ by enumeration of all sixteen two-qubit strings
    let t0 = tensor_product(&t, &basis_state(1, 0).unwrap());
    let r2 = explicit_fourth_moment(&t0);
    assert!((r2 - 3.0).abs() < 1e-14);
    assert!((sre2_brute_force(&t0).unwrap().m2 - want).abs() < 1e-12);
    assert!((sre2_exact(&t0, 1).unwrap().m2 - want).abs() < 1e-12);
}

#[test]
fn library_oracle_matches_explicit_paulis() {
    for n in 1..=4 {
        for s in 0..4 {
            let psi = haar_random_state(n, &RngSpec::new(100 + s, n as u64)).unwrap();
            let want = explicit_fourth_moment(&psi);
            let got = sre2_brute_force(&psi).unwrap().fourth_moment_sum;
            assert!((got - want).abs() < 1e-12 * want, "n = {n}");
        }
    }
}

#[test]
fn each_transformed_shift_holds_pauli_expectations() {
    let psi = haar_random_state(4, &RngSpec::new(3, 1)).unwrap();
    let d = psi.dim();
    let mut g = vec![C64::new(0.0, 0.0); d];
    for k in 0..d {
        xor_shift_product(psi.amplitudes(), k, &mut g).unwrap();
        fwht_in_place(&mut g).unwrap();
        for (u, gu) in g.iter().enumerate() {
            let e = pauli_expectation(&psi, PauliLabel::new(k as u64, u as u64)).unwrap();
            assert!((gu - e).norm() < 1e-14);
        }
    }
}

#[test]
fn oracle_equivalence_desk_scale() {
    for n in 1..=8 {
        for s in 0..5 {
            let psi = haar_random_state(n, &RngSpec::new(s, 7)).unwrap();
            let a = sre2_exact(&psi, 1).unwrap();
            let b = sre2_brute_force(&psi).unwrap();
            assert!((a.m2 - b.m2).abs() <= 1e-9, "n = {n}: {} vs {}", a.m2, b.m2);
            assert!((a.second_moment_sum - b.second_moment_sum).abs() <= 1e-8 * psi.dim() as f64);
        }
    }
}

#[test]
fn worker_count_is_bit_for_bit_irrelevant() {
    for n in [3, 7, 9] {
        let psi = haar_random_state(n, &RngSpec::new(21, 0)).unwrap();
        let base = sre2_exact(&psi, 1).unwrap();
        for workers in [2, 3, 5, 16] {
            let r = sre2_exact(&psi, workers).unwrap();
            assert_eq!(r.m2.to_bits(), base.m2.to_bits());
            assert_eq!(r.fourth_moment_sum.to_bits(), base.fourth_moment_sum.to_bits());
            assert_eq!(r.second_moment_sum.to_bits(), base.second_moment_sum.to_bits());
        }
        let opts = OracleOptions { workers: 4, ..OracleOptions::default() };
        let o1 = sre2_brute_force(&psi).unwrap();
        let o4 = sre2_brute_force_with(&psi, &opts).unwrap();
        assert_eq!(o1.m2.to_bits(), o4.m2.to_bits());
    }
}

#[test]
fn oracle_guard_can_be_overridden() {
    let psi = basis_state(11, 0).unwrap();
    assert!(sre2_brute_force(&psi).is_err());
    let opts = OracleOptions { workers: 1, max_qubits: 11 };
    assert_eq!(sre2_brute_force_with(&psi, &opts).unwrap().m2, 0.0);
    let opts = EngineOptions { workers: 1, max_qubits: 10 };
    assert!(sre2_exact_with(&psi, &opts).is_err());
}

#[test]
fn haar_mean_at_six_qubits() {
    // 200 samples; closed form log2(2^6 + 3) − 2 ≈ 4.066
    let states: Vec<StateVector> =
        (0..200).map(|s| haar_random_state(6, &RngSpec::new(2024, s)).unwrap()).collect();
    let m2: Vec<f64> = sre2_batch(&states, 2).unwrap().iter().map(|r| r.m2).collect();
    let (mean, se) = sre_core::reduce::mean_stderr(&m2);
    let theory = 67f64.log2() - 2.0;
    assert!((theory - 4.066).abs() < 1e-3);
    assert!((mean - theory).abs() < 3.0 * se, "mean {mean}, se {se}, theory {theory}");
}

#[test]
fn oracle_haar_mean_at_four_qubits() {
    let m2: Vec<f64> = (0..20)
        .map(|s| sre2_brute_force(&haar_random_state(4, &RngSpec::new(77, s)).unwrap()).unwrap().m2)
        .collect();
    let (mean, se) = sre_core::reduce::mean_stderr(&m2);
    let theory = 19f64.log2() - 2.0;
    assert!((theory - 2.248).abs() < 1e-3);
    assert!((mean - theory).abs() < 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn batch_of_haar_states_is_bounded() {
    let states: Vec<StateVector> =
        (0..10).map(|s| haar_random_state(6, &RngSpec::new(5, s)).unwrap()).collect();
    for r in sre2_batch(&states, 3).unwrap() {
        assert!(r.m2 > 0.0 && r.m2 < 6.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_equals_oracle(psi in state_strategy(6)) {
        let a = sre2_exact(&psi, 1).unwrap();
        let b = sre2_brute_force(&psi).unwrap();
        prop_assert!((a.m2 - b.m2).abs() <= 1e-9);
    }

    #[test]
    fn bounds_and_second_moment(psi in state_strategy(7)) {
        let r = sre2_exact(&psi, 1).unwrap();
        let d = psi.dim() as f64;
        prop_assert!(r.m2 >= -1e-12 && r.m2 <= psi.n_qubits() as f64);
        prop_assert!(r.fourth_moment_sum >= 1.0 - 1e-9);
        prop_assert!((r.second_moment_sum - d).abs() <= 1e-6 * d);
    }

    #[test]
    fn global_phase_invariance(psi in state_strategy(7), theta in -7.0..7.0f64) {
        let a = sre2_exact(&psi, 1).unwrap().m2;
        let b = sre2_exact(&psi.clone().with_global_phase(theta), 1).unwrap().m2;
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn pauli_invariance(psi in state_strategy(7), x in any::<usize>(), z in any::<usize>()) {
        let mask = psi.dim() - 1;
        let moved = apply_pauli(&psi, x & mask, z & mask);
        let a = sre2_exact(&psi, 1).unwrap().m2;
        let b = sre2_exact(&moved, 1).unwrap().m2;
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn additivity(a in state_strategy(4), b in state_strategy(4)) {
        let ab = tensor_product(&a, &b);
        let lhs = sre2_exact(&ab, 1).unwrap().m2;
        let rhs = sre2_exact(&a, 1).unwrap().m2 + sre2_exact(&b, 1).unwrap().m2;
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn oracle_modulus_ignores_global_phase(psi in state_strategy(4), theta in -7.0..7.0f64, x in any::<u64>(), z in any::<u64>()) {
        let mask = psi.dim() as u64 - 1;
        let p = PauliLabel::new(x & mask, z & mask);
        let a = pauli_expectation(&psi, p).unwrap().norm();
        let b = pauli_expectation(&psi.clone().with_global_phase(theta), p).unwrap().norm();
        prop_assert!((a - b).abs() <= 1e-13);
    }
}
