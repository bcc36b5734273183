//! Brute-force M₂ by enumerating all `4ⁿ` Pauli strings, `O(8ⁿ)` total.
//!
//! This is the reference the XOR–FWHT engine is validated against. It
//! deliberately shares no code with the engine beyond the final reduction.

use alloc::vec;

use crate::engine::{check_size, finish, timed, Moments};
use crate::{parallel, reduce, Error, Method, Result, SreResult, StateVector, C64};

/// Default qubit ceiling for enumeration.
pub const DEFAULT_ORACLE_MAX_QUBITS: u32 = 10;

/// `X^x Z^z`, identified modulo global phase.
///
/// The `i` in `Y = iXZ` is not tracked, so [`pauli_expectation`] returns
/// `⟨ψ|X^x Z^z|ψ⟩`, which differs from `⟨Y⟩`-containing strings by a power
/// of `i`. Only the modulus is meaningful here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliLabel {
    pub x_mask: u64,
    pub z_mask: u64,
}

impl PauliLabel {
    pub const IDENTITY: PauliLabel = PauliLabel { x_mask: 0, z_mask: 0 };

    pub fn new(x_mask: u64, z_mask: u64) -> Self {
        Self { x_mask, z_mask }
    }

    fn check(&self, dim: usize) -> Result<()> {
        let bound = dim as u64;
        for mask in [self.x_mask, self.z_mask] {
            if mask >= bound {
                return Err(Error::IndexOutOfRange { index: mask, bound });
            }
        }
        Ok(())
    }
}

/// `Σ_t (−1)^{popcount(z & t)} conj(ψ[t ⊕ x]) ψ[t]`.
pub fn pauli_expectation(psi: &StateVector, p: PauliLabel) -> Result<C64> {
    p.check(psi.dim())?;
    Ok(expectation(psi.amplitudes(), p.x_mask as usize, p.z_mask as usize))
}

#[inline]
fn expectation(amps: &[C64], x: usize, z: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (t, &a) in amps.iter().enumerate() {
        let term = amps[t ^ x].conj() * a;
        if (z & t).count_ones() & 1 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    pub workers: usize,
    pub max_qubits: u32,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { workers: 1, max_qubits: DEFAULT_ORACLE_MAX_QUBITS }
    }
}

/// M₂ by direct enumeration; refuses more than ten qubits.
pub fn sre2_brute_force(psi: &StateVector) -> Result<SreResult> {
    sre2_brute_force_with(psi, &OracleOptions::default())
}

/// Enumeration order is `x` outer, `z` inner, both ascending; per-`x`
/// partial sums are tree-reduced.
pub fn sre2_brute_force_with(psi: &StateVector, opts: &OracleOptions) -> Result<SreResult> {
    check_size(psi, opts.max_qubits)?;
    let amps = psi.amplitudes();
    let d = amps.len();
    let workers = parallel::effective_workers(opts.workers, d);
    let (partial, secs) = timed(|| {
        let mut partial = vec![(0.0, 0.0); d];
        parallel::fill_indexed(
            &mut partial,
            workers,
            || (),
            |_, x| {
                let mut fourth = 0.0;
                let mut second = 0.0;
                for z in 0..d {
                    let p = expectation(amps, x, z).norm_sqr();
                    second += p;
                    fourth += p * p;
                }
                (fourth, second)
            },
        );
        partial
    });
    let (fourth, second): (alloc::vec::Vec<f64>, alloc::vec::Vec<f64>) = partial.into_iter().unzip();
    let moments =
        Moments { fourth: reduce::pairwise_sum(&fourth), second: reduce::pairwise_sum(&second), workers };
    finish(moments, psi.n_qubits(), Method::BruteForce, secs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::FRAC_1_SQRT_2;
    use crate::state::{basis_state, t_state, StateVector};

    #[test]
    fn identity_expectation_is_one() {
        let psi = crate::state::haar_random_state(3, &crate::RngSpec::new(1, 0)).unwrap();
        let e = pauli_expectation(&psi, PauliLabel::IDENTITY).unwrap();
        assert!((e - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn single_qubit_eigenstates() {
        let zero = basis_state(1, 0).unwrap();
        assert_eq!(pauli_expectation(&zero, PauliLabel::new(0, 1)).unwrap(), C64::new(1.0, 0.0));
        let plus = StateVector::new(vec![C64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap();
        let e = pauli_expectation(&plus, PauliLabel::new(1, 0)).unwrap();
        assert!((e - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn t_state_by_enumeration() {
        let t = t_state();
        let mods: alloc::vec::Vec<f64> = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(x, z)| pauli_expectation(&t, PauliLabel::new(x, z)).unwrap().norm())
            .collect();
        let want = [1.0, 0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        for (m, w) in mods.iter().zip(want) {
            assert!((m - w).abs() < 1e-15);
        }
        let res = sre2_brute_force(&t).unwrap();
        assert!((res.m2 - (4.0f64 / 3.0).log2()).abs() < 1e-15);
        assert_eq!(res.method, Method::BruteForce);
    }

    #[test]
    fn masks_are_range_checked() {
        let psi = basis_state(2, 0).unwrap();
        assert!(matches!(
            pauli_expectation(&psi, PauliLabel::new(4, 0)),
            Err(Error::IndexOutOfRange { index: 4, bound: 4 })
        ));
        assert!(pauli_expectation(&psi, PauliLabel::new(0, 7)).is_err());
    }

    #[test]
    fn guard_refuses_large_inputs() {
        let psi = basis_state(11, 0).unwrap();
        let err = sre2_brute_force(&psi).unwrap_err();
        assert_eq!(err, Error::TooManyQubits { n_qubits: 11, limit: 10 });
    }
}
