use alloc::vec::Vec;

use rand::Rng;

use super::gates::{apply_two_qubit_gate, haar_u4};
use crate::{Error, Result, StateVector};

/// Bonds of one brickwork time step in application order: the even layer
/// `(0,1), (2,3), …, (N−2,N−1)` followed by the odd layer
/// `(1,2), (3,4), …, (N−3,N−2)`. Open boundary.
pub fn brickwork_bonds(n_qubits: u32) -> Result<Vec<(usize, usize)>> {
    if n_qubits < 2 || !n_qubits.is_multiple_of(2) {
        return Err(Error::invalid(alloc::format!(
            "brickwork circuits need an even number of qubits >= 2, got {n_qubits}"
        )));
    }
    let n = n_qubits as usize;
    let even = (0..n / 2).map(|k| (2 * k, 2 * k + 1));
    let odd = (0..n / 2 - 1).map(|k| (2 * k + 1, 2 * k + 2));
    Ok(even.chain(odd).collect())
}

/// One time step `U_odd · U_even` with a fresh Haar U(4) on every bond,
/// drawn from `rng` in application order.
pub fn brickwork_step<R: Rng + ?Sized>(psi: &mut StateVector, rng: &mut R) -> Result<()> {
    for (i, j) in brickwork_bonds(psi.n_qubits())? {
        let u = haar_u4(rng);
        apply_two_qubit_gate(psi, &u, i, j)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::all_up_state;
    use crate::RngSpec;

    #[test]
    fn layer_structure() {
        assert_eq!(brickwork_bonds(2).unwrap(), [(0, 1)]);
        assert_eq!(brickwork_bonds(6).unwrap(), [(0, 1), (2, 3), (4, 5), (1, 2), (3, 4)]);
        assert!(brickwork_bonds(5).is_err());
        assert!(brickwork_bonds(0).is_err());
    }

    #[test]
    fn step_preserves_norm() {
        let mut rng = RngSpec::new(1, 0).rng();
        let mut psi = all_up_state(8).unwrap();
        for _ in 0..5 {
            brickwork_step(&mut psi, &mut rng).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }
}
