//! Dense one- and two-qubit gates acting on state vectors.
//!
//! A two-qubit gate on qubits `(i, j)` sees the local index
//! `(bit_j << 1) | bit_i`, i.e. `i` is the low bit of the 4×4 matrix index.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{math, Error, Result, RngSpec, StateVector, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// 2×2 matrix, row-major.
pub type Unitary2 = [[C64; 2]; 2];

/// 4×4 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary4(pub [[C64; 4]; 4]);

impl Unitary4 {
    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Self(m)
    }

    fn permutation(image: [usize; 4]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (col, &row) in image.iter().enumerate() {
            m[row][col] = ONE;
        }
        Self(m)
    }

    pub fn swap() -> Self {
        Self::permutation([0, 2, 1, 3])
    }

    /// CNOT with the first qubit (`i`) as control and the second (`j`) as target.
    pub fn cnot() -> Self {
        Self::permutation([0, 3, 2, 1])
    }

    /// `u` on the first qubit, identity on the second.
    pub fn on_first(u: &Unitary2) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for hi in 0..2 {
            for r in 0..2 {
                for c in 0..2 {
                    m[(hi << 1) | r][(hi << 1) | c] = u[r][c];
                }
            }
        }
        Self(m)
    }

    pub fn adjoint(&self) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = self.0[c][r].conj();
            }
        }
        Self(m)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = (0..4).map(|k| self.0[r][k] * other.0[k][c]).sum();
            }
        }
        Self(m)
    }

    /// Largest entry of `|U†U − 1|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint().matmul(self);
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == c { ONE } else { ZERO };
                worst = worst.max(math::cabs(p.0[r][c] - want));
            }
        }
        worst
    }
}

/// Haar-random element of U(4): QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`.
///
/// Gram–Schmidt (applied twice per column) yields `R` with a positive real
/// diagonal directly, which is the phase-fixed factorization.
pub fn haar_u4<R: Rng + ?Sized>(rng: &mut R) -> Unitary4 {
    let mut cols = [[ZERO; 4]; 4];
    for col in cols.iter_mut() {
        for z in col.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z = C64::new(re, im);
        }
    }
    for j in 0..4 {
        for _ in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let (qi, cj) = (&done[i], &mut rest[0]);
                let proj: C64 = qi.iter().zip(cj.iter()).map(|(q, c)| q.conj() * c).sum();
                for (c, q) in cj.iter_mut().zip(qi) {
                    *c -= proj * q;
                }
            }
        }
        let n = math::sqrt(cols[j].iter().map(|z| z.norm_sqr()).sum());
        for z in cols[j].iter_mut() {
            *z /= n;
        }
    }
    let mut m = [[ZERO; 4]; 4];
    for (c, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            m[r][c] = *z;
        }
    }
    Unitary4(m)
}

pub fn haar_u4_from_spec(rng: &RngSpec) -> Unitary4 {
    haar_u4(&mut rng.rng())
}

fn check_qubit(q: usize, n_qubits: u32) -> Result<()> {
    if q >= n_qubits as usize {
        Err(Error::QubitOutOfRange { qubit: q, n_qubits })
    } else {
        Ok(())
    }
}

/// Applies `u` to qubits `(i, j)` of `psi` in place. `u` must be unitary.
pub fn apply_two_qubit_gate(psi: &mut StateVector, u: &Unitary4, i: usize, j: usize) -> Result<()> {
    check_qubit(i, psi.n_qubits())?;
    check_qubit(j, psi.n_qubits())?;
    if i == j {
        return Err(Error::invalid("two-qubit gate needs distinct qubits"));
    }
    let (mi, mj) = (1usize << i, 1usize << j);
    let amps = psi.amplitudes_mut();
    for base in 0..amps.len() {
        if base & (mi | mj) != 0 {
            continue;
        }
        let idx = [base, base | mi, base | mj, base | mi | mj];
        let v = idx.map(|t| amps[t]);
        for (r, &t) in idx.iter().enumerate() {
            let row = &u.0[r];
            amps[t] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
    Ok(())
}

/// Applies the 2×2 unitary `u` to qubit `q`.
pub fn apply_single_qubit_gate(psi: &mut StateVector, u: &Unitary2, q: usize) -> Result<()> {
    check_qubit(q, psi.n_qubits())?;
    let m = 1usize << q;
    let amps = psi.amplitudes_mut();
    for base in 0..amps.len() {
        if base & m != 0 {
            continue;
        }
        let (a, b) = (amps[base], amps[base | m]);
        amps[base] = u[0][0] * a + u[0][1] * b;
        amps[base | m] = u[1][0] * a + u[1][1] * b;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::basis_state;

    #[test]
    fn named_gates_are_unitary() {
        for u in [Unitary4::identity(), Unitary4::swap(), Unitary4::cnot()] {
            assert_eq!(u.unitarity_error(), 0.0);
        }
    }

    #[test]
    fn swap_moves_excitation() {
        let mut psi = basis_state(2, 0b01).unwrap();
        apply_two_qubit_gate(&mut psi, &Unitary4::swap(), 0, 1).unwrap();
        assert_eq!(psi, basis_state(2, 0b10).unwrap());
    }

    #[test]
    fn cnot_control_is_first_argument() {
        let mut psi = basis_state(3, 0b001).unwrap();
        apply_two_qubit_gate(&mut psi, &Unitary4::cnot(), 0, 2).unwrap();
        assert_eq!(psi, basis_state(3, 0b101).unwrap());
        let mut psi = basis_state(3, 0b100).unwrap();
        apply_two_qubit_gate(&mut psi, &Unitary4::cnot(), 0, 2).unwrap();
        assert_eq!(psi, basis_state(3, 0b100).unwrap());
    }

    #[test]
    fn identity_leaves_state_untouched() {
        let orig = crate::state::haar_random_state(4, &RngSpec::new(5, 0)).unwrap();
        let mut psi = orig.clone();
        apply_two_qubit_gate(&mut psi, &Unitary4::identity(), 3, 1).unwrap();
        assert_eq!(psi, orig);
    }

    #[test]
    fn haar_u4_is_unitary_and_seeded() {
        let spec = RngSpec::new(42, 9);
        let u = haar_u4_from_spec(&spec);
        assert!(u.unitarity_error() < 1e-12);
        assert_eq!(u, haar_u4_from_spec(&spec));
    }

    #[test]
    fn rejects_bad_qubits() {
        let mut psi = basis_state(2, 0).unwrap();
        assert!(apply_two_qubit_gate(&mut psi, &Unitary4::swap(), 0, 0).is_err());
        assert!(matches!(
            apply_two_qubit_gate(&mut psi, &Unitary4::swap(), 0, 2),
            Err(Error::QubitOutOfRange { qubit: 2, .. })
        ));
        let h = [[ONE, ONE], [ONE, -ONE]];
        assert!(apply_single_qubit_gate(&mut psi, &h, 5).is_err());
    }
}
