use alloc::vec;
use alloc::vec::Vec;

use super::quench::{Model, QuenchSpec};
use crate::{Error, Result, StateVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Bonds `(i, i+1 mod N)` for `i = 0..N`.
    #[default]
    Periodic,
    /// Bonds `(i, i+1)` for `i = 0..N−1`.
    Open,
}

/// Nearest-neighbour bonds of an `n`-site chain.
pub fn bonds(n_qubits: u32, boundary: Boundary) -> Vec<(usize, usize)> {
    let n = n_qubits as usize;
    let count = match boundary {
        Boundary::Periodic => n,
        Boundary::Open => n.saturating_sub(1),
    };
    (0..count).map(|i| (i, (i + 1) % n)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum OffDiagonal {
    /// `J(XX + YY)` flips anti-aligned pairs with amplitude `2J`.
    Hop { amplitude: f64 },
    /// `−h_x Σ X_i`.
    Field { hx: f64 },
}

/// Matrix-free spin-chain Hamiltonian.
///
/// * XXZ: `Σ_b J(X_i X_j + Y_i Y_j) + Δ Z_i Z_j`
/// * TFIM with longitudinal field: `−J Σ_b Z_i Z_j − h_x Σ_i X_i − h_z Σ_i Z_i`
///
/// `Z|↑⟩ = +|↑⟩`. The diagonal is tabulated once; applying `H` costs
/// `O(N·2ᴺ)`.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    n_qubits: u32,
    bond_masks: Vec<usize>,
    diag: Vec<f64>,
    off: OffDiagonal,
}

#[inline]
fn spin(t: usize, q: usize) -> f64 {
    if (t >> q) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Hamiltonian {
    pub fn new(model: &Model, n_qubits: u32, boundary: Boundary) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::invalid("spin-chain Hamiltonians need at least two sites"));
        }
        if n_qubits > crate::engine::DEFAULT_MAX_QUBITS + 6 {
            return Err(Error::TooManyQubits { n_qubits, limit: crate::engine::DEFAULT_MAX_QUBITS + 6 });
        }
        let bonds = bonds(n_qubits, boundary);
        let d = 1usize << n_qubits;
        let n = n_qubits as usize;
        let zz = |t: usize| bonds.iter().map(|&(i, j)| spin(t, i) * spin(t, j)).sum::<f64>();
        let (diag, off): (Vec<f64>, OffDiagonal) = match *model {
            Model::Xxz { j, delta } => {
                ((0..d).map(|t| delta * zz(t)).collect(), OffDiagonal::Hop { amplitude: 2.0 * j })
            }
            Model::TfimLf { j, hx, hz } => (
                (0..d).map(|t| -j * zz(t) - hz * (0..n).map(|q| spin(t, q)).sum::<f64>()).collect(),
                OffDiagonal::Field { hx },
            ),
            Model::Brickwork => {
                return Err(Error::invalid("the brickwork model has no Hamiltonian"));
            }
        };
        let bond_masks = bonds.iter().map(|&(i, j)| (1 << i) | (1 << j)).collect();
        Ok(Self { n_qubits, bond_masks, diag, off })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Diagonal matrix elements `⟨t|H|t⟩`.
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// `out = H psi`. Both slices must have length `2ᴺ`.
    pub fn apply(&self, psi: &[C64], out: &mut [C64]) {
        assert_eq!(psi.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        match self.off {
            OffDiagonal::Hop { amplitude } => {
                for (t, slot) in out.iter_mut().enumerate() {
                    let mut acc = psi[t] * self.diag[t];
                    for &m in &self.bond_masks {
                        // anti-aligned pair: exactly one of the two bits set
                        if (t & m).count_ones() == 1 {
                            acc += psi[t ^ m] * amplitude;
                        }
                    }
                    *slot = acc;
                }
            }
            OffDiagonal::Field { hx } => {
                let n = self.n_qubits as usize;
                for (t, slot) in out.iter_mut().enumerate() {
                    let mut flips = C64::new(0.0, 0.0);
                    for q in 0..n {
                        flips += psi[t ^ (1 << q)];
                    }
                    *slot = psi[t] * self.diag[t] - flips * hx;
                }
            }
        }
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> C64 {
        let mut h = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply(psi.amplitudes(), &mut h);
        psi.amplitudes().iter().zip(&h).map(|(a, b)| a.conj() * b).sum()
    }
}

/// `H|ψ⟩` for the Hamiltonian described by `spec`.
pub fn apply_hamiltonian(psi: &StateVector, spec: &QuenchSpec) -> Result<Vec<C64>> {
    if psi.n_qubits() != spec.n_qubits {
        return Err(Error::LengthMismatch { expected: 1 << spec.n_qubits, found: psi.dim() });
    }
    let h = Hamiltonian::new(&spec.model, spec.n_qubits, spec.boundary)?;
    let mut out = vec![C64::new(0.0, 0.0); psi.dim()];
    h.apply(psi.amplitudes(), &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{basis_state, neel_state};

    #[test]
    fn bond_lists() {
        assert_eq!(bonds(4, Boundary::Periodic), vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(bonds(4, Boundary::Open), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn xxz_neel_pair() {
        // Open two-site chain, |↑↓⟩: ZZ = −1, hop to |↓↑⟩ with amplitude 2J.
        let h = Hamiltonian::new(&Model::Xxz { j: 1.0, delta: 0.5 }, 2, Boundary::Open).unwrap();
        let psi = neel_state(2).unwrap();
        let mut out = vec![C64::new(0.0, 0.0); 4];
        h.apply(psi.amplitudes(), &mut out);
        assert_eq!(out[0b10], C64::new(-0.5, 0.0));
        assert_eq!(out[0b01], C64::new(2.0, 0.0));
        assert_eq!(out[0b00], C64::new(0.0, 0.0));
        assert_eq!(out[0b11], C64::new(0.0, 0.0));
    }

    #[test]
    fn diagonal_tfim_has_basis_eigenvectors() {
        let model = Model::TfimLf { j: 1.0, hx: 0.0, hz: 0.0 };
        let h = Hamiltonian::new(&model, 4, Boundary::Periodic).unwrap();
        for t in 0..16 {
            let psi = basis_state(4, t).unwrap();
            let mut out = vec![C64::new(0.0, 0.0); 16];
            h.apply(psi.amplitudes(), &mut out);
            for (s, z) in out.iter().enumerate() {
                if s as u64 != t {
                    assert_eq!(*z, C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn brickwork_has_no_hamiltonian() {
        assert!(Hamiltonian::new(&Model::Brickwork, 4, Boundary::Open).is_err());
        assert!(Hamiltonian::new(&Model::Xxz { j: 1.0, delta: 1.0 }, 1, Boundary::Open).is_err());
    }
}
