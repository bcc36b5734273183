//! Time evolution for quench and random-circuit experiments.

mod brickwork;
mod gates;
mod hamiltonian;
mod krylov;
mod quench;

pub use brickwork::{brickwork_bonds, brickwork_step};
pub use gates::{
    apply_single_qubit_gate, apply_two_qubit_gate, haar_u4, haar_u4_from_spec, Unitary2, Unitary4,
};
pub use hamiltonian::{apply_hamiltonian, bonds, Boundary, Hamiltonian};
pub use krylov::{
    krylov_step, symmetric_tridiagonal_eigen, KrylovPropagator, DEFAULT_DT, DEFAULT_KRYLOV_DIM,
};
pub use quench::{run_quench, run_quench_with, InitialState, Model, QuenchSpec, SreTrace};
