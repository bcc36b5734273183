//! Exact second-order stabilizer Rényi entropy (M₂) of pure state vectors.
//!
//! The Pauli fourth moment `Σ_P |⟨ψ|P|ψ⟩|⁴` is an XOR-correlation sum over
//! computational-basis bitstrings. For each shift `k` the array
//! `G_k[x] = conj(ψ[x ⊕ k]) ψ[x]` is pushed through an unnormalized fast
//! Walsh–Hadamard transform, whose outputs are exactly the expectation values
//! `⟨ψ|X^k Z^u|ψ⟩` (up to the phase of `Y = iXZ`). Summing `|·|⁴` over all
//! `k` and `u` costs `O(N·4^N)` instead of the `O(8^N)` of direct Pauli
//! enumeration.
//!
//! Conventions used throughout the crate:
//!
//! * qubit 0 is the least significant bit of a basis index;
//! * `|↑⟩ ≡ |0⟩ ≡ bit 0` and `|↓⟩ ≡ |1⟩ ≡ bit 1`;
//! * logarithms are base 2, so M₂ is measured in bits.
//!
//! The crate is `no_std` (it needs `alloc`). The `std` feature adds
//! scoped-thread parallelism and wall-clock timing; results are bit-identical
//! with and without it.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod dynamics;
pub mod engine;
mod error;
pub mod fwht;
pub mod math;
pub mod oracle;
pub mod parallel;
pub mod reduce;
pub mod state;

pub use engine::{pauli_fourth_moment, sre2_batch, sre2_exact, EngineOptions, Method, SreResult};
pub use error::{Error, ErrorKind, Result};
pub use oracle::{pauli_expectation, sre2_brute_force, PauliLabel};
pub use state::{RngSpec, StateVector};

/// Complex amplitude type used by every buffer in the crate.
pub type C64 = num_complex::Complex<f64>;
