//! XOR–FWHT evaluation of M₂.
//!
//! For every shift `k` the gathered product `G_k[x] = conj(ψ[x ⊕ k]) ψ[x]`
//! is transformed in place; `fwht(G_k)[u]` equals `⟨ψ|X^k Z^u|ψ⟩` up to a
//! phase, so
//!
//! ```text
//! r  = Σ_k Σ_u |fwht(G_k)[u]|⁴ = Σ_P |⟨ψ|P|ψ⟩|⁴
//! M₂ = −log₂(r / 2ⁿ)
//! ```
//!
//! Each shift is independent. Workers own disjoint blocks of shifts and one
//! scratch buffer each; per-shift partial sums are stored by `k` and reduced
//! with [`pairwise_sum`](crate::reduce::pairwise_sum), so the result does not
//! depend on the worker count.

use alloc::vec;
use alloc::vec::Vec;

use crate::fwht::{butterflies, gather};
use crate::{math, parallel, reduce, Error, Result, StateVector, C64};

/// Default hard ceiling on the qubit count accepted by the engine.
pub const DEFAULT_MAX_QUBITS: u32 = 24;

/// Slack allowed below the analytic lower bound `r ≥ 1`.
const FOURTH_MOMENT_SLACK: f64 = 1e-9;

/// Which algorithm produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    XorFwht,
    BruteForce,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::XorFwht => "xor_fwht",
            Method::BruteForce => "brute_force",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SreResult {
    /// Second stabilizer Rényi entropy in bits.
    pub m2: f64,
    /// `Σ_P |⟨P⟩|⁴`, not divided by the dimension.
    pub fourth_moment_sum: f64,
    /// `Σ_P |⟨P⟩|²`; equals the dimension for a normalized state.
    pub second_moment_sum: f64,
    pub n_qubits: u32,
    pub method: Method,
    /// Zero when built without the `std` feature.
    pub wall_seconds: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    pub workers: usize,
    pub max_qubits: u32,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self { workers: 1, max_qubits: DEFAULT_MAX_QUBITS }
    }
}

impl EngineOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self { workers, ..Self::default() }
    }
}

/// Σ|ĝ|⁴ and Σ|ĝ|² over one transformed shift, computed as `(re² + im²)²`.
#[inline]
fn shift_moments(psi: &[C64], k: usize, scratch: &mut [C64]) -> (f64, f64) {
    gather(psi, k, scratch);
    butterflies(scratch);
    let mut fourth = 0.0;
    let mut second = 0.0;
    for z in scratch.iter() {
        let p = z.re * z.re + z.im * z.im;
        second += p;
        fourth += p * p;
    }
    (fourth, second)
}

pub(crate) struct Moments {
    pub fourth: f64,
    pub second: f64,
    pub workers: usize,
}

fn xor_fwht_moments(psi: &[C64], workers: usize) -> Moments {
    let d = psi.len();
    let workers = parallel::effective_workers(workers, d);
    let mut partial = vec![(0.0, 0.0); d];
    parallel::fill_indexed(
        &mut partial,
        workers,
        || vec![C64::new(0.0, 0.0); d],
        |scratch, k| shift_moments(psi, k, scratch),
    );
    let (fourth, second): (Vec<f64>, Vec<f64>) = partial.into_iter().unzip();
    Moments { fourth: reduce::pairwise_sum(&fourth), second: reduce::pairwise_sum(&second), workers }
}

pub(crate) fn check_size(psi: &StateVector, limit: u32) -> Result<()> {
    if psi.n_qubits() > limit {
        return Err(Error::TooManyQubits { n_qubits: psi.n_qubits(), limit });
    }
    Ok(())
}

/// Turns a fourth-moment sum into M₂ after checking the `r ≥ 1` bound.
pub(crate) fn finish(
    moments: Moments,
    n_qubits: u32,
    method: Method,
    wall_seconds: f64,
) -> Result<SreResult> {
    let r = moments.fourth;
    // NaN fails this comparison too
    if r.is_nan() || r < 1.0 - FOURTH_MOMENT_SLACK {
        return Err(Error::Inconsistent { what: "fourth moment sum", value: r });
    }
    let d = (1u64 << n_qubits) as f64;
    Ok(SreResult {
        // adding 0.0 turns -0.0 into 0.0
        m2: -math::log2(r / d) + 0.0,
        fourth_moment_sum: r,
        second_moment_sum: moments.second,
        n_qubits,
        method,
        wall_seconds,
        workers: moments.workers,
    })
}

#[cfg(feature = "std")]
pub(crate) fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

#[cfg(not(feature = "std"))]
pub(crate) fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    (f(), 0.0)
}

/// Exact M₂ of `psi` using `workers` threads.
pub fn sre2_exact(psi: &StateVector, workers: usize) -> Result<SreResult> {
    sre2_exact_with(psi, &EngineOptions::with_workers(workers))
}

pub fn sre2_exact_with(psi: &StateVector, opts: &EngineOptions) -> Result<SreResult> {
    check_size(psi, opts.max_qubits)?;
    let (moments, secs) = timed(|| xor_fwht_moments(psi.amplitudes(), opts.workers));
    finish(moments, psi.n_qubits(), Method::XorFwht, secs)
}

/// `Σ_P |⟨ψ|P|ψ⟩|⁴`, not divided by the dimension.
pub fn pauli_fourth_moment(psi: &StateVector) -> Result<f64> {
    check_size(psi, DEFAULT_MAX_QUBITS)?;
    Ok(xor_fwht_moments(psi.amplitudes(), 1).fourth)
}

/// [`sre2_exact`] over a batch of equally sized states, in order.
///
/// States are spread over the workers; each state is evaluated serially.
pub fn sre2_batch(states: &[StateVector], workers: usize) -> Result<Vec<SreResult>> {
    if let Some(first) = states.first() {
        if let Some(bad) = states.iter().find(|s| s.n_qubits() != first.n_qubits()) {
            return Err(Error::invalid(alloc::format!(
                "batch mixes {} and {} qubit states",
                first.n_qubits(),
                bad.n_qubits()
            )));
        }
    }
    parallel::map_indexed(states.len(), workers, |i| sre2_exact(&states[i], 1)).into_iter().collect()
}
