//! Pure states in the computational basis, and the generators used by the
//! ensemble experiments.
//!
//! Basis index bit `i` holds qubit `i`; `|↑⟩ = |0⟩`, `|↓⟩ = |1⟩`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::{math, reduce, Error, Result, C64};

/// Norm deviation below which a state is taken as-is.
const EXACT_NORM_SLACK: f64 = 1e-12;
/// Largest norm deviation that is silently corrected by renormalization.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Seed plus substream id. Fully determines every sampled state and gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub const fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Same seed, stream advanced by `offset`.
    pub const fn substream(self, offset: u64) -> Self {
        Self { seed: self.seed, stream: self.stream.wrapping_add(offset) }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Normalized amplitudes of an `n`-qubit pure state, length `2ⁿ`, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: u32,
    amps: Vec<C64>,
}

fn qubits_for_len(len: usize) -> Result<u32> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len });
    }
    Ok(len.trailing_zeros())
}

fn check_finite(amps: &[C64]) -> Result<()> {
    match amps.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

pub(crate) fn norm_of(amps: &[C64]) -> f64 {
    let sq: Vec<f64> = amps.iter().map(|z| z.norm_sqr()).collect();
    math::sqrt(reduce::pairwise_sum(&sq))
}

fn divide(amps: &mut [C64], norm: f64) {
    for z in amps {
        *z /= norm;
    }
}

impl StateVector {
    /// Accepts amplitudes whose norm is within `1e-6` of one.
    ///
    /// Deviations above `1e-12` are divided out; a vector already normalized
    /// to rounding accuracy is stored bit-for-bit.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        check_finite(&amps)?;
        let mut s = Self { n_qubits, amps };
        let norm = s.norm();
        let dev = math::abs(norm - 1.0);
        if dev > NORM_TOLERANCE {
            return Err(Error::Normalization { norm });
        }
        if dev > EXACT_NORM_SLACK {
            divide(&mut s.amps, norm);
        }
        Ok(s)
    }

    /// Normalizes any finite nonzero vector.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        check_finite(&amps)?;
        let norm = norm_of(&amps);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        divide(&mut amps, norm);
        Ok(Self { n_qubits, amps })
    }

    /// Caller guarantees a valid length and unit norm up to rounding.
    pub(crate) fn from_parts_unchecked(n_qubits: u32, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    /// Hilbert-space dimension `2ⁿ`.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.amps)
    }

    /// Divides out whatever norm drift has accumulated; returns the drift.
    pub fn renormalize(&mut self) -> f64 {
        let norm = self.norm();
        divide(&mut self.amps, norm);
        norm - 1.0
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Multiplies every amplitude by `e^{iθ}`.
    pub fn with_global_phase(mut self, theta: f64) -> Self {
        let p = math::cis(theta);
        for z in &mut self.amps {
            *z *= p;
        }
        self
    }

    /// `self ⊗ other`, with `self`'s qubits as the low bits of the index.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for b in &other.amps {
            amps.extend(self.amps.iter().map(|a| a * b));
        }
        StateVector::from_parts_unchecked(self.n_qubits + other.n_qubits, amps)
    }
}

/// Free-function spelling of [`StateVector::tensor`].
pub fn tensor_product(a: &StateVector, b: &StateVector) -> StateVector {
    a.tensor(b)
}

fn check_qubits(n_qubits: u32) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::invalid("a state needs at least one qubit"));
    }
    if n_qubits >= usize::BITS - 1 {
        return Err(Error::TooManyQubits { n_qubits, limit: usize::BITS - 2 });
    }
    Ok(())
}

/// Computational basis state `|index⟩`.
pub fn basis_state(n_qubits: u32, index: u64) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    let d = 1u64 << n_qubits;
    if index >= d {
        return Err(Error::IndexOutOfRange { index, bound: d });
    }
    let mut amps = vec![C64::new(0.0, 0.0); d as usize];
    amps[index as usize] = C64::new(1.0, 0.0);
    Ok(StateVector::from_parts_unchecked(n_qubits, amps))
}

/// `|↑↓↑↓…⟩` with qubit 0 up: odd qubits carry bit 1.
pub fn neel_state(n_qubits: u32) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    let index = (0..n_qubits).filter(|q| q % 2 == 1).fold(0u64, |acc, q| acc | (1 << q));
    basis_state(n_qubits, index)
}

/// `|↑⟩^⊗n`.
pub fn all_up_state(n_qubits: u32) -> Result<StateVector> {
    basis_state(n_qubits, 0)
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_state(n_qubits: u32) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    let d = 1usize << n_qubits;
    let mut amps = vec![C64::new(0.0, 0.0); d];
    amps[0] = C64::new(math::FRAC_1_SQRT_2, 0.0);
    amps[d - 1] = C64::new(math::FRAC_1_SQRT_2, 0.0);
    Ok(StateVector::from_parts_unchecked(n_qubits, amps))
}

/// Normalized i.i.d. standard complex Gaussian vector: a Haar-random pure state.
pub fn haar_random_state(n_qubits: u32, rng: &RngSpec) -> Result<StateVector> {
    haar_random_state_from(n_qubits, &mut rng.rng())
}

pub fn haar_random_state_from<R: Rng + ?Sized>(n_qubits: u32, rng: &mut R) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    let d = 1usize << n_qubits;
    let amps: Vec<C64> = (0..d)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        })
        .collect();
    StateVector::normalized(amps)
}

/// Bloch angles `(θ, φ)` of one qubit: `cos(θ/2)|↑⟩ + e^{iφ} sin(θ/2)|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    pub theta: f64,
    pub phi: f64,
}

/// How single-qubit angles of a random product state are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProductMeasure {
    /// θ uniform on `[0, π]`, φ uniform on `[0, 2π)`.
    #[default]
    UniformAngles,
    /// Uniform on the Bloch sphere: `cos θ` uniform on `[−1, 1]`.
    SphereUniform,
}

/// `⊗ᵢ (cos(θᵢ/2)|↑⟩ + e^{iφᵢ} sin(θᵢ/2)|↓⟩)`, `angles[i]` on qubit `i`.
pub fn product_state(angles: &[BlochAngles]) -> Result<StateVector> {
    let n_qubits = u32::try_from(angles.len()).map_err(|_| Error::invalid("too many qubits"))?;
    check_qubits(n_qubits)?;
    let mut amps = vec![C64::new(1.0, 0.0)];
    for a in angles {
        let up = C64::new(math::cos(a.theta / 2.0), 0.0);
        let down = math::cis(a.phi) * math::sin(a.theta / 2.0);
        let low: Vec<C64> = amps.iter().map(|z| z * up).collect();
        let high: Vec<C64> = amps.iter().map(|z| z * down).collect();
        amps = low;
        amps.extend(high);
    }
    Ok(StateVector::from_parts_unchecked(n_qubits, amps))
}

pub fn random_bloch_angles<R: Rng + ?Sized>(rng: &mut R, measure: ProductMeasure) -> BlochAngles {
    let theta = match measure {
        ProductMeasure::UniformAngles => math::PI * rng.random::<f64>(),
        ProductMeasure::SphereUniform => libm::acos(1.0 - 2.0 * rng.random::<f64>()),
    };
    let phi = math::TAU * rng.random::<f64>();
    BlochAngles { theta, phi }
}

/// Random product state; qubit 0's angles are drawn first.
pub fn random_product_state(n_qubits: u32, rng: &RngSpec, measure: ProductMeasure) -> Result<StateVector> {
    random_product_state_from(n_qubits, &mut rng.rng(), measure)
}

pub fn random_product_state_from<R: Rng + ?Sized>(
    n_qubits: u32,
    rng: &mut R,
    measure: ProductMeasure,
) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    let angles: Vec<BlochAngles> = (0..n_qubits).map(|_| random_bloch_angles(rng, measure)).collect();
    product_state(&angles)
}

/// `(|0⟩ + e^{iπ/4}|1⟩)/√2`, the single-qubit magic state with M₂ = log₂(4/3).
pub fn t_state() -> StateVector {
    product_state(&[BlochAngles { theta: math::PI / 2.0, phi: math::PI / 4.0 }]).expect("one qubit is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn basis_and_tensor_conventions() {
        let s = basis_state(2, 3).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let zero = basis_state(1, 0).unwrap();
        let one = basis_state(1, 1).unwrap();
        let t = tensor_product(&zero, &one);
        assert_eq!(t, basis_state(2, 2).unwrap());
        assert!(basis_state(2, 4).is_err());
        assert!(basis_state(0, 0).is_err());
    }

    #[test]
    fn neel_encoding() {
        assert_eq!(neel_state(1).unwrap(), basis_state(1, 0).unwrap());
        assert_eq!(neel_state(2).unwrap(), basis_state(2, 0b10).unwrap());
        assert_eq!(neel_state(5).unwrap(), basis_state(5, 0b01010).unwrap());
    }

    #[test]
    fn new_enforces_norm_policy() {
        assert!(matches!(StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]), Err(Error::Normalization { .. })));
        let slightly_off = StateVector::new(vec![c(1.0 + 5e-7, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(slightly_off.amplitudes()[0], c(1.0, 0.0));
        assert!(matches!(StateVector::new(vec![c(1.0, 0.0)]), Err(Error::NotPowerOfTwo { len: 1 })));
        assert!(matches!(
            StateVector::new(vec![c(f64::INFINITY, 0.0), c(0.0, 0.0)]),
            Err(Error::NonFinite { index: 0 })
        ));
        assert_eq!(StateVector::normalized(vec![c(0.0, 0.0); 2]), Err(Error::ZeroVector));
    }

    #[test]
    fn haar_is_deterministic_and_normalized() {
        let spec = RngSpec::new(7, 3);
        let a = haar_random_state(6, &spec).unwrap();
        let b = haar_random_state(6, &spec).unwrap();
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-12);
        let other = haar_random_state(6, &spec.substream(1)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn product_states_are_normalized() {
        let spec = RngSpec::new(11, 0);
        for measure in [ProductMeasure::UniformAngles, ProductMeasure::SphereUniform] {
            let s = random_product_state(7, &spec, measure).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
        let up = product_state(&[BlochAngles { theta: 0.0, phi: 1.3 }; 3]).unwrap();
        assert_eq!(up, all_up_state(3).unwrap());
    }

    #[test]
    fn t_state_amplitudes() {
        let t = t_state();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!((t.amplitudes()[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((t.amplitudes()[1] - c(0.5, 0.5)).norm() < 1e-15);
    }
}
