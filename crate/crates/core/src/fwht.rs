//! Unnormalized fast Walsh–Hadamard transform over `ℤ₂ⁿ`-indexed buffers.
//!
//! `fwht(v)[k] = Σ_x (−1)^{popcount(k & x)} v[x]`. This is `√(2ⁿ)` times the
//! unitary WHT, so applying it twice multiplies by `2ⁿ`. The transform is
//! naturally ordered: unlike a radix-2 FFT there is no bit-reversal step.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, C64};

/// A complex buffer whose length is a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicBuffer {
    data: Vec<C64>,
}

impl DyadicBuffer {
    pub fn zeros(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(Self { data: vec![C64::new(0.0, 0.0); len] })
    }

    pub fn from_vec(data: Vec<C64>) -> Result<Self> {
        check_len(data.len())?;
        if let Some(index) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { data })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    /// In-place unnormalized transform.
    pub fn fwht(&mut self) {
        butterflies(&mut self.data);
    }
}

fn check_len(len: usize) -> Result<()> {
    if len.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo { len })
    }
}

/// In-place unnormalized FWHT of `buf`.
pub fn fwht_in_place(buf: &mut [C64]) -> Result<()> {
    check_len(buf.len())?;
    butterflies(buf);
    Ok(())
}

/// Stride-doubling butterfly passes `(a, b) ↦ (a + b, a − b)` for
/// `h = 1, 2, 4, …`. The length must already be known to be a power of two.
pub(crate) fn butterflies(buf: &mut [C64]) {
    let n = buf.len();
    let mut h = 1;
    while h < n {
        for block in buf.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h <<= 1;
    }
}

/// `out[x] = conj(psi[x ⊕ k]) · psi[x]`.
pub fn xor_shift_product(psi: &[C64], k: usize, out: &mut [C64]) -> Result<()> {
    check_len(psi.len())?;
    if out.len() != psi.len() {
        return Err(Error::LengthMismatch { expected: psi.len(), found: out.len() });
    }
    if k >= psi.len() {
        return Err(Error::IndexOutOfRange { index: k as u64, bound: psi.len() as u64 });
    }
    gather(psi, k, out);
    Ok(())
}

#[inline]
pub(crate) fn gather(psi: &[C64], k: usize, out: &mut [C64]) {
    for (x, (slot, &amp)) in out.iter_mut().zip(psi).enumerate() {
        *slot = psi[x ^ k].conj() * amp;
    }
}
