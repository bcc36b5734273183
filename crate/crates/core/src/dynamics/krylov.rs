//! Lanczos propagation `|ψ⟩ ↦ e^{−iH·dt}|ψ⟩`.
//!
//! Each step builds an orthonormal Krylov basis `{v₀ … v_{m−1}}` from `ψ`
//! with full re-orthogonalization, diagonalizes the real tridiagonal
//! projection `T = Q Λ Qᵀ`, and maps `β₀ Q e^{−iΛ dt} Qᵀ e₀` back through
//! the basis.

use alloc::vec;
use alloc::vec::Vec;

use super::Hamiltonian;
use crate::{math, Error, Result, StateVector, C64};

pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_KRYLOV_DIM: usize = 30;

/// Residual norm below which the Krylov space is taken to be invariant.
const BREAKDOWN: f64 = 1e-14;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    math::sqrt(a.iter().map(|z| z.norm_sqr()).sum())
}

/// Reusable Lanczos workspace for one trajectory.
#[derive(Debug, Clone)]
pub struct KrylovPropagator {
    max_dim: usize,
    basis: Vec<Vec<C64>>,
    w: Vec<C64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl KrylovPropagator {
    pub fn new(hilbert_dim: usize, krylov_dim: usize) -> Result<Self> {
        if krylov_dim < 2 {
            return Err(Error::invalid("Krylov dimension must be at least 2"));
        }
        let max_dim = krylov_dim.min(hilbert_dim);
        Ok(Self {
            max_dim,
            basis: (0..max_dim).map(|_| vec![C64::new(0.0, 0.0); hilbert_dim]).collect(),
            w: vec![C64::new(0.0, 0.0); hilbert_dim],
            alpha: Vec::with_capacity(max_dim),
            beta: Vec::with_capacity(max_dim),
        })
    }

    /// Advances `psi` by `dt` in place and renormalizes it. Returns the norm
    /// drift `‖ψ'‖ − 1` observed before renormalization.
    pub fn step(&mut self, h: &Hamiltonian, psi: &mut StateVector, dt: f64) -> Result<f64> {
        if psi.dim() != h.dim() {
            return Err(Error::LengthMismatch { expected: h.dim(), found: psi.dim() });
        }
        if !dt.is_finite() {
            return Err(Error::invalid("time step must be finite"));
        }
        if dt == 0.0 {
            return Ok(0.0);
        }
        let size = self.lanczos(h, psi.amplitudes());
        let (evals, evecs) = symmetric_tridiagonal_eigen(&self.alpha[..size], &self.beta[..size - 1])?;

        // c = Q e^{−iΛ dt} Qᵀ e₀, scaled by β₀ = ‖ψ‖.
        let beta0 = psi.norm();
        let phases: Vec<C64> = (0..size).map(|s| math::cis(-evals[s] * dt) * evecs[s]).collect();
        let coef: Vec<C64> = (0..size)
            .map(|l| phases.iter().enumerate().map(|(s, p)| p * evecs[l * size + s]).sum::<C64>() * beta0)
            .collect();

        let amps = psi.amplitudes_mut();
        for z in amps.iter_mut() {
            *z = C64::new(0.0, 0.0);
        }
        for (c, v) in coef.iter().zip(&self.basis) {
            for (z, b) in amps.iter_mut().zip(v) {
                *z += c * b;
            }
        }
        Ok(psi.renormalize())
    }

    /// Fills `basis`, `alpha`, `beta`; returns the Krylov dimension reached.
    fn lanczos(&mut self, h: &Hamiltonian, psi: &[C64]) -> usize {
        self.alpha.clear();
        self.beta.clear();
        let n0 = norm(psi);
        for (b, z) in self.basis[0].iter_mut().zip(psi) {
            *b = z / n0;
        }
        let mut size = self.max_dim;
        for j in 0..self.max_dim {
            h.apply(&self.basis[j], &mut self.w);
            let a = dot(&self.basis[j], &self.w).re;
            self.alpha.push(a);
            // two passes of classical Gram–Schmidt against the whole basis
            for _ in 0..2 {
                for v in &self.basis[..=j] {
                    let c = dot(v, &self.w);
                    for (x, y) in self.w.iter_mut().zip(v) {
                        *x -= c * y;
                    }
                }
            }
            let b = norm(&self.w);
            if j + 1 == self.max_dim || b < BREAKDOWN {
                size = j + 1;
                break;
            }
            self.beta.push(b);
            for (x, y) in self.basis[j + 1].iter_mut().zip(&self.w) {
                *x = y / b;
            }
        }
        size
    }
}

/// Returns `e^{−iH·dt}|ψ⟩` using a `krylov_dim`-dimensional Lanczos basis.
pub fn krylov_step(psi: &StateVector, h: &Hamiltonian, dt: f64, krylov_dim: usize) -> Result<StateVector> {
    let mut out = psi.clone();
    KrylovPropagator::new(psi.dim(), krylov_dim)?.step(h, &mut out, dt)?;
    Ok(out)
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and sub-diagonal `off` (`off.len() + 1 == diag.len()`), by implicit
/// QL iterations with Wilkinson shifts.
///
/// Returns the eigenvalues and the eigenvector matrix in row-major order:
/// column `s` of `z` (entries `z[r * n + s]`) belongs to eigenvalue `s`.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::invalid("tridiagonal matrix needs n diagonal and n-1 off-diagonal entries"));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = math::abs(d[m]) + math::abs(d[m + 1]);
                if math::abs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::Inconsistent { what: "tridiagonal QL iterations", value: iter as f64 });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zf = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * zf;
                    z[k * n + i] = c * z[k * n + i] - s * zf;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}
