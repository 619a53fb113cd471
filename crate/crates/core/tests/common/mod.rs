//! Reference models written without the library's state or gate code.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn hadamard2() -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)])
}

/// `H` on qubit `k` of `n`, built as a Kronecker chain. Qubit 0 is the least
/// significant bit, so it is the rightmost factor.
pub fn hadamard_kron(n: usize, k: usize) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(2, 2);
    let h = hadamard2();
    let mut m = DMatrix::<Complex64>::identity(1, 1);
    for q in (0..n).rev() {
        m = kron(&m, if q == k { &h } else { &id });
    }
    m
}

/// Distance between `u` and `v` after removing the best global phase.
pub fn phase_free_distance(u: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> f64 {
    let overlap: Complex64 = v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0) };
    (u - v * phase).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Success probability of textbook Grover search on 3 bits after `steps`
/// iterations, from explicit 8×8 matrices.
pub fn brute_force_grover(target: usize, steps: usize) -> f64 {
    let h1 = hadamard2();
    let h = kron(&kron(&h1, &h1), &h1);
    let oracle = DMatrix::from_fn(8, 8, |i, j| {
        if i != j {
            c(0.0)
        } else if i == target {
            c(-1.0)
        } else {
            c(1.0)
        }
    });
    // 2|0><0| − 1, up to a global sign
    let s0 = DMatrix::from_fn(8, 8, |i, j| {
        if i != j {
            c(0.0)
        } else if i == 0 {
            c(1.0)
        } else {
            c(-1.0)
        }
    });
    let step = &h * &s0 * &h * &oracle;
    let mut psi = DVector::from_fn(8, |i, _| if i == 0 { c(1.0) } else { c(0.0) });
    psi = &h * psi;
    for _ in 0..steps {
        psi = &step * psi;
    }
    psi[target].norm_sqr()
}

/// Data bits `(α_0, α_2, α_3)` of a 4-qubit index packed into 3 bits.
pub fn data_index(b: usize) -> usize {
    (b & 1) | ((b >> 2 & 1) << 1) | ((b >> 3 & 1) << 2)
}

/// Excitation probability of a two-level system driven with Rabi frequency
/// `rabi`, detuning `delta`, for time `tau`.
pub fn rabi_formula(rabi: f64, delta: f64, tau: f64) -> f64 {
    let g2 = rabi * rabi + delta * delta;
    rabi * rabi / g2 * (g2.sqrt() * tau / 2.0).sin().powi(2)
}
