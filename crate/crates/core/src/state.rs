use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::chain::BasisIndex;
use crate::error::{Error, Result};

/// Tolerance on `Σ|a|² = 1` for states accepted by the propagators.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Interaction-picture state: `2^n` amplitudes in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                got: len,
                expected: len.next_power_of_two().max(2),
                n: len.next_power_of_two().max(2).trailing_zeros() as usize,
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(n: usize, b: BasisIndex) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[b.0] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// `|0…0⟩`, the chain's ground state.
    pub fn ground(n: usize) -> Self {
        Self::basis(n, BasisIndex(0))
    }

    /// Unitarily invariant random state: i.i.d. standard complex Gaussians,
    /// normalized.
    pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut amplitudes: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self { amplitudes }
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, b: BasisIndex) -> f64 {
        self.amplitudes[b.0].norm_sqr()
    }

    /// Euclidean distance `‖a − b‖`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if self.amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                got: self.amplitudes.len(),
                expected: 1 << n,
                n,
            });
        }
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(())
    }
}

/// Fidelity amplitude `f = ⟨ideal|actual⟩`, conjugating the ideal state.
pub fn fidelity(ideal: &StateVector, actual: &StateVector) -> Complex64 {
    ideal
        .amplitudes
        .iter()
        .zip(&actual.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum()
}
