//! Static physics of the Ising spin chain.
//!
//! The chain Hamiltonian is diagonal in the computational basis:
//!
//! ```text
//! H0/ħ = -Σ_k w_k I^z_k - 2J Σ_k I^z_k I^z_{k+1} - 2J' Σ_k I^z_k I^z_{k+2}
//! ```
//!
//! with `I^z_k |α_k⟩ = (-1)^{α_k}/2 |α_k⟩`, so `α_k = 0` is the low-energy
//! single-spin state. Bit `k` of a basis index is `α_k`.
//!
//! Flipping qubit `k` from 0 to 1 costs `w_k + μJ + νJ'`, where `μ` and `ν`
//! sum `(-1)^{α_j}` over the nearest and second-nearest neighbours of `k`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest chain the dense propagators are allowed to handle.
pub const MAX_QUBITS: usize = 12;

/// Physical configuration of the spin chain.
///
/// All frequencies are angular frequencies in one common (dimensionless)
/// unit; times are measured in the inverse unit.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParameters {
    larmor: Vec<f64>,
    coupling_j: f64,
    coupling_j2: f64,
}

impl Default for ChainParameters {
    /// Four qubits, `w = (100, 200, 300, 400)`, `J = 4`, `J' = 0.4`.
    fn default() -> Self {
        Self {
            larmor: vec![100.0, 200.0, 300.0, 400.0],
            coupling_j: 4.0,
            coupling_j2: 0.4,
        }
    }
}

impl ChainParameters {
    /// Builds a parameter set after structural checks only (length, finiteness).
    ///
    /// Physical invariants are checked separately by [`ChainParameters::validate`]
    /// and [`addressability_report`], so that degenerate configurations can still
    /// be loaded and diagnosed.
    pub fn new(larmor: Vec<f64>, coupling_j: f64, coupling_j2: f64) -> Result<Self> {
        let n = larmor.len();
        if !(3..=MAX_QUBITS).contains(&n) {
            return Err(Error::InvalidParameters(format!(
                "qubit count {n} outside supported range 3..={MAX_QUBITS}"
            )));
        }
        if larmor.iter().chain([&coupling_j, &coupling_j2]).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameters("non-finite frequency".into()));
        }
        Ok(Self {
            larmor,
            coupling_j,
            coupling_j2,
        })
    }

    pub fn n(&self) -> usize {
        self.larmor.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.larmor.len()
    }

    pub fn larmor(&self) -> &[f64] {
        &self.larmor
    }

    pub fn coupling_j(&self) -> f64 {
        self.coupling_j
    }

    pub fn coupling_j2(&self) -> f64 {
        self.coupling_j2
    }

    /// Checks the physical regime: positive, pairwise distinct Larmor
    /// frequencies and `J > J' > 0`.
    pub fn validate(&self) -> Result<()> {
        if let Some((k, w)) = self.larmor.iter().enumerate().find(|(_, w)| **w <= 0.0) {
            return Err(Error::InvalidParameters(format!(
                "Larmor frequency w{k} = {w} must be positive"
            )));
        }
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                if self.larmor[i] == self.larmor[j] {
                    return Err(Error::InvalidParameters(format!(
                        "Larmor frequencies w{i} and w{j} coincide ({})",
                        self.larmor[i]
                    )));
                }
            }
        }
        if !(self.coupling_j2 > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "second-neighbour coupling J2 = {} must be positive",
                self.coupling_j2
            )));
        }
        if !(self.coupling_j > self.coupling_j2) {
            return Err(Error::InvalidParameters(format!(
                "nearest-neighbour coupling J = {} must exceed J2 = {}",
                self.coupling_j, self.coupling_j2
            )));
        }
        Ok(())
    }

    /// Drive frequency `w_k + μJ + νJ'` addressing qubit `k` with the given
    /// neighbour offsets.
    pub fn drive_frequency(&self, k: usize, mu: i32, nu: i32) -> f64 {
        self.larmor[k] + f64::from(mu) * self.coupling_j + f64::from(nu) * self.coupling_j2
    }

    fn check_qubit(&self, k: usize) -> Result<()> {
        if k < self.n() {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange { k, n: self.n() })
        }
    }

    fn check_index(&self, b: BasisIndex) -> Result<()> {
        if b.0 < self.dim() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: b.0,
                n: self.n(),
            })
        }
    }

    /// All `(μ, ν)` offsets that occur for qubit `k`, ascending by `μ` then `ν`.
    pub fn realizable_offsets(&self, k: usize) -> Result<Vec<(i32, i32)>> {
        self.check_qubit(k)?;
        let mut set: Vec<(i32, i32)> = (0..self.dim())
            .filter(|b| b & (1 << k) == 0)
            .map(|b| offsets_unchecked(self.n(), b, k))
            .collect();
        set.sort_unstable();
        set.dedup();
        Ok(set)
    }
}

/// A computational basis state `|α_{n-1} … α_0⟩`, with bit `k` holding `α_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(pub usize);

impl BasisIndex {
    pub fn bit(self, k: usize) -> u8 {
        ((self.0 >> k) & 1) as u8
    }

    pub fn with_bit(self, k: usize, value: bool) -> Self {
        if value {
            BasisIndex(self.0 | (1 << k))
        } else {
            BasisIndex(self.0 & !(1 << k))
        }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn spin(b: usize, k: usize) -> f64 {
    if b & (1 << k) == 0 {
        0.5
    } else {
        -0.5
    }
}

fn sign(b: usize, k: usize) -> i32 {
    if b & (1 << k) == 0 {
        1
    } else {
        -1
    }
}

pub(crate) fn energy_unchecked(params: &ChainParameters, b: usize) -> f64 {
    let n = params.n();
    let single: f64 = (0..n).map(|k| params.larmor[k] * spin(b, k)).sum();
    let nearest: f64 = (0..n - 1).map(|k| spin(b, k) * spin(b, k + 1)).sum();
    let second: f64 = (0..n - 2).map(|k| spin(b, k) * spin(b, k + 2)).sum();
    -single - 2.0 * params.coupling_j * nearest - 2.0 * params.coupling_j2 * second
}

pub(crate) fn offsets_unchecked(n: usize, b: usize, k: usize) -> (i32, i32) {
    let sum_over = |dist: usize| -> i32 {
        let mut s = 0;
        if k >= dist {
            s += sign(b, k - dist);
        }
        if k + dist < n {
            s += sign(b, k + dist);
        }
        s
    };
    (sum_over(1), sum_over(2))
}

/// Diagonal energy `E_b/ħ` of a basis state.
pub fn diagonal_energy(params: &ChainParameters, b: BasisIndex) -> Result<f64> {
    params.check_index(b)?;
    Ok(energy_unchecked(params, b.0))
}

/// Resonance offsets `(μ, ν)` seen by qubit `k` in basis state `b`.
pub fn neighbour_offsets(params: &ChainParameters, b: BasisIndex, k: usize) -> Result<(i32, i32)> {
    params.check_index(b)?;
    params.check_qubit(k)?;
    Ok(offsets_unchecked(params.n(), b.0, k))
}

/// Frequency of the `α_k: 0 → 1` transition with the other bits taken from `b`.
pub fn transition_frequency(params: &ChainParameters, b: BasisIndex, k: usize) -> Result<f64> {
    params.check_index(b)?;
    params.check_qubit(k)?;
    let up = energy_unchecked(params, b.with_bit(k, true).0);
    let down = energy_unchecked(params, b.with_bit(k, false).0);
    Ok(up - down)
}

/// Neighbour bits `(qubit, α)` within distance 2 of the driven qubit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NeighbourConfig(pub Vec<(usize, u8)>);

/// Spectral diagnostics for one `(k, μ, ν)` drive.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveReport {
    pub k: usize,
    pub mu: i32,
    pub nu: i32,
    pub frequency: f64,
    /// Smallest nonzero detuning to a transition of the same qubit.
    pub min_same_qubit_detuning: f64,
    /// Smallest detuning to any transition of another qubit.
    pub min_other_qubit_detuning: f64,
    /// Neighbour configurations resonant with this drive.
    pub configurations: Vec<NeighbourConfig>,
}

impl DriveReport {
    /// More than one neighbour configuration shares this drive frequency.
    pub fn is_degenerate(&self) -> bool {
        self.configurations.len() > 1
    }
}

/// Gap between the transition bands of two qubits adjacent in frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct BandGap {
    pub lower: usize,
    pub upper: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AddressabilityReport {
    pub drives: Vec<DriveReport>,
    pub band_gaps: Vec<BandGap>,
}

impl AddressabilityReport {
    pub fn min_same_qubit_detuning(&self) -> f64 {
        self.drives
            .iter()
            .map(|d| d.min_same_qubit_detuning)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_other_qubit_detuning(&self) -> f64 {
        self.drives
            .iter()
            .map(|d| d.min_other_qubit_detuning)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn degenerate_drives(&self) -> impl Iterator<Item = &DriveReport> {
        self.drives.iter().filter(|d| d.is_degenerate())
    }
}

/// Checks that every drive addresses only its intended transitions.
///
/// Fails when distinct `(μ, ν)` offsets on one qubit share a frequency, when
/// [`ChainParameters::validate`] fails, or when a drive comes within
/// `10·(2J')` of a transition of another qubit.
pub fn addressability_report(params: &ChainParameters) -> Result<AddressabilityReport> {
    let n = params.n();
    // transitions[q] = (frequency, basis index with α_q = 0)
    let transitions: Vec<Vec<(f64, usize)>> = (0..n)
        .map(|q| {
            (0..params.dim())
                .filter(|b| b & (1 << q) == 0)
                .map(|b| {
                    let (mu, nu) = offsets_unchecked(n, b, q);
                    (params.drive_frequency(q, mu, nu), b)
                })
                .collect()
        })
        .collect();

    let mut drives = Vec::new();
    for k in 0..n {
        for (mu, nu) in params.realizable_offsets(k)? {
            let frequency = params.drive_frequency(k, mu, nu);
            let mut configs: BTreeMap<NeighbourConfig, ()> = BTreeMap::new();
            let mut min_same = f64::INFINITY;
            for &(f, b) in &transitions[k] {
                if offsets_unchecked(n, b, k) == (mu, nu) {
                    configs.insert(neighbour_config(n, b, k), ());
                } else {
                    min_same = min_same.min((f - frequency).abs());
                }
            }
            let min_other = (0..n)
                .filter(|&q| q != k)
                .flat_map(|q| transitions[q].iter())
                .map(|(f, _)| (f - frequency).abs())
                .fold(f64::INFINITY, f64::min);
            drives.push(DriveReport {
                k,
                mu,
                nu,
                frequency,
                min_same_qubit_detuning: min_same,
                min_other_qubit_detuning: min_other,
                configurations: configs.into_keys().collect(),
            });
        }
    }

    if let Some(d) = drives.iter().find(|d| !(d.min_same_qubit_detuning > 0.0)) {
        return Err(Error::AddressabilityViolation(format!(
            "degenerate drive on qubit {} (mu={}, nu={}): distinct neighbour configurations share frequency {}",
            d.k, d.mu, d.nu, d.frequency
        )));
    }
    params
        .validate()
        .map_err(|e| Error::AddressabilityViolation(e.to_string()))?;
    let margin = 10.0 * 2.0 * params.coupling_j2;
    if let Some(d) = drives.iter().find(|d| !(d.min_other_qubit_detuning > margin)) {
        return Err(Error::AddressabilityViolation(format!(
            "drive on qubit {} (mu={}, nu={}) at {} lies within {} of another qubit's transition (margin {})",
            d.k, d.mu, d.nu, d.frequency, d.min_other_qubit_detuning, margin
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| params.larmor[a].total_cmp(&params.larmor[b]));
    let band = |q: usize| {
        transitions[q].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (f, _)| {
            (lo.min(*f), hi.max(*f))
        })
    };
    let band_gaps = order
        .windows(2)
        .map(|w| BandGap {
            lower: w[0],
            upper: w[1],
            gap: band(w[1]).0 - band(w[0]).1,
        })
        .collect();

    Ok(AddressabilityReport { drives, band_gaps })
}

fn neighbour_config(n: usize, b: usize, k: usize) -> NeighbourConfig {
    let lo = k.saturating_sub(2);
    let hi = (k + 2).min(n - 1);
    NeighbourConfig(
        (lo..=hi)
            .filter(|&j| j != k)
            .map(|j| (j, ((b >> j) & 1) as u8))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> ChainParameters {
        ChainParameters::default()
    }

    #[test]
    fn hand_evaluated_energies() {
        let p = defaults();
        assert!((diagonal_energy(&p, BasisIndex(0)).unwrap() + 506.4).abs() < 1e-12);
        assert!((diagonal_energy(&p, BasisIndex(0b1111)).unwrap() - 493.6).abs() < 1e-12);
        assert!((diagonal_energy(&p, BasisIndex(0b0001)).unwrap() + 402.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_index() {
        let p = defaults();
        assert_eq!(
            diagonal_energy(&p, BasisIndex(16)),
            Err(Error::IndexOutOfRange { index: 16, n: 4 })
        );
        assert!(neighbour_offsets(&p, BasisIndex(0), 4).is_err());
    }

    #[test]
    fn offsets_examples() {
        let p = defaults();
        assert_eq!(neighbour_offsets(&p, BasisIndex(0), 1).unwrap(), (2, 1));
        assert_eq!(neighbour_offsets(&p, BasisIndex(0b0101), 1).unwrap(), (-2, 1));
        assert_eq!(neighbour_offsets(&p, BasisIndex(0b1111), 3).unwrap(), (-1, -1));
    }

    #[test]
    fn transition_examples() {
        let p = defaults();
        assert!((transition_frequency(&p, BasisIndex(0), 0).unwrap() - 104.4).abs() < 1e-12);
        assert!((transition_frequency(&p, BasisIndex(0), 1).unwrap() - 208.4).abs() < 1e-12);
    }

    #[test]
    fn transition_matches_offsets_exhaustively() {
        let p = defaults();
        for b in 0..16 {
            for k in 0..4 {
                let (mu, nu) = neighbour_offsets(&p, BasisIndex(b), k).unwrap();
                let f = transition_frequency(&p, BasisIndex(b), k).unwrap();
                assert!((f - p.drive_frequency(k, mu, nu)).abs() < 1e-12, "b={b} k={k}");
            }
        }
    }

    #[test]
    fn global_flip_cancels_single_spin_terms() {
        let p = defaults();
        for b in 0..16usize {
            let sum = energy_unchecked(&p, b) + energy_unchecked(&p, !b & 0xf);
            let ising = -2.0 * p.coupling_j() * (0..3).map(|k| spin(b, k) * spin(b, k + 1)).sum::<f64>()
                - 2.0 * p.coupling_j2() * (0..2).map(|k| spin(b, k) * spin(b, k + 2)).sum::<f64>();
            assert!((sum - 2.0 * ising).abs() < 1e-12);
        }
    }

    #[test]
    fn offset_ranges() {
        let p = defaults();
        assert_eq!(p.realizable_offsets(0).unwrap(), vec![(-1, -1), (-1, 1), (1, -1), (1, 1)]);
        assert_eq!(p.realizable_offsets(3).unwrap(), vec![(-1, -1), (-1, 1), (1, -1), (1, 1)]);
        assert_eq!(
            p.realizable_offsets(2).unwrap(),
            vec![(-2, -1), (-2, 1), (0, -1), (0, 1), (2, -1), (2, 1)]
        );
        assert_eq!(p.realizable_offsets(1).unwrap().len(), 6);
    }

    #[test]
    fn report_defaults() {
        let report = addressability_report(&defaults()).unwrap();
        for d in &report.drives {
            assert!((d.min_same_qubit_detuning - 0.8).abs() < 1e-12, "{d:?}");
        }
        let g01 = report.band_gaps.iter().find(|g| g.lower == 0 && g.upper == 1).unwrap();
        assert!((g01.gap - 87.2).abs() < 1e-12);
        let d = report
            .drives
            .iter()
            .find(|d| d.k == 2 && d.mu == 0 && d.nu == 1)
            .unwrap();
        assert!(d.is_degenerate());
        assert_eq!(
            d.configurations,
            vec![
                NeighbourConfig(vec![(0, 0), (1, 0), (3, 1)]),
                NeighbourConfig(vec![(0, 0), (1, 1), (3, 0)]),
            ]
        );
        // μ = 0 only occurs on the interior qubits.
        assert!(report.degenerate_drives().all(|d| d.mu == 0 && (d.k == 1 || d.k == 2)));
        assert_eq!(report.degenerate_drives().count(), 4);
    }

    #[test]
    fn zero_second_neighbour_coupling_is_degenerate() {
        let p = ChainParameters::new(vec![100.0, 200.0, 300.0, 400.0], 4.0, 0.0).unwrap();
        match addressability_report(&p) {
            Err(Error::AddressabilityViolation(msg)) => assert!(msg.contains("degenerate")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_larmor_rejected() {
        let p = ChainParameters::new(vec![100.0, 200.0, 200.0, 400.0], 4.0, 0.4).unwrap();
        assert!(p.validate().is_err());
        assert!(matches!(
            addressability_report(&p),
            Err(Error::AddressabilityViolation(_))
        ));
    }

    #[test]
    fn crowded_spectrum_rejected() {
        // qubit bands 4 apart: far inside the 10·2J' margin
        let p = ChainParameters::new(vec![100.0, 104.0, 300.0, 400.0], 1.0, 0.4).unwrap();
        assert!(p.validate().is_ok());
        assert!(addressability_report(&p).is_err());
    }

    #[test]
    fn structural_checks() {
        assert!(ChainParameters::new(vec![1.0, 2.0], 1.0, 0.1).is_err());
        assert!(ChainParameters::new(vec![1.0, 2.0, f64::NAN], 1.0, 0.1).is_err());
    }
}
