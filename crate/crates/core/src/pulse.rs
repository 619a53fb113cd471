//! Frequency-addressed RF pulses and back-to-back pulse programs.

use std::f64::consts::FRAC_PI_2;
use std::ops::Range;

use crate::chain::ChainParameters;
use crate::error::{Error, Result};

pub mod text;

/// One rectangular RF pulse `R_k^{μν}(φ, ϑ)` at Rabi frequency `Ω`.
///
/// The drive frequency is `w_k + μJ + νJ'`; the duration is `ϑ/Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub k: usize,
    pub mu: i32,
    pub nu: i32,
    pub phase: f64,
    pub angle: f64,
    pub rabi: f64,
}

impl PulseSpec {
    pub fn new(k: usize, mu: i32, nu: i32, phase: f64, angle: f64, rabi: f64) -> Self {
        Self {
            k,
            mu,
            nu,
            phase,
            angle,
            rabi,
        }
    }

    pub fn duration(&self) -> f64 {
        self.angle / self.rabi
    }

    pub fn frequency(&self, params: &ChainParameters) -> f64 {
        params.drive_frequency(self.k, self.mu, self.nu)
    }

    /// Rejects non-positive angles or Rabi frequencies, unknown qubits,
    /// offsets not realizable on the target qubit, and non-positive drive
    /// frequencies.
    pub fn validate(&self, params: &ChainParameters) -> Result<()> {
        if !(self.angle > 0.0 && self.angle.is_finite()) {
            return Err(Error::InvalidPulse(format!("angle {} must be positive", self.angle)));
        }
        if !(self.rabi > 0.0 && self.rabi.is_finite()) {
            return Err(Error::InvalidPulse(format!("Rabi frequency {} must be positive", self.rabi)));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidPulse("phase must be finite".into()));
        }
        let offsets = params.realizable_offsets(self.k)?;
        if !offsets.contains(&(self.mu, self.nu)) {
            return Err(Error::UnrealizableOffsets {
                k: self.k,
                mu: self.mu,
                nu: self.nu,
            });
        }
        let w = self.frequency(params);
        if !(w > 0.0) {
            return Err(Error::InvalidPulse(format!("drive frequency {w} must be positive")));
        }
        Ok(())
    }
}

/// A labelled range of pulse indices within a program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub label: String,
    pub range: Range<usize>,
}

/// Ordered, gap-free pulse sequence with cumulative start times.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseProgram {
    pulses: Vec<PulseSpec>,
    start_times: Vec<f64>,
    segments: Vec<Segment>,
    end_time: f64,
}

impl PulseProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends pulses as one labelled segment.
    pub fn push_segment(&mut self, label: impl Into<String>, pulses: impl IntoIterator<Item = PulseSpec>) {
        let start = self.pulses.len();
        for p in pulses {
            self.push(p);
        }
        self.segments.push(Segment {
            label: label.into(),
            range: start..self.pulses.len(),
        });
    }

    /// Appends one pulse without a segment label.
    pub fn push(&mut self, pulse: PulseSpec) {
        self.start_times.push(self.end_time);
        self.end_time += pulse.duration();
        self.pulses.push(pulse);
    }

    pub fn pulses(&self) -> &[PulseSpec] {
        &self.pulses
    }

    pub fn start_times(&self) -> &[f64] {
        &self.start_times
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, label: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.label == label)
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.end_time
    }

    /// Times of every pulse boundary, starting with 0 and ending with
    /// [`PulseProgram::total_duration`].
    pub fn boundaries(&self) -> Vec<f64> {
        let mut t = self.start_times.clone();
        t.push(self.end_time);
        t
    }

    /// Total rotation angle in units of `π/2`, i.e. duration in units of
    /// `τ_{π/2}` when all pulses share one Rabi frequency.
    pub fn duration_in_quarter_turns(&self) -> f64 {
        self.pulses.iter().map(|p| p.angle / FRAC_PI_2).sum()
    }

    pub fn validate(&self, params: &ChainParameters) -> Result<()> {
        self.pulses.iter().try_for_each(|p| p.validate(params))
    }
}
