//! Lowers Grover search on the 4-qubit chain to pulse programs.
//!
//! Qubits 0, 2 and 3 form the data register and qubit 1 is the ancilla,
//! which couples to every data qubit (0 and 2 as nearest neighbours, 3 as
//! second neighbour). Single-qubit gates have to be repeated for every
//! neighbour configuration; conditional phase flips are 2π pulses on the
//! ancilla tuned to the configurations that should change sign.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::chain::ChainParameters;
use crate::error::{Error, Result};
use crate::pulse::{PulseProgram, PulseSpec};

pub const ANCILLA: usize = 1;
pub const DATA_QUBITS: [usize; 3] = [0, 2, 3];
/// Targets with a single-pulse oracle.
pub const TARGETS: [u32; 4] = [0, 5, 8, 13];

/// Pulse arrangement for the Hadamard gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// One `R(π,π) R(π/2,π/2) R(π/2,π)` triplet per neighbour configuration.
    Naive,
    /// All `R(π,π)` pulses, then all `R(π/2,π/2)`, then all `R(π/2,π)`.
    Grouped,
    /// Grouped, with every π pulse emitted as two π/2 pulses.
    #[default]
    Split,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "grouped" => Ok(Strategy::Grouped),
            "split" => Ok(Strategy::Split),
            other => Err(Error::Config(format!(
                "unknown strategy `{other}` (naive|grouped|split)"
            ))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Naive => "naive",
            Strategy::Grouped => "grouped",
            Strategy::Split => "split",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverSpec {
    pub target: u32,
    pub steps: usize,
    pub strategy: Strategy,
    pub rabi: f64,
}

impl GroverSpec {
    pub fn new(target: u32, steps: usize, strategy: Strategy, rabi: f64) -> Result<Self> {
        let spec = Self {
            target,
            steps,
            strategy,
            rabi,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_target(self.target)?;
        if self.steps == 0 {
            return Err(Error::Config("Grover step count must be positive".into()));
        }
        if !(self.rabi > 0.0 && self.rabi.is_finite()) {
            return Err(Error::InvalidPulse(format!("Rabi frequency {} must be positive", self.rabi)));
        }
        Ok(())
    }
}

pub fn check_target(target: u32) -> Result<()> {
    if TARGETS.contains(&target) {
        Ok(())
    } else {
        Err(Error::InvalidTarget(target))
    }
}

fn check_chain(params: &ChainParameters) -> Result<()> {
    if params.n() == 4 {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!(
            "the Grover compiler targets a 4-qubit chain, got {} qubits",
            params.n()
        )))
    }
}

// R_x(ϑ) = R(π, ϑ), R_y(ϑ) = R(π/2, ϑ)
const X_PI: (f64, f64) = (PI, PI);
const Y_HALF: (f64, f64) = (FRAC_PI_2, FRAC_PI_2);
const Y_PI: (f64, f64) = (FRAC_PI_2, PI);

/// Hadamard on data qubit `k`, in application order.
pub fn compile_hadamard(params: &ChainParameters, k: usize, strategy: Strategy, rabi: f64) -> Result<Vec<PulseSpec>> {
    check_chain(params)?;
    if !DATA_QUBITS.contains(&k) {
        return Err(Error::NotDataQubit(k));
    }
    let configs = params.realizable_offsets(k)?;
    let pulse = |(mu, nu): (i32, i32), (phase, angle): (f64, f64)| PulseSpec::new(k, mu, nu, phase, angle, rabi);

    let pulses = match strategy {
        Strategy::Naive => configs
            .iter()
            .flat_map(|&c| [pulse(c, X_PI), pulse(c, Y_HALF), pulse(c, Y_PI)])
            .collect(),
        Strategy::Grouped => [X_PI, Y_HALF, Y_PI]
            .into_iter()
            .flat_map(|rot| configs.iter().map(move |&c| pulse(c, rot)))
            .collect(),
        Strategy::Split => {
            let mut out = Vec::new();
            for (phase, angle) in [X_PI, Y_HALF, Y_PI] {
                for &c in &configs {
                    if angle == PI {
                        out.push(pulse(c, (phase, FRAC_PI_2)));
                        out.push(pulse(c, (phase, FRAC_PI_2)));
                    } else {
                        out.push(pulse(c, (phase, angle)));
                    }
                }
            }
            out
        }
    };
    Ok(pulses)
}

/// `H^{⊗3} = H_0 H_2 H_3`, emitted in ascending qubit order.
pub fn compile_superposition(params: &ChainParameters, strategy: Strategy, rabi: f64) -> Result<Vec<PulseSpec>> {
    let mut out = Vec::new();
    for k in DATA_QUBITS {
        out.extend(compile_hadamard(params, k, strategy, rabi)?);
    }
    Ok(out)
}

/// Ancilla offsets flipped by `S_0`, in application order. Together they
/// cover every data configuration except all-zero, which sits at (2, 1).
pub const S0_OFFSETS: [(i32, i32); 5] = [(-2, 1), (-2, -1), (0, -1), (0, 1), (2, -1)];

/// Conditional sign flip of every data state except `|000⟩`.
pub fn compile_s0(params: &ChainParameters, rabi: f64) -> Result<Vec<PulseSpec>> {
    check_chain(params)?;
    Ok(S0_OFFSETS
        .iter()
        .map(|&(mu, nu)| PulseSpec::new(ANCILLA, mu, nu, 0.0, 2.0 * PI, rabi))
        .collect())
}

/// Ancilla offsets of the oracle pulse for `target`.
pub fn oracle_offsets(target: u32) -> Result<(i32, i32)> {
    match target {
        0 => Ok((2, 1)),
        8 => Ok((2, -1)),
        5 => Ok((-2, 1)),
        13 => Ok((-2, -1)),
        other => Err(Error::InvalidTarget(other)),
    }
}

/// Single 2π ancilla pulse flipping the sign of the target's data bits.
pub fn compile_oracle(params: &ChainParameters, target: u32, rabi: f64) -> Result<PulseSpec> {
    check_chain(params)?;
    let (mu, nu) = oracle_offsets(target)?;
    Ok(PulseSpec::new(ANCILLA, mu, nu, 0.0, 2.0 * PI, rabi))
}

/// Preparation followed by `steps` rounds of oracle → `H^{⊗3}` → `S_0` →
/// `H^{⊗3}`, in that temporal order.
pub fn compile_grover(params: &ChainParameters, spec: &GroverSpec) -> Result<PulseProgram> {
    spec.validate()?;
    let h = compile_superposition(params, spec.strategy, spec.rabi)?;
    let s0 = compile_s0(params, spec.rabi)?;
    let oracle = compile_oracle(params, spec.target, spec.rabi)?;

    let mut program = PulseProgram::new();
    program.push_segment("prep", h.iter().copied());
    for step in 1..=spec.steps {
        program.push_segment(format!("step{step}.oracle"), [oracle]);
        program.push_segment(format!("step{step}.H.pre"), h.iter().copied());
        program.push_segment(format!("step{step}.S0"), s0.iter().copied());
        program.push_segment(format!("step{step}.H.post"), h.iter().copied());
    }
    program.validate(params)?;
    Ok(program)
}

/// Pulse and duration accounting for one strategy.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PulseCounts {
    pub strategy: String,
    pub hadamard: [usize; 3],
    pub superposition: usize,
    pub s0: usize,
    pub oracle: usize,
    pub grover_step: usize,
    pub steps: usize,
    pub total_pulses: usize,
    /// Durations in units of `τ_{π/2}`.
    pub superposition_duration: f64,
    pub grover_step_duration: f64,
    pub total_duration: f64,
}

pub fn pulse_counts(params: &ChainParameters, strategy: Strategy, steps: usize) -> Result<PulseCounts> {
    let rabi = 1.0;
    let hadamard = [
        compile_hadamard(params, 0, strategy, rabi)?.len(),
        compile_hadamard(params, 2, strategy, rabi)?.len(),
        compile_hadamard(params, 3, strategy, rabi)?.len(),
    ];
    let quarter = |pulses: &[PulseSpec]| pulses.iter().map(|p| p.angle / FRAC_PI_2).sum::<f64>();
    let sup = compile_superposition(params, strategy, rabi)?;
    let s0 = compile_s0(params, rabi)?;
    let step_duration = 4.0 + 2.0 * quarter(&sup) + quarter(&s0);
    let superposition = sup.len();
    let grover_step = 1 + 2 * superposition + s0.len();
    let total_pulses = superposition + steps * grover_step;
    Ok(PulseCounts {
        strategy: strategy.to_string(),
        hadamard,
        superposition,
        s0: s0.len(),
        oracle: 1,
        grover_step,
        steps,
        total_pulses,
        superposition_duration: quarter(&sup),
        grover_step_duration: step_duration,
        total_duration: quarter(&sup) + steps as f64 * step_duration,
    })
}
