//! State evolution under pulse programs.
//!
//! Three interchangeable engines share one interface: the resonant
//! approximation ([`ideal`]), the closed-form rotating-frame propagator
//! ([`exact`]), and a fixed-step RK4 integrator ([`rk4`]) that exists only to
//! cross-check the second one.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chain::{BasisIndex, ChainParameters};
use crate::error::{Error, Result};
use crate::pulse::{PulseProgram, PulseSpec};
use crate::state::StateVector;

pub mod exact;
pub mod ideal;
pub mod rk4;

pub use exact::{exact_pulse_apply, Coupling, ExactEngine};
pub use ideal::{ideal_pulse_apply, rotation};
pub use rk4::rk4_reference_apply;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    Ideal,
    #[default]
    Exact,
    Rk4,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Mode::Ideal),
            "exact" => Ok(Mode::Exact),
            "rk4" => Ok(Mode::Rk4),
            other => Err(Error::Config(format!("unknown mode `{other}` (ideal|exact|rk4)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ideal => "ideal",
            Mode::Exact => "exact",
            Mode::Rk4 => "rk4",
        })
    }
}

/// Applies one pulse that starts at absolute time `t0`.
pub trait PulseEngine {
    fn apply(&mut self, pulse: &PulseSpec, t0: f64, state: &StateVector) -> Result<StateVector>;
}

/// Resonant-approximation engine.
#[derive(Debug, Clone)]
pub struct IdealEngine {
    params: ChainParameters,
}

impl IdealEngine {
    pub fn new(params: &ChainParameters) -> Self {
        Self { params: params.clone() }
    }
}

impl PulseEngine for IdealEngine {
    fn apply(&mut self, pulse: &PulseSpec, _t0: f64, state: &StateVector) -> Result<StateVector> {
        ideal_pulse_apply(&self.params, pulse, state)
    }
}

impl PulseEngine for ExactEngine {
    fn apply(&mut self, pulse: &PulseSpec, t0: f64, state: &StateVector) -> Result<StateVector> {
        ExactEngine::apply(self, pulse, t0, state)
    }
}

/// RK4 engine choosing the step count per pulse from a sampling density.
#[derive(Debug, Clone)]
pub struct Rk4Engine {
    params: ChainParameters,
    points_per_period: f64,
}

impl Rk4Engine {
    pub fn new(params: &ChainParameters) -> Self {
        Self::with_density(params, rk4::DEFAULT_POINTS_PER_PERIOD)
    }

    pub fn with_density(params: &ChainParameters, points_per_period: f64) -> Self {
        Self {
            params: params.clone(),
            points_per_period,
        }
    }
}

impl PulseEngine for Rk4Engine {
    fn apply(&mut self, pulse: &PulseSpec, t0: f64, state: &StateVector) -> Result<StateVector> {
        let steps = rk4::required_steps(&self.params, pulse, self.points_per_period);
        rk4_reference_apply(&self.params, pulse, t0, state, steps)
    }
}

/// Builds the engine for `mode`.
pub fn engine(params: &ChainParameters, mode: Mode) -> Box<dyn PulseEngine + Send> {
    match mode {
        Mode::Ideal => Box::new(IdealEngine::new(params)),
        Mode::Exact => Box::new(ExactEngine::new(params)),
        Mode::Rk4 => Box::new(Rk4Engine::new(params)),
    }
}

/// States at every pulse boundary, starting with `(0, initial)`.
pub type Trajectory = Vec<(f64, StateVector)>;

/// Runs `program` pulse by pulse, threading absolute start times through
/// the engine.
pub fn run_with(engine: &mut dyn PulseEngine, program: &PulseProgram, initial: &StateVector) -> Result<Trajectory> {
    let mut out = Vec::with_capacity(program.len() + 1);
    out.push((0.0, initial.clone()));
    let mut state = initial.clone();
    for (pulse, &t0) in program.pulses().iter().zip(program.start_times()) {
        state = engine.apply(pulse, t0, &state)?;
        out.push((t0 + pulse.duration(), state.clone()));
    }
    Ok(out)
}

pub fn run_program(
    params: &ChainParameters,
    program: &PulseProgram,
    initial: &StateVector,
    mode: Mode,
) -> Result<Trajectory> {
    initial.check(params.n())?;
    let mut engine = engine(params, mode);
    run_with(engine.as_mut(), program, initial)
}

/// Dense matrix of `program` in `mode`, built column by column from basis
/// states.
pub fn program_unitary(params: &ChainParameters, program: &PulseProgram, mode: Mode) -> Result<DMatrix<Complex64>> {
    let dim = params.dim();
    let mut engine = engine(params, mode);
    let mut u = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let traj = run_with(engine.as_mut(), program, &StateVector::basis(params.n(), BasisIndex(b)))?;
        let last = &traj.last().expect("trajectory is never empty").1;
        for (a, amp) in last.amplitudes().iter().enumerate() {
            u[(a, b)] = *amp;
        }
    }
    Ok(u)
}
