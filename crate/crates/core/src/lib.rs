//! Pulse-level simulation of Grover search on an Ising spin-chain quantum
//! computer.
//!
//! - [`chain`]: static spectrum and addressability of the chain.
//! - [`propagation`]: ideal, exact and RK4 evolution under rectangular pulses.
//! - [`compiler`]: Hadamard, S0, oracle and Grover programs as pulse lists.
//! - [`experiments`]: fidelity traces, Rabi scans, random-state averages, fits.
//! - [`cli`]: the `spinchain` command-line tool.

pub mod chain;
pub mod cli;
pub mod compiler;
pub mod config;
pub mod error;
pub mod experiments;
pub mod propagation;
pub mod pulse;
pub mod state;
pub mod validate;

pub use chain::{BasisIndex, ChainParameters};
pub use compiler::{GroverSpec, Strategy};
pub use error::{Error, Result};
pub use propagation::Mode;
pub use pulse::{PulseProgram, PulseSpec};
pub use state::{fidelity, StateVector};
