//! Self-checks run by `spinchain validate`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chain::{addressability_report, ChainParameters};
use crate::compiler::{
    compile_hadamard, compile_oracle, compile_s0, Strategy, DATA_QUBITS, TARGETS,
};
use crate::experiments::{data_mask, nearest_detuning, rabi_for_2pik};
use crate::propagation::{program_unitary, run_program, ExactEngine, Mode};
use crate::pulse::{PulseProgram, PulseSpec};
use crate::state::StateVector;

/// Tolerance for gate identities in ideal mode.
pub const GATE_TOLERANCE: f64 = 1e-12;
/// Largest `‖U†U − I‖` accepted for a cached exact propagator.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;
/// Largest exact vs RK4 state distance over one Hadamard gate.
pub const ENGINE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self::new(name, false, err.to_string())
    }
}

/// `max |u − e^{iθ}·v|` minimized over the phase fixed by the largest entry
/// of `v`.
pub fn distance_up_to_phase(u: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> f64 {
    let (idx, _) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .expect("non-empty matrix");
    let phase = u.as_slice()[idx] / v.as_slice()[idx];
    let phase = phase / phase.norm();
    u.iter()
        .zip(v.iter())
        .map(|(a, b)| (a - phase * b).norm())
        .fold(0.0, f64::max)
}

/// `H` on qubit `k`, identity elsewhere.
pub fn hadamard_on(n: usize, k: usize) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let bit = 1 << k;
    DMatrix::from_fn(dim, dim, |a, b| {
        if a & !bit != b & !bit {
            Complex64::new(0.0, 0.0)
        } else if a & b & bit != 0 {
            Complex64::new(-FRAC_1_SQRT_2, 0.0)
        } else {
            Complex64::new(FRAC_1_SQRT_2, 0.0)
        }
    })
}

/// Diagonal matrix with `−1` where `flip(b)` holds.
pub fn sign_diagonal(dim: usize, flip: impl Fn(usize) -> bool) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |a, b| match (a == b, flip(b)) {
        (false, _) => Complex64::new(0.0, 0.0),
        (true, true) => Complex64::new(-1.0, 0.0),
        (true, false) => Complex64::new(1.0, 0.0),
    })
}

fn max_abs_diff(u: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> f64 {
    (u - v).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn program_of(label: &str, pulses: impl IntoIterator<Item = PulseSpec>) -> PulseProgram {
    let mut p = PulseProgram::new();
    p.push_segment(label, pulses);
    p
}

/// Runs every check; addressability failures stop the suite early because
/// the compiled gates are meaningless on an unaddressable chain.
pub fn run_checks(params: &ChainParameters) -> Vec<Check> {
    let mut checks = Vec::new();
    match addressability_report(params) {
        Ok(report) => checks.push(Check::new(
            "addressability",
            true,
            format!(
                "min same-qubit detuning {:.6}, min other-qubit detuning {:.6}, {} degenerate drives",
                report.min_same_qubit_detuning(),
                report.min_other_qubit_detuning(),
                report.degenerate_drives().count()
            ),
        )),
        Err(e) => {
            checks.push(Check::failed("addressability", e));
            return checks;
        }
    }
    let rabi = rabi_for_2pik(nearest_detuning(params), 4);
    let dim = params.dim();

    for strategy in [Strategy::Naive, Strategy::Grouped, Strategy::Split] {
        for k in DATA_QUBITS {
            let name = format!("hadamard q{k} {strategy}");
            let result = compile_hadamard(params, k, strategy, rabi)
                .and_then(|p| program_unitary(params, &program_of("H", p), Mode::Ideal));
            checks.push(match result {
                Ok(u) => {
                    let d = distance_up_to_phase(&u, &hadamard_on(params.n(), k));
                    Check::new(name, d <= GATE_TOLERANCE, format!("deviation {d:.3e}"))
                }
                Err(e) => Check::failed(name, e),
            });
        }
    }

    let mask = data_mask();
    let s0 = compile_s0(params, rabi).and_then(|p| program_unitary(params, &program_of("S0", p), Mode::Ideal));
    checks.push(match s0 {
        Ok(u) => {
            let d = max_abs_diff(&u, &sign_diagonal(dim, |b| b & mask != 0));
            Check::new("S0 diagonal", d <= GATE_TOLERANCE, format!("deviation {d:.3e}"))
        }
        Err(e) => Check::failed("S0 diagonal", e),
    });

    for target in TARGETS {
        let name = format!("oracle {target}");
        let u = compile_oracle(params, target, rabi)
            .and_then(|p| program_unitary(params, &program_of("O", [p]), Mode::Ideal));
        checks.push(match u {
            Ok(u) => {
                let want = target as usize & mask;
                let d = max_abs_diff(&u, &sign_diagonal(dim, |b| b & mask == want));
                Check::new(name, d <= GATE_TOLERANCE, format!("deviation {d:.3e}"))
            }
            Err(e) => Check::failed(name, e),
        });
    }

    let mut engine = ExactEngine::new(params);
    let mut worst = 0.0f64;
    for (k, t0) in [(0, 0.0), (1, 17.5), (2, 399.0), (3, 6250.0)] {
        let Ok(offsets) = params.realizable_offsets(k) else { continue };
        let (mu, nu) = offsets[0];
        let pulse = PulseSpec::new(k, mu, nu, 0.3, 2.0, rabi);
        let u = engine.propagator(&pulse).unitary_at(t0);
        worst = worst.max((u.adjoint() * &u - DMatrix::identity(dim, dim)).norm());
    }
    checks.push(Check::new(
        "exact unitarity",
        worst <= UNITARITY_TOLERANCE,
        format!("max |U'U - I| {worst:.3e}"),
    ));

    let name = "exact vs rk4 (hadamard q0)";
    let result = compile_hadamard(params, 0, Strategy::Split, rabi).and_then(|p| {
        let program = program_of("H", p);
        let psi = StateVector::ground(params.n());
        let exact = run_program(params, &program, &psi, Mode::Exact)?;
        let rk4 = run_program(params, &program, &psi, Mode::Rk4)?;
        Ok(exact
            .iter()
            .zip(&rk4)
            .map(|(a, b)| a.1.distance(&b.1))
            .fold(0.0, f64::max))
    });
    checks.push(match result {
        Ok(d) => Check::new(name, d < ENGINE_TOLERANCE, format!("max distance {d:.3e}")),
        Err(e) => Check::failed(name, e),
    });
    checks
}
