//! Fidelity studies of the compiled Grover program: traces, Rabi-frequency
//! scans, random-state averages, exponential fits and success probabilities.
//!
//! Times are reported in units of `τ_{π/2} = π/(2Ω)`, the duration of one
//! π/2 pulse.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::ChainParameters;
use crate::compiler::{check_target, compile_grover, GroverSpec, Strategy, DATA_QUBITS};
use crate::error::{Error, Result};
use crate::propagation::{self, Mode, PulseEngine};
use crate::pulse::PulseProgram;
use crate::state::{fidelity, StateVector};

/// Rabi frequency at which a π pulse detuned by `delta` completes exactly
/// `k` generalized Rabi cycles: `√(Δ² + Ω²)·π/Ω = 2πk`, i.e.
/// `Ω = Δ/√(4k² − 1)`.
pub fn rabi_for_2pik(delta: f64, k: u32) -> f64 {
    assert!(delta > 0.0 && k >= 1, "need delta > 0 and k >= 1");
    let k = f64::from(k);
    delta / (4.0 * k * k - 1.0).sqrt()
}

/// π/2 pulses at the `k`-th 2πk frequency complete `k/2` cycles, which is
/// whole only for even `k`.
pub fn suppresses_half_pulses(k: u32) -> bool {
    k.is_multiple_of(2)
}

/// The nearest off-resonant detuning, `2J'`.
pub fn nearest_detuning(params: &ChainParameters) -> f64 {
    2.0 * params.coupling_j2()
}

/// Complex fidelity sampled at pulse boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    /// In units of `τ_{π/2}`.
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl FidelityTrace {
    pub fn abs2(&self) -> Vec<f64> {
        self.values.iter().map(|f| f.norm_sqr()).collect()
    }

    pub fn final_value(&self) -> Complex64 {
        *self.values.last().expect("trace has the initial sample")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trace has the initial sample")
    }
}

/// Ideal and actual trajectories of one program run.
#[derive(Debug, Clone)]
pub struct TraceRun {
    pub trace: FidelityTrace,
    pub ideal_final: StateVector,
    pub actual_final: StateVector,
}

/// Runs `program` from `initial` in ideal mode and in `mode`, recording the
/// fidelity at every pulse boundary. `rabi` sets the time unit.
pub fn trace_program(
    params: &ChainParameters,
    program: &PulseProgram,
    initial: &StateVector,
    mode: Mode,
    rabi: f64,
) -> Result<TraceRun> {
    let mut ideal = propagation::engine(params, Mode::Ideal);
    let mut actual = propagation::engine(params, mode);
    trace_with(ideal.as_mut(), actual.as_mut(), program, initial, rabi)
}

/// Pulse boundaries of `program` in units of `τ_{π/2} = π/(2Ω)`.
///
/// Accumulated as quarter turns so that π/2, π and 2π pulses at the reference
/// Rabi frequency land on exact integers.
pub fn boundaries_in_quarter_turns(program: &PulseProgram, rabi: f64) -> Vec<f64> {
    let mut t = 0.0;
    let mut out = Vec::with_capacity(program.len() + 1);
    out.push(t);
    for p in program.pulses() {
        let turns = p.angle / FRAC_PI_2;
        t += if p.rabi == rabi { turns } else { turns * rabi / p.rabi };
        out.push(t);
    }
    out
}

fn trace_with(
    ideal: &mut dyn PulseEngine,
    actual: &mut dyn PulseEngine,
    program: &PulseProgram,
    initial: &StateVector,
    rabi: f64,
) -> Result<TraceRun> {
    let mut a = initial.clone();
    let mut b = initial.clone();
    let mut values = vec![fidelity(&a, &b)];
    for (pulse, &t0) in program.pulses().iter().zip(program.start_times()) {
        a = ideal.apply(pulse, t0, &a)?;
        b = actual.apply(pulse, t0, &b)?;
        values.push(fidelity(&a, &b));
    }
    let times = boundaries_in_quarter_turns(program, rabi);
    Ok(TraceRun {
        trace: FidelityTrace { times, values },
        ideal_final: a,
        actual_final: b,
    })
}

/// Ground-state run of the compiled Grover program, ideal vs exact.
pub fn fidelity_trace(params: &ChainParameters, spec: &GroverSpec) -> Result<FidelityTrace> {
    grover_run(params, spec, Mode::Exact).map(|r| r.trace)
}

/// Ground-state run of the compiled Grover program, ideal vs `mode`.
pub fn grover_run(params: &ChainParameters, spec: &GroverSpec, mode: Mode) -> Result<TraceRun> {
    let program = compile_grover(params, spec)?;
    trace_program(params, &program, &StateVector::ground(params.n()), mode, spec.rabi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub rabi: f64,
    pub re_f: f64,
    pub f_abs2: f64,
}

/// `points` logarithmically spaced values in `[min, max]`.
pub fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![min],
        _ => {
            let (lo, hi) = (min.ln(), max.ln());
            (0..points)
                .map(|i| {
                    if i + 1 == points {
                        max
                    } else {
                        (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// `points` equally spaced values in `[min, max]`.
pub fn linear_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![min],
        _ => (0..points)
            .map(|i| min + (max - min) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Final fidelity of the full Grover program (from the ground state) at
/// every Rabi frequency of `grid`. Rows come back in grid order.
pub fn rabi_scan(
    params: &ChainParameters,
    target: u32,
    steps: usize,
    grid: &[f64],
    strategy: Strategy,
) -> Result<Vec<ScanRow>> {
    check_target(target)?;
    if let Some(bad) = grid.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::Config(format!("scan grid value {bad} must be positive")));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("scan grid must be sorted".into()));
    }
    grid.par_iter()
        .map(|&rabi| {
            let spec = GroverSpec::new(target, steps, strategy, rabi)?;
            let f = fidelity_trace(params, &spec)?.final_value();
            Ok(ScanRow {
                rabi,
                re_f: f.re,
                f_abs2: f.norm_sqr(),
            })
        })
        .collect()
}

/// Mean `|f|²` over random initial states, per pulse boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedTrace {
    /// In units of `τ_{π/2}`.
    pub times: Vec<f64>,
    pub mean_f_abs2: Vec<f64>,
    pub samples: usize,
}

/// Deterministic generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Averages `|f(t)|²` (ideal vs exact) over `samples` Haar-random initial
/// states. Sample `i` draws from [`sample_rng`]`(seed, i)`, so the result does
/// not depend on how samples are scheduled across threads.
pub fn random_state_trace(
    params: &ChainParameters,
    program: &PulseProgram,
    samples: usize,
    seed: u64,
    rabi: f64,
) -> Result<AveragedTrace> {
    if samples == 0 {
        return Err(Error::Config("random-state average needs at least one sample".into()));
    }
    program.validate(params)?;
    let per_sample: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map_init(
            || {
                (
                    propagation::engine(params, Mode::Ideal),
                    propagation::engine(params, Mode::Exact),
                )
            },
            |(ideal, exact), i| {
                let psi = StateVector::haar_random(params.n(), &mut sample_rng(seed, i as u64));
                trace_with(ideal.as_mut(), exact.as_mut(), program, &psi, rabi).map(|r| r.trace.abs2())
            },
        )
        .collect::<Result<_>>()?;

    let len = program.len() + 1;
    let mut mean = vec![0.0; len];
    for trace in &per_sample {
        for (m, v) in mean.iter_mut().zip(trace) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= samples as f64);
    Ok(AveragedTrace {
        times: boundaries_in_quarter_turns(program, rabi),
        mean_f_abs2: mean,
        samples,
    })
}

/// Exponential decay `|f|² ≈ e^{intercept − rate·t}` fitted on a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub rate: f64,
    pub intercept: f64,
    pub window: (f64, f64),
}

/// Least-squares line through `(t, ln|f|²)` for samples with `t ≤ window_end`
/// and `|f|² > 0`.
pub fn fit_exponential_samples(times: &[f64], f_abs2: &[f64], window_end: f64) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(f_abs2)
        .filter(|(t, f)| **t >= 0.0 && **t <= window_end && **f > 0.0)
        .map(|(t, f)| (*t, f.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateWindow(format!(
            "{} usable samples in [0, {window_end}]",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    if !(stt > 0.0) {
        return Err(Error::DegenerateWindow("all samples share one time".into()));
    }
    let sty: f64 = pts.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let slope = sty / stt;
    let window = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    Ok(FitResult {
        rate: -slope,
        intercept: mean_y - slope * mean_t,
        window,
    })
}

pub fn fit_exponential(trace: &FidelityTrace, window_end: f64) -> Result<FitResult> {
    fit_exponential_samples(&trace.times, &trace.abs2(), window_end)
}

/// Default fit window: the preparation segment, `t ≤ 70 τ_{π/2}`.
pub const DEFAULT_FIT_WINDOW: f64 = 70.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuccessProbability {
    /// Data qubits match the target, ancilla summed over.
    pub marginal: f64,
    /// `|⟨target|ψ⟩|²` including the ancilla bit.
    pub strict: f64,
}

/// Bit mask of the data register.
pub fn data_mask() -> usize {
    DATA_QUBITS.iter().map(|k| 1usize << k).sum()
}

pub fn success_probability(state: &StateVector, target: u32) -> Result<SuccessProbability> {
    check_target(target)?;
    let mask = data_mask();
    let want = target as usize & mask;
    let marginal = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(b, _)| b & mask == want)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    Ok(SuccessProbability {
        marginal,
        strict: state.amplitudes()[target as usize].norm_sqr(),
    })
}

/// Per-run summary emitted as JSON next to the CSV output.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub target: u32,
    pub steps: usize,
    pub strategy: String,
    pub mode: String,
    pub rabi: f64,
    pub pulses: usize,
    pub duration_tau_pi2: f64,
    pub final_re_f: f64,
    pub final_im_f: f64,
    pub final_f_abs2: f64,
    pub success_ideal: SuccessProbability,
    pub success_actual: SuccessProbability,
    /// Exponential fit over the preparation window; `None` when degenerate.
    pub initial_fit: Option<FitResult>,
    /// `−ln|f_final|² / t_final`.
    pub average_rate: f64,
    pub loss_per_pulse: f64,
    pub loss_per_pi_pulse: f64,
    pub loss_per_hadamard: f64,
}

pub fn summarize(spec: &GroverSpec, mode: Mode, program: &PulseProgram, run: &TraceRun) -> Result<RunSummary> {
    let f = run.trace.final_value();
    let abs2 = f.norm_sqr();
    let loss = 1.0 - abs2;
    let quarter_turns = program.duration_in_quarter_turns();
    let hadamards = (DATA_QUBITS.len() * (1 + 2 * spec.steps)) as f64;
    Ok(RunSummary {
        target: spec.target,
        steps: spec.steps,
        strategy: spec.strategy.to_string(),
        mode: mode.to_string(),
        rabi: spec.rabi,
        pulses: program.len(),
        duration_tau_pi2: run.trace.final_time(),
        final_re_f: f.re,
        final_im_f: f.im,
        final_f_abs2: abs2,
        success_ideal: success_probability(&run.ideal_final, spec.target)?,
        success_actual: success_probability(&run.actual_final, spec.target)?,
        initial_fit: fit_exponential(&run.trace, DEFAULT_FIT_WINDOW).ok(),
        average_rate: -abs2.ln() / run.trace.final_time(),
        loss_per_pulse: loss / program.len() as f64,
        loss_per_pi_pulse: loss / (quarter_turns / 2.0),
        loss_per_hadamard: loss / hadamards,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pi_k_frequencies() {
        let d = 0.8;
        assert!((rabi_for_2pik(d, 4) - 0.100_790_526_135_793_9).abs() < 1e-15);
        assert!((rabi_for_2pik(d, 3) - 0.135_224_680_756_562_7).abs() < 1e-15);
        assert!((rabi_for_2pik(d, 1) - 0.461_880_215_351_700_6).abs() < 1e-15);
        assert!((rabi_for_2pik(d, 6) - 0.066_899_360_800_567_3).abs() < 1e-15);
        assert!(suppresses_half_pulses(4) && !suppresses_half_pulses(3));
    }

    #[test]
    fn grids() {
        let g = log_grid(0.06, 0.5, 200);
        assert_eq!(g.len(), 200);
        assert_eq!((g[0], g[199]), (0.06, 0.5));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(log_grid(0.255, 0.5, 1), vec![0.255]);
        assert_eq!(linear_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn exact_linear_fit() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 2.0).collect();
        let f: Vec<f64> = times.iter().map(|t| (-0.01 * t).exp()).collect();
        let fit = fit_exponential_samples(&times, &f, 70.0).unwrap();
        assert!((fit.rate - 0.01).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
        assert_eq!(fit.window, (0.0, 70.0));

        let ones = vec![1.0; 50];
        assert_eq!(fit_exponential_samples(&times, &ones, 70.0).unwrap().rate, 0.0);
    }

    #[test]
    fn degenerate_windows() {
        assert!(matches!(
            fit_exponential_samples(&[0.0, 80.0], &[1.0, 0.5], 70.0),
            Err(Error::DegenerateWindow(_))
        ));
        assert!(fit_exponential_samples(&[0.0, 1.0], &[1.0, 0.0], 70.0).is_err());
    }

    #[test]
    fn success_of_basis_states() {
        let psi = StateVector::basis(4, crate::chain::BasisIndex(13));
        let p = success_probability(&psi, 13).unwrap();
        assert_eq!((p.marginal, p.strict), (1.0, 1.0));
        // ancilla set: marginal still counts it, strict does not
        let psi = StateVector::basis(4, crate::chain::BasisIndex(13 | 0b10));
        let p = success_probability(&psi, 13).unwrap();
        assert_eq!((p.marginal, p.strict), (1.0, 0.0));
        assert_eq!(success_probability(&psi, 4), Err(Error::InvalidTarget(4)));
    }

    #[test]
    fn sample_streams_differ() {
        use rand::Rng;
        let a: u64 = sample_rng(1, 0).random();
        let b: u64 = sample_rng(1, 1).random();
        let c: u64 = sample_rng(1, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
