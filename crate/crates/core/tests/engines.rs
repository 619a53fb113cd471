mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::rabi_formula;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinchain::compiler::{compile_grover, compile_hadamard, compile_oracle, compile_s0, Strategy};
use spinchain::experiments::rabi_for_2pik;
use spinchain::propagation::rk4::{required_steps, MIN_POINTS_PER_PERIOD};
use spinchain::propagation::{
    exact_pulse_apply, ideal_pulse_apply, rk4_reference_apply, run_program, Coupling, ExactEngine, Mode,
};
use spinchain::{BasisIndex, ChainParameters, GroverSpec, PulseProgram, PulseSpec, StateVector};

fn random_state(seed: u64) -> StateVector {
    StateVector::haar_random(4, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Drive tuned to qubit 0 with both neighbours up; |0100⟩ ↔ |0101⟩ sits 2J'
/// away because its second neighbour is flipped.
fn detuned_pair_excitation(rabi: f64, angle: f64, t0: f64) -> f64 {
    let params = ChainParameters::default();
    let mut engine = ExactEngine::with_coupling(&params, Coupling::NearResonant(1.0));
    let pulse = PulseSpec::new(0, 1, 1, 0.3, angle, rabi);
    let out = engine.apply(&pulse, t0, &StateVector::basis(4, BasisIndex(0b0100))).unwrap();
    out.probability(BasisIndex(0b0101))
}

#[test]
fn detuned_pair_follows_rabi_formula() {
    for rabi in [0.05, 0.1, 0.255, 0.6] {
        for angle in [FRAC_PI_2, PI, 2.0 * PI, 5.3] {
            for t0 in [0.0, 123.0, 5000.0] {
                let got = detuned_pair_excitation(rabi, angle, t0);
                let want = rabi_formula(rabi, 0.8, angle / rabi);
                assert!((got - want).abs() < 1e-10, "Ω={rabi} ϑ={angle} t0={t0}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn two_pi_k_point_suppresses_excitation() {
    let rabi = rabi_for_2pik(0.8, 4);
    assert!(detuned_pair_excitation(rabi, PI, 0.0) <= 1e-10);
    // away from the 2πk point the excitation is visible
    assert!(detuned_pair_excitation(0.12, PI, 0.0) > 1e-3);
}

#[test]
fn exact_and_rk4_agree_on_single_gates() {
    let params = ChainParameters::default();
    let rabi = rabi_for_2pik(0.8, 4);
    let mut gates: Vec<Vec<PulseSpec>> = vec![
        vec![PulseSpec::new(2, 0, 1, FRAC_PI_2, FRAC_PI_2, rabi)],
        compile_s0(&params, rabi).unwrap(),
        vec![compile_oracle(&params, 13, rabi).unwrap()],
    ];
    for k in [0, 2, 3] {
        gates.push(compile_hadamard(&params, k, Strategy::Split, rabi).unwrap());
    }
    for (i, gate) in gates.into_iter().enumerate() {
        let mut program = PulseProgram::new();
        program.push_segment("gate", gate);
        let psi = random_state(i as u64);
        let exact = run_program(&params, &program, &psi, Mode::Exact).unwrap();
        let rk4 = run_program(&params, &program, &psi, Mode::Rk4).unwrap();
        let d = exact.last().unwrap().1.distance(&rk4.last().unwrap().1);
        assert!(d < 1e-6, "gate {i}: {d}");
    }
}

#[test]
fn rk4_error_shrinks_sixteenfold() {
    let params = ChainParameters::default();
    let pulse = PulseSpec::new(0, 1, 1, PI, FRAC_PI_2, 0.2);
    let psi = random_state(11);
    let exact = exact_pulse_apply(&params, &pulse, 37.0, &psi).unwrap();
    let n = required_steps(&params, &pulse, MIN_POINTS_PER_PERIOD);
    let e1 = rk4_reference_apply(&params, &pulse, 37.0, &psi, n).unwrap().distance(&exact);
    let e2 = rk4_reference_apply(&params, &pulse, 37.0, &psi, 2 * n).unwrap().distance(&exact);
    let ratio = e1 / e2;
    assert!(e2 > 1e-12, "error floor reached: {e2}");
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio} ({e1} / {e2})");
}

#[test]
fn norm_is_preserved_over_the_full_program() {
    let params = ChainParameters::default();
    let spec = GroverSpec::new(13, 2, Strategy::Split, rabi_for_2pik(0.8, 4)).unwrap();
    let program = compile_grover(&params, &spec).unwrap();
    assert_eq!(program.len(), 362);
    for mode in [Mode::Ideal, Mode::Exact] {
        let traj = run_program(&params, &program, &random_state(5), mode).unwrap();
        let mut prev = 1.0;
        for (_, s) in &traj {
            let norm = s.norm_sqr();
            assert!((norm - prev).abs() < 1e-12, "{mode}");
            assert!((norm - 1.0).abs() < 1e-9, "{mode}");
            prev = norm;
        }
    }
}

#[test]
fn rk4_norm_per_pulse() {
    let params = ChainParameters::default();
    let mut program = PulseProgram::new();
    program.push_segment("H0", compile_hadamard(&params, 0, Strategy::Split, 0.1).unwrap());
    let traj = run_program(&params, &program, &random_state(8), Mode::Rk4).unwrap();
    for w in traj.windows(2) {
        assert!((w[1].1.norm_sqr() - w[0].1.norm_sqr()).abs() < 1e-12);
    }
}

#[test]
fn resonant_only_exact_equals_ideal_per_pulse() {
    let params = ChainParameters::default();
    let spec = GroverSpec::new(5, 2, Strategy::Split, rabi_for_2pik(0.8, 3)).unwrap();
    let program = compile_grover(&params, &spec).unwrap();
    let mut engine = ExactEngine::with_coupling(&params, Coupling::ResonantOnly);
    let mut state = random_state(21);
    let mut worst = 0.0f64;
    for (pulse, &t0) in program.pulses().iter().zip(program.start_times()) {
        let ideal = ideal_pulse_apply(&params, pulse, &state).unwrap();
        let exact = engine.apply(pulse, t0, &state).unwrap();
        worst = worst.max(ideal.distance(&exact));
        state = ideal;
    }
    assert!(worst < 1e-10, "{worst}");
}
