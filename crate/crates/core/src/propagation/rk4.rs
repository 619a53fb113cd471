//! Fixed-step RK4 integration of `i dψ/dt = H_I(t) ψ` in the interaction
//! picture. Used only to cross-check the closed-form engine.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::chain::{transition_frequency, BasisIndex, ChainParameters};
use crate::error::{Error, Result};
use crate::pulse::PulseSpec;
use crate::state::StateVector;

/// Minimum samples per period of the fastest phase in `H_I(t)`.
pub const MIN_POINTS_PER_PERIOD: f64 = 20.0;

/// Step density used by [`crate::propagation::run_program`] in RK4 mode.
pub const DEFAULT_POINTS_PER_PERIOD: f64 = 128.0;

/// One driven flip `b0 ↔ b1` with interaction-picture detuning `w − ω(b0→b1)`.
struct DrivenPair {
    b0: usize,
    b1: usize,
    detuning: f64,
}

fn driven_pairs(params: &ChainParameters, w: f64) -> Vec<DrivenPair> {
    let mut pairs = Vec::new();
    for k in 0..params.n() {
        for b0 in (0..params.dim()).filter(|b| b & (1 << k) == 0) {
            let omega = transition_frequency(params, BasisIndex(b0), k).expect("index in range");
            pairs.push(DrivenPair {
                b0,
                b1: b0 | (1 << k),
                detuning: w - omega,
            });
        }
    }
    pairs
}

/// Steps needed for [`MIN_POINTS_PER_PERIOD`] samples per fastest period.
pub fn required_steps(params: &ChainParameters, pulse: &PulseSpec, points_per_period: f64) -> usize {
    let w = pulse.frequency(params);
    let fastest = driven_pairs(params, w)
        .iter()
        .map(|p| p.detuning.abs())
        .fold(0.0, f64::max);
    let periods = pulse.duration() * fastest / TAU;
    ((periods * points_per_period).ceil() as usize).max(1)
}

/// Fails with [`Error::StepTooCoarse`] when `step_count` undersamples the
/// fastest oscillation.
pub fn check_sampling(params: &ChainParameters, pulse: &PulseSpec, step_count: usize) -> Result<()> {
    let required = required_steps(params, pulse, MIN_POINTS_PER_PERIOD);
    if step_count < required {
        Err(Error::StepTooCoarse {
            steps: step_count,
            required,
        })
    } else {
        Ok(())
    }
}

/// Integrates one pulse started at `t0` with `step_count` equal RK4 steps.
///
/// Undersampled step counts are integrated anyway and logged as a warning.
pub fn rk4_reference_apply(
    params: &ChainParameters,
    pulse: &PulseSpec,
    t0: f64,
    state: &StateVector,
    step_count: usize,
) -> Result<StateVector> {
    pulse.validate(params)?;
    state.check(params.n())?;
    if step_count == 0 {
        return Err(Error::StepTooCoarse { steps: 0, required: 1 });
    }
    if let Err(e) = check_sampling(params, pulse, step_count) {
        log::warn!("{e}");
    }

    let psi = integrate_drive(
        params,
        pulse.frequency(params),
        pulse.phase,
        pulse.rabi,
        t0,
        pulse.duration(),
        step_count,
        state.amplitudes(),
    );
    StateVector::from_amplitudes(psi)
}

/// RK4 core for a drive of frequency `w`, phase `φ` and Rabi frequency `Ω`
/// switched on during `[t0, t0 + duration]`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_drive(
    params: &ChainParameters,
    w: f64,
    phase: f64,
    rabi: f64,
    t0: f64,
    duration: f64,
    step_count: usize,
    initial: &[Complex64],
) -> Vec<Complex64> {
    let pairs = driven_pairs(params, w);
    // same sign convention as the exact engine: coupling −(Ω/2) e^{iφ}
    let coupling = -Complex64::from_polar(rabi / 2.0, phase);
    let h = duration / step_count as f64;
    let half_step: Vec<Complex64> = pairs.iter().map(|p| Complex64::cis(p.detuning * h / 2.0)).collect();

    let dim = params.dim();
    let mut psi = initial.to_vec();
    let mut phasors = vec![Complex64::new(0.0, 0.0); pairs.len()];
    let mut k1 = vec![Complex64::new(0.0, 0.0); dim];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();

    // dψ/dt = −i H_I ψ, H_I[b0][b1] = c e^{iδt}, H_I[b1][b0] = conj
    let derivative = |phasors: &[Complex64], psi: &[Complex64], out: &mut [Complex64]| {
        out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for (pair, ph) in pairs.iter().zip(phasors) {
            let el = coupling * ph;
            out[pair.b0] += el * psi[pair.b1];
            out[pair.b1] += el.conj() * psi[pair.b0];
        }
        let minus_i = Complex64::new(0.0, -1.0);
        out.iter_mut().for_each(|x| *x *= minus_i);
    };

    for step in 0..step_count {
        let t = t0 + step as f64 * h;
        for (ph, p) in phasors.iter_mut().zip(&pairs) {
            *ph = Complex64::cis(p.detuning * t);
        }
        derivative(&phasors, &psi, &mut k1);

        phasors.iter_mut().zip(&half_step).for_each(|(p, q)| *p *= q);
        for i in 0..dim {
            tmp[i] = psi[i] + k1[i] * (h / 2.0);
        }
        derivative(&phasors, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = psi[i] + k2[i] * (h / 2.0);
        }
        derivative(&phasors, &tmp, &mut k3);

        phasors.iter_mut().zip(&half_step).for_each(|(p, q)| *p *= q);
        for i in 0..dim {
            tmp[i] = psi[i] + k3[i] * h;
        }
        derivative(&phasors, &tmp, &mut k4);

        for i in 0..dim {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn sampling_check() {
        let params = ChainParameters::default();
        let pulse = PulseSpec::new(0, 1, 1, 0.0, FRAC_PI_2, 0.5);
        let need = required_steps(&params, &pulse, MIN_POINTS_PER_PERIOD);
        assert!(check_sampling(&params, &pulse, need).is_ok());
        assert_eq!(
            check_sampling(&params, &pulse, need - 1),
            Err(Error::StepTooCoarse {
                steps: need - 1,
                required: need
            })
        );
    }

    #[test]
    fn zero_drive_is_identity() {
        let params = ChainParameters::default();
        let psi = StateVector::haar_random(4, &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3));
        let out = integrate_drive(&params, 104.4, 0.3, 0.0, 12.0, 15.0, 500, psi.amplitudes());
        assert_eq!(out, psi.amplitudes());
    }

    #[test]
    fn zero_steps_rejected() {
        let params = ChainParameters::default();
        let pulse = PulseSpec::new(0, 1, 1, 0.0, FRAC_PI_2, 0.5);
        assert!(rk4_reference_apply(&params, &pulse, 0.0, &StateVector::ground(4), 0).is_err());
    }
}
