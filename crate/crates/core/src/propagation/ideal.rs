//! Resonant approximation: each pulse acts as a 2×2 rotation on exactly the
//! basis pairs it is tuned to.

use num_complex::Complex64;

use crate::chain::{offsets_unchecked, ChainParameters};
use crate::error::Result;
use crate::pulse::PulseSpec;
use crate::state::StateVector;

/// `R(φ, ϑ)` acting on `(amplitude with α_k = 0, amplitude with α_k = 1)`:
///
/// ```text
/// ⎡ cos(ϑ/2)            i e^{iφ} sin(ϑ/2) ⎤
/// ⎣ i e^{-iφ} sin(ϑ/2)  cos(ϑ/2)          ⎦
/// ```
pub fn rotation(phase: f64, angle: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (angle / 2.0).sin_cos();
    let i = Complex64::i();
    [
        [Complex64::new(c, 0.0), i * Complex64::from_polar(s, phase)],
        [i * Complex64::from_polar(s, -phase), Complex64::new(c, 0.0)],
    ]
}

/// Applies `R(φ, ϑ)` to every `(α_k = 0, α_k = 1)` pair whose neighbour
/// offsets equal the pulse's `(μ, ν)`; every other amplitude is untouched.
pub fn ideal_pulse_apply(params: &ChainParameters, pulse: &PulseSpec, state: &StateVector) -> Result<StateVector> {
    pulse.validate(params)?;
    state.check(params.n())?;
    let mut out = state.clone();
    apply_in_place(params, pulse, out.amplitudes_mut());
    Ok(out)
}

pub(crate) fn apply_in_place(params: &ChainParameters, pulse: &PulseSpec, amps: &mut [Complex64]) {
    let r = rotation(pulse.phase, pulse.angle);
    let bit = 1usize << pulse.k;
    for b0 in (0..amps.len()).filter(|b| b & bit == 0) {
        if offsets_unchecked(params.n(), b0, pulse.k) != (pulse.mu, pulse.nu) {
            continue;
        }
        let b1 = b0 | bit;
        let (a0, a1) = (amps[b0], amps[b1]);
        amps[b0] = r[0][0] * a0 + r[0][1] * a1;
        amps[b1] = r[1][0] * a0 + r[1][1] * a1;
    }
}
