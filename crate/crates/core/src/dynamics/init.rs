use num_complex::Complex64 as C64;

use super::state::{FieldOnlyState, OneExcitationState, PairAmplitudes, TwoExcitationState};
use crate::error::{invalid, Error, Result};
use crate::model::{gaussian_weight, CavityModel, WavePacketSpec};

/// A state rescaled to unit norm, with the norm it had before rescaling.
#[derive(Clone, Debug)]
pub struct Normalized<S> {
    pub state: S,
    /// `sqrt(<psi|psi>)` of the unnormalized construction.
    pub norm: f64,
}

/// Below this squared norm a constructed state is considered degenerate.
const DEGENERATE_NORM: f64 = 1e-8;

/// Single-photon Gaussian packet at `t = 0`.
pub fn packet_state(model: &CavityModel, spec: &WavePacketSpec) -> Result<FieldOnlyState> {
    Ok(FieldOnlyState { time: 0.0, amplitudes: gaussian_weight(spec, model)? })
}

/// Atom excited, field in vacuum.
pub fn init_excited_atom(model: &CavityModel) -> OneExcitationState {
    OneExcitationState { time: 0.0, atom: C64::new(1.0, 0.0), field: vec![C64::new(0.0, 0.0); model.modes()] }
}

/// Excited atom plus one photon: `D_n = A_n`.
pub fn init_photon_plus_excited_atom(
    model: &CavityModel,
    spec: &WavePacketSpec,
) -> Result<TwoExcitationState> {
    if (spec.carrier - model.atom_frequency()).abs() > spec.width {
        log::warn!(
            "packet carrier {} is more than one width away from the atomic resonance {}",
            spec.carrier,
            model.atom_frequency()
        );
    }
    let mut s = TwoExcitationState::vacuum_like(model.modes());
    s.excited = gaussian_weight(spec, model)?;
    Ok(s)
}

fn check_lengths(model: &CavityModel, a: &[C64], b: &[C64]) -> Result<()> {
    if a.len() != model.modes() || b.len() != model.modes() {
        return Err(invalid(
            "amplitudes",
            format!("expected {} modes, got {} and {}", model.modes(), a.len(), b.len()),
        ));
    }
    Ok(())
}

fn normalize(mut s: TwoExcitationState) -> Result<Normalized<TwoExcitationState>> {
    let n2 = s.norm_sqr();
    if !(n2 >= DEGENERATE_NORM) {
        return Err(Error::DegenerateState { norm: n2 });
    }
    let norm = n2.sqrt();
    s.scale(1.0 / norm);
    Ok(Normalized { state: s, norm })
}

/// Two distinguishable packets `W1^+ W2^+ |g,0>` with the atom in the ground state.
///
/// `E_n = sqrt2 w1_n w2_n`, `F_nm = w1_n w2_m + w1_m w2_n`. The raw norm is
/// `1 + |<w1|w2>|^2` for unit packets, so overlapping packets come back rescaled.
pub fn init_two_photons(
    model: &CavityModel,
    w1: &[C64],
    w2: &[C64],
) -> Result<Normalized<TwoExcitationState>> {
    check_lengths(model, w1, w2)?;
    let n = model.modes();
    let s = TwoExcitationState {
        time: 0.0,
        excited: vec![C64::new(0.0, 0.0); n],
        doubled: w1.iter().zip(w2).map(|(a, b)| std::f64::consts::SQRT_2 * a * b).collect(),
        pairs: PairAmplitudes::from_fn(n, |i, j| w1[i] * w2[j] + w1[j] * w2[i]),
    };
    normalize(s)
}

/// Phase-coherent pair `(W1^+ + e^{i phi} W2^+)^2 |g,0>`, normalized.
///
/// With `u = w1 + e^{i phi} w2` this is `E_n = sqrt2 u_n^2`, `F_nm = 2 u_n u_m`.
/// Two well separated unit packets give a raw norm of `sqrt 8`.
pub fn init_phase_coherent_double(
    model: &CavityModel,
    w1: &[C64],
    w2: &[C64],
    phi: f64,
) -> Result<Normalized<TwoExcitationState>> {
    check_lengths(model, w1, w2)?;
    if !phi.is_finite() {
        return Err(invalid("phi", "must be finite"));
    }
    let phase = C64::from_polar(1.0, phi.rem_euclid(std::f64::consts::TAU));
    let u: Vec<C64> = w1.iter().zip(w2).map(|(a, b)| a + phase * b).collect();
    let n = model.modes();
    let s = TwoExcitationState {
        time: 0.0,
        excited: vec![C64::new(0.0, 0.0); n],
        doubled: u.iter().map(|v| std::f64::consts::SQRT_2 * v * v).collect(),
        pairs: PairAmplitudes::from_fn(n, |i, j| 2.0 * u[i] * u[j]),
    };
    normalize(s)
}
