//! Optical Bloch equations for a two-level emitter driven by classical pulses.
//!
//! Time and rates may be in any consistent unit system: the dimensionless
//! cavity units or SI seconds for the nuclear case.

mod perturbative;

pub use perturbative::{
    perturbative_terms, stimulated_count, t_int_from_loss, PerturbativeBreakdown, QUADRATURE_INTERVALS,
};

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::integrate::{step_plan, ComplexOde, Rk4};

/// Largest allowed `dt * sigma c`.
pub const PULSE_RESOLUTION: f64 = 1.0 / 20.0;

/// Largest tolerated `|tr rho - 1|`.
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// A complex field envelope `E0(t)` acting on the atom.
pub trait Envelope: Sync {
    fn field(&self, t: f64) -> C64;
    /// Inverse temporal width `sigma c` of the narrowest pulse.
    fn inverse_width(&self) -> f64;
}

/// Two Gaussian pulses `E0 [s1 g(t - L1) + s2 g(t - L2) e^{i phi}]`, `g(t) = exp(-(t sigma c)^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulsePair {
    /// Common amplitude `E0`.
    pub amplitude: f64,
    /// `sigma c`; the pulses are `exp(-(t - Lambda)^2 (sigma c)^2)`.
    pub sigma: f64,
    pub first_center: f64,
    pub second_center: f64,
    /// Relative phase of the second pulse.
    pub phase: f64,
    pub first_scale: f64,
    pub second_scale: f64,
}

impl PulsePair {
    pub fn new(amplitude: f64, sigma: f64, first_center: f64, second_center: f64, phase: f64) -> Self {
        Self { amplitude, sigma, first_center, second_center, phase, first_scale: 1.0, second_scale: 1.0 }
    }

    pub fn delay(&self) -> f64 {
        self.second_center - self.first_center
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(invalid("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if !(self.second_center > self.first_center) {
            return Err(invalid("second_center", "the second pulse must arrive after the first"));
        }
        if !(self.amplitude.is_finite() && self.first_scale >= 0.0 && self.second_scale >= 0.0) {
            return Err(invalid("amplitude", "amplitude and scales must be finite and non-negative"));
        }
        Ok(())
    }

    /// The first pulse alone.
    pub fn first(&self) -> SinglePulse {
        SinglePulse {
            amplitude: self.amplitude * self.first_scale,
            sigma: self.sigma,
            center: self.first_center,
            phase: 0.0,
        }
    }

    /// The second pulse alone, carrying the relative phase.
    pub fn second(&self) -> SinglePulse {
        SinglePulse {
            amplitude: self.amplitude * self.second_scale,
            sigma: self.sigma,
            center: self.second_center,
            phase: self.phase,
        }
    }
}

impl Envelope for PulsePair {
    fn field(&self, t: f64) -> C64 {
        self.first().field(t) + self.second().field(t)
    }
    fn inverse_width(&self) -> f64 {
        self.sigma
    }
}

/// One Gaussian pulse `E0 exp(-(t - center)^2 (sigma c)^2 + i phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinglePulse {
    pub amplitude: f64,
    pub sigma: f64,
    pub center: f64,
    pub phase: f64,
}

impl SinglePulse {
    /// Real envelope without the phase factor.
    pub fn magnitude(&self, t: f64) -> f64 {
        let x = (t - self.center) * self.sigma;
        self.amplitude * (-x * x).exp()
    }

    /// `int E0(t) dt` over all times, without the phase.
    pub fn area(&self) -> f64 {
        self.amplitude * PI.sqrt() / self.sigma
    }
}

impl Envelope for SinglePulse {
    fn field(&self, t: f64) -> C64 {
        C64::from_polar(self.magnitude(t), self.phase)
    }
    fn inverse_width(&self) -> f64 {
        self.sigma
    }
}

/// How the field energy fixes the pulse amplitude.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyConvention {
    /// Each pulse of unit scale carries `n_res hbar omega0`.
    #[default]
    PerPulse,
    /// The whole two-pulse field, interference included, carries `2 n_res hbar omega0`.
    TwoPulseTotal,
}

/// Amplitude `E0` of a 1D Gaussian pulse pair holding `n_res` resonant photons per pulse.
///
/// With the carrier average `cos^2 -> 1/2` one pulse of amplitude `E0` stores
/// `eps0 A E0^2 sqrt(pi/2) / (2 sigma)` (natural units, `eps0 = hbar = c = 1`).
pub fn normalize_amplitude_1d(
    n_res: f64,
    beam_area: f64,
    sigma: f64,
    omega0: f64,
    pulses: &PulsePair,
    convention: EnergyConvention,
) -> Result<f64> {
    for (name, v) in [("n_res", n_res), ("beam_area", beam_area), ("sigma", sigma), ("omega0", omega0)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(name, format!("must be positive, got {v}")));
        }
    }
    let unit = (PI / 2.0).sqrt() / (2.0 * sigma);
    let (energy, weight) = match convention {
        EnergyConvention::PerPulse => (n_res * omega0, unit),
        EnergyConvention::TwoPulseTotal => {
            let (s1, s2) = (pulses.first_scale, pulses.second_scale);
            let tau = pulses.delay();
            let overlap = (-0.5 * (tau * sigma).powi(2)).exp() * pulses.phase.cos();
            (2.0 * n_res * omega0, unit * (s1 * s1 + s2 * s2 + 2.0 * s1 * s2 * overlap))
        }
    };
    if !(weight > 0.0) {
        return Err(invalid("pulses", "the pulse pair carries no energy"));
    }
    Ok((energy / (beam_area * weight)).sqrt())
}

/// Atom-side parameters of the Bloch equations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    pub decay_rate: f64,
    /// `Delta = omega_A - omega_0`.
    pub detuning: f64,
    /// `d_eg`, so that `Omega(t) = d_eg E0(t)`.
    pub dipole: f64,
}

/// A two-level density matrix; `rho21 = conj(rho12)` is implied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityState {
    pub time: f64,
    pub rho11: f64,
    pub rho12: C64,
    pub rho22: f64,
}

impl DensityState {
    pub fn ground(time: f64) -> Self {
        Self { time, rho11: 1.0, rho12: C64::new(0.0, 0.0), rho22: 0.0 }
    }

    pub fn excited(time: f64) -> Self {
        Self { time, rho11: 0.0, rho12: C64::new(0.0, 0.0), rho22: 1.0 }
    }

    pub fn rho21(&self) -> C64 {
        self.rho12.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22
    }

    /// `tr rho^2`
    pub fn purity(&self) -> f64 {
        self.rho11 * self.rho11 + self.rho22 * self.rho22 + 2.0 * self.rho12.norm_sqr()
    }

    /// Eigenvalues of the Hermitian 2x2 matrix, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * self.trace();
        let r = (0.25 * (self.rho11 - self.rho22).powi(2) + self.rho12.norm_sqr()).sqrt();
        (mean - r, mean + r)
    }
}

/// Sampled Bloch-equation trajectory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObeTrajectory {
    pub states: Vec<DensityState>,
}

impl ObeTrajectory {
    pub fn last(&self) -> &DensityState {
        self.states.last().expect("trajectory has at least the initial state")
    }

    pub fn excited_population(&self) -> crate::series::TimeSeries {
        crate::series::TimeSeries::new(
            self.states.iter().map(|s| s.time).collect(),
            self.states.iter().map(|s| s.rho22).collect(),
        )
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.states.iter().fold(0.0, |m, s| m.max((s.trace() - 1.0).abs()))
    }
}

struct Bloch<'a, E: ?Sized> {
    atom: AtomParams,
    envelope: &'a E,
}

impl<E: Envelope + ?Sized> ComplexOde for Bloch<'_, E> {
    fn dim(&self) -> usize {
        3
    }

    /// `x = (rho11, rho12, rho22)`; the populations live in the real parts.
    fn derivative(&self, t: f64, x: &[C64], dx: &mut [C64]) {
        let AtomParams { decay_rate: g, detuning, dipole } = self.atom;
        let omega = dipole * self.envelope.field(t);
        let i = C64::new(0.0, 1.0);
        let (r11, r12, r22) = (x[0].re, x[1], x[2].re);
        // -(i Omega / 2) rho12 + c.c.
        let drive = 2.0 * (-0.5 * i * omega * r12).re;
        let d22 = drive - g * r22;
        dx[0] = C64::new(-d22, 0.0);
        dx[1] = 0.5 * i * omega.conj() * (r11 - r22) - (0.5 * g + i * detuning) * r12;
        dx[2] = C64::new(d22, 0.0);
    }
}

/// Integrates the Bloch equations from `init.time` to `t_end`.
pub fn evolve_obe<E: Envelope + ?Sized>(
    atom: &AtomParams,
    envelope: &E,
    init: &DensityState,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<ObeTrajectory> {
    let sc = envelope.inverse_width();
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    if dt * sc > PULSE_RESOLUTION {
        return Err(Error::StepTooLarge { dt, product: dt * sc, limit: PULSE_RESOLUTION });
    }
    let ode = Bloch { atom: *atom, envelope };
    let mut x = [C64::new(init.rho11, 0.0), init.rho12, C64::new(init.rho22, 0.0)];
    let unpack = |t: f64, x: &[C64; 3]| DensityState { time: t, rho11: x[0].re, rho12: x[1], rho22: x[2].re };
    let (steps, h) = step_plan(init.time, t_end, dt);
    let stride = stride.max(1);
    let mut rk = Rk4::new(3);
    let mut out = ObeTrajectory { states: vec![*init] };
    let tr0 = init.trace();
    for k in 0..steps {
        rk.step(&ode, init.time + k as f64 * h, h, &mut x);
        let done = k + 1 == steps;
        if (k + 1) % stride == 0 || done {
            let t = if done { t_end } else { init.time + (k + 1) as f64 * h };
            let s = unpack(t, &x);
            let drift = (s.trace() - tr0).abs();
            if drift > TRACE_TOLERANCE || !drift.is_finite() {
                return Err(Error::TraceDrift { drift, limit: TRACE_TOLERANCE, suggested_dt: 0.5 * h });
            }
            out.states.push(s);
        }
    }
    Ok(out)
}

/// Reduces a phase to `[0, 2 pi)`.
pub fn wrap_phase(phi: f64) -> f64 {
    phi.rem_euclid(TAU)
}
