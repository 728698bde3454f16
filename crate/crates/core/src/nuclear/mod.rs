//! Stimulated-emission estimates for Mössbauer nuclei driven by x-ray pulse pairs.
//!
//! Everything here is in SI units. The nuclear exciton is treated as a
//! two-level system with superradiantly scaled Rabi frequency and decay rate.

pub mod constants;

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::semiclassical::{
    evolve_obe, perturbative_terms, stimulated_count, AtomParams, DensityState, ObeTrajectory,
    PerturbativeBreakdown, PulsePair,
};
use constants::{ATOMIC_MASS, ELECTRON_VOLT, EPSILON_0, HBAR, SPEED_OF_LIGHT};

/// Broadband approximation needs the pulse spectrum this much wider than the line.
pub const BROADBAND_RATIO_LIMIT: f64 = 100.0;

/// Decades of population decay covered by the signal window.
pub const SIGNAL_DECADES: f64 = 10.0;

/// A ⁵⁷Fe layer in a thin-film x-ray cavity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NuclearTarget {
    /// Single-nucleus decay rate in 1/s.
    pub decay_rate: f64,
    /// Transition dipole moment in C m.
    pub dipole: f64,
    /// Transition energy in eV.
    pub transition_energy: f64,
    /// Grazing angle in rad.
    pub grazing_angle: f64,
    /// Beam diameter in m; no published value.
    pub beam_width: f64,
    /// Physical thickness of the resonant layer in m.
    pub layer_thickness: f64,
    /// Cavity quality factor, `0 < Q < 100`.
    pub quality_factor: f64,
    /// Mass density in kg/m³.
    pub density: f64,
    /// Mass of one nucleus in kg.
    pub nucleus_mass: f64,
    /// Nuclei per coherence volume.
    pub coherent_nuclei: f64,
}

impl Default for NuclearTarget {
    fn default() -> Self {
        Self {
            decay_rate: 7.1e6,
            dipole: 1.3e-35,
            transition_energy: 14.4e3,
            grazing_angle: 2.5e-3,
            beam_width: 10e-6,
            layer_thickness: 1.2e-9,
            quality_factor: 50.0,
            density: 7874.0,
            nucleus_mass: 56.94 * ATOMIC_MASS,
            coherent_nuclei: 25.0,
        }
    }
}

impl NuclearTarget {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("decay_rate", self.decay_rate),
            ("dipole", self.dipole),
            ("transition_energy", self.transition_energy),
            ("grazing_angle", self.grazing_angle),
            ("beam_width", self.beam_width),
            ("layer_thickness", self.layer_thickness),
            ("density", self.density),
            ("nucleus_mass", self.nucleus_mass),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.quality_factor > 0.0 && self.quality_factor < 100.0) {
            return Err(invalid(
                "quality_factor",
                format!("must lie in (0, 100), got {}", self.quality_factor),
            ));
        }
        if !(self.coherent_nuclei >= 1.0) {
            return Err(invalid(
                "coherent_nuclei",
                format!("must be at least 1, got {}", self.coherent_nuclei),
            ));
        }
        Ok(())
    }

    /// Transition angular frequency in rad/s.
    pub fn angular_frequency(&self) -> f64 {
        self.transition_energy * ELECTRON_VOLT / HBAR
    }

    pub fn lifetime(&self) -> f64 {
        1.0 / self.decay_rate
    }

    /// `hbar Gamma_A` in eV.
    pub fn linewidth(&self) -> f64 {
        HBAR * self.decay_rate / ELECTRON_VOLT
    }

    /// `d_beam^2`
    pub fn beam_area(&self) -> f64 {
        self.beam_width * self.beam_width
    }

    /// Footprint on the film at grazing incidence, `d_beam^2 / sin(phi)`.
    pub fn target_area(&self) -> f64 {
        self.beam_area() / self.grazing_angle.sin()
    }

    /// Layer thickness seen by a photon bouncing inside the cavity.
    pub fn effective_thickness(&self) -> f64 {
        self.layer_thickness * self.quality_factor
    }

    /// Irradiated nuclei `N_n`.
    pub fn irradiated_nuclei(&self) -> f64 {
        self.density * self.target_area() * self.effective_thickness() / self.nucleus_mass
    }

    /// Coherence volumes `M_coh = N_n / N_coh`.
    pub fn coherence_volumes(&self) -> f64 {
        self.irradiated_nuclei() / self.coherent_nuclei
    }

    /// `Gamma_Ncoh = N_coh Gamma_A`
    pub fn collective_rate(&self) -> f64 {
        self.coherent_nuclei * self.decay_rate
    }
}

/// An x-ray pulse pair; both pulses share duration and carrier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct XrayPulseSpec {
    /// FWHM duration `T_P` in s.
    pub duration: f64,
    /// Resonant photons in the first pulse.
    pub resonant_photons: f64,
    /// Separation `tau_d` of the pulse centres in s.
    pub delay: f64,
    /// Relative phase of the second pulse.
    pub phase: f64,
    /// Resonant photons of the second pulse relative to the first.
    pub second_photon_fraction: f64,
}

impl Default for XrayPulseSpec {
    fn default() -> Self {
        Self::fel()
    }
}

impl XrayPulseSpec {
    /// Free-electron-laser pulses: 100 fs, 5 ps apart, equal intensity.
    pub fn fel() -> Self {
        Self {
            duration: 100e-15,
            resonant_photons: 1.0,
            delay: 5e-12,
            phase: PI,
            second_photon_fraction: 1.0,
        }
    }

    /// Synchrotron-like bunches: 100 ps, 8 ns apart, second pulse with a quarter of the photons.
    pub fn synchrotron() -> Self {
        Self {
            duration: 100e-12,
            resonant_photons: 1.0,
            delay: 8e-9,
            phase: PI,
            second_photon_fraction: 0.25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in
            [("duration", self.duration), ("resonant_photons", self.resonant_photons), ("delay", self.delay)]
        {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.second_photon_fraction.is_finite() && self.second_photon_fraction >= 0.0) {
            return Err(invalid("second_photon_fraction", "must be finite and non-negative"));
        }
        if !self.phase.is_finite() {
            return Err(invalid("phase", "must be finite"));
        }
        Ok(())
    }

    /// `sigma_t = T_P / (2 sqrt(ln 2))`
    pub fn sigma_t(&self) -> f64 {
        self.duration / (2.0 * LN_2.sqrt())
    }

    /// `sigma_omega = 1 / sigma_t`
    pub fn sigma_omega(&self) -> f64 {
        1.0 / self.sigma_t()
    }

    /// `W_P = (2 sqrt(ln 2))^2 / T_P` in rad/s.
    pub fn spectral_width(&self) -> f64 {
        4.0 * LN_2 / self.duration
    }

    /// Support of one pulse, `4 sqrt2 sigma_t`; used as the interaction window.
    pub fn support(&self) -> f64 {
        4.0 * 2f64.sqrt() * self.sigma_t()
    }
}

/// Peak field of the resonant part of a broadband pulse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BroadbandAmplitude {
    /// `E0` in V/m.
    pub amplitude: f64,
    /// `W_P / Gamma_A`
    pub spectral_ratio: f64,
}

/// Field amplitude whose spectral overlap with the line carries `n_res` photons.
pub fn broadband_amplitude(spec: &XrayPulseSpec, target: &NuclearTarget) -> Result<BroadbandAmplitude> {
    spec.validate()?;
    target.validate()?;
    let collective = spec.spectral_width() / target.collective_rate();
    if collective < BROADBAND_RATIO_LIMIT {
        log::warn!(
            "pulse bandwidth is only {collective:.1} collective linewidths; the broadband overlap approximation is poor"
        );
    }
    let st = spec.sigma_t();
    let energy = spec.resonant_photons * HBAR * target.angular_frequency();
    let amplitude =
        (energy / (SPEED_OF_LIGHT * target.target_area() * EPSILON_0 * target.decay_rate * st * st)).sqrt();
    Ok(BroadbandAmplitude { amplitude, spectral_ratio: spec.spectral_width() / target.decay_rate })
}

/// Three-dimensional Wigner-Weisskopf rate `omega^3 |d|^2 / (3 pi eps0 hbar c^3)`.
pub fn wigner_weisskopf_3d(angular_frequency: f64, dipole: f64) -> f64 {
    angular_frequency.powi(3) * dipole * dipole / (3.0 * PI * EPSILON_0 * HBAR * SPEED_OF_LIGHT.powi(3))
}

/// `(sqrt(N_coh) Omega, N_coh Gamma_A)`
pub fn collective_scale(target: &NuclearTarget, rabi: f64) -> (f64, f64) {
    (rabi * target.coherent_nuclei.sqrt(), target.collective_rate())
}

/// Start and end of the delayed-emission window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalWindow {
    pub start: f64,
    pub end: f64,
}

impl SignalWindow {
    /// `T_start = tau_d + T_P`, `T_end = ln(10^10) / Gamma_Ncoh`.
    pub fn for_pulses(spec: &XrayPulseSpec, target: &NuclearTarget) -> Self {
        Self {
            start: spec.delay + spec.duration,
            end: SIGNAL_DECADES * std::f64::consts::LN_10 / target.collective_rate(),
        }
    }
}

/// Emitted light between `T_start` and `T_end` with the population frozen at `T_start`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayedSignal {
    pub value: f64,
    pub window: SignalWindow,
}

/// `M_coh rho22(T_start) (e^{-G T_start} - e^{-G T_end}) / (G (T_end - T_start))`
pub fn delayed_signal(
    rho22_start: f64,
    target: &NuclearTarget,
    window: SignalWindow,
) -> Result<DelayedSignal> {
    let SignalWindow { start, end } = window;
    if !(end > start) {
        return Err(invalid("window", format!("T_end {end} must exceed T_start {start}")));
    }
    let g = target.collective_rate();
    let integral = ((-g * start).exp() - (-g * end).exp()) / g;
    Ok(DelayedSignal { value: target.coherence_volumes() * rho22_start * integral / (end - start), window })
}

/// `D_ref - D_signal`: positive for stimulated emission, negative for absorption.
pub fn delta_d(reference: &DelayedSignal, signal: &DelayedSignal) -> Result<f64> {
    let (a, b) = (reference.window, signal.window);
    if a != b {
        return Err(Error::WindowMismatch { a_start: a.start, a_end: a.end, b_start: b.start, b_end: b.end });
    }
    Ok(reference.value - signal.value)
}

/// Stimulated photons summed over all coherence volumes.
pub fn stimulated_event_rate(breakdown: &PerturbativeBreakdown, target: &NuclearTarget) -> f64 {
    target.coherence_volumes() * stimulated_count(breakdown)
}

/// Everything computed for one double-pulse configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuclearReport {
    pub target: NuclearTarget,
    pub pulses: XrayPulseSpec,
    pub target_area: f64,
    pub effective_thickness: f64,
    pub irradiated_nuclei: f64,
    pub coherence_volumes: f64,
    pub collective_rate: f64,
    pub amplitude: f64,
    pub spectral_ratio: f64,
    /// Collective peak Rabi frequency of the first pulse.
    pub rabi_peak: f64,
    pub window: SignalWindow,
    pub rho22_reference: f64,
    pub rho22_signal: f64,
    pub d_reference: f64,
    pub d_signal: f64,
    pub delta_d: f64,
    pub breakdown: PerturbativeBreakdown,
    pub stimulated_photons: f64,
    pub events: f64,
    #[serde(skip)]
    pub signal_trajectory: ObeTrajectory,
    #[serde(skip)]
    pub reference_trajectory: ObeTrajectory,
}

/// Integration settings for [`double_pulse`], in units of `sigma_t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuclearIntegration {
    /// Step size as a fraction of `sigma_t`.
    pub step: f64,
    /// The first pulse starts this many `sigma_t` before its centre.
    pub lead: f64,
    pub stride: usize,
}

impl Default for NuclearIntegration {
    fn default() -> Self {
        Self { step: 1.0 / 40.0, lead: 8.0, stride: 20 }
    }
}

/// Runs the exciting pulse alone and the full pair, then evaluates `Delta D` and the event count.
pub fn double_pulse(
    target: &NuclearTarget,
    spec: &XrayPulseSpec,
    integ: &NuclearIntegration,
) -> Result<NuclearReport> {
    let field = broadband_amplitude(spec, target)?;
    let st = spec.sigma_t();
    let (_, gamma) = collective_scale(target, 0.0);
    // Omega carries sqrt(N_coh); fold it into the dipole so Omega(t) = d E0(t)
    let atom = AtomParams {
        decay_rate: gamma,
        detuning: 0.0,
        dipole: target.dipole * target.coherent_nuclei.sqrt() / HBAR,
    };
    // exp(-t^2 / (2 sigma_t^2)) == exp(-t^2 (sigma c)^2)
    let mut pair = PulsePair::new(field.amplitude, 1.0 / (2f64.sqrt() * st), 0.0, spec.delay, spec.phase);
    pair.second_scale = spec.second_photon_fraction.sqrt();
    pair.validate()?;
    let mut single = pair;
    single.second_scale = 0.0;

    let window = SignalWindow::for_pulses(spec, target);
    if !(window.end > window.start) {
        return Err(invalid("delay", "the pulses end after the signal window closes"));
    }
    let dt = integ.step * st;
    let t0 = -integ.lead * st;
    let init = DensityState::ground(t0);
    if spec.delay < spec.support() {
        return Err(invalid(
            "delay",
            format!("pulses {:e} s apart overlap; need at least {:e} s", spec.delay, spec.support()),
        ));
    }
    let t_int = spec.delay - 0.5 * spec.support();

    let first_leg = evolve_obe(&atom, &single, &init, t_int, dt, integ.stride)?;
    let rho_int = *first_leg.last();
    let second_leg = evolve_obe(&atom, &single, &rho_int, window.start, dt, integ.stride)?;
    let mut reference = first_leg;
    reference.states.extend_from_slice(&second_leg.states[1..]);
    let signal = evolve_obe(&atom, &pair, &init, window.start, dt, integ.stride)?;

    let rho22_reference = reference.last().rho22;
    let rho22_signal = signal.last().rho22;
    let d_ref = delayed_signal(rho22_reference, target, window)?;
    let d_sig = delayed_signal(rho22_signal, target, window)?;
    let breakdown = perturbative_terms(&atom, &rho_int, &pair.second(), spec.support())?;
    let stimulated_photons = stimulated_count(&breakdown);

    Ok(NuclearReport {
        target: target.clone(),
        pulses: spec.clone(),
        target_area: target.target_area(),
        effective_thickness: target.effective_thickness(),
        irradiated_nuclei: target.irradiated_nuclei(),
        coherence_volumes: target.coherence_volumes(),
        collective_rate: gamma,
        amplitude: field.amplitude,
        spectral_ratio: field.spectral_ratio,
        rabi_peak: atom.dipole * field.amplitude,
        window,
        rho22_reference,
        rho22_signal,
        d_reference: d_ref.value,
        d_signal: d_sig.value,
        delta_d: delta_d(&d_ref, &d_sig)?,
        breakdown,
        stimulated_photons,
        events: stimulated_event_rate(&breakdown, target),
        signal_trajectory: signal,
        reference_trajectory: reference,
    })
}

/// Forward-emission decay curves on a logarithmic time grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayCurves {
    pub times: Vec<f64>,
    pub reference: Vec<f64>,
    pub signal: Vec<f64>,
}

/// Emitted intensity `Gamma rho22(T_start) exp(-Gamma (t - T_start))` for both runs,
/// jointly scaled so the larger maximum is one.
pub fn decay_curves(report: &NuclearReport, samples: usize) -> DecayCurves {
    let SignalWindow { start, end } = report.window;
    let g = report.collective_rate;
    let samples = samples.max(2);
    let (ls, le) = (start.ln(), end.ln());
    let times: Vec<f64> =
        (0..samples).map(|i| (ls + (le - ls) * i as f64 / (samples - 1) as f64).exp()).collect();
    let peak = report.rho22_reference.max(report.rho22_signal);
    let curve = |rho: f64| -> Vec<f64> {
        times.iter().map(|t| if peak > 0.0 { rho / peak * (-g * (t - start)).exp() } else { 0.0 }).collect()
    };
    DecayCurves { reference: curve(report.rho22_reference), signal: curve(report.rho22_signal), times }
}
