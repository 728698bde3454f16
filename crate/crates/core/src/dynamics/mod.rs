//! Schrödinger evolution in the fixed-excitation subspaces of the
//! multimode Jaynes-Cummings model.
//!
//! All evolution happens in the interaction picture, where the Hamiltonian
//!
//! ```text
//! H = sum_n Delta_n a_n^+ a_n - sum_n g_n (s+ a_n + s- a_n^+)
//! ```
//!
//! is time independent. Only the detunings and couplings enter, so the step
//! size is set by `max |Delta_n|` and not by the optical carrier.

mod init;
mod state;
mod systems;

pub use init::{
    init_excited_atom, init_phase_coherent_double, init_photon_plus_excited_atom, init_two_photons,
    packet_state, Normalized,
};
pub use state::{pair_count, FieldOnlyState, OneExcitationState, PairAmplitudes, TwoExcitationState};
pub use systems::{OneExcitationOde, TwoExcitationOde};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{step_plan, ComplexOde, Rk4};
use crate::model::CavityModel;
use crate::series::TimeSeries;

/// Step-size, sampling and accuracy settings for the quantum integrators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integration {
    pub dt: f64,
    /// Record a sample every `stride` steps.
    pub stride: usize,
    /// Largest tolerated `|<psi|psi>(t) - <psi|psi>(0)|`.
    pub norm_tolerance: f64,
}

impl Default for Integration {
    fn default() -> Self {
        Self { dt: 0.01, stride: 50, norm_tolerance: 1e-6 }
    }
}

/// `dt * max|Delta_n|` may not exceed this.
pub const STABILITY_LIMIT: f64 = 0.1;

/// Largest working set the two-excitation integrator will allocate.
pub const MEMORY_BUDGET: usize = 8 << 30;

/// Sampled scalar diagnostics of a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Excited-state population `P(t)` (zero for field-only states).
    pub populations: Vec<f64>,
    pub norms: Vec<f64>,
}

impl Trajectory {
    /// Largest deviation of the norm from its initial value.
    pub fn norm_drift(&self) -> f64 {
        let Some(&first) = self.norms.first() else { return 0.0 };
        self.norms.iter().fold(0.0, |m, n| m.max((n - first).abs()))
    }

    pub fn population_series(&self) -> TimeSeries {
        TimeSeries::population(self.times.clone(), self.populations.clone())
    }

    fn push(&mut self, t: f64, population: f64, norm: f64) {
        self.times.push(t);
        self.populations.push(population);
        self.norms.push(norm);
    }
}

/// Final state of a run together with its sampled diagnostics.
#[derive(Clone, Debug)]
pub struct Evolution<S> {
    pub state: S,
    pub trajectory: Trajectory,
}

/// Exact free propagation `A_n(t) = A_n(0) exp(-i omega_n (t - t0))`.
pub fn evolve_free(model: &CavityModel, state: &FieldOnlyState, t: f64) -> FieldOnlyState {
    let dt = t - state.time;
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(model.frequencies())
        .map(|(a, &w)| a * C64::from_polar(1.0, -w * dt))
        .collect();
    FieldOnlyState { time: t, amplitudes }
}

fn check_step(model: &CavityModel, dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(crate::error::invalid("dt", format!("must be positive, got {dt}")));
    }
    let product = dt * model.max_detuning();
    if product > STABILITY_LIMIT {
        return Err(Error::StepTooLarge { dt, product, limit: STABILITY_LIMIT });
    }
    Ok(())
}

/// Drives an ODE from `t0` to `t_end`, sampling every `stride` steps and at the end.
#[allow(clippy::too_many_arguments)]
fn drive<O: ComplexOde>(
    ode: &O,
    x: &mut [C64],
    t0: f64,
    t_end: f64,
    integ: &Integration,
    norm: impl Fn(&[C64]) -> f64,
    population: impl Fn(&[C64]) -> f64,
    mut observe: impl FnMut(f64, &[C64]),
) -> Result<Trajectory> {
    let (steps, h) = step_plan(t0, t_end, integ.dt);
    let stride = integ.stride.max(1);
    let mut rk = Rk4::new(ode.dim());
    let mut traj = Trajectory::default();
    let n0 = norm(x);
    traj.push(t0, population(x), n0);
    observe(t0, x);
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        rk.step(ode, t, h, x);
        let done = i + 1 == steps;
        if (i + 1) % stride == 0 || done {
            let t = if done { t_end } else { t0 + (i + 1) as f64 * h };
            let nrm = norm(x);
            let drift = (nrm - n0).abs();
            if drift > integ.norm_tolerance || !nrm.is_finite() {
                return Err(Error::NormDrift { drift, limit: integ.norm_tolerance, suggested_dt: 0.5 * h });
            }
            traj.push(t, population(x), nrm);
            observe(t, x);
        }
    }
    Ok(traj)
}

/// Integrates the one-excitation amplitudes `(B, C_n)` to `t_end`.
pub fn evolve_one_excitation(
    model: &CavityModel,
    state: &OneExcitationState,
    t_end: f64,
    integ: &Integration,
) -> Result<Evolution<OneExcitationState>> {
    evolve_one_excitation_observed(model, state, t_end, integ, |_| {})
}

/// Like [`evolve_one_excitation`], handing every sampled state to `observer`.
pub fn evolve_one_excitation_observed(
    model: &CavityModel,
    state: &OneExcitationState,
    t_end: f64,
    integ: &Integration,
    mut observer: impl FnMut(&OneExcitationState),
) -> Result<Evolution<OneExcitationState>> {
    check_step(model, integ.dt)?;
    let ode = OneExcitationOde::new(model);
    let mut x = ode.pack(state);
    let trajectory = drive(
        &ode,
        &mut x,
        state.time,
        t_end,
        integ,
        |x| x.iter().map(|v| v.norm_sqr()).sum(),
        |x| x[0].norm_sqr(),
        |t, x| observer(&ode.unpack(t, x)),
    )?;
    Ok(Evolution { state: ode.unpack(t_end, &x), trajectory })
}

fn check_memory(modes: usize) -> Result<()> {
    // state plus five Runge-Kutta buffers
    let bytes = 6 * (2 * modes + pair_count(modes)) * std::mem::size_of::<C64>();
    if bytes > MEMORY_BUDGET {
        return Err(Error::MemoryBound { modes, bytes, limit: MEMORY_BUDGET });
    }
    Ok(())
}

/// Integrates the two-excitation amplitudes `(D_n, E_n, F_nm)` to `t_end`.
pub fn evolve_two_excitation(
    model: &CavityModel,
    state: &TwoExcitationState,
    t_end: f64,
    integ: &Integration,
) -> Result<Evolution<TwoExcitationState>> {
    evolve_two_excitation_observed(model, state, t_end, integ, |_| {})
}

/// Like [`evolve_two_excitation`], handing every sampled state to `observer`.
pub fn evolve_two_excitation_observed(
    model: &CavityModel,
    state: &TwoExcitationState,
    t_end: f64,
    integ: &Integration,
    mut observer: impl FnMut(&TwoExcitationState),
) -> Result<Evolution<TwoExcitationState>> {
    check_step(model, integ.dt)?;
    check_memory(model.modes())?;
    let ode = TwoExcitationOde::new(model);
    let modes = model.modes();
    let mut x = ode.pack(state);
    let trajectory = drive(
        &ode,
        &mut x,
        state.time,
        t_end,
        integ,
        |x| x.iter().map(|v| v.norm_sqr()).sum(),
        |x| x[..modes].iter().map(|v| v.norm_sqr()).sum(),
        |t, x| observer(&ode.unpack(t, x)),
    )?;
    Ok(Evolution { state: ode.unpack(t_end, &x), trajectory })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, gaussian_weight, CavityParams, WavePacketSpec};

    fn model(modes: usize) -> CavityModel {
        build_model(&CavityParams { modes, ..Default::default() }).unwrap()
    }

    #[test]
    fn free_evolution_identity_and_moduli() {
        let m = model(200);
        let spec = WavePacketSpec::new(10.0, 1000.0, 0.25);
        let s = packet_state(&m, &spec).unwrap();
        assert_eq!(evolve_free(&m, &s, 0.0), s);
        let later = evolve_free(&m, &s, 37.5);
        for (a, b) in s.amplitudes.iter().zip(&later.amplitudes) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn decoupled_atom_stays_excited() {
        let m = model(50).decoupled();
        let ev = evolve_one_excitation(&m, &init_excited_atom(&m), 20.0, &Integration::default()).unwrap();
        assert_eq!(ev.state.atom, C64::new(1.0, 0.0));
        assert!(ev.trajectory.populations.iter().all(|&p| p == 1.0));
    }

    #[test]
    fn stability_guard_rejects_large_steps() {
        let m = model(200);
        let integ = Integration { dt: 0.2, ..Default::default() };
        let r = evolve_one_excitation(&m, &init_excited_atom(&m), 1.0, &integ);
        assert!(matches!(r, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn tight_tolerance_reports_drift() {
        let m = model(200);
        let integ = Integration { dt: 0.08, stride: 10, norm_tolerance: 1e-15 };
        let r = evolve_one_excitation(&m, &init_excited_atom(&m), 50.0, &integ);
        match r {
            Err(Error::NormDrift { suggested_dt, .. }) => assert!(suggested_dt < 0.08),
            other => panic!("expected drift error, got {other:?}"),
        }
    }

    #[test]
    fn memory_bound_is_enforced() {
        assert!(check_memory(200).is_ok());
        assert!(matches!(check_memory(20_000), Err(Error::MemoryBound { .. })));
    }

    #[test]
    fn spontaneous_decay_is_exponential() {
        // P(40) ~ exp(-0.05 * 40) after the turn-on transient
        let m = model(200);
        let ev = evolve_one_excitation(&m, &init_excited_atom(&m), 40.0, &Integration::default()).unwrap();
        let p = ev.state.atom.norm_sqr();
        assert!((p - 0.135).abs() < 0.01, "P(40) = {p}");
        assert!(ev.trajectory.norm_drift() < 1e-8);
    }

    #[test]
    fn sampling_includes_both_ends() {
        let m = model(50);
        let integ = Integration { stride: 7, ..Default::default() };
        let ev = evolve_one_excitation(&m, &init_excited_atom(&m), 1.0, &integ).unwrap();
        assert_eq!(ev.trajectory.times[0], 0.0);
        assert_eq!(*ev.trajectory.times.last().unwrap(), 1.0);
        assert!(ev.trajectory.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn two_excitation_respects_symmetric_storage() {
        let m = model(40);
        let spec = WavePacketSpec::new(117.7, 1000.0, 0.25);
        let mut spec = spec;
        spec.tolerance = 1.0;
        let d = gaussian_weight(&spec, &m).unwrap();
        let mut s = TwoExcitationState::vacuum_like(40);
        s.excited = d;
        let ev = evolve_two_excitation(&m, &s, 5.0, &Integration::default()).unwrap();
        let dense = ev.state.pairs.to_dense();
        for i in 0..40 {
            for j in 0..40 {
                assert_eq!(dense[i * 40 + j], dense[j * 40 + i]);
            }
        }
    }
}
