use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use super::{AtomParams, DensityState, SinglePulse};
use crate::error::{invalid, Result};

/// Simpson intervals per pulse window.
pub const QUADRATURE_INTERVALS: usize = 200;

/// Pulse areas above this leave the low-excitation regime.
const VALIDITY_AREA: f64 = 0.3;

/// Second-order decomposition of the excited-state change over one pulse.
///
/// `rho22(t_int + T_P) ~ rho22(t_int) - r_sd - r_se + r_ab - r_phi1 + r_phi2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeBreakdown {
    /// Relative phase of the pulse, reduced to `[0, 2 pi)`.
    pub phase: f64,
    pub t_int: f64,
    pub duration: f64,
    pub r_sd: f64,
    pub r_se: f64,
    pub r_ab: f64,
    pub r_phi1: f64,
    pub r_phi2: f64,
    /// `rho22(t_int)`, kept so the prediction is self-contained.
    pub rho22_start: f64,
    /// `int Omega dt` over the window, without the phase.
    pub area: f64,
}

impl PerturbativeBreakdown {
    /// Second-order estimate of `rho22(t_int + T_P)`.
    pub fn predicted_rho22(&self) -> f64 {
        self.rho22_start - self.r_sd - self.r_se + self.r_ab - self.r_phi1 + self.r_phi2
    }

    /// Net excited-state change predicted over the window.
    pub fn predicted_change(&self) -> f64 {
        self.predicted_rho22() - self.rho22_start
    }
}

/// Integrals of the real Rabi envelope `a(t)` on a Simpson grid.
struct Moments {
    /// `int a`
    area: f64,
    /// `int dt' a(t') int^{t'} dt'' a(t'')`
    nested: f64,
    /// `int dt' int^{t'} dt'' a(t'')`
    inner: f64,
    /// `int dt' a(t') int^{t'} dt''`
    outer: f64,
}

fn simpson(h: f64, f: &[f64]) -> f64 {
    let n = f.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    let mut s = f[0] + f[n];
    for (i, v) in f.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

/// `C_j = int_{t0}^{t_j} f` with third-order accurate panels.
fn cumulative(h: f64, f: &[f64]) -> Vec<f64> {
    let n = f.len() - 1;
    let mut c = vec![0.0; n + 1];
    for j in 1..=n {
        let panel = if j < n {
            h / 12.0 * (5.0 * f[j - 1] + 8.0 * f[j] - f[j + 1])
        } else {
            h / 12.0 * (-f[j - 2] + 8.0 * f[j - 1] + 5.0 * f[j])
        };
        c[j] = c[j - 1] + panel;
    }
    c
}

fn moments(a: impl Fn(f64) -> f64, t0: f64, duration: f64, intervals: usize) -> Moments {
    let n = intervals + intervals % 2;
    let h = duration / n as f64;
    let t: Vec<f64> = (0..=n).map(|j| t0 + j as f64 * h).collect();
    let f: Vec<f64> = t.iter().map(|&x| a(x)).collect();
    let c = cumulative(h, &f);
    let fc: Vec<f64> = f.iter().zip(&c).map(|(x, y)| x * y).collect();
    let ft: Vec<f64> = f.iter().zip(&t).map(|(x, tt)| x * (tt - t0)).collect();
    Moments { area: simpson(h, &f), nested: simpson(h, &fc), inner: simpson(h, &c), outer: simpson(h, &ft) }
}

/// Second-order terms for a pulse acting on `rho` over `[rho.time, rho.time + duration]`.
///
/// The phase-dependent terms keep only the `cos(phi) Im rho12` part. The
/// dropped `sin(phi) Re rho12` part vanishes when the preparing pulse was
/// resonant and real, which is the situation studied here.
pub fn perturbative_terms(
    atom: &AtomParams,
    rho: &DensityState,
    pulse: &SinglePulse,
    duration: f64,
) -> Result<PerturbativeBreakdown> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(invalid("duration", format!("must be positive, got {duration}")));
    }
    let t0 = rho.time;
    let m = moments(|t| atom.dipole * pulse.magnitude(t), t0, duration, QUADRATURE_INTERVALS);
    if m.area.abs() > VALIDITY_AREA {
        log::warn!("pulse area {:.3} exceeds {VALIDITY_AREA}; the second-order terms are unreliable", m.area);
    }
    if rho.rho12.re.abs() > 1e-3 * rho.rho12.im.abs().max(1e-300) && rho.rho12.re.abs() > 1e-12 {
        log::debug!("Re rho12 = {:e} is ignored by the phase terms", rho.rho12.re);
    }
    let g = atom.decay_rate;
    let cos = pulse.phase.cos();
    let kernel = 0.5 * m.nested;
    Ok(PerturbativeBreakdown {
        phase: pulse.phase.rem_euclid(TAU),
        t_int: t0,
        duration,
        r_sd: (g * duration - 0.5 * (g * duration).powi(2)) * rho.rho22,
        r_se: kernel * rho.rho22,
        r_ab: kernel * rho.rho11,
        r_phi1: cos * (m.inner + 0.5 * m.outer) * rho.rho12.im * g,
        r_phi2: cos * m.area * rho.rho12.im,
        rho22_start: rho.rho22,
        area: m.area,
    })
}

/// Number of photons emitted by stimulated emission during the pulse.
///
/// The phase is taken mod `2 pi`; on `[pi/2, 3pi/2]` the larger phase term
/// stimulates, elsewhere the smaller one does.
pub fn stimulated_count(b: &PerturbativeBreakdown) -> f64 {
    let phi = b.phase.rem_euclid(TAU);
    if (FRAC_PI_2..=3.0 * FRAC_PI_2).contains(&phi) {
        b.r_se + b.r_phi2.abs()
    } else {
        b.r_se + b.r_phi1.abs()
    }
}

/// Time after which spontaneous decay has removed `loss` of the excitation.
pub fn t_int_from_loss(loss: f64, decay_rate: f64) -> Result<f64> {
    if !(loss > 0.0 && loss < 1.0) {
        return Err(invalid("loss", format!("must lie in (0, 1), got {loss}")));
    }
    if !(decay_rate.is_finite() && decay_rate > 0.0) {
        return Err(invalid("decay_rate", format!("must be positive, got {decay_rate}")));
    }
    Ok(-(1.0 - loss).ln() / decay_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;
    use std::f64::consts::PI;

    #[test]
    fn nested_moments_match_single_integrals() {
        // int dt' int^{t'} a = int (T_end - t) a ; int a(t') (t' - t0) swapped the same way
        let a = |t: f64| (-(t - 1.3).powi(2) * 4.0).exp() * (1.0 + 0.2 * t);
        let m = moments(a, 0.0, 3.0, 200);
        let fine = moments(|t| a(t) * (3.0 - t), 0.0, 3.0, 2000).area;
        assert!((m.inner - fine).abs() < 1e-6, "{} vs {fine}", m.inner);
        let fine_outer = moments(|t| a(t) * t, 0.0, 3.0, 2000).area;
        assert!((m.outer - fine_outer).abs() < 1e-6);
        // symmetric kernel: int a int^{t'} a = (int a)^2 / 2
        assert!((m.nested - 0.5 * m.area * m.area).abs() < 1e-6);
    }

    #[test]
    fn closed_form_t_int() {
        assert!((t_int_from_loss(0.1, 0.05).unwrap() - 2.107).abs() < 1e-3);
        assert!((t_int_from_loss(0.1, 1.775e8).unwrap() - 0.594e-9).abs() < 1e-12);
        assert!(t_int_from_loss(1e-12, 0.05).unwrap() < 1e-9);
        assert!(t_int_from_loss(0.0, 0.05).is_err());
    }

    fn breakdown(rho12: C64, phase: f64) -> PerturbativeBreakdown {
        let atom = AtomParams { decay_rate: 0.05, detuning: 0.0, dipole: 1.0 };
        let rho = DensityState { time: 0.0, rho11: 0.6, rho12, rho22: 0.4 };
        let pulse = SinglePulse { amplitude: 0.01, sigma: 0.25, center: 8.0, phase };
        perturbative_terms(&atom, &rho, &pulse, 16.0).unwrap()
    }

    #[test]
    fn phase_terms_need_coherence() {
        let b = breakdown(C64::new(0.0, 0.0), 0.0);
        assert_eq!(b.r_phi1, 0.0);
        assert_eq!(b.r_phi2, 0.0);
        assert!(b.r_sd > 0.0);
        assert!((b.r_se / b.r_ab - 0.4 / 0.6).abs() < 1e-12);
    }

    #[test]
    fn quadrature_phases_kill_phase_terms() {
        for phi in [PI / 2.0, 1.5 * PI] {
            let b = breakdown(C64::new(0.0, 0.3), phi);
            assert!(b.r_phi1.abs() < 1e-15 && b.r_phi2.abs() < 1e-15);
        }
    }

    #[test]
    fn branch_selection() {
        let b = breakdown(C64::new(0.0, 0.3), PI);
        assert_eq!(stimulated_count(&b), b.r_se + b.r_phi2.abs());
        let b = breakdown(C64::new(0.0, 0.3), 0.0);
        assert_eq!(stimulated_count(&b), b.r_se + b.r_phi1.abs());
        let b = breakdown(C64::new(0.0, 0.3), 2.0 * PI + 0.1);
        assert_eq!(stimulated_count(&b), b.r_se + b.r_phi1.abs());
    }

    #[test]
    fn nothing_to_stimulate() {
        let atom = AtomParams { decay_rate: 0.05, detuning: 0.0, dipole: 1.0 };
        let pulse = SinglePulse { amplitude: 0.01, sigma: 0.25, center: 8.0, phase: 1.0 };
        let b = perturbative_terms(&atom, &DensityState::ground(0.0), &pulse, 16.0).unwrap();
        assert_eq!(stimulated_count(&b), 0.0);
    }
}
