use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_two_excitation, init_phase_coherent_double, Integration};
use crate::error::{invalid, Result};
use crate::model::{gaussian_weight, CavityModel, WavePacketSpec};

/// A grid extremum refined by a periodic three-point parabola.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    /// Refined location in `[0, 2 pi)`.
    pub phase: f64,
    /// Parabola value at the refined location.
    pub value: f64,
    /// Index of the best grid point.
    pub index: usize,
}

/// Values of a 2pi-periodic function on a uniform grid with refined extrema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseScan {
    pub phases: Vec<f64>,
    pub values: Vec<f64>,
    pub minimum: Extremum,
    pub maximum: Extremum,
}

/// `points` phases `2 pi k / points`.
pub fn phase_grid(points: usize) -> Vec<f64> {
    (0..points).map(|k| TAU * k as f64 / points as f64).collect()
}

fn refine(phases: &[f64], values: &[f64], index: usize) -> Extremum {
    let n = values.len();
    let h = TAU / n as f64;
    let (ym, y0, yp) = (values[(index + n - 1) % n], values[index], values[(index + 1) % n]);
    let curvature = ym - 2.0 * y0 + yp;
    if curvature == 0.0 {
        return Extremum { phase: phases[index], value: y0, index };
    }
    let offset = (0.5 * (ym - yp) / curvature).clamp(-1.0, 1.0);
    let value = y0 - 0.25 * (ym - yp) * offset;
    Extremum { phase: (phases[index] + offset * h).rem_euclid(TAU), value, index }
}

/// Evaluates `f` on a uniform periodic grid (in parallel) and locates its extrema.
pub fn scan_periodic<F>(points: usize, f: F) -> Result<PhaseScan>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if points < 3 {
        return Err(invalid("points", format!("need at least 3 grid points, got {points}")));
    }
    let phases = phase_grid(points);
    let values = phases.par_iter().map(|&p| f(p)).collect::<Result<Vec<f64>>>()?;
    let arg = |better: fn(f64, f64) -> bool| {
        (1..points).fold(0, |b, i| if better(values[i], values[b]) { i } else { b })
    };
    let minimum = refine(&phases, &values, arg(|a, b| a < b));
    let maximum = refine(&phases, &values, arg(|a, b| a > b));
    Ok(PhaseScan { phases, values, minimum, maximum })
}

/// Inputs for the phase-coherent double-pulse scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseScanSetup {
    pub first: WavePacketSpec,
    pub second: WavePacketSpec,
    pub points: usize,
    /// Time window in which the atomic population maximum is recorded.
    pub window: (f64, f64),
    pub integration: Integration,
}

/// Peak atomic population inside `window` for each relative phase.
pub fn phase_scan(model: &CavityModel, setup: &PhaseScanSetup) -> Result<PhaseScan> {
    let w1 = gaussian_weight(&setup.first, model)?;
    let w2 = gaussian_weight(&setup.second, model)?;
    let (t0, t1) = setup.window;
    if !(t1 > t0 && t0 >= 0.0) {
        return Err(invalid("window", format!("need 0 <= start < end, got ({t0}, {t1})")));
    }
    scan_periodic(setup.points, |phi| {
        let init = init_phase_coherent_double(model, &w1, &w2, phi)?;
        let ev = evolve_two_excitation(model, &init.state, t1, &setup.integration)?;
        let peak = ev.trajectory.population_series().max_in(t0, t1).map_or(0.0, |(_, v)| v);
        Ok(peak)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_finds_shifted_cosine_extrema() {
        let s = scan_periodic(64, |p| Ok((p - 2.51).cos())).unwrap();
        assert!((s.maximum.phase - 2.51).abs() < 2e-3);
        assert!((s.minimum.phase - (2.51 + std::f64::consts::PI)).abs() < 2e-3);
        assert!((s.maximum.value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn refinement_wraps_around_zero() {
        let s = scan_periodic(16, |p| Ok((p + 0.1).cos())).unwrap();
        assert!((s.maximum.phase - (TAU - 0.1)).abs() < 2e-2);
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(scan_periodic(2, |_| Ok(0.0)).is_err());
    }
}
