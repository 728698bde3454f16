use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dynamics::{FieldOnlyState, OneExcitationState, TwoExcitationState};
use crate::error::{invalid, Result};
use crate::model::CavityModel;
use crate::series::{IntensityMode, SpatialProfile};

/// Default number of grid points for envelope profiles.
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// `points` equally spaced positions covering `[0, L]`, both mirrors included.
pub fn uniform_grid(model: &CavityModel, points: usize) -> Vec<f64> {
    let l = model.length();
    match points {
        0 => Vec::new(),
        1 => vec![0.5 * l],
        _ => (0..points).map(|i| l * i as f64 / (points - 1) as f64).collect(),
    }
}

/// Smallest grid size giving eight points per carrier wavelength.
pub fn raw_grid_points(model: &CavityModel) -> usize {
    let wavelength = 2.0 * std::f64::consts::PI / model.carrier_frequency();
    (8.0 * model.length() / wavelength).ceil() as usize + 1
}

/// States whose field intensity `<E^- E^+>` can be evaluated.
///
/// The intensity is a sum over photon "components" of `|sum_n u_n c_n|^2`,
/// where `u_n` is a mode profile at one position. Implementors return that sum
/// for a given profile vector.
pub trait FieldIntensity: Sync {
    fn time(&self) -> f64;
    fn modes(&self) -> usize;
    /// `sum_components |<u, c>|^2` for one profile vector `u`.
    fn weighted(&self, u: &[C64], scratch: &mut Vec<C64>) -> f64;
}

fn dot(u: &[C64], c: &[C64]) -> C64 {
    u.iter().zip(c).map(|(a, b)| a * b).sum()
}

impl FieldIntensity for FieldOnlyState {
    fn time(&self) -> f64 {
        self.time
    }
    fn modes(&self) -> usize {
        self.amplitudes.len()
    }
    fn weighted(&self, u: &[C64], _: &mut Vec<C64>) -> f64 {
        dot(u, &self.amplitudes).norm_sqr()
    }
}

impl FieldIntensity for OneExcitationState {
    fn time(&self) -> f64 {
        self.time
    }
    fn modes(&self) -> usize {
        self.field.len()
    }
    fn weighted(&self, u: &[C64], _: &mut Vec<C64>) -> f64 {
        dot(u, &self.field).norm_sqr()
    }
}

impl FieldIntensity for TwoExcitationState {
    fn time(&self) -> f64 {
        self.time
    }
    fn modes(&self) -> usize {
        self.excited.len()
    }
    /// `|sum u_n D_n|^2 + sum_m |sqrt2 u_m E_m + sum_{n!=m} u_n F_nm|^2`
    fn weighted(&self, u: &[C64], col: &mut Vec<C64>) -> f64 {
        let n = self.modes();
        col.clear();
        col.extend(u.iter().zip(&self.doubled).map(|(a, e)| std::f64::consts::SQRT_2 * a * e));
        let packed = self.pairs.packed();
        let mut k = 0;
        for i in 0..n {
            let ui = u[i];
            let mut acc = C64::new(0.0, 0.0);
            for j in i + 1..n {
                let f = packed[k];
                acc += u[j] * f;
                col[j] += ui * f;
                k += 1;
            }
            col[i] += acc;
        }
        dot(u, &self.excited).norm_sqr() + col.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

/// Field intensity on `grid` in the requested mode.
///
/// Raw mode uses `M_n(z) = sqrt(2 omega_n / L) sin(k_n z)`. Envelope mode
/// splits the standing wave into its right- and left-moving halves, strips the
/// carrier `exp(+-i k0 z)` from each, and adds their intensities.
pub fn intensity<S: FieldIntensity>(
    model: &CavityModel,
    state: &S,
    grid: &[f64],
    mode: IntensityMode,
) -> Result<SpatialProfile> {
    if state.modes() != model.modes() {
        return Err(invalid("state", "mode count differs from the model"));
    }
    let l = model.length();
    if let Some(z) = grid.iter().find(|z| !(**z >= 0.0 && **z <= l)) {
        return Err(invalid("grid", format!("position {z} lies outside [0, {l}]")));
    }
    let scale: Vec<f64> = model.wavenumbers().iter().map(|k| (2.0 * k / l).sqrt()).collect();
    let k_ref = model.carrier_frequency();
    let values = grid
        .par_iter()
        .map_init(
            || (vec![C64::new(0.0, 0.0); model.modes()], Vec::new()),
            |(u, scratch), &z| match mode {
                IntensityMode::Raw => {
                    for (i, v) in u.iter_mut().enumerate() {
                        *v = C64::new(model.mode_profile(i, z), 0.0);
                    }
                    state.weighted(u, scratch)
                }
                IntensityMode::Envelope => {
                    // sin(kz) = (e^{ikz} - e^{-ikz}) / 2i
                    let half = C64::new(0.0, -0.5);
                    for ((v, &k), &s) in u.iter_mut().zip(model.wavenumbers()).zip(&scale) {
                        *v = half * s * C64::from_polar(1.0, (k - k_ref) * z);
                    }
                    let right = state.weighted(u, scratch);
                    for ((v, &k), &s) in u.iter_mut().zip(model.wavenumbers()).zip(&scale) {
                        *v = -half * s * C64::from_polar(1.0, -(k - k_ref) * z);
                    }
                    right + state.weighted(u, scratch)
                }
            },
        )
        .collect();
    Ok(SpatialProfile::new(grid.to_vec(), values, state.time(), mode))
}
