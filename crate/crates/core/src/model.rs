//! Cavity geometry, retained mode window and atom-field couplings.
//!
//! All quantities here are in natural units with `hbar = c = eps0 = 1`, so a
//! mode's angular frequency equals its wavenumber `k_n = n pi / L`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Parameters of the one-dimensional cavity and the atom inside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Mirror separation; the mirrors sit at `z = 0` and `z = L`.
    pub length: f64,
    /// Atomic transition angular frequency.
    pub atom_frequency: f64,
    /// One-dimensional Wigner-Weisskopf decay rate.
    pub decay_rate: f64,
    /// Carrier frequency of the injected wave packets; picks the resonant mode.
    pub carrier_frequency: f64,
    /// Number of retained modes (even).
    pub modes: usize,
    /// Atom position; `None` puts the atom at `L / 2`.
    pub atom_position: Option<f64>,
}

impl Default for CavityParams {
    fn default() -> Self {
        Self {
            length: 80.0 * PI,
            atom_frequency: 1000.0,
            decay_rate: 0.05,
            carrier_frequency: 1000.0,
            modes: 200,
            atom_position: None,
        }
    }
}

/// An immutable table of cavity modes and their couplings to the atom.
#[derive(Clone, Debug, PartialEq)]
pub struct CavityModel {
    params: CavityParams,
    atom_position: f64,
    resonant_index: u64,
    indices: Vec<u64>,
    wavenumbers: Vec<f64>,
    detunings: Vec<f64>,
    couplings: Vec<f64>,
    dipole: f64,
}

/// `sin(pi * x)`, exactly zero whenever `x` is an integer.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        0.0
    } else if r == 0.5 {
        1.0
    } else if r == 1.5 {
        -1.0
    } else {
        (PI * r).sin()
    }
}

/// Builds the mode table for the given cavity.
pub fn build_model(params: &CavityParams) -> Result<CavityModel> {
    CavityModel::new(params.clone())
}

impl CavityModel {
    pub fn new(params: CavityParams) -> Result<Self> {
        let CavityParams { length, atom_frequency, decay_rate, carrier_frequency, modes, .. } = params;
        for (name, value) in [
            ("length", length),
            ("atom_frequency", atom_frequency),
            ("decay_rate", decay_rate),
            ("carrier_frequency", carrier_frequency),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(name, format!("must be positive and finite, got {value}")));
            }
        }
        if modes == 0 || modes % 2 != 0 {
            return Err(invalid("modes", format!("must be a positive even number, got {modes}")));
        }
        let atom_position = params.atom_position.unwrap_or(0.5 * length);
        if !(atom_position > 0.0 && atom_position < length) {
            return Err(invalid(
                "atom_position",
                format!("must lie strictly inside (0, {length}), got {atom_position}"),
            ));
        }

        let resonant = (carrier_frequency * length / PI).round();
        let half = (modes / 2) as f64;
        if resonant <= half {
            return Err(Error::WindowTooWide { modes, resonant: resonant as u64 });
        }
        let resonant_index = resonant as u64;
        let first = resonant_index - (modes as u64) / 2 + 1;
        let indices: Vec<u64> = (first..first + modes as u64).collect();

        let spacing = PI / length;
        // d_eg from Gamma_A = omega_A |d|^2 / (eps0 hbar c)
        let dipole = (decay_rate / atom_frequency).sqrt();
        // the resonant wavenumber is exact up to rounding; detunings are built
        // relative to it to avoid cancelling two large numbers per mode
        let resonant_k = resonant * spacing;
        let offset = resonant_k - atom_frequency;
        let position_ratio = atom_position / length;

        let mut wavenumbers = Vec::with_capacity(modes);
        let mut detunings = Vec::with_capacity(modes);
        let mut couplings = Vec::with_capacity(modes);
        for &n in &indices {
            let k = n as f64 * spacing;
            let shift = (n as i64 - resonant_index as i64) as f64 * spacing;
            wavenumbers.push(k);
            detunings.push(shift + offset);
            // g_n = sqrt(omega_n / (hbar eps0 L)) d_eg sin(k_n z_A)
            let phase = sin_pi(n as f64 * position_ratio);
            couplings.push((k / length).sqrt() * dipole * phase);
        }

        Ok(Self {
            params: CavityParams { atom_position: Some(atom_position), ..params },
            atom_position,
            resonant_index,
            indices,
            wavenumbers,
            detunings,
            couplings,
            dipole,
        })
    }

    /// Same mode table with every coupling set to zero.
    pub fn decoupled(&self) -> Self {
        Self { couplings: vec![0.0; self.couplings.len()], ..self.clone() }
    }

    pub fn params(&self) -> &CavityParams {
        &self.params
    }

    pub fn length(&self) -> f64 {
        self.params.length
    }

    pub fn atom_position(&self) -> f64 {
        self.atom_position
    }

    pub fn atom_frequency(&self) -> f64 {
        self.params.atom_frequency
    }

    pub fn decay_rate(&self) -> f64 {
        self.params.decay_rate
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.params.carrier_frequency
    }

    pub fn modes(&self) -> usize {
        self.indices.len()
    }

    pub fn resonant_index(&self) -> u64 {
        self.resonant_index
    }

    /// Physical mode integers `n`.
    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    /// Plotting index `n_s = n - n0 + N/2`.
    pub fn shifted_indices(&self) -> Vec<i64> {
        let base = self.resonant_index as i64 - (self.modes() / 2) as i64;
        self.indices.iter().map(|&n| n as i64 - base).collect()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Mode angular frequencies; identical to the wavenumbers for `c = 1`.
    pub fn frequencies(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn dipole(&self) -> f64 {
        self.dipole
    }

    pub fn mode_spacing(&self) -> f64 {
        PI / self.params.length
    }

    /// `max |Delta_n|` over the window.
    pub fn max_detuning(&self) -> f64 {
        self.detunings.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn max_coupling(&self) -> f64 {
        self.couplings.iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    /// Golden-rule decay rate implied by the discrete couplings:
    /// `2 pi <|g|^2> rho` with the mode density `rho = L / (pi c)`.
    pub fn golden_rule_rate(&self) -> f64 {
        let mean_sq = self.couplings.iter().map(|g| g * g).sum::<f64>() / self.couplings.len() as f64;
        2.0 * PI * mean_sq * self.params.length / PI
    }

    /// Position-dependent mode profile `M_n(z) = sqrt(2 omega_n / L) sin(k_n z)`.
    pub fn mode_profile(&self, mode: usize, z: f64) -> f64 {
        let k = self.wavenumbers[mode];
        // k_n z = pi n z / L, reduced exactly so nodes stay nodes
        let x = self.indices[mode] as f64 * (z / self.params.length);
        (2.0 * k / self.params.length).sqrt() * sin_pi(x)
    }
}

/// A Gaussian single-photon wave packet in momentum space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavePacketSpec {
    /// Packet centre at `t = 0`.
    pub center: f64,
    /// Carrier wavenumber `k0`.
    pub carrier: f64,
    /// Momentum-space width `sigma`.
    pub width: f64,
    /// Allowed probability mass lost outside the mode window.
    pub tolerance: f64,
}

impl WavePacketSpec {
    pub const DEFAULT_TOLERANCE: f64 = 1e-3;

    pub fn new(center: f64, carrier: f64, width: f64) -> Self {
        Self { center, carrier, width, tolerance: Self::DEFAULT_TOLERANCE }
    }

    pub fn at(self, center: f64) -> Self {
        Self { center, ..self }
    }

    /// Pulse duration `T_P ~ 4 / (c sigma)`.
    pub fn duration(&self) -> f64 {
        4.0 / self.width
    }

    /// Normalized momentum weight `G(k)`.
    pub fn weight(&self, k: f64) -> f64 {
        let s2 = self.width * self.width;
        let dk = k - self.carrier;
        (2.0 * PI * s2).powf(-0.25) * (-dk * dk / (4.0 * s2)).exp()
    }

    /// Riemann sum `sum_n |G(k_n)|^2 dk` over the model's window.
    pub fn captured_mass(&self, model: &CavityModel) -> f64 {
        let dk = model.mode_spacing();
        model.wavenumbers().iter().map(|&k| self.weight(k).powi(2)).sum::<f64>() * dk
    }

    /// Fails unless the window holds all but `tolerance` of the packet.
    pub fn check(&self, model: &CavityModel) -> Result<f64> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(invalid("width", format!("must be positive, got {}", self.width)));
        }
        let captured = self.captured_mass(model);
        if captured < 1.0 - self.tolerance || captured > 1.0 + self.tolerance {
            return Err(Error::Consistency { captured, tolerance: self.tolerance });
        }
        Ok(captured)
    }
}

/// Single-photon amplitudes `A_n(0) = G(k_n) exp(-i k_n z0) / sqrt(Omega_N)`, `Omega_N = L / pi`.
pub fn gaussian_weight(spec: &WavePacketSpec, model: &CavityModel) -> Result<Vec<C64>> {
    spec.check(model)?;
    let norm = (model.length() / PI).sqrt().recip();
    Ok(model
        .wavenumbers()
        .iter()
        .map(|&k| C64::from_polar(spec.weight(k) * norm, -k * spec.center))
        .collect())
}
