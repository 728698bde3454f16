use num_complex::Complex64 as C64;

use crate::dynamics::{FieldOnlyState, OneExcitationState, TwoExcitationState};
use crate::model::CavityModel;

/// States that contain an atom, so `P(t)` is defined.
///
/// The free-field state has no atom and deliberately does not implement this:
///
/// ```compile_fail
/// use stimdyn::dynamics::FieldOnlyState;
/// use stimdyn::observables::Population;
/// let s = FieldOnlyState { time: 0.0, amplitudes: vec![] };
/// let _ = s.population();
/// ```
pub trait Population {
    /// Probability that the upper atomic level is occupied.
    fn population(&self) -> f64;
}

impl Population for OneExcitationState {
    fn population(&self) -> f64 {
        self.atom.norm_sqr()
    }
}

impl Population for TwoExcitationState {
    fn population(&self) -> f64 {
        self.excited.iter().map(|d| d.norm_sqr()).sum()
    }
}

/// Free function form of [`Population::population`].
pub fn population(state: &impl Population) -> f64 {
    state.population()
}

/// Mode occupations and excitation bookkeeping common to all subspaces.
pub trait ModeOccupation {
    /// `<a_n^+ a_n>` for every mode in the window.
    fn spectrum(&self) -> Vec<f64>;
    /// `<sigma+ sigma->`; zero without an atom.
    fn atom_excitation(&self) -> f64;
    /// Excitation number of the subspace (1 or 2).
    fn excitation_number(&self) -> u32;
}

impl ModeOccupation for FieldOnlyState {
    fn spectrum(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
    fn atom_excitation(&self) -> f64 {
        0.0
    }
    fn excitation_number(&self) -> u32 {
        1
    }
}

impl ModeOccupation for OneExcitationState {
    fn spectrum(&self) -> Vec<f64> {
        self.field.iter().map(|a| a.norm_sqr()).collect()
    }
    fn atom_excitation(&self) -> f64 {
        self.population()
    }
    fn excitation_number(&self) -> u32 {
        1
    }
}

impl ModeOccupation for TwoExcitationState {
    /// `|D_n|^2 + 2|E_n|^2 + sum_m |F_nm|^2`
    fn spectrum(&self) -> Vec<f64> {
        let n = self.modes();
        let mut s: Vec<f64> =
            self.excited.iter().zip(&self.doubled).map(|(d, e)| d.norm_sqr() + 2.0 * e.norm_sqr()).collect();
        let packed = self.pairs.packed();
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                let f = packed[k].norm_sqr();
                s[i] += f;
                s[j] += f;
                k += 1;
            }
        }
        s
    }
    fn atom_excitation(&self) -> f64 {
        self.population()
    }
    fn excitation_number(&self) -> u32 {
        2
    }
}

/// Per-mode occupation `S(n)`.
pub fn spectrum(state: &impl ModeOccupation) -> Vec<f64> {
    state.spectrum()
}

/// `<Q_A> + <Q_F>`, equal to the excitation number times the state norm.
pub fn total_excitation(state: &impl ModeOccupation) -> f64 {
    state.atom_excitation() + state.spectrum().iter().sum::<f64>()
}

/// `<H>` of the interaction-picture Hamiltonian for a one-excitation state.
pub fn interaction_energy_one(model: &CavityModel, s: &OneExcitationState) -> f64 {
    let mut free = 0.0;
    let mut hop = C64::new(0.0, 0.0);
    for ((c, &d), &g) in s.field.iter().zip(model.detunings()).zip(model.couplings()) {
        free += d * c.norm_sqr();
        hop += g * c;
    }
    free - 2.0 * (s.atom.conj() * hop).re
}

/// `<H>` of the interaction-picture Hamiltonian for a two-excitation state.
pub fn interaction_energy_two(model: &CavityModel, s: &TwoExcitationState) -> f64 {
    let det = model.detunings();
    let g = model.couplings();
    let free: f64 = s.spectrum().iter().zip(det).map(|(o, d)| o * d).sum();
    // <psi| sigma+ a_n |psi> = sum_{m!=n} D_m^* F_nm + sqrt2 D_n^* E_n
    let n = s.modes();
    let mut hop = C64::new(0.0, 0.0);
    let packed = s.pairs.packed();
    let mut k = 0;
    for i in 0..n {
        hop += g[i] * std::f64::consts::SQRT_2 * s.excited[i].conj() * s.doubled[i];
        for j in i + 1..n {
            let f = packed[k];
            hop += g[i] * s.excited[j].conj() * f + g[j] * s.excited[i].conj() * f;
            k += 1;
        }
    }
    free - 2.0 * hop.re
}
