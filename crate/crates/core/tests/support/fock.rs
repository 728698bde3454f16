//! Dense Fock-space reference model shared by the oracle and acceptance tests.
//!
//! The Hamiltonian is assembled from creation and annihilation operators on
//! `atom x mode_1 x ... x mode_N`, exponentiated densely, and compared with the
//! packed subspace integrators and observables.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use stimdyn::dynamics::{OneExcitationState, PairAmplitudes, TwoExcitationState};
use stimdyn::model::{build_model, CavityModel, CavityParams};

pub struct Fock {
    pub modes: usize,
    pub levels: usize,
}

impl Fock {
    pub fn dim(&self) -> usize {
        2 * self.levels.pow(self.modes as u32)
    }

    pub fn index(&self, atom: usize, photons: &[usize]) -> usize {
        let mut idx = 0;
        for &p in photons.iter().rev() {
            idx = idx * self.levels + p;
        }
        atom * self.levels.pow(self.modes as u32) + idx
    }

    pub fn decode(&self, mut idx: usize) -> (usize, Vec<usize>) {
        let block = self.levels.pow(self.modes as u32);
        let atom = idx / block;
        idx %= block;
        let mut photons = vec![0; self.modes];
        for p in photons.iter_mut() {
            *p = idx % self.levels;
            idx /= self.levels;
        }
        (atom, photons)
    }

    /// `sum Delta a^+ a - sum g (s+ a + s- a^+)`
    pub fn hamiltonian(&self, model: &CavityModel) -> DMatrix<C64> {
        let d = self.dim();
        let mut h = DMatrix::<C64>::zeros(d, d);
        for col in 0..d {
            let (atom, photons) = self.decode(col);
            let free: f64 = photons.iter().zip(model.detunings()).map(|(&n, &w)| n as f64 * w).sum();
            h[(col, col)] += C64::new(free, 0.0);
            if atom == 0 {
                for (i, &g) in model.couplings().iter().enumerate() {
                    if photons[i] == 0 {
                        continue;
                    }
                    let mut p = photons.clone();
                    p[i] -= 1;
                    let row = self.index(1, &p);
                    let amp = -g * (photons[i] as f64).sqrt();
                    h[(row, col)] += C64::new(amp, 0.0);
                    h[(col, row)] += C64::new(amp, 0.0);
                }
            }
        }
        h
    }

    pub fn propagate(&self, model: &CavityModel, psi: &DVector<C64>, t: f64) -> DVector<C64> {
        let u = (self.hamiltonian(model) * C64::new(0.0, -t)).exp();
        u * psi
    }

    pub fn unit(&self, n: usize) -> Vec<usize> {
        let mut p = vec![0; self.modes];
        p[n] = 1;
        p
    }

    pub fn embed_one(&self, s: &OneExcitationState) -> DVector<C64> {
        let mut v = DVector::zeros(self.dim());
        v[self.index(1, &vec![0; self.modes])] = s.atom;
        for (n, c) in s.field.iter().enumerate() {
            v[self.index(0, &self.unit(n))] = *c;
        }
        v
    }

    pub fn embed_two(&self, s: &TwoExcitationState) -> DVector<C64> {
        let mut v = DVector::zeros(self.dim());
        for n in 0..self.modes {
            v[self.index(1, &self.unit(n))] = s.excited[n];
            let mut p = vec![0; self.modes];
            p[n] = 2;
            v[self.index(0, &p)] = s.doubled[n];
            for m in n + 1..self.modes {
                let mut p = self.unit(n);
                p[m] = 1;
                v[self.index(0, &p)] = s.pairs.get(n, m);
            }
        }
        v
    }

    /// `<psi| E^-(z) E^+(z) |psi>` with `E^+ = sum_n M_n(z) a_n`.
    pub fn intensity(&self, model: &CavityModel, psi: &DVector<C64>, z: f64) -> f64 {
        let mut out = DVector::<C64>::zeros(self.dim());
        for idx in 0..self.dim() {
            if psi[idx] == C64::new(0.0, 0.0) {
                continue;
            }
            let (atom, photons) = self.decode(idx);
            for n in 0..self.modes {
                if photons[n] == 0 {
                    continue;
                }
                let mut p = photons.clone();
                p[n] -= 1;
                out[self.index(atom, &p)] += psi[idx] * model.mode_profile(n, z) * (photons[n] as f64).sqrt();
            }
        }
        out.norm_squared()
    }
}

pub fn small_model(modes: usize) -> CavityModel {
    build_model(&CavityParams {
        length: 8.0 * PI,
        modes,
        atom_position: Some(0.37 * 8.0 * PI),
        ..Default::default()
    })
    .unwrap()
}

pub fn two_excitation_sample(modes: usize) -> TwoExcitationState {
    let c = |k: f64| C64::from_polar(1.0 + 0.3 * (1.7 * k).sin(), 2.1 * k);
    let mut s = TwoExcitationState {
        time: 0.0,
        excited: (0..modes).map(|n| c(n as f64)).collect(),
        doubled: (0..modes).map(|n| 0.5 * c(10.0 + n as f64)).collect(),
        pairs: PairAmplitudes::from_fn(modes, |n, m| 0.7 * c((n * modes + m) as f64 + 0.3)),
    };
    let norm = s.norm_sqr().sqrt();
    s.excited.iter_mut().chain(s.doubled.iter_mut()).for_each(|v| *v /= norm);
    s.pairs = PairAmplitudes::from_fn(modes, |n, m| s.pairs.get(n, m) / norm);
    s
}

pub fn max_difference(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
