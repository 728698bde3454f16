use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use stimdyn::dynamics::{
    evolve_free, init_phase_coherent_double, init_two_photons, packet_state, FieldOnlyState,
};
use stimdyn::model::{build_model, gaussian_weight, CavityModel, CavityParams, WavePacketSpec};
use stimdyn::nuclear::{broadband_amplitude, NuclearTarget, XrayPulseSpec};
use stimdyn::observables::{decay_rate, intensity, uniform_grid, RateOptions};
use stimdyn::semiclassical::{
    evolve_obe, normalize_amplitude_1d, AtomParams, DensityState, EnergyConvention, PulsePair,
};
use stimdyn::series::{IntensityMode, TimeSeries};

fn default_model() -> CavityModel {
    build_model(&CavityParams::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn centred_atom_decouples_even_modes(half in 20usize..400, length in 50.0f64..400.0) {
        let m = build_model(&CavityParams { modes: 2 * half, length, ..Default::default() }).unwrap();
        let mut last_odd: Option<f64> = None;
        for (&n, &g) in m.indices().iter().zip(m.couplings()) {
            if n % 2 == 0 {
                prop_assert_eq!(g, 0.0);
            } else {
                if let Some(prev) = last_odd {
                    prop_assert!(prev * g < 0.0);
                }
                last_odd = Some(g);
            }
        }
    }

    #[test]
    fn model_construction_is_deterministic(half in 10usize..200, pos in 0.05f64..0.95) {
        let p = CavityParams { modes: 2 * half, atom_position: Some(pos * 80.0 * PI), ..Default::default() };
        let (a, b) = (build_model(&p).unwrap(), build_model(&p).unwrap());
        prop_assert!(a.couplings().iter().zip(b.couplings()).all(|(x, y)| x.to_bits() == y.to_bits()));
        prop_assert!(a.detunings().iter().zip(b.detunings()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn gaussian_weight_is_normalized(center in 0.0f64..251.0, width in 0.2f64..0.3) {
        let m = default_model();
        let w = gaussian_weight(&WavePacketSpec::new(center, 1000.0, width), &m).unwrap();
        let mass: f64 = w.iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((0.999..=1.0 + 1e-12).contains(&mass), "{}", mass);
    }

    #[test]
    fn free_evolution_keeps_moduli(t in -500.0f64..500.0) {
        let m = default_model();
        let s = packet_state(&m, &WavePacketSpec::new(40.0, 1000.0, 0.25)).unwrap();
        let e = evolve_free(&m, &s, t);
        for (a, b) in s.amplitudes.iter().zip(&e.amplitudes) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-14);
        }
        let back = evolve_free(&m, &e, 0.0);
        for (a, b) in s.amplitudes.iter().zip(&back.amplitudes) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn raw_intensity_is_non_negative(re in prop::collection::vec(-1.0f64..1.0, 40), im in prop::collection::vec(-1.0f64..1.0, 40)) {
        let m = build_model(&CavityParams { modes: 40, ..Default::default() }).unwrap();
        let s = FieldOnlyState { time: 0.0, amplitudes: re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect() };
        let grid = uniform_grid(&m, 301);
        for mode in [IntensityMode::Raw, IntensityMode::Envelope] {
            prop_assert!(intensity(&m, &s, &grid, mode).unwrap().values.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn two_photon_states_are_unit_and_symmetric(z1 in 20.0f64..230.0, z2 in 20.0f64..230.0) {
        let m = default_model();
        let w1 = gaussian_weight(&WavePacketSpec::new(z1, 1000.0, 0.25), &m).unwrap();
        let w2 = gaussian_weight(&WavePacketSpec::new(z2, 1000.0, 0.25), &m).unwrap();
        let s = init_two_photons(&m, &w1, &w2).unwrap();
        prop_assert!((s.state.norm_sqr() - 1.0).abs() < 1e-12);
        let overlap: C64 = w1.iter().zip(&w2).map(|(a, b)| a.conj() * b).sum();
        let m1: f64 = w1.iter().map(|a| a.norm_sqr()).sum();
        let m2: f64 = w2.iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((s.norm.powi(2) - (m1 * m2 + overlap.norm_sqr())).abs() < 1e-10);
        let n = m.modes();
        let dense = s.state.pairs.to_dense();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(dense[i * n + j], dense[j * n + i]);
            }
        }
    }

    #[test]
    fn separated_coherent_pairs_have_phase_independent_norm(phi in 0.0f64..(2.0 * PI), gap in 40.0f64..100.0) {
        let m = default_model();
        let w1 = gaussian_weight(&WavePacketSpec::new(120.0 + 0.5 * gap, 1000.0, 0.25), &m).unwrap();
        let w2 = gaussian_weight(&WavePacketSpec::new(120.0 - 0.5 * gap, 1000.0, 0.25), &m).unwrap();
        let raw = init_phase_coherent_double(&m, &w1, &w2, phi).unwrap().norm.powi(2);
        // (1 + 1)^2 + 2 (1 + 1)^2 of cross and direct terms -> 8 for orthogonal unit packets
        prop_assert!((raw - 8.0).abs() < 0.02, "{}", raw);
    }

    #[test]
    fn exponential_decay_rate_is_recovered(rate in 0.001f64..0.5, step in 0.001f64..0.05) {
        // second-order differences: relative error ~ (rate dt)^2 / 3 at the ends
        let dt = step / rate;
        let times: Vec<f64> = (0..200).map(|i| i as f64 * dt).collect();
        let values = times.iter().map(|t| (-rate * t).exp()).collect();
        let r = decay_rate(&TimeSeries::population(times, values), &RateOptions { smoothing: 0, ..Default::default() });
        for v in &r.rate.values {
            prop_assert!((v / rate - 1.0).abs() < 1e-3, "{} vs {}", v, rate);
        }
    }

    #[test]
    fn bloch_evolution_keeps_density_matrix_physical(
        amplitude in 0.0f64..3.0,
        phase in 0.0f64..(2.0 * PI),
        detuning in -0.5f64..0.5,
        gap in 1.0f64..20.0,
    ) {
        let atom = AtomParams { decay_rate: 0.05, detuning, dipole: 1.0 };
        let pulses = PulsePair::new(amplitude, 0.25, 10.0, 10.0 + gap, phase);
        let tr = evolve_obe(&atom, &pulses, &DensityState::ground(0.0), 30.0 + gap, 0.01, 10).unwrap();
        prop_assert!(tr.max_trace_drift() < 1e-10);
        for s in &tr.states {
            prop_assert!(s.rho22 > -1e-8 && s.rho22 < 1.0 + 1e-8);
            let (lo, hi) = s.eigenvalues();
            prop_assert!(lo > -1e-8 && hi < 1.0 + 1e-8);
            prop_assert!(s.purity() <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn one_dimensional_amplitude_scaling(n_res in 0.1f64..100.0, sigma in 0.05f64..1.0) {
        let p = PulsePair::new(1.0, sigma, 30.0, 50.0, 0.0);
        let base = normalize_amplitude_1d(n_res, 1.0, sigma, 1000.0, &p, EnergyConvention::PerPulse).unwrap();
        let four = normalize_amplitude_1d(4.0 * n_res, 1.0, sigma, 1000.0, &p, EnergyConvention::PerPulse).unwrap();
        prop_assert!((four / base - 2.0).abs() < 1e-12);
        let longer = normalize_amplitude_1d(n_res, 1.0, 0.5 * sigma, 1000.0, &p, EnergyConvention::PerPulse).unwrap();
        prop_assert!((longer / base - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn broadband_amplitude_scaling(n_res in 0.1f64..1e4, duration in 10e-15f64..1e-9) {
        let t = NuclearTarget::default();
        let spec = XrayPulseSpec { duration, resonant_photons: n_res, ..XrayPulseSpec::fel() };
        let e = broadband_amplitude(&spec, &t).unwrap().amplitude;
        // E0 sigma_t / sqrt(n_res) is fixed by the target alone
        let reference = broadband_amplitude(&XrayPulseSpec::fel(), &t).unwrap().amplitude
            * XrayPulseSpec::fel().sigma_t();
        prop_assert!((e * spec.sigma_t() / n_res.sqrt() / reference - 1.0).abs() < 1e-12);
    }
}
