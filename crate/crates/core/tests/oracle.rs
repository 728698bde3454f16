//! Brute-force checks in the full truncated Fock space.

mod support;

use num_complex::Complex64 as C64;
use stimdyn::dynamics::{evolve_one_excitation, evolve_two_excitation, Integration, OneExcitationState};
use stimdyn::observables::intensity;
use stimdyn::series::IntensityMode;
use support::fock::{max_difference, small_model, two_excitation_sample, Fock};

#[test]
fn one_excitation_matches_dense_propagator() {
    let model = small_model(6);
    let fock = Fock { modes: 6, levels: 2 };
    let init = OneExcitationState {
        time: 0.0,
        atom: C64::new(0.8, 0.0),
        field: (0..6).map(|n| C64::from_polar(0.6 / 6f64.sqrt(), n as f64)).collect(),
    };
    let t = 30.0;
    let ev = evolve_one_excitation(&model, &init, t, &Integration::default()).unwrap();
    let exact = fock.propagate(&model, &fock.embed_one(&init), t);
    let err = max_difference(&fock.embed_one(&ev.state), &exact);
    assert!(err < 1e-6, "max amplitude error {err:e}");
    // the atom must actually have exchanged population for this to mean anything
    assert!((ev.state.atom.norm_sqr() - 0.64).abs() > 0.05);
}

#[test]
fn two_excitation_matches_dense_propagator() {
    let model = small_model(4);
    let fock = Fock { modes: 4, levels: 3 };
    let init = two_excitation_sample(4);
    let t = 30.0;
    let ev = evolve_two_excitation(&model, &init, t, &Integration::default()).unwrap();
    let exact = fock.propagate(&model, &fock.embed_two(&init), t);
    let err = max_difference(&fock.embed_two(&ev.state), &exact);
    assert!(err < 1e-6, "max amplitude error {err:e}");
    let moved = max_difference(&fock.embed_two(&init), &exact);
    assert!(moved > 0.1, "dynamics too weak to test: {moved}");
}

#[test]
fn intensity_equals_normal_ordered_expectation() {
    let model = small_model(4);
    let fock = Fock { modes: 4, levels: 3 };
    let state =
        evolve_two_excitation(&model, &two_excitation_sample(4), 7.0, &Integration::default()).unwrap().state;
    let psi = fock.embed_two(&state);
    let grid: Vec<f64> = (0..97).map(|i| model.length() * i as f64 / 96.0).collect();
    let profile = intensity(&model, &state, &grid, IntensityMode::Raw).unwrap();
    for (z, v) in grid.iter().zip(&profile.values) {
        let direct = fock.intensity(&model, &psi, *z);
        assert!((v - direct).abs() < 1e-10, "z = {z}: {v} vs {direct}");
        assert!(*v >= 0.0);
    }
}

#[test]
fn one_excitation_intensity_equals_expectation() {
    let model = small_model(6);
    let fock = Fock { modes: 6, levels: 2 };
    let state = OneExcitationState {
        time: 0.0,
        atom: C64::new(0.3, 0.1),
        field: (0..6).map(|n| C64::from_polar(0.35, 0.9 * n as f64)).collect(),
    };
    let psi = fock.embed_one(&state);
    let grid: Vec<f64> = (1..40).map(|i| model.length() * i as f64 / 40.0).collect();
    let profile = intensity(&model, &state, &grid, IntensityMode::Raw).unwrap();
    for (z, v) in grid.iter().zip(&profile.values) {
        assert!((v - fock.intensity(&model, &psi, *z)).abs() < 1e-10);
    }
}
