//! One function per scenario, each turning a resolved config into tables and signatures.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde_json::json;
use stimdyn::dynamics::{
    evolve_free, evolve_one_excitation, evolve_two_excitation, init_excited_atom, init_phase_coherent_double,
    init_photon_plus_excited_atom, init_two_photons, packet_state, FieldOnlyState, Integration, Normalized,
    OneExcitationState, Trajectory, TwoExcitationState,
};
use stimdyn::model::{gaussian_weight, CavityModel, WavePacketSpec};
use stimdyn::nuclear::{decay_curves, double_pulse, NuclearReport, XrayPulseSpec};
use stimdyn::observables::{
    decay_rate, induced_packet, intensity, intensity_differences, phase_scan, population, scan_periodic,
    spectrum, uniform_grid, FieldIntensity, PhaseScanSetup, RateOptions,
};
use stimdyn::semiclassical::{
    evolve_obe, normalize_amplitude_1d, perturbative_terms, stimulated_count, t_int_from_loss, AtomParams,
    DensityState, ObeTrajectory, PulsePair, SinglePulse,
};
use stimdyn::series::{SpatialProfile, TimeSeries};

use crate::config::{PairKind, Scenario, ScenarioConfig};
use crate::error::CliError;
use crate::output::{Cell, RunOutput, Table};

/// Flags that change what is written but not what is computed.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub dump_amplitudes: bool,
}

pub fn run(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutput, CliError> {
    log::info!("running {}", cfg.scenario);
    match cfg.scenario {
        Scenario::FreeWp => free_packet(cfg, opts),
        Scenario::SponDecay => spontaneous_decay(cfg, opts),
        Scenario::StimEarly | Scenario::StimLate => stimulated(cfg, opts),
        Scenario::DoublePulse => double_packet(cfg, opts),
        Scenario::PhaseScan => phase_scan_run(cfg, opts),
        Scenario::SemiclassicalCompare => semiclassical_compare(cfg),
        Scenario::PerturbativeBreakdown => breakdown(cfg),
        Scenario::FelRates | Scenario::SynchrotronRates => nuclear(cfg),
    }
}

fn model(cfg: &ScenarioConfig) -> Result<CavityModel, CliError> {
    Ok(CavityModel::new(cfg.cavity.params())?)
}

fn packet(cfg: &ScenarioConfig, center: f64) -> WavePacketSpec {
    WavePacketSpec {
        center,
        carrier: cfg.cavity.carrier_frequency,
        width: cfg.packet.width,
        tolerance: cfg.packet.tolerance,
    }
}

/// Sorted, deduplicated stop times inside `(t0, t_end]`, always ending at `t_end`.
fn stops(times: &[f64], t_end: f64) -> Vec<f64> {
    let mut v: Vec<f64> = times.iter().copied().filter(|t| *t > 0.0 && *t < t_end).collect();
    v.push(t_end);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Runs through each stop in turn, keeping the state reached there.
fn segmented<S: Clone>(
    init: &S,
    stops: &[f64],
    mut step: impl FnMut(&S, f64) -> stimdyn::Result<(S, Trajectory)>,
) -> Result<(Vec<S>, Trajectory), CliError> {
    let mut states = Vec::with_capacity(stops.len());
    let mut traj = Trajectory::default();
    let mut current = init.clone();
    for &t in stops {
        let (next, seg) = step(&current, t)?;
        let skip = usize::from(!traj.times.is_empty());
        traj.times.extend_from_slice(&seg.times[skip..]);
        traj.populations.extend_from_slice(&seg.populations[skip..]);
        traj.norms.extend_from_slice(&seg.norms[skip..]);
        states.push(next.clone());
        current = next;
    }
    Ok((states, traj))
}

fn run_one(
    model: &CavityModel,
    init: &OneExcitationState,
    stops: &[f64],
    integ: &Integration,
) -> Result<(Vec<OneExcitationState>, Trajectory), CliError> {
    segmented(init, stops, |s, t| evolve_one_excitation(model, s, t, integ).map(|e| (e.state, e.trajectory)))
}

fn run_two(
    model: &CavityModel,
    init: &TwoExcitationState,
    stops: &[f64],
    integ: &Integration,
) -> Result<(Vec<TwoExcitationState>, Trajectory), CliError> {
    segmented(init, stops, |s, t| evolve_two_excitation(model, s, t, integ).map(|e| (e.state, e.trajectory)))
}

fn state_at<'a, S>(stops: &[f64], states: &'a [S], t: f64) -> &'a S {
    let i = stops.iter().position(|s| *s == t).expect("requested time is a stop");
    &states[i]
}

fn profile<S: FieldIntensity>(
    cfg: &ScenarioConfig,
    model: &CavityModel,
    s: &S,
) -> Result<SpatialProfile, CliError> {
    let grid = uniform_grid(model, cfg.observables.grid_points);
    Ok(intensity(model, s, &grid, cfg.observables.intensity_mode)?)
}

fn push_profile(table: &mut Table, p: &SpatialProfile, tag: Option<&str>) {
    for (z, v) in p.positions.iter().zip(&p.values) {
        let mut row = vec![Cell::from(*z), Cell::from(*v), Cell::from(p.time)];
        if let Some(tag) = tag {
            row.push(tag.into());
        }
        table.push(row);
    }
}

fn spectrum_table(model: &CavityModel, occupation: &[f64], time: f64) -> Table {
    let mut t = Table::new("spectrum", &["n_s", "occupation", "t"]);
    for (n, s) in model.shifted_indices().iter().zip(occupation) {
        t.push(vec![Cell::Int(*n), Cell::from(*s), Cell::from(time)]);
    }
    t
}

fn rates(cfg: &ScenarioConfig, traj: &Trajectory) -> TimeSeries {
    let opts = RateOptions { smoothing: cfg.observables.smoothing, ..RateOptions::default() };
    let r = decay_rate(&traj.population_series(), &opts);
    r.rate
}

fn mean_in(series: &TimeSeries, window: [f64; 2]) -> Option<f64> {
    let v: Vec<f64> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(t, _)| **t >= window[0] && **t <= window[1])
        .map(|(_, v)| *v)
        .collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn population_rows(table: &mut Table, traj: &Trajectory, tag: &str) {
    for (t, p) in traj.times.iter().zip(&traj.populations) {
        table.push(vec![Cell::from(*t), Cell::from(*p), tag.into()]);
    }
}

fn rate_rows(table: &mut Table, rate: &TimeSeries, gamma: f64, tag: &str) {
    for (t, r) in rate.times.iter().zip(&rate.values) {
        table.push(vec![Cell::from(*t), Cell::from(*r), Cell::from(r / gamma), tag.into()]);
    }
}

fn dump_field(out: &mut RunOutput, model: &CavityModel, rows: Vec<(&str, i64, i64, C64)>) {
    let _ = model;
    let mut t = Table::new("amplitudes", &["component", "n_s", "m_s", "re", "im"]);
    for (c, n, m, a) in rows {
        t.push(vec![c.into(), Cell::Int(n), Cell::Int(m), Cell::from(a.re), Cell::from(a.im)]);
    }
    out.tables.push(t);
}

fn dump_one(out: &mut RunOutput, model: &CavityModel, s: &OneExcitationState) {
    let ns = model.shifted_indices();
    let mut rows = vec![("B", -1, -1, s.atom)];
    rows.extend(s.field.iter().zip(&ns).map(|(c, n)| ("C", *n, -1, *c)));
    dump_field(out, model, rows);
}

fn dump_two(out: &mut RunOutput, model: &CavityModel, s: &TwoExcitationState) {
    let ns = model.shifted_indices();
    let mut rows: Vec<(&str, i64, i64, C64)> = Vec::new();
    rows.extend(s.excited.iter().zip(&ns).map(|(c, n)| ("D", *n, -1, *c)));
    rows.extend(s.doubled.iter().zip(&ns).map(|(c, n)| ("E", *n, -1, *c)));
    for i in 0..ns.len() {
        for j in i + 1..ns.len() {
            rows.push(("F", ns[i], ns[j], s.pairs.get(i, j)));
        }
    }
    dump_field(out, model, rows);
}

fn free_packet(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutput, CliError> {
    let model = model(cfg)?;
    let spec = packet(cfg, cfg.packet.center);
    let captured = spec.check(&model)?;
    let psi0 = packet_state(&model, &spec)?;
    let mut out = RunOutput::default();
    let mut table = Table::new("intensity", &["z", "intensity", "t"]);
    let times = stops(&cfg.observables.snapshots, cfg.integration.t_end);
    let mut last: Option<FieldOnlyState> = None;
    for &t in std::iter::once(&0.0).chain(&times) {
        let s = evolve_free(&model, &psi0, t);
        let p = profile(cfg, &model, &s)?;
        if let Some((z, _)) = p.peak() {
            out.set(&format!("peak_position_t{t}"), z);
        }
        push_profile(&mut table, &p, None);
        last = Some(s);
    }
    let last = last.expect("at least one stop");
    out.tables.push(table);
    out.tables.push(spectrum_table(&model, &spectrum(&last), last.time));
    out.set("captured_mass", captured);
    out.set("norm", last.norm_sqr());
    out.set("pulse_duration", spec.duration());
    if opts.dump_amplitudes {
        let ns = model.shifted_indices();
        let rows = last.amplitudes.iter().zip(&ns).map(|(a, n)| ("A", *n, -1, *a)).collect();
        dump_field(&mut out, &model, rows);
    }
    Ok(out)
}

fn spontaneous_decay(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutput, CliError> {
    let model = model(cfg)?;
    let integ = cfg.integration.integration();
    let times = stops(&cfg.observables.snapshots, cfg.integration.t_end);
    let (states, traj) = run_one(&model, &init_excited_atom(&model), &times, &integ)?;
    let gamma = model.decay_rate();
    let rate = rates(cfg, &traj);

    let mut out = RunOutput::default();
    let mut pop = Table::new("population", &["t", "population", "state"]);
    population_rows(&mut pop, &traj, "p2");
    out.tables.push(pop);
    let mut rt = Table::new("decay_rate", &["t", "rate", "rate_over_gamma", "state"]);
    rate_rows(&mut rt, &rate, gamma, "p2");
    out.tables.push(rt);
    let mut it = Table::new("intensity", &["z", "intensity", "t"]);
    for s in &states {
        push_profile(&mut it, &profile(cfg, &model, s)?, None);
    }
    out.tables.push(it);
    let last = states.last().expect("at least one stop");
    out.tables.push(spectrum_table(&model, &spectrum(last), last.time));

    let plateau = mean_in(&rate, cfg.observables.plateau);
    out.set("plateau_rate", plateau);
    out.set("plateau_rate_over_gamma", plateau.map(|r| r / gamma));
    out.set("golden_rule_rate", model.golden_rule_rate());
    out.set("population_t40", traj.population_series().at(40.0));
    out.set("final_population", population(last));
    out.set("norm_drift", traj.norm_drift());
    if opts.dump_amplitudes {
        dump_one(&mut out, &model, last);
    }
    Ok(out)
}

/// Time the packet centre reaches the atom, moving right from `center`.
fn arrival(model: &CavityModel, center: f64) -> f64 {
    model.atom_position() - center
}

fn stimulated(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutput, CliError> {
    let model = model(cfg)?;
    let integ = cfg.integration.integration();
    let spec = packet(cfg, cfg.packet.center);
    let t_ref = cfg.observables.t_ref;
    let mut wanted = cfg.observables.snapshots.clone();
    wanted.push(t_ref);
    let times = stops(&wanted, cfg.integration.t_end);
    if !times.contains(&t_ref) {
        return Err(CliError::Config(format!(
            "observables.t_ref: {t_ref} must lie in (0, integration.t_end]"
        )));
    }

    let init = init_photon_plus_excited_atom(&model, &spec)?;
    let (s3, traj3) = run_two(&model, &init, &times, &integ)?;
    let (s2, traj2) = run_one(&model, &init_excited_atom(&model), &times, &integ)?;
    let psi1 = packet_state(&model, &spec)?;
    let gamma = model.decay_rate();
    let (rate3, rate2) = (rates(cfg, &traj3), rates(cfg, &traj2));

    let mut out = RunOutput::default();
    let mut pop = Table::new("population", &["t", "population", "state"]);
    population_rows(&mut pop, &traj2, "p2");
    population_rows(&mut pop, &traj3, "p3");
    out.tables.push(pop);
    let mut rt = Table::new("decay_rate", &["t", "rate", "rate_over_gamma", "state"]);
    rate_rows(&mut rt, &rate2, gamma, "p2");
    rate_rows(&mut rt, &rate3, gamma, "p3");
    out.tables.push(rt);

    let mut it = Table::new("intensity", &["z", "intensity", "t", "state"]);
    let mut at_ref = None;
    for (k, &t) in times.iter().enumerate() {
        let p1 = profile(cfg, &model, &evolve_free(&model, &psi1, t))?;
        let p2 = profile(cfg, &model, &s2[k])?;
        let p3 = profile(cfg, &model, &s3[k])?;
        push_profile(&mut it, &p1, Some("i1"));
        push_profile(&mut it, &p2, Some("i2"));
        push_profile(&mut it, &p3, Some("i3"));
        if t == t_ref {
            at_ref = Some((p1, p2, p3));
        }
    }
    out.tables.push(it);
    let (p1, p2, p3) = at_ref.expect("t_ref is a stop");
    let diff = intensity_differences(&model, &p1, &p2, &p3)?;
    out.set("delta_i_left", diff.left);
    out.set("delta_i_right", diff.right);
    out.set("delta_i_total", diff.total);
    match induced_packet(&model, &p3, &p1) {
        Ok(ind) => {
            let mut t = Table::new("induced", &["z", "intensity", "t"]);
            push_profile(&mut t, &ind.profile, None);
            out.tables.push(t);
            out.set("induced_integral", ind.integral);
            out.set("induced_center", ind.center);
            out.set("stimulus_center", ind.stimulus_center);
            out.set("induced_offset", (ind.center - ind.stimulus_center).abs());
        }
        Err(e @ stimdyn::Error::AtomNotCentred { .. }) => log::warn!("no induced packet: {e}"),
        Err(e) => return Err(e.into()),
    }

    let last = state_at(&times, &s3, cfg.integration.t_end);
    out.tables.push(spectrum_table(&model, &spectrum(last), last.time));

    let t_arr = arrival(&model, spec.center);
    let window = [(t_arr - 0.5 * spec.duration()).max(0.0), t_arr + 0.5 * spec.duration()];
    let peak = rate3.max_in(window[0], window[1]);
    let low = rate3.min_in(window[0], window[1]);
    out.set("arrival_time", t_arr);
    out.set("pulse_duration", spec.duration());
    out.set("pulse_window_start", window[0]);
    out.set("pulse_window_end", window[1]);
    out.set("peak_rate_over_gamma", peak.map(|p| p.1 / gamma));
    out.set("peak_rate_time", peak.map(|p| p.0));
    out.set("min_rate_over_gamma", low.map(|p| p.1 / gamma));
    out.set("min_rate_time", low.map(|p| p.0));
    out.set("population_p3_t_ref", traj3.population_series().at(t_ref));
    out.set("population_p2_t_ref", traj2.population_series().at(t_ref));
    out.set("norm_drift", traj3.norm_drift().max(traj2.norm_drift()));
    if opts.dump_amplitudes {
        dump_two(&mut out, &model, last);
    }
    Ok(out)
}

fn pair_state(
    cfg: &ScenarioConfig,
    model: &CavityModel,
    kind: PairKind,
    phase: f64,
) -> Result<Normalized<TwoExcitationState>, CliError> {
    let w1 = gaussian_weight(&packet(cfg, cfg.pair.first_center), model)?;
    let w2 = gaussian_weight(&packet(cfg, cfg.pair.second_center), model)?;
    Ok(match kind {
        PairKind::TwoPhoton => init_two_photons(model, &w1, &w2)?,
        PairKind::PhaseCoherent => init_phase_coherent_double(model, &w1, &w2, phase)?,
    })
}

fn double_packet(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutput, CliError> {
    let model = model(cfg)?;
    let integ = cfg.integration.integration();
    let init = pair_state(cfg, &model, cfg.pair.kind, cfg.pair.phase)?;
    let times = stops(&cfg.observables.snapshots, cfg.integration.t_end);
    let (states, traj) = run_two(&model, &init.state, &times, &integ)?;
    let gamma = model.decay_rate();
    let rate = rates(cfg, &traj);

    let mut out = RunOutput::default();
    let mut pop = Table::new("population", &["t", "population", "state"]);
    population_rows(&mut pop, &traj, "p3");
    out.tables.push(pop);
    let mut rt = Table::new("decay_rate", &["t", "rate", "rate_over_gamma", "state"]);
    rate_rows(&mut rt, &rate, gamma, "p3");
    out.tables.push(rt);
    let mut it = Table::new("intensity", &["z", "intensity", "t"]);
    for s in &states {
        push_profile(&mut it, &profile(cfg, &model, s)?, None);
    }
    out.tables.push(it);
    let last = states.last().expect("at least one stop");
    out.tables.push(spectrum_table(&model, &spectrum(last), last.time));

    let (t1, t2) = (arrival(&model, cfg.pair.first_center), arrival(&model, cfg.pair.second_center));
    let p = traj.population_series();
    let first = p.max_in(t1, 0.5 * (t1 + t2));
    let second = p.max_in(t2, cfg.integration.t_end);
    out.set(
        "state",
        match cfg.pair.kind {
            PairKind::TwoPhoton => "two-photon",
            PairKind::PhaseCoherent => "phase-coherent",
        },
    );
    out.set("phase", cfg.pair.phase);
    out.set("first_arrival", t1);
    out.set("second_arrival", t2);
    out.set("first_pulse_population", first.map(|x| x.1));
    out.set("first_pulse_peak_time", first.map(|x| x.0));
    out.set("second_pulse_population", second.map(|x| x.1));
    out.set("second_pulse_peak_time", second.map(|x| x.0));
    out.set("normalization", init.norm);
    out.set("norm_drift", traj.norm_drift());
    if opts.dump_amplitudes {
        dump_two(&mut out, &model, last);
    }
    Ok(out)
}

fn phase_scan_run(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutput, CliError> {
    let model = model(cfg)?;
    let integ = cfg.integration.integration();
    let setup = PhaseScanSetup {
        first: packet(cfg, cfg.pair.first_center),
        second: packet(cfg, cfg.pair.second_center),
        points: cfg.scan.points,
        window: (cfg.scan.window[0], cfg.scan.window[1]),
        integration: integ,
    };
    let scan = phase_scan(&model, &setup)?;
    let mut out = RunOutput::default();
    let mut st = Table::new("scan", &["phi", "max_population"]);
    for (p, v) in scan.phases.iter().zip(&scan.values) {
        st.push(vec![Cell::from(*p), Cell::from(*v)]);
    }
    out.tables.push(st);
    out.set("phase_min", scan.minimum.phase);
    out.set("phase_max", scan.maximum.phase);
    out.set("value_min", scan.minimum.value);
    out.set("value_max", scan.maximum.value);

    let gamma = model.decay_rate();
    let times = stops(&cfg.observables.snapshots, cfg.integration.t_end);
    let mut pop = Table::new("population", &["t", "population", "phase"]);
    let mut rt = Table::new("decay_rate", &["t", "rate", "rate_over_gamma", "phase"]);
    let mut it = Table::new("intensity", &["z", "intensity", "t", "phase"]);
    let mut drift: f64 = 0.0;
    for (label, phi) in [("min", scan.minimum.phase), ("max", scan.maximum.phase)] {
        let init = pair_state(cfg, &model, PairKind::PhaseCoherent, phi)?;
        let (states, traj) = run_two(&model, &init.state, &times, &integ)?;
        let rate = rates(cfg, &traj);
        population_rows(&mut pop, &traj, label);
        rate_rows(&mut rt, &rate, gamma, label);
        for s in &states {
            push_profile(&mut it, &profile(cfg, &model, s)?, Some(label));
        }
        let [a, b] = cfg.scan.rate_window;
        let peak = rate.max_in(a, b);
        out.set(&format!("peak_rate_over_gamma_at_{label}"), peak.map(|p| p.1 / gamma));
        out.set(&format!("peak_rate_time_at_{label}"), peak.map(|p| p.0));
        drift = drift.max(traj.norm_drift());
        if opts.dump_amplitudes && label == "min" {
            dump_two(&mut out, &model, states.last().expect("at least one stop"));
        }
    }
    out.tables.extend([pop, rt, it]);
    out.set("norm_drift", drift);
    Ok(out)
}

/// Bloch-equation atom and pulse pair matching the cavity model.
pub fn bloch_setup(
    cfg: &ScenarioConfig,
    model: &CavityModel,
    phase: f64,
) -> Result<(AtomParams, PulsePair), CliError> {
    let o = &cfg.obe;
    let atom = AtomParams {
        decay_rate: model.decay_rate(),
        detuning: model.atom_frequency() - model.carrier_frequency(),
        dipole: model.dipole(),
    };
    let mut pair = PulsePair::new(0.0, cfg.packet.width, o.first_center, o.second_center, phase);
    pair.amplitude = normalize_amplitude_1d(
        o.n_res,
        o.beam_area,
        cfg.packet.width,
        model.carrier_frequency(),
        &pair,
        o.energy,
    )?;
    pair.validate()?;
    Ok((atom, pair))
}

fn bloch_rows(table: &mut Table, tr: &ObeTrajectory, tag: &str) {
    for s in &tr.states {
        table.push(vec![
            Cell::from(s.time),
            Cell::from(s.rho22),
            Cell::from(s.rho12.re),
            Cell::from(s.rho12.im),
            tag.into(),
        ]);
    }
}

fn semiclassical_compare(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let model = model(cfg)?;
    let o = &cfg.obe;
    let (atom, pair) = bloch_setup(cfg, &model, o.phase)?;
    let t_end = cfg.integration.t_end;
    let tr = evolve_obe(&atom, &pair, &DensityState::ground(0.0), t_end, o.dt, o.stride)?;

    let [w0, w1] = cfg.scan.window;
    let scan = scan_periodic(cfg.scan.points, |phi| {
        let q = PulsePair { phase: phi, ..pair };
        let tr = evolve_obe(&atom, &q, &DensityState::ground(0.0), w1, o.dt, o.stride)?;
        Ok(tr.excited_population().max_in(w0, w1).map_or(0.0, |p| p.1))
    })?;

    let integ = cfg.integration.integration();
    let init = pair_state(cfg, &model, PairKind::PhaseCoherent, o.quantum_phase)?;
    let quantum = evolve_two_excitation(&model, &init.state, t_end, &integ)?;

    let mut out = RunOutput::default();
    let mut bt = Table::new("obe_trajectory", &["t", "rho22", "re_rho12", "im_rho12", "run"]);
    bloch_rows(&mut bt, &tr, "obe");
    out.tables.push(bt);
    let mut pop = Table::new("population", &["t", "population", "model"]);
    let obe_pop = tr.excited_population();
    for (t, p) in obe_pop.times.iter().zip(&obe_pop.values) {
        pop.push(vec![Cell::from(*t), Cell::from(*p), "obe".into()]);
    }
    population_rows(&mut pop, &quantum.trajectory, "quantum");
    out.tables.push(pop);
    let mut st = Table::new("obe_scan", &["phi", "max_rho22"]);
    for (p, v) in scan.phases.iter().zip(&scan.values) {
        st.push(vec![Cell::from(*p), Cell::from(*v)]);
    }
    out.tables.push(st);

    let rms = {
        let q = &quantum.trajectory;
        let sq: f64 = q.times.iter().zip(&q.populations).map(|(t, p)| (obe_pop.at(*t) - p).powi(2)).sum();
        (sq / q.times.len() as f64).sqrt()
    };
    let expected = ((o.second_center - o.first_center) * model.carrier_frequency()).rem_euclid(TAU);
    out.set("obe_phase", o.phase);
    out.set("quantum_phase", o.quantum_phase);
    out.set("obe_phase_min", scan.minimum.phase);
    out.set("obe_phase_max", scan.maximum.phase);
    out.set("expected_offset", expected);
    out.set("configured_offset", (o.phase - o.quantum_phase).rem_euclid(TAU));
    out.set("amplitude", pair.amplitude);
    out.set("pulse_area", atom.dipole * pair.first().area());
    out.set("population_rms_difference", rms);
    out.set("max_trace_drift", tr.max_trace_drift());
    out.set("norm_drift", quantum.trajectory.norm_drift());
    Ok(out)
}

/// Result of one breakdown comparison.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BreakdownRecord {
    pub area: f64,
    pub phase: f64,
    pub r_sd: f64,
    pub r_se: f64,
    pub r_ab: f64,
    pub r_phi1: f64,
    pub r_phi2: f64,
    pub n_se: f64,
    pub rho22_start: f64,
    pub predicted_rho22: f64,
    pub full_rho22: f64,
    pub error: f64,
}

fn breakdown(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let b = &cfg.breakdown;
    let atom = AtomParams { decay_rate: b.decay_rate, detuning: 0.0, dipole: b.dipole };
    let duration = 4.0 / b.sigma_c;
    let amplitude = |area: f64| area * b.sigma_c / (PI.sqrt() * b.dipole);
    let first = SinglePulse {
        amplitude: amplitude(b.first_area),
        sigma: b.sigma_c,
        center: 0.5 * duration,
        phase: 0.0,
    };
    let t_int = duration + t_int_from_loss(b.loss, b.decay_rate)?;
    let prep_steps = (t_int / b.dt_prepare).ceil() as usize;
    let prep =
        evolve_obe(&atom, &first, &DensityState::ground(0.0), t_int, b.dt_prepare, prep_steps.div_ceil(400))?;
    let rho = *prep.last();

    let mut out = RunOutput::default();
    let mut traj = Table::new("trajectory", &["t", "rho22", "re_rho12", "im_rho12", "run"]);
    bloch_rows(&mut traj, &prep, "prepare");
    let mut table = Table::new(
        "breakdown",
        &[
            "area",
            "full_rho22",
            "predicted_rho22",
            "error",
            "r_sd",
            "r_se",
            "r_ab",
            "r_phi1",
            "r_phi2",
            "n_se",
        ],
    );
    let mut records = Vec::new();
    let mut drift = prep.max_trace_drift();
    for &area in &b.areas {
        let pulse = SinglePulse {
            amplitude: amplitude(area),
            sigma: b.sigma_c,
            center: t_int + 0.5 * duration,
            phase: b.phase,
        };
        let steps = (duration / b.dt).ceil() as usize;
        let full = evolve_obe(&atom, &pulse, &rho, t_int + duration, b.dt, steps.div_ceil(200))?;
        drift = drift.max(full.max_trace_drift());
        let terms = perturbative_terms(&atom, &rho, &pulse, duration)?;
        let rec = BreakdownRecord {
            area,
            phase: terms.phase,
            r_sd: terms.r_sd,
            r_se: terms.r_se,
            r_ab: terms.r_ab,
            r_phi1: terms.r_phi1,
            r_phi2: terms.r_phi2,
            n_se: stimulated_count(&terms),
            rho22_start: terms.rho22_start,
            predicted_rho22: terms.predicted_rho22(),
            full_rho22: full.last().rho22,
            error: (full.last().rho22 - terms.predicted_rho22()).abs(),
        };
        table.push(
            [
                rec.area,
                rec.full_rho22,
                rec.predicted_rho22,
                rec.error,
                rec.r_sd,
                rec.r_se,
                rec.r_ab,
                rec.r_phi1,
                rec.r_phi2,
                rec.n_se,
            ]
            .into_iter()
            .map(Cell::from)
            .collect(),
        );
        bloch_rows(&mut traj, &full, &format!("area={area}"));
        records.push(rec);
    }
    out.tables.push(table);
    out.tables.push(traj);

    let slope = log_log_slope(&records.iter().map(|r| (r.area, r.error)).collect::<Vec<_>>());
    out.set("error_slope", slope);
    out.set("t_int", t_int);
    out.set("pulse_duration", duration);
    out.set("rho22_start", rho.rho22);
    out.set("im_rho12_start", rho.rho12.im);
    out.set("max_trace_drift", drift);
    out.documents.push(("breakdown".into(), serde_json::to_value(&records).expect("records serialize")));
    Ok(out)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn nuclear(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let integ = cfg.nuclear.integration();
    let report = double_pulse(&cfg.target, &cfg.pulses, &integ)?;
    let mut out = RunOutput::default();

    let curves = decay_curves(&report, cfg.nuclear.curve_samples);
    let mut ct = Table::new("decay_curves", &["t", "intensity", "run"]);
    for (tag, values) in [("reference", &curves.reference), ("signal", &curves.signal)] {
        for (t, v) in curves.times.iter().zip(values) {
            ct.push(vec![Cell::from(*t), Cell::from(*v), tag.into()]);
        }
    }
    out.tables.push(ct);
    let mut tt = Table::new("trajectory", &["t", "rho22", "re_rho12", "im_rho12", "run"]);
    bloch_rows(&mut tt, &report.reference_trajectory, "reference");
    bloch_rows(&mut tt, &report.signal_trajectory, "signal");
    out.tables.push(tt);

    let phases = stimdyn::observables::phase_grid(cfg.nuclear.scan_points.max(1));
    let mut st = Table::new("delta_d_scan", &["phi", "delta_d", "n_se", "events"]);
    for phi in phases.into_iter().chain(std::iter::once(TAU)) {
        let spec = XrayPulseSpec { phase: phi, ..cfg.pulses.clone() };
        let r = double_pulse(&cfg.target, &spec, &integ)?;
        st.push(vec![
            Cell::from(phi),
            Cell::from(r.delta_d),
            Cell::from(r.stimulated_photons),
            Cell::from(r.events),
        ]);
    }
    out.tables.push(st);

    summarize_nuclear(&mut out, &report);
    out.documents.push(("report".into(), nuclear_document(&report)));
    Ok(out)
}

fn summarize_nuclear(out: &mut RunOutput, r: &NuclearReport) {
    out.set("phase", r.pulses.phase);
    out.set("delta_d", r.delta_d);
    out.set("d_reference", r.d_reference);
    out.set("d_signal", r.d_signal);
    out.set("rho22_reference", r.rho22_reference);
    out.set("rho22_signal", r.rho22_signal);
    out.set("stimulated_photons", r.stimulated_photons);
    out.set("events", r.events);
    out.set("spectral_ratio", r.spectral_ratio);
    out.set("amplitude", r.amplitude);
    out.set("rabi_peak", r.rabi_peak);
    out.set("collective_rate", r.collective_rate);
    out.set("target_area", r.target_area);
    out.set("effective_thickness", r.effective_thickness);
    out.set("irradiated_nuclei", r.irradiated_nuclei);
    out.set("coherence_volumes", r.coherence_volumes);
    out.set("t_start", r.window.start);
    out.set("t_end", r.window.end);
    out.set("pulse_area", r.breakdown.area);
    out.set("verdict", if r.delta_d > 0.0 { "stimulated emission" } else { "absorption" });
    out.set(
        "max_trace_drift",
        r.signal_trajectory.max_trace_drift().max(r.reference_trajectory.max_trace_drift()),
    );
}

fn nuclear_document(r: &NuclearReport) -> serde_json::Value {
    let series =
        |tr: &ObeTrajectory| -> Vec<[f64; 2]> { tr.states.iter().map(|s| [s.time, s.rho22]).collect() };
    let mut doc = serde_json::to_value(r).expect("report serializes");
    if let Some(obj) = doc.as_object_mut() {
        obj.insert("stimulated_count".into(), json!(r.stimulated_photons));
        obj.insert(
            "rho22_trajectories".into(),
            json!({
                "reference": series(&r.reference_trajectory),
                "signal": series(&r.signal_trajectory),
            }),
        );
    }
    doc
}
