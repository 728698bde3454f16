//! Scenario configuration: published defaults, a TOML file on top, `--set` on top of that.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use stimdyn::model::CavityParams;
use stimdyn::nuclear::{NuclearTarget, XrayPulseSpec};
use stimdyn::semiclassical::EnergyConvention;
use stimdyn::series::IntensityMode;
use toml::{Table, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    FreeWp,
    SponDecay,
    StimEarly,
    StimLate,
    DoublePulse,
    PhaseScan,
    SemiclassicalCompare,
    PerturbativeBreakdown,
    FelRates,
    SynchrotronRates,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::FreeWp,
        Scenario::SponDecay,
        Scenario::StimEarly,
        Scenario::StimLate,
        Scenario::DoublePulse,
        Scenario::PhaseScan,
        Scenario::SemiclassicalCompare,
        Scenario::PerturbativeBreakdown,
        Scenario::FelRates,
        Scenario::SynchrotronRates,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::FreeWp => "free-wp",
            Scenario::SponDecay => "spon-decay",
            Scenario::StimEarly => "stim-early",
            Scenario::StimLate => "stim-late",
            Scenario::DoublePulse => "double-pulse",
            Scenario::PhaseScan => "phase-scan",
            Scenario::SemiclassicalCompare => "semiclassical-compare",
            Scenario::PerturbativeBreakdown => "perturbative-breakdown",
            Scenario::FelRates => "fel-rates",
            Scenario::SynchrotronRates => "synchrotron-rates",
        }
    }

    /// Published figure or section the scenario reproduces.
    pub fn figure(self) -> &'static str {
        match self {
            Scenario::FreeWp => "Fig. 2",
            Scenario::SponDecay => "Fig. 3",
            Scenario::StimEarly => "Figs. 4, 5",
            Scenario::StimLate => "Fig. 4",
            Scenario::DoublePulse => "Fig. 6",
            Scenario::PhaseScan => "Figs. 7b, 8",
            Scenario::SemiclassicalCompare => "Fig. 7a",
            Scenario::PerturbativeBreakdown => "Sec. III",
            Scenario::FelRates => "Fig. 9",
            Scenario::SynchrotronRates => "Fig. 10",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::FreeWp => "single-photon packet bouncing in the empty cavity",
            Scenario::SponDecay => "spontaneous decay of the excited atom",
            Scenario::StimEarly => "excited atom hit by a photon packet: stimulated emission",
            Scenario::StimLate => "packet arriving late at the excited atom: absorption",
            Scenario::DoublePulse => "two single-photon packets on the ground-state atom",
            Scenario::PhaseScan => "phase-coherent double pulse, scan of the relative phase",
            Scenario::SemiclassicalCompare => "Bloch equations against the quantum double pulse",
            Scenario::PerturbativeBreakdown => "second-order decomposition against the full Bloch solution",
            Scenario::FelRates => "57Fe nuclei driven by split FEL pulses",
            Scenario::SynchrotronRates => "57Fe nuclei driven by synchrotron bunches",
        }
    }

    /// Config sections the scenario reads.
    pub fn sections(self) -> &'static [&'static str] {
        match self {
            Scenario::FreeWp => &["cavity", "packet", "integration", "observables"],
            Scenario::SponDecay => &["cavity", "integration", "observables"],
            Scenario::StimEarly | Scenario::StimLate => &["cavity", "packet", "integration", "observables"],
            Scenario::DoublePulse => &["cavity", "packet", "pair", "integration", "observables"],
            Scenario::PhaseScan => &["cavity", "packet", "pair", "integration", "observables", "scan"],
            Scenario::SemiclassicalCompare => &["cavity", "packet", "pair", "integration", "scan", "obe"],
            Scenario::PerturbativeBreakdown => &["breakdown"],
            Scenario::FelRates | Scenario::SynchrotronRates => &["target", "pulses", "nuclear"],
        }
    }

    fn uses(self, section: &str) -> bool {
        self.sections().contains(&section)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavitySection {
    pub length: f64,
    pub atom_frequency: f64,
    pub decay_rate: f64,
    pub carrier_frequency: f64,
    pub modes: usize,
    /// Defaults to the cavity centre.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom_position: Option<f64>,
}

impl Default for CavitySection {
    fn default() -> Self {
        let p = CavityParams::default();
        Self {
            length: p.length,
            atom_frequency: p.atom_frequency,
            decay_rate: p.decay_rate,
            carrier_frequency: p.carrier_frequency,
            modes: p.modes,
            atom_position: None,
        }
    }
}

impl CavitySection {
    pub fn params(&self) -> CavityParams {
        CavityParams {
            length: self.length,
            atom_frequency: self.atom_frequency,
            decay_rate: self.decay_rate,
            carrier_frequency: self.carrier_frequency,
            modes: self.modes,
            atom_position: self.atom_position,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PacketSection {
    /// Packet centre at `t = 0`; single-packet scenarios only.
    pub center: f64,
    pub width: f64,
    pub tolerance: f64,
}

impl Default for PacketSection {
    fn default() -> Self {
        Self { center: 117.7, width: 0.25, tolerance: 1e-3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    /// `W1^+ W2^+ |g,0>`
    TwoPhoton,
    /// `(W1^+ + e^{i phi} W2^+)^2 |g,0>`
    PhaseCoherent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairSection {
    pub kind: PairKind,
    pub first_center: f64,
    pub second_center: f64,
    pub phase: f64,
}

impl Default for PairSection {
    fn default() -> Self {
        Self { kind: PairKind::TwoPhoton, first_center: 95.7, second_center: 75.7, phase: 2.51 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationSection {
    pub dt: f64,
    pub stride: usize,
    pub norm_tolerance: f64,
    pub t_end: f64,
}

impl Default for IntegrationSection {
    fn default() -> Self {
        let d = stimdyn::dynamics::Integration::default();
        // rate peaks of the coherent double pulse are about one time unit wide
        Self { dt: d.dt, stride: 5, norm_tolerance: d.norm_tolerance, t_end: 160.0 }
    }
}

impl IntegrationSection {
    pub fn integration(&self) -> stimdyn::dynamics::Integration {
        stimdyn::dynamics::Integration {
            dt: self.dt,
            stride: self.stride,
            norm_tolerance: self.norm_tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObservablesSection {
    pub grid_points: usize,
    pub intensity_mode: IntensityMode,
    /// Time at which intensity signatures are extracted.
    pub t_ref: f64,
    /// Boxcar width for the decay rate, in samples.
    pub smoothing: usize,
    /// Times at which intensity profiles are written.
    pub snapshots: Vec<f64>,
    /// Window over which the decay rate is averaged.
    pub plateau: [f64; 2],
}

impl Default for ObservablesSection {
    fn default() -> Self {
        Self {
            grid_points: stimdyn::observables::DEFAULT_GRID_POINTS,
            intensity_mode: IntensityMode::Envelope,
            t_ref: 96.0,
            smoothing: 5,
            snapshots: vec![96.0],
            plateau: [20.0, 80.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub points: usize,
    /// The scan records the largest population inside this window.
    pub window: [f64; 2],
    /// Window searched for the peak decay rate at the extremal phases.
    pub rate_window: [f64; 2],
}

impl Default for ScanSection {
    fn default() -> Self {
        Self { points: 64, window: [45.0, 70.0], rate_window: [40.0, 65.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObeSection {
    pub first_center: f64,
    pub second_center: f64,
    pub phase: f64,
    /// Quantum phase the Bloch trajectory is compared against.
    pub quantum_phase: f64,
    pub n_res: f64,
    pub beam_area: f64,
    pub energy: EnergyConvention,
    pub dt: f64,
    pub stride: usize,
}

impl Default for ObeSection {
    fn default() -> Self {
        Self {
            first_center: 30.0,
            second_center: 50.0,
            phase: 4.71,
            quantum_phase: 4.09,
            n_res: 1.0,
            beam_area: 1.0,
            energy: EnergyConvention::PerPulse,
            dt: 0.01,
            stride: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BreakdownSection {
    pub decay_rate: f64,
    pub dipole: f64,
    /// Inverse pulse width `sigma c`; the pulse lasts `4 / (sigma c)`.
    pub sigma_c: f64,
    pub first_area: f64,
    /// Excitation lost between the pulses.
    pub loss: f64,
    pub areas: Vec<f64>,
    pub phase: f64,
    pub dt_prepare: f64,
    pub dt: f64,
}

impl Default for BreakdownSection {
    fn default() -> Self {
        Self {
            decay_rate: 0.05,
            dipole: 1.0,
            sigma_c: 200.0,
            first_area: 0.6,
            loss: 0.1,
            areas: vec![0.3, 0.15, 0.075],
            phase: PI,
            dt_prepare: 1e-5,
            dt: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NuclearSection {
    /// Step size in units of `sigma_t`.
    pub step: f64,
    /// Start of the run before the first pulse, in units of `sigma_t`.
    pub lead: f64,
    pub stride: usize,
    pub curve_samples: usize,
    /// Points of the `Delta D(phi)` sweep.
    pub scan_points: usize,
}

impl Default for NuclearSection {
    fn default() -> Self {
        let d = stimdyn::nuclear::NuclearIntegration::default();
        Self { step: d.step, lead: d.lead, stride: d.stride, curve_samples: 400, scan_points: 64 }
    }
}

impl NuclearSection {
    pub fn integration(&self) -> stimdyn::nuclear::NuclearIntegration {
        stimdyn::nuclear::NuclearIntegration { step: self.step, lead: self.lead, stride: self.stride }
    }
}

/// Fully resolved scenario configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub cavity: CavitySection,
    #[serde(default)]
    pub packet: PacketSection,
    #[serde(default)]
    pub pair: PairSection,
    #[serde(default)]
    pub integration: IntegrationSection,
    #[serde(default)]
    pub observables: ObservablesSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub obe: ObeSection,
    #[serde(default)]
    pub breakdown: BreakdownSection,
    #[serde(default)]
    pub target: NuclearTarget,
    #[serde(default)]
    pub pulses: XrayPulseSpec,
    #[serde(default)]
    pub nuclear: NuclearSection,
}

impl ScenarioConfig {
    /// Published parameters of the scenario.
    pub fn defaults(scenario: Scenario) -> Self {
        let mut c = Self {
            scenario,
            cavity: CavitySection::default(),
            packet: PacketSection::default(),
            pair: PairSection::default(),
            integration: IntegrationSection::default(),
            observables: ObservablesSection::default(),
            scan: ScanSection::default(),
            obe: ObeSection::default(),
            breakdown: BreakdownSection::default(),
            target: NuclearTarget::default(),
            pulses: XrayPulseSpec::fel(),
            nuclear: NuclearSection::default(),
        };
        match scenario {
            Scenario::FreeWp => {
                c.cavity.modes = 1000;
                c.packet.center = 10.0;
                c.observables.snapshots = vec![70.0, 160.0];
            }
            Scenario::SponDecay => {
                c.integration.t_end = 160.0;
                c.observables.snapshots = vec![40.0, 80.0];
            }
            Scenario::StimEarly => {
                c.packet.center = 117.7;
                c.integration.t_end = 100.0;
            }
            Scenario::StimLate => {
                c.packet.center = 87.7;
                c.integration.t_end = 100.0;
            }
            Scenario::DoublePulse => {
                c.integration.t_end = 100.0;
                c.observables.snapshots = vec![40.0, 60.0];
            }
            Scenario::PhaseScan => {
                c.pair.kind = PairKind::PhaseCoherent;
                c.integration.t_end = 70.0;
                c.observables.snapshots = vec![55.0];
            }
            Scenario::SemiclassicalCompare => {
                c.pair.kind = PairKind::PhaseCoherent;
                c.integration.t_end = 80.0;
            }
            Scenario::PerturbativeBreakdown => {}
            Scenario::FelRates => c.pulses = XrayPulseSpec::fel(),
            Scenario::SynchrotronRates => c.pulses = XrayPulseSpec::synchrotron(),
        }
        c.cavity.atom_position = Some(0.5 * c.cavity.length);
        c
    }

    /// Defaults, then `file`, then `overrides` (`section.key=value`).
    pub fn resolve(scenario: Scenario, file: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut user = Table::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let parsed: Table =
                text.parse().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            merge(&mut user, parsed);
        }
        for o in overrides {
            apply_override(&mut user, o)?;
        }
        if let Some(v) = user.remove("scenario") {
            if v.as_str() != Some(scenario.name()) {
                return Err(CliError::Config(format!(
                    "scenario: file is for {v}, but {} was requested",
                    scenario.name()
                )));
            }
        }
        for key in user.keys() {
            if !scenario.uses(key) {
                return Err(CliError::Config(format!(
                    "{key}: section not used by {scenario} (expected one of: {})",
                    scenario.sections().join(", ")
                )));
            }
        }
        let cavity_moved = user
            .get("cavity")
            .and_then(Value::as_table)
            .is_some_and(|t| t.contains_key("length") && !t.contains_key("atom_position"));

        let mut table = Value::try_from(Self::defaults(scenario))
            .map_err(|e| CliError::Config(e.to_string()))?
            .as_table()
            .cloned()
            .unwrap_or_default();
        if cavity_moved {
            if let Some(Value::Table(c)) = table.get_mut("cavity") {
                c.remove("atom_position");
            }
        }
        merge(&mut table, user);
        let mut cfg: Self = serde_path_to_error::deserialize(Value::Table(table))
            .map_err(|e| CliError::Config(format!("{}: {}", e.path(), e.inner().message())))?;
        if cfg.cavity.atom_position.is_none() {
            cfg.cavity.atom_position = Some(0.5 * cfg.cavity.length);
        }
        Ok(cfg)
    }

    /// Sets the scenario's relative phase, as `--phi` does.
    pub fn set_phase(&mut self, phi: f64) {
        match self.scenario {
            Scenario::DoublePulse => {
                self.pair.kind = PairKind::PhaseCoherent;
                self.pair.phase = phi;
            }
            Scenario::PhaseScan => self.pair.phase = phi,
            Scenario::SemiclassicalCompare => self.obe.phase = phi,
            Scenario::PerturbativeBreakdown => self.breakdown.phase = phi,
            Scenario::FelRates | Scenario::SynchrotronRates => self.pulses.phase = phi,
            _ => log::warn!("{} has no relative phase; --phi ignored", self.scenario),
        }
    }

    /// TOML of the sections this scenario reads.
    pub fn to_toml(&self) -> String {
        let full = Value::try_from(self).expect("config serializes");
        let mut out = Table::new();
        out.insert("scenario".into(), Value::String(self.scenario.name().into()));
        if let Value::Table(t) = full {
            for s in self.scenario.sections() {
                if let Some(v) = t.get(*s) {
                    out.insert((*s).to_string(), v.clone());
                }
            }
        }
        toml::to_string_pretty(&out).expect("toml table serializes")
    }
}

fn merge(base: &mut Table, top: Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn apply_override(table: &mut Table, spec: &str) -> Result<(), CliError> {
    let (path, raw) =
        spec.split_once('=').ok_or_else(|| CliError::Config(format!("--set {spec}: expected key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Config(format!("--set {spec}: malformed key path")));
    }
    let value = parse_value(raw.trim());
    let mut node = table;
    for k in &keys[..keys.len() - 1] {
        let entry = node.entry(k.to_string()).or_insert_with(|| Value::Table(Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("--set {spec}: {k} is not a section")))?;
    }
    node.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

/// A TOML literal if it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        for s in Scenario::ALL {
            let c = ScenarioConfig::defaults(s);
            let text = c.to_toml();
            let path = std::env::temp_dir().join(format!("stimdyn-roundtrip-{}.toml", s.name()));
            std::fs::write(&path, &text).unwrap();
            let back = ScenarioConfig::resolve(s, Some(&path), &[]).unwrap();
            assert_eq!(back, c, "{s}");
        }
    }

    #[test]
    fn overrides_take_precedence() {
        let c = ScenarioConfig::resolve(
            Scenario::StimEarly,
            None,
            &[
                "cavity.modes=100".into(),
                "observables.intensity_mode=raw".into(),
                "packet.center = 50".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.cavity.modes, 100);
        assert_eq!(c.observables.intensity_mode, IntensityMode::Raw);
        assert_eq!(c.packet.center, 50.0);
    }

    #[test]
    fn unknown_keys_report_their_path() {
        let err =
            ScenarioConfig::resolve(Scenario::StimEarly, None, &["cavity.mode=100".into()]).unwrap_err();
        assert!(err.to_string().contains("cavity"), "{err}");
        let err = ScenarioConfig::resolve(Scenario::FreeWp, None, &["obe.phase=1".into()]).unwrap_err();
        assert!(err.to_string().contains("obe"), "{err}");
        let err = ScenarioConfig::resolve(Scenario::FreeWp, None, &["cavity.modes=abc".into()]).unwrap_err();
        assert!(err.to_string().contains("cavity.modes"), "{err}");
    }

    #[test]
    fn atom_follows_a_resized_cavity() {
        let c = ScenarioConfig::resolve(Scenario::SponDecay, None, &["cavity.length=100".into()]).unwrap();
        assert_eq!(c.cavity.atom_position, Some(50.0));
    }

    #[test]
    fn defaults_match_reference_parameters() {
        let c = ScenarioConfig::defaults(Scenario::FreeWp);
        assert_eq!(c.cavity.length, 80.0 * PI);
        assert_eq!(c.cavity.decay_rate, 0.05);
        assert_eq!(c.cavity.carrier_frequency, 1000.0);
        assert_eq!(c.packet.width, 0.25);
        assert_eq!(c.cavity.modes, 1000);
        assert_eq!(ScenarioConfig::defaults(Scenario::StimLate).packet.center, 87.7);
        let s = ScenarioConfig::defaults(Scenario::SynchrotronRates).pulses;
        assert_eq!((s.duration, s.delay, s.second_photon_fraction), (100e-12, 8e-9, 0.25));
    }
}
